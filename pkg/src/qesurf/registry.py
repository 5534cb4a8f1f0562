"""Curated model registry with closed-form eigenspace data.

Each entry records a homogeneous affine surface model together with
independently verified eigenspace data for the quasi-Einstein operator:
eigenvalues, explicit solution bases, the dimension of the affine Killing
algebra, and (where known) scalar-invariant values and cross-references to
linearly or affinely isomorphic entries.

The registry is self-checking: on first access every stated basis element is
evaluated against the operator and must satisfy a residual below 1e-9, and
every stated basis must have full numeric rank.  A failure raises
:class:`~qesurf.errors.RegistryIntegrityError` naming the entry and the
citation string of the offending eigenspace.
"""

from __future__ import annotations

import difflib
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

from . import surface, terms
from .errors import ParseError, RegistryIntegrityError
from .surface import SurfaceModel, hyperbolic_model, model_from_dict, sphere_model, type_a_model, type_b_model
from .terms import ONE, ClosedForm, coord, cosf, expf, logf, power, sinf

__all__ = [
    "Expected",
    "ExtensionCase",
    "RegistryEntry",
    "entries",
    "get",
    "labels",
    "load_model",
    "triples",
]

_RESIDUAL_GATE = 1e-9


@dataclass(frozen=True)
class Expected:
    """One eigenvalue with an explicit solution basis.

    ``complete`` marks whether the basis is known to span the whole
    eigenspace (as opposed to a guaranteed subspace).
    """

    mu: float
    basis: tuple
    cite: str
    complete: bool = True


@dataclass(frozen=True)
class ExtensionCase:
    """A cotangent-bundle check attached to an entry: verify the isotropic
    quasi-Einstein identity for (mu, f), optionally also the parallel
    complex-structure check."""

    mu: float
    f: object
    walker: bool = False


@dataclass(frozen=True)
class RegistryEntry:
    label: str
    model: SurfaceModel
    expected: tuple
    killing_dim: int
    classify_family: str | None = None
    invariants: dict = field(default_factory=dict)
    isomorphic_to: tuple = ()
    extension: tuple = ()
    notes: str = ""


def _exp2(a1: float, a2: float) -> ClosedForm:
    """e^{a1 x1 + a2 x2}"""
    if a1 == 0.0:
        return expf(2, a2)
    if a2 == 0.0:
        return expf(1, a1)
    return expf(1, a1) * expf(2, a2)


def _flat_type_a() -> list[RegistryEntry]:
    """Flat full-plane models: the eigenspaces are three-dimensional and
    independent of the eigenvalue."""
    tables = {
        "A0": ({}, (ONE, coord(1), coord(2))),
        "A1": ({"111": 1.0, "122": 1.0}, (ONE, expf(1, 1.0), coord(2) * expf(1, 1.0))),
        "A2": ({"111": -1.0, "222": 1.0}, (ONE, expf(1, -1.0), expf(2, 1.0))),
        "A3": ({"222": 1.0}, (ONE, coord(1), expf(2, 1.0))),
        "A4": ({"221": 1.0}, (ONE, coord(2), coord(2) * coord(2) + coord(1) * 2.0)),
        "A5": (
            {"111": 1.0, "122": 1.0, "221": -1.0},
            (ONE, expf(1, 1.0) * cosf(2, 1.0), expf(1, 1.0) * sinf(2, 1.0)),
        ),
    }
    out = []
    for label, (sym, basis) in tables.items():
        cite = f"flat full-plane normal form {label}: eigenvalue-independent 3-dim eigenspace"
        out.append(
            RegistryEntry(
                label=label,
                model=type_a_model(sym, name=label),
                expected=(
                    Expected(mu=-1.0, basis=basis, cite=cite),
                    Expected(mu=0.7, basis=basis, cite=cite),
                ),
                killing_dim=6,
                classify_family=f"flat-{label}",
            )
        )
    return out


def _flat_type_b() -> list[RegistryEntry]:
    """Flat half-plane models (1/x1-coefficient tables with zero curvature)."""
    x2 = coord(2)
    tables = {
        "B0": ({}, {}, (ONE, coord(1), x2)),
        "B1": ({"111": 1.0, "122": 2.0}, {"c": 2.0}, (ONE, power(1, 2.0), power(1, 2.0) * x2)),
        "B2": ({"111": 1.0, "221": 1.0}, {}, (ONE, x2, power(1, 2.0) + x2 * x2)),
        "B3": ({"111": 0.5}, {"c": 0.5}, (ONE, power(1, 1.5), x2)),
        "B4": ({"112": 1.0}, {}, (ONE, coord(1), coord(1) * logf(1) + x2)),
        "B5": ({"111": 1.0, "221": -1.0}, {}, (ONE, x2, power(1, 2.0) - x2 * x2)),
        "B6": (
            {"111": -2.0, "112": 1.0, "122": -1.0},
            {},
            (ONE, power(1, -1.0), logf(1) + power(1, -1.0) * x2),
        ),
    }
    out = []
    for label, (sym, params, basis) in tables.items():
        cite = f"flat half-plane normal form {label}: eigenvalue-independent 3-dim eigenspace"
        out.append(
            RegistryEntry(
                label=label,
                model=type_b_model(sym, name=label, params=params),
                expected=(Expected(mu=-1.0, basis=basis, cite=cite),),
                killing_dim=6,
                classify_family=f"flat-{label}",
            )
        )
    return out


def _m_families() -> list[RegistryEntry]:
    """Full-plane models with rank-one Ricci tensor (4-dim Killing algebra)."""
    out = []

    # M1: Gamma_11^1=-1, Gamma_12^1=1, Gamma_22^2=2, rho_22=1
    out.append(
        RegistryEntry(
            label="M1",
            model=type_a_model({"111": -1.0, "121": 1.0, "222": 2.0}, name="M1"),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(_exp2(-1.0, 1.0), expf(2, 1.0), coord(2) * expf(2, 1.0)),
                    cite="rank-1 family M1 at the projective eigenvalue",
                ),
                Expected(
                    mu=3.0,
                    basis=(expf(2, 3.0), expf(2, -1.0)),
                    cite="rank-1 family M1 at a generic eigenvalue (exponents 1 +/- sqrt(1+mu))",
                ),
            ),
            killing_dim=4,
            classify_family="M1",
            isomorphic_to=("M4:c=1", "Z3:k=1"),
            extension=(ExtensionCase(mu=3.0, f=expf(2, 3.0)),),
        )
    )

    # M2^c: Gamma_11^1=-1, Gamma_12^1=c, Gamma_22^2=1+2c, rho_22=c(1+c)
    for c in (1.0, 2.0):
        mu0 = -((1.0 + 2.0 * c) ** 2) / (4.0 * c * (1.0 + c))
        half = c + 0.5
        out.append(
            RegistryEntry(
                label=f"M2:c={c:g}",
                model=type_a_model(
                    {"111": -1.0, "121": c, "222": 1.0 + 2.0 * c}, name=f"M2:c={c:g}", params={"c": c}
                ),
                expected=(
                    Expected(
                        mu=-1.0,
                        basis=(expf(2, c), expf(2, 1.0 + c), _exp2(-1.0, c)),
                        cite="rank-1 family M2 at the projective eigenvalue",
                    ),
                    Expected(
                        mu=mu0,
                        basis=(expf(2, half), coord(2) * expf(2, half)),
                        cite="rank-1 family M2 at the critical double-root eigenvalue",
                    ),
                ),
                killing_dim=4,
                classify_family="M2",
                isomorphic_to=("M3:c=1",) if c == 1.0 else (),
            )
        )

    # M3^c: Gamma_12^1=c, Gamma_22^2=1+2c
    c = 1.0
    out.append(
        RegistryEntry(
            label="M3:c=1",
            model=type_a_model({"121": c, "222": 1.0 + 2.0 * c}, name="M3:c=1", params={"c": c}),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(expf(2, c), coord(1) * expf(2, c), expf(2, 1.0 + c)),
                    cite="rank-1 family M3 at the projective eigenvalue "
                    "(companion solution is x1 times the exponential)",
                ),
                Expected(
                    mu=-9.0 / 8.0,
                    basis=(expf(2, 1.5), coord(2) * expf(2, 1.5)),
                    cite="rank-1 family M3 at the critical double-root eigenvalue",
                ),
            ),
            killing_dim=4,
            classify_family="M3",
            isomorphic_to=("M2:c=1",),
        )
    )

    # M4^c: Gamma_12^1=1, Gamma_22^1=c, Gamma_22^2=2, rho_22=1
    out.append(
        RegistryEntry(
            label="M4:c=1",
            model=type_a_model({"121": 1.0, "221": 1.0, "222": 2.0}, name="M4:c=1", params={"c": 1.0}),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        expf(2, 1.0),
                        coord(2) * expf(2, 1.0),
                        (coord(1) * 2.0 + coord(2) * coord(2)) * expf(2, 1.0),
                    ),
                    cite="rank-1 family M4 at the projective eigenvalue",
                ),
                Expected(
                    mu=3.0,
                    basis=(expf(2, 3.0), expf(2, -1.0)),
                    cite="rank-1 family M4 at a generic eigenvalue",
                ),
            ),
            killing_dim=4,
            classify_family="M4",
            isomorphic_to=("M1",),
        )
    )

    # M5^c: Gamma_11^1=-1, Gamma_12^1=c, Gamma_22^1=-1, Gamma_22^2=2c, rho_22=1+c^2
    c = 1.0
    out.append(
        RegistryEntry(
            label="M5:c=1",
            model=type_a_model(
                {"111": -1.0, "121": c, "221": -1.0, "222": 2.0 * c}, name="M5:c=1", params={"c": c}
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        _exp2(-1.0, c),
                        expf(2, c) * cosf(2, 1.0),
                        expf(2, c) * sinf(2, 1.0),
                    ),
                    cite="rank-1 family M5 at the projective eigenvalue (complex exponent pair)",
                ),
                Expected(
                    mu=-c * c / (1.0 + c * c),
                    basis=(expf(2, c), coord(2) * expf(2, c)),
                    cite="rank-1 family M5 at the critical double-root eigenvalue",
                ),
            ),
            killing_dim=4,
            classify_family="M5",
        )
    )
    return out


def _z_families() -> list[RegistryEntry]:
    """Half-plane models with rank-one Ricci tensor (4-dim Killing algebra)."""
    out = []
    x2 = coord(2)

    # Z1^kappa: C_11^1=2k, C_11^2=1, C_12^2=k; scaled rho_11 = k(1+k)
    k = 1.0 / 3.0
    r11 = k * (1.0 + k)
    mu_gen = 1.0
    s = math.sqrt(0.25 + r11 * (1.0 + mu_gen))
    out.append(
        RegistryEntry(
            label="Z1:k=1/3",
            model=type_b_model({"111": 2.0 * k, "112": 1.0, "122": k}, name="Z1:k=1/3", params={"kappa": k}),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(power(1, k), power(1, k + 1.0), power(1, k) * x2 + power(1, k + 1.0) * logf(1)),
                    cite="half-plane rank-1 family Z1 at the projective eigenvalue",
                ),
                Expected(
                    mu=mu_gen,
                    basis=(power(1, 0.5 + k + s), power(1, 0.5 + k - s)),
                    cite="half-plane rank-1 family Z1 at a generic eigenvalue (indicial exponents)",
                ),
                Expected(
                    mu=-(1.0 + 4.0 * r11) / (4.0 * r11),
                    basis=(power(1, k + 0.5), power(1, k + 0.5) * logf(1)),
                    cite="half-plane rank-1 family Z1 at the critical eigenvalue (log companion)",
                ),
            ),
            killing_dim=4,
            classify_family="Z1",
            isomorphic_to=("M2:c=1",),
            invariants={"rho_tilde_11": r11},
        )
    )

    # Z2^{kappa,theta}: C_11^1=2k+t-1, C_12^2=k; scaled rho_11 = k(k+t)
    k, t = 0.5, 2.0
    r11 = k * (k + t)
    out.append(
        RegistryEntry(
            label="Z2:k=1/2,t=2",
            model=type_b_model(
                {"111": 2.0 * k + t - 1.0, "122": k}, name="Z2:k=1/2,t=2", params={"kappa": k, "theta": t}
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(power(1, k), power(1, k) * x2, power(1, k + t)),
                    cite="half-plane rank-1 family Z2 at the projective eigenvalue",
                ),
                Expected(
                    mu=-((2.0 * k + t) ** 2) / (4.0 * r11),
                    basis=(power(1, k + 0.5 * t), power(1, k + 0.5 * t) * logf(1)),
                    cite="half-plane rank-1 family Z2 at the critical eigenvalue (log companion)",
                ),
            ),
            killing_dim=4,
            classify_family="Z2",
            invariants={"rho_tilde_11": r11},
        )
    )

    # Z3^kappa: C_11^1=2k-1, C_12^2=k; scaled rho_11 = k^2
    k = 1.0
    mu_gen = 0.5
    s = math.sqrt(k * k * (1.0 + mu_gen))
    out.append(
        RegistryEntry(
            label="Z3:k=1",
            model=type_b_model({"111": 2.0 * k - 1.0, "122": k}, name="Z3:k=1", params={"kappa": k}),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(power(1, k), power(1, k) * x2, power(1, k) * logf(1)),
                    cite="half-plane rank-1 family Z3 at the projective eigenvalue",
                ),
                Expected(
                    mu=mu_gen,
                    basis=(power(1, k + s), power(1, k - s)),
                    cite="half-plane rank-1 family Z3 at a generic eigenvalue",
                ),
            ),
            killing_dim=4,
            classify_family="Z3",
            isomorphic_to=("M1",),
            invariants={"rho_tilde_11": k * k},
        )
    )
    return out


def _n_families() -> list[RegistryEntry]:
    """Half-plane models with a 3-dimensional Killing algebra."""
    out = []
    x2 = coord(2)
    for tag, s in (("+", -0.5), ("-", 0.5)):
        out.append(
            RegistryEntry(
                label=f"N1{tag}",
                model=type_b_model(
                    {"111": -1.5, "122": -0.5, "221": s}, name=f"N1{tag}"
                ),
                expected=(
                    Expected(
                        mu=-0.25,
                        basis=(power(1, -0.5), power(1, -0.5) * x2),
                        cite="3-symmetry half-plane model N1 at mu=-1/4 (exponent -1/2)",
                    ),
                    Expected(mu=0.0, basis=(ONE,), cite="constants at mu=0"),
                ),
                killing_dim=3,
                classify_family=f"N1{tag}",
            )
        )
    out.append(
        RegistryEntry(
            label="N2:c=1",
            model=type_b_model(
                {"111": -1.5, "121": 1.0, "122": -0.5, "221": 1.0, "222": 2.0},
                name="N2:c=1",
                params={"c": 1.0},
            ),
            expected=(Expected(mu=0.0, basis=(ONE,), cite="constants at mu=0"),),
            killing_dim=3,
            classify_family="N2",
        )
    )
    # The Lorentzian constant-curvature half-plane (C_22^1=-1) carries the
    # difference of squares; the Riemannian one (C_22^1=+1) the sum.
    out.append(
        RegistryEntry(
            label="N3",
            model=type_b_model({"111": -1.0, "122": -1.0, "221": -1.0}, name="N3"),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        power(1, -1.0),
                        power(1, -1.0) * x2,
                        power(1, -1.0) * (x2 * x2) - coord(1),
                    ),
                    cite="Lorentzian constant-curvature half-plane at the projective eigenvalue",
                ),
            ),
            killing_dim=3,
            classify_family="N3",
            isomorphic_to=("H2-",),
        )
    )
    out.append(
        RegistryEntry(
            label="N4",
            model=type_b_model({"111": -1.0, "122": -1.0, "221": 1.0}, name="N4"),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        power(1, -1.0),
                        power(1, -1.0) * x2,
                        power(1, -1.0) * (x2 * x2) + coord(1),
                    ),
                    cite="Riemannian constant-curvature half-plane at the projective eigenvalue",
                ),
            ),
            killing_dim=3,
            classify_family="N4",
            isomorphic_to=("H2+",),
            extension=(ExtensionCase(mu=-1.0, f=power(1, -1.0)),),
        )
    )
    return out


def _warped_models() -> list[RegistryEntry]:
    """Warped-product constant-curvature charts (sphere and hyperbolic)."""
    out = []
    x2 = coord(2)
    out.append(
        RegistryEntry(
            label="S2",
            model=sphere_model(),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(sinf(1, 1.0), cosf(1, 1.0) * cosf(2, 1.0), cosf(1, 1.0) * sinf(2, 1.0)),
                    cite="round-sphere chart: first spherical harmonics at the projective eigenvalue",
                ),
                Expected(mu=0.0, basis=(ONE,), cite="constants at mu=0"),
            ),
            killing_dim=3,
            classify_family="S2",
        )
    )
    for sign, tag in ((1, "+"), (-1, "-")):
        out.append(
            RegistryEntry(
                label=f"H2{tag}",
                model=hyperbolic_model(sign),
                expected=(
                    Expected(
                        mu=-1.0,
                        basis=(
                            expf(1, 1.0),
                            x2 * expf(1, 1.0),
                            expf(1, -1.0) + (x2 * x2 * expf(1, 1.0)) * float(sign),
                        ),
                        cite="warped hyperbolic chart at the projective eigenvalue",
                    ),
                    Expected(mu=0.0, basis=(ONE,), cite="constants at mu=0"),
                ),
                killing_dim=3,
                classify_family=f"H2{tag}",
                isomorphic_to=("N4",) if sign > 0 else ("N3",),
            )
        )
    return out


def _skew_ricci_models() -> list[RegistryEntry]:
    """Half-plane models whose symmetrized Ricci tensor vanishes: the
    equation degenerates and only constants solve it, at every eigenvalue."""
    out = []
    out.append(
        RegistryEntry(
            label="Q:c=1",
            model=type_b_model({"112": 1.0, "121": 1.0, "222": 1.0}, name="Q:c=1", params={"c": 1.0}),
            expected=(
                Expected(mu=0.0, basis=(ONE,), cite="skew-Ricci family Q: constants only"),
            ),
            killing_dim=2,
            classify_family="Q",
        )
    )
    for s, tag in ((1.0, "+"), (-1.0, "-")):
        c = 1.0
        out.append(
            RegistryEntry(
                label=f"P0{tag}:c=1",
                model=type_b_model(
                    {
                        "111": 1.0 - s * c * c,
                        "112": c,
                        "122": -s * c * c,
                        "221": s,
                        "222": 2.0 * s * c,
                    },
                    name=f"P0{tag}:c=1",
                    params={"c": c},
                ),
                expected=(
                    Expected(mu=0.0, basis=(ONE,), cite="skew-Ricci family P0: constants only"),
                ),
                killing_dim=2,
                classify_family=f"P0{tag}",
            )
        )
    # the exceptional parameter where the symmetry algebra jumps to
    # dimension 3 (the model is linearly isomorphic to N2 at c=1/2)
    c = 3.0 / math.sqrt(2.0)
    out.append(
        RegistryEntry(
            label="P0+:c=3/sqrt2",
            model=type_b_model(
                {
                    "111": 1.0 - c * c,
                    "112": c,
                    "122": -c * c,
                    "221": 1.0,
                    "222": 2.0 * c,
                },
                name="P0+:c=3/sqrt2",
                params={"c": c},
            ),
            expected=(
                Expected(mu=0.0, basis=(ONE,), cite="skew-Ricci family P0 at its symmetric parameter"),
            ),
            killing_dim=3,
            classify_family=None,
            isomorphic_to=("N2:c=1",),
            notes="exceptional parameter: the Killing algebra jumps to dimension 3",
        )
    )
    return out


def _projectively_flat_half_plane() -> list[RegistryEntry]:
    """Strongly projectively flat half-plane models with 2-dim symmetry."""
    out = []
    x2 = coord(2)
    c = 0.5
    for s, tag in ((1.0, "+"), (-1.0, "-")):
        quad = power(1, c + 2.0) + (power(1, c) * (x2 * x2)) * s
        out.append(
            RegistryEntry(
                label=f"Bspf{tag}:c=1/2",
                model=type_b_model(
                    {"111": 1.0 + 2.0 * c, "122": c, "221": s}, name=f"Bspf{tag}:c=1/2", params={"c": c}
                ),
                expected=(
                    Expected(
                        mu=-1.0,
                        basis=(power(1, c), power(1, c) * x2, quad),
                        cite="projectively flat half-plane family at the projective eigenvalue",
                    ),
                    Expected(mu=0.0, basis=(ONE,), cite="constants at mu=0"),
                ),
                killing_dim=2,
                classify_family=f"B-spf{tag}",
            )
        )
    return out


def _one_dim_eigenspace_models() -> list[RegistryEntry]:
    """Non-projectively-flat half-plane models whose projective eigenspace
    is one-dimensional."""
    out = []
    # branch with C_22^1 = 0 and C_22^2 = C_12^1 != 0: the single solution
    # is the pure power with exponent C_12^2
    out.append(
        RegistryEntry(
            label="Bdim1:line",
            model=type_b_model(
                {"111": 0.4, "112": 0.3, "121": 1.0, "122": 0.7, "222": 1.0},
                name="Bdim1:line",
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(power(1, 0.7),),
                    cite="1-dim projective eigenspace, translation-coefficient branch",
                ),
            ),
            killing_dim=2,
            classify_family="B-dim1-power",
        )
    )
    # normalized branch with C_22^1 = 1: exponent (C_11^2)^2 + C_12^2
    out.append(
        RegistryEntry(
            label="Bdim1:normal+",
            model=type_b_model(
                {"111": 1.75, "112": 0.5, "122": 0.25, "221": 1.0, "222": 1.0},
                name="Bdim1:normal+",
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(power(1, 0.5),),
                    cite="1-dim projective eigenspace, normalized branch",
                ),
            ),
            killing_dim=2,
            classify_family="B-dim1-normal+",
        )
    )
    return out


def _nonprojective_eigenvalue_models() -> list[RegistryEntry]:
    """Half-plane models carrying 2-dim eigenspaces away from mu in {-1, 0}."""
    out = []
    x2 = coord(2)
    # two-dimensional eigenspace at the critical eigenvalue of the
    # normal-form family (upper sign, parameter c)
    c = 0.5
    mu = -(8.0 * c * c + 3.0) / (8.0 * c * c + 4.0)
    alpha = -4.0 * c * c - 1.5
    out.append(
        RegistryEntry(
            label="Bcrit+:c=1/2",
            model=type_b_model(
                {
                    "111": -8.0 * c * c - 2.5,
                    "112": c,
                    "122": 0.5 * (-8.0 * c * c - 3.0),
                    "221": 1.0,
                    "222": 2.0 * c,
                },
                name="Bcrit+:c=1/2",
                params={"c": c},
            ),
            expected=(
                Expected(
                    mu=mu,
                    basis=(power(1, alpha), power(1, alpha) * (x2 - coord(1) * (2.0 * c))),
                    cite="2-dim eigenspace at the non-projective critical eigenvalue",
                ),
            ),
            killing_dim=2,
            classify_family="B-critical+",
            invariants={
                "rho_tilde": [
                    [8.0 * (2.0 * c ** 4 + c * c), c],
                    [-c, -4.0 * c * c - 2.0],
                ]
            },
        )
    )
    # power-pair family: mu = (c+1)/2, basis (x1)^{1+c} {1, x2}
    c = 1.0
    out.append(
        RegistryEntry(
            label="Bpair+:c=1",
            model=type_b_model(
                {"111": c, "122": c + 1.0, "221": 1.0}, name="Bpair+:c=1", params={"c": c}
            ),
            expected=(
                Expected(
                    mu=0.5 * (c + 1.0),
                    basis=(power(1, 1.0 + c), power(1, 1.0 + c) * x2),
                    cite="power-pair family at its positive eigenvalue",
                ),
            ),
            killing_dim=2,
            classify_family="B-pair+",
        )
    )
    # exceptional parameter c=-3/2: mu=-1/4 and the symmetry algebra jumps
    # to dimension 3 (the model lands on the N1 normal form)
    c = -1.5
    out.append(
        RegistryEntry(
            label="Bpair+:c=-3/2",
            model=type_b_model(
                {"111": c, "122": c + 1.0, "221": 1.0}, name="Bpair+:c=-3/2", params={"c": c}
            ),
            expected=(
                Expected(
                    mu=-0.25,
                    basis=(power(1, -0.5), power(1, -0.5) * x2),
                    cite="power-pair family at its exceptional symmetric parameter",
                ),
            ),
            killing_dim=3,
            classify_family="N1-",
            isomorphic_to=("N1-",),
            notes="exceptional parameter: the Killing algebra jumps to dimension 3",
        )
    )
    return out


def _rank_two_models() -> list[RegistryEntry]:
    """Full-plane models with rank-two Ricci tensor (2-dim Killing algebra),
    labelled by the complete invariants (psi, Psi)."""
    out = []
    x1, x2 = coord(1), coord(2)
    rt3 = math.sqrt(3.0)

    # line-of-invariants representative (parameter c=2): psi = 7 - 1/c
    c = 2.0
    out.append(
        RegistryEntry(
            label="L1:c=2",
            model=type_a_model(
                {"111": 1.0 - c, "112": -c, "121": c, "122": c, "221": 1.0 - c, "222": 2.0 - c},
                name="L1:c=2",
                params={"c": c},
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        expf(1, 1.0),
                        expf(2, 1.0),
                        expf(2, 1.0) * (x1 + x2 * (-1.0 + 1.0 / c)),
                    ),
                    cite="rank-2 invariant-line representative: exponential with linear companion",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"psi": 7.0 - 1.0 / c, "Psi": 10.0 - 4.0 / c, "on_line_L": True},
        )
    )
    # positive-definite anchor (psi, Psi) = (7, 10)
    out.append(
        RegistryEntry(
            label="L2",
            model=type_a_model({"111": 2.0, "122": 1.0, "221": 1.0}, name="L2"),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        expf(1, 1.0),
                        expf(1, 1.0) * x2,
                        expf(1, 1.0) * (x1 * 2.0 + x2 * x2),
                    ),
                    cite="rank-2 positive-definite anchor: exponential times quadratic",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"psi": 7.0, "Psi": 10.0, "on_line_L": True},
        )
    )
    # indefinite anchor (psi, Psi) = (7, 10)
    diff = x1 - x2
    out.append(
        RegistryEntry(
            label="L3",
            model=type_a_model(
                {"111": -3.0, "112": 1.0, "121": -3.0, "122": -3.0, "221": 1.0, "222": -3.0},
                name="L3",
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(
                        _exp2(-2.0, -2.0),
                        _exp2(-2.0, -2.0) * diff,
                        _exp2(-2.0, -2.0) * (x1 * 2.0 + diff * diff),
                    ),
                    cite="rank-2 indefinite anchor: exponential times quadratic",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"psi": 7.0, "Psi": 10.0, "on_line_L": True},
        )
    )

    # positive-definite parametrization off the line: u=2, v=0
    u = 2.0
    out.append(
        RegistryEntry(
            label="A02:u=2,v=0",
            model=type_a_model(
                {"111": u + 1.0 / u, "122": u, "221": u}, name="A02:u=2,v=0", params={"u": u, "v": 0.0}
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(expf(1, 0.5), _exp2(2.0, rt3), _exp2(2.0, -rt3)),
                    cite="positive-definite rank-2 parametrization: three distinct exponentials",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"on_line_L": False},
        )
    )
    # negative-definite parametrization: u=1, v=1
    out.append(
        RegistryEntry(
            label="A20:u=1,v=1",
            model=type_a_model(
                {"122": 1.0, "221": 1.0, "222": 1.0}, name="A20:u=1,v=1", params={"u": 1.0, "v": 1.0}
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(expf(1, -1.0), _exp2(1.0, 2.0), _exp2(1.0, -1.0)),
                    cite="negative-definite rank-2 parametrization: three distinct exponentials",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"on_line_L": False},
        )
    )
    # indefinite vertical-ray parametrization: u=1, w=2 (psi=6, Psi=5-4w)
    w = 2.0
    out.append(
        RegistryEntry(
            label="A11:u=1,w=2",
            model=type_a_model(
                {"111": 1.0, "121": 1.0, "122": 1.0, "221": w, "222": 1.0},
                name="A11:u=1,w=2",
                params={"u": 1.0, "w": w},
            ),
            expected=(
                Expected(
                    mu=-1.0,
                    basis=(expf(2, 1.0), _exp2(1.0, 2.0), _exp2(1.0, -1.0)),
                    cite="indefinite rank-2 vertical-ray parametrization: three distinct exponentials",
                ),
            ),
            killing_dim=2,
            classify_family="A-rank2",
            invariants={"psi": 6.0, "Psi": 5.0 - 4.0 * w, "on_line_L": False},
        )
    )
    return out


def _kahler_soliton_family() -> list[RegistryEntry]:
    """Half-plane family whose cotangent-bundle extension carries a parallel
    complex structure; (x1)^{1+2c} solves the base equation at mu = 1+2c."""
    c = 1.0
    f = power(1, 1.0 + 2.0 * c)
    return [
        RegistryEntry(
            label="KS:c=1",
            model=type_b_model({"111": c, "122": c, "221": -c}, name="KS:c=1", params={"c": c}),
            expected=(
                Expected(
                    mu=1.0 + 2.0 * c,
                    basis=(f,),
                    cite="parallel-complex-structure family: pure-power solution",
                    complete=False,
                ),
            ),
            killing_dim=2,
            classify_family=None,
            extension=(ExtensionCase(mu=1.0 + 2.0 * c, f=f, walker=True),),
        )
    ]


def _build() -> tuple:
    out = []
    out += _flat_type_a()
    out += _flat_type_b()
    out += _m_families()
    out += _z_families()
    out += _n_families()
    out += _warped_models()
    out += _skew_ricci_models()
    out += _projectively_flat_half_plane()
    out += _one_dim_eigenspace_models()
    out += _nonprojective_eigenvalue_models()
    out += _rank_two_models()
    out += _kahler_soliton_family()
    seen = set()
    for e in out:
        if e.label in seen:
            raise RegistryIntegrityError(f"duplicate registry label {e.label!r}")
        seen.add(e.label)
    return tuple(out)


def _self_check(entry: RegistryEntry) -> None:
    for exp in entry.expected:
        for f in exp.basis:
            r = surface.qe_residual(entry.model, exp.mu, f)
            if not r < _RESIDUAL_GATE:
                raise RegistryIntegrityError(
                    f"{entry.label}: basis element {f} fails the operator at "
                    f"mu={exp.mu:.12g} (residual {r:.3e}) [{exp.cite}]"
                )
        rank = terms.robust_rank(list(exp.basis), entry.model.domain)
        if rank != len(exp.basis):
            raise RegistryIntegrityError(
                f"{entry.label}: stated basis at mu={exp.mu:.12g} has numeric rank "
                f"{rank} != {len(exp.basis)} [{exp.cite}]"
            )


@lru_cache(maxsize=1)
def entries() -> tuple:
    """All registry entries, verified against the operator on first access."""
    out = _build()
    for e in out:
        _self_check(e)
    return out


def labels() -> list[str]:
    return [e.label for e in entries()]


def get(label: str) -> RegistryEntry:
    for e in entries():
        if e.label == label:
            return e
    hint = difflib.get_close_matches(label, labels(), n=3, cutoff=0.4)
    msg = f"unknown registry label {label!r}"
    if hint:
        msg += "; did you mean: " + ", ".join(hint)
    raise ParseError(msg)


def triples() -> list[tuple[str, float, tuple]]:
    """All (label, mu, basis) triples in the registry."""
    return [(e.label, exp.mu, exp.basis) for e in entries() for exp in e.expected]


# parametrized family constructors, for building a family member at a
# parameter value that differs from the curated registry entries
_FAMILIES = {
    "M2": (("c",), lambda c: type_a_model(
        {"111": -1.0, "121": c, "222": 1.0 + 2.0 * c}, name=f"M2:c={c:g}", params={"c": c})),
    "M3": (("c",), lambda c: type_a_model(
        {"121": c, "222": 1.0 + 2.0 * c}, name=f"M3:c={c:g}", params={"c": c})),
    "M4": (("c",), lambda c: type_a_model(
        {"121": 1.0, "221": c, "222": 2.0}, name=f"M4:c={c:g}", params={"c": c})),
    "M5": (("c",), lambda c: type_a_model(
        {"111": -1.0, "121": c, "221": -1.0, "222": 2.0 * c}, name=f"M5:c={c:g}", params={"c": c})),
    "Z1": (("kappa",), lambda k: type_b_model(
        {"111": 2.0 * k, "112": 1.0, "122": k}, name=f"Z1:k={k:g}", params={"kappa": k})),
    "Z2": (("kappa", "theta"), lambda k, t: type_b_model(
        {"111": 2.0 * k + t - 1.0, "122": k}, name=f"Z2:k={k:g},t={t:g}",
        params={"kappa": k, "theta": t})),
    "Z3": (("kappa",), lambda k: type_b_model(
        {"111": 2.0 * k - 1.0, "122": k}, name=f"Z3:k={k:g}", params={"kappa": k})),
    "N2": (("c",), lambda c: type_b_model(
        {"111": -1.5, "121": 1.0, "122": -0.5, "221": c, "222": 2.0},
        name=f"N2:c={c:g}", params={"c": c})),
    "Q": (("c",), lambda c: type_b_model(
        {"112": c, "121": 1.0, "222": 1.0}, name=f"Q:c={c:g}", params={"c": c})),
    "P0+": (("c",), lambda c: type_b_model(
        {"111": 1.0 - c * c, "112": c, "122": -c * c, "221": 1.0, "222": 2.0 * c},
        name=f"P0+:c={c:g}", params={"c": c})),
    "P0-": (("c",), lambda c: type_b_model(
        {"111": 1.0 + c * c, "112": c, "122": c * c, "221": -1.0, "222": -2.0 * c},
        name=f"P0-:c={c:g}", params={"c": c})),
    "Bspf+": (("c",), lambda c: type_b_model(
        {"111": 1.0 + 2.0 * c, "122": c, "221": 1.0}, name=f"Bspf+:c={c:g}", params={"c": c})),
    "Bspf-": (("c",), lambda c: type_b_model(
        {"111": 1.0 + 2.0 * c, "122": c, "221": -1.0}, name=f"Bspf-:c={c:g}", params={"c": c})),
    "Bpair+": (("c",), lambda c: type_b_model(
        {"111": c, "122": c + 1.0, "221": 1.0}, name=f"Bpair+:c={c:g}", params={"c": c})),
    "Bcrit+": (("c",), lambda c: type_b_model(
        {"111": -8.0 * c * c - 2.5, "112": c, "122": 0.5 * (-8.0 * c * c - 3.0),
         "221": 1.0, "222": 2.0 * c}, name=f"Bcrit+:c={c:g}", params={"c": c})),
    "KS": (("c",), lambda c: type_b_model(
        {"111": c, "122": c, "221": -c}, name=f"KS:c={c:g}", params={"c": c})),
    "B1": (("c",), lambda c: type_b_model(
        {"111": c - 1.0, "122": c}, name=f"B1:c={c:g}", params={"c": c})),
    "B3": (("c",), lambda c: type_b_model(
        {"111": c}, name=f"B3:c={c:g}", params={"c": c})),
}


def family_names() -> list[str]:
    return sorted(_FAMILIES)


def family_model(family: str, **params) -> SurfaceModel:
    """Build a member of a parametrized family at explicit parameter values."""
    if family not in _FAMILIES:
        hint = difflib.get_close_matches(family, list(_FAMILIES), n=3, cutoff=0.4)
        msg = f"unknown parametrized family {family!r}"
        if hint:
            msg += "; did you mean: " + ", ".join(hint)
        raise ParseError(msg)
    wanted, build = _FAMILIES[family]
    missing = [w for w in wanted if w not in params]
    extra = [k for k in params if k not in wanted]
    if missing or extra:
        raise ParseError(
            f"family {family} takes parameters {', '.join(wanted)}"
            + (f"; missing {', '.join(missing)}" if missing else "")
            + (f"; unexpected {', '.join(extra)}" if extra else "")
        )
    return build(*(float(params[w]) for w in wanted))


def load_model(spec: str) -> SurfaceModel:
    """Resolve a model from a registry label, a JSON string, or a JSON file."""
    if not isinstance(spec, str):
        raise ParseError("model spec must be a string")
    text = spec.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid model JSON: {exc}") from exc
        return model_from_dict(data)
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid model JSON in {text}: {exc}") from exc
        return model_from_dict(data)
    return get(text).model
