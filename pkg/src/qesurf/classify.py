"""Classification of homogeneous affine surface charts into catalogued families.

The decision tree keys on the coarse invariants (flatness, Killing-algebra
dimension, Ricci rank/signature) and then matches the normalized coefficient
table against the catalogued normal forms.  Scalar invariants:

* rho_tilde_ij = Gamma_ik^l Gamma_jl^k, psi = rho^{ij} rho_tilde_ij and
  Psi = det(rho_tilde)/det(rho) label rank-2 constant-coefficient models up to
  linear equivalence; the locus L is the line through (7, 10) with slope 4.
* alpha_X = (nabla rho)(X,X;X)^2 / rho(X,X)^3 and eps_X = sign rho(X,X) label
  the rank-1 models; X is the coordinate direction with the largest |rho(X,X)|.

Half-plane models are first normalized by a shear x2 -> a*x1 + x2 that removes
C_12^1 and a rescale that brings C_22^1 to 0 or +/-1; the transform is recorded
so solution bases can be pulled back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import killing, surface
from .errors import PreconditionError
from .surface import SurfaceModel

_TOL = 1e-8


# ---------------------------------------------------------------------------
# Invariants


@dataclass(frozen=True)
class InvariantSignature:
    ricci_rank: int
    ricci_signature: str  # positive | negative | indefinite | rank1 | zero
    flat: bool
    spf: bool
    killing_dim: int
    psi: float | None = None
    Psi: float | None = None
    alpha_X: float | None = None
    eps_X: int | None = None


def _base_point(model: SurfaceModel):
    return (0.0, 0.0) if model.family == surface.TYPE_A else (1.0, 0.0)


def rho_tilde(model: SurfaceModel, p=None) -> np.ndarray:
    """rho_tilde_ij = Gamma_ik^l Gamma_jl^k."""
    g = model.christoffel(p if p is not None else _base_point(model))
    rt = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            rt[i, j] = sum(g[i, k, l] * g[j, l, k] for k in range(2) for l in range(2))
    return rt


def _ricci_signature(rho_s: np.ndarray) -> tuple[int, str]:
    ev = np.linalg.eigvalsh(rho_s)
    scale = max(np.abs(ev).max(), 1.0)
    pos = int(np.sum(ev > 1e-10 * scale))
    neg = int(np.sum(ev < -1e-10 * scale))
    rank = pos + neg
    if rank == 0:
        return 0, "zero"
    if rank == 1:
        return 1, "rank1"
    if pos == 2:
        return 2, "positive"
    if neg == 2:
        return 2, "negative"
    return 2, "indefinite"


def invariants(model: SurfaceModel) -> InvariantSignature:
    p = _base_point(model)
    rho = surface.ricci(model, p)
    rho_s = surface.ricci_symmetric(model, p)
    rank, sig = _ricci_signature(rho_s)
    flat = surface.is_flat(model)
    if flat and np.abs(rho).max() > 1e-10:
        raise PreconditionError("impossible state: flat model with rho != 0")
    spf = surface.is_strongly_projectively_flat(model)
    kd = killing.killing_dimension(model)
    psi = Psi = alpha = None
    eps = None
    if rank == 2 and abs(np.linalg.det(rho)) > 1e-12:
        rt = rho_tilde(model, p)
        psi = float(np.trace(np.linalg.inv(rho) @ rt))
        Psi = float(np.linalg.det(rt) / np.linalg.det(rho))
    elif rank == 1:
        # X = coordinate direction with the largest |rho(X,X)|
        idx = int(np.argmax(np.abs(np.diag(rho_s))))
        rxx = rho_s[idx, idx]
        if abs(rxx) > 1e-12:
            nr = surface.nabla_ricci(model, p)
            alpha = float(nr[idx, idx, idx] ** 2 / rxx ** 3)
            eps = 1 if rxx > 0 else -1
    return InvariantSignature(
        ricci_rank=rank,
        ricci_signature=sig,
        flat=flat,
        spf=spf,
        killing_dim=kd,
        psi=psi,
        Psi=Psi,
        alpha_X=alpha,
        eps_X=eps,
    )


def on_line_L(psi: float, Psi: float, tol: float = 1e-9) -> bool:
    """The line through (7, 10) with slope 4 in the (psi, Psi) plane."""
    return abs(Psi - 10.0 - 4.0 * (psi - 7.0)) < tol


# ---------------------------------------------------------------------------
# Type B normalization


@dataclass(frozen=True)
class NormalizedTypeB:
    model: SurfaceModel
    a: float
    b: float
    note: str = ""


def transform_type_a(model: SurfaceModel, A) -> SurfaceModel:
    """Coefficient table after the linear coordinate change x -> A x."""
    if model.family != surface.TYPE_A:
        raise PreconditionError("transform_type_a needs a constant-coefficient model")
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2) or abs(np.linalg.det(A)) < 1e-12:
        raise PreconditionError("transform_type_a needs an invertible 2x2 matrix")
    Ainv = np.linalg.inv(A)
    C = model.coeff_array()
    Cn = np.einsum("kl,mi,nj,mnl->ijk", A, Ainv, Ainv, C)
    Cn = 0.5 * (Cn + Cn.transpose(1, 0, 2))
    return surface.type_a_model(surface.array_to_symbols(Cn), name=model.name)


def transform_type_b(model: SurfaceModel, a: float, b: float) -> SurfaceModel:
    """Coefficient table after the coordinate change x2 -> a*x1 + b*x2.

    The change is linear so the table transforms as a (1,2)-tensor:
    C'[i,j,k] = A[k,l] Ainv[m,i] Ainv[n,j] C[m,n,l] with A = [[1,0],[a,b]].
    """
    if model.family != surface.TYPE_B:
        raise PreconditionError("transform_type_b needs a half-plane model")
    if b == 0.0:
        raise PreconditionError("transform_type_b needs b != 0")
    A = np.array([[1.0, 0.0], [a, b]])
    Ainv = np.linalg.inv(A)
    C = model.coeff_array()
    Cn = np.einsum("kl,mi,nj,mnl->ijk", A, Ainv, Ainv, C)
    Cn = 0.5 * (Cn + Cn.transpose(1, 0, 2))
    return surface.type_b_model(surface.array_to_symbols(Cn), name=model.name)


def normalize_type_b(model: SurfaceModel) -> NormalizedTypeB:
    """Shear away C_12^1 and rescale so C_22^1 in {0, +1, -1}."""
    if model.family != surface.TYPE_B:
        raise PreconditionError("normalize_type_b needs a half-plane model")
    C = model.coeff_array()
    c221 = C[1, 1, 0]
    c121 = C[0, 1, 0]
    if abs(c221) < _TOL:
        return NormalizedTypeB(model=model, a=0.0, b=1.0, note="shear target absent")
    b = math.sqrt(abs(c221))
    a = b * c121 / c221
    out = transform_type_b(model, a, b)
    return NormalizedTypeB(model=out, a=a, b=b)


# ---------------------------------------------------------------------------
# Pattern matching


@dataclass(frozen=True)
class ModelLabel:
    family: str
    parameters: dict = field(default_factory=dict)
    signature: InvariantSignature | None = None
    notes: tuple[str, ...] = ()


def _match(C: np.ndarray, pattern: dict[str, float], tol: float = _TOL) -> bool:
    """pattern maps 'ijk' keys to values; unmentioned entries must vanish."""
    want = np.zeros((2, 2, 2))
    for key, val in pattern.items():
        i, j, k = (int(c) - 1 for c in key)
        want[i, j, k] = val
        want[j, i, k] = val
    return bool(np.abs(C - want).max() < tol)


def _flat_type_a_label(C: np.ndarray) -> ModelLabel | None:
    table = [
        ("flat-A0", {}),
        ("flat-A1", {"111": 1.0, "122": 1.0}),
        ("flat-A2", {"111": -1.0, "222": 1.0}),
        ("flat-A3", {"222": 1.0}),
        ("flat-A4", {"221": 1.0}),
        ("flat-A5", {"111": 1.0, "122": 1.0, "221": -1.0}),
    ]
    for name, pattern in table:
        if _match(C, pattern):
            return ModelLabel(family=name)
    return None


def _flat_type_b_label(C: np.ndarray) -> ModelLabel | None:
    if _match(C, {}):
        return ModelLabel(family="flat-B0")
    c = C[0, 1, 1]  # C_12^2
    if c != 0.0 and _match(C, {"111": c - 1.0, "122": c}):
        return ModelLabel(family="flat-B1", parameters={"c": float(c)})
    if _match(C, {"111": 1.0, "221": 1.0}):
        return ModelLabel(family="flat-B2")
    c = C[0, 0, 0]
    if c != 0.0 and _match(C, {"111": c}):
        return ModelLabel(family="flat-B3", parameters={"c": float(c)})
    if _match(C, {"112": 1.0}):
        return ModelLabel(family="flat-B4")
    if _match(C, {"111": 1.0, "221": -1.0}):
        return ModelLabel(family="flat-B5")
    if _match(C, {"111": -2.0, "112": 1.0, "122": -1.0}):
        return ModelLabel(family="flat-B6")
    return None


def _type_a_rank1_label(C: np.ndarray, sig: InvariantSignature) -> ModelLabel:
    c = C[0, 1, 0]  # Gamma_12^1
    if _match(C, {"111": -1.0, "121": 1.0, "222": 2.0}):
        return ModelLabel(family="M1", signature=sig)
    if _match(C, {"111": -1.0, "121": c, "222": 1.0 + 2.0 * c}):
        return ModelLabel(family="M2", parameters={"c": float(c)}, signature=sig)
    if _match(C, {"121": c, "222": 1.0 + 2.0 * c}):
        return ModelLabel(family="M3", parameters={"c": float(c)}, signature=sig)
    cq = C[1, 1, 0]
    if _match(C, {"121": 1.0, "221": cq, "222": 2.0}):
        return ModelLabel(family="M4", parameters={"c": float(cq)}, signature=sig)
    if _match(C, {"111": -1.0, "121": c, "221": -1.0, "222": 2.0 * c}):
        return ModelLabel(family="M5", parameters={"c": float(c)}, signature=sig)
    return ModelLabel(
        family="A-rank1",
        parameters={"alpha_X": sig.alpha_X, "eps_X": sig.eps_X},
        signature=sig,
        notes=("rank-1 model outside the listed normal forms; "
               "(alpha_X, eps_X) determine its isomorphism class",),
    )


def _type_a_rank2_label(sig: InvariantSignature) -> ModelLabel:
    psi, Psi = sig.psi, sig.Psi
    if on_line_L(psi, Psi, tol=1e-6):
        if abs(psi - 7.0) < 1e-6 and abs(Psi - 10.0) < 1e-6:
            case = "exponential-times-quadratic"
        else:
            case = "exponential-with-linear-companion"
    else:
        case = "three-distinct-exponentials"
    return ModelLabel(
        family="A-rank2",
        parameters={"psi": psi, "Psi": Psi},
        signature=sig,
        notes=(f"structure of the mu=-1 eigenspace: {case}",),
    )


def _type_b_killing4_label(C: np.ndarray, sig: InvariantSignature) -> ModelLabel | None:
    # also-translation-invariant charts: (C_12^1, C_22^1, C_22^2) = 0
    if max(abs(C[0, 1, 0]), abs(C[1, 1, 0]), abs(C[1, 1, 1])) > _TOL:
        return None
    kappa = C[0, 1, 1]
    if abs(C[0, 0, 1]) > _TOL:
        # rescale x2 by 1/C_11^2: that sends C_11^2 to 1 and, because the
        # remaining lower-triangular components vanish, fixes everything else
        Cn = C.copy()
        Cn[0, 0, 1] = 1.0
        if _match(Cn, {"111": 2.0 * kappa, "112": 1.0, "122": kappa}):
            return ModelLabel(family="Z1", parameters={"kappa": float(kappa)}, signature=sig)
        return None
    theta = C[0, 0, 0] + 1.0 - 2.0 * kappa
    if _match(C, {"111": 2.0 * kappa + theta - 1.0, "122": kappa}):
        if abs(theta) < _TOL:
            return ModelLabel(family="Z3", parameters={"kappa": float(kappa)}, signature=sig)
        return ModelLabel(
            family="Z2", parameters={"kappa": float(kappa), "theta": float(theta)}, signature=sig
        )
    return None


def _type_b_killing3_label(C: np.ndarray, sig: InvariantSignature) -> ModelLabel | None:
    # raw tables and their C_22^1 -> +/-1 rescalings (C_11^1, C_12^2 are
    # invariant under the rescale, so both shapes are listed)
    if _match(C, {"111": -1.5, "122": -0.5, "221": -0.5}) or _match(
        C, {"111": -1.5, "122": -0.5, "221": -1.0}
    ):
        return ModelLabel(family="N1+", signature=sig)
    if _match(C, {"111": -1.5, "122": -0.5, "221": 0.5}) or _match(
        C, {"111": -1.5, "122": -0.5, "221": 1.0}
    ):
        return ModelLabel(family="N1-", signature=sig)
    c = C[1, 1, 0]
    if _match(C, {"111": -1.5, "121": 1.0, "122": -0.5, "221": c, "222": 2.0}):
        return ModelLabel(family="N2", parameters={"c": float(c)}, signature=sig)
    # normalized image of the one-parameter family above: reconstruct the
    # candidate parameter from C_22^2 = 3/sqrt(|c|) and compare tables
    if abs(C[0, 1, 0]) < _TOL and abs(abs(C[1, 1, 0]) - 1.0) < _TOL and abs(C[1, 1, 1]) > _TOL:
        cc = math.copysign(9.0 / C[1, 1, 1] ** 2, C[1, 1, 0])
        ref = surface.type_b_model(
            {"111": -1.5, "121": 1.0, "122": -0.5, "221": cc, "222": 2.0}
        )
        Cref = normalize_type_b(ref).model.coeff_array()
        if np.abs(C - Cref).max() < 1e-6:
            return ModelLabel(family="N2", parameters={"c": float(cc)}, signature=sig)
    if _match(C, {"111": -1.0, "122": -1.0, "221": -1.0}):
        return ModelLabel(family="N3", signature=sig)
    if _match(C, {"111": -1.0, "122": -1.0, "221": 1.0}):
        return ModelLabel(family="N4", signature=sig)
    return None


def _type_b_killing2_label(C: np.ndarray, sig: InvariantSignature) -> ModelLabel | None:
    if sig.ricci_signature == "zero":
        c = C[0, 0, 1]
        if _match(C, {"112": c, "121": 1.0, "222": 1.0}):
            return ModelLabel(family="Q", parameters={"c": float(c)}, signature=sig)
        for s in (1.0, -1.0):
            tag = "+" if s > 0 else "-"
            if c > 0 and _match(
                C,
                {"111": 1.0 - s * c * c, "112": c, "122": -s * c * c,
                 "221": s, "222": 2.0 * s * c},
            ):
                return ModelLabel(family=f"P0{tag}", parameters={"c": float(c)}, signature=sig)
        return None
    # strongly projectively flat half-plane models (c not in {-1, 0})
    c = C[0, 1, 1]
    for s in (1.0, -1.0):
        tag = "+" if s > 0 else "-"
        if _match(C, {"111": 1.0 + 2.0 * c, "122": c, "221": s}):
            return ModelLabel(family=f"B-spf{tag}", parameters={"c": float(c)}, signature=sig)
    # one-dimensional mu=-1 eigenspace, translation-coefficient branch
    if abs(C[1, 1, 0]) < _TOL and abs(C[1, 1, 1]) > _TOL and abs(C[1, 1, 1] - C[0, 1, 0]) < _TOL:
        return ModelLabel(
            family="B-dim1-power",
            parameters={"alpha": float(C[0, 1, 1])},
            signature=sig,
            notes=("mu=-1 eigenspace spanned by a single pure power",),
        )
    for s in (1.0, -1.0):
        tag = "+" if s > 0 else "-"
        u = C[0, 0, 1]
        if (
            abs(C[1, 1, 0] - s) < _TOL
            and abs(C[0, 1, 0]) < _TOL
            and abs(u) > _TOL
            and abs(C[1, 1, 1] - 2.0 * s * u) < _TOL
            and abs(C[0, 0, 0] - (1.0 + 2.0 * C[0, 1, 1] + s * u * u)) < _TOL
        ):
            return ModelLabel(
                family=f"B-dim1-normal{tag}",
                parameters={"alpha": float(u * u + C[0, 1, 1])},
                signature=sig,
                notes=("mu=-1 eigenspace spanned by a single pure power",),
            )
    # critical-eigenvalue two-dimensional families (matched before the
    # soliton family, whose pattern is broader)
    for s in (1.0, -1.0):
        tag = "+" if s > 0 else "-"
        cc = C[0, 0, 1]
        if cc != 0.0 and _match(
            C,
            {"111": -s * 8.0 * cc * cc - 2.5, "112": cc,
             "122": 0.5 * (-s * 8.0 * cc * cc - 3.0), "221": s, "222": 2.0 * cc},
        ):
            return ModelLabel(family=f"B-critical{tag}", parameters={"c": float(cc)}, signature=sig)
        c0 = C[0, 0, 0]
        if _match(C, {"111": c0, "122": c0 + 1.0, "221": s}):
            return ModelLabel(family=f"B-pair{tag}", parameters={"c": float(c0)}, signature=sig)
    # two-parameter soliton family with a != 0
    for s in (1.0, -1.0):
        tag = "+" if s > 0 else "-"
        cc = C[0, 0, 1]
        if abs(C[1, 1, 0] - s) < _TOL and abs(C[1, 1, 1] - 2.0 * s * cc) < _TOL:
            # solve C_12^2 = (a^2 + 2a)/2 -/+ c^2 for a
            rhs = C[0, 1, 1] + s * cc * cc
            disc = 1.0 + 2.0 * rhs
            if disc >= 0.0:
                for a in (-1.0 + math.sqrt(disc), -1.0 - math.sqrt(disc)):
                    if abs(a) < _TOL:
                        continue
                    if _match(
                        C,
                        {"111": 0.5 * (a * a + 4.0 * a + 2.0) - s * cc * cc,
                         "112": cc,
                         "122": 0.5 * (a * a + 2.0 * a) - s * cc * cc,
                         "221": s, "222": 2.0 * s * cc},
                    ):
                        return ModelLabel(
                            family=f"Pa{tag}",
                            parameters={"a": float(a), "c": float(cc)},
                            signature=sig,
                        )
    return None


def classify(model: SurfaceModel) -> ModelLabel:
    if model.family == surface.SPHERE:
        return ModelLabel(family="S2", signature=invariants(model))
    if model.family in (surface.HYPERBOLIC_PLUS, surface.HYPERBOLIC_MINUS):
        name = "H2+" if model.family == surface.HYPERBOLIC_PLUS else "H2-"
        return ModelLabel(family=name, signature=invariants(model))

    sig = invariants(model)
    if model.family == surface.TYPE_A:
        C = model.coeff_array()
        if sig.flat:
            label = _flat_type_a_label(C)
            return label or ModelLabel(family="UNRECOGNIZED", signature=sig,
                                       notes=("flat, outside the listed normal forms",))
        if sig.killing_dim == 4:
            return _type_a_rank1_label(C, sig)
        if sig.killing_dim == 2 and sig.ricci_rank == 2:
            return _type_a_rank2_label(sig)
        return ModelLabel(family="UNRECOGNIZED", signature=sig)

    if model.family == surface.TYPE_B:
        # try the raw table, then the sheared-and-rescaled normal shape, then
        # its reflection x2 -> -x2 (which flips C_11^2, C_12^1 and C_22^2)
        raw = model.coeff_array()
        candidates = [raw]
        Cn = normalize_type_b(model).model.coeff_array()
        if np.abs(Cn - raw).max() > 1e-12:
            candidates.append(Cn)
        refl = Cn.copy()
        for i, j, k in ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)):
            refl[i, j, k] = -refl[i, j, k]
        if np.abs(refl - Cn).max() > 1e-12:
            candidates.append(refl)
        for C in candidates:
            if sig.flat:
                label = _flat_type_b_label(C)
            elif sig.killing_dim == 4:
                label = _type_b_killing4_label(C, sig)
            elif sig.killing_dim == 3:
                label = _type_b_killing3_label(C, sig)
            elif sig.killing_dim == 2:
                label = _type_b_killing2_label(C, sig)
            else:
                label = None
            if label is not None:
                return label
        notes = ("flat, outside the listed normal forms",) if sig.flat else ()
        return ModelLabel(family="UNRECOGNIZED", signature=sig, notes=notes)

    return ModelLabel(family="UNRECOGNIZED", signature=sig)
