"""Affine Killing fields: residual of the Lie-derivative equation and dim K.

The Killing equation in coordinates is

    E_ij^k = d_i d_j X^k + X^l d_l Gamma_ij^k - Gamma_ij^l d_l X^k
             + Gamma_lj^k d_i X^l + Gamma_il^k d_j X^l = 0.

killing_dimension linearizes this on the space of Taylor polynomials of X at
a base point (degree 5) and imposes the equation's Taylor coefficients through
total order 3 (prolongation order 3; order 2 already determines the rank on
all catalogued models, the extra order guards against accidental degeneracy).
A Killing field is determined by its 1-jet, so dim K is the rank of the
kernel's projection onto the six jet coordinates (X(P), dX(P)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import surface, terms
from .errors import SolverError
from .surface import SurfaceModel

_POLY_DEG = 5  # Taylor degree of the unknown field
_EQ_ORDER = 3  # equation matched through this total order
_RANK_CUTOFF = 1e-8


@dataclass(frozen=True)
class KillingField:
    components: tuple[terms.ClosedForm, terms.ClosedForm]


def type_a_generators() -> list[KillingField]:
    return [
        KillingField((terms.ONE, terms.ZERO)),
        KillingField((terms.ZERO, terms.ONE)),
    ]


def type_b_generators() -> list[KillingField]:
    return [
        KillingField((terms.coord(1), terms.coord(2))),
        KillingField((terms.ZERO, terms.ONE)),
    ]


def lie_derivative_residual(model: SurfaceModel, X: KillingField, points=None) -> float:
    if points is None:
        points = surface.standard_points(model)
    comps = X.components
    d = [[c.differentiate(1), c.differentiate(2)] for c in comps]
    dd = [
        [
            [d[k][0].differentiate(1), d[k][0].differentiate(2)],
            [d[k][1].differentiate(1), d[k][1].differentiate(2)],
        ]
        for k in range(2)
    ]
    worst = 0.0
    for p in points:
        g = model.christoffel(p)
        dg1 = model.christoffel_derivative(p)  # d_1 Gamma; d_2 Gamma = 0
        xv = [comps[k].evaluate(p) for k in range(2)]
        dx = [[d[k][i].evaluate(p) for i in range(2)] for k in range(2)]
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    acc = dd[k][i][j].evaluate(p)
                    acc += xv[0] * dg1[i, j, k]
                    for l in range(2):
                        acc -= g[i, j, l] * dx[k][l]
                        acc += g[l, j, k] * dx[l][i] + g[i, l, k] * dx[l][j]
                    worst = max(worst, abs(acc))
    return worst


# ---------------------------------------------------------------------------
# Bivariate truncated series helpers (coefficient arrays A[d1, d2])


def _series_mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros((order + 1, order + 1))
    n1, n2 = a.shape
    m1, m2 = b.shape
    for i in range(min(n1, order + 1)):
        for j in range(min(n2, order + 1)):
            v = a[i, j]
            if v == 0.0:
                continue
            for k in range(min(m1, order + 1 - i)):
                for l in range(min(m2, order + 1 - j)):
                    out[i + k, j + l] += v * b[k, l]
    return out


def _series_dx(a: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(a)
    n1, n2 = a.shape
    if axis == 0:
        for i in range(1, n1):
            out[i - 1] = i * a[i]
    else:
        for j in range(1, n2):
            out[:, j - 1] = j * a[:, j]
    return out


def _gamma_series(model: SurfaceModel, p, order: int):
    """G[i][j][k] as bivariate series arrays (all charts are x2-independent)."""
    T = model.christoffel_taylor(p, order)
    G = [
        [[np.zeros((order + 1, order + 1)) for _ in range(2)] for _ in range(2)]
        for _ in range(2)
    ]
    for d in range(order + 1):
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    G[i][j][k][d, 0] = T[d, i, j, k]
    return G


def killing_dimension(model: SurfaceModel, base_point=None) -> int:
    """Dimension of the affine Killing algebra (base-point independent)."""
    if base_point is not None:
        return _killing_dimension_at(model, base_point)
    pts = surface.standard_points(model)
    dims = [_killing_dimension_at(model, p) for p in (pts[1], pts[4])]
    if dims[0] != dims[1]:
        raise SolverError(f"Killing dimension unstable across base points: {dims}")
    return dims[0]


def _killing_dimension_at(model: SurfaceModel, p) -> int:
    order = _EQ_ORDER
    gamma = _gamma_series(model, p, order + 1)
    dgamma = [
        [[_series_dx(gamma[i][j][k], 0) for k in range(2)] for j in range(2)]
        for i in range(2)
    ]
    monomials = [(d1, tot - d1) for tot in range(_POLY_DEG + 1) for d1 in range(tot + 1)]
    unknowns = [(k, m) for k in range(2) for m in monomials]
    eq_coeffs = [(c1, tot - c1) for tot in range(order + 1) for c1 in range(tot + 1)]
    n_rows = 3 * 2 * len(eq_coeffs)
    mat = np.zeros((n_rows, len(unknowns)))

    for col, (kc, mono) in enumerate(unknowns):
        X = np.zeros((_POLY_DEG + 1, _POLY_DEG + 1))
        X[mono] = 1.0
        dX = [_series_dx(X, 0), _series_dx(X, 1)]
        ddX = [[_series_dx(dX[a], b) for b in range(2)] for a in range(2)]
        for bi, (i, j) in enumerate([(0, 0), (0, 1), (1, 1)]):
            for k in range(2):
                E = np.zeros((order + 1, order + 1))
                if k == kc:
                    E += ddX[i][j][: order + 1, : order + 1]
                    # - Gamma_ij^l d_l X^k
                    E -= _series_mul(gamma[i][j][0], dX[0], order)
                    E -= _series_mul(gamma[i][j][1], dX[1], order)
                if kc == 0:
                    # X^l d_l Gamma_ij^k: only d_1 Gamma is nonzero
                    E += _series_mul(X, dgamma[i][j][k], order)
                # + Gamma_lj^k d_i X^l + Gamma_il^k d_j X^l with l = kc
                E += _series_mul(gamma[kc][j][k], dX[i], order)
                E += _series_mul(gamma[i][kc][k], dX[j], order)
                for ci, c in enumerate(eq_coeffs):
                    r = (bi * 2 + k) * len(eq_coeffs) + ci
                    mat[r, col] = E[c]

    norms = np.abs(mat).max(axis=1)
    keep = norms > 0.0
    if not keep.any():
        return 6
    mat = mat[keep] / norms[keep][:, None]
    _, sv, vt = np.linalg.svd(mat)
    kernel = []
    for i in range(mat.shape[1]):
        s = sv[i] if i < len(sv) else 0.0
        if s < _RANK_CUTOFF * max(sv[0], 1.0):
            kernel.append(vt[i])
    if not kernel:
        return 0
    jet_cols = [
        idx for idx, (k, m) in enumerate(unknowns) if m in ((0, 0), (1, 0), (0, 1))
    ]
    proj = np.array(kernel)[:, jet_cols]
    svp = np.linalg.svd(proj, compute_uv=False)
    if len(svp) == 0 or svp[0] == 0.0:
        return 0
    return int(np.sum(svp > 1e-8 * svp[0]))
