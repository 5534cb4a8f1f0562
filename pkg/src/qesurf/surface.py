"""Homogeneous affine surface models and their local geometry.

Three chart families are supported:

* type A: constant Christoffel symbols on the full plane,
* type B: Gamma_ij^k = C_ij^k / x1 on the right half plane x1 > 0,
* the two curvature charts "sphere" and "hyperbolic+/-" (Levi-Civita
  connections of the round and Lorentzian constant-curvature metrics).

Index conventions, fixed once here and used everywhere:

* christoffel(p)[i, j, k] = Gamma_ij^k (symmetric in i, j),
* curvature R[l, k, i, j] with R(d_i, d_j) d_k = R^l_kij d_l and
  R^l_kij = d_i Gamma_jk^l - d_j Gamma_ik^l + Gamma_im^l Gamma_jk^m
            - Gamma_jm^l Gamma_ik^m,
* ricci rho[j, k] = sum_m R[m, k, m, j]  (trace of Z -> R(Z, X) Y),
* nabla_ricci nr[k, i, j] = (nabla_k rho)_ij.

The trace convention is pinned by reproducing the published Ricci values of
the constant-Christoffel normal forms (see tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import terms
from .errors import DomainError, SchemaError

SYMBOL_KEYS = ("111", "112", "121", "122", "221", "222")

TYPE_A = "typeA"
TYPE_B = "typeB"
SPHERE = "sphere"
HYPERBOLIC_PLUS = "hyperbolic+"
HYPERBOLIC_MINUS = "hyperbolic-"

_DOMAIN_OF = {
    TYPE_A: terms.FULL_PLANE,
    TYPE_B: terms.RIGHT_HALF,
    SPHERE: terms.SPHERE_CHART,
    HYPERBOLIC_PLUS: terms.RIGHT_HALF,
    HYPERBOLIC_MINUS: terms.RIGHT_HALF,
}

# Hyperbolic charts use the full plane for x1 in principle; we keep x1 free.
_DOMAIN_OF[HYPERBOLIC_PLUS] = terms.FULL_PLANE
_DOMAIN_OF[HYPERBOLIC_MINUS] = terms.FULL_PLANE


def symbols_to_array(sym: dict) -> np.ndarray:
    """Six independent components {111,...,222} -> symmetric (2,2,2) array."""
    g = np.zeros((2, 2, 2))
    for key in sym:
        if key not in SYMBOL_KEYS:
            raise SchemaError(f"unknown Christoffel component {key!r}")
    for key in SYMBOL_KEYS:
        v = float(sym.get(key, 0.0))
        i, j, k = (int(c) - 1 for c in key)
        g[i, j, k] = v
        g[j, i, k] = v
    return g


def array_to_symbols(g: np.ndarray) -> dict:
    return {key: float(g[int(key[0]) - 1, int(key[1]) - 1, int(key[2]) - 1]) for key in SYMBOL_KEYS}


@dataclass(frozen=True)
class SurfaceModel:
    family: str
    coeffs: tuple = ()  # flattened constant symbols (type A) or C-coefficients (type B)
    params: dict = field(default_factory=dict)
    name: str = ""

    @property
    def domain(self) -> str:
        return _DOMAIN_OF[self.family]

    def coeff_array(self) -> np.ndarray:
        return np.array(self.coeffs).reshape(2, 2, 2)

    # -- Christoffel evaluators ------------------------------------------

    def christoffel(self, p) -> np.ndarray:
        if not terms.in_domain(p, self.domain):
            raise DomainError(f"point {tuple(p)} outside {self.domain}")
        if self.family == TYPE_A:
            return self.coeff_array().copy()
        if self.family == TYPE_B:
            return self.coeff_array() / p[0]
        g = np.zeros((2, 2, 2))
        x1 = p[0]
        if self.family == SPHERE:
            g[0, 1, 1] = g[1, 0, 1] = -math.tan(x1)
            g[1, 1, 0] = math.cos(x1) * math.sin(x1)
        else:  # hyperbolic charts
            sign = 1.0 if self.family == HYPERBOLIC_PLUS else -1.0
            g[0, 1, 1] = g[1, 0, 1] = 1.0
            g[1, 1, 0] = -sign * math.exp(2.0 * x1)
        return g

    def christoffel_taylor(self, p, order: int) -> np.ndarray:
        """Taylor coefficients T[d, i, j, k] of Gamma_ij^k in (x1 - p1).

        All families depend on x1 only, so only the x1-direction is expanded:
        Gamma_ij^k(x1, x2) = sum_d T[d, i, j, k] (x1 - p1)^d.
        """
        T = np.zeros((order + 1, 2, 2, 2))
        x1 = p[0]
        if self.family == TYPE_A:
            T[0] = self.christoffel(p)
            return T
        if self.family == TYPE_B:
            C = self.coeff_array()
            for d in range(order + 1):
                T[d] = C * ((-1.0) ** d) / x1 ** (d + 1)
            return T
        if self.family == SPHERE:
            s = _sin_series(x1, order)
            c = _cos_series(x1, order)
            tan = _series_div(s, c)
            half_sin2 = 0.5 * _sin_series(2.0 * x1, order) * _dilate(2.0, order)
            for d in range(order + 1):
                T[d, 0, 1, 1] = T[d, 1, 0, 1] = -tan[d]
                T[d, 1, 1, 0] = half_sin2[d]
            return T
        sign = 1.0 if self.family == HYPERBOLIC_PLUS else -1.0
        e = math.exp(2.0 * x1)
        T[0, 0, 1, 1] = T[0, 1, 0, 1] = 1.0
        for d in range(order + 1):
            T[d, 1, 1, 0] = -sign * e * (2.0 ** d) / math.factorial(d)
        return T

    def christoffel_derivative(self, p, order: int = 1) -> np.ndarray:
        """d^order / d(x1)^order of Gamma at p (x2-derivatives vanish)."""
        T = self.christoffel_taylor(p, order)
        return T[order] * math.factorial(order)


def _sin_series(x0: float, order: int) -> np.ndarray:
    """Taylor coefficients of sin(x0 + h) in h."""
    out = np.zeros(order + 1)
    vals = [math.sin(x0), math.cos(x0), -math.sin(x0), -math.cos(x0)]
    for d in range(order + 1):
        out[d] = vals[d % 4] / math.factorial(d)
    return out


def _cos_series(x0: float, order: int) -> np.ndarray:
    out = np.zeros(order + 1)
    vals = [math.cos(x0), -math.sin(x0), -math.cos(x0), math.sin(x0)]
    for d in range(order + 1):
        out[d] = vals[d % 4] / math.factorial(d)
    return out


def _series_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated power series quotient a / b."""
    n = len(a)
    out = np.zeros(n)
    for d in range(n):
        acc = a[d] - sum(out[m] * b[d - m] for m in range(d))
        out[d] = acc / b[0]
    return out


def _dilate(s: float, order: int) -> np.ndarray:
    """Coefficient rescaling for substituting h -> s*h."""
    return np.array([s ** d for d in range(order + 1)])


# ---------------------------------------------------------------------------
# Constructors


def type_a_model(sym: dict, name: str = "", params: dict | None = None) -> SurfaceModel:
    g = symbols_to_array(sym)
    return SurfaceModel(TYPE_A, tuple(g.ravel()), params or {}, name)


def type_b_model(sym: dict, name: str = "", params: dict | None = None) -> SurfaceModel:
    g = symbols_to_array(sym)
    return SurfaceModel(TYPE_B, tuple(g.ravel()), params or {}, name)


def sphere_model(name: str = "S2") -> SurfaceModel:
    return SurfaceModel(SPHERE, (), {}, name)


def hyperbolic_model(sign: int, name: str = "") -> SurfaceModel:
    fam = HYPERBOLIC_PLUS if sign > 0 else HYPERBOLIC_MINUS
    return SurfaceModel(fam, (), {}, name or ("H2+" if sign > 0 else "H2-"))


def model_from_dict(data: dict) -> SurfaceModel:
    """Build a model from its JSON description.

    Schema: {"kind": "typeA"|"typeB"|"sphere"|"hyperbolic+"|"hyperbolic-",
             "Gamma"/"C": {"111": float, ..., "222": float},
             "params": {...}}  (Gamma for type A, C for type B).
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError("model description must be an object with a 'kind'")
    kind = data["kind"]
    params = data.get("params", {})
    if kind == TYPE_A:
        if "Gamma" not in data:
            raise SchemaError("typeA model needs a 'Gamma' table")
        return type_a_model(data["Gamma"], params=params)
    if kind == TYPE_B:
        if "C" not in data:
            raise SchemaError("typeB model needs a 'C' table")
        return type_b_model(data["C"], params=params)
    if kind == SPHERE:
        return sphere_model()
    if kind in (HYPERBOLIC_PLUS, HYPERBOLIC_MINUS):
        return hyperbolic_model(+1 if kind == HYPERBOLIC_PLUS else -1)
    raise SchemaError(f"unknown model kind {kind!r}")


def model_to_dict(model: SurfaceModel) -> dict:
    if model.family == TYPE_A:
        return {"kind": TYPE_A, "Gamma": array_to_symbols(model.coeff_array()), "params": model.params}
    if model.family == TYPE_B:
        return {"kind": TYPE_B, "C": array_to_symbols(model.coeff_array()), "params": model.params}
    return {"kind": model.family, "params": model.params}


# ---------------------------------------------------------------------------
# Standard evaluation grids (generic points per chart family)

_GRID = {
    terms.FULL_PLANE: [(x1, x2) for x1 in (-0.5, 0.3, 1.1) for x2 in (-0.7, 0.4, 0.9)],
    terms.RIGHT_HALF: [(x1, x2) for x1 in (0.5, 1.0, 2.0) for x2 in (-0.7, 0.3, 1.2)],
    terms.SPHERE_CHART: [(x1, x2) for x1 in (-1.1, 0.2, 0.9) for x2 in (-0.7, 0.3, 1.2)],
}


def standard_points(model: SurfaceModel) -> list[tuple[float, float]]:
    return list(_GRID[model.domain])


# ---------------------------------------------------------------------------
# Curvature and Ricci


def curvature(model: SurfaceModel, p) -> np.ndarray:
    """R[l, k, i, j] at p."""
    g = model.christoffel(p)
    dg1 = model.christoffel_derivative(p)  # d_1 Gamma[i,j,k]
    dg = np.zeros((2, 2, 2, 2))  # dg[m, i, j, k] = d_m Gamma_ij^k
    dg[0] = dg1
    R = np.zeros((2, 2, 2, 2))
    for l in range(2):
        for k in range(2):
            for i in range(2):
                for j in range(2):
                    acc = dg[i, j, k, l] - dg[j, i, k, l]
                    for m in range(2):
                        acc += g[i, m, l] * g[j, k, m] - g[j, m, l] * g[i, k, m]
                    R[l, k, i, j] = acc
    return R


def ricci(model: SurfaceModel, p) -> np.ndarray:
    R = curvature(model, p)
    return np.einsum("mkmj->jk", R)


def ricci_symmetric(model: SurfaceModel, p) -> np.ndarray:
    r = ricci(model, p)
    return 0.5 * (r + r.T)


def ricci_antisymmetric(model: SurfaceModel, p) -> np.ndarray:
    r = ricci(model, p)
    return 0.5 * (r - r.T)


def _ricci_x1_derivative(model: SurfaceModel, p) -> np.ndarray:
    """Exact d_1 rho at p via differentiated curvature formula."""
    g = model.christoffel(p)
    dg = model.christoffel_derivative(p, 1)
    d2g = model.christoffel_derivative(p, 2)
    # rho_jk = sum_m [ d_m G_jk^m - d_j G_mk^m + G_mi^m G_jk^i - G_ji^m G_mk^i ]
    # all x-dependence is through x1; differentiate term by term.
    out = np.zeros((2, 2))
    for j in range(2):
        for k in range(2):
            acc = 0.0
            for m in range(2):
                # d_1 [ d_m G_jk^m ]: nonzero only for m = 0 (x1)
                if m == 0:
                    acc += d2g[j, k, 0]
                # d_1 [ - d_j G_mk^m ]: nonzero only for j = 0
                if j == 0:
                    acc -= d2g[m, k, m]
                for i in range(2):
                    acc += dg[m, i, m] * g[j, k, i] + g[m, i, m] * dg[j, k, i]
                    acc -= dg[j, i, m] * g[m, k, i] + g[j, i, m] * dg[m, k, i]
            out[j, k] = acc
    return out


def nabla_ricci(model: SurfaceModel, p) -> np.ndarray:
    """nr[k, i, j] = (nabla_k rho)_ij, exact."""
    g = model.christoffel(p)
    rho = ricci(model, p)
    drho = np.zeros((2, 2, 2))  # drho[m, i, j] = d_m rho_ij
    drho[0] = _ricci_x1_derivative(model, p)
    nr = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                acc = drho[k, i, j]
                for m in range(2):
                    acc -= g[k, i, m] * rho[m, j] + g[k, j, m] * rho[i, m]
                nr[k, i, j] = acc
    return nr


def is_flat(model: SurfaceModel, tol: float = 1e-10) -> bool:
    return all(np.abs(ricci(model, p)).max() < tol for p in standard_points(model))


def is_strongly_projectively_flat(model: SurfaceModel, tol: float = 1e-10) -> bool:
    """True when rho is symmetric and nabla rho is totally symmetric.

    For type B charts the components are normalized by powers of x1 before
    comparison so the check is scale-independent.
    """
    for p in standard_points(model):
        s2 = p[0] ** 2 if model.domain == terms.RIGHT_HALF else 1.0
        s3 = p[0] ** 3 if model.domain == terms.RIGHT_HALF else 1.0
        rho = ricci(model, p) * s2
        if np.abs(rho - rho.T).max() > tol:
            return False
        nr = nabla_ricci(model, p) * s3
        for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            if np.abs(nr - np.transpose(nr, perm)).max() > tol:
                return False
    return True


# ---------------------------------------------------------------------------
# Hessian and the quasi-Einstein residual


def _derivative_bundle(f):
    d1 = f.differentiate(1)
    d2 = f.differentiate(2)
    return d1, d2, d1.differentiate(1), d1.differentiate(2), d2.differentiate(2)


def hessian(model: SurfaceModel, f, p) -> np.ndarray:
    """H_ij = (d_i d_j - Gamma_ij^k d_k) f at p."""
    d1, d2, d11, d12, d22 = _derivative_bundle(f)
    return _hessian_at(model, p, d1, d2, d11, d12, d22)


def _hessian_at(model, p, d1, d2, d11, d12, d22) -> np.ndarray:
    g = model.christoffel(p)
    grad = (d1.evaluate(p), d2.evaluate(p))
    H = np.array(
        [
            [d11.evaluate(p), d12.evaluate(p)],
            [d12.evaluate(p), d22.evaluate(p)],
        ],
        dtype=float,
    )
    for i in range(2):
        for j in range(2):
            H[i, j] -= g[i, j, 0] * grad[0] + g[i, j, 1] * grad[1]
    return H


def qe_residual(model: SurfaceModel, mu: float, f, points=None) -> float:
    """max_p || Hess f - mu * f * rho_s ||_F over the standard grid."""
    if points is None:
        points = standard_points(model)
    d1, d2, d11, d12, d22 = _derivative_bundle(f)
    worst = 0.0
    for p in points:
        H = _hessian_at(model, p, d1, d2, d11, d12, d22)
        resid = H - mu * f.evaluate(p) * ricci_symmetric(model, p)
        worst = max(worst, float(np.abs(resid).max()))
    return worst


def qe_operator_entries(model: SurfaceModel, mu: float, f, p) -> np.ndarray:
    """The 2x2 matrix Hess f - mu f rho_s at a single point."""
    return hessian(model, f, p) - mu * f.evaluate(p) * ricci_symmetric(model, p)


# ---------------------------------------------------------------------------
# Parallel complex structures


def kahler_structure(model: SurfaceModel, tol: float = 1e-9):
    """Constant matrix J with J^2 = -Id and nabla J = 0, or None.

    For type A and type B charts a parallel complex structure compatible with
    the homogeneous structure can be taken constant in the given coordinates;
    it must then commute with both connection matrices (G_k)^i_m = Gamma_km^i.
    The returned matrix is normalized so its (1,2) entry is 1 when possible.
    """
    pts = standard_points(model)[:2]
    mats = []
    for p in pts:
        g = model.christoffel(p)
        mats.append(g[0].T)  # (G_1)^i_m = Gamma_1m^i
        mats.append(g[1].T)
    rows = []
    for A in mats:
        # vec(AJ - JA) as linear map on vec(J)
        M = np.kron(A, np.eye(2)) - np.kron(np.eye(2), A.T)
        rows.append(M)
    system = np.vstack(rows)
    _, sv, vt = np.linalg.svd(system)
    cutoff = 1e-10 * max(sv[0], 1.0)
    null = [vt[i].reshape(2, 2) for i in range(4) if i >= len(sv) or sv[i] < cutoff]
    candidates = []
    for K in null:
        K0 = K - 0.5 * np.trace(K) * np.eye(2)
        d = float(np.linalg.det(K0))
        if d > tol:
            candidates.append(K0 / math.sqrt(d))
    # scalar commutant (e.g. flat): fall back to the standard rotation
    candidates.append(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    for J in candidates:
        if np.abs(J @ J + np.eye(2)).max() > 1e-8:
            continue
        ok = all(np.abs(A @ J - J @ A).max() < 1e-8 for A in mats)
        if not ok:
            continue
        # orientation: make the (1,2) entry positive when nonzero
        if J[0, 1] < -tol or (abs(J[0, 1]) <= tol and J[1, 0] < 0.0):
            J = -J
        if abs(J[0, 1]) > tol:
            # rescale within {J, -J} only; J is already unit (J^2=-Id)
            pass
        return J
    return None
