"""Eigenspace solvers for the quasi-Einstein operator Hess f - mu f rho_s.

Type A (constant symbols): substituting f = exp(a.x) turns the operator into
three quadratics in a = (a1, a2); their common roots are found by resultant
elimination and companion-matrix root-finding.  Polynomial companions (degree
<= 2) are recovered by a coefficient-matching nullspace around each root.

Type B (symbols C/x1): every solution sits over a pure power (x1)^alpha whose
exponent satisfies explicit quadratic/linear conditions; the ladder of
companions (x2-linear, x2-quadratic, log) lives in a finite dictionary of
monomials (x1)^(alpha+d) (x2)^i log(x1)^j with d+i <= 2, j <= 1, and the
eigenspace is the nullspace of the operator evaluated on that dictionary.

Type C charts have the fixed mu in {0, -1} bases; anything else is empty.

Complex conjugate exponent pairs become cos/sin forms.  Complex type B
indicial roots are outside the term algebra (log-frequency trig); they are
returned as LogTrigForm opaque evaluators and flagged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import surface, terms
from .errors import PreconditionError, SolverError
from .surface import SurfaceModel
from .terms import ClosedForm, coord, expf, logf, power, realize_complex_exp

ROOT_CLUSTER_TOL = 1e-8
RESIDUAL_TOL = 1e-9
_NULL_CUTOFF = 1e-8


# ---------------------------------------------------------------------------
# Opaque evaluator for (x1)^alpha cos(freq * log x1 + phase)


@dataclass(frozen=True)
class LogTrigForm:
    """x1-power with log-frequency cosine; closed under d/dx1, outside ClosedForm."""

    coeff: float
    alpha: float
    freq: float
    phase: float = 0.0

    def evaluate(self, p, domain=None) -> float:
        x = p[0]
        if x <= 0.0:
            from .errors import DomainError

            raise DomainError("LogTrigForm needs x1 > 0")
        L = math.log(x)
        return self.coeff * x ** self.alpha * math.cos(self.freq * L + self.phase)

    def differentiate(self, axis: int):
        if axis == 2:
            return terms.ZERO
        # d/dx [x^a cos(m log x + p)] = x^(a-1) (a cos(...) - m sin(...))
        amp = math.hypot(self.alpha, self.freq)
        if amp == 0.0:
            return terms.ZERO
        delta = math.atan2(self.freq, self.alpha)
        return LogTrigForm(self.coeff * amp, self.alpha - 1.0, self.freq, self.phase + delta)

    def is_zero(self) -> bool:
        return self.coeff == 0.0

    def __str__(self) -> str:
        return (
            f"{self.coeff!r} * (x1)^{self.alpha!r} * "
            f"cos({self.freq!r}*log(x1) + {self.phase!r})"
        )


@dataclass
class SolutionBasis:
    mu: float
    basis: list
    residual: float
    method: str
    flags: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


# ---------------------------------------------------------------------------
# Polynomial helpers (ascending coefficient arrays)


def _trim(c: np.ndarray, tol: float) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c))
    nz = np.nonzero(np.abs(c) > tol)[0]
    if len(nz) == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def _poly_det(M: list[list[np.ndarray]]) -> np.ndarray:
    """Determinant of a small matrix with polynomial entries (Laplace expansion)."""
    n = len(M)
    if n == 1:
        return M[0][0]
    acc = np.zeros(1)
    for j in range(n):
        piv = M[0][j]
        if np.abs(piv).max() == 0.0:
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in M[1:]]
        term = npoly.polymul(piv, _poly_det(minor))
        acc = npoly.polyadd(acc, term if j % 2 == 0 else -term)
    return acc


def _sylvester_resultant(p: list[np.ndarray], q: list[np.ndarray]) -> np.ndarray:
    """Resultant in the outer variable of two polynomials whose coefficients
    are themselves polynomials (ascending lists of ascending arrays)."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = np.zeros(1)
    M = [[zero for _ in range(size)] for _ in range(size)]
    for r in range(n):  # rows of p coefficients
        for k, c in enumerate(reversed(p)):  # leading first
            M[r][r + k] = c
    for r in range(m):
        for k, c in enumerate(reversed(q)):
            M[n + r][r + k] = c
    return _poly_det(M)


def _roots(coeffs: np.ndarray) -> list[complex]:
    """Roots of an ascending-coefficient polynomial via the companion matrix.

    Companion-matrix roots of an m-fold root scatter by ~eps^(1/m) (1e-4 for
    m = 4), which is far too coarse for the downstream residual checks.  Each
    scatter cluster is therefore re-centred by Newton on the (m-1)-th
    derivative, where the root is simple and well conditioned.
    """
    c = _trim(coeffs, 1e-12 * max(1.0, np.abs(coeffs).max()))
    if len(c) <= 1:
        return []
    raw = [complex(r) for r in npoly.polyroots(c)]
    out: list[complex] = []
    used = [False] * len(raw)
    for i, r in enumerate(raw):
        if used[i]:
            continue
        cluster = [r]
        used[i] = True
        for j in range(i + 1, len(raw)):
            if not used[j] and abs(raw[j] - r) < 1e-4 * max(1.0, abs(r)):
                cluster.append(raw[j])
                used[j] = True
        z = sum(cluster) / len(cluster)
        if len(cluster) > 1:
            deriv = np.asarray(c, dtype=complex)
            for _ in range(len(cluster) - 1):
                deriv = npoly.polyder(deriv)
            z = _newton_root(deriv, z)
        out.extend([z] * len(cluster))
    return out


def _newton_root(coeffs: np.ndarray, z: complex, iters: int = 50) -> complex:
    dp = npoly.polyder(coeffs)
    z0 = z
    for _ in range(iters):
        g = npoly.polyval(z, dp)
        if g == 0:
            break
        step = npoly.polyval(z, coeffs) / g
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    if not np.isfinite(z) or abs(z - z0) > 1e-3 * max(1.0, abs(z0)):
        return z0  # refinement ran away; keep the cluster mean
    return z


def _cluster(values: list[complex], tol: float = 1e-6) -> list[complex]:
    reps: list[complex] = []
    for v in values:
        for i, r in enumerate(reps):
            if abs(v - r) < tol:
                reps[i] = (r + v) / 2.0
                break
        else:
            reps.append(v)
    return reps


def _snap_real(z: complex, tol: float = 1e-6) -> complex:
    re = z.real if abs(z.real) > tol else 0.0
    im = z.imag if abs(z.imag) > tol else 0.0
    # snap to adjacent integers at rounding-error distance; a wrong snap
    # cannot survive the final residual gate
    if re and abs(re - round(re)) < 1e-9:
        re = float(round(re))
    if im and abs(im - round(im)) < 1e-9:
        im = float(round(im))
    return complex(re, im)


# ---------------------------------------------------------------------------
# Shared nullspace machinery


def _operator_rows(model: SurfaceModel, mu: float, funcs, points) -> np.ndarray:
    """Rows: entries (11,12,22) of Hess g - mu g rho_s at each point; columns: funcs."""
    rows = np.empty((3 * len(points), len(funcs)))
    rho_s = [surface.ricci_symmetric(model, p) for p in points]
    for j, g in enumerate(funcs):
        d1 = g.differentiate(1)
        d2 = g.differentiate(2)
        d11, d12, d22 = d1.differentiate(1), d1.differentiate(2), d2.differentiate(2)
        for i, p in enumerate(points):
            H = surface._hessian_at(model, p, d1, d2, d11, d12, d22)
            Q = H - mu * g.evaluate(p) * rho_s[i]
            rows[3 * i, j] = Q[0, 0]
            rows[3 * i + 1, j] = Q[0, 1]
            rows[3 * i + 2, j] = Q[1, 1]
    return rows


def _rref(mat: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Row-reduced echelon form with partial pivoting; tiny entries zeroed."""
    m = mat.astype(float).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[piv, c]) < tol:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] /= m[r, c]
        for i in range(rows):
            if i != r:
                m[i] -= m[i, c] * m[r]
        r += 1
    m[np.abs(m) < tol] = 0.0
    return m[:r]


def _nullspace_basis(model: SurfaceModel, mu: float, dictionary: list[ClosedForm]):
    """ClosedForm basis of the eigenspace inside span(dictionary)."""
    if not dictionary:
        return []
    pts = terms.sample_points(model.domain, n=max(12, len(dictionary) + 6))
    M = _operator_rows(model, mu, dictionary, pts)
    F = terms.evaluation_matrix(dictionary, pts)
    col_scale = np.abs(F).max(axis=0)
    col_scale[col_scale == 0.0] = 1.0
    Ms = M / col_scale
    row_scale = max(np.abs(Ms).max(), 1.0)
    Ms /= row_scale
    _, sv, vt = np.linalg.svd(Ms)
    ncols = Ms.shape[1]
    null = []
    for i in range(ncols):
        s = sv[i] if i < len(sv) else 0.0
        if s < _NULL_CUTOFF * max(sv[0], 1e-30) or sv[0] == 0.0:
            null.append(vt[i])
    if not null:
        return []
    # drop combinations that are the zero function (duplicate dictionary columns)
    # and near-cutoff directions that merely minimise an ill-conditioned
    # dictionary (genuine solutions sit many orders below them in residual)
    kept = []
    for v in null:
        w = v / col_scale
        fv = F @ w
        if np.abs(fv).max() <= 1e-9 * max(1.0, np.abs(F @ np.abs(w)).max()):
            continue
        w = w / np.abs(fv).max()  # normalise to sup ~ 1 on the sample points
        cf = terms.ZERO
        for c, g in zip(w, dictionary):
            if c != 0.0:
                cf = cf + c * g
        if surface.qe_residual(model, mu, cf) < RESIDUAL_TOL:
            kept.append(w)
    if not kept:
        return []
    # canonical presentation: reduce coefficient rows, leading coefficient 1
    V = _rref(np.array(kept))
    out = []
    for rowv in V:
        cf = terms.ZERO
        for c, g in zip(rowv, dictionary):
            if c != 0.0:
                cf = cf + c * g
        if not cf.is_zero():
            out.append(cf)
    return out


def _verify(model: SurfaceModel, mu: float, basis, method: str, flags=None) -> SolutionBasis:
    worst = 0.0
    for f in basis:
        worst = max(worst, surface.qe_residual(model, mu, f))
    if worst >= RESIDUAL_TOL:
        raise SolverError(
            f"solver self-check failed: residual {worst:.3e} for mu={mu} on {model.name or model.family}"
        )
    if len(basis) > 3:
        raise SolverError(f"eigenspace dimension {len(basis)} exceeds the bound 3")
    if basis:
        r = terms.robust_rank(basis, model.domain)
        if r != len(basis):
            raise SolverError("returned basis is numerically dependent")
    return SolutionBasis(mu=mu, basis=list(basis), residual=worst, method=method, flags=flags or [])


# ---------------------------------------------------------------------------
# Type A


def _type_a_quadratics(model: SurfaceModel, mu: float) -> list[np.ndarray]:
    """Q_ij(a) as 3x3 arrays q[m,n] = coeff of a1^m a2^n."""
    g = model.christoffel((0.0, 0.0))
    rho_s = surface.ricci_symmetric(model, (0.0, 0.0))
    eqs = []
    for (i, j) in ((0, 0), (0, 1), (1, 1)):
        q = np.zeros((3, 3))
        # a_i a_j
        mi = [0, 0]
        mi[i] += 1
        mi[j] += 1
        q[mi[0], mi[1]] = 1.0
        q[1, 0] -= g[i, j, 0]
        q[0, 1] -= g[i, j, 1]
        q[0, 0] -= mu * rho_s[i, j]
        eqs.append(q)
    return eqs


def _bivar_eval(q: np.ndarray, a1: complex, a2: complex) -> complex:
    acc = 0.0 + 0.0j
    for m in range(3):
        for n in range(3):
            if q[m, n]:
                acc += q[m, n] * a1 ** m * a2 ** n
    return acc


def _as_poly_in(q: np.ndarray, var: int) -> list[np.ndarray]:
    """q as polynomial in a_var with coefficients polynomial in the other variable."""
    if var == 2:
        cols = [q[:, n] for n in range(3)]
    else:
        cols = [q[m, :] for m in range(3)]
    cols = [_trim(c, 1e-14) for c in cols]
    while len(cols) > 1 and np.abs(cols[-1]).max() == 0.0:
        cols.pop()
    return cols


def _degree(p: list[np.ndarray]) -> int:
    return len(p) - 1


def _subst(q: np.ndarray, var: int, val: complex) -> np.ndarray:
    """Substitute a value for one variable; ascending coeffs in the other."""
    out = np.zeros(3, dtype=complex)
    for m in range(3):
        for n in range(3):
            if q[m, n]:
                if var == 1:
                    out[n] += q[m, n] * val ** m
                else:
                    out[m] += q[m, n] * val ** n
    return out


def _type_a_roots(model: SurfaceModel, mu: float) -> list[tuple[complex, complex]]:
    eqs = _type_a_quadratics(model, mu)
    scale = max(np.abs(np.array(eqs)).max(), 1.0)
    live = [q for q in eqs if np.abs(q).max() > 1e-13]
    if not live:
        raise SolverError("degenerate exponential system: all conditions vanish")

    cand1: list[complex] = []
    cand2: list[complex] = []
    for q in live:
        p2 = _as_poly_in(q, 2)
        p1 = _as_poly_in(q, 1)
        if _degree(p2) == 0:  # depends on a1 only
            cand1.extend(_roots(p2[0]))
        if _degree(p1) == 0:  # depends on a2 only
            cand2.extend(_roots(p1[0]))
    for ia in range(len(live)):
        for ib in range(ia + 1, len(live)):
            pa, pb = _as_poly_in(live[ia], 2), _as_poly_in(live[ib], 2)
            if _degree(pa) >= 1 and _degree(pb) >= 1:
                res = _sylvester_resultant(pa, pb)
                if np.abs(res).max() > 1e-12:
                    cand1.extend(_roots(res))
            pa, pb = _as_poly_in(live[ia], 1), _as_poly_in(live[ib], 1)
            if _degree(pa) >= 1 and _degree(pb) >= 1:
                res = _sylvester_resultant(pa, pb)
                if np.abs(res).max() > 1e-12:
                    cand2.extend(_roots(res))

    pairs: list[tuple[complex, complex]] = []
    for a1 in _cluster(cand1):
        found_dependent = False
        for q in live:
            sub = _trim(_subst(q, 1, a1), 1e-9 * scale)
            if len(sub) > 1:
                found_dependent = True
                for a2 in _roots(sub):
                    pairs.append((a1, a2))
        if not found_dependent:
            # every equation is a2-free at this a1; valid only if all vanish
            if all(abs(_bivar_eval(q, a1, 0.0)) < 1e-7 * scale for q in live):
                raise SolverError("underdetermined exponential system (continuum of roots)")
    for a2 in _cluster(cand2):
        for q in live:
            sub = _trim(_subst(q, 2, a2), 1e-9 * scale)
            if len(sub) > 1:
                for a1 in _roots(sub):
                    pairs.append((a1, a2))

    good = []
    for a1, a2 in pairs:
        a1, a2 = _polish_root(eqs, a1, a2)
        if all(abs(_bivar_eval(q, a1, a2)) < 1e-7 * scale for q in eqs):
            r = max(abs(_bivar_eval(q, a1, a2)) for q in eqs)
            good.append(((_snap_real(a1), _snap_real(a2)), r))
    # cluster in C^2; a multiple joint root scatters its candidates over a
    # ~1e-4 neighbourhood with deceptively small residuals, so merge wide
    # and keep the best-polished representative of each cluster
    reps: list[tuple[complex, complex]] = []
    res: list[float] = []
    for a, r in good:
        for i, b in enumerate(reps):
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) < 5e-4:
                if r < res[i]:
                    reps[i], res[i] = a, r
                break
        else:
            reps.append(a)
            res.append(r)
    if len(reps) > 12:
        raise SolverError("implausible number of exponential roots")
    return reps


def _bivar_grad(q: np.ndarray, a1: complex, a2: complex) -> tuple[complex, complex]:
    d1 = sum(m * q[m, n] * a1 ** (m - 1) * a2 ** n for m in range(1, 3) for n in range(3) if q[m, n])
    d2 = sum(n * q[m, n] * a1 ** m * a2 ** (n - 1) for m in range(3) for n in range(1, 3) if q[m, n])
    return complex(d1), complex(d2)


def _polish_root(eqs, a1: complex, a2: complex, iters: int = 30):
    """Gauss-Newton refinement; resultants lose accuracy at multiple roots."""
    for _ in range(iters):
        r = np.array([_bivar_eval(q, a1, a2) for q in eqs])
        if np.abs(r).max() < 1e-14:
            break
        J = np.array([_bivar_grad(q, a1, a2) for q in eqs])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        if not np.isfinite(step).all() or np.abs(step).max() > 1.0:
            break
        a1, a2 = a1 + step[0], a2 + step[1]
        if np.abs(step).max() < 1e-15:
            break
    return a1, a2


def _monomial_exp(m: int, n: int, a1: float, a2: float) -> ClosedForm:
    cf = terms.const(1.0)
    if m:
        cf = cf * power(1, float(m))
    if n:
        cf = cf * power(2, float(n))
    if a1:
        cf = cf * expf(1, a1)
    if a2:
        cf = cf * expf(2, a2)
    return cf


def solve_type_a(model: SurfaceModel, mu: float) -> SolutionBasis:
    if model.family != surface.TYPE_A:
        raise PreconditionError("solve_type_a needs a type A model")
    roots = _type_a_roots(model, mu)
    dictionary: list[ClosedForm] = []
    seen = set()
    handled_conj = []
    for a1, a2 in roots:
        if a1.imag == 0.0 and a2.imag == 0.0:
            for m in range(3):
                for n in range(3 - m):
                    key = ("r", m, n, round(a1.real, 9), round(a2.real, 9))
                    if key not in seen:
                        seen.add(key)
                        dictionary.append(_monomial_exp(m, n, a1.real, a2.real))
        else:
            conj_key = (round(a1.real, 9), round(abs(a1.imag), 9), round(a2.real, 9), round(abs(a2.imag), 9))
            if conj_key in handled_conj:
                continue
            handled_conj.append(conj_key)
            # canonical representative of the conjugate pair
            if a2.imag < 0.0 or (a2.imag == 0.0 and a1.imag < 0.0):
                a1, a2 = a1.conjugate(), a2.conjugate()
            for m in range(3):
                for n in range(3 - m):
                    for part in ("re", "im"):
                        key = ("c", m, n, conj_key, part)
                        if key not in seen:
                            seen.add(key)
                            dictionary.append(
                                realize_complex_exp(1.0 + 0.0j, (m, n), a1, a2, part)
                            )
    basis = _nullspace_basis(model, mu, dictionary)
    return _verify(model, mu, basis, "exponential-ansatz")


# ---------------------------------------------------------------------------
# Type B


def _type_b_power_conditions(model: SurfaceModel, mu: float):
    """Coefficients of the three pure-power conditions P11, P12, P22."""
    C = model.coeff_array()
    rho_t = surface.ricci_symmetric(model, (1.0, 0.0))  # = rho_s tilde at x1=1
    p11 = np.array([-mu * rho_t[0, 0], -(1.0 + C[0, 0, 0]), 1.0])
    p12 = np.array([-mu * rho_t[0, 1], -C[0, 1, 0]])
    p22 = np.array([-mu * rho_t[1, 1], -C[1, 1, 0]])
    return p11, p12, p22


def _type_b_base_exponents(model: SurfaceModel, mu: float):
    """Real and complex candidate base exponents alpha for the power ladder.

    Any solution that is polynomial in x2 (and log x1) has an x2-leading
    coefficient proportional to (x1)^alpha with P11(alpha) = 0; the linear
    conditions P12/P22 constrain only x2-free pure powers and are enforced
    implicitly by the nullspace computation, so roots are not filtered here.
    Repeated roots are kept with multiplicity (they signal log companions).
    """
    p11, _, _ = _type_b_power_conditions(model, mu)
    real, cplx = [], []
    for r in _roots(p11):
        r = _snap_real(r)
        if r.imag == 0.0:
            real.append(r.real)
        else:
            cplx.append(r)
    return real, cplx


def solve_type_b(model: SurfaceModel, mu: float) -> SolutionBasis:
    if model.family != surface.TYPE_B:
        raise PreconditionError("solve_type_b needs a type B model")
    real, cplx = _type_b_base_exponents(model, mu)
    # log x1 companions arise only at resonance: a repeated base exponent or
    # two exponents separated by an integer step within the ladder depth
    resonant = any(
        abs(abs(a - b) - k) < 1e-6
        for idx, a in enumerate(real)
        for b in real[idx + 1 :]
        for k in (0, 1, 2)
    )
    dictionary: list[ClosedForm] = []
    seen = set()
    for alpha in real:
        for d in range(3):
            for i in range(3 - d):
                for j in range(2 if resonant else 1):
                    key = (round(alpha + d, 9), i, j)
                    if key in seen:
                        continue
                    seen.add(key)
                    cf = terms.const(1.0)
                    a = alpha + d
                    if a != 0.0:
                        cf = cf * power(1, a)
                    for _ in range(i):
                        cf = cf * coord(2)
                    if j:
                        cf = cf * logf(1)
                    dictionary.append(cf)
    basis = _nullspace_basis(model, mu, dictionary)
    flags = []
    for z in cplx:
        if z.imag < 0:
            continue  # conjugate handled with its partner
        for phase in (0.0, -math.pi / 2.0):
            cand = LogTrigForm(1.0, z.real, z.imag, phase)
            if surface.qe_residual(model, mu, cand) < RESIDUAL_TOL:
                basis.append(cand)
                flags.append("complex-indicial-pair")
    return _verify(model, mu, basis, "power-ansatz", flags=sorted(set(flags)))


# ---------------------------------------------------------------------------
# Type C


def solve_type_c(model: SurfaceModel, mu: float) -> SolutionBasis:
    if model.family not in (surface.SPHERE, surface.HYPERBOLIC_PLUS, surface.HYPERBOLIC_MINUS):
        raise PreconditionError("solve_type_c needs a curvature chart model")
    if abs(mu) < 1e-12:
        return _verify(model, mu, [terms.ONE], "registry-lookup")
    if abs(mu + 1.0) < 1e-12:
        if model.family == surface.SPHERE:
            basis = [
                terms.sinf(1, 1.0),
                terms.cosf(1, 1.0) * terms.cosf(2, 1.0),
                terms.cosf(1, 1.0) * terms.sinf(2, 1.0),
            ]
        else:
            sign = 1.0 if model.family == surface.HYPERBOLIC_PLUS else -1.0
            basis = [
                expf(1, 1.0),
                coord(2) * expf(1, 1.0),
                expf(1, -1.0) + sign * power(2, 2.0) * expf(1, 1.0),
            ]
        return _verify(model, mu, basis, "registry-lookup")
    return _verify(model, mu, [], "registry-lookup")


# ---------------------------------------------------------------------------
# Dispatch and special eigenvalues


def solve(model: SurfaceModel, mu: float) -> SolutionBasis:
    if model.family == surface.TYPE_A:
        return solve_type_a(model, mu)
    if model.family == surface.TYPE_B:
        return solve_type_b(model, mu)
    return solve_type_c(model, mu)


def eigenspace_dim(model: SurfaceModel, mu: float) -> int:
    return solve(model, mu).dim


@dataclass(frozen=True)
class SpecialMu:
    mu: float
    dim: int
    source: str
    note: str = ""


def special_eigenvalues(model: SurfaceModel) -> list[SpecialMu]:
    """Candidate eigenvalues with nontrivial solutions for a type B model."""
    if model.family != surface.TYPE_B:
        raise PreconditionError("special_eigenvalues expects a type B model")
    from .classify import normalize_type_b

    rho_s = surface.ricci_symmetric(model, (1.0, 0.0))
    if np.abs(rho_s).max() < 1e-12 and not surface.is_flat(model):
        raise PreconditionError("special_eigenvalues needs rho_s != 0")
    out: dict[float, SpecialMu] = {}

    def add(mu: float, source: str, note: str = ""):
        mu = float(mu)
        key = round(mu, 10)
        if key in out:
            return
        dim = solve_type_b(model, mu).dim
        out[key] = SpecialMu(mu=mu, dim=dim, source=source, note=note)

    add(0.0, "constants")
    add(-1.0, "projective")
    # critical eigenvalue where the indicial quadratic acquires a double root
    C = model.coeff_array()
    if abs(rho_s[0, 0]) > 1e-12:
        add(-((1.0 + C[0, 0, 0]) ** 2) / (4.0 * rho_s[0, 0]), "indicial-double-root")
    norm = normalize_type_b(model)
    Cn = norm.model.coeff_array()
    c221, c121 = Cn[1, 1, 0], Cn[0, 1, 0]
    if abs(abs(c221) - 1.0) < 1e-9 and abs(c121) < 1e-9:
        sgn = 1.0 if c221 > 0 else -1.0
        if abs(Cn[1, 1, 1] - 2.0 * sgn * Cn[0, 0, 1]) < 1e-9:
            delta = -Cn[0, 0, 0] + Cn[0, 1, 1] + 1.0
            if abs(delta) > 1e-9:
                mu = (
                    1.0
                    + 2.0 * Cn[0, 0, 1] ** 2
                    - (Cn[0, 0, 0] - Cn[0, 1, 1]) ** 2
                    + 2.0 * Cn[0, 1, 1]
                ) / delta ** 2
                add(mu, "normal-form")
            else:
                out[float("nan")] = SpecialMu(
                    mu=float("nan"), dim=0, source="normal-form", note="skipped: Delta = 0"
                )
    vals = [v for k, v in out.items() if not math.isnan(v.mu)]
    notes = [v for v in out.values() if math.isnan(v.mu)]
    return sorted(vals, key=lambda s: s.mu) + notes
