"""Deformed cotangent-bundle metrics over affine surface charts.

Given a surface chart with connection coefficients Gamma and a symmetric
2-tensor phi, the cotangent bundle T*M carries the neutral-signature metric

    g(d_xi, d_xj) = phi_ij(x) - 2 y_k Gamma_ij^k(x),
    g(d_xi, d_yj) = delta_ij,    g(d_yi, d_yj) = 0,

in coordinates (x1, x2, y1, y2).  A positive eigenfunction f of the surface
operator with eigenvalue mu != 0 pulls back to h = -(2/mu) log f, and the
4-dimensional identity

    Hess(h) + Ric - (mu/2) dh (x) dh = 0,     |dh|_g = 0

holds exactly; `verify_isotropic_qe` checks it numerically.  When the base
chart carries a parallel complex structure J with J d_x1 = d_x2, the induced
almost-Hermitian structure on T*M is

    J4 d_x1 =  d_x2 - g12 d_y1 + (g11 - g22)/2 d_y2,
    J4 d_x2 = -d_x1 + (g11 - g22)/2 d_y1 + g12 d_y2,
    J4 d_y1 =  d_y2,    J4 d_y2 = -d_y1,

and `walker_kahler_check` measures J4^2 + Id and the covariant derivative of
J4.  All 4-dimensional geometry is computed by Richardson-extrapolated central
differences; the metric itself is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import surface, terms
from .errors import PreconditionError, SolverError
from .surface import SurfaceModel

_H_METRIC = 1e-4  # step for metric derivatives (Christoffels)
_H_GAMMA = 1e-3  # coarser step for Christoffel derivatives (Ricci)
_QE_GATE = 1e-9  # base eigenfunction residual required on entry
_Y_GRID = (-0.5, 0.4)


def _zero_phi(p) -> np.ndarray:
    return np.zeros((2, 2))


def ricci_phi(base: SurfaceModel) -> Callable:
    """phi = symmetric Ricci of the base chart."""

    def phi(p):
        return surface.ricci_symmetric(base, p)

    return phi


def _resolve_phi(base: SurfaceModel, phi) -> tuple[Callable, str]:
    if phi is None or (isinstance(phi, str) and phi == "zero"):
        return _zero_phi, "zero"
    if isinstance(phi, str):
        if phi == "ricci":
            return ricci_phi(base), "ricci"
        raise PreconditionError(f"unknown phi specification {phi!r}")
    if isinstance(phi, np.ndarray) or isinstance(phi, (list, tuple)):
        mat = np.asarray(phi, dtype=float)
        if mat.shape != (2, 2) or abs(mat[0, 1] - mat[1, 0]) > 1e-12:
            raise PreconditionError("constant phi must be a symmetric 2x2 matrix")
        return (lambda p, _m=mat: _m), "constant"
    return phi, "custom"


@dataclass(frozen=True)
class ExtensionMetric:
    base: SurfaceModel
    phi: Callable = _zero_phi
    phi_name: str = "zero"

    def evaluate(self, point) -> np.ndarray:
        """4x4 metric at (x1, x2, y1, y2)."""
        x = (float(point[0]), float(point[1]))
        y = np.array([float(point[2]), float(point[3])])
        gamma = self.base.christoffel(x)
        block = np.asarray(self.phi(x), dtype=float) - 2.0 * np.einsum(
            "k,ijk->ij", y, gamma
        )
        g = np.zeros((4, 4))
        g[:2, :2] = 0.5 * (block + block.T)
        g[:2, 2:] = np.eye(2)
        g[2:, :2] = np.eye(2)
        return g


def build_extension(base: SurfaceModel, phi=None) -> ExtensionMetric:
    fn, name = _resolve_phi(base, phi)
    return ExtensionMetric(base=base, phi=fn, phi_name=name)


# ---------------------------------------------------------------------------
# Numeric 4-dimensional geometry


def _richardson(diff, h: float):
    """Central difference with one Richardson step: (4 D(h) - D(2h)) / 3."""
    return (4.0 * diff(h) - diff(2.0 * h)) / 3.0


def _metric_gradient(metric: ExtensionMetric, p, h: float) -> np.ndarray:
    """dg[a, i, j] = d_a g_ij via Richardson-extrapolated central differences."""
    p = np.asarray(p, dtype=float)
    out = np.zeros((4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = 1.0

        def diff(step, e=e):
            return (metric.evaluate(p + step * e) - metric.evaluate(p - step * e)) / (
                2.0 * step
            )

        out[a] = _richardson(diff, h)
    return out


def christoffel_4d(metric: ExtensionMetric, p, h: float = _H_METRIC) -> np.ndarray:
    g = metric.evaluate(p)
    det = abs(np.linalg.det(g))
    if det < 1e-10:
        raise SolverError(f"extension metric nearly singular at {tuple(p)}")
    ginv = np.linalg.inv(g)
    dg = _metric_gradient(metric, p, h)
    # Gamma_ij^k = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    sym = dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg  # [l, i, j]
    return 0.5 * np.einsum("kl,lij->ijk", ginv, sym)


@dataclass(frozen=True)
class Geometry4D:
    point: tuple
    metric: np.ndarray
    christoffel: np.ndarray  # Gamma[i, j, k] = Gamma_ij^k
    ricci: np.ndarray

    def hessian(self, grad_base, hess_base) -> np.ndarray:
        """Hessian of a pulled-back base scalar with the given base jets.

        grad_base: (dh/dx1, dh/dx2); hess_base: 2x2 of second x-derivatives.
        The pulled-back scalar has no y-dependence, so its 4d gradient is
        (grad_base, 0, 0) and the coordinate Hessian lives in the x-block.
        """
        dh = np.zeros(4)
        dh[:2] = np.asarray(grad_base, dtype=float)
        ddh = np.zeros((4, 4))
        ddh[:2, :2] = np.asarray(hess_base, dtype=float)
        return ddh - np.einsum("ijk,k->ij", self.christoffel, dh)


def geometry_4d(metric: ExtensionMetric, point, h: float = _H_METRIC) -> Geometry4D:
    p = np.asarray(point, dtype=float)
    g = metric.evaluate(p)
    gamma = christoffel_4d(metric, p, h)
    # dGamma[a, i, j, k] = d_a Gamma_ij^k with a coarser outer step
    dgamma = np.zeros((4, 4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = 1.0

        def diff(step, e=e):
            return (
                christoffel_4d(metric, p + step * e, h)
                - christoffel_4d(metric, p - step * e, h)
            ) / (2.0 * step)

        dgamma[a] = _richardson(diff, _H_GAMMA)
    # Ric_jk = d_a Gamma_jk^a - d_j Gamma_ak^a + G_ab^a G_jk^b - G_jb^a G_ak^b
    ricci = (
        np.einsum("ajka->jk", dgamma)
        - np.einsum("jaka->jk", dgamma)
        + np.einsum("aba,jkb->jk", gamma, gamma)
        - np.einsum("jba,akb->jk", gamma, gamma)
    )
    return Geometry4D(point=tuple(float(v) for v in p), metric=g, christoffel=gamma, ricci=ricci)


# ---------------------------------------------------------------------------
# Sample set


def sample_points_4d(base: SurfaceModel) -> list[tuple]:
    pts = surface.standard_points(base)
    base_pts = [pts[1], pts[4]] if len(pts) > 4 else pts[:2]
    out = []
    for bp in base_pts:
        for y1 in _Y_GRID:
            for y2 in _Y_GRID:
                out.append((bp[0], bp[1], y1, y2))
    return out


# ---------------------------------------------------------------------------
# Isotropic quasi-Einstein verification


@dataclass(frozen=True)
class IsotropicCheck:
    mu: float
    residual_qe: float
    residual_null: float
    lam: float = 0.0
    points: tuple = ()


def _log_jets(f: terms.ClosedForm, p) -> tuple[np.ndarray, np.ndarray, float]:
    """Value-normalized jets of log f at a base point: (d log f, Hess log f, f)."""
    v = f.evaluate(p)
    d1 = f.differentiate(1)
    d2 = f.differentiate(2)
    grad = np.array([d1.evaluate(p), d2.evaluate(p)])
    hess = np.array(
        [
            [d1.differentiate(1).evaluate(p), d1.differentiate(2).evaluate(p)],
            [d2.differentiate(1).evaluate(p), d2.differentiate(2).evaluate(p)],
        ]
    )
    dlog = grad / v
    hlog = hess / v - np.outer(dlog, dlog)
    return dlog, hlog, v


def verify_isotropic_qe(
    metric: ExtensionMetric, f: terms.ClosedForm, mu: float, h=None
) -> IsotropicCheck:
    """Check Hess(h) + Ric - (mu/2) dh (x) dh = 0 and |dh|_g = 0 on T*M.

    For mu != 0 the potential is h = -(2/mu) log f with f a positive
    eigenfunction.  For mu = 0 the substitution degenerates and the caller
    supplies h directly (f is then only required to lie in E(0), i.e. be
    constant); omitting h means h = 0.
    """
    base = metric.base
    if abs(mu) > 1e-14:
        res = surface.qe_residual(base, mu, f)
        if res > _QE_GATE:
            raise PreconditionError(
                f"f is not an eigenfunction for mu={mu}: residual {res:.2e}"
            )
    pts = sample_points_4d(base)
    worst_qe = 0.0
    worst_null = 0.0
    for pt in pts:
        bp = (pt[0], pt[1])
        if abs(mu) > 1e-14:
            dlog, hlog, val = _log_jets(f, bp)
            if val <= 0.0:
                raise PreconditionError(f"f must be positive on samples; f{bp} = {val}")
            dh = -(2.0 / mu) * dlog
            ddh = -(2.0 / mu) * hlog
        elif h is not None:
            d1 = h.differentiate(1)
            d2 = h.differentiate(2)
            dh = np.array([d1.evaluate(bp), d2.evaluate(bp)])
            ddh = np.array(
                [
                    [d1.differentiate(1).evaluate(bp), d1.differentiate(2).evaluate(bp)],
                    [d2.differentiate(1).evaluate(bp), d2.differentiate(2).evaluate(bp)],
                ]
            )
        else:
            dh = np.zeros(2)
            ddh = np.zeros((2, 2))
        geo = geometry_4d(metric, pt)
        hess4 = geo.hessian(dh, ddh)
        dh4 = np.zeros(4)
        dh4[:2] = dh
        tensor = hess4 + geo.ricci - 0.5 * mu * np.outer(dh4, dh4)
        worst_qe = max(worst_qe, float(np.abs(tensor).max()))
        ginv = np.linalg.inv(geo.metric)
        worst_null = max(worst_null, abs(float(dh4 @ ginv @ dh4)))
    return IsotropicCheck(
        mu=float(mu),
        residual_qe=worst_qe,
        residual_null=worst_null,
        points=tuple(pts),
    )


# ---------------------------------------------------------------------------
# Walker complex structure


def _j4_at(metric: ExtensionMetric, p) -> np.ndarray:
    g = metric.evaluate(p)
    g11, g12, g22 = g[0, 0], g[0, 1], g[1, 1]
    half = 0.5 * (g11 - g22)
    J = np.zeros((4, 4))
    # columns are the images of d_x1, d_x2, d_y1, d_y2
    J[:, 0] = (0.0, 1.0, -g12, half)
    J[:, 1] = (-1.0, 0.0, half, g12)
    J[:, 2] = (0.0, 0.0, 0.0, 1.0)
    J[:, 3] = (0.0, 0.0, -1.0, 0.0)
    return J


def walker_kahler_check(metric: ExtensionMetric, J_base=None) -> tuple[float, float]:
    """(max |nabla J4|, max |J4^2 + Id|) over the 4-dimensional sample set."""
    if J_base is None:
        J_base = surface.kahler_structure(metric.base)
    if J_base is None:
        raise PreconditionError("base chart has no parallel complex structure")
    J_base = np.asarray(J_base, dtype=float)
    # the bundle structure assumes the chart is aligned so that J d_x1 = d_x2
    if np.abs(J_base[:, 0] - np.array([0.0, 1.0])).max() > 1e-9:
        if np.abs(J_base[:, 0] + np.array([0.0, 1.0])).max() < 1e-9:
            J_base = -J_base
        else:
            raise PreconditionError(
                "base complex structure is not aligned with the chart "
                "(need J d_x1 = d_x2)"
            )
    worst_nabla = 0.0
    worst_square = 0.0
    for pt in sample_points_4d(metric.base):
        p = np.asarray(pt, dtype=float)
        geo = geometry_4d(metric, pt)
        J = _j4_at(metric, p)
        worst_square = max(worst_square, float(np.abs(J @ J + np.eye(4)).max()))
        dJ = np.zeros((4, 4, 4))
        for a in range(4):
            e = np.zeros(4)
            e[a] = 1.0

            def diff(step, e=e):
                return (_j4_at(metric, p + step * e) - _j4_at(metric, p - step * e)) / (
                    2.0 * step
                )

            dJ[a] = _richardson(diff, _H_METRIC)
        # (nabla_a J)^i_j = d_a J^i_j + G_am^i J^m_j - G_aj^m J^i_m
        nab = (
            dJ
            + np.einsum("ami,mj->aij", geo.christoffel, J)
            - np.einsum("ajm,im->aij", geo.christoffel, J)
        )
        worst_nabla = max(worst_nabla, float(np.abs(nab).max()))
    return worst_nabla, worst_square
