"""Shared numeric helpers for the test suite."""

import numpy as np

from qesurf import terms


def evaluation(funcs, pts) -> np.ndarray:
    """Matrix with rows indexed by points and columns by functions."""
    return np.array([[f.evaluate(tuple(p)) for f in funcs] for p in pts])


def containment_residual(span, funcs, domain: str) -> float:
    """Sup-norm misfit of least-squares projections of funcs onto span."""
    pts = terms.sample_points(domain, n=16, seed=11)
    if not funcs:
        return 0.0
    B = evaluation(funcs, pts)
    if not span:
        return float(np.abs(B).max())
    A = evaluation(span, pts)
    sol, *_ = np.linalg.lstsq(A, B, rcond=None)
    return float(np.abs(A @ sol - B).max() / max(1.0, np.abs(B).max()))


def mutual_span_residual(a, b, domain: str) -> float:
    """Largest misfit of either collection projected onto the other."""
    return max(
        containment_residual(list(a), list(b), domain),
        containment_residual(list(b), list(a), domain),
    )
