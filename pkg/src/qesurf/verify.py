"""End-to-end verification of the registry against the independent machinery.

For every registry entry this module re-derives everything that the entry
asserts, using code paths that do not share the registry's closed-form data:

* ``registry-residual``  — each stated basis element against the operator;
* ``solver-span``        — the solver's eigenspace and the stated basis
  span each other (mutual containment, plus equal dimension when the
  stated basis is marked complete);
* ``killing-dim``        — jet-prolongation Killing dimension;
* ``classify``           — the classifier recovers the expected family;
* ``invariants``         — recorded scalar-invariant values (psi, Psi,
  scaled Ricci entries, line membership);
* ``global-*``           — structural theorems: eigenspaces never exceed
  dimension 3; for non-flat models the projective eigenspace is never
  2-dimensional and is 3-dimensional exactly for the strongly projectively
  flat ones; strongly projectively flat models with rank-2 Ricci admit only
  constants at eigenvalue 0 and nothing away from {-1, 0};
* ``extension-*``        — designated cotangent-bundle checks (isotropic
  identity, null gradient, parallel complex structure).

The report serializes to the stable JSON shape
``{"entries": [{"label", "checks": [{"name", "pass", "residual", "cite"}]}],
"summary": {...}}``.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field

import numpy as np

from . import classify, extension, killing, registry, solver, surface, terms
from .registry import RegistryEntry

__all__ = ["Check", "EntryReport", "Report", "verify_entry", "verify_paper"]

_PROBE_MUS = (-2.0, -0.5, 0.5, 1.0, 3.0)
_SPAN_TOL = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    residual: float | None = None
    cite: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.ok),
            "residual": None if self.residual is None else float(self.residual),
            "cite": self.cite,
        }


@dataclass
class EntryReport:
    label: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"label": self.label, "checks": [c.to_dict() for c in self.checks]}


@dataclass
class Report:
    entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_dict(self) -> dict:
        checks = sum(len(e.checks) for e in self.entries)
        failed = sum(1 for e in self.entries for c in e.checks if not c.ok)
        return {
            "entries": [e.to_dict() for e in self.entries],
            "summary": {
                "entries": len(self.entries),
                "checks": checks,
                "passed": checks - failed,
                "failed": failed,
                "ok": self.ok,
                "warnings": list(self.warnings),
            },
        }


# ---------------------------------------------------------------------------
# span comparison


def _evaluation_matrix(funcs, points) -> np.ndarray:
    return np.array([[f.evaluate(p) for f in funcs] for p in points])


def _containment_residual(span, funcs, domain) -> float:
    """sup-norm misfit of least-squares projections of funcs onto span."""
    pts = terms.sample_points(domain, n=16, seed=3)
    if not funcs:
        return 0.0
    B = _evaluation_matrix(funcs, pts)
    if not span:
        return float(np.abs(B).max())
    A = _evaluation_matrix(span, pts)
    sol, *_ = np.linalg.lstsq(A, B, rcond=None)
    resid = A @ sol - B
    scale = max(1.0, float(np.abs(B).max()))
    return float(np.abs(resid).max() / scale)


# ---------------------------------------------------------------------------
# per-entry checks


def _check_expected(entry: RegistryEntry) -> list:
    checks = []
    for exp in entry.expected:
        r = max(surface.qe_residual(entry.model, exp.mu, f) for f in exp.basis)
        checks.append(
            Check(f"registry-residual[mu={exp.mu:.6g}]", r < registry._RESIDUAL_GATE, r, exp.cite)
        )
        try:
            sb = solver.solve(entry.model, exp.mu)
        except Exception as exc:  # a solver failure is a finding, not a crash
            checks.append(Check(f"solver-span[mu={exp.mu:.6g}]", False, None, f"solver error: {exc}"))
            continue
        fwd = _containment_residual(sb.basis, list(exp.basis), entry.model.domain)
        r = fwd
        ok = fwd < _SPAN_TOL
        if exp.complete:
            back = _containment_residual(list(exp.basis), sb.basis, entry.model.domain)
            r = max(fwd, back)
            ok = r < _SPAN_TOL and sb.dim == len(exp.basis)
        checks.append(Check(f"solver-span[mu={exp.mu:.6g}]", ok, r, exp.cite))
    return checks


def _check_killing(entry: RegistryEntry) -> Check:
    kd = killing.killing_dimension(entry.model)
    return Check(
        "killing-dim",
        kd == entry.killing_dim,
        float(abs(kd - entry.killing_dim)),
        f"affine symmetry dimension {entry.killing_dim}",
    )


def _check_classify(entry: RegistryEntry) -> Check | None:
    if entry.classify_family is None:
        return None
    fam = classify.classify(entry.model).family
    return Check(
        "classify",
        fam == entry.classify_family,
        None,
        f"normal-form family {entry.classify_family} (got {fam})",
    )


def _check_invariants(entry: RegistryEntry) -> list:
    checks = []
    inv = entry.invariants
    if not inv:
        return checks
    sig = classify.invariants(entry.model)
    if "psi" in inv:
        r = abs(sig.psi - inv["psi"]) + abs(sig.Psi - inv["Psi"])
        checks.append(Check("invariants[psi,Psi]", r < 1e-9, r, "complete rank-2 invariants"))
    if "on_line_L" in inv:
        got = classify.on_line_L(sig.psi, sig.Psi, tol=1e-8)
        checks.append(
            Check("invariants[line-L]", got == inv["on_line_L"], None,
                  "membership in the double-root invariant line")
        )
    if "rho_tilde_11" in inv:
        rt = surface.ricci_symmetric(entry.model, (1.0, 0.0))[0, 0]
        r = abs(rt - inv["rho_tilde_11"])
        checks.append(Check("invariants[rho11]", r < 1e-9, r, "scaled Ricci component"))
    if "rho_tilde" in inv:
        want = np.asarray(inv["rho_tilde"], dtype=float)
        got = surface.ricci(entry.model, (1.0, 0.0))
        r = float(np.abs(got - want).max())
        checks.append(Check("invariants[rho]", r < 1e-9, r, "scaled Ricci tensor"))
    return checks


def _check_global(entry: RegistryEntry) -> list:
    """Structural theorems evaluated with the solver alone."""
    checks = []
    model = entry.model
    dims = {}
    for mu in (-1.0, 0.0) + _PROBE_MUS:
        try:
            dims[mu] = solver.eigenspace_dim(model, mu)
        except Exception as exc:
            checks.append(Check(f"global-dim[mu={mu:.6g}]", False, None, f"solver error: {exc}"))
            return checks
    worst = max(dims.values())
    checks.append(
        Check("global-dim-bound", worst <= 3, float(worst),
              "eigenspaces of the quasi-Einstein operator have dimension at most 3")
    )
    if not surface.is_flat(model):
        d1 = dims[-1.0]
        spf = surface.is_strongly_projectively_flat(model)
        checks.append(
            Check("global-projective-dim", d1 != 2, float(d1),
                  "non-flat models never have a 2-dim projective eigenspace")
        )
        checks.append(
            Check("global-projective-spf", (d1 == 3) == spf, float(d1),
                  "3-dim projective eigenspace exactly for strong projective flatness")
        )
        rho = surface.ricci_symmetric(model, surface.standard_points(model)[0])
        if spf and abs(np.linalg.det(rho)) > 1e-10:
            ok = dims[0.0] == 1 and all(dims[mu] == 0 for mu in _PROBE_MUS)
            checks.append(
                Check("global-spf-rank2", ok, None,
                      "strongly projectively flat rank-2 models solve only at -1 and 0")
            )
    return checks


def _check_extension(entry: RegistryEntry) -> list:
    checks = []
    for case in entry.extension:
        em = extension.build_extension(entry.model)
        chk = extension.verify_isotropic_qe(em, case.f, case.mu)
        checks.append(
            Check(f"extension-qe[mu={case.mu:.6g}]", chk.residual_qe < 1e-5, chk.residual_qe,
                  "isotropic quasi-Einstein identity on the cotangent extension")
        )
        checks.append(
            Check(f"extension-null[mu={case.mu:.6g}]", chk.residual_null < 1e-8, chk.residual_null,
                  "null gradient of the pulled-back potential")
        )
        if case.walker:
            nab, sq = extension.walker_kahler_check(em)
            r = max(nab, sq)
            checks.append(
                Check("extension-kahler", r < 1e-5, r,
                      "parallel complex structure on the cotangent extension")
            )
    return checks


def verify_entry(entry: RegistryEntry) -> EntryReport:
    rep = EntryReport(label=entry.label)
    rep.checks.extend(_check_expected(entry))
    rep.checks.append(_check_killing(entry))
    c = _check_classify(entry)
    if c is not None:
        rep.checks.append(c)
    rep.checks.extend(_check_invariants(entry))
    rep.checks.extend(_check_global(entry))
    rep.checks.extend(_check_extension(entry))
    return rep


def _matches(label: str, pattern: str) -> bool:
    return fnmatch.fnmatchcase(label, pattern) or pattern in label


def verify_paper(only=None, entries=None) -> Report:
    """Verify registry entries; ``only`` filters labels by glob patterns.

    Entries are processed in label order so the report is stable.
    """
    pool = list(entries) if entries is not None else list(registry.entries())
    if only is not None:
        wanted = [only] if isinstance(only, str) else list(only)
        pool = [e for e in pool if any(_matches(e.label, w) for w in wanted)]
    pool.sort(key=lambda e: e.label)
    report = Report()
    if not pool:
        report.warnings.append("no registry entries matched the filter; nothing was verified")
        return report
    for e in pool:
        report.entries.append(verify_entry(e))
    return report
