"""Acceptance suite: the end-to-end guarantees of the package.

1. Registry residual suite - every stated (model, mu, basis) triple solves
   the equation below 1e-9 and has full numeric rank (>= 40 triples).
2. Solver equivalence - the solvers reproduce every stated eigenspace,
   including double-root log companions and critical eigenvalues.
3. Global structure - eigenspace dimensions obey the dimension-3 bound,
   the projective-dimension dichotomy, and the rank-2 rigidity statement.
4. Killing-dimension table - exact integer symmetry dimensions, including
   the two parameter values where the dimension jumps.
5. Invariant geometry - (psi, Psi) values, the invariant line, and the
   separation of the rank-2 sub-cases.
6. Extension pipeline - designated cotangent-bundle checks with residual
   gates 1e-5 (identity) and 1e-8 (null gradient).
7. Properties - differentiation-order, change-of-coordinates invariance,
   closure under symmetries, and fault injection.
"""

import dataclasses
import math

import numpy as np
import pytest

from conftest import containment_residual, mutual_span_residual
from qesurf import classify, extension, killing, registry, solver, surface, terms, verify
from qesurf.terms import coord, expf, power

ENTRIES = registry.entries()
PROBE_MUS = (-2.0, -0.5, 0.5, 1.0, 3.0)


# ---------------------------------------------------------------------------
# 1. registry residual suite


def test_c1_registry_triples_pass_residual_and_rank_gates():
    triples = registry.triples()
    assert len(triples) >= 40
    for entry in ENTRIES:
        for exp in entry.expected:
            worst = max(surface.qe_residual(entry.model, exp.mu, f) for f in exp.basis)
            assert worst < 1e-9, f"{entry.label} mu={exp.mu}: residual {worst:.3e}"
            rank = terms.robust_rank(list(exp.basis), entry.model.domain)
            assert rank == len(exp.basis), f"{entry.label} mu={exp.mu}: rank {rank}"


# ---------------------------------------------------------------------------
# 2. solver equivalence


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.label)
def test_c2_solver_reproduces_registry_eigenspaces(entry):
    for exp in entry.expected:
        sb = solver.solve(entry.model, exp.mu)
        if exp.complete:
            assert sb.dim == len(exp.basis), f"mu={exp.mu}: dim {sb.dim} != {len(exp.basis)}"
            r = mutual_span_residual(sb.basis, list(exp.basis), entry.model.domain)
        else:
            r = containment_residual(sb.basis, list(exp.basis), entry.model.domain)
        assert r < 1e-6, f"mu={exp.mu}: span misfit {r:.3e}"


@pytest.mark.parametrize("c", [1.0, 2.0])
def test_c2_critical_double_root_eigenvalues(c):
    mu0 = -((1.0 + 2.0 * c) ** 2) / (4.0 * c * (1.0 + c))
    entry = registry.get(f"M2:c={c:g}")
    assert any(abs(exp.mu - mu0) < 1e-12 for exp in entry.expected)
    sb = solver.solve(entry.model, mu0)
    assert sb.dim == 2
    want = [expf(2, c + 0.5), coord(2) * expf(2, c + 0.5)]
    assert mutual_span_residual(sb.basis, want, entry.model.domain) < 1e-6


def test_c2_log_companion_entries_present():
    """The registry exercises the resonant (log companion) branch."""
    crit = [
        (label, exp)
        for label in ("Z1:k=1/3", "Z2:k=1/2,t=2")
        for exp in registry.get(label).expected
        if "log companion" in exp.cite
    ]
    assert len(crit) >= 2
    for label, exp in crit:
        has_log = any(
            f.log_power > 0 for cf in exp.basis for t in cf.terms for f in t.factors
        )
        assert has_log


# ---------------------------------------------------------------------------
# 3. global structure


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.label)
def test_c3_global_dimension_theorems(entry):
    model = entry.model
    dims = {mu: solver.eigenspace_dim(model, mu) for mu in (-1.0, 0.0) + PROBE_MUS}
    assert max(dims.values()) <= 3
    if surface.is_flat(model):
        return
    spf = surface.is_strongly_projectively_flat(model)
    assert dims[-1.0] != 2, "non-flat model with 2-dim projective eigenspace"
    assert (dims[-1.0] == 3) == spf
    rho = surface.ricci_symmetric(model, surface.standard_points(model)[0])
    if spf and abs(np.linalg.det(rho)) > 1e-10:
        assert dims[0.0] == 1
        assert all(dims[mu] == 0 for mu in PROBE_MUS)


# ---------------------------------------------------------------------------
# 4. Killing-dimension table


KILLING_TABLE = {
    6: ["A0", "A1", "A2", "A3", "A4", "A5", "B0", "B1", "B2", "B3", "B4", "B5", "B6"],
    4: ["M1", "M2:c=1", "M2:c=2", "M3:c=1", "M4:c=1", "M5:c=1",
        "Z1:k=1/3", "Z2:k=1/2,t=2", "Z3:k=1"],
    3: ["N1+", "N1-", "N2:c=1", "N3", "N4", "S2", "H2+", "H2-",
        "P0+:c=3/sqrt2", "Bpair+:c=-3/2"],
    2: ["Q:c=1", "P0+:c=1", "P0-:c=1", "Bspf+:c=1/2", "Bspf-:c=1/2",
        "Bdim1:line", "Bdim1:normal+", "Bcrit+:c=1/2", "Bpair+:c=1",
        "L1:c=2", "L2", "L3", "A02:u=2,v=0", "A20:u=1,v=1", "A11:u=1,w=2", "KS:c=1"],
}


def test_c4_killing_dimension_table_is_exact():
    for dim, labels in KILLING_TABLE.items():
        for label in labels:
            entry = registry.get(label)
            assert entry.killing_dim == dim, f"{label}: registry states {entry.killing_dim}"
            got = killing.killing_dimension(entry.model)
            assert got == dim, f"{label}: computed {got} != {dim}"
    # the table covers the whole registry
    tabulated = {label for labels in KILLING_TABLE.values() for label in labels}
    assert tabulated == set(registry.labels())


def test_c4_exceptional_parameters_jump():
    assert killing.killing_dimension(
        registry.family_model("P0+", c=3.0 / math.sqrt(2.0))
    ) == 3
    assert killing.killing_dimension(registry.family_model("Bpair+", c=-1.5)) == 3


# ---------------------------------------------------------------------------
# 5. invariant geometry


def _step_family(c: float):
    return surface.type_a_model(
        {"111": 1.0 - c, "112": -c, "121": c, "122": c, "221": 1.0 - c, "222": 2.0 - c}
    )


def test_c5_anchor_invariants():
    sig = classify.invariants(registry.get("L2").model)
    assert abs(sig.psi - 7.0) < 1e-9 and abs(sig.Psi - 10.0) < 1e-9


@pytest.mark.parametrize("c", [1.0, -1.0, 2.0, -2.0])
def test_c5_parametrized_family_traces_the_line(c):
    sig = classify.invariants(_step_family(c))
    assert abs(sig.psi - (7.0 - 1.0 / c)) < 1e-9
    assert abs(sig.Psi - (10.0 - 4.0 / c)) < 1e-9
    assert classify.on_line_L(sig.psi, sig.Psi, tol=1e-8)


def _uv_model(u: float, v: float):
    return surface.type_a_model({"111": u + 1.0 / u, "122": u, "221": u, "222": v})


def test_c5_line_membership_on_the_circle():
    t = 0.5
    sig = classify.invariants(_uv_model(math.cos(t), 2.0 * math.sin(t)))
    assert classify.on_line_L(sig.psi, sig.Psi, tol=1e-8)


@pytest.mark.parametrize("uv", [(2.0, 0.0), (0.5, 1.0), (1.0, 3.0)])
def test_c5_line_membership_separates_subcases(uv):
    u, v = uv
    model = _uv_model(u, v)
    sig = classify.invariants(model)
    on_l = classify.on_line_L(sig.psi, sig.Psi, tol=1e-8)
    sb = solver.solve(model, -1.0)
    assert sb.dim == 3
    singular = abs(u - 1.0) < 1e-12 or abs(4.0 * u * u + v * v - 4.0) < 1e-12
    assert on_l == singular
    if not singular:
        # three undressed exponentials (real or conjugate-pair): no factor
        # carries a polynomial or logarithmic dressing
        for cf in sb.basis:
            for term in cf.terms:
                for f in term.factors:
                    assert f.power == 0.0 and f.log_power == 0


# ---------------------------------------------------------------------------
# 6. extension pipeline


EXTENSION_CASES = [
    ("N4", -1.0, power(1, -1.0), False),
    ("M1", 3.0, expf(2, 3.0), False),
    ("KS:c=1", 3.0, power(1, 3.0), True),
]


@pytest.mark.parametrize("label,mu,f,walker", EXTENSION_CASES, ids=lambda v: str(v))
def test_c6_extension_pipeline(label, mu, f, walker):
    model = registry.get(label).model
    em = extension.build_extension(model)
    chk = extension.verify_isotropic_qe(em, f, mu)
    assert chk.residual_qe < 1e-5
    assert chk.residual_null < 1e-8
    if walker:
        nab, sq = extension.walker_kahler_check(em)
        assert nab < 1e-5 and sq < 1e-5


def test_c6_registry_declares_the_extension_cases():
    declared = {
        (e.label, case.mu, case.walker) for e in ENTRIES for case in e.extension
    }
    assert {("N4", -1.0, False), ("M1", 3.0, False), ("KS:c=1", 3.0, True)} <= declared


# ---------------------------------------------------------------------------
# 7. property tests


def test_c7_richardson_step_improves_second_order_differences():
    x0 = 0.7

    def diff(h):
        return (math.sin(x0 + h) - math.sin(x0 - h)) / (2.0 * h)

    exact = math.cos(x0)
    plain = {h: abs(diff(h) - exact) for h in (2e-3, 1e-3)}
    ratio = plain[2e-3] / plain[1e-3]
    assert 3.5 < ratio < 4.5  # plain central differences are O(h^2)
    rich = abs(extension._richardson(diff, 1e-3) - exact)
    assert rich < 1e-10
    assert rich < 1e-3 * plain[1e-3]


def test_c7_invariants_are_coordinate_independent():
    rng = np.random.default_rng(20240817)
    models = [registry.get("L2").model, registry.get("A11:u=1,w=2").model]
    for model in models:
        base = classify.invariants(model)
        changes = 0
        while changes < 5:
            A = rng.uniform(-2.0, 2.0, size=(2, 2))
            if abs(np.linalg.det(A)) < 0.3:
                continue
            changes += 1
            sig = classify.invariants(classify.transform_type_a(model, A))
            assert abs(sig.psi - base.psi) <= 1e-8 * max(1.0, abs(base.psi))
            assert abs(sig.Psi - base.Psi) <= 1e-8 * max(1.0, abs(base.Psi))


def test_c7_full_plane_eigenspaces_close_under_translations():
    """For translation-invariant models the coordinate derivatives of any
    solution are again solutions, so each stated basis spans a module over
    the symmetry generators."""
    for entry in ENTRIES:
        if entry.model.family != surface.TYPE_A:
            continue
        for exp in entry.expected:
            if not exp.complete:
                continue
            span = list(exp.basis)
            derived = [f.differentiate(axis) for f in span for axis in (1, 2)]
            derived = [g for g in derived if not g.is_zero()]
            r = containment_residual(span, derived, entry.model.domain)
            assert r < 1e-8, f"{entry.label} mu={exp.mu}: closure misfit {r:.3e}"


def test_c7_fault_injection_is_detected():
    """Meta-test: a perturbed basis must make the verification suite fail."""
    e = registry.get("M1")
    exp = e.expected[0]
    bad_exp = dataclasses.replace(exp, basis=(exp.basis[0] + 0.1 * coord(1),) + exp.basis[1:])
    bad = dataclasses.replace(e, expected=(bad_exp,) + e.expected[1:])
    report = verify.verify_paper(entries=[bad])
    assert not report.ok
    names = {c.name for entry in report.entries for c in entry.checks if not c.ok}
    assert any(n.startswith("registry-residual") for n in names)
    assert verify.verify_paper(entries=[e]).ok  # control
