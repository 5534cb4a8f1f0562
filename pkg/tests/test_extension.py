"""Tests for the cotangent-bundle extension metrics and their geometry."""

import math

import numpy as np
import pytest

from qesurf import extension, surface, terms
from qesurf.errors import PreconditionError
from qesurf.extension import (
    build_extension,
    geometry_4d,
    sample_points_4d,
    verify_isotropic_qe,
    walker_kahler_check,
)
from qesurf.surface import type_a_model, type_b_model


def m1_model():
    return type_a_model({"111": -1.0, "121": 1.0, "222": 2.0})


def n4_model():
    return type_b_model({"111": -1.0, "122": -1.0, "221": 1.0})


def kahler_family(c: float):
    return type_b_model({"111": c, "122": c, "221": -c})


# ---------------------------------------------------------------------------
# Independent finite-difference oracle (no Richardson extrapolation)


def fd_christoffel(metric, p, h):
    p = np.asarray(p, dtype=float)
    g = metric.evaluate(p)
    ginv = np.linalg.inv(g)
    dg = np.zeros((4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        dg[a] = (metric.evaluate(p + e) - metric.evaluate(p - e)) / (2 * h)
    out = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                acc = 0.0
                for l in range(4):
                    acc += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                out[i, j, k] = 0.5 * acc
    return out


def fd_ricci(metric, p, h):
    p = np.asarray(p, dtype=float)
    gamma = fd_christoffel(metric, p, h)
    dgamma = np.zeros((4, 4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        dgamma[a] = (fd_christoffel(metric, p + e, h) - fd_christoffel(metric, p - e, h)) / (2 * h)
    ric = np.zeros((4, 4))
    for j in range(4):
        for k in range(4):
            acc = 0.0
            for a in range(4):
                acc += dgamma[a][j, k, a] - dgamma[j][a, k, a]
                for b in range(4):
                    acc += gamma[a, b, a] * gamma[j, k, b] - gamma[j, b, a] * gamma[a, k, b]
            ric[j, k] = acc
    return ric


# ---------------------------------------------------------------------------
# Metric construction


class TestBuildExtension:
    def test_flat_base_constant_blocks(self):
        g = build_extension(type_a_model({})).evaluate((0.3, -0.7, 1.2, 0.4))
        want = np.zeros((4, 4))
        want[:2, 2:] = np.eye(2)
        want[2:, :2] = np.eye(2)
        assert np.abs(g - want).max() == 0.0

    def test_linear_coefficient_block(self):
        # g11 = -2 y1 Gamma_11^1 = 2 at y = (1, 0)
        g = build_extension(m1_model()).evaluate((0.0, 0.0, 1.0, 0.0))
        assert g[0, 0] == pytest.approx(2.0)

    def test_phi_shows_up_at_y_zero(self):
        base = n4_model()
        em = build_extension(base, "ricci")
        g = em.evaluate((1.0, 0.0, 0.0, 0.0))
        phi = surface.ricci_symmetric(base, (1.0, 0.0))
        assert np.abs(g[:2, :2] - phi).max() < 1e-12

    def test_neutral_signature(self):
        em = build_extension(n4_model())
        for pt in sample_points_4d(n4_model()):
            ev = np.linalg.eigvalsh(em.evaluate(pt))
            assert int(np.sum(ev > 0)) == 2
            assert int(np.sum(ev < 0)) == 2

    def test_y_affine(self):
        # g(x, y) is affine in y: three collinear y-values are collinear in g
        em = build_extension(m1_model())
        x = (0.2, -0.4)
        y0, y1 = np.array([0.1, -0.3]), np.array([0.8, 0.5])
        g0 = em.evaluate((*x, *y0))
        g1 = em.evaluate((*x, *y1))
        gm = em.evaluate((*x, *(0.5 * (y0 + y1))))
        assert np.abs(gm - 0.5 * (g0 + g1)).max() < 1e-12

    def test_rejects_asymmetric_constant_phi(self):
        with pytest.raises(PreconditionError):
            build_extension(m1_model(), [[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_unknown_phi_name(self):
        with pytest.raises(PreconditionError):
            build_extension(m1_model(), "weyl")


# ---------------------------------------------------------------------------
# Numeric geometry


class TestGeometry4D:
    def test_flat_base_is_flat(self):
        geo = geometry_4d(build_extension(type_a_model({})), (0.1, 0.2, 0.3, -0.2))
        assert np.abs(geo.christoffel).max() == 0.0
        assert np.abs(geo.ricci).max() == 0.0

    def test_base_christoffels_embed(self):
        base = n4_model()
        geo = geometry_4d(build_extension(base), (1.0, 0.0, 0.0, 0.0))
        gb = base.christoffel((1.0, 0.0))
        assert np.abs(geo.christoffel[:2, :2, :2] - gb).max() < 1e-8

    def test_mixed_block_is_dual_connection(self):
        # Gamma-hat_{x_i, y_j}^{y_k} = -Gamma_ik^j, here for a single
        # Christoffel symbol: base Gamma_22^1 = 1
        geo = geometry_4d(build_extension(type_a_model({"221": 1.0})), (0.1, 0.2, 0.3, -0.2))
        G = geo.christoffel
        assert G[1, 2, 3] == pytest.approx(-1.0, abs=1e-8)
        assert G[1, 1, 0] == pytest.approx(1.0, abs=1e-8)
        mask = np.zeros((4, 4, 4), dtype=bool)
        mask[1, 1, 0] = mask[1, 2, 3] = mask[2, 1, 3] = True
        assert np.abs(G[~mask]).max() < 1e-8

    def test_ricci_at_y_zero_is_twice_symmetric_base_ricci(self):
        for base in (n4_model(), m1_model()):
            p0 = (1.0, 0.0) if base.family == surface.TYPE_B else (0.0, 0.0)
            geo = geometry_4d(build_extension(base), (*p0, 0.0, 0.0))
            want = np.zeros((4, 4))
            want[:2, :2] = 2.0 * surface.ricci_symmetric(base, p0)
            assert np.abs(geo.ricci - want).max() < 1e-6

    def test_ricci_against_fd_oracle(self):
        em = build_extension(n4_model())
        pt = (1.0, 0.0, 0.3, -0.2)
        geo = geometry_4d(em, pt)
        oracle = fd_ricci(em, pt, 3e-4)
        assert np.abs(geo.ricci - oracle).max() < 1e-6

    def test_fd_oracle_converges_quadratically(self):
        # the plain central-difference oracle should close in on the
        # extrapolated value at O(h^2)
        em = build_extension(m1_model())
        pt = (0.0, 0.0, 0.3, -0.2)
        ref = geometry_4d(em, pt).ricci
        e1 = np.abs(fd_ricci(em, pt, 2e-3) - ref).max()
        e2 = np.abs(fd_ricci(em, pt, 1e-3) - ref).max()
        assert e2 < e1 / 2.0 + 1e-9

    def test_hessian_operator_restricts_to_base(self):
        base = m1_model()
        geo = geometry_4d(build_extension(base), (0.0, 0.0, 0.0, 0.0))
        f = terms.expf(2, 3.0)
        grad = np.array([0.0, 3.0 * f.evaluate((0.0, 0.0))])
        hess = np.array([[0.0, 0.0], [0.0, 9.0 * f.evaluate((0.0, 0.0))]])
        h4 = geo.hessian(grad, hess)
        hb = surface.hessian(base, f, (0.0, 0.0))
        assert np.abs(h4[:2, :2] - hb).max() < 1e-8


# ---------------------------------------------------------------------------
# Isotropic quasi-Einstein identity


class TestVerifyIsotropicQE:
    def test_half_plane_pipeline(self):
        chk = verify_isotropic_qe(build_extension(n4_model()), terms.power(1, -1.0), -1.0)
        assert chk.residual_qe < 1e-5
        assert chk.residual_null < 1e-8

    def test_exponential_pipeline(self):
        chk = verify_isotropic_qe(build_extension(m1_model()), terms.expf(2, 3.0), 3.0)
        assert chk.residual_qe < 1e-5
        assert chk.residual_null < 1e-8

    def test_phi_does_not_break_identity(self):
        chk = verify_isotropic_qe(
            build_extension(n4_model(), "ricci"), terms.power(1, -1.0), -1.0
        )
        assert chk.residual_qe < 1e-5
        assert chk.residual_null < 1e-8

    def test_flat_base_constant_function(self):
        chk = verify_isotropic_qe(build_extension(type_a_model({})), terms.ONE, 2.0)
        assert chk.residual_qe < 1e-12
        assert chk.residual_null < 1e-12

    def test_mu_zero_accepts_h_directly(self):
        chk = verify_isotropic_qe(build_extension(type_a_model({})), terms.ONE, 0.0)
        assert chk.residual_qe == 0.0
        chk = verify_isotropic_qe(
            build_extension(type_a_model({})), terms.ONE, 0.0, h=terms.coord(1)
        )
        assert chk.residual_qe < 1e-12

    def test_rejects_non_eigenfunction(self):
        with pytest.raises(PreconditionError):
            verify_isotropic_qe(build_extension(n4_model()), terms.coord(2), -1.0)

    def test_rejects_nonpositive_f(self):
        f = terms.power(1, -1.0) * (-1.0)
        with pytest.raises(PreconditionError):
            verify_isotropic_qe(build_extension(n4_model()), f, -1.0)

    def test_null_gradient_is_structural(self):
        # dh has no fiber components and the fiber-fiber inverse block carries
        # the full contraction, so |dh|^2 vanishes to rounding error
        chk = verify_isotropic_qe(build_extension(n4_model()), terms.power(1, -1.0), -1.0)
        assert chk.residual_null < 1e-14


# ---------------------------------------------------------------------------
# Walker complex structure


class TestWalkerKahler:
    def test_flat_base(self):
        nab, sq = walker_kahler_check(build_extension(type_a_model({})))
        assert nab == 0.0
        assert sq == 0.0

    def test_kahler_family(self):
        nab, sq = walker_kahler_check(build_extension(kahler_family(1.0)))
        assert nab < 1e-5
        assert sq < 1e-5

    def test_no_base_structure_raises(self):
        with pytest.raises(PreconditionError):
            walker_kahler_check(build_extension(m1_model()))

    @pytest.mark.parametrize("c", [1.0, 2.0, -0.3])
    def test_quasi_einstein_kahler_composite(self, c):
        # the one-parameter family C_11^1 = C_12^2 = -C_22^1 = c carries both
        # structures: f = (x1)^{1+2c} solves the base equation at mu = 1+2c
        # and the bundle passes the isotropic and Kahler checks together
        base = kahler_family(c)
        mu = 1.0 + 2.0 * c
        f = terms.power(1, 1.0 + 2.0 * c)
        assert surface.qe_residual(base, mu, f) < 1e-9
        em = build_extension(base)
        chk = verify_isotropic_qe(em, f, mu)
        assert chk.residual_qe < 1e-5
        assert chk.residual_null < 1e-8
        nab, sq = walker_kahler_check(em)
        assert nab < 1e-5
        assert sq < 1e-5
