"""Term algebra: exact derivatives, canonical text form, numeric rank."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qesurf import terms
from qesurf.errors import DegenerateSampleError, DomainError, ParseError
from qesurf.terms import (
    ClosedForm,
    Factor,
    Term,
    const,
    coord,
    cosf,
    expf,
    format_closed_form,
    logf,
    numeric_rank,
    parse_closed_form,
    power,
    realize_complex_exp,
    sample_points,
    sinf,
)


def central_diff(f, p, axis, h):
    lo = list(p)
    hi = list(p)
    lo[axis - 1] -= h
    hi[axis - 1] += h
    return (f.evaluate(hi) - f.evaluate(lo)) / (2 * h)


def richardson_diff(f, p, axis, h=1e-4):
    d1 = central_diff(f, p, axis, h)
    d2 = central_diff(f, p, axis, h / 2)
    return (4 * d2 - d1) / 3


def sample_form():
    # 3.0 * (x1)^-1.5 * log(x1) * exp(2 x2) + 0.5 * cos(1.3 x1 + 0.2) * x2^2
    a = power(1, -1.5, coeff=3.0) * logf(1) * expf(2, 2.0)
    b = cosf(1, 1.3, 0.2) * power(2, 2.0, coeff=0.5)
    return a + b


class TestEvaluationAndDerivatives:
    def test_polynomial_exact(self):
        f = power(1, 2.0) + coord(2) * const(-3.0)
        assert f.evaluate((2.0, 5.0)) == 4.0 - 15.0

    def test_derivative_against_finite_differences(self):
        f = sample_form()
        p = (0.7, -0.4)
        for axis in (1, 2):
            exact = f.differentiate(axis).evaluate(p)
            approx = richardson_diff(f, p, axis)
            assert abs(exact - approx) < 1e-9 * max(1.0, abs(exact))

    def test_second_derivatives(self):
        f = sample_form()
        p = (1.3, 0.9)
        f12 = f.differentiate(1).differentiate(2)
        g = f.differentiate(2)
        approx = richardson_diff(g, p, 1)
        assert abs(f12.evaluate(p) - approx) < 1e-8

    def test_sin_is_shifted_cos(self):
        f = sinf(1, 2.0)
        assert abs(f.evaluate((0.3, 0.0)) - math.sin(0.6)) < 1e-15

    def test_cos_derivative_closure(self):
        f = cosf(2, 3.0, 0.4)
        df = f.differentiate(2)
        p = (0.0, 0.22)
        assert abs(df.evaluate(p) + 3.0 * math.sin(3.0 * 0.22 + 0.4)) < 1e-14

    def test_log_derivative(self):
        f = logf(1, 2)
        df = f.differentiate(1)
        x = 1.7
        assert abs(df.evaluate((x, 0.0)) - 2 * math.log(x) / x) < 1e-14


class TestDomainGuards:
    def test_log_needs_positive(self):
        with pytest.raises(DomainError):
            logf(1).evaluate((-1.0, 0.0))

    def test_fractional_power_needs_positive(self):
        with pytest.raises(DomainError):
            power(1, 0.5).evaluate((-2.0, 0.0))

    def test_negative_integer_power_at_zero(self):
        with pytest.raises(DomainError):
            power(1, -1.0).evaluate((0.0, 1.0))

    def test_negative_integer_power_on_negative_axis_ok(self):
        assert power(1, -2.0).evaluate((-2.0, 0.0)) == 0.25

    def test_region_guard(self):
        f = coord(1)
        with pytest.raises(DomainError):
            f.evaluate((-1.0, 0.0), domain=terms.RIGHT_HALF)
        with pytest.raises(DomainError):
            f.evaluate((1.55, 0.0), domain=terms.SPHERE_CHART)
        assert f.evaluate((0.5, 0.0), domain=terms.RIGHT_HALF) == 0.5


class TestAlgebra:
    def test_simplify_merges_like_terms(self):
        f = coord(1) + coord(1)
        assert len(f.terms) == 1
        assert f.terms[0].coeff == 2.0

    def test_simplify_drops_zero(self):
        f = coord(1) - coord(1)
        assert f.is_zero()

    def test_product_to_sum_identity(self):
        f = cosf(1, 2.0, 0.3) * cosf(1, 5.0, -0.1)
        x = 0.83
        expected = math.cos(2 * x + 0.3) * math.cos(5 * x - 0.1)
        assert abs(f.evaluate((x, 0.0)) - expected) < 1e-14

    def test_product_of_equal_frequencies(self):
        f = cosf(2, 2.0) * cosf(2, 2.0)
        x2 = 0.41
        assert abs(f.evaluate((0.0, x2)) - math.cos(2 * x2) ** 2) < 1e-14

    def test_log_power_cap(self):
        f = logf(1, 2)
        with pytest.raises(ValueError):
            _ = f * logf(1, 1)

    def test_phase_normalization_merges(self):
        # cos(x + pi) == -cos(x): both spellings should merge/cancel
        f = cosf(1, 1.0, math.pi) + cosf(1, 1.0)
        assert f.is_zero()


class TestSerialization:
    def test_example_format(self):
        f = power(1, -1.5, coeff=3.0) * logf(1) * expf(2, 2.0)
        assert format_closed_form(f) == "3.0 * (x1)^-1.5 * log(x1)^1 * exp(2.0*x2)"

    def test_round_trip_bit_identical(self):
        f = sample_form() + sinf(2, 0.25) * const(-1.75)
        text = format_closed_form(f)
        g = parse_closed_form(text)
        assert g == f
        assert format_closed_form(g) == text

    def test_round_trip_tiny_floats(self):
        f = expf(1, 1e-5) * const(3.0000000000001e-7)
        g = parse_closed_form(format_closed_form(f))
        assert g == f

    def test_zero(self):
        assert format_closed_form(terms.ZERO) == "0"
        assert parse_closed_form("0").is_zero()

    def test_parse_error(self):
        with pytest.raises(ParseError):
            parse_closed_form("1.0 * sinh(x1)")


class TestComplexRealization:
    def test_matches_complex_arithmetic(self):
        a1 = complex(-0.3, 1.2)
        a2 = complex(0.5, -0.7)
        c = complex(2.0, 0.5)
        re = realize_complex_exp(c, (1, 2), a1, a2, "re")
        im = realize_complex_exp(c, (1, 2), a1, a2, "im")
        for p in [(0.4, -0.8), (1.3, 0.9)]:
            z = c * p[0] * p[1] ** 2 * np.exp(a1 * p[0] + a2 * p[1])
            assert abs(re.evaluate(p) - z.real) < 1e-12
            assert abs(im.evaluate(p) - z.imag) < 1e-12

    def test_single_axis_frequency(self):
        re = realize_complex_exp(1.0 + 0j, (0, 0), 1.0 + 0j, 1j, "re")
        p = (0.5, 0.77)
        assert abs(re.evaluate(p) - math.exp(0.5) * math.cos(0.77)) < 1e-14


class TestNumericRank:
    def test_independent(self):
        pts = sample_points(terms.FULL_PLANE)
        fam = [const(1.0), coord(1), coord(2), coord(1) * coord(2)]
        assert numeric_rank(fam, pts) == 4

    def test_dependent(self):
        pts = sample_points(terms.FULL_PLANE)
        fam = [coord(1), coord(2), coord(1) + 2.0 * coord(2)]
        assert numeric_rank(fam, pts) == 2

    def test_exponential_family(self):
        pts = sample_points(terms.FULL_PLANE)
        fam = [expf(2, 1.0), coord(2) * expf(2, 1.0), expf(2, 1.0) * (const(2.0) + coord(2))]
        assert numeric_rank(fam, pts) == 2

    def test_too_few_points(self):
        pts = sample_points(terms.FULL_PLANE, n=3)
        with pytest.raises(DegenerateSampleError):
            numeric_rank([const(1.0), coord(1), coord(2)], pts)

    def test_degenerate_set_detected(self):
        # all points on the line x2 = 0: x2 and x1*x2 look like zero
        pts = [(float(i) / 3.0 + 0.1, 0.0) for i in range(8)]
        with pytest.raises(DegenerateSampleError):
            numeric_rank([coord(2), coord(1) * coord(2)], pts)

    def test_robust_rank_retries(self):
        fam = [power(1, 0.5), logf(1), power(1, 0.5) * logf(1)]
        assert terms.robust_rank(fam, terms.RIGHT_HALF) == 3


coeffs = st.floats(min_value=-3, max_value=3, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
small_ints = st.integers(min_value=0, max_value=2)


@st.composite
def closed_forms(draw):
    n_terms = draw(st.integers(min_value=1, max_value=3))
    out = None
    for _ in range(n_terms):
        factors = []
        for axis in (1, 2):
            if draw(st.booleans()):
                factors.append(
                    Factor(
                        axis=axis,
                        power=float(draw(small_ints)),
                        log_power=draw(small_ints) if axis == 1 else 0,
                        exp_coeff=draw(st.sampled_from([0.0, 1.0, -0.5])),
                        freq=draw(st.sampled_from([0.0, 1.0, 2.5])),
                        phase=draw(st.sampled_from([0.0, 0.4])),
                    )
                )
        term = Term.make(draw(coeffs), tuple(factors))
        cf = ClosedForm((term,)).simplify()
        out = cf if out is None else out + cf
    return out


@settings(max_examples=60, deadline=None)
@given(closed_forms())
def test_property_derivative_matches_richardson(f):
    p = (0.9, 0.6)
    for axis in (1, 2):
        exact = f.differentiate(axis).evaluate(p)
        approx = richardson_diff(f, p, axis, h=1e-4)
        assert abs(exact - approx) < 1e-7 * max(1.0, abs(exact))


@settings(max_examples=60, deadline=None)
@given(closed_forms(), closed_forms())
def test_property_product_evaluates_pointwise(f, g):
    try:
        fg = f * g
    except ValueError:
        return  # log-power cap; rejected by construction
    for p in [(0.7, 0.3), (1.4, -0.9)]:
        assert abs(fg.evaluate(p) - f.evaluate(p) * g.evaluate(p)) < 1e-8 * max(
            1.0, abs(f.evaluate(p) * g.evaluate(p))
        )


@settings(max_examples=60, deadline=None)
@given(closed_forms())
def test_property_round_trip(f):
    g = parse_closed_form(format_closed_form(f))
    assert g == f
