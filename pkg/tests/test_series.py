"""Truncated series algebra against independent oracles.

Products check against numpy convolution, exponentials against term-by-term
factorial expansions and against cmath on evaluation, the shift against
direct binomial sums, and the certified radius against explicit geometric
tails.
"""

import cmath
import math

import numpy as np
import pytest

from sflab import series as sr


class TestBasicOps:
    def test_mul_matches_convolve(self):
        rng = np.random.default_rng(21)
        a = rng.normal(size=8) + 1j * rng.normal(size=8)
        b = rng.normal(size=5) + 1j * rng.normal(size=5)
        got = sr.ser_mul(a, b, 9)
        want = np.convolve(a, b)[:10]
        assert np.allclose(got, want, rtol=1e-14)

    def test_mul_pads_short_products(self):
        got = sr.ser_mul([1.0], [1.0], 4)
        assert got.shape == (5,)
        assert np.array_equal(got, np.array([1, 0, 0, 0, 0], dtype=complex))

    def test_exp_of_monomial(self):
        # exp(c t) has coefficients c^n / n!
        c = 0.7 - 0.3j
        got = sr.ser_exp([0.0, c], 12)
        want = np.array([c ** n / math.factorial(n) for n in range(13)])
        assert np.allclose(got, want, rtol=1e-13)

    def test_exp_of_quadratic_by_evaluation(self):
        u = np.array([0.0, 0.25, -0.125j])
        e = sr.ser_exp(u, 25)
        for w in (0.1, 0.3 + 0.2j, -0.4j):
            direct = cmath.exp(np.polyval(u[::-1], w))
            summed = sr.ser_eval(e, w)
            assert abs(summed - direct) < 1e-12 * (1 + abs(direct))

    def test_exp_rejects_nonzero_constant(self):
        with pytest.raises(ValueError):
            sr.ser_exp([1.0, 1.0], 4)

    def test_integrate(self):
        g = np.array([1.0, 2.0, 3.0])
        got = sr.ser_integrate(g, 4)
        assert np.allclose(got, [0.0, 1.0, 1.0, 1.0, 0.0])

    def test_compose_linear_inner(self):
        # outer(2w) doubles each power's scale
        outer = np.array([1.0, 1.0, 1.0])
        inner = np.array([0.0, 2.0])
        got = sr.ser_compose(outer, inner, 4)
        assert np.allclose(got, [1.0, 2.0, 4.0, 0.0, 0.0])

    def test_compose_matches_evaluation(self):
        rng = np.random.default_rng(13)
        outer = rng.normal(size=6) * 0.5
        inner = np.concatenate([[0.0], rng.normal(size=4) * 0.3])
        comp = sr.ser_compose(outer, inner, 20)
        for w in (0.05, 0.1j, 0.08 - 0.02j):
            direct = np.polyval(outer[::-1], np.polyval(inner[::-1], w))
            assert abs(sr.ser_eval(comp, w) - direct) < 1e-10

    def test_compose_rejects_nonzero_inner_constant(self):
        with pytest.raises(ValueError):
            sr.ser_compose([1.0], [1.0, 1.0], 3)


class TestShift:
    def test_shift_against_binomials(self):
        # p(t) = t^3: p(c+s) = c^3 + 3c^2 s + 3c s^2 + s^3
        c = 1.5 - 0.5j
        got = sr.poly_shift([0.0, 0.0, 0.0, 1.0], c)
        want = np.array([c ** 3, 3 * c ** 2, 3 * c, 1.0])
        assert np.allclose(got, want, rtol=1e-14)

    def test_shift_preserves_evaluation(self):
        rng = np.random.default_rng(31)
        p = rng.normal(size=7) + 1j * rng.normal(size=7)
        c = 0.4 + 1.1j
        q = sr.poly_shift(p, c)
        for s in (0.0, 0.3, -0.2 + 0.1j):
            assert abs(np.polyval(q[::-1], s) - np.polyval(p[::-1], c + s)) < 1e-12

    def test_shift_by_zero_is_identity(self):
        p = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(sr.poly_shift(p, 0.0), p.astype(complex))


class TestEval:
    def test_horner_matches_polyval(self):
        rng = np.random.default_rng(17)
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        for w in (0.2, -0.7j, 1.0 + 1.0j):
            assert abs(sr.ser_eval(c, w) - np.polyval(c[::-1], w)) < 1e-12 * (
                1 + abs(np.polyval(c[::-1], w))
            )


class TestCertifiedRadius:
    def test_trailing_zeros_are_not_proof_of_polynomiality(self):
        # the truncation [1, 2, 3, 0, 0] could come from a lacunary series,
        # so the radius must stay finite (callers handle exact polynomials
        # themselves)
        r = sr.certified_radius([1.0, 2.0, 3.0, 0.0, 0.0])
        assert math.isfinite(r)

    def test_lacunary_series_radius_is_sane(self):
        # truncation of integral of exp(t^4): live coefficients at 4k+1 only
        coeffs = np.zeros(65)
        for k in range(17):
            if 4 * k + 1 <= 64:
                coeffs[4 * k + 1] = 1.0 / (math.factorial(k) * (4 * k + 1))
        r = sr.certified_radius(coeffs, rel_tol=1e-14)
        assert 0.5 < r < 2.5
        # verify truncation really is good at that radius: compare against a
        # much longer truncation
        long = np.zeros(242)
        for k in range(61):
            long[4 * k + 1] = 1.0 / (math.factorial(k) * (4 * k + 1))
        for ang in (0.2, 2.9):
            w = r * np.exp(1j * ang)
            short_val = sr.ser_eval(coeffs, w)
            long_val = sr.ser_eval(long, w)
            assert abs(short_val - long_val) <= 1e-12 * (1 + abs(long_val))

    def test_geometric_series_radius(self):
        # coefficients 2^-k: growth 0.5 per order, so radius must be finite
        # and below 2 but positive
        coeffs = [2.0 ** -k for k in range(40)]
        r = sr.certified_radius(coeffs, rel_tol=1e-14)
        assert 0.0 < r < 2.0

    def test_exponential_series_large_radius(self):
        coeffs = [1.0 / math.factorial(k) for k in range(30)]
        r = sr.certified_radius(coeffs, rel_tol=1e-14)
        # at the observed decay the bound should certify at least radius 1
        assert r > 1.0

    def test_radius_honors_tolerance_ordering(self):
        coeffs = [1.0 / math.factorial(k) for k in range(25)]
        loose = sr.certified_radius(coeffs, rel_tol=1e-6)
        tight = sr.certified_radius(coeffs, rel_tol=1e-14)
        assert loose >= tight > 0

    def test_truncation_error_actually_below_tol_inside(self):
        # concrete verification: exp series truncated at 30, radius r;
        # compare against cmath.exp on a ring just inside r
        coeffs = np.array([1.0 / math.factorial(k) for k in range(31)])
        r = sr.certified_radius(coeffs, rel_tol=1e-12)
        for ang in np.linspace(0, 2 * math.pi, 7):
            w = 0.95 * r * cmath.exp(1j * ang)
            err = abs(sr.ser_eval(coeffs, w) - cmath.exp(w))
            assert err <= 1e-10 * (1 + abs(cmath.exp(w)))

    def test_all_zero_series(self):
        assert sr.certified_radius([0.0, 0.0]) == math.inf


class TestTaylorSeries:
    def test_construction_and_call(self):
        ts = sr.make_series(1.0, [2.0, 3.0, 4.0], 5.0)
        assert ts.order == 2
        # 2 + 3*(z-1) + 4*(z-1)^2 at z=2 is 9
        assert ts(2.0) == pytest.approx(9.0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            sr.TaylorSeries(0j, (1.0,), 3, 1.0)
