"""Root finder checks against numpy's eigenvalue solver and exact factors."""

import numpy as np
import pytest

from sflab import polyroots
from sflab.errors import RootFindingError


def as_multiset(zs, tol=1e-7):
    """Sort key for fuzzy multiset comparison."""
    return sorted(zs, key=lambda z: (round(z.real / tol), round(z.imag / tol)))


def match(got, want, tol=1e-8):
    got = as_multiset(list(got))
    want = as_multiset(list(want))
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert abs(g - w) <= tol * (1.0 + abs(w)), (g, w)


class TestRoots:
    def test_linear(self):
        match(polyroots.roots([6.0, 2.0]), [-3.0])

    def test_quadratic_exact(self):
        # (z-1)(z+2) = z^2 + z - 2, ascending [-2, 1, 1]
        match(polyroots.roots([-2.0, 1.0, 1.0]), [1.0, -2.0])

    def test_random_against_numpy(self):
        rng = np.random.default_rng(101)
        for _ in range(40):
            deg = int(rng.integers(2, 13))
            c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            c[-1] += 3.0  # keep leading coefficient well away from zero
            got = polyroots.roots(c)
            want = np.roots(c[::-1])
            match(got, want, tol=1e-7)

    def test_integer_ladder(self):
        # (z-1)(z-2)...(z-8)
        c = np.poly(np.arange(1, 9))[::-1]
        got = polyroots.roots(c)
        match(got, np.arange(1, 9).astype(complex), tol=1e-8)

    def test_roots_at_origin(self):
        # z^2 (z - 3)
        match(polyroots.roots([0.0, 0.0, -3.0, 1.0]), [0.0, 0.0, 3.0])

    def test_constant_has_no_roots(self):
        assert len(polyroots.roots([5.0])) == 0

    def test_zero_polynomial_rejected(self):
        with pytest.raises(RootFindingError):
            polyroots.roots([0.0, 0.0])

    def test_deterministic(self):
        c = [1.0, -2.0, 0.5, 1.0, 0.25]
        a = polyroots.roots(c)
        b = polyroots.roots(c)
        assert np.array_equal(a, b)

    def test_trailing_zero_coefficients_ignored(self):
        match(polyroots.roots([-2.0, 1.0, 1.0, 0.0, 0.0]), [1.0, -2.0])


class TestClusters:
    def test_triple_root(self):
        # (z-2)^3 (z+1), ascending coefficients via convolution; a triple
        # root from double coefficients has intrinsic spread ~eps**(1/3),
        # so the cluster tolerance must be coarser than the default
        c = np.convolve(np.convolve([-2.0, 1.0], [-2.0, 1.0]),
                        np.convolve([-2.0, 1.0], [1.0, 1.0]))
        out = polyroots.clustered_roots(c, cluster_tol=1e-3)
        assert len(out) == 2
        by_mult = {m: z for z, m in out}
        assert set(by_mult) == {1, 3}
        assert abs(by_mult[1] - (-1.0)) < 1e-9
        assert abs(by_mult[3] - 2.0) < 1e-4

    def test_simple_roots_stay_separate(self):
        c = np.poly([1.0, 1.5, -2.0])[::-1]
        out = polyroots.clustered_roots(c)
        assert sorted(m for _, m in out) == [1, 1, 1]

    def test_double_complex_pair(self):
        # (z - i)^2 (z + i)^2 = (z^2+1)^2
        c = np.convolve([1.0, 0.0, 1.0], [1.0, 0.0, 1.0])[::-1]
        out = polyroots.clustered_roots(c)
        assert sorted(m for _, m in out) == [2, 2]
        pts = sorted(z.imag for z, _ in out)
        assert pts[0] == pytest.approx(-1.0, abs=1e-7)
        assert pts[1] == pytest.approx(1.0, abs=1e-7)

    def test_multiplicities_sum_to_degree(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            deg = int(rng.integers(2, 9))
            c = rng.normal(size=deg + 1)
            c[-1] += 2.0
            out = polyroots.clustered_roots(c)
            assert sum(m for _, m in out) == deg
