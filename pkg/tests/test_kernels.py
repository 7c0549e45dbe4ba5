"""Kernel tests: orbit/grid/linearization behavior on the reference lane,
and bit-exact agreement between the pure and compiled lanes."""

import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from sflab import kernels
from sflab.kernels import _ref

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

needs_compiled = pytest.mark.skipif(
    kernels.lane() != "compiled", reason="compiled kernels not built")


def speed_module():
    import sflab.kernels._speed as mod
    return mod


def quad(lam):
    """Coefficients of lam*z + z**2/2 and its derivative, ascending."""
    co = np.array([0.0, lam, 0.5], dtype=complex)
    dc = np.array([lam, 1.0], dtype=complex)
    return co, dc


def run_orbit(mod, co, dc, z0, max_steps=400, escape=1e6, trust=np.inf,
              cycle_tol=1e-10, window=8):
    buf = np.zeros(max_steps + 1, dtype=complex)
    out = mod.series_orbit(co, dc, complex(z0), max_steps, escape, trust,
                           cycle_tol, window, buf)
    return out, buf


class TestOrbitBehavior:
    def test_horner_matches_numpy(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            deg = rng.integers(0, 10)
            c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            z = complex(*rng.standard_normal(2))
            got = _ref.horner(c, z)
            want = np.polynomial.polynomial.polyval(z, c)
            assert abs(got - want) <= 1e-12 * (1.0 + abs(want))

    def test_attracting_fixed_point(self):
        co, dc = quad(0.5)
        (st, k, length, mult), buf = run_orbit(_ref, co, dc, 0.3)
        assert st == kernels.STATUS_CYCLE
        assert length == 1
        assert abs(mult - 0.5) < 1e-6
        assert abs(buf[k]) < 1e-5

    def test_superattracting_two_cycle(self):
        # lam*z + z**2/2 is conjugate to w**2 + c with c = lam/2 - lam**2/4;
        # lam = 1 + sqrt(5) gives c = -1, whose 2-cycle {0, -1} is
        # superattracting. The cycle maps back to {-lam, -lam - 2}.
        lam = 1.0 + math.sqrt(5.0)
        co, dc = quad(lam)
        (st, k, length, mult), buf = run_orbit(_ref, co, dc, -lam + 0.05)
        assert st == kernels.STATUS_CYCLE
        assert length == 2
        assert abs(mult) < 1e-4
        assert min(abs(buf[k] + lam), abs(buf[k] + lam + 2.0)) < 1e-3

    def test_escape(self):
        co, dc = quad(0.5)
        (st, k, length, mult), buf = run_orbit(_ref, co, dc, 50.0,
                                               escape=1e3)
        assert st == kernels.STATUS_ESCAPED
        assert length == 0 and mult == 0j
        assert abs(buf[k]) > 1e3

    def test_budget_on_rotation(self):
        # Multiplier on the unit circle with golden rotation number: the
        # orbit of a small point stays bounded and never settles on an
        # attracting cycle, so the step budget runs out.
        lam = cmath.exp(2j * cmath.pi * GOLDEN)
        co, dc = quad(lam)
        (st, k, length, mult), buf = run_orbit(
            _ref, co, dc, 0.05, max_steps=3000, cycle_tol=1e-12, window=16)
        assert st == kernels.STATUS_BUDGET
        assert k == 3000
        assert np.all(np.abs(buf) < 1.0)

    def test_left_trust_region(self):
        co, dc = quad(0.5)
        (st, k, _, _), _ = run_orbit(_ref, co, dc, 2.5, trust=2.0)
        assert st == kernels.STATUS_LEFT_TRUST
        assert k == 0

    def test_left_trust_midway(self):
        lam = 1.0 + math.sqrt(5.0)  # orbit grows before escaping
        co, dc = quad(lam)
        (st, k, _, _), buf = run_orbit(_ref, co, dc, 1.0, trust=40.0,
                                       escape=1e9)
        assert st == kernels.STATUS_LEFT_TRUST
        assert k > 0
        assert abs(buf[k]) > 40.0
        assert abs(buf[k - 1]) <= 40.0

    def test_overflow(self):
        co = np.array([0.0, 0.0, 1.0], dtype=complex)  # z**2
        dc = np.array([0.0, 2.0], dtype=complex)
        (st, k, _, _), _ = run_orbit(_ref, co, dc, 2.0, escape=np.inf)
        assert st == kernels.STATUS_OVERFLOW
        assert 8 <= k <= 11  # 2**(2**k) overflows near k = 10

    def test_repelling_fixed_point_not_reported_as_cycle(self):
        # Near a repelling fixed point consecutive samples are close enough
        # to trigger the probe, but the multiplier check rejects it and the
        # orbit is left to escape.
        co, dc = quad(2.2)
        (st, _, length, _), _ = run_orbit(_ref, co, dc, 1e-12, escape=1e3,
                                          cycle_tol=1e-9)
        assert st == kernels.STATUS_ESCAPED
        assert length == 0

    def test_samples_prefix_is_orbit(self):
        co, dc = quad(0.5)
        (st, k, _, _), buf = run_orbit(_ref, co, dc, 0.2 + 0.1j)
        z = 0.2 + 0.1j
        for i in range(min(k, 12) + 1):
            assert buf[i] == pytest.approx(z, rel=1e-12, abs=1e-300)
            z = 0.5 * z + 0.5 * z * z


class TestEscapeGridBehavior:
    def test_statuses_and_counts(self):
        co, _ = quad(0.5)
        nre, nim = 17, 15
        counts = np.zeros((nim, nre), dtype=np.int32)
        status = np.zeros((nim, nre), dtype=np.uint8)
        _ref.escape_grid(co, -4.0, 0.5, nre, -3.5, 0.5, nim, 60, 1e3,
                         np.inf, counts, status)
        # center pixel sits at the attracting fixed point 0: never escapes
        j0, i0 = 7, 8
        assert counts[j0, i0] == 60
        assert status[j0, i0] == kernels.STATUS_BUDGET
        # the far corner escapes quickly
        assert status[0, 0] == kernels.STATUS_ESCAPED
        assert counts[0, 0] < 12
        assert counts[0, 0] >= 1
        # every pixel got a defined status
        assert set(np.unique(status)) <= {0, 1, 2, 3, 4}

    def test_trust_region_marks_pixels(self):
        co, _ = quad(0.5)
        counts = np.zeros((9, 9), dtype=np.int32)
        status = np.zeros((9, 9), dtype=np.uint8)
        _ref.escape_grid(co, -4.0, 1.0, 9, -4.0, 1.0, 9, 50, 1e3, 3.0,
                         counts, status)
        assert status[0, 0] == kernels.STATUS_LEFT_TRUST  # |z0| > 3
        assert counts[0, 0] == 0
        assert status[4, 4] == kernels.STATUS_BUDGET  # origin

    def test_row_column_orientation(self):
        # counts[j, i] must correspond to re0 + dre*i, im0 + dim*j
        co, _ = quad(0.5)
        counts = np.zeros((1, 3), dtype=np.int32)
        status = np.zeros((1, 3), dtype=np.uint8)
        _ref.escape_grid(co, 0.0, 40.0, 3, 0.0, 1.0, 1, 30, 30.0, np.inf,
                         counts, status)
        assert status[0, 0] == kernels.STATUS_BUDGET
        assert status[0, 1] == kernels.STATUS_ESCAPED
        assert counts[0, 1] == 0


def schroeder(mod, lam, p, q, order):
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    recips = np.zeros(order + 1, dtype=complex)
    for n in range(2, order + 1):
        recips[n] = 1.0 / (n * (lam ** (n - 1) - 1.0))
    mant = np.zeros(order + 1, dtype=complex)
    expo = np.zeros(order + 1, dtype=np.int64)
    mod.schroeder_core(p, q, recips, order, mant, expo)
    return mant, expo


class TestSchroederBehavior:
    LAM = cmath.exp(2j * cmath.pi * GOLDEN)

    def test_quadratic_low_order_closed_forms(self):
        lam = self.LAM
        mant, expo = schroeder(_ref, lam, [1.0, 1.0 / lam], [0.0], 4)
        phi = mant * np.exp2(expo.astype(float))
        a2 = 0.5 / (lam * lam - lam)
        a3 = a2 / (lam ** 3 - lam)
        assert phi[0] == 0
        assert phi[1] == 1.0
        assert abs(phi[2] - a2) < 1e-14 * abs(a2)
        assert abs(phi[3] - a3) < 1e-13 * abs(a3)

    def test_exponential_families_phi2(self):
        lam = self.LAM
        mant, expo = schroeder(_ref, lam, [1.0, 1.0], [0.0, 1.0], 2)
        phi2 = complex(mant[2]) * 2.0 ** int(expo[2])
        assert abs(phi2 - 1.0 / (lam - 1.0)) < 1e-14
        mant, expo = schroeder(_ref, lam, [1.0], [0.0, 1.0], 2)
        phi2 = complex(mant[2]) * 2.0 ** int(expo[2])
        assert abs(phi2 - 0.5 / (lam - 1.0)) < 1e-14

    def test_conjugacy_holds_termwise(self):
        # f(phi(w)) and phi(lam w) must agree coefficient by coefficient;
        # composition at order n only sees coefficients up to n, so the
        # check is exact up to rounding.
        from sflab.series import ser_compose
        from sflab.sfcore import SFFunction

        lam = self.LAM
        f = SFFunction(lam, [1.0, 1.0], [0.0, 1.0])
        order = 12
        mant, expo = schroeder(_ref, lam, [1.0, 1.0], [0.0, 1.0], order)
        phi = mant * np.exp2(expo.astype(float))
        fc = f.origin_series().array()[:order + 1]
        lhs = ser_compose(fc, phi, order)
        rhs = phi * lam ** np.arange(order + 1)
        scale = np.abs(rhs) + 1.0
        assert np.all(np.abs(lhs - rhs) <= 1e-11 * scale)

    def test_zero_coefficient_rows_skipped_consistently(self):
        # a lacunary P exercises the skip-zero branch; the result must match
        # the same polynomial with the zero written explicitly
        lam = self.LAM
        m1, e1 = schroeder(_ref, lam, [1.0, 0.0, 0.3], [0.0, 1.0], 40)
        m2, e2 = schroeder(_ref, lam, [1.0, 0.0, 0.3 + 0j], [0.0, 1.0], 40)
        assert m1.tobytes() == m2.tobytes()
        assert e1.tobytes() == e2.tobytes()

    def test_mantissas_stay_normalized(self):
        mant, expo = schroeder(_ref, self.LAM, [1.0, 1.0], [0.0, 1.0], 80)
        mags = np.abs(mant[1:])
        assert np.all((mags >= 0.25) & (mags < 2.0))


@needs_compiled
class TestLaneParity:
    def test_horner_bitwise(self):
        spd = speed_module()
        rng = np.random.default_rng(71)
        for _ in range(60):
            deg = rng.integers(0, 13)
            c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            z = complex(*(3.0 * rng.standard_normal(2)))
            a = _ref.horner(c, z)
            b = spd.horner(c, z)
            assert a.real == b.real and a.imag == b.imag

    def test_orbit_bitwise(self):
        spd = speed_module()
        rng = np.random.default_rng(72)
        for _ in range(40):
            deg = int(rng.integers(2, 5))
            c = 0.5 * (rng.standard_normal(deg + 1)
                       + 1j * rng.standard_normal(deg + 1))
            c[0] = 0.0
            dc = c[1:] * np.arange(1, deg + 1)
            z0 = complex(*(0.8 * rng.standard_normal(2)))
            b1 = np.zeros(301, dtype=complex)
            b2 = np.zeros(301, dtype=complex)
            r1 = _ref.series_orbit(c, dc, z0, 300, 1e4, 1e8, 1e-9, 8, b1)
            r2 = spd.series_orbit(c, dc, z0, 300, 1e4, 1e8, 1e-9, 8, b2)
            assert r1[0] == r2[0] and r1[1] == r2[1] and r1[2] == r2[2]
            assert r1[3].real == r2[3].real and r1[3].imag == r2[3].imag
            assert b1.tobytes() == b2.tobytes()

    def test_grid_bitwise(self):
        spd = speed_module()
        co, _ = quad(cmath.exp(2j * cmath.pi * GOLDEN))
        shapes = dict(nre=41, nim=37)
        c1 = np.zeros((37, 41), dtype=np.int32)
        s1 = np.zeros((37, 41), dtype=np.uint8)
        c2 = np.zeros((37, 41), dtype=np.int32)
        s2 = np.zeros((37, 41), dtype=np.uint8)
        args = (-2.0, 0.1, shapes["nre"], -1.8, 0.1, shapes["nim"], 150,
                1e3, 6.0)
        _ref.escape_grid(co, *args, c1, s1)
        spd.escape_grid(co, *args, c2, s2)
        assert c1.tobytes() == c2.tobytes()
        assert s1.tobytes() == s2.tobytes()

    def test_schroeder_bitwise(self):
        spd = speed_module()
        cases = [
            (cmath.exp(2j * cmath.pi * GOLDEN), [1.0, 1.0], [0.0, 1.0]),
            (cmath.exp(2j * cmath.pi * (math.sqrt(2.0) - 1.0)),
             [1.0, 0.2 - 0.1j, 0.0, 0.05j], [0.0, 0.3, -0.07]),
            (1.7 + 0.2j, [1.0], [0.0, 1.0]),
            (0.4j, [1.0, -2.0], [0.0]),
        ]
        for lam, p, q in cases:
            m1, e1 = schroeder(_ref, lam, p, q, 150)
            m2, e2 = schroeder(spd, lam, p, q, 150)
            assert m1.tobytes() == m2.tobytes()
            assert e1.tobytes() == e2.tobytes()


class TestLaneSelection:
    def test_lane_reports_a_known_value(self):
        assert kernels.lane() in ("pure", "compiled")
        assert kernels.reference_module() is _ref
        act = kernels.active_module()
        assert kernels.horner is act.horner
        assert kernels.schroeder_core is act.schroeder_core

    def test_env_override_forces_pure(self):
        env = dict(os.environ, SFLAB_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from sflab import kernels; print(kernels.lane())"],
            capture_output=True, text=True, env=env, check=True)
        assert out.stdout.strip() == "pure"

    def test_status_codes_are_stable(self):
        assert (kernels.STATUS_BUDGET, kernels.STATUS_ESCAPED,
                kernels.STATUS_CYCLE, kernels.STATUS_OVERFLOW,
                kernels.STATUS_LEFT_TRUST) == (0, 1, 2, 3, 4)
