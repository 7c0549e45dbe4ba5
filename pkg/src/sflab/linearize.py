"""Linearizing coordinates at the origin fixed point.

The conjugacy phi solves f(phi(w)) = phi(multiplier * w) with phi(0) = 0,
phi'(0) = 1.  Its coefficients are divided by multiplier**(n-1) - 1 at
every order, so for irrational rotations they carry the small-divisor
history of the multiplier; the coefficients are therefore stored in
extended range (complex mantissa, binary exponent) and never collapsed to
plain doubles internally.

Two construction paths exist: structurally finite functions go through the
compiled/pure kernel recursion, and generic local germs (a truncated
expansion at a fixed point, as produced by `recenter`) go through a direct
composition recursion in extended-range arithmetic.  `verify_conjugacy`
re-substitutes the result into the functional equation with an independent
composition, so the two sides share no intermediates with either recursion.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernels
from . import xcomplex as xc
from .errors import (FixedPointError, NormalizationError, ResonanceError,
                     SeriesDivergenceError)
from .series import TaylorSeries, make_series
from .sfcore import SFFunction

_NEAR_RESONANCE_TOL = 1e-13
_RADIUS_WINDOW = 25
_NEGLIGIBLE_LOG = math.log(1e-300)


@dataclass(frozen=True)
class LinearizationSeries:
    """Coefficients of the linearizing coordinate, in extended range.

    coeff_mant[n] and coeff_exp[n] hold the coefficient of w**n as
    mantissa * 2**exponent; index 0 is zero and index 1 is exactly one.
    divisor_log[n] = log |multiplier**(n-1) - 1| records the small-divisor
    magnitude consumed at order n (entries 0 and 1 are nan), and
    near_resonance_flags lists the orders whose divisor came within 1e-13
    of an exact resonance.
    """

    multiplier: complex
    coeff_mant: np.ndarray
    coeff_exp: np.ndarray
    order: int
    divisor_log: np.ndarray
    near_resonance_flags: tuple

    def coefficient(self, n: int):
        """Coefficient of w**n as an extended-range (re, im, exp) triple."""
        m = self.coeff_mant[n]
        return (float(m.real), float(m.imag), int(self.coeff_exp[n]))

    def coefficient_complex(self, n: int, strict: bool = False) -> complex:
        return xc.xto_complex(self.coefficient(n), strict=strict)

    def log_abs_coefficient(self, n: int) -> float:
        return xc.xlog_abs(self.coefficient(n))

    def magnitude_parts(self, n: int):
        """(digits, decade) with |coefficient| = digits * 10**decade and
        digits in [1, 10); (0.0, 0) for a zero coefficient.  Survives
        magnitudes far outside double range."""
        la = self.log_abs_coefficient(n)
        if la == -math.inf:
            return (0.0, 0)
        l10 = la / math.log(10.0)
        decade = math.floor(l10)
        return (10.0 ** (l10 - decade), int(decade))


def _divisor_data(multiplier: complex, order: int):
    """Reciprocal divisors shared by every lane, plus their diagnostics.

    recips[n] = 1 / (n * (multiplier**(n-1) - 1)); an exactly vanishing
    divisor raises ResonanceError naming the order, and near-vanishing
    divisors below 1e-13 are flagged but allowed through.
    """
    lam = complex(multiplier)
    if lam == 0:
        raise NormalizationError("multiplier must be nonzero to linearize")
    recips = np.zeros(order + 1, dtype=complex)
    divisor_log = np.full(order + 1, math.nan)
    flags = []
    for n in range(2, order + 1):
        d = lam ** (n - 1) - 1.0
        if d == 0:
            raise ResonanceError(
                "multiplier**%d == 1 exactly: resonant at order %d"
                % (n - 1, n), order=n)
        mag = abs(d)
        if mag < _NEAR_RESONANCE_TOL:
            flags.append(n)
        recips[n] = 1.0 / (n * d)
        divisor_log[n] = math.log(mag)
    return recips, divisor_log, tuple(flags)


def _schroeder_sf(f: SFFunction, order: int) -> LinearizationSeries:
    recips, divisor_log, flags = _divisor_data(f.multiplier, order)
    p = np.ascontiguousarray(f.p.array(), dtype=complex)
    q = np.ascontiguousarray(f.q.array(), dtype=complex)
    mant = np.zeros(order + 1, dtype=complex)
    expo = np.zeros(order + 1, dtype=np.int64)
    kernels.schroeder_core(p, q, recips, order, mant, expo)
    return LinearizationSeries(multiplier=complex(f.multiplier),
                               coeff_mant=mant, coeff_exp=expo, order=order,
                               divisor_log=divisor_log,
                               near_resonance_flags=flags)


def _schroeder_germ(germ: TaylorSeries, order: int) -> LinearizationSeries:
    coeffs = germ.array()
    if complex(coeffs[0]) != 0:
        raise NormalizationError(
            "germ must have zero constant term (recenter it first)")
    if len(coeffs) < 2 or complex(coeffs[1]) == 0:
        raise NormalizationError("germ must have a nonzero linear term")
    lam = complex(coeffs[1])
    _, divisor_log, flags = _divisor_data(lam, order)
    deg = len(coeffs) - 1

    # composition recursion: phi_n = [w^n] sum_{k>=2} f_k phi^k
    # divided by (lam**n - lam), in extended-range tuples throughout
    zero = (0.0, 0.0, 0)
    one = xc.xfrom_complex(1.0 + 0j)
    phi = [zero] * (order + 1)
    phi[1] = one
    pows = [[zero] * (order + 1) for _ in range(deg + 1)]
    if deg >= 1:
        pows[1] = phi  # alias: row 1 is phi itself

    for n in range(2, order + 1):
        for k in range(2, deg + 1):
            if n < k:
                continue
            acc = zero
            for j in range(k - 1, n):
                t = phi[n - j]
                if t[0] == 0.0 and t[1] == 0.0:
                    continue
                s = pows[k - 1][j]
                if s[0] == 0.0 and s[1] == 0.0:
                    continue
                acc = xc.xadd(acc, xc.xmul(s, t))
            pows[k][n] = acc
        rhs = zero
        for k in range(2, min(deg, n) + 1):
            fk = complex(coeffs[k])
            if fk == 0:
                continue
            term = pows[k][n]
            if term[0] == 0.0 and term[1] == 0.0:
                continue
            rhs = xc.xadd(rhs, xc.xmul_c(term, fk))
        d = lam ** n - lam  # lam * (lam**(n-1) - 1), nonzero by validation
        phi[n] = xc.xmul_c(rhs, 1.0 / d)

    mant = np.zeros(order + 1, dtype=complex)
    expo = np.zeros(order + 1, dtype=np.int64)
    for n in range(order + 1):
        re, im, e = phi[n]
        mant[n] = complex(re, im)
        expo[n] = e
    return LinearizationSeries(multiplier=lam, coeff_mant=mant,
                               coeff_exp=expo, order=order,
                               divisor_log=divisor_log,
                               near_resonance_flags=flags)


def schroeder(source: Union[SFFunction, TaylorSeries],
              order: int) -> LinearizationSeries:
    """Linearization coefficients of `source` at its origin fixed point.

    `source` is either a structurally finite function (whose normalized
    form fixes 0 with derivative `multiplier`) or a local germ produced by
    `recenter`.  Exact resonance raises ResonanceError; multipliers off
    the unit circle are served by the same recursion (the divisors are
    then uniformly bounded away from zero).
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    if isinstance(source, SFFunction):
        return _schroeder_sf(source, order)
    if isinstance(source, TaylorSeries):
        return _schroeder_germ(source, order)
    raise TypeError("source must be an SFFunction or a TaylorSeries germ")


def recenter(f: SFFunction, fixed_point, order: int) -> TaylorSeries:
    """Local germ of f at one of its fixed points, in coordinates where
    the fixed point is the origin: g(w) = f(fp + w) - fp.

    The point must satisfy |f(fp) - fp| < 1e-10 * (1 + |fp|); the constant
    term of the germ is then forced to exactly zero.
    """
    fp = complex(fixed_point)
    residual = abs(f.evaluate(fp) - fp)
    if not residual < 1e-10 * (1.0 + abs(fp)):
        raise FixedPointError(
            "not a fixed point: |f(z) - z| = %.3e at z = %s"
            % (residual, fp))
    ts = f.taylor_at(fp, order)
    coeffs = list(ts.array())
    coeffs[0] = 0j
    return make_series(0j, coeffs, ts.trust_radius)


def _local_coefficients(local, n_needed: int) -> np.ndarray:
    if isinstance(local, SFFunction):
        arr = local.origin_series().array()
    elif isinstance(local, TaylorSeries):
        arr = local.array()
        if complex(arr[0]) != 0:
            raise NormalizationError("germ must have zero constant term")
    else:
        raise TypeError("local must be an SFFunction or a TaylorSeries germ")
    if len(arr) - 1 < n_needed:
        raise ValueError(
            "local data carries %d orders but %d are required"
            % (len(arr) - 1, n_needed))
    return np.asarray(arr[: n_needed + 1], dtype=complex)


def verify_conjugacy(local, lin: LinearizationSeries,
                     n_check: Optional[int] = None) -> float:
    """Largest relative residual of f(phi(w)) - phi(lam w) per order.

    The left side is recomposed from scratch (powers of phi maintained by
    extended-range convolution), so it shares no intermediates with the
    recursions in `schroeder`.  Each order's residual is normalized by
    max(1, |phi_n lam**n|): the coefficients themselves grow without bound
    for small-divisor multipliers, and an absolute residual would be
    meaningless there while a purely relative one would blow up on the
    zero coefficients of lacunary examples.
    """
    n_top = lin.order if n_check is None else int(n_check)
    if n_top < 2:
        raise ValueError("n_check must be at least 2")
    if n_top > lin.order:
        raise ValueError("n_check exceeds the computed order")
    c = _local_coefficients(local, n_top)
    lam = lin.multiplier

    pm = np.array(lin.coeff_mant[: n_top + 1])
    pe = np.array(lin.coeff_exp[: n_top + 1])
    acc_m = np.zeros(n_top + 1, dtype=complex)
    acc_e = np.zeros(n_top + 1, dtype=np.int64)
    pow_m, pow_e = pm.copy(), pe.copy()
    for m in range(1, n_top + 1):
        if m > 1:
            pow_m, pow_e = xc.xseries_mul(pow_m, pow_e, pm, pe, n_top)
        cm = complex(c[m])
        if cm == 0:
            continue
        for n in range(m, n_top + 1):
            t = xc.xmul_c(xc.xarr_get(pow_m, pow_e, n), cm)
            xc.xarr_set(acc_m, acc_e, n,
                        xc.xadd(xc.xarr_get(acc_m, acc_e, n), t))

    worst = 0.0
    lam_pow = lam
    for n in range(2, n_top + 1):
        lam_pow = lam_pow * lam  # lam**n, built by running product
        rhs = xc.xmul_c(xc.xarr_get(pm, pe, n), lam_pow)
        lhs = xc.xarr_get(acc_m, acc_e, n)
        num = xc.xabs(xc.xsub(lhs, rhs))
        den = max(1.0, xc.xabs(rhs))
        worst = max(worst, num / den)
    return worst


def radius_estimate(lin: LinearizationSeries,
                    window: int = _RADIUS_WINDOW) -> Optional[float]:
    """Convergence-radius estimate from the tail coefficient growth.

    Uses the median of log|phi_n| / n over the last `window` orders (the
    median keeps one straggler index from steering the answer), so the
    series must carry at least 2 * window orders.  Returns None when the
    tail is entirely negligible, as for an exactly linear map, where no
    growth rate exists to read."""
    if window < 1:
        raise ValueError("window must be positive")
    if lin.order < 2 * window:
        raise ValueError(
            "order %d is too small for a window of %d (need >= %d)"
            % (lin.order, window, 2 * window))
    rates = []
    for n in range(lin.order - window + 1, lin.order + 1):
        la = lin.log_abs_coefficient(n)
        if la > _NEGLIGIBLE_LOG:
            rates.append(la / n)
    if not rates:
        return None
    return math.exp(-statistics.median(rates))


def boundary_samples(lin: LinearizationSeries, fraction: float = 0.95,
                     count: int = 256) -> np.ndarray:
    """Images under phi of `count` equally spaced points on the circle of
    radius fraction * radius_estimate(lin).

    Refuses to sum a visibly diverging tail: when the largest term
    magnitude over the last tenth of the orders exceeds the largest over
    the earlier orders, the requested circle is outside the disk where the
    truncation means anything, and a smaller fraction is needed.
    """
    if not 0.0 < fraction:
        raise ValueError("fraction must be positive")
    if count < 1:
        raise ValueError("count must be positive")
    base = radius_estimate(lin)
    if base is None:
        raise SeriesDivergenceError(
            "no radius information: the coefficient tail is negligible")
    r = fraction * base
    log_r = math.log(r)
    term_logs = []
    for n in range(1, lin.order + 1):
        la = lin.log_abs_coefficient(n)
        if la > _NEGLIGIBLE_LOG:
            term_logs.append((n, la + n * log_r))
    split = max(2, lin.order - max(5, lin.order // 10))
    head = [t for n, t in term_logs if n < split]
    tail = [t for n, t in term_logs if n >= split]
    if head and tail and max(tail) > max(head):
        raise SeriesDivergenceError(
            "series terms still growing at radius %.6g: "
            "use a smaller fraction" % r)
    out = np.empty(count, dtype=complex)
    for k in range(count):
        angle = 2.0 * math.pi * k / count
        w = complex(r * math.cos(angle), r * math.sin(angle))
        out[k] = xc.xto_complex(
            xc.xseries_horner_eval(lin.coeff_mant, lin.coeff_exp, w))
    return out
