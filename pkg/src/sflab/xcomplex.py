"""Extended-range complex arithmetic.

Orbits of entire maps and linearizing power series leave the double range
long before they stop being mathematically meaningful: a coefficient such as
phi_400 of a Siegel linearization is routinely 10^500 or more. Values here
are (mantissa, exponent) pairs meaning ``mantissa * 2**exponent`` with the
mantissa a complex double kept near unit magnitude, so all rounding happens
in ordinary double precision while magnitude lives in an exact integer
exponent.

Scalars are plain tuples ``(re, im, exp)``; array series use parallel numpy
arrays (complex mantissa, int64 exponent). The tuple form keeps the hot
reference loops free of attribute lookups, and the compiled kernels mirror
the exact same operation order so both lanes round identically.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import OverflowGuardError

LN2 = math.log(2.0)
LOG10_2 = math.log10(2.0)

XZERO = (0.0, 0.0, 0)

# Exponents beyond this are collapsed to inf/0 on conversion attempts.
_MAX_SAFE_EXP = 1000


def xnorm(re, im, e):
    """Renormalize so the larger mantissa component sits in [0.5, 1)."""
    m = max(abs(re), abs(im))
    if m == 0.0:
        return XZERO
    if not math.isfinite(m):
        return (re, im, e)
    _, k = math.frexp(m)
    return (math.ldexp(re, -k), math.ldexp(im, -k), e + k)


def xfrom_complex(z):
    return xnorm(z.real, z.imag, 0)


def xis_zero(a):
    return a[0] == 0.0 and a[1] == 0.0


def xmul(a, b):
    ar, ai, ae = a
    br, bi, be = b
    return xnorm(ar * br - ai * bi, ar * bi + ai * br, ae + be)


def xmul_c(a, z):
    """Multiply an extended value by a plain complex."""
    ar, ai, ae = a
    return xnorm(ar * z.real - ai * z.imag, ar * z.imag + ai * z.real, ae)


def xneg(a):
    return (-a[0], -a[1], a[2])


def xadd(a, b):
    """Add with alignment to the larger exponent.

    Mirrors double addition: the smaller operand is shifted down and the sum
    rounds in double precision. A shift past ~1074 bits underflows to zero,
    exactly as the corresponding double addition would.
    """
    if xis_zero(a):
        return b
    if xis_zero(b):
        return a
    d = a[2] - b[2]
    if d >= 0:
        if d > 1100:
            return a
        return xnorm(a[0] + math.ldexp(b[0], -d), a[1] + math.ldexp(b[1], -d), a[2])
    d = -d
    if d > 1100:
        return b
    return xnorm(b[0] + math.ldexp(a[0], -d), b[1] + math.ldexp(a[1], -d), b[2])


def xsub(a, b):
    return xadd(a, xneg(b))


def xabs(a):
    """Magnitude as a double; inf on overflow, 0.0 on underflow."""
    m = math.hypot(a[0], a[1])
    if m == 0.0:
        return 0.0
    try:
        return math.ldexp(m, a[2])
    except OverflowError:
        return math.inf


def xlog_abs(a):
    """Natural log of the magnitude; -inf for zero."""
    m = math.hypot(a[0], a[1])
    if m == 0.0:
        return -math.inf
    return math.log(m) + a[2] * LN2


def xto_complex(a, strict=True):
    """Collapse to a plain complex.

    With strict=True an exponent outside the double range raises
    OverflowGuardError instead of producing inf or 0 silently.
    """
    if xis_zero(a):
        return 0j
    if strict and abs(a[2]) > _MAX_SAFE_EXP:
        raise OverflowGuardError(
            "value with base-2 exponent %d left the double range" % a[2]
        )
    try:
        return complex(math.ldexp(a[0], a[2]), math.ldexp(a[1], a[2]))
    except OverflowError:
        if strict:
            raise OverflowGuardError(
                "value with base-2 exponent %d left the double range" % a[2]
            ) from None
        return complex(_ldexp_saturating(a[0], a[2]),
                       _ldexp_saturating(a[1], a[2]))


def _ldexp_saturating(x, e):
    if x == 0.0:
        return 0.0
    try:
        return math.ldexp(x, e)
    except OverflowError:
        return math.copysign(math.inf, x)


def xexp(w):
    """exp(w) for complex w of any real part, as an extended value."""
    k = int(math.floor(w.real / LN2)) if math.isfinite(w.real) else 0
    m = cmath.exp(complex(w.real - k * LN2, w.imag))
    return xnorm(m.real, m.imag, k)


def xrecip(a):
    """1 / a via mantissa division (mantissa near unit scale, safe)."""
    ar, ai, ae = a
    if ar == 0.0 and ai == 0.0:
        raise ZeroDivisionError("extended-range reciprocal of zero")
    m = 1.0 / complex(ar, ai)
    return xnorm(m.real, m.imag, -ae)


def xpow_int(a, n):
    out = (1.0, 0.0, 0)
    base = a
    k = n
    while k > 0:
        if k & 1:
            out = xmul(out, base)
        base = xmul(base, base)
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# Array form: a truncated series as (mantissa complex128[n], exponent int64[n])


def xarr_zeros(n):
    return np.zeros(n, dtype=np.complex128), np.zeros(n, dtype=np.int64)


def xarr_from_complex(values):
    values = np.asarray(values, dtype=np.complex128)
    mant = np.empty_like(values)
    exp = np.zeros(len(values), dtype=np.int64)
    for i, z in enumerate(values):
        r, j, e = xfrom_complex(complex(z))
        mant[i] = complex(r, j)
        exp[i] = e
    return mant, exp


def xarr_set(mant, exp, i, a):
    mant[i] = complex(a[0], a[1])
    exp[i] = a[2]


def xarr_get(mant, exp, i):
    z = mant[i]
    return (z.real, z.imag, int(exp[i]))


def xarr_log_abs(mant, exp):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(mant)) + exp * LN2


def xarr_to_complex(mant, exp, strict=True):
    out = np.empty(len(mant), dtype=np.complex128)
    for i in range(len(mant)):
        out[i] = xto_complex(xarr_get(mant, exp, i), strict=strict)
    return out


def xarr_scale_pointwise(mant, exp, factors):
    """Multiply entry n by a plain complex factor (e.g. lambda**n)."""
    out_m = np.empty_like(mant)
    out_e = np.empty_like(exp)
    for i in range(len(mant)):
        a = xmul_c(xarr_get(mant, exp, i), complex(factors[i]))
        out_m[i] = complex(a[0], a[1])
        out_e[i] = a[2]
    return out_m, out_e


def xseries_mul(am, ae, bm, be, order):
    """Cauchy product of two extended-range series, truncated at `order`."""
    n = order + 1
    out_m = np.zeros(n, dtype=np.complex128)
    out_e = np.zeros(n, dtype=np.int64)
    la, lb = len(am), len(bm)
    for k in range(n):
        acc = XZERO
        lo = max(0, k - lb + 1)
        hi = min(k, la - 1)
        for i in range(lo, hi + 1):
            acc = xadd(acc, xmul(xarr_get(am, ae, i), xarr_get(bm, be, k - i)))
        xarr_set(out_m, out_e, k, acc)
    return out_m, out_e


def xseries_horner_eval(mant, exp, w):
    """Evaluate sum_n c_n w**n at complex w, highest order first."""
    acc = XZERO
    xw = xfrom_complex(w)
    for i in range(len(mant) - 1, 0, -1):
        acc = xmul(xadd(acc, xarr_get(mant, exp, i)), xw)
    return xadd(acc, xarr_get(mant, exp, 0))
