"""Truncated Taylor series and the handful of series operations everything
else leans on.

Coefficients are ascending numpy complex arrays. All operations are
truncations of the exact power series operations; nothing here estimates
anything except `certified_radius`, which turns a coefficient tail into a
radius on which the truncation error is provably below a relative tolerance
(provided the tail keeps decaying at the observed rate, which holds for the
entire functions this package builds since their coefficients are eventually
super-geometric).

The exponential of a series with zero constant term uses the standard linear
recurrence obtained from E' = u' E:

    n E_n = sum_{j=1..n} j u_j E_{n-j},   E_0 = 1

which costs O(deg(u) * N) and rounds like a Horner loop, with no call to a
transcendental per coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class TaylorSeries:
    """A truncated expansion sum_k c_k (z - center)**k.

    trust_radius bounds where the truncation may be summed: inside it the
    next-term bound stays below the certified relative tolerance. Infinite
    for exact polynomials, 0.0 when no radius could be certified.
    """

    center: complex
    coefficients: tuple
    order: int
    trust_radius: float

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("coefficient count must be order + 1")

    def array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=np.complex128)

    def __call__(self, z: complex) -> complex:
        return ser_eval(self.array(), complex(z) - self.center)


def make_series(center, coeffs, trust_radius) -> TaylorSeries:
    coeffs = tuple(complex(c) for c in coeffs)
    return TaylorSeries(complex(center), coeffs, len(coeffs) - 1, float(trust_radius))


def ser_eval(coeffs, w: complex) -> complex:
    """Horner evaluation of sum c_k w**k."""
    acc = 0j
    w = complex(w)
    for c in coeffs[::-1]:
        acc = acc * w + complex(c)
    return acc


def ser_mul(a, b, order: int) -> np.ndarray:
    """Cauchy product truncated at `order`."""
    out = np.convolve(np.asarray(a), np.asarray(b))[: order + 1]
    if len(out) < order + 1:
        out = np.pad(out, (0, order + 1 - len(out)))
    return np.asarray(out, dtype=np.complex128)


def ser_exp(u, order: int) -> np.ndarray:
    """exp of a series with zero constant term, truncated at `order`."""
    u = np.asarray(u, dtype=np.complex128)
    if len(u) and u[0] != 0:
        raise ValueError("ser_exp needs a zero constant term")
    out = np.zeros(order + 1, dtype=np.complex128)
    out[0] = 1.0
    top = len(u) - 1
    for n in range(1, order + 1):
        acc = 0j
        for j in range(1, min(n, top) + 1):
            acc += j * u[j] * out[n - j]
        out[n] = acc / n
    return out


def ser_integrate(g, order: int) -> np.ndarray:
    """Termwise antiderivative with zero constant, truncated at `order`."""
    g = np.asarray(g, dtype=np.complex128)
    out = np.zeros(order + 1, dtype=np.complex128)
    top = min(order, len(g))
    for k in range(1, top + 1):
        out[k] = g[k - 1] / k
    return out


def ser_compose(outer, inner, order: int) -> np.ndarray:
    """outer(inner(w)) truncated at `order`; inner must kill the constant."""
    inner = np.asarray(inner, dtype=np.complex128)
    if len(inner) and inner[0] != 0:
        raise ValueError("composition needs inner constant term zero")
    acc = np.zeros(order + 1, dtype=np.complex128)
    for c in np.asarray(outer, dtype=np.complex128)[::-1]:
        acc = ser_mul(acc, inner, order)
        acc[0] += c
    return acc


def poly_shift(coeffs, center: complex) -> np.ndarray:
    """Coefficients of p(center + s) from those of p(t), exactly (binomials)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n = len(coeffs)
    out = np.zeros(n, dtype=np.complex128)
    # Horner-style synthetic shift: repeated division by (t - center)
    work = coeffs.copy()
    for k in range(n):
        acc = 0j
        for j in range(n - 1 - k, -1, -1):
            acc = acc * center + work[j + k] * math.comb(j + k, k)
        out[k] = acc
    # The loop above recomputes binomial sums directly; cheap at these degrees.
    return out


def certified_radius(coeffs, rel_tol: float = 1e-14,
                     window: int = 10) -> float:
    """Largest radius where the next-term bound is below rel_tol relatively.

    The input is treated as the truncation of an infinite series: trailing
    zeros carry no information (lacunary series have zeros between live
    terms), so the tail is extrapolated from the growth between the last
    well-separated pair of nonzero coefficients and bounded by a geometric
    series from there. Returns inf only for the identically zero input,
    0.0 when nothing can be certified. Callers who know the input is an
    exact polynomial should not call this at all.
    """
    a = np.abs(np.asarray(coeffs, dtype=np.complex128))
    nz = np.nonzero(a)[0]
    if len(nz) == 0:
        return math.inf
    last = int(nz[-1])
    if len(nz) < 2:
        return 0.0
    # reference coefficient roughly `window` orders below the last live one
    below = nz[nz <= max(last - window, int(nz[0]))]
    prev = int(below[-1]) if len(below) else int(nz[0])
    if prev == last:
        prev = int(nz[-2])
    w = last - prev
    growth = (a[last] / a[prev]) ** (1.0 / w)

    def ok(r: float) -> bool:
        q = growth * r
        if q >= 0.9:
            return False
        with np.errstate(over="ignore"):
            scale = float(np.polyval(a[::-1], r))
            tail = a[last] * r ** last * q / (1.0 - q)
        if not (math.isfinite(scale) and math.isfinite(tail)):
            return False
        return tail <= rel_tol * max(scale, 1e-300)

    if not ok(1e-12):
        return 0.0
    lo, hi = 1e-12, 1e-12
    while ok(hi * 2.0) and hi < 1e12:
        hi *= 2.0
    hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def conditioning_radius(coeffs, mass_cap: float = 1e3) -> float:
    """Largest radius where sum |c_k| r**k stays below mass_cap.

    Summing the series at radius r carries rounding noise of order
    eps * sum |c_k| r**k regardless of truncation order, so a partial sum
    that cancels down to a small value is only trustworthy while this mass
    is modest. With the default cap the absolute noise stays near 2e-13.
    Returns inf when the mass never reaches the cap (e.g. the zero series).
    """
    a = np.abs(np.asarray(coeffs, dtype=np.complex128))
    if not np.any(a):
        return math.inf

    def mass(r: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.polyval(a[::-1], r))

    if mass(1e-12) > mass_cap:
        return 0.0
    hi = 1e-12
    while mass(hi * 2.0) <= mass_cap:
        hi *= 2.0
        if hi > 1e15:
            return math.inf
    lo = hi
    hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mass(mid) <= mass_cap:
            lo = mid
        else:
            hi = mid
    return lo
