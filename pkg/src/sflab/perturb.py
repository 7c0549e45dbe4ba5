"""One-parameter perturbation families and their rescaled limits.

Two kinds of family around a normalized base function f with multiplier
lam, integrand polynomial P, and exponent polynomial Q:

- critical (requires deg P >= 1): f[b] = f + (1/b) * integral of t e^{Q(t)},
  which in normalized form replaces P by P(t) + t / (lam * b);
- singularity (requires deg P = 0, deg Q >= 1): the exponent Q becomes
  Q(t) + t / b.

The rescaled member F_b(z) = (1/b) f[b](b z) stays well defined as b -> 0:
substituting bs into the base polynomials gives, for the critical kind,
F_b(z) = lam * integral of (P(bs) + s/lam) e^{Q(bs)} ds, whose b = 0 limit
is exactly lam*z + z**2/2, and for the singularity kind
F_b(z) = lam * integral of e^{Q(bs) + s} ds, whose limit is exactly
lam*(e^z - 1).  All members are assembled by exact coefficient transforms
(substitute bs, multiply series, integrate termwise), never by numerically
rescaling evaluations, so the limits hold to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (FamilyKindError, PrecisionError, ResonanceError,
                     SFLabError)
from .series import TaylorSeries, make_series, ser_exp, ser_mul
from .sfcore import Polynomial, SFFunction

KIND_CRITICAL = "critical"
KIND_SINGULARITY = "singularity"

_POLE_TOL = 1e-9


@dataclass(frozen=True)
class PerturbationFamily:
    """A base function together with the kind of perturbation applied."""

    base: SFFunction
    kind: str

    def __post_init__(self):
        if self.kind not in (KIND_CRITICAL, KIND_SINGULARITY):
            raise FamilyKindError(
                "kind must be %r or %r, got %r"
                % (KIND_CRITICAL, KIND_SINGULARITY, self.kind))
        p_deg = self.base.p.degree
        q_deg = self.base.q.degree
        if self.kind == KIND_CRITICAL and p_deg < 1:
            raise FamilyKindError(
                "critical kind needs deg P >= 1 (base has deg P = %d)"
                % p_deg)
        if self.kind == KIND_SINGULARITY and (p_deg != 0 or q_deg < 1):
            raise FamilyKindError(
                "singularity kind needs deg P = 0 and deg Q >= 1 "
                "(base has deg P = %d, deg Q = %d)" % (p_deg, q_deg))


@dataclass(frozen=True)
class RescaledMember:
    """F_b as a truncated expansion plus its exact closed form."""

    b: complex
    series: TaylorSeries
    closed_form: SFFunction


@dataclass(frozen=True)
class HartogsGrid:
    """H(b, z) = z / (F_b^n(z) - z) sampled on a rectangle.

    pole_mask marks cells whose denominator nearly vanishes (a periodic
    point of F_b nearby); overflow_mask marks cells whose forward orbit
    left representable range before completing the period."""

    b: complex
    period: int
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    pole_mask: np.ndarray
    overflow_mask: np.ndarray
    center_value: complex


def family_member(fam: PerturbationFamily, b) -> SFFunction:
    """The family element f[b] for nonzero b, as a normalized function."""
    b = complex(b)
    if b == 0:
        raise ValueError(
            "b must be nonzero: the b -> 0 limit lives in rescaled_member")
    base = fam.base
    lam = base.multiplier
    if fam.kind == KIND_CRITICAL:
        p = list(base.p.array())
        while len(p) < 2:
            p.append(0j)
        p[1] = p[1] + 1.0 / (lam * b)
        return SFFunction(lam, Polynomial.make(p), base.q)
    q = list(base.q.array())
    while len(q) < 2:
        q.append(0j)
    q[1] = q[1] + 1.0 / b
    return SFFunction(lam, base.p, Polynomial.make(q))


def _substituted(coeffs, b: complex) -> list:
    """Coefficients of poly(b * s) from those of poly(t): c_k -> c_k b**k."""
    out = []
    scale = 1.0 + 0j
    for k, c in enumerate(coeffs):
        if k > 0:
            scale = scale * b
        out.append(complex(c) * scale)
    return out


def _rescaled_closed(fam: PerturbationFamily, b: complex) -> SFFunction:
    base = fam.base
    lam = base.multiplier
    if fam.kind == KIND_CRITICAL:
        p = _substituted(base.p.array(), b)
        while len(p) < 2:
            p.append(0j)
        p[1] = p[1] + 1.0 / lam
        q = _substituted(base.q.array(), b) if not base.q.is_zero else []
        return SFFunction(lam, Polynomial.make(p), Polynomial.make(q))
    q = _substituted(base.q.array(), b)
    while len(q) < 2:
        q.append(0j)
    q[1] = q[1] + 1.0
    return SFFunction(lam, Polynomial.make([1.0]), Polynomial.make(q))


def rescaled_member(fam: PerturbationFamily, b,
                    order: int) -> RescaledMember:
    """F_b expanded at the origin through `order`, plus its closed form.

    The b = 0 coefficients are written down literally (lam, 1/2, or
    lam/k!), not produced by arithmetic that merely rounds to them."""
    if order < 2:
        raise ValueError("order must be at least 2")
    b = complex(b)
    lam = fam.base.multiplier
    closed = _rescaled_closed(fam, b)

    coeffs = np.zeros(order + 1, dtype=complex)
    if b == 0:
        coeffs[1] = lam
        if fam.kind == KIND_CRITICAL:
            coeffs[2] = 0.5
        else:
            fact = 1
            for k in range(2, order + 1):
                fact *= k
                coeffs[k] = lam / fact
    else:
        if fam.kind == KIND_CRITICAL:
            integrand_p = np.zeros(order, dtype=complex)
            sub_p = _substituted(fam.base.p.array(), b)
            for k, c in enumerate(sub_p[:order]):
                integrand_p[k] = c
            if order >= 2:
                integrand_p[1] = integrand_p[1] + 1.0 / lam
            expo = ser_exp(_substituted(fam.base.q.array(), b), order - 1)
            integrand = ser_mul(integrand_p, expo, order - 1)
        else:
            u = _substituted(fam.base.q.array(), b)
            while len(u) < 2:
                u.append(0j)
            u[1] = u[1] + 1.0
            integrand = ser_exp(u, order - 1)
        for k in range(order):
            coeffs[k + 1] = lam * integrand[k] / (k + 1)
        coeffs[0] = 0j
        coeffs[1] = lam  # integrand[0] == 1 exactly; keep the bit pattern
    series = make_series(0j, coeffs, closed.trust_radius)
    return RescaledMember(b=b, series=series, closed_form=closed)


def remainder_h(fam: PerturbationFamily, b, order: int) -> TaylorSeries:
    """The remainder F_b - F_0 with indices 0 and 1 exactly zero.

    Both members share the constant term 0 and linear term lam by
    construction; if their computed low orders ever disagreed beyond
    1e-14 that would be an internal inconsistency, reported rather than
    silently subtracted away."""
    rb = rescaled_member(fam, b, order)
    r0 = rescaled_member(fam, 0, order)
    cb = rb.series.array()
    c0 = r0.series.array()
    lam_scale = 1.0 + abs(fam.base.multiplier)
    for idx in (0, 1):
        drift = abs(cb[idx] - c0[idx])
        if drift > 1e-14 * lam_scale:
            raise PrecisionError(
                "low-order coefficient %d drifted by %.3e between F_b and "
                "F_0" % (idx, drift))
    diff = cb - c0
    diff[0] = 0j
    diff[1] = 0j
    trust = min(rb.series.trust_radius, r0.series.trust_radius)
    return make_series(0j, diff, trust)


def hartogs_grid(fam: PerturbationFamily, b, period: int, window,
                 resolution) -> HartogsGrid:
    """Sample H(b, z) = z / (F_b^n(z) - z) over a rectangle.

    Grid cells exactly at z = 0 receive the removable-limit value
    1/(lam**n - 1); cells whose denominator magnitude falls below
    1e-9 * (1 + |z|) are pole-flagged; orbits that overflow or cannot be
    evaluated mark the cell in overflow_mask with a nan value.  Rows are
    assembled in a fixed order, so the output is deterministic.
    """
    if period < 1:
        raise ValueError("period must be at least 1")
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("window must satisfy x0 < x1 and y0 < y1")
    nx, ny = (int(v) for v in resolution)
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be positive in both directions")
    lam = fam.base.multiplier
    lam_n = lam ** period
    if lam_n == 1.0:
        raise ResonanceError(
            "multiplier**period == 1: H(b, 0) is undefined", order=period)
    center_value = 1.0 / (lam_n - 1.0)

    member = _rescaled_closed(fam, complex(b))
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    values = np.zeros((ny, nx), dtype=complex)
    pole_mask = np.zeros((ny, nx), dtype=bool)
    overflow_mask = np.zeros((ny, nx), dtype=bool)
    for iy in range(ny):
        for ix in range(nx):
            z = complex(xs[ix], ys[iy])
            if z == 0:
                values[iy, ix] = center_value
                continue
            w = z
            bad = False
            for _ in range(period):
                try:
                    w = member.evaluate(w)
                except SFLabError:
                    bad = True
                    break
                if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                    bad = True
                    break
            if bad:
                values[iy, ix] = complex(math.nan, math.nan)
                overflow_mask[iy, ix] = True
                continue
            denom = w - z
            if abs(denom) < _POLE_TOL * (1.0 + abs(z)):
                pole_mask[iy, ix] = True
                if denom == 0:
                    values[iy, ix] = complex(math.nan, math.nan)
                    continue
            values[iy, ix] = z / denom
    return HartogsGrid(b=complex(b), period=int(period), xs=xs, ys=ys,
                       values=values, pole_mask=pole_mask,
                       overflow_mask=overflow_mask,
                       center_value=center_value)
