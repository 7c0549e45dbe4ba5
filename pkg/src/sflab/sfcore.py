"""The core function family: integrals of P(t) exp(Q(t)).

An SFFunction is f(z) = multiplier * integral_0^z P(t) exp(Q(t)) dt with the
normalization P(0) = 1 and Q(0) = 0, so f(0) = 0 and f'(0) = multiplier.
With Q identically zero f is a polynomial of degree deg(P) + 1; otherwise f
is entire of finite order with deg(P) critical points (counted with
multiplicity, the roots of P) and deg(Q) logarithmic-type asymptotic values,
one per direction in which exp(Q) decays fastest.

Evaluation uses the cached origin Taylor expansion inside its certified
trust radius and adaptive contour quadrature outside it, with extended-range
arithmetic so values beyond double range still have usable magnitudes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import polyroots, series, xcomplex as xc
from .errors import NormalizationError, PrecisionError, QuadratureError
from .quadrature import integrate_segment

_SERIES_ORDER = 64
_SERIES_RTOL = 1e-14
_SERIES_MASS_CAP = 1e3
_VALIDATION_RTOL = 1e-9
# critical points: wide enough to absorb the eps**(1/2) spread of a double
# root; singular values: plain floating-point dedup
_ROOT_CLUSTER_TOL = 1e-6
_DEDUPE_TOL = 1e-8


@dataclass(frozen=True)
class Polynomial:
    """Ascending-coefficient polynomial with the few operations needed here."""

    coefficients: tuple

    @classmethod
    def make(cls, coeffs) -> "Polynomial":
        arr = [complex(c) for c in coeffs]
        while arr and arr[-1] == 0:
            arr.pop()
        return cls(tuple(arr))

    @property
    def is_zero(self) -> bool:
        return len(self.coefficients) == 0

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial reported as degree 0."""
        return max(len(self.coefficients) - 1, 0)

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=np.complex128)) if np.ndim(z) else 0j
        if np.ndim(z):
            return npoly.polyval(np.asarray(z, dtype=np.complex128),
                                 np.asarray(self.coefficients))
        return series.ser_eval(np.asarray(self.coefficients), complex(z))

    def derivative(self) -> "Polynomial":
        c = self.coefficients
        return Polynomial.make([k * c[k] for k in range(1, len(c))])

    def antiderivative(self) -> "Polynomial":
        c = self.coefficients
        return Polynomial.make([0j] + [c[k] / (k + 1) for k in range(len(c))])

    def shifted(self, center: complex) -> "Polynomial":
        if self.is_zero:
            return self
        return Polynomial.make(series.poly_shift(np.asarray(self.coefficients), center))

    def array(self) -> np.ndarray:
        if self.is_zero:
            return np.zeros(1, dtype=np.complex128)
        return np.asarray(self.coefficients, dtype=np.complex128)

    def roots_with_multiplicity(self, cluster_tol: float = _DEDUPE_TOL) -> list:
        if self.degree == 0:
            return []
        return polyroots.clustered_roots(self.array(), cluster_tol=cluster_tol)


@dataclass(frozen=True)
class SingularData:
    """Everything about where the inverse branches of f can fail to exist."""

    critical_points: tuple        # ((location, multiplicity), ...)
    critical_values: tuple        # aligned with critical_points
    asymptotic_directions: tuple  # ray angles, radians, one per deg(Q)
    asymptotic_values: tuple      # aligned with directions
    singular_values: tuple        # union of the two value lists, deduplicated


@dataclass(frozen=True)
class SFFunction:
    multiplier: complex
    p: Polynomial
    q: Polynomial
    series_order: int = _SERIES_ORDER
    # caches filled in __post_init__
    _origin_coeffs: tuple = field(default=(), repr=False, compare=False)
    trust_radius: float = field(default=0.0, compare=False)

    def __post_init__(self):
        lam = complex(self.multiplier)
        if lam == 0:
            raise NormalizationError("the multiplier must be nonzero")
        object.__setattr__(self, "multiplier", lam)
        p = self.p if isinstance(self.p, Polynomial) else Polynomial.make(self.p)
        q = self.q if isinstance(self.q, Polynomial) else Polynomial.make(self.q)
        if p.is_zero or abs(p(0j) - 1.0) > 1e-12:
            raise NormalizationError(
                "P(0) must equal 1; use make_normalized to rescale"
            )
        if not q.is_zero and q.coefficients[0] != 0:
            raise NormalizationError(
                "Q(0) must equal 0; use make_normalized to rescale"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

        coeffs = self._build_origin_series(self.series_order)
        if q.is_zero:
            trust = math.inf
        else:
            # truncation must be negligible AND the partial sums must stay
            # well-conditioned (cancellation noise below ~1e-12 absolute)
            trust = min(
                series.certified_radius(coeffs, rel_tol=_SERIES_RTOL),
                series.conditioning_radius(coeffs, mass_cap=_SERIES_MASS_CAP),
            )
        object.__setattr__(self, "_origin_coeffs", tuple(coeffs))
        object.__setattr__(self, "trust_radius", float(trust))
        if not q.is_zero and trust > 0.0:
            self._cross_validate(coeffs, trust)

    # -- construction helpers -------------------------------------------

    def _build_origin_series(self, order: int) -> np.ndarray:
        """Taylor coefficients of f at 0 through z**order (exact truncation)."""
        if self.q.is_zero:
            g = self.p.array()
        else:
            eq = series.ser_exp(self.q.array(), order - 1 if order > 0 else 0)
            g = series.ser_mul(self.p.array(), eq, order - 1 if order > 0 else 0)
        f = series.ser_integrate(g, order)
        return self.multiplier * f

    def _cross_validate(self, coeffs, trust):
        r = 0.9 * min(trust, 4.0)
        for ang in (0.4, 2.3, 4.6):
            z = r * cmath.exp(1j * ang)
            via_series = series.ser_eval(np.asarray(coeffs), z)
            via_quad = self._quadrature_value(z).value
            gap = abs(via_series - via_quad)
            if gap > _VALIDATION_RTOL * (1.0 + abs(via_quad)):
                raise PrecisionError(
                    "origin series and quadrature disagree at |z|=%.3g "
                    "(gap %.2e); the function data is inconsistent" % (r, gap)
                )

    # -- basic data ------------------------------------------------------

    @property
    def poly_degree(self) -> int:
        """Number of critical points counted with multiplicity."""
        return self.p.degree

    @property
    def growth_degree(self) -> int:
        """Degree of Q; 0 means f is a polynomial."""
        return 0 if self.q.is_zero else self.q.degree

    @property
    def is_polynomial(self) -> bool:
        return self.q.is_zero

    def origin_series(self) -> series.TaylorSeries:
        return series.TaylorSeries(0j, self._origin_coeffs, self.series_order,
                                   self.trust_radius)

    def polynomial_coefficients(self) -> np.ndarray:
        """Exact coefficients of f when it is a polynomial."""
        if not self.is_polynomial:
            raise ValueError("not a polynomial: Q is nonzero")
        return self.multiplier * series.ser_integrate(self.p.array(),
                                                      self.p.degree + 1)

    # -- evaluation ------------------------------------------------------

    def _integrand_x(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        pv = self.p(pts)
        qv = self.q(pts)
        mant = np.empty(len(pts), dtype=np.complex128)
        exp = np.zeros(len(pts), dtype=np.int64)
        for i in range(len(pts)):
            e = xc.xexp(complex(qv[i]))
            v = xc.xmul_c(e, complex(pv[i]))
            mant[i] = complex(v[0], v[1])
            exp[i] = v[2]
        return mant, exp

    def _quadrature_value(self, z, rel_tol: float = 1e-12):
        res = integrate_segment(self._integrand_x, 0j, z, rel_tol=rel_tol)
        return QuadValue(xc.xmul_c(res.value_x, self.multiplier), res)

    def evaluate_x(self, z) -> tuple:
        """f(z) in extended-range form."""
        z = complex(z)
        if abs(z) <= self.trust_radius:
            return xc.xfrom_complex(
                series.ser_eval(np.asarray(self._origin_coeffs), z)
            )
        return self._quadrature_value(z).value_x

    def evaluate(self, z) -> complex:
        """f(z) as a plain complex; raises OverflowGuardError out of range."""
        return xc.xto_complex(self.evaluate_x(z))

    def __call__(self, z) -> complex:
        return self.evaluate(z)

    def derivative(self, z) -> complex:
        z = complex(z)
        return xc.xto_complex(self.derivative_x(z))

    def derivative_x(self, z) -> tuple:
        z = complex(z)
        return xc.xmul_c(xc.xexp(complex(self.q(z))),
                         self.multiplier * complex(self.p(z)))

    def taylor_at(self, center, order: int) -> series.TaylorSeries:
        """Expansion of f about any point within evaluation reach."""
        center = complex(center)
        if center == 0:
            coeffs = self._build_origin_series(order)
            r = math.inf if self.q.is_zero else min(
                series.certified_radius(coeffs, rel_tol=_SERIES_RTOL),
                series.conditioning_radius(coeffs, mass_cap=_SERIES_MASS_CAP),
            )
            return series.make_series(0j, coeffs, r)
        p_sh = self.p.shifted(center)
        q_sh = self.q.shifted(center)
        q0 = complex(q_sh.coefficients[0]) if not q_sh.is_zero else 0j
        q_local = np.asarray(q_sh.array(), dtype=np.complex128).copy()
        if len(q_local):
            q_local[0] = 0j
        eq = series.ser_exp(q_local, max(order - 1, 0))
        g = series.ser_mul(p_sh.array(), eq, max(order - 1, 0))
        inner = series.ser_integrate(g, order)
        scale = self.multiplier * cmath.exp(q0)
        coeffs = scale * inner
        coeffs[0] = self.evaluate(center)
        r = math.inf if self.q.is_zero else min(
            series.certified_radius(coeffs, rel_tol=_SERIES_RTOL),
            series.conditioning_radius(coeffs, mass_cap=_SERIES_MASS_CAP),
        )
        return series.make_series(center, coeffs, r)

    # -- singular structure ----------------------------------------------

    def critical_points(self, cluster_tol: float = _ROOT_CLUSTER_TOL) -> list:
        """Roots of P as (location, multiplicity); f' vanishes exactly there."""
        return self.p.roots_with_multiplicity(cluster_tol)

    def asymptotic_directions(self) -> list:
        """Ray angles along which exp(Q) dies fastest, one per deg(Q)."""
        if self.is_polynomial:
            return []
        qd = self.q.degree
        top = complex(self.q.coefficients[-1])
        base = (math.pi - cmath.phase(top)) / qd
        step = 2.0 * math.pi / qd
        return sorted((base + j * step) % (2.0 * math.pi) for j in range(qd))

    def asymptotic_values(self, tail_tol: float = 1e-14) -> list:
        """Limits of f along each asymptotic direction, by ray quadrature."""
        out = []
        for theta in self.asymptotic_directions():
            out.append(self._ray_limit(theta, tail_tol))
        return out

    def _ray_limit(self, theta: float, tail_tol: float) -> complex:
        u = cmath.exp(1j * theta)
        qd = self.q.derivative()
        pd = self.p.degree

        def decay_rate(T):
            # -d/dr of Re Q(r u) at r = T; positive means shrinking
            return -(complex(qd(T * u)) * u).real

        def log_mag(T):
            pv = abs(complex(self.p(T * u)))
            return (math.log(pv) if pv > 0 else -math.inf) + complex(self.q(T * u)).real

        T = 1.0
        grow = 0
        while grow < 80:
            rate = decay_rate(T)
            if rate > 0 and rate * T > 4.0 * max(pd, 1):
                tail_log = math.log(4.0) + log_mag(T) - math.log(rate)
                if tail_log < math.log(tail_tol):
                    break
            T *= 1.5
            grow += 1
        else:
            raise QuadratureError(
                "ray toward angle %.4f shows no certifiable decay" % theta
            )
        res = integrate_segment(self._integrand_x, 0j, T * u, rel_tol=1e-13)
        return xc.xto_complex(xc.xmul_c(res.value_x, self.multiplier))

    def singular_data(self, root_cluster_tol: float = _ROOT_CLUSTER_TOL,
                      value_dedupe_tol: float = _DEDUPE_TOL) -> SingularData:
        cps = self.critical_points(root_cluster_tol)
        cvs = tuple(self.evaluate(z) for z, _ in cps)
        dirs = tuple(self.asymptotic_directions())
        avs = tuple(self.asymptotic_values())
        merged = []
        for v in list(cvs) + list(avs):
            if not any(abs(v - w) <= value_dedupe_tol * (1.0 + abs(w))
                       for w in merged):
                merged.append(v)
        return SingularData(tuple(cps), cvs, dirs, avs, tuple(merged))


@dataclass(frozen=True)
class QuadValue:
    value_x: tuple
    detail: object

    @property
    def value(self):
        return xc.xto_complex(self.value_x)


def make_normalized(multiplier, p_coeffs, q_coeffs=()) -> tuple:
    """Build an SFFunction from unnormalized data.

    Folds P(0) and exp(Q(0)) into the multiplier and returns
    (function, scale) where scale is the factor absorbed: the same entire
    function, now written with P(0) = 1 and Q(0) = 0.
    """
    p = Polynomial.make(p_coeffs)
    q = Polynomial.make(q_coeffs)
    if p.is_zero:
        raise NormalizationError("P must not be the zero polynomial")
    c = complex(p(0j))
    if c == 0:
        raise NormalizationError("P(0) = 0 cannot be normalized away")
    d = complex(q(0j)) if not q.is_zero else 0j
    scale = c * cmath.exp(d)
    p_new = Polynomial.make([x / c for x in p.coefficients])
    q_new = q
    if d != 0:
        qq = list(q.coefficients)
        qq[0] -= d
        q_new = Polynomial.make(qq)
    return SFFunction(complex(multiplier) * scale, p_new, q_new), scale
