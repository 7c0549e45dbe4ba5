"""Continued fractions in exact integer arithmetic and Brjuno-sum reports.

The rotation number alpha enters everything downstream through its continued
fraction: the convergent denominators q_n drive the small divisors of the
linearizing series, and the partial sums of sum(log q_{n+1} / q_n) decide
whether a linearization can exist at all. Quotients and convergents are
arbitrary-precision integers throughout; floating point appears only in the
final logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import PrecisionError

LN2 = math.log(2.0)

# Generating a preset stops once a denominator would exceed this many decimal
# digits; the verdict for such expansions comes from the generation rule.
PRESET_DIGIT_CAP = 10 ** 6

DEFAULT_TAIL_TOL = 1e-6
DEFAULT_DIVERGENCE_WINDOW = 10
DEFAULT_DIVERGENCE_FLOOR = 0.01


def log_of_int(n: int) -> float:
    """Natural log of a positive integer of any bit length."""
    if n <= 0:
        raise ValueError("log_of_int needs a positive integer")
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 64
    return math.log(n >> shift) + shift * LN2


def _term(q_next: int, q: int) -> float:
    """log(q_next)/q with big integers, underflowing gracefully to 0."""
    num = log_of_int(q_next)
    if q.bit_length() <= 900:
        return num / q
    return math.exp(math.log(num) - log_of_int(q))


@dataclass(frozen=True)
class ContinuedFraction:
    """A finite continued fraction expansion with its convergents.

    convergents[n] = (p_n, q_n) starting at n = 0 with (a_0, 1), so the
    denominators satisfy q_{n+1} = a_{n+1} q_n + q_{n-1} with q_0 = 1.
    """

    integer_part: int
    partial_quotients: tuple
    convergents: tuple
    source: str
    terminated: bool = False
    truncated_by_precision: bool = False
    capped: bool = False
    term_lower_bound: Optional[float] = None
    label: Optional[str] = None

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    def denominators(self):
        return [q for _, q in self.convergents]

    def value(self) -> Fraction:
        """The rational represented by the deepest convergent."""
        p, q = self.convergents[-1]
        return Fraction(p, q)


def _build(a0: int, quotients: Sequence[int], source: str, **flags) -> ContinuedFraction:
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    convergents = [(p, q)]
    for a in quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        convergents.append((p, q))
    return ContinuedFraction(
        integer_part=a0,
        partial_quotients=tuple(int(a) for a in quotients),
        convergents=tuple(convergents),
        source=source,
        **flags,
    )


def _euclid(x: Fraction, depth: int):
    """Partial quotients of x by the Gauss map; returns (a0, quotients, terminated)."""
    a0 = math.floor(x)
    frac = x - a0
    quotients = []
    terminated = frac == 0
    while frac != 0 and len(quotients) < depth:
        inv = 1 / frac
        a = math.floor(inv)
        quotients.append(a)
        frac = inv - a
        if frac == 0:
            terminated = True
    return a0, quotients, terminated


def _parse_decimal(text: str):
    """A decimal literal as (value, stated digit count after the point)."""
    s = text.strip()
    if "/" in s or "e" in s.lower():
        raise ValueError("not a plain decimal literal: %r" % text)
    neg = s.startswith("-")
    if neg or s.startswith("+"):
        s = s[1:]
    if "." in s:
        whole, _, tail = s.partition(".")
    else:
        whole, tail = s, ""
    if not (whole + tail).isdigit() or not (whole or tail):
        raise ValueError("not a decimal literal: %r" % text)
    digits = len(tail)
    value = Fraction(int(whole + tail) if whole + tail else 0, 10 ** digits)
    return (-value if neg else value), digits


def expand(alpha: Union[Fraction, int, str, float], depth: int,
           precision: Optional[int] = None) -> ContinuedFraction:
    """Expand a rotation number given exactly or as a decimal approximation.

    A Fraction, an int, or a string containing "/" is exact: the Euclidean
    algorithm runs to termination or to `depth`. A decimal string carries a
    stated precision (its digit count unless `precision` overrides); the
    expansion emits quotients only while the whole uncertainty interval
    agrees on them and then stops with truncated_by_precision set.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")

    if isinstance(alpha, float):
        alpha = repr(alpha)

    if isinstance(alpha, str) and "/" in alpha:
        num, _, den = alpha.partition("/")
        alpha = Fraction(int(num), int(den))

    if isinstance(alpha, (Fraction, int)):
        x = Fraction(alpha)
        a0, quotients, terminated = _euclid(x, depth)
        return _build(a0, quotients, "exact-rational", terminated=terminated)

    value, digits = _parse_decimal(alpha)
    if precision is not None:
        digits = precision
    if digits < 1:
        raise PrecisionError("decimal input carries no usable precision")
    eps = Fraction(1, 2 * 10 ** digits)
    lo_a0, lo_q, lo_term = _euclid(value - eps, depth)
    hi_a0, hi_q, hi_term = _euclid(value + eps, depth)
    if lo_a0 != hi_a0:
        raise PrecisionError("integer part not determined by stated precision")
    agreed = []
    for a, b in zip(lo_q, hi_q):
        if a != b:
            break
        agreed.append(a)
    truncated = len(agreed) < depth
    return _build(lo_a0, agreed, "decimal-approx", truncated_by_precision=truncated)


def preset(name: str, depth: int, growth: int = 2) -> ContinuedFraction:
    """Named expansions: golden, silver, liouville_demo.

    golden and silver are the all-ones and all-twos quotient streams for
    (sqrt(5)-1)/2 and sqrt(2)-1. liouville_demo generates a_{n+1} =
    growth**q_n, a stream violent enough that the Brjuno sum diverges;
    generation stops once a denominator would exceed PRESET_DIGIT_CAP decimal
    digits and the report then argues from the growth rule instead of the sum.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if name == "golden":
        return _build(0, [1] * depth, "preset", label="golden")
    if name == "silver":
        return _build(0, [2] * depth, "preset", label="silver")
    if name == "liouville_demo":
        if growth < 2:
            raise ValueError("liouville_demo needs growth >= 2")
        quotients = [1]
        q_prev, q = 1, 1  # q_0, q_1
        capped = False
        while len(quotients) < depth:
            # next quotient is growth**q; its digit count is q*log10(growth)
            digits = q * math.log10(growth)
            if digits > PRESET_DIGIT_CAP:
                capped = True
                break
            a = growth ** q
            quotients.append(a)
            q_prev, q = q, a * q + q_prev
        return _build(
            0, quotients, "preset",
            capped=capped,
            term_lower_bound=math.log(growth) if capped else None,
            label="liouville_demo:%d" % growth,
        )
    raise ValueError("unknown preset %r" % name)


@dataclass(frozen=True)
class BrjunoReport:
    """Partial sums of sum(log q_{n+1} / q_n) and a convergence verdict."""

    partial_sums: tuple
    terms: tuple
    verdict: str
    depth: int
    tail_tol: float
    last_gap: Optional[float] = None
    tail_bound: Optional[float] = None


def brjuno_partial_sums(cf: ContinuedFraction, depth: Optional[int] = None,
                        tail_tol: float = DEFAULT_TAIL_TOL,
                        divergence_window: int = DEFAULT_DIVERGENCE_WINDOW,
                        divergence_floor: float = DEFAULT_DIVERGENCE_FLOOR) -> BrjunoReport:
    """Sum the Brjuno series over the available convergents and judge it.

    convergent-likely needs the last gap below tail_tol plus a geometric
    tail bound below tail_tol; divergent-likely needs either a certified
    positive lower bound on all further terms (capped presets) or a window
    of terms bounded away from zero. A terminated expansion is rational and
    gets no sums at all.
    """
    if cf.terminated:
        return BrjunoReport((), (), "rational", 0, tail_tol)

    available = len(cf.convergents) - 1
    use = available if depth is None else min(depth, available)
    terms = []
    for n in range(use):
        q_n = cf.convergents[n][1]
        q_n1 = cf.convergents[n + 1][1]
        terms.append(_term(q_n1, q_n))
    sums = []
    acc = 0.0
    for t in terms:
        acc += t
        sums.append(acc)

    verdict = "inconclusive"
    last_gap = terms[-1] if terms else None
    tail_bound = None

    if cf.capped and cf.term_lower_bound and cf.term_lower_bound > 0:
        verdict = "divergent-likely"
    elif len(terms) >= 2:
        window = terms[-min(divergence_window, len(terms)):]
        ratios = [b / a for a, b in zip(window, window[1:]) if a > 0]
        if ratios:
            rho = max(ratios)
            if rho < 1.0 and last_gap is not None:
                tail_bound = window[-1] * rho / (1.0 - rho)
                if last_gap < tail_tol and tail_bound < tail_tol:
                    verdict = "convergent-likely"
        if verdict == "inconclusive" and len(window) >= divergence_window:
            if min(window) >= divergence_floor:
                verdict = "divergent-likely"

    return BrjunoReport(tuple(sums), tuple(terms), verdict, use, tail_tol,
                        last_gap=last_gap, tail_bound=tail_bound)


def rotation_to_lambda(cf: ContinuedFraction, precision: int = 17) -> complex:
    """exp(2*pi*i*alpha) from the deepest convergent.

    The convergent is reduced mod 1 exactly before any rounding, so the only
    floating error is one correctly rounded quotient and the trig calls.
    Doubles cap the useful precision near 17 digits; asking for less than 15
    is refused to honor the documented floor.
    """
    if precision < 15:
        raise PrecisionError("rotation_to_lambda supports precision >= 15 only")
    frac = cf.value() % 1
    angle = 2.0 * math.pi * float(frac)
    return complex(math.cos(angle), math.sin(angle))


def alpha_float(cf: ContinuedFraction) -> float:
    """The rotation number as a double (deepest convergent, reduced mod 1)."""
    return float(cf.value() % 1)


def rational_approx(x: float, max_denominator: int):
    """Best rational p/q with q <= max_denominator, via the Gauss map.

    Returns (Fraction, distance). Used to spot (near-)rational rotation
    numbers, e.g. root-of-unity multipliers.
    """
    best = Fraction(x).limit_denominator(max_denominator)
    return best, abs(x - float(best))
