"""Forward orbits, periodic points, cycle classification, and orbit probes.

The orbit engine hands the hot loop to the kernel lane whenever the current
point sits inside the trust radius of the origin series (for polynomials
that is everywhere), and falls back to direct evaluation otherwise, so a
single orbit can weave between the fast truncated-series iteration and the
slow quadrature-backed evaluation without losing determinism.

Magnitudes that leave double range are handled in extended-range form;
orbits are classified as escaped, budget-bounded, converged to an
attracting cycle, or overflowed, matching the kernel status codes.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from . import xcomplex as xc
from .errors import SFLabError
from .sfcore import SFFunction

DEFAULT_ESCAPE_RADIUS = 1e3

_CYCLE_TOL = 1e-12        # orbit returns this close to an earlier sample
_CYCLE_WINDOW = 24        # largest cycle length probed during iteration
_DEDUPE_ABS = 1e-8        # periodic points closer than this are one point
_NEWTON_MAX = 200
_PREPERIODIC_TOL = 1e-9   # near-return threshold for the fate survey
_LOG_DOUBLE_MAX = 708.0   # log of the largest comfortably storable double

ORBIT_ESCAPED = "escaped"
ORBIT_BOUNDED = "bounded-budget-exhausted"
ORBIT_CONVERGED = "converged-to-cycle"
ORBIT_OVERFLOW = "overflow"

PROBE_CORRESPONDS = "corresponds-likely"
PROBE_NO_EVIDENCE = "no-evidence"
PROBE_ESCAPED = "escaped"
PROBE_INCONCLUSIVE = "inconclusive"

FATE_ATTRACTING = "converges-to-attracting-cycle"
FATE_PREPERIODIC = "numerically-preperiodic"
FATE_RECURRENT = "recurrent-near-boundary"
FATE_ESCAPING = "escaping"
FATE_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OrbitRecord:
    """A realized forward orbit prefix with its stopping classification."""

    samples: np.ndarray
    final_status: str
    escaped: bool
    escape_index: Optional[int]
    cycle_length: Optional[int] = None
    multiplier: Optional[complex] = None


@dataclass(frozen=True)
class CycleRecord:
    """A periodic cycle: its points, first-return multiplier, and class."""

    points: tuple
    period: int
    multiplier: complex
    residual: float
    classification: str = ""
    rotation_number: Optional[float] = None


@dataclass(frozen=True)
class ProbeRecord:
    """How one singular orbit relates to a sampled boundary set."""

    seed: complex
    kind: str
    status: str
    min_distance: float
    accumulation_score: float
    orbit_status: str
    steps: int


@dataclass(frozen=True)
class CorrespondenceReport:
    records: tuple
    boundary_count: int
    eps: float
    n_iters: int


@dataclass(frozen=True)
class SingularFateRecord:
    seed: complex
    kind: str
    classification: str
    orbit_status: str
    return_pair: Optional[tuple] = None
    accumulation_score: Optional[float] = None


@dataclass(frozen=True)
class SubhyperbolicityReport:
    entries: tuple
    recurrent_count: int
    budget: int


def _orbit_coefficients(f: SFFunction):
    co = np.ascontiguousarray(f.origin_series().array(), dtype=complex)
    dc = np.ascontiguousarray(co[1:] * np.arange(1, len(co)), dtype=complex)
    return co, dc


def iterate(f: SFFunction, z0, n_max: int,
            escape_radius: float = DEFAULT_ESCAPE_RADIUS) -> OrbitRecord:
    """Forward orbit of z0 under f, stopping on escape, attracting-cycle
    convergence (return within 1e-12 of an earlier sample with contracting
    loop multiplier), overflow, or budget exhaustion.

    Inside the trust radius the orbit advances through the kernel iteration
    of the origin-series truncation (exact for polynomials); outside it,
    each step is a direct evaluation. Identical inputs give bit-identical
    sample arrays.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not escape_radius > 0:
        raise ValueError("escape_radius must be positive")
    co, dc = _orbit_coefficients(f)
    trust = f.trust_radius
    log_escape = math.log(escape_radius)
    master = np.zeros(n_max + 1, dtype=complex)
    master[0] = complex(z0)
    pos = 0
    status = ORBIT_BOUNDED
    escape_index = None
    cycle_length = None
    multiplier = None

    while True:
        z = complex(master[pos])
        az = abs(z)
        if az != az or az > escape_radius:
            status, escape_index = ORBIT_ESCAPED, pos
            break
        if pos == n_max:
            status = ORBIT_BOUNDED
            break
        if az <= trust:
            st, k, clen, m = kernels.series_orbit(
                co, dc, z, n_max - pos, escape_radius, trust, _CYCLE_TOL,
                _CYCLE_WINDOW, master[pos:])
            pos += k
            if st == kernels.STATUS_ESCAPED:
                status, escape_index = ORBIT_ESCAPED, pos
                break
            if st == kernels.STATUS_CYCLE:
                status, cycle_length, multiplier = ORBIT_CONVERGED, clen, m
                break
            if st == kernels.STATUS_BUDGET:
                status = ORBIT_BOUNDED
                break
            if st == kernels.STATUS_OVERFLOW:
                status = ORBIT_OVERFLOW
                break
            continue  # left the trust region; take slow steps

        wx = f.evaluate_x(z)
        if not (math.isfinite(wx[0]) and math.isfinite(wx[1])):
            status = ORBIT_OVERFLOW
            break
        lw = xc.xlog_abs(wx)
        if lw > log_escape:
            if lw > _LOG_DOUBLE_MAX:
                if log_escape > _LOG_DOUBLE_MAX:
                    status = ORBIT_OVERFLOW
                    break
                # escaped, but the value itself is not storable as a double
                status, escape_index = ORBIT_ESCAPED, pos + 1
                break
            pos += 1
            master[pos] = xc.xto_complex(wx)
            status, escape_index = ORBIT_ESCAPED, pos
            break
        if lw > _LOG_DOUBLE_MAX:
            status = ORBIT_OVERFLOW
            break
        w = xc.xto_complex(wx)
        pos += 1
        master[pos] = w
        lim = _CYCLE_TOL * (1.0 + abs(w))
        hit = None
        for lag in range(1, min(_CYCLE_WINDOW, pos) + 1):
            if abs(w - complex(master[pos - lag])) <= lim:
                hit = lag
                break
        if hit is not None:
            mx = xc.xfrom_complex(1.0 + 0j)
            for j in range(pos - hit + 1, pos + 1):
                mx = xc.xmul(mx, f.derivative_x(complex(master[j])))
            if xc.xlog_abs(mx) < 0.0:
                status = ORBIT_CONVERGED
                cycle_length = hit
                multiplier = xc.xto_complex(mx, strict=False)
                break

    samples = np.array(master[:pos + 1])
    return OrbitRecord(samples=samples, final_status=status,
                       escaped=(status == ORBIT_ESCAPED),
                       escape_index=escape_index,
                       cycle_length=cycle_length, multiplier=multiplier)


# ---------------------------------------------------------------------------
# Periodic points.


def _map_and_derivative(f: SFFunction, z: complex, period: int,
                        escape_guard: float):
    """(f^period(z) - z, d/dz f^period(z) - 1), or None off the table."""
    try:
        w = z
        gp = 1.0 + 0j
        for _ in range(period):
            gp *= f.derivative(w)
            w = f.evaluate(w)
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                return None
            if abs(w) > escape_guard:
                return None
        return (w - z, gp - 1.0)
    except SFLabError:
        return None


def _newton_periodic(f: SFFunction, seed: complex, period: int, tol: float,
                     escape_guard: float):
    z = complex(seed)
    val = _map_and_derivative(f, z, period, escape_guard)
    if val is None:
        return None
    g, gp = val
    for _ in range(_NEWTON_MAX):
        if g == 0:
            break
        if gp == 0:
            # derivative degenerate: deterministic nudge off the spot
            val = _map_and_derivative(f, z + 1e-7, period, escape_guard)
            if val is None:
                return None
            z += 1e-7
            g, gp = val
            continue
        dz = -g / gp
        accepted = False
        for _ in range(30):  # halve the step while the residual grows
            cand = z + dz
            val = _map_and_derivative(f, cand, period, escape_guard)
            if val is not None and abs(val[0]) <= abs(g):
                z, (g, gp) = cand, val
                accepted = True
                break
            dz *= 0.5
            if abs(dz) < 1e-17 * (1.0 + abs(z)):
                break
        if not accepted:
            break
        if abs(dz) <= 1e-15 * (1.0 + abs(z)):
            break
    return z if abs(g) <= tol else None


def find_periodic_points(f: SFFunction, period: int,
                         search_box=(-4.0, 4.0, -4.0, 4.0), grid: int = 24,
                         tol: float = 1e-10, escape_guard: float = 1e6,
                         indifference_tol: float = 1e-6) -> list:
    """Damped-Newton search for period-`period` points from a seed grid.

    Converged roots are deduplicated, grouped into cycles, relabeled with
    their true (smallest dividing) period, and classified. The origin seed
    is always included, so the normalized fixed point 0 is always found.
    """
    if period < 1:
        raise ValueError("period must be at least 1")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    x0, x1, y0, y1 = (float(v) for v in search_box)
    seeds = [complex(x, y)
             for y in np.linspace(y0, y1, grid)
             for x in np.linspace(x0, x1, grid)]
    seeds.append(0j)

    roots = []
    for seed in seeds:
        z = _newton_periodic(f, seed, period, tol, escape_guard)
        if z is None:
            continue
        if any(abs(z - r) <= _DEDUPE_ABS for r in roots):
            continue
        roots.append(z)

    records = []
    for z in roots:
        try:
            pts = [z]
            for _ in range(period - 1):
                pts.append(f.evaluate(pts[-1]))
            wrap = f.evaluate(pts[-1])
        except SFLabError:
            continue
        true_period = period
        for cand in range(1, period):
            if period % cand == 0 and abs(pts[cand] - z) <= _DEDUPE_ABS:
                true_period = cand
                break
        cycle = list(pts[:true_period])
        closing = pts[true_period] if true_period < period else wrap
        residual = max(
            max(abs(f.evaluate(cycle[i]) - cycle[i + 1])
                for i in range(true_period - 1)) if true_period > 1 else 0.0,
            abs(closing - cycle[0]))
        if residual > tol:
            continue
        duplicate = False
        for rec in records:
            if rec.period == true_period and min(
                    abs(cycle[0] - q) for q in rec.points) <= 10 * _DEDUPE_ABS:
                duplicate = True
                break
        if duplicate:
            continue
        start = min(range(true_period),
                    key=lambda i: (cycle[i].real, cycle[i].imag))
        cycle = cycle[start:] + cycle[:start]
        mult = 1.0 + 0j
        for w in cycle:
            mult *= f.derivative(w)
        rec = CycleRecord(points=tuple(cycle), period=true_period,
                          multiplier=mult, residual=float(residual))
        records.append(classify_cycle(rec, indifference_tol))

    records.sort(key=lambda r: (r.period, round(r.points[0].real, 9),
                                round(r.points[0].imag, 9)))
    return records


def classify_cycle(record: CycleRecord,
                   indifference_tol: float = 1e-6) -> CycleRecord:
    """Fill in the stability class and, for indifferent cycles, the
    rotation number with a small-denominator rationality test."""
    m = abs(record.multiplier)
    tol = indifference_tol
    rotation = None
    if m < tol:
        cls = "superattracting"
    elif m < 1.0 - tol:
        cls = "attracting"
    elif m > 1.0 + tol:
        cls = "repelling"
    else:
        rotation = (cmath.phase(record.multiplier) / (2.0 * math.pi)) % 1.0
        best = Fraction(rotation).limit_denominator(64)
        if abs(rotation - float(best)) < tol:
            cls = "rationally-indifferent"
        else:
            cls = "irrationally-indifferent"
    return dataclasses.replace(record, classification=cls,
                               rotation_number=rotation)


# ---------------------------------------------------------------------------
# Orbit probes over the singular values.


def _singular_seeds(f: SFFunction):
    data = f.singular_data()
    seeds = [(complex(loc), "critical-point")
             for loc, _mult in data.critical_points]
    seeds += [(complex(v), "asymptotic-value") for v in data.asymptotic_values]
    return seeds


def _tail_stats(tail, boundary, eps):
    """(min distance, fraction of boundary points approached within eps)."""
    if len(tail) == 0:
        return math.inf, 0.0
    tail = np.asarray(tail, dtype=complex)
    mins = np.empty(len(boundary))
    for i, g in enumerate(boundary):
        mins[i] = np.min(np.abs(tail - g))
    return float(mins.min()), float(np.mean(mins < eps))


def mane_probe(f: SFFunction, boundary, n_iters: int, eps: float,
               escape_radius: float = DEFAULT_ESCAPE_RADIUS,
               ) -> CorrespondenceReport:
    """Score how closely each singular orbit shadows a sampled boundary set.

    Each singular seed (critical points and asymptotic values) is iterated
    n_iters times; the first 10% of the realized orbit is discarded as
    burn-in; the remaining tail is compared against every boundary sample.
    accumulation_score is the fraction of boundary samples with a tail
    point within eps; a bounded orbit scoring above 0.9 is reported as
    corresponds-likely, a bounded orbit scoring at or below it as
    no-evidence, and tails shorter than 10 samples as inconclusive.
    """
    boundary = np.asarray(list(boundary), dtype=complex)
    if boundary.size == 0:
        raise ValueError("boundary sample set must be non-empty")
    if n_iters < 1:
        raise ValueError("n_iters must be at least 1")
    records = []
    for seed, kind in _singular_seeds(f):
        rec = iterate(f, seed, n_iters, escape_radius)
        burn = len(rec.samples) // 10
        tail = rec.samples[burn:]
        min_d, score = _tail_stats(tail, boundary, eps)
        if rec.final_status in (ORBIT_ESCAPED, ORBIT_OVERFLOW):
            status = PROBE_ESCAPED
        elif len(tail) < 10:
            status = PROBE_INCONCLUSIVE
        elif score > 0.9:
            status = PROBE_CORRESPONDS
        else:
            status = PROBE_NO_EVIDENCE
        records.append(ProbeRecord(
            seed=seed, kind=kind, status=status, min_distance=min_d,
            accumulation_score=score, orbit_status=rec.final_status,
            steps=len(rec.samples) - 1))
    return CorrespondenceReport(records=tuple(records),
                                boundary_count=int(boundary.size),
                                eps=float(eps), n_iters=int(n_iters))


def expansion_metric(f: SFFunction, lambda_set, n: int,
                     snap_tol: float = 1e-12) -> float:
    """min over the set of |product of f' along the first n orbit steps|.

    Computed in log space. When the orbit returns to its starting point
    within snap_tol (a periodic point given to within roundoff), the
    realized samples are reused cyclically, so the result at an exact
    period-d point is exactly the cycle multiplier magnitude to the power
    n/d. Orbits that overflow contribute +infinity (they cannot lower the
    minimum) rather than failing.
    """
    lambda_set = list(lambda_set)
    if n < 1:
        raise ValueError("n must be at least 1")
    if not lambda_set:
        raise ValueError("lambda_set must be non-empty")
    best = math.inf
    for z0 in lambda_set:
        samples = [complex(z0)]
        period = None
        ok = True
        for j in range(1, n):
            try:
                w = f.evaluate(samples[-1])
            except SFLabError:
                ok = False
                break
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                ok = False
                break
            if abs(w - samples[0]) <= snap_tol * (1.0 + abs(samples[0])):
                period = j
                break
            samples.append(w)
        if not ok:
            continue  # +inf contribution never lowers the minimum
        logs = [xc.xlog_abs(f.derivative_x(s)) for s in samples]
        if period is None:
            total = math.fsum(logs)
        else:
            whole, rem = divmod(n, period)
            total = whole * math.fsum(logs) + math.fsum(logs[:rem])
        best = min(best, total)
    if best == math.inf:
        return math.inf
    try:
        return math.exp(best)
    except OverflowError:
        return math.inf


def _first_near_return(samples, tol: float):
    """First (j, k), j < k, with |samples[k] - samples[j]| <= tol, via a
    spatial hash; None when the orbit never revisits at that resolution."""
    cells = {}
    for k in range(len(samples)):
        z = complex(samples[k])
        cx = round(z.real / tol)
        cy = round(z.imag / tol)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in cells.get((cx + dx, cy + dy), ()):
                    if abs(z - complex(samples[j])) <= tol:
                        return (j, k)
        cells.setdefault((cx, cy), []).append(k)
    return None


def subhyperbolicity_report(f: SFFunction, budget: int, boundary=None,
                            escape_radius: float = DEFAULT_ESCAPE_RADIUS,
                            eps: float = 1e-2) -> SubhyperbolicityReport:
    """Classify the fate of every singular orbit within a step budget.

    Fates: escaping, converges-to-attracting-cycle, numerically-preperiodic
    (the orbit revisits an earlier point within 1e-9 along a non-contracting
    loop; a heuristic stand-in for exact preperiodicity), recurrent-near-
    boundary (when boundary samples are supplied and the orbit accumulation
    score exceeds 0.9), else inconclusive. recurrent_count totals the
    recurrent-near-boundary entries.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    entries = []
    for seed, kind in _singular_seeds(f):
        rec = iterate(f, seed, budget, escape_radius)
        score = None
        pair = None
        if rec.final_status in (ORBIT_ESCAPED, ORBIT_OVERFLOW):
            cls = FATE_ESCAPING
        elif rec.final_status == ORBIT_CONVERGED:
            cls = FATE_ATTRACTING
        else:
            pair = _first_near_return(rec.samples, _PREPERIODIC_TOL)
            if pair is not None:
                j, k = pair
                loop_log = math.fsum(
                    xc.xlog_abs(f.derivative_x(complex(rec.samples[i])))
                    for i in range(j + 1, k + 1))
                cls = FATE_ATTRACTING if loop_log < 0.0 else FATE_PREPERIODIC
            elif boundary is not None and len(boundary) > 0:
                burn = len(rec.samples) // 10
                _, score = _tail_stats(rec.samples[burn:],
                                       np.asarray(boundary, dtype=complex),
                                       eps)
                cls = FATE_RECURRENT if score > 0.9 else FATE_INCONCLUSIVE
            else:
                cls = FATE_INCONCLUSIVE
        entries.append(SingularFateRecord(
            seed=seed, kind=kind, classification=cls,
            orbit_status=rec.final_status, return_pair=pair,
            accumulation_score=score))
    count = sum(1 for e in entries if e.classification == FATE_RECURRENT)
    return SubhyperbolicityReport(entries=tuple(entries),
                                  recurrent_count=count, budget=int(budget))
