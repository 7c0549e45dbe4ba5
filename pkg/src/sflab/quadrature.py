"""Adaptive contour quadrature along straight segments.

Gauss-Legendre 15-point panels with a 7-point companion rule for the error
estimate, bisecting until each panel's estimated error fits its share of the
global budget. Values move through the extended-range representation so an
integrand like P(t) exp(Q(t)) can be integrated straight through regions
where it is far outside double range; error bookkeeping happens on natural
logs of magnitudes for the same reason.

The integrand callback receives an array of complex points on the segment
and returns a pair (mantissa complex array, exponent int64 array) as
produced by xcomplex.xarr_from_complex or built directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import xcomplex as xc
from .errors import QuadratureError

_X15, _W15 = np.polynomial.legendre.leggauss(15)
_X7, _W7 = np.polynomial.legendre.leggauss(7)

MAX_PANELS = 2 ** 14
_MAX_DEPTH = 48


@dataclass(frozen=True)
class QuadratureResult:
    value_x: tuple       # extended-range integral value
    log_error: float     # natural log of the accumulated error estimate
    panels: int

    @property
    def value(self):
        return xc.xto_complex(self.value_x)


def wrap_pointwise(f):
    """Adapt a plain complex vectorized callback to the x-form contract."""

    def fx(points):
        return xc.xarr_from_complex(np.asarray(f(points), dtype=np.complex128))

    return fx


def _rule(fx, a, b, nodes, weights):
    """Apply one rule; returns (integral, log of the L1 mass).

    The L1 mass sum |w_i f_i| |half| sets the rounding floor of the panel:
    no refinement can push the error below ~eps times it.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid + half * nodes
    mant, exp = fx(pts)
    acc = xc.XZERO
    l1_logs = []
    for i in range(len(pts)):
        v = xc.xarr_get(mant, exp, i)
        term = xc.xmul_c(v, complex(weights[i] * half))
        acc = xc.xadd(acc, term)
        l1_logs.append(xc.xlog_abs(term))
    return acc, _logsum(l1_logs)


def integrate_segment(fx, z0, z1, rel_tol: float = 1e-12,
                      max_panels: int = MAX_PANELS) -> QuadratureResult:
    """Integrate fx along the straight segment from z0 to z1."""
    z0 = complex(z0)
    z1 = complex(z1)
    if z0 == z1:
        return QuadratureResult(xc.XZERO, -math.inf, 0)
    total_len = abs(z1 - z0)

    root15, _ = _rule(fx, z0, z1, _X15, _W15)
    scale_log = max(0.0, xc.xlog_abs(root15))
    log_eps = math.log(16.0 * np.finfo(np.float64).eps)

    acc = xc.XZERO
    err_logs = []
    panels = 0
    stack = [(z0, z1, 0)]
    while stack:
        a, b, depth = stack.pop()
        if panels >= max_panels:
            raise QuadratureError(
                "panel budget exhausted after %d panels" % panels,
                partial=acc,
                error_log=_logsum(err_logs),
            )
        i15, l1_log = _rule(fx, a, b, _X15, _W15)
        i7, _ = _rule(fx, a, b, _X7, _W7)
        err_log = xc.xlog_abs(xc.xsub(i15, i7))
        frac = abs(b - a) / total_len
        budget = math.log(rel_tol) + scale_log + math.log(frac)
        # a panel whose error estimate sits at its own rounding floor
        # cannot be improved by refinement
        floor = log_eps + l1_log
        panels += 1
        if err_log <= max(budget, floor) or depth >= _MAX_DEPTH:
            if depth >= _MAX_DEPTH and err_log > max(budget, floor):
                raise QuadratureError(
                    "panel refinement hit depth %d without converging" % depth,
                    partial=acc,
                    error_log=err_log,
                )
            acc = xc.xadd(acc, i15)
            err_logs.append(err_log)
            # a panel much larger than the running scale raises the budget
            # for everything still on the stack
            scale_log = max(scale_log, xc.xlog_abs(acc))
        else:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    return QuadratureResult(acc, _logsum(err_logs), panels)


def _logsum(logs):
    logs = [x for x in logs if x > -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log(sum(math.exp(x - top) for x in logs))
