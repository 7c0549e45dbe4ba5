"""Simultaneous polynomial root finding.

Aberth-Ehrlich iteration on all roots at once, followed by a few plain
Newton polish steps per root and a greedy cluster merge that reports
multiplicities. Written against ascending coefficient arrays to match the
rest of the package. numpy's eigenvalue-based solver is deliberately not
used here so the package controls its own convergence and clustering
behavior; tests compare against it as an independent oracle.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import RootFindingError


def _horner_pair(coeffs, z):
    """(p(z), p'(z)) in one pass, coefficients ascending."""
    p = 0j
    dp = 0j
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def roots(coeffs, tol: float = 1e-13, max_iter: int = 400) -> np.ndarray:
    """All complex roots of sum c_k z**k, coefficients ascending.

    Returns an array of length equal to the degree (with repetitions for
    multiple roots). Raises RootFindingError if the iteration stalls.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    # strip leading (high-order) zeros
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        raise RootFindingError("zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    deg = len(c) - 1
    if deg == 0:
        return np.zeros(0, dtype=np.complex128)

    # factor out roots at the origin
    k0 = int(nz[0])
    if k0 > 0:
        inner = roots(c[k0:], tol=tol, max_iter=max_iter)
        return np.concatenate([np.zeros(k0, dtype=np.complex128), inner])

    if deg == 1:
        return np.array([-c[0] / c[1]])

    monic = c / c[-1]
    amag = np.abs(monic)
    eps = float(np.finfo(np.float64).eps)

    def noise_floor(zi):
        # rounding noise of evaluating p at zi: eps * sum |c_k| |zi|**k.
        # once |p(zi)| is below this, the point is a root to working
        # precision and further steps only wander.
        s = 0.0
        azi = abs(zi)
        for m in amag[::-1]:
            s = s * azi + m
        return 4.0 * eps * s

    # Cauchy bound for the root radius, with a deterministic spread of
    # initial guesses just inside it
    bound = 1.0 + float(np.max(amag[:-1]))
    n = deg
    ks = np.arange(n)
    guesses = (0.7 * bound) * np.exp(
        2j * math.pi * (ks + 0.37) / n + 1j * 0.5 / n
    ) * (1.0 + 0.05 * np.cos(3.0 * ks))

    z = guesses.astype(np.complex128)
    frozen = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        moved = 0.0
        for i in range(n):
            if frozen[i]:
                continue
            p, dp = _horner_pair(monic, z[i])
            if abs(p) <= noise_floor(z[i]):
                frozen[i] = True
                continue
            if dp == 0:
                z[i] += 1e-6 * (1 + abs(z[i])) * cmath.exp(1j * (i + 0.5))
                moved = math.inf
                continue
            w = p / dp
            s = 0j
            for j in range(n):
                if j != i:
                    d = z[i] - z[j]
                    if d == 0:
                        d = 1e-300
                    s += 1.0 / d
            denom = 1.0 - w * s
            if denom == 0:
                step = w
            else:
                step = w / denom
            z[i] -= step
            moved = max(moved, abs(step) / (1.0 + abs(z[i])))
        if frozen.all() or moved < tol:
            break
    else:
        raise RootFindingError("root iteration did not settle in %d sweeps" % max_iter)

    # Newton polish (helps simple roots reach full double accuracy; on
    # multiple roots Newton is only linearly convergent, so cap the steps)
    for i in range(n):
        for _ in range(4):
            p, dp = _horner_pair(monic, z[i])
            if dp == 0 or p == 0 or abs(p) <= noise_floor(z[i]):
                break
            step = p / dp
            if abs(step) > 0.5 * (1 + abs(z[i])):
                break
            z[i] -= step
    return z


def clustered_roots(coeffs, cluster_tol: float = 1e-6,
                    tol: float = 1e-13) -> list:
    """Roots merged into (location, multiplicity) pairs.

    Roots closer than cluster_tol * (1 + |z|) are treated as one root of
    higher multiplicity located at the cluster mean. A root of multiplicity
    m computed from double coefficients carries an intrinsic spread around
    eps**(1/m), so the default tolerance resolves multiplicity 2 reliably;
    callers expecting triple or higher roots should pass a coarser value
    (1e-3 covers multiplicity up to 5 at moderate conditioning).
    """
    rs = roots(coeffs, tol=tol)
    order = np.argsort(rs.real * 1e6 + rs.imag)  # deterministic sweep order
    remaining = [complex(rs[i]) for i in order]
    out = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            center = sum(members) / len(members)
            keep = []
            for r in remaining:
                if abs(r - center) <= cluster_tol * (1.0 + abs(center)):
                    members.append(r)
                    changed = True
                else:
                    keep.append(r)
            remaining = keep
        center = sum(members) / len(members)
        out.append((center, len(members)))
    out.sort(key=lambda t: (round(t[0].real, 6), round(t[0].imag, 6)))
    return out
