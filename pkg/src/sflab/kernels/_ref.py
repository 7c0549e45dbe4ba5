"""Reference kernels, pure Python.

These are the hot loops: polynomial orbit stepping, escape-time grids, and
the order-by-order linearization recursion. The compiled lane in _speed.pyx
mirrors the exact floating-point operation order used here (naive complex
multiply, sqrt of an explicit sum of squares for magnitudes (IEEE sqrt is
correctly rounded, so the two languages agree bitwise; hypot would not),
frexp/ldexp for exponent splits, no complex
division anywhere), so both lanes produce bit-identical output and the test
suite can compare them directly.

Extended-range values follow the xcomplex convention: (re, im, exp) meaning
(re + i*im) * 2**exp with the mantissa kept near unit magnitude.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_BUDGET = 0
STATUS_ESCAPED = 1
STATUS_CYCLE = 2
STATUS_OVERFLOW = 3
STATUS_LEFT_TRUST = 4


def horner(coeffs, z):
    """Evaluate sum c_k z**k, coefficients ascending."""
    w = 0j
    z = complex(z)
    for i in range(len(coeffs) - 1, -1, -1):
        w = w * z + coeffs[i]
    return w


def series_orbit(coeffs, dcoeffs, z0, max_steps, escape_radius, trust_radius,
                 cycle_tol, window, samples):
    """Iterate the polynomial truncation from z0, recording every value.

    samples must hold max_steps + 1 complex slots. Returns
    (status, last_index, cycle_length, multiplier):

      0 budget exhausted; 1 escaped (|z| beyond escape_radius, or non-finite);
      2 settled onto an attracting cycle (cycle_length, multiplier filled);
      3 overflow during a step; 4 left the trust region (caller continues by
      other means from samples[last_index]).
    """
    samples[0] = z0
    k = 0
    skip = 0
    ncoef = len(coeffs)
    while True:
        z = complex(samples[k])
        az = math.sqrt(z.real * z.real + z.imag * z.imag)
        if az != az or az > escape_radius:
            return (STATUS_ESCAPED, k, 0, 0j)
        if az > trust_radius:
            return (STATUS_LEFT_TRUST, k, 0, 0j)
        if k == max_steps:
            return (STATUS_BUDGET, k, 0, 0j)
        wr = 0.0
        wi = 0.0
        for i in range(ncoef - 1, -1, -1):
            c = complex(coeffs[i])
            tr = wr * z.real - wi * z.imag + c.real
            wi = wr * z.imag + wi * z.real + c.imag
            wr = tr
        if not (math.isfinite(wr) and math.isfinite(wi)):
            return (STATUS_OVERFLOW, k, 0, 0j)
        k += 1
        samples[k] = complex(wr, wi)
        if skip > 0:
            skip -= 1
            continue
        aw = math.sqrt(wr * wr + wi * wi)
        lim = cycle_tol * (1.0 + aw)
        maxlag = min(window, k)
        for lag in range(1, maxlag + 1):
            s = complex(samples[k - lag])
            dr = wr - s.real
            di = wi - s.imag
            if math.sqrt(dr * dr + di * di) <= lim:
                mr = 1.0
                mi = 0.0
                for j in range(k - lag + 1, k + 1):
                    d = _dval(dcoeffs, complex(samples[j]))
                    tr = mr * d.real - mi * d.imag
                    mi = mr * d.imag + mi * d.real
                    mr = tr
                if math.sqrt(mr * mr + mi * mi) < 1.0:
                    return (STATUS_CYCLE, k, lag, complex(mr, mi))
                skip = lag
                break


def _dval(dcoeffs, z):
    w = 0j
    for i in range(len(dcoeffs) - 1, -1, -1):
        w = w * z + complex(dcoeffs[i])
    return w


def escape_grid(coeffs, re0, dre, nre, im0, dim, nim, max_iter,
                escape_radius, trust_radius, counts, status):
    """Escape-time iteration over a pixel grid.

    counts[j, i] gets the index of the first sample beyond escape_radius
    (max_iter if none), status[j, i] one of the orbit status codes. Pixels
    that leave the trust region get status 4 and the step count reached so
    far; the caller finishes them by slower means.
    """
    ncoef = len(coeffs)
    for j in range(nim):
        y = im0 + dim * j
        for i in range(nre):
            x = re0 + dre * i
            zr = x
            zi = y
            st = STATUS_BUDGET
            n = max_iter
            for k in range(max_iter + 1):
                az = math.sqrt(zr * zr + zi * zi)
                if az != az or az > escape_radius:
                    st = STATUS_ESCAPED
                    n = k
                    break
                if az > trust_radius:
                    st = STATUS_LEFT_TRUST
                    n = k
                    break
                if k == max_iter:
                    break
                wr = 0.0
                wi = 0.0
                for m in range(ncoef - 1, -1, -1):
                    c = complex(coeffs[m])
                    tr = wr * zr - wi * zi + c.real
                    wi = wr * zi + wi * zr + c.imag
                    wr = tr
                if not (math.isfinite(wr) and math.isfinite(wi)):
                    st = STATUS_OVERFLOW
                    n = k
                    break
                zr = wr
                zi = wi
            counts[j, i] = n
            status[j, i] = st


# ---------------------------------------------------------------------------
# Linearization recursion.
#
# For f(z) = lam * integral P(t) e^{Q(t)} dt the conjugacy f(phi(w)) =
# phi(lam w) differentiates to P(phi) e^{Q(phi)} phi'(w) = phi'(lam w).
# Writing A = P(phi), B = Q(phi), E = exp(B), D = A*E, the w^{n-1}
# coefficient isolates phi_n:
#
#   n phi_n (lam^{n-1} - 1) = sum_{l=0}^{n-2} D_{n-1-l} (l+1) phi_{l+1}
#
# and everything on the right uses phi_1 .. phi_{n-1} only. Powers of phi up
# to max(deg P, deg Q) are maintained incrementally; all series arithmetic
# runs in extended range.


def _xnorm(re, im, e):
    m = abs(re)
    ai = abs(im)
    if ai > m:
        m = ai
    if m == 0.0:
        return (0.0, 0.0, 0)
    if not math.isfinite(m):
        return (re, im, e)
    _, k = math.frexp(m)
    return (math.ldexp(re, -k), math.ldexp(im, -k), e + k)


def _xmul(a, b):
    return _xnorm(a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0],
                  a[2] + b[2])


def _xmul_c(a, zr, zi):
    return _xnorm(a[0] * zr - a[1] * zi, a[0] * zi + a[1] * zr, a[2])


def _xadd(a, b):
    if a[0] == 0.0 and a[1] == 0.0:
        return b
    if b[0] == 0.0 and b[1] == 0.0:
        return a
    d = a[2] - b[2]
    if d >= 0:
        if d > 1100:
            return a
        return _xnorm(a[0] + math.ldexp(b[0], -d),
                      a[1] + math.ldexp(b[1], -d), a[2])
    d = -d
    if d > 1100:
        return b
    return _xnorm(b[0] + math.ldexp(a[0], -d),
                  b[1] + math.ldexp(a[1], -d), b[2])


def schroeder_core(p_coeffs, q_coeffs, recips, order, phi_mant, phi_exp):
    """Fill phi with the linearization coefficients through `order`.

    p_coeffs, q_coeffs: ascending complex arrays (P with P[0] = 1, Q with
    Q[0] = 0; a length-1 Q array means Q = 0).
    recips: complex array where recips[n] = 1 / (n * (lam**(n-1) - 1)) for
    n >= 2 (entries 0, 1 unused), precomputed by the caller in one place so
    both lanes consume identical divisor values.
    phi_mant, phi_exp: output arrays of length order + 1.
    """
    n_out = order + 1
    deg_p = len(p_coeffs) - 1
    deg_q = len(q_coeffs) - 1
    max_pq = deg_p if deg_p > deg_q else deg_q
    if max_pq < 1:
        max_pq = 1

    # pow_rows[k] = series of phi**k; row 1 is phi itself
    pm = [[(0.0, 0.0, 0)] * n_out for _ in range(max_pq + 1)]
    one = (0.5, 0.0, 1)  # 1.0 in normalized extended form

    phi = [(0.0, 0.0, 0)] * n_out
    A = [(0.0, 0.0, 0)] * n_out
    B = [(0.0, 0.0, 0)] * n_out
    E = [(0.0, 0.0, 0)] * n_out
    D = [(0.0, 0.0, 0)] * n_out

    phi[1] = one
    pm[1][1] = one
    # order-0 and order-1 seed values
    A[0] = one
    if deg_p >= 1:
        c = complex(p_coeffs[1])
        A[1] = _xnorm(c.real, c.imag, 0)
    if deg_q >= 1:
        c = complex(q_coeffs[1])
        B[1] = _xnorm(c.real, c.imag, 0)
    E[0] = one
    E[1] = B[1]
    D[0] = one
    D[1] = _xadd(A[1], E[1])

    for n in range(2, n_out):
        # S = sum_{l=0}^{n-2} D_{n-1-l} * (l+1) * phi_{l+1}
        s = (0.0, 0.0, 0)
        for l in range(0, n - 1):
            t = _xmul(D[n - 1 - l], phi[l + 1])
            s = _xadd(s, _xmul_c(t, float(l + 1), 0.0))
        r = complex(recips[n])
        phi[n] = _xmul_c(s, r.real, r.imag)

        # extend phi powers to index n (uses phi_1..phi_{n-1} only)
        for k in range(2, max_pq + 1):
            acc = (0.0, 0.0, 0)
            for j in range(1, n - k + 2):
                acc = _xadd(acc, _xmul(phi[j], pm[k - 1][n - j]))
            pm[k][n] = acc
        pm[1][n] = phi[n]

        # A_n = sum_i P_i pow[i][n], skipping zero coefficients
        acc = (0.0, 0.0, 0)
        for i in range(1, deg_p + 1):
            c = complex(p_coeffs[i])
            if c.real != 0.0 or c.imag != 0.0:
                acc = _xadd(acc, _xmul_c(pm[i][n], c.real, c.imag))
        A[n] = acc

        acc = (0.0, 0.0, 0)
        for i in range(1, deg_q + 1):
            c = complex(q_coeffs[i])
            if c.real != 0.0 or c.imag != 0.0:
                acc = _xadd(acc, _xmul_c(pm[i][n], c.real, c.imag))
        B[n] = acc

        # E_n = (1/n) sum_{j=1}^{n} j B_j E_{n-j}
        acc = (0.0, 0.0, 0)
        for j in range(1, n + 1):
            t = _xmul(B[j], E[n - j])
            acc = _xadd(acc, _xmul_c(t, float(j), 0.0))
        E[n] = _xmul_c(acc, 1.0 / n, 0.0)

        # D_n = sum_{i=0}^{n} A_i E_{n-i}
        acc = (0.0, 0.0, 0)
        for i in range(0, n + 1):
            acc = _xadd(acc, _xmul(A[i], E[n - i]))
        D[n] = acc

    for n in range(n_out):
        phi_mant[n] = complex(phi[n][0], phi[n][1])
        phi_exp[n] = phi[n][2]
