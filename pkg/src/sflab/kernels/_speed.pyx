# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels, mirroring _ref.py operation for operation.

Complex arithmetic is written out on double components using the same naive
multiply as CPython's complex type, magnitudes through sqrt of an explicit
sum of squares (correctly rounded, so both languages agree bitwise), exponent
splits through frexp/ldexp, and there is no complex division anywhere, so
results are bit-identical to the reference lane (the C compiler is held to
this with -ffp-contract=off; no FMA contraction).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport frexp, isfinite, ldexp, sqrt

cnp.import_array()

STATUS_BUDGET = 0
STATUS_ESCAPED = 1
STATUS_CYCLE = 2
STATUS_OVERFLOW = 3
STATUS_LEFT_TRUST = 4


cdef struct XVal:
    double re
    double im
    long ex


cdef inline XVal _xnorm(double re, double im, long e) noexcept nogil:
    cdef XVal out
    cdef double m = re if re >= 0 else -re
    cdef double ai = im if im >= 0 else -im
    cdef int k
    if ai > m:
        m = ai
    if m == 0.0:
        out.re = 0.0
        out.im = 0.0
        out.ex = 0
        return out
    if not isfinite(m):
        out.re = re
        out.im = im
        out.ex = e
        return out
    frexp(m, &k)
    out.re = ldexp(re, -k)
    out.im = ldexp(im, -k)
    out.ex = e + k
    return out


cdef inline XVal _xmul(XVal a, XVal b) noexcept nogil:
    return _xnorm(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re,
                  a.ex + b.ex)


cdef inline XVal _xmul_c(XVal a, double zr, double zi) noexcept nogil:
    return _xnorm(a.re * zr - a.im * zi, a.re * zi + a.im * zr, a.ex)


cdef inline XVal _xadd(XVal a, XVal b) noexcept nogil:
    cdef long d
    if a.re == 0.0 and a.im == 0.0:
        return b
    if b.re == 0.0 and b.im == 0.0:
        return a
    d = a.ex - b.ex
    if d >= 0:
        if d > 1100:
            return a
        return _xnorm(a.re + ldexp(b.re, <int> (-d)),
                      a.im + ldexp(b.im, <int> (-d)), a.ex)
    d = -d
    if d > 1100:
        return b
    return _xnorm(b.re + ldexp(a.re, <int> (-d)),
                  b.im + ldexp(a.im, <int> (-d)), b.ex)


def horner(coeffs, z):
    cdef cnp.complex128_t[::1] c = np.ascontiguousarray(
        coeffs, dtype=np.complex128)
    cdef double complex zz = z
    cdef double zr = zz.real, zi = zz.imag
    cdef double wr = 0.0, wi = 0.0, tr, cr, ci
    cdef Py_ssize_t i
    for i in range(c.shape[0] - 1, -1, -1):
        cr = c[i].real
        ci = c[i].imag
        tr = wr * zr - wi * zi + cr
        wi = wr * zi + wi * zr + ci
        wr = tr
    return complex(wr, wi)


def series_orbit(coeffs, dcoeffs, z0, long max_steps, double escape_radius,
                 double trust_radius, double cycle_tol, long window,
                 samples):
    cdef cnp.complex128_t[::1] c = np.ascontiguousarray(
        coeffs, dtype=np.complex128)
    cdef cnp.complex128_t[::1] dc = np.ascontiguousarray(
        dcoeffs, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = samples
    cdef double complex z0c = z0
    cdef Py_ssize_t k = 0, i, j, lag, maxlag
    cdef long skip = 0
    cdef Py_ssize_t ncoef = c.shape[0], ndcoef = dc.shape[0]
    cdef double zr, zi, az, wr, wi, tr, aw, lim, sr, si, mr, mi, dr, di
    cdef double cr, ci

    out[0] = z0c
    while True:
        zr = out[k].real
        zi = out[k].imag
        az = sqrt(zr * zr + zi * zi)
        if az != az or az > escape_radius:
            return (STATUS_ESCAPED, k, 0, 0j)
        if az > trust_radius:
            return (STATUS_LEFT_TRUST, k, 0, 0j)
        if k == max_steps:
            return (STATUS_BUDGET, k, 0, 0j)
        wr = 0.0
        wi = 0.0
        for i in range(ncoef - 1, -1, -1):
            cr = c[i].real
            ci = c[i].imag
            tr = wr * zr - wi * zi + cr
            wi = wr * zi + wi * zr + ci
            wr = tr
        if not (isfinite(wr) and isfinite(wi)):
            return (STATUS_OVERFLOW, k, 0, 0j)
        k += 1
        out[k] = wr + 1j * wi
        if skip > 0:
            skip -= 1
            continue
        aw = sqrt(wr * wr + wi * wi)
        lim = cycle_tol * (1.0 + aw)
        maxlag = window if window < k else k
        for lag in range(1, maxlag + 1):
            sr = out[k - lag].real
            si = out[k - lag].imag
            dr = wr - sr
            di = wi - si
            if sqrt(dr * dr + di * di) <= lim:
                mr = 1.0
                mi = 0.0
                for j in range(k - lag + 1, k + 1):
                    zr = out[j].real
                    zi = out[j].imag
                    dr = 0.0
                    di = 0.0
                    for i in range(ndcoef - 1, -1, -1):
                        cr = dc[i].real
                        ci = dc[i].imag
                        tr = dr * zr - di * zi + cr
                        di = dr * zi + di * zr + ci
                        dr = tr
                    tr = mr * dr - mi * di
                    mi = mr * di + mi * dr
                    mr = tr
                if sqrt(mr * mr + mi * mi) < 1.0:
                    return (STATUS_CYCLE, k, lag, complex(mr, mi))
                skip = lag
                break


def escape_grid(coeffs, double re0, double dre, long nre, double im0,
                double dim, long nim, long max_iter, double escape_radius,
                double trust_radius, counts, status):
    cdef cnp.complex128_t[::1] c = np.ascontiguousarray(
        coeffs, dtype=np.complex128)
    cdef cnp.int32_t[:, ::1] cnt = counts
    cdef cnp.uint8_t[:, ::1] stt = status
    cdef Py_ssize_t ncoef = c.shape[0]
    cdef Py_ssize_t i, j, k, m
    cdef double x, y, zr, zi, az, wr, wi, tr, cr, ci
    cdef int st
    cdef long n

    for j in range(nim):
        y = im0 + dim * j
        for i in range(nre):
            x = re0 + dre * i
            zr = x
            zi = y
            st = STATUS_BUDGET
            n = max_iter
            for k in range(max_iter + 1):
                az = sqrt(zr * zr + zi * zi)
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
                    cr = c[m].real
                    ci = c[m].imag
                    tr = wr * zr - wi * zi + cr
                    wi = wr * zi + wi * zr + ci
                    wr = tr
                if not (isfinite(wr) and isfinite(wi)):
                    st = STATUS_OVERFLOW
                    n = k
                    break
                zr = wr
                zi = wi
            cnt[j, i] = <cnp.int32_t> n
            stt[j, i] = <cnp.uint8_t> st


def schroeder_core(p_coeffs, q_coeffs, recips, long order, phi_mant, phi_exp):
    cdef cnp.complex128_t[::1] pc = np.ascontiguousarray(
        p_coeffs, dtype=np.complex128)
    cdef cnp.complex128_t[::1] qc = np.ascontiguousarray(
        q_coeffs, dtype=np.complex128)
    cdef cnp.complex128_t[::1] rc = np.ascontiguousarray(
        recips, dtype=np.complex128)
    cdef cnp.complex128_t[::1] pm_out = phi_mant
    cdef cnp.int64_t[::1] pe_out = phi_exp

    cdef Py_ssize_t n_out = order + 1
    cdef Py_ssize_t deg_p = pc.shape[0] - 1
    cdef Py_ssize_t deg_q = qc.shape[0] - 1
    cdef Py_ssize_t max_pq = deg_p if deg_p > deg_q else deg_q
    if max_pq < 1:
        max_pq = 1

    # pow rows: phi**k for k = 1..max_pq, packed (re, im) + exponent
    pow_m_arr = np.zeros((max_pq + 1, n_out, 2), dtype=np.float64)
    pow_e_arr = np.zeros((max_pq + 1, n_out), dtype=np.int64)
    cdef cnp.float64_t[:, :, ::1] pwm = pow_m_arr
    cdef cnp.int64_t[:, ::1] pwe = pow_e_arr

    # phi, A = P(phi), B = Q(phi), E = exp(B), D = A*E
    sm_arr = np.zeros((5, n_out, 2), dtype=np.float64)
    se_arr = np.zeros((5, n_out), dtype=np.int64)
    cdef cnp.float64_t[:, :, ::1] sm = sm_arr
    cdef cnp.int64_t[:, ::1] se = se_arr
    cdef Py_ssize_t PHI = 0, AA = 1, BB = 2, EE = 3, DD = 4

    cdef XVal one, acc, t, s, v, a, b
    cdef Py_ssize_t n, l, k, j, i
    cdef double cr, ci

    one = _xnorm(1.0, 0.0, 0)

    sm[PHI, 1, 0] = one.re
    sm[PHI, 1, 1] = one.im
    se[PHI, 1] = one.ex
    pwm[1, 1, 0] = one.re
    pwm[1, 1, 1] = one.im
    pwe[1, 1] = one.ex

    sm[AA, 0, 0] = one.re
    sm[AA, 0, 1] = one.im
    se[AA, 0] = one.ex
    if deg_p >= 1:
        v = _xnorm(pc[1].real, pc[1].imag, 0)
        sm[AA, 1, 0] = v.re
        sm[AA, 1, 1] = v.im
        se[AA, 1] = v.ex
    if deg_q >= 1:
        v = _xnorm(qc[1].real, qc[1].imag, 0)
        sm[BB, 1, 0] = v.re
        sm[BB, 1, 1] = v.im
        se[BB, 1] = v.ex
    sm[EE, 0, 0] = one.re
    sm[EE, 0, 1] = one.im
    se[EE, 0] = one.ex
    sm[EE, 1, 0] = sm[BB, 1, 0]
    sm[EE, 1, 1] = sm[BB, 1, 1]
    se[EE, 1] = se[BB, 1]
    sm[DD, 0, 0] = one.re
    sm[DD, 0, 1] = one.im
    se[DD, 0] = one.ex
    a.re = sm[AA, 1, 0]
    a.im = sm[AA, 1, 1]
    a.ex = se[AA, 1]
    b.re = sm[EE, 1, 0]
    b.im = sm[EE, 1, 1]
    b.ex = se[EE, 1]
    v = _xadd(a, b)
    sm[DD, 1, 0] = v.re
    sm[DD, 1, 1] = v.im
    se[DD, 1] = v.ex

    for n in range(2, n_out):
        # S = sum_{l=0}^{n-2} D_{n-1-l} * (l+1) * phi_{l+1}
        s.re = 0.0
        s.im = 0.0
        s.ex = 0
        for l in range(0, n - 1):
            a.re = sm[DD, n - 1 - l, 0]
            a.im = sm[DD, n - 1 - l, 1]
            a.ex = se[DD, n - 1 - l]
            b.re = sm[PHI, l + 1, 0]
            b.im = sm[PHI, l + 1, 1]
            b.ex = se[PHI, l + 1]
            t = _xmul(a, b)
            s = _xadd(s, _xmul_c(t, <double> (l + 1), 0.0))
        cr = rc[n].real
        ci = rc[n].imag
        v = _xmul_c(s, cr, ci)
        sm[PHI, n, 0] = v.re
        sm[PHI, n, 1] = v.im
        se[PHI, n] = v.ex

        # extend phi powers to index n (uses phi_1..phi_{n-1} only)
        for k in range(2, max_pq + 1):
            acc.re = 0.0
            acc.im = 0.0
            acc.ex = 0
            for j in range(1, n - k + 2):
                a.re = sm[PHI, j, 0]
                a.im = sm[PHI, j, 1]
                a.ex = se[PHI, j]
                b.re = pwm[k - 1, n - j, 0]
                b.im = pwm[k - 1, n - j, 1]
                b.ex = pwe[k - 1, n - j]
                acc = _xadd(acc, _xmul(a, b))
            pwm[k, n, 0] = acc.re
            pwm[k, n, 1] = acc.im
            pwe[k, n] = acc.ex
        pwm[1, n, 0] = sm[PHI, n, 0]
        pwm[1, n, 1] = sm[PHI, n, 1]
        pwe[1, n] = se[PHI, n]

        # A_n = sum_i P_i pow[i][n], skipping zero coefficients
        acc.re = 0.0
        acc.im = 0.0
        acc.ex = 0
        for i in range(1, deg_p + 1):
            cr = pc[i].real
            ci = pc[i].imag
            if cr != 0.0 or ci != 0.0:
                a.re = pwm[i, n, 0]
                a.im = pwm[i, n, 1]
                a.ex = pwe[i, n]
                acc = _xadd(acc, _xmul_c(a, cr, ci))
        sm[AA, n, 0] = acc.re
        sm[AA, n, 1] = acc.im
        se[AA, n] = acc.ex

        acc.re = 0.0
        acc.im = 0.0
        acc.ex = 0
        for i in range(1, deg_q + 1):
            cr = qc[i].real
            ci = qc[i].imag
            if cr != 0.0 or ci != 0.0:
                a.re = pwm[i, n, 0]
                a.im = pwm[i, n, 1]
                a.ex = pwe[i, n]
                acc = _xadd(acc, _xmul_c(a, cr, ci))
        sm[BB, n, 0] = acc.re
        sm[BB, n, 1] = acc.im
        se[BB, n] = acc.ex

        # E_n = (1/n) sum_{j=1}^{n} j B_j E_{n-j}
        acc.re = 0.0
        acc.im = 0.0
        acc.ex = 0
        for j in range(1, n + 1):
            a.re = sm[BB, j, 0]
            a.im = sm[BB, j, 1]
            a.ex = se[BB, j]
            b.re = sm[EE, n - j, 0]
            b.im = sm[EE, n - j, 1]
            b.ex = se[EE, n - j]
            t = _xmul(a, b)
            acc = _xadd(acc, _xmul_c(t, <double> j, 0.0))
        acc = _xmul_c(acc, 1.0 / n, 0.0)
        sm[EE, n, 0] = acc.re
        sm[EE, n, 1] = acc.im
        se[EE, n] = acc.ex

        # D_n = sum_{i=0}^{n} A_i E_{n-i}
        acc.re = 0.0
        acc.im = 0.0
        acc.ex = 0
        for i in range(0, n + 1):
            a.re = sm[AA, i, 0]
            a.im = sm[AA, i, 1]
            a.ex = se[AA, i]
            b.re = sm[EE, n - i, 0]
            b.im = sm[EE, n - i, 1]
            b.ex = se[EE, n - i]
            acc = _xadd(acc, _xmul(a, b))
        sm[DD, n, 0] = acc.re
        sm[DD, n, 1] = acc.im
        se[DD, n] = acc.ex

    for n in range(n_out):
        pm_out[n] = sm[PHI, n, 0] + 1j * sm[PHI, n, 1]
        pe_out[n] = se[PHI, n]
