# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse kernels: triplet compression, CSR matvec, Jacobi-PCG.

Mirrors ``_fallback`` operation for operation so both backends iterate
identically up to floating-point reassociation inside the dot products.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def coo_to_csr(Py_ssize_t n, cnp.int64_t[::1] rows, cnp.int64_t[::1] cols, double[::1] vals):
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t i, j, k, r, start, end, pos, out
    cdef cnp.int64_t c
    cdef double v
    counts = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] cnt = counts
    for k in range(m):
        cnt[rows[k] + 1] += 1
    for i in range(n):
        cnt[i + 1] += cnt[i]
    fill = counts[:n].copy()
    cdef cnp.int64_t[::1] fp = fill
    scol = np.empty(m, dtype=np.int64)
    sval = np.empty(m, dtype=np.float64)
    cdef cnp.int64_t[::1] sc = scol
    cdef double[::1] sv = sval
    # stable counting sort by row
    for k in range(m):
        r = rows[k]
        pos = fp[r]
        sc[pos] = cols[k]
        sv[pos] = vals[k]
        fp[r] = pos + 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] ip = indptr
    indices = np.empty(m, dtype=np.int64)
    data = np.empty(m, dtype=np.float64)
    cdef cnp.int64_t[::1] ind = indices
    cdef double[::1] dat = data
    out = 0
    for r in range(n):
        start = cnt[r]
        end = cnt[r + 1]
        # stable insertion sort by column
        for i in range(start + 1, end):
            c = sc[i]
            v = sv[i]
            j = i - 1
            while j >= start and sc[j] > c:
                sc[j + 1] = sc[j]
                sv[j + 1] = sv[j]
                j -= 1
            sc[j + 1] = c
            sv[j + 1] = v
        i = start
        while i < end:
            c = sc[i]
            v = sv[i]
            i += 1
            while i < end and sc[i] == c:
                v += sv[i]
                i += 1
            ind[out] = c
            dat[out] = v
            out += 1
        ip[r + 1] = out
    return indptr, indices[:out].copy(), data[:out].copy()


cdef inline void _matvec(cnp.int64_t[::1] ip, cnp.int64_t[::1] ind, double[::1] dat,
                         double[::1] x, double[::1] y) noexcept nogil:
    cdef Py_ssize_t i, k, n = ip.shape[0] - 1
    cdef double s
    for i in range(n):
        s = 0.0
        for k in range(ip[i], ip[i + 1]):
            s += dat[k] * x[ind[k]]
        y[i] = s


cdef inline double _dot(double[::1] a, double[::1] b) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(a.shape[0]):
        s += a[i] * b[i]
    return s


def csr_matvec(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, double[::1] data, double[::1] x):
    y = np.empty(indptr.shape[0] - 1, dtype=np.float64)
    cdef double[::1] yv = y
    with nogil:
        _matvec(indptr, indices, data, x, yv)
    return y


def pcg(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, double[::1] data,
        double[::1] b, double[::1] x0, double[::1] minv, double tol, Py_ssize_t maxit):
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, it = 0
    cdef double bnorm, relres, rz, rz_new, alpha, beta, pq
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    r_arr = np.empty(n, dtype=np.float64)
    z_arr = np.empty(n, dtype=np.float64)
    p_arr = np.empty(n, dtype=np.float64)
    q_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] r = r_arr
    cdef double[::1] z = z_arr
    cdef double[::1] p = p_arr
    cdef double[::1] q = q_arr
    bnorm = sqrt(_dot(b, b))
    if bnorm == 0.0:
        return np.zeros(n, dtype=np.float64), 0, 0.0
    with nogil:
        _matvec(indptr, indices, data, x, q)
        for i in range(n):
            r[i] = b[i] - q[i]
            z[i] = minv[i] * r[i]
            p[i] = z[i]
        rz = _dot(r, z)
        relres = sqrt(_dot(r, r)) / bnorm
        while relres > tol and it < maxit:
            _matvec(indptr, indices, data, p, q)
            pq = _dot(p, q)
            alpha = rz / pq
            for i in range(n):
                x[i] += alpha * p[i]
                r[i] -= alpha * q[i]
            it += 1
            relres = sqrt(_dot(r, r)) / bnorm
            if relres <= tol:
                # confirm against the true residual before stopping
                _matvec(indptr, indices, data, x, q)
                for i in range(n):
                    r[i] = b[i] - q[i]
                relres = sqrt(_dot(r, r)) / bnorm
                if relres <= tol:
                    break
                for i in range(n):
                    z[i] = minv[i] * r[i]
                    p[i] = z[i]
                rz = _dot(r, z)
                continue
            for i in range(n):
                z[i] = minv[i] * r[i]
            rz_new = _dot(r, z)
            beta = rz_new / rz
            for i in range(n):
                p[i] = z[i] + beta * p[i]
            rz = rz_new
    return x_arr, it, relres
