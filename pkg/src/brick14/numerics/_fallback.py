"""Pure numpy implementations of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def coo_to_csr(n, rows, cols, vals):
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    order = np.lexsort((cols, rows))
    r, c, v = rows[order], cols[order], vals[order]
    if r.size == 0:
        return np.zeros(n + 1, dtype=np.int64), c, v
    new = np.ones(r.size, dtype=bool)
    new[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
    starts = np.flatnonzero(new)
    data = np.add.reduceat(v, starts)
    indices = c[starts]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, r[starts] + 1, 1)
    return np.cumsum(indptr), indices, data


def _row_ids(indptr):
    return np.repeat(np.arange(indptr.size - 1), np.diff(indptr))


def csr_matvec(indptr, indices, data, x, _rows=None):
    rows = _row_ids(indptr) if _rows is None else _rows
    return np.bincount(rows, weights=data * x[indices], minlength=indptr.size - 1)


def pcg(indptr, indices, data, b, x0, minv, tol, maxit):
    rows = _row_ids(indptr)

    def mv(v):
        return csr_matvec(indptr, indices, data, v, rows)

    n = b.size
    bnorm = np.sqrt(b @ b)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    x = np.array(x0, dtype=np.float64, copy=True)
    r = b - mv(x)
    z = minv * r
    p = z.copy()
    rz = r @ z
    relres = np.sqrt(r @ r) / bnorm
    it = 0
    while relres > tol and it < maxit:
        q = mv(p)
        alpha = rz / (p @ q)
        x += alpha * p
        r -= alpha * q
        it += 1
        relres = np.sqrt(r @ r) / bnorm
        if relres <= tol:
            r = b - mv(x)
            relres = np.sqrt(r @ r) / bnorm
            if relres <= tol:
                break
            z = minv * r
            p = z.copy()
            rz = r @ z
            continue
        z = minv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, it, float(relres)
