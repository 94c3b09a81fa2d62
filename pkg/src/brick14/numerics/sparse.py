"""Compressed-row storage for the symmetric stiffness matrices."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend


@dataclass(frozen=True)
class SparseSym:
    """Symmetric matrix in CSR layout with both triangles stored.

    Column indices are strictly increasing within each row.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @classmethod
    def from_triplets(cls, n, rows, cols, vals, backend=None) -> "SparseSym":
        """Sum duplicate ``(row, col)`` entries in input order."""
        k = _backend.get(backend)
        indptr, indices, data = k.coo_to_csr(
            int(n),
            np.ascontiguousarray(rows, dtype=np.int64),
            np.ascontiguousarray(cols, dtype=np.int64),
            np.ascontiguousarray(vals, dtype=np.float64),
        )
        return cls(int(n), indptr, indices, data)

    @classmethod
    def from_dense(cls, a) -> "SparseSym":
        a = np.asarray(a, dtype=np.float64)
        r, c = np.nonzero(a)
        return cls.from_triplets(a.shape[0], r, c, a[r, c])

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), np.diff(self.indptr))

    def matvec(self, x, backend=None) -> np.ndarray:
        k = _backend.get(backend)
        return k.csr_matvec(self.indptr, self.indices, self.data, np.ascontiguousarray(x, dtype=np.float64))

    def __matmul__(self, x):
        return self.matvec(x)

    def diagonal(self) -> np.ndarray:
        rows = self.row_ids()
        d = np.zeros(self.n)
        on = rows == self.indices
        d[rows[on]] = self.data[on]
        return d

    def submatrix(self, keep) -> "SparseSym":
        """Principal submatrix on the sorted index set ``keep``."""
        keep = np.asarray(keep, dtype=np.int64)
        new = np.full(self.n, -1, dtype=np.int64)
        new[keep] = np.arange(keep.size)
        rows = new[self.row_ids()]
        cols = new[self.indices]
        mask = (rows >= 0) & (cols >= 0)
        counts = np.bincount(rows[mask], minlength=keep.size)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return SparseSym(int(keep.size), indptr, cols[mask].copy(), self.data[mask].copy())

    def columns_times(self, cols_idx, values) -> np.ndarray:
        """``A[:, cols_idx] @ values`` as a full-length vector."""
        x = np.zeros(self.n)
        x[np.asarray(cols_idx, dtype=np.int64)] = values
        return self.matvec(x)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.row_ids(), self.indices] = self.data
        return a

    def transpose(self) -> "SparseSym":
        return SparseSym.from_triplets(self.n, self.indices, self.row_ids(), self.data)

    def symmetry_defect(self) -> float:
        """``max |A - A^T|`` over stored entries."""
        t = self.transpose()
        if not (np.array_equal(t.indptr, self.indptr) and np.array_equal(t.indices, self.indices)):
            return float("inf")
        return float(np.max(np.abs(t.data - self.data), initial=0.0))

    def dump(self, path) -> None:
        """Write ``row col value`` lines (0-based indices, round-trip floats)."""
        with Path(path).open("w") as fh:
            fh.write(f"% {self.n} {self.n} {self.nnz}\n")
            for r, c, v in zip(self.row_ids(), self.indices, self.data):
                fh.write(f"{r} {c} {float(v)!r}\n")

    @classmethod
    def load(cls, path) -> "SparseSym":
        with Path(path).open() as fh:
            header = fh.readline().split()
            n = int(header[1])
            rows, cols, vals = [], [], []
            for line in fh:
                r, c, v = line.split()
                rows.append(int(r))
                cols.append(int(c))
                vals.append(float(v))
        return cls.from_triplets(n, rows, cols, vals)
