"""Matrix-free signed adjacency ``B = 2A - (11^T - I)`` and ``M = D - B``.

Only the sparse adjacency ``A`` is stored.  Integer inputs stay in int64 so
quadratic forms and dual diagonals are exact.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, TooLarge
from .sbm import Instance, as_labels, validate_edges

DEFAULT_DENSE_THRESHOLD = 4096
_INT_LIMIT = 2**62


def dense_threshold() -> int:
    """Dense cutoff, overridable through ``PCC_DENSE_THRESHOLD``."""
    return int(os.environ.get("PCC_DENSE_THRESHOLD", DEFAULT_DENSE_THRESHOLD))


@dataclass(frozen=True, eq=False)
class SignedAdjacency:
    n: int
    adjacency: sp.csr_array
    degrees: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges) -> "SignedAdjacency":
        e = validate_edges(n, edges)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.int64)
        adj = sp.csr_array((data, (rows, cols)), shape=(n, n))
        adj.sort_indices()
        return cls(n, adj, np.diff(adj.indptr).astype(np.int64))

    @classmethod
    def from_instance(cls, inst: Instance) -> "SignedAdjacency":
        return cls.from_edges(inst.n, inst.edges)

    @property
    def m(self) -> int:
        return int(self.degrees.sum() // 2)

    def has_edge(self, i: int, j: int) -> bool:
        lo, hi = self.adjacency.indptr[i], self.adjacency.indptr[i + 1]
        nbrs = self.adjacency.indices[lo:hi]
        k = np.searchsorted(nbrs, j)
        return bool(k < nbrs.shape[0] and nbrs[k] == j)

    def neighbors(self, i: int) -> np.ndarray:
        return self.adjacency.indices[self.adjacency.indptr[i]:self.adjacency.indptr[i + 1]]

    def dense(self, threshold: int | None = None) -> np.ndarray:
        """Dense integer ``B``; only for small ``n``."""
        limit = dense_threshold() if threshold is None else threshold
        if self.n > limit:
            raise TooLarge(f"n={self.n} exceeds dense threshold {limit}")
        b = 2 * self.adjacency.toarray() - 1
        np.fill_diagonal(b, 0)
        return b.astype(np.int64)


def _vector(B: SignedAdjacency, v) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != B.n:
        raise DimensionMismatch(f"expected vector of length {B.n}, got shape {v.shape}")
    if v.dtype.kind in "biu":
        v = v.astype(np.int64)
        if v.size and int(np.abs(v).max()) * 2 * B.n >= _INT_LIMIT:
            raise OverflowError("integer matvec would overflow int64")
    elif v.dtype.kind != "f":
        v = v.astype(np.float64)
    return v


def b_matvec(B: SignedAdjacency, v) -> np.ndarray:
    """``B v = 2 A v - (sum v) 1 + v`` in O(m + n)."""
    v = _vector(B, v)
    return 2 * (B.adjacency @ v) - v.sum() + v


def quad_form(B: SignedAdjacency, x) -> int:
    """Exact ``x^T B x`` for a +-1 vector."""
    x = as_labels(x, B.n)
    return int(x @ b_matvec(B, x))


def build_dual_diagonal(B: SignedAdjacency, x) -> np.ndarray:
    """Diagonal ``d_i = x_i (B x)_i`` of the dual candidate built from ``x``."""
    x = as_labels(x, B.n)
    return x * b_matvec(B, x)


def m_matvec(B: SignedAdjacency, d: np.ndarray, v) -> np.ndarray:
    """``(D - B) v`` in O(m + n)."""
    v = _vector(B, v)
    if d.shape != (B.n,):
        raise DimensionMismatch(f"dual diagonal has shape {d.shape}, expected ({B.n},)")
    return d * v - b_matvec(B, v)


def assemble_dense_m(B: SignedAdjacency, d: np.ndarray, threshold: int | None = None) -> np.ndarray:
    if d.shape != (B.n,):
        raise DimensionMismatch(f"dual diagonal has shape {d.shape}, expected ({B.n},)")
    m = -B.dense(threshold)
    m[np.diag_indices(B.n)] += d.astype(np.int64)
    return m
