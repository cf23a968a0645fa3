"""Two-community stochastic block model: parameters, labels and sampling.

Randomness comes from Philox4x64 (numpy's counter-based generator).  Every
random decision is tied to a key derived from the user seed, so any row of
the adjacency matrix can be regenerated on its own:

* key ``seed``                    -> hidden partition
* key ``seed + (i + 1) * 2**64``  -> edges ``(i, j)`` with ``j > i``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, DimensionMismatch, NonBinary, OddN, OutOfRange

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SbmParams:
    n: int
    p: float
    q: float
    alpha: float | None = None
    beta: float | None = None

    def as_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "q": self.q, "alpha": self.alpha, "beta": self.beta}


def make_params(
    n: int,
    p: float | None = None,
    q: float | None = None,
    *,
    alpha: float | None = None,
    beta: float | None = None,
) -> SbmParams:
    """Validate SBM parameters, given either directly as ``(p, q)`` or on the
    log scale as ``(alpha, beta)`` with ``p = alpha * ln(n) / n``.

    Out-of-range log-scale probabilities raise instead of being clamped.
    """
    if int(n) != n:
        raise OutOfRange(f"n must be an integer, got {n!r}")
    n = int(n)
    if n % 2:
        raise OddN(f"n must be even, got {n}")
    if n < 4:
        raise OutOfRange(f"n must be at least 4, got {n}")

    direct = p is not None or q is not None
    logscale = alpha is not None or beta is not None
    if direct == logscale:
        raise ValueError("give exactly one of (p, q) or (alpha, beta)")
    if logscale:
        if alpha is None or beta is None:
            raise ValueError("both alpha and beta are required")
        scale = math.log(n) / n
        p, q = alpha * scale, beta * scale
    elif p is None or q is None:
        raise ValueError("both p and q are required")

    p, q = float(p), float(q)
    for name, val in (("p", p), ("q", q)):
        if not 0.0 <= val <= 1.0:
            raise OutOfRange(f"{name}={val} outside [0, 1]")
    if q >= p and not (p == 0.0 and q == 0.0):
        raise Degenerate(f"need q < p, got p={p}, q={q}")
    return SbmParams(n, p, q, None if alpha is None else float(alpha),
                     None if beta is None else float(beta))


def as_labels(x, n: int | None = None) -> np.ndarray:
    """Return ``x`` as an int64 vector of +-1 labels, validating entries."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise DimensionMismatch(f"labels must be 1-d, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"expected {n} labels, got {arr.shape[0]}")
    if not np.all((arr == 1) | (arr == -1)):
        raise NonBinary("labels must be +1 or -1")
    return arr.astype(np.int64)


def balance(x) -> int:
    return int(np.sum(x))


def canonical(x: np.ndarray) -> np.ndarray:
    """Representative of ``{x, -x}`` with first entry +1."""
    return x if x[0] == 1 else -x


def same_bisection(x, y) -> bool:
    x, y = np.asarray(x), np.asarray(y)
    return bool(np.array_equal(x, y) or np.array_equal(x, -y))


@dataclass(frozen=True, eq=False)
class Instance:
    """A sampled graph (sorted ``i < j`` edge list) and its planted labels."""

    n: int
    edges: np.ndarray
    hidden: np.ndarray
    seed: int = 0
    params: SbmParams | None = field(default=None)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and self.edges.tobytes() == other.edges.tobytes()
            and _bytes(self.hidden) == _bytes(other.hidden)
        )


def _bytes(a):
    return None if a is None else a.tobytes()


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed & SEED_MASK) + (stream << 64)))


def _bernoulli_subset(rng: np.random.Generator, cand: np.ndarray, prob: float) -> np.ndarray:
    # binomial count, then uniform positions: O(hits) work per row for any prob
    size = cand.shape[0]
    if size == 0 or prob <= 0.0:
        return cand[:0]
    if prob >= 1.0:
        return cand
    k = int(rng.binomial(size, prob))
    pos = rng.choice(size, size=k, replace=False)
    pos.sort()
    return cand[pos]


def sample_hidden(n: int, seed: int) -> np.ndarray:
    rng = _rng(seed, 0)
    x = np.full(n, -1, dtype=np.int64)
    x[rng.choice(n, size=n // 2, replace=False)] = 1
    return x


def sample_row(params: SbmParams, hidden: np.ndarray, seed: int, i: int,
               plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    """Neighbours ``j > i`` of vertex ``i``, sorted.

    ``plus``/``minus`` are the sorted vertex sets of each side.
    """
    rng = _rng(seed, i + 1)
    same, other = (plus, minus) if hidden[i] == 1 else (minus, plus)
    same = same[np.searchsorted(same, i, side="right"):]
    other = other[np.searchsorted(other, i, side="right"):]
    hits = np.concatenate([
        _bernoulli_subset(rng, same, params.p),
        _bernoulli_subset(rng, other, params.q),
    ])
    hits.sort()
    return hits


def sample_instance(params: SbmParams, seed: int) -> Instance:
    n = params.n
    seed = int(seed) & SEED_MASK
    hidden = sample_hidden(n, seed)
    plus = np.flatnonzero(hidden == 1)
    minus = np.flatnonzero(hidden == -1)
    heads, tails = [], []
    for i in range(n - 1):
        nbrs = sample_row(params, hidden, seed, i, plus, minus)
        if nbrs.size:
            heads.append(np.full(nbrs.size, i, dtype=np.int64))
            tails.append(nbrs)
    if heads:
        edges = np.column_stack([np.concatenate(heads), np.concatenate(tails)])
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Instance(n, edges.astype(np.int64), hidden, seed, params)


def validate_edges(n: int, edges) -> np.ndarray:
    """Normalize an edge list to a sorted, deduplicated ``(m, 2)`` array with ``i < j``."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise OutOfRange("edge endpoint outside [0, n)")
    if np.any(e[:, 0] == e[:, 1]):
        raise ValueError("self-loops are not allowed")
    e = np.sort(e, axis=1)
    e = np.unique(e, axis=0)
    return e
