"""Exhaustive ground truth for small graphs."""
from __future__ import annotations

import itertools

import numpy as np

from .errors import TooLarge
from .linops import SignedAdjacency, build_dual_diagonal, quad_form
from .sbm import as_labels, canonical

BRUTE_FORCE_MAX_N = 24
IDENTITY_MAX_N = 14
_CHUNK = 1 << 15


def _balanced_sign_fixed(n: int):
    """Yield chunks of balanced labelings with ``x[0] = +1``."""
    combos = itertools.combinations(range(1, n), n // 2 - 1)
    while True:
        block = list(itertools.islice(combos, _CHUNK))
        if not block:
            return
        idx = np.array(block, dtype=np.int64).reshape(len(block), -1)
        X = np.full((len(block), n), -1, dtype=np.int64)
        X[:, 0] = 1
        rows = np.repeat(np.arange(len(block)), idx.shape[1])
        X[rows, idx.ravel()] = 1
        yield X


def brute_force_bisection(B: SignedAdjacency) -> tuple[int, list[np.ndarray]]:
    """Maximum of ``x^T B x`` over balanced labels and all maximisers
    (one per bisection, first entry +1), in enumeration order.
    """
    n = B.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n % 2:
        raise ValueError("n must be even")
    Bd = B.dense(threshold=BRUTE_FORCE_MAX_N)
    best, optima = None, []
    for X in _balanced_sign_fixed(n):
        vals = np.einsum("ij,ij->i", X @ Bd, X)
        top = int(vals.max())
        if best is None or top > best:
            best, optima = top, []
        if top == best:
            optima.extend(X[vals == best])
    return best, optima


def exhaustive_identity_check(B: SignedAdjacency, x_nat, d: np.ndarray | None = None) -> bool:
    """Check, for every ``x`` in ``{+-1}^n``, both forms of

        x_nat^T B x_nat - x^T B x = x^T (D - B) x + sum_i d_i (1 - x_i^2)
                                  = x^T (D - B) x

    in exact integers.  ``d`` defaults to the dual diagonal of ``x_nat``;
    pass a perturbed one to confirm the check can fail.
    """
    n = B.n
    if n > IDENTITY_MAX_N:
        raise TooLarge(f"identity check limited to n <= {IDENTITY_MAX_N}, got {n}")
    x_nat = as_labels(x_nat, n)
    if d is None:
        d = build_dual_diagonal(B, x_nat)
    d = np.asarray(d, dtype=np.int64)
    Bd = B.dense(threshold=IDENTITY_MAX_N)
    M = np.diag(d) - Bd
    top = quad_form(B, x_nat)

    bits = (np.arange(2**n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    X = 1 - 2 * bits
    lhs = top - np.einsum("ij,ij->i", X @ Bd, X)
    mform = np.einsum("ij,ij->i", X @ M, X)
    slack = (1 - X**2) @ d
    return bool(np.all(lhs == mform + slack) and np.all(lhs == mform))


def uniqueness_witness(B: SignedAdjacency, x) -> bool:
    """True iff ``x`` (up to sign) is the only optimal bisection."""
    x = canonical(as_labels(x, B.n))
    _, optima = brute_force_bisection(B)
    return len(optima) == 1 and bool(np.array_equal(optima[0], x))
