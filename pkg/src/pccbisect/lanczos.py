"""Lanczos iteration with full reorthogonalization and optional deflation.

Shared by the spectral solver (top eigenpair of ``B`` on ``1^perp``) and the
randomized certifier (bottom Ritz value of ``D - B`` on ``x^perp``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

BREAKDOWN_TOL = 1e-10
EXHAUSTED_TOL = 1e-8


@dataclass
class LanczosResult:
    ritz_values: np.ndarray      # ascending
    ritz_vector: np.ndarray | None
    steps: int
    residual: float              # ||A y - theta y|| for the target pair
    converged: bool
    breakdowns: int
    exhausted: bool              # Krylov space filled the whole deflated space

    @property
    def smallest(self) -> float:
        return float(self.ritz_values[0])

    @property
    def largest(self) -> float:
        return float(self.ritz_values[-1])


def _project(v: np.ndarray, basis: np.ndarray, deflate: np.ndarray | None) -> np.ndarray:
    # classical Gram-Schmidt, applied twice
    for _ in range(2):
        if deflate is not None:
            v -= deflate.T @ (deflate @ v)
        if basis.shape[0]:
            v -= basis.T @ (basis @ v)
    return v


def _extreme_pair(alphas, betas, largest: bool):
    k = len(alphas)
    if k == 1:
        return float(alphas[0]), np.ones(1)
    idx = k - 1 if largest else 0
    w, s = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas), select="i",
                            select_range=(idx, idx))
    return float(w[0]), s[:, 0]


def lanczos(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    steps: int,
    rng: np.random.Generator,
    *,
    deflate: np.ndarray | None = None,
    largest: bool = False,
    tol: float = 0.0,
    want_vector: bool = False,
    check_every: int = 10,
) -> LanczosResult:
    """Run up to ``steps`` Lanczos steps on ``P A P`` where ``P`` projects out
    the rows of ``deflate`` (orthonormal, shape ``(w, n)``).

    Stops early once the residual of the target Ritz pair (smallest, or
    largest if ``largest``) drops to ``tol``.  A breakdown restarts from a
    fresh random vector orthogonal to everything seen so far, so the
    tridiagonal matrix becomes block diagonal.
    """
    if deflate is not None:
        deflate = np.atleast_2d(np.asarray(deflate, dtype=np.float64))
    steps = max(1, int(steps))
    Q = np.empty((steps, n))
    alphas: list[float] = []
    betas: list[float] = []
    scale = 0.0
    breakdowns = 0
    exhausted = False
    converged = False

    q = _project(rng.standard_normal(n), Q[:0], deflate)
    qn = np.linalg.norm(q)
    if qn == 0.0:
        return LanczosResult(np.zeros(0), None, 0, 0.0, True, 0, True)
    q /= qn

    b = 0.0
    for j in range(steps):
        Q[j] = q
        w = np.asarray(matvec(q), dtype=np.float64)
        a = float(q @ w)
        w = _project(w, Q[:j + 1], deflate)
        b = float(np.linalg.norm(w))
        alphas.append(a)
        scale = max(scale, abs(a), b)
        broke = b <= BREAKDOWN_TOL * max(scale, 1.0)

        if tol > 0.0 and ((j + 1) % check_every == 0 or broke):
            _, s = _extreme_pair(alphas, betas, largest)
            if b * abs(s[-1]) <= tol:
                converged = True
                break
        if j + 1 == steps:
            break
        if broke:
            breakdowns += 1
            r = rng.standard_normal(n)
            r0 = np.linalg.norm(r)
            r = _project(r, Q[:j + 1], deflate)
            rn = np.linalg.norm(r)
            if rn <= EXHAUSTED_TOL * r0:
                exhausted = converged = True
                b = 0.0
                break
            betas.append(0.0)
            q = r / rn
        else:
            betas.append(b)
            q = w / b

    k = len(alphas)
    ritz = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas), eigvals_only=True) \
        if k > 1 else np.asarray(alphas, dtype=np.float64)
    theta, s = _extreme_pair(alphas, betas, largest)
    residual = abs(b * s[-1])
    if tol > 0.0 and residual <= tol:
        converged = True
    vec = Q[:k].T @ s if want_vector else None
    return LanczosResult(np.asarray(ritz), vec, k, residual, converged, breakdowns, exhausted)
