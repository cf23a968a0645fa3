"""Optimality certificates for a candidate bisection ``x``.

With ``d = x * (B x)`` and ``M = diag(d) - B`` we always have ``M x = 0``.
If the second smallest eigenvalue of ``M`` is positive then ``M`` is PSD
with kernel ``span(x)``, and for every other bisection ``y``

    x^T B x - y^T B y = y^T M y > 0,

so ``x`` is the unique maximiser of ``x^T B x`` over balanced labels, i.e.
the unique minimum bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, KernelMismatch, NotPsd, PccError, TooLarge
from .lanczos import lanczos
from .linops import (SignedAdjacency, assemble_dense_m, build_dual_diagonal, dense_threshold,
                     m_matvec, quad_form)
from .sbm import as_labels

METHODS = ("auto", "dense", "cholesky", "exact", "lanczos")
EXACT_MAX_N = 256
UNIT_ROUNDOFF = np.finfo(np.float64).eps / 2
RANDOMIZED_NOTE = (
    "randomized certificate: the Lanczos estimate is an upper bound on lambda_2 and may "
    "exceed it when a start vector is nearly orthogonal to the bottom eigenvector; the "
    "chance of a false certificate shrinks with more restarts")

CERTIFIED = "Certified"
NOT_SURE = "NotSure"


@dataclass
class CertifyConfig:
    method: str = "auto"
    dense_threshold: int = field(default_factory=dense_threshold)
    psd_tol: float | None = None     # None -> 100 * u * n * max|M_ii|
    lanczos_iters: int = 200
    restarts: int = 3
    lanczos_tol: float = 1e-10       # relative to max|M_ii|; 0 runs all iterations
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.psd_tol is not None and self.psd_tol < 0:
            raise ValueError("psd_tol must be nonnegative")
        if self.restarts < 1 or self.lanczos_iters < 1:
            raise ValueError("restarts and lanczos_iters must be at least 1")


@dataclass
class CertificateReport:
    status: str
    reason: str
    lambda2: float | None
    method: str
    objective: int
    uniqueness_claimed: bool = False
    randomized: bool = False
    psd_tol: float = 0.0
    seed: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> dict:
        lam = self.lambda2
        if lam is not None and not math.isfinite(lam):
            lam = None
        out = {
            "status": self.status,
            "reason": self.reason,
            "lambda2": lam,
            "method": self.method,
            "objective": self.objective,
            "uniqueness": self.uniqueness_claimed,
            "randomized": self.randomized,
            "psd_tol": float(self.psd_tol),
            "diagnostics": self.diagnostics,
            "seed": self.seed,
        }
        if self.randomized:
            out["note"] = RANDOMIZED_NOTE
        return out


def check_balance(x) -> bool:
    return int(np.sum(as_labels(x))) == 0


def default_psd_tol(n: int, d: np.ndarray) -> float:
    return 100.0 * UNIT_ROUNDOFF * n * float(np.abs(d).max(initial=0))


def _check_kernel(M: np.ndarray, x: np.ndarray) -> None:
    if np.any(M @ x != 0):
        raise KernelMismatch("M x != 0: the dual diagonal was not built from x")


def lambda2_dense(M: np.ndarray, x, threshold: int | None = None) -> float:
    """Second smallest eigenvalue of the integer matrix ``M`` (full eigvalsh)."""
    x = as_labels(x, M.shape[0])
    limit = dense_threshold() if threshold is None else threshold
    if M.shape[0] > limit:
        raise TooLarge(f"n={M.shape[0]} exceeds dense threshold {limit}")
    _check_kernel(M, x)
    if M.shape[0] < 2:
        raise DimensionMismatch("need n >= 2")
    return float(np.linalg.eigvalsh(M.astype(np.float64))[1])


def _deflated(M: np.ndarray, x: np.ndarray, shift: float) -> np.ndarray:
    n = M.shape[0]
    c = 1.0 + float(np.diag(M).max())
    return M + (c / n) * np.outer(x, x) - shift * np.eye(n)


def psd_cholesky_deflated(M: np.ndarray, x, psd_tol: float) -> bool:
    """True iff Cholesky of ``M + (c/n) x x^T - tau I`` succeeds.

    Since ``M x = 0`` the rank-one term lifts only the kernel direction (to
    ``c``), so success means ``lambda_2(M) > tau``.
    """
    x = as_labels(x, M.shape[0])
    _check_kernel(M, x)
    try:
        np.linalg.cholesky(_deflated(M, x, psd_tol))
    except np.linalg.LinAlgError:
        return False
    return True


def exact_positive_definite(M: np.ndarray, x) -> bool:
    """Decide ``lambda_2(M) > 0`` exactly via fraction-free elimination of
    ``M + x x^T`` over the integers (all leading principal minors positive).
    """
    x = as_labels(x, M.shape[0])
    n = M.shape[0]
    if n > EXACT_MAX_N:
        raise TooLarge(f"exact mode limited to n <= {EXACT_MAX_N}")
    _check_kernel(M, x)
    A = (M + np.outer(x, x)).astype(object)
    prev = 1
    for k in range(n):
        pivot = A[k, k]
        if pivot <= 0:
            return False
        if k + 1 < n:
            sub = A[k + 1:, k + 1:] * pivot - np.outer(A[k + 1:, k], A[k, k + 1:])
            # Bareiss: the division is exact
            A[k + 1:, k + 1:] = sub // prev
        prev = pivot
    return True


def lambda2_lanczos(
    matvec: Callable[[np.ndarray], np.ndarray],
    x,
    cfg: CertifyConfig,
    scale: float = 1.0,
) -> tuple[float, list[float], dict]:
    """Minimum over independent restarts of the smallest Ritz value of ``M``
    on ``x^perp``.

    Restart ``r`` draws its start vector from ``default_rng([seed, r])``, so
    adding restarts never changes earlier ones.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    unit = (x / math.sqrt(n))[None, :]
    per_restart, steps, residuals, breakdowns = [], [], [], 0
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        run = lanczos(matvec, n, cfg.lanczos_iters, rng, deflate=unit,
                      tol=cfg.lanczos_tol * scale)
        per_restart.append(run.smallest if run.steps else math.inf)
        steps.append(run.steps)
        residuals.append(run.residual)
        breakdowns += run.breakdowns
    diag = {"steps": steps, "residuals": residuals, "breakdowns": breakdowns,
            "ritz_per_restart": per_restart}
    return min(per_restart), per_restart, diag


def _decide(lam: float, tol: float) -> str:
    if lam <= 0.0:
        return "lambda2_nonpositive"
    if lam <= tol:
        return "lambda2_below_tolerance"
    return ""


def certify(B: SignedAdjacency, x, cfg: CertifyConfig | None = None) -> CertificateReport:
    """Certify that ``x`` is the unique minimum bisection of ``B``'s graph.

    Returns ``Certified`` only when ``x`` is balanced and the lambda_2 test
    passes at ``psd_tol``; every other outcome, including numerical errors,
    is ``NotSure``.  ``KernelMismatch`` is raised, never swallowed.
    """
    cfg = cfg or CertifyConfig()
    x = as_labels(x, B.n)
    method = cfg.method
    if method == "auto":
        method = "dense" if B.n <= cfg.dense_threshold else "lanczos"
    objective = quad_form(B, x)
    base = dict(method=method, objective=objective, seed=cfg.seed)
    if not check_balance(x):
        return CertificateReport(NOT_SURE, "balance_failed", None, psd_tol=0.0, **base)

    d = build_dual_diagonal(B, x)
    if np.any(m_matvec(B, d, x) != 0):
        raise KernelMismatch("(D - B) x != 0")
    tol = default_psd_tol(B.n, d) if cfg.psd_tol is None else cfg.psd_tol
    base["psd_tol"] = tol
    diag: dict = {"n": B.n, "m": B.m, "min_d": int(d.min()), "max_d": int(d.max())}

    try:
        if method == "lanczos":
            scale = max(1.0, float(np.abs(d).max()))
            lam, _, info = lambda2_lanczos(lambda v: m_matvec(B, d, v), x, cfg, scale)
            diag.update(info)
            reason = _decide(lam, tol) or "randomized_pass"
            ok = reason == "randomized_pass"
            return CertificateReport(CERTIFIED if ok else NOT_SURE, reason, lam,
                                     randomized=True, diagnostics=diag, **base)

        M = assemble_dense_m(B, d, cfg.dense_threshold)
        if method == "dense":
            lam = lambda2_dense(M, x, cfg.dense_threshold)
            reason = _decide(lam, tol)
        elif method == "cholesky":
            lam = None
            if psd_cholesky_deflated(M, x, tol):
                reason = ""
            elif psd_cholesky_deflated(M, x, 0.0):
                reason = "lambda2_below_tolerance"
            else:
                reason = "lambda2_nonpositive"
        elif method == "exact":
            lam = None
            reason = "" if exact_positive_definite(M, x) else "lambda2_nonpositive"
        else:
            raise ValueError(method)
    except KernelMismatch:
        raise
    except (PccError, np.linalg.LinAlgError) as err:
        diag["error"] = f"{type(err).__name__}: {err}"
        return CertificateReport(NOT_SURE, "error", None, diagnostics=diag, **base)

    if reason:
        return CertificateReport(NOT_SURE, reason, lam, diagnostics=diag, **base)
    return CertificateReport(CERTIFIED, "deterministic_pass", lam, uniqueness_claimed=True,
                             diagnostics=diag, **base)


def sos_factor(M: np.ndarray, x=None, tol: float | None = None) -> np.ndarray:
    """Pivoted Cholesky ``M = V V^T`` of a PSD matrix; ``V`` is ``n x r``.

    Stops once the largest remaining Schur-complement diagonal is below
    ``tol``.  A remaining diagonal below ``-tol`` raises ``NotPsd``.
    """
    A = np.array(M, dtype=np.float64)
    n = A.shape[0]
    if x is not None:
        _check_kernel(np.asarray(M), as_labels(x, n))
    if tol is None:
        tol = 1e-12 * n * max(1.0, float(np.abs(np.diag(A)).max(initial=0)))
    cols = []
    rank_cap = n - 1 if x is not None else n
    for _ in range(rank_cap):
        diag = np.diag(A)
        if diag.min() < -tol:
            raise NotPsd(f"negative pivot {diag.min():.3g}")
        k = int(np.argmax(diag))
        if diag[k] <= tol:
            break
        col = A[:, k] / math.sqrt(diag[k])
        cols.append(col)
        A -= np.outer(col, col)
    else:
        if np.diag(A).min() < -tol:
            raise NotPsd("negative remainder")
    if not cols:
        return np.zeros((n, 0))
    V = np.column_stack(cols)
    if V[:, 0].sum() < 0:
        V[:, 0] = -V[:, 0]
    return V


def sos_gap_check(V: np.ndarray, B: SignedAdjacency, x_nat, x) -> bool:
    """Check ``x_nat^T B x_nat - x^T B x == ||V^T x||^2`` to ``1e-6 * n``."""
    if V.shape[0] != B.n:
        raise DimensionMismatch("V has the wrong number of rows")
    x = as_labels(x, B.n)
    gap = quad_form(B, x_nat) - quad_form(B, x)
    sq = float(np.sum((V.T @ x) ** 2))
    return abs(gap - sq) <= 1e-6 * B.n
