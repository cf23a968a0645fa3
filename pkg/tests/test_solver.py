import itertools
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HIDDEN4, random_balanced, random_instance
from pccbisect.errors import NoConvergenceWarning, Unbalanced
from pccbisect.linops import SignedAdjacency, quad_form
from pccbisect.sbm import make_params, same_bisection, sample_instance
from pccbisect.solver import SolverConfig, refine, round_balanced, solve, spectral_candidate


def test_top_eigenvector_oracle(cliques4):
    # dense oracle: top eigenvector of B on 1^perp is the hidden labelling
    Bd = cliques4.dense().astype(float)
    P = np.eye(4) - np.ones((4, 4)) / 4
    w, V = np.linalg.eigh(P @ Bd @ P)
    assert same_bisection(np.sign(V[:, -1]).astype(int), HIDDEN4)
    res = spectral_candidate(cliques4, SolverConfig(seed=3))
    assert same_bisection(res.x, HIDDEN4)
    assert res.eigenvalue == pytest.approx(w[-1])


def test_empty_graph_any_balanced(empty4):
    res = solve(empty4)
    assert res.x.sum() == 0
    assert res.objective == 4


def test_round_balanced_rule():
    v = np.array([0.5, 0.1, 0.0, 0.3, -0.2, 0.1])
    # +1 side {0,1,2,3,5}: drop the two smallest |v|: index 2 (0.0) then 1 (0.1, lower index)
    assert round_balanced(v).tolist() == [1, -1, -1, 1, -1, 1]
    v = -np.array([0.5, 0.1, 0.2, 0.3, -0.2, 0.1])
    assert round_balanced(v).sum() == 0


def test_refine_already_optimal(cliques4):
    x, trace = refine(cliques4, HIDDEN4)
    assert np.array_equal(x, HIDDEN4) and trace == [12]


def test_refine_one_swap(cliques4):
    # oracle: the four possible swaps from (1,-1,1,-1)
    start = np.array([1, -1, 1, -1])
    gains = []
    for i, j in itertools.product([0, 2], [1, 3]):
        y = start.copy()
        y[i], y[j] = -1, 1
        gains.append(quad_form(cliques4, y))
    assert max(gains) == 12
    x, trace = refine(cliques4, start)
    assert trace == [-4, 12]
    assert same_bisection(x, HIDDEN4)


def test_refine_empty_unchanged(empty4):
    x, trace = refine(empty4, [1, -1, -1, 1])
    assert x.tolist() == [1, -1, -1, 1] and trace == [4]


def test_refine_rejects_unbalanced(cliques4):
    with pytest.raises(Unbalanced):
        refine(cliques4, [1, 1, 1, -1])


@settings(max_examples=60, deadline=None)
@given(half=st.integers(2, 15), seed=st.integers(0, 10_000), p=st.floats(0.05, 1.0),
       ratio=st.floats(0, 0.95))
def test_refine_monotone_and_balanced(half, seed, p, ratio):
    n = 2 * half
    _, B = random_instance(n, p, p * ratio, seed)
    x0 = random_balanced(np.random.default_rng(seed), n)
    x, trace = refine(B, x0)
    assert x.sum() == 0
    assert all(b > a for a, b in zip(trace, trace[1:]))
    assert trace[0] == quad_form(B, x0) and trace[-1] == quad_form(B, x)


def test_solve_deterministic():
    _, B = random_instance(200, 0.2, 0.02, 5)
    a, b = solve(B, SolverConfig(seed=9)), solve(B, SolverConfig(seed=9))
    assert np.array_equal(a.x, b.x)


def test_spectral_recovery_in_regime():
    prm = make_params(300, alpha=16, beta=2)
    hits = 0
    for s in range(50):
        inst = sample_instance(prm, s)
        res = spectral_candidate(SignedAdjacency.from_instance(inst), SolverConfig(seed=s))
        assert res.x.sum() == 0
        hits += same_bisection(res.x, inst.hidden)
    assert hits >= 45


def test_solve_recovery_in_regime():
    prm = make_params(300, alpha=16, beta=2)
    hits = sum(
        same_bisection(solve(SignedAdjacency.from_instance(inst), SolverConfig(seed=s)).x,
                       inst.hidden)
        for s, inst in ((s, sample_instance(prm, s + 1000)) for s in range(50)))
    assert hits >= 45


def test_solve_runtime_n1000():
    inst = sample_instance(make_params(1000, alpha=16, beta=2), 11)
    B = SignedAdjacency.from_instance(inst)
    t0 = time.perf_counter()
    res = solve(B)
    assert time.perf_counter() - t0 < 2.0
    assert same_bisection(res.x, inst.hidden)


def test_no_convergence_flag():
    _, B = random_instance(300, 0.1, 0.08, 1)
    with pytest.warns(NoConvergenceWarning):
        res = solve(B, SolverConfig(lanczos_iters=2, tol=1e-14))
    assert not res.converged and not res.metadata()["converged"]
    assert res.x.sum() == 0
