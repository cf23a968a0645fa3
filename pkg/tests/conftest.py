import numpy as np
import pytest

from pccbisect.linops import SignedAdjacency
from pccbisect.sbm import make_params, sample_instance

HIDDEN4 = np.array([1, 1, -1, -1])


@pytest.fixture
def cliques4():
    """Two disjoint 2-cliques {0,1}, {2,3}: B = x x^T - I with x = (1,1,-1,-1)."""
    return SignedAdjacency.from_edges(4, [(0, 1), (2, 3)])


@pytest.fixture
def empty4():
    return SignedAdjacency.from_edges(4, [])


def random_instance(n, p, q, seed):
    inst = sample_instance(make_params(n, p, q), seed)
    return inst, SignedAdjacency.from_instance(inst)


def random_balanced(rng, n):
    x = np.full(n, -1, dtype=np.int64)
    x[rng.choice(n, n // 2, replace=False)] = 1
    return x


# ------------------------------------------------------- acceptance summary

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("acceptance")
    if label:
        _acceptance.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_acceptance):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {label}")
