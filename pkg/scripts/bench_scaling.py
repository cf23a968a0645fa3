"""Wall time of solve + randomized certify as n grows (alpha=16, beta=2)."""
import sys
import time

from pccbisect import CertifyConfig, SignedAdjacency, SolverConfig, certify, make_params, \
    sample_instance, solve

sizes = [int(s) for s in sys.argv[1:]] or [1_000, 10_000, 30_000, 100_000]
print(f"{'n':>8} {'m':>9} {'sample_s':>8} {'solve_s':>7} {'cert_s':>7} status")
for n in sizes:
    t0 = time.perf_counter()
    inst = sample_instance(make_params(n, alpha=16, beta=2), n)
    B = SignedAdjacency.from_instance(inst)
    t1 = time.perf_counter()
    res = solve(B, SolverConfig(seed=1))
    t2 = time.perf_counter()
    rep = certify(B, res.x, CertifyConfig(method="lanczos", seed=1))
    t3 = time.perf_counter()
    print(f"{n:8d} {inst.m:9d} {t1 - t0:8.2f} {t2 - t1:7.2f} {t3 - t2:7.2f} {rep.status}")
