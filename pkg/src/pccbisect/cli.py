"""Command line entry point: ``pcc-bisect {gen,pcc,certify,oracle,sweep}``.

Exit codes: 0 certified, 2 not sure, 1 error.  A flat ``key=value`` file
given with ``--config`` supplies defaults; explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import graphio
from .certifier import CertifyConfig, certify
from .errors import PccError
from .linops import SignedAdjacency, dense_threshold
from .oracle import brute_force_bisection
from .sbm import SbmParams, make_params, same_bisection, sample_instance
from .solver import SolverConfig, solve

EXIT_CERTIFIED, EXIT_ERROR, EXIT_NOT_SURE = 0, 1, 2
SWEEP_HEADER = ["alpha", "beta", "trial", "match", "certified", "lambda2", "objective", "wall_ms"]


class UsageError(Exception):
    pass


def derive_seed(*parts: int) -> int:
    """Pure 64-bit function of its integer arguments."""
    ss = np.random.SeedSequence([int(p) & ((1 << 64) - 1) for p in parts])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class SweepConfig:
    n: int
    alpha_grid: list[float]
    beta_grid: list[float]
    trials: int = 10
    solver: SolverConfig = field(default_factory=SolverConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    master_seed: int = 0

    def __post_init__(self):
        if not self.alpha_grid or not self.beta_grid:
            raise UsageError("alpha and beta grids must be non-empty")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")


@dataclass
class SweepRecord:
    alpha: float
    beta: float
    trial: int
    match: bool | None
    certified: bool | None
    lambda2: float | None
    objective: int | None
    wall_ms: int

    def row(self) -> list[str]:
        if self.match is None:
            return [repr(self.alpha), repr(self.beta), str(self.trial),
                    "error", "error", "error", "error", str(self.wall_ms)]
        lam = "nan" if self.lambda2 is None else f"{self.lambda2:.10g}"
        return [repr(self.alpha), repr(self.beta), str(self.trial), str(int(self.match)),
                str(int(self.certified)), lam, str(self.objective), str(self.wall_ms)]


def run_pipeline(B: SignedAdjacency, solver_cfg: SolverConfig, cert_cfg: CertifyConfig):
    res = solve(B, solver_cfg)
    report = certify(B, res.x, cert_cfg)
    return res, report


def run_trial(cfg: SweepConfig, cell: int, alpha: float, beta: float, trial: int) -> SweepRecord:
    try:
        params = make_params(cfg.n, alpha=alpha, beta=beta)
    except PccError:
        return SweepRecord(alpha, beta, trial, None, None, None, None, 0)
    seed = derive_seed(cfg.master_seed, cell, trial)
    inst = sample_instance(params, seed)
    B = SignedAdjacency.from_instance(inst)
    s_cfg = SolverConfig(cfg.solver.lanczos_iters, cfg.solver.refine_passes,
                         derive_seed(seed, 1), cfg.solver.tol)
    c_cfg = CertifyConfig(cfg.certify.method, cfg.certify.dense_threshold, cfg.certify.psd_tol,
                          cfg.certify.lanczos_iters, cfg.certify.restarts,
                          cfg.certify.lanczos_tol, derive_seed(seed, 2))
    t0 = time.perf_counter()
    res, report = run_pipeline(B, s_cfg, c_cfg)
    wall = int(round((time.perf_counter() - t0) * 1000))
    return SweepRecord(alpha, beta, trial, same_bisection(res.x, inst.hidden),
                       report.certified, report.lambda2, report.objective, wall)


def _run_trial_args(args):
    return run_trial(*args)


def sweep(cfg: SweepConfig, workers: int = 1) -> list[SweepRecord]:
    jobs = []
    cells = [(a, b) for a in cfg.alpha_grid for b in cfg.beta_grid]
    for cell, (a, b) in enumerate(cells):
        for t in range(cfg.trials):
            jobs.append((cfg, cell, a, b, t))
    if workers <= 1:
        return [run_trial(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial_args, jobs, chunksize=1))


def write_sweep_csv(records: list[SweepRecord], out) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for rec in records:
        w.writerow(rec.row())
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


# ---------------------------------------------------------------- parsing

def _floats(text: str) -> list[float]:
    return [float(t) for t in str(text).replace(",", " ").split()]


def read_config(path) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver-iters", type=int, default=300)
    p.add_argument("--refine-passes", type=int, default=50)
    p.add_argument("--solver-tol", type=float, default=1e-8)


def _add_certify(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=["auto", "dense", "cholesky", "exact", "lanczos"],
                   default="auto")
    p.add_argument("--iters", type=int, default=200, help="Lanczos steps per restart")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--tol", type=float, default=None,
                   help="certification slack; default scales with n and max|M_ii|")
    p.add_argument("--lanczos-tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcc-bisect", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample an SBM instance")
    _add_params(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")

    p = sub.add_parser("pcc", help="solve and certify")
    p.add_argument("graph", nargs="?")
    _add_params(p)
    _add_solver(p)
    _add_certify(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    c = sub.add_parser("certify", help="certify a given partition")
    c.add_argument("graph")
    c.add_argument("partition", help="file with one line of +-1 labels")
    _add_certify(c)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="-")

    o = sub.add_parser("oracle", help="brute-force minimum bisection (n <= 24)")
    o.add_argument("graph")
    o.add_argument("--out", default="-")

    s = sub.add_parser("sweep", help="(alpha, beta) phase sweep to CSV")
    s.add_argument("--n", type=int, default=300)
    s.add_argument("--alpha", type=_floats, default=[])
    s.add_argument("--beta", type=_floats, default=[])
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="-")
    _add_solver(s)
    _add_certify(s)
    parser.subcommands = {"gen": g, "pcc": p, "certify": c, "oracle": o, "sweep": s}
    return parser


def parse_args(argv) -> argparse.Namespace:
    argv = list(argv)
    config = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
            del argv[i:i + 2]
            break
        if tok.startswith("--config="):
            config = tok.split("=", 1)[1]
            del argv[i]
            break
    parser = build_parser()
    if config:
        defaults = read_config(config)
        for subp in parser.subcommands.values():
            known = {a.dest for a in subp._actions}
            subp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    return parser.parse_args(argv)


def _params(args) -> SbmParams:
    if args.n is None:
        raise UsageError("--n is required")
    if args.alpha is not None or args.beta is not None:
        return make_params(args.n, alpha=args.alpha, beta=args.beta)
    return make_params(args.n, args.p, args.q)


def _solver_cfg(args, seed: int) -> SolverConfig:
    return SolverConfig(args.solver_iters, args.refine_passes, seed, args.solver_tol)


def _certify_cfg(args, seed: int) -> CertifyConfig:
    return CertifyConfig(args.method, dense_threshold(), args.tol, args.iters, args.restarts,
                         args.lanczos_tol, seed)


def _emit(obj, out) -> None:
    text = json.dumps(obj, indent=2, default=float) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args) -> int:
    inst = sample_instance(_params(args), args.seed)
    if args.out in (None, "-"):
        sys.stdout.write(graphio.format_text(inst))
    else:
        graphio.save(inst, args.out)
    return 0


def cmd_pcc(args) -> int:
    if args.graph:
        inst = graphio.load(args.graph)
    else:
        inst = sample_instance(_params(args), args.seed)
    if inst.n % 2:
        raise UsageError(f"n={inst.n} is odd")
    B = SignedAdjacency.from_instance(inst)
    t0 = time.perf_counter()
    res, report = run_pipeline(B, _solver_cfg(args, derive_seed(args.seed, 1)),
                               _certify_cfg(args, derive_seed(args.seed, 2)))
    out = report.to_json()
    out["wall_ms"] = int(round((time.perf_counter() - t0) * 1000))
    out["solver"] = res.metadata()
    if inst.hidden is not None:
        out["matches_hidden"] = same_bisection(res.x, inst.hidden)
    out["partition"] = res.x.tolist()
    _emit(out, args.out)
    return EXIT_CERTIFIED if report.certified else EXIT_NOT_SURE


def cmd_certify(args) -> int:
    inst = graphio.load(args.graph)
    x = graphio.parse_labels(Path(args.partition).read_text(), inst.n)
    report = certify(SignedAdjacency.from_instance(inst), x, _certify_cfg(args, args.seed))
    _emit(report.to_json(), args.out)
    return EXIT_CERTIFIED if report.certified else EXIT_NOT_SURE


def cmd_oracle(args) -> int:
    inst = graphio.load(args.graph)
    opt, optima = brute_force_bisection(SignedAdjacency.from_instance(inst))
    _emit({"opt_value": opt, "num_optima": len(optima),
           "optima": [o.tolist() for o in optima]}, args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = SweepConfig(args.n, list(args.alpha), list(args.beta), args.trials,
                      _solver_cfg(args, 0), _certify_cfg(args, 0), args.seed)
    records = sweep(cfg, args.workers)
    write_sweep_csv(records, args.out)
    return 0


COMMANDS = {"gen": cmd_gen, "pcc": cmd_pcc, "certify": cmd_certify,
            "oracle": cmd_oracle, "sweep": cmd_sweep}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except (PccError, UsageError, ValueError, OSError) as err:
        print(f"pcc-bisect {args.command}: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
