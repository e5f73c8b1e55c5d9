"""Command-line interface: ``qmle {simulate,reconstruct,benchmark,validate-pom}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from contextlib import nullcontext

import numpy as np

from . import io
from .benchmark import BenchmarkSpec, run_benchmark
from .measurements import ProductPOM, SICError, sic_overlap_residual, validate_pom
from .operators import eigh_desc
from .sampling import MODES, SamplingPlan, born_probs, settings_layout, simulate
from .solvers import ALGORITHMS, SolverConfig, solve

log = logging.getLogger("qmle")


def _threads(n):
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def _qubit_range(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out.extend(range(int(lo), int(hi or lo) + 1))
    return tuple(out)


def add_solver_flags(p: argparse.ArgumentParser) -> None:
    d = SolverConfig()
    p.add_argument("--algorithm", choices=ALGORITHMS, default=d.algorithm)
    p.add_argument("--beta", type=float, default=d.beta)
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--phi", type=float, default=d.phi)
    p.add_argument("--t1", type=float, default=d.t1)
    p.add_argument("--eps-dg", type=float, default=d.eps_dg)
    p.add_argument("--max-iter", type=int, default=d.max_iter)
    p.add_argument("--time-budget-s", type=float, default=None)
    p.add_argument("--no-bb", action="store_true")
    p.add_argument("--no-product-kernel", action="store_true")
    p.add_argument("--threads", type=int, default=None)


def solver_config(args, **extra) -> SolverConfig:
    return SolverConfig(algorithm=args.algorithm, beta=args.beta, alpha=args.alpha, gamma=args.gamma,
                        phi=args.phi, t1=args.t1, eps_dg=args.eps_dg, max_iter=args.max_iter,
                        time_budget=args.time_budget_s, use_bb=not args.no_bb,
                        product_kernel=not args.no_product_kernel, **extra)


def cmd_simulate(args) -> int:
    pom = io.parse_pom_spec(args.pom)
    rho = io.parse_state_spec(args.state, pom.dim, args.noise)
    plan = SamplingPlan(args.mode, args.shots, args.total_shots, args.seed)
    if plan.mode == "per_setting":
        if not isinstance(pom, ProductPOM):
            raise ValueError("per_setting sampling needs a product POM (prod:<register>:<n>)")
        settings_layout(pom)
    freq = simulate(rho, pom, plan)
    io.write_counts(args.out, freq)
    if args.true_state:
        io.write_state(args.true_state, rho)
    log.info("wrote %d outcomes (N=%s) to %s", freq.indices.size, freq.total or "exact", args.out)
    return 0


def cmd_reconstruct(args) -> int:
    pom = io.parse_pom_spec(args.pom)
    freq = io.read_counts(args.counts, pom.num_outcomes)
    target = None
    if args.target_l_ratio is not None:
        n_copies = freq.total or args.n_copies
        if n_copies is None and isinstance(pom, ProductPOM):
            n_copies = 100 * settings_layout(pom)[0] ** pom.n
        if n_copies is None:
            raise ValueError("--target-l-ratio on exact data needs --n-copies for this POM")
        if args.f_ref is not None:
            f_ref = args.f_ref
        elif args.true_state:
            rho_true = io.read_density(args.true_state)
            f_ref = float(-np.dot(freq.values, np.log(born_probs(rho_true, pom)[freq.indices])))
        elif freq.is_exact:
            f_ref = freq.entropy()
        else:
            raise ValueError("--target-l-ratio on count data needs --f-ref or --true-state")
        target = f_ref - math.log(args.target_l_ratio) / n_copies
    with _threads(args.threads):
        res = solve(freq, pom, solver_config(args, f_target=target))
    if args.out:
        io.write_state(args.out, res.rho)
    if args.trace:
        io.write_trace_csv(args.trace, res.trace)
    evals = eigh_desc(res.rho)[0]
    summary = {
        "algorithm": args.algorithm, "status": res.status, "iterations": len(res.trace),
        "final_F": res.F, "f_target": target,
        "seconds": res.trace.records[-1].elapsed if res.trace.records else 0.0,
        "eigenvalues": [float(x) for x in evals],
    }
    text = json.dumps(summary, indent=2)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_benchmark(args) -> int:
    cfg = solver_config(argparse.Namespace(**{**vars(args), "algorithm": "cg-apg"}))
    plan = SamplingPlan(args.mode, args.shots, args.total_shots, args.seed)
    spec = BenchmarkSpec(
        qubits=_qubit_range(args.qubits), states_per_n=args.states, noise=args.noise, pom=args.pom,
        algorithms=tuple(args.algorithms.split(",")), target_ratio=args.target_l_ratio,
        time_budget=args.time_budget_s or 600.0, plan=plan, n_copies=args.n_copies, seed=args.seed,
        product_kernel=not args.no_product_kernel, solver=cfg)

    def progress(row):
        log.info("n=%s seed=%s %s: %s in %ss", row["n"], row["state_seed"], row["algorithm"],
                 row["status"], row["seconds"])

    with _threads(args.threads):
        run_benchmark(spec, args.out, progress)
    return 0


def cmd_validate_pom(args) -> int:
    try:
        pom = io.parse_pom_spec(args.pom)
    except SICError as exc:
        print(f"sic_residual {exc.residual:.3e}")
        print("status FAIL")
        return 1
    dense = pom.materialize() if isinstance(pom, ProductPOM) else pom
    rep = validate_pom(dense)
    print(f"d {rep.dim}")
    print(f"K {rep.num_outcomes}")
    print(f"completeness_residual {rep.completeness_residual:.3e}")
    print(f"min_eigenvalue {rep.min_eigenvalue:.3e}")
    print(f"hermitian_residual {rep.hermitian_residual:.3e}")
    if args.pom.startswith("sic:"):
        print(f"sic_residual {sic_overlap_residual(io.read_state(args.pom[4:])):.3e}")
    ok = rep.ok(args.tol)
    print(f"status {'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="qmle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate tomography counts for a state")
    p.add_argument("--state", required=True, help="haar:<seed> | w | ghz | file:<path>")
    p.add_argument("--pom", required=True, help="e.g. prod:pauli6:4")
    p.add_argument("--noise", type=float, default=0.0, help="white-noise fraction")
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--shots", type=int, default=100, help="shots per setting")
    p.add_argument("--total-shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="counts file")
    p.add_argument("--true-state", default=None, help="where to write the true state")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", parents=[common], help="maximum-likelihood reconstruction from counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--pom", required=True)
    add_solver_flags(p)
    p.add_argument("--target-l-ratio", type=float, default=None)
    p.add_argument("--n-copies", type=int, default=None, help="N for exact-frequency files")
    p.add_argument("--f-ref", type=float, default=None,
                   help="reference F for the target (default: entropy of exact frequencies)")
    p.add_argument("--true-state", default=None, help="state file whose F sets the target reference")
    p.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; solvers are deterministic")
    p.add_argument("--trace", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("benchmark", parents=[common], help="time-to-target sweep over random noisy states")
    add_solver_flags(p)
    p.add_argument("--qubits", default="1-4", help="e.g. 1-4 or 2,4,6")
    p.add_argument("--states", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--pom", default="pauli6", help="register POM spec")
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--target-l-ratio", type=float, default=0.999)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--total-shots", type=int, default=None)
    p.add_argument("--n-copies", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("validate-pom", parents=[common], help="check completeness and positivity of a POM")
    p.add_argument("pom")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_validate_pom)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
