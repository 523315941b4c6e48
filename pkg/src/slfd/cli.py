"""Command-line front end.

    slfd solve    --config FILE [--n LIST] [--rank M] [--K INT] [--N INT]
                  [--out DIR] [--parallel P]
    slfd bounds   --config FILE
    slfd oracle   --config FILE --modes M
    slfd validate [--K INT]

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import os
import sys

from . import basicsolver, coeffmesh, fdengine, report, sincquad, validate
from .config import ProblemConfig, apply_overrides, dumps_config, load_config
from .errors import InvalidParameter, SlfdError
from .oracle import galerkin_oracle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise _UsageError(message)


def _build_problem(cfg: ProblemConfig):
    q = coeffmesh.Potential.from_text(cfg.q_text, cfg.breakpoints)
    mesh = coeffmesh.build_mesh(cfg.N, cfg.breakpoints)
    qbar = coeffmesh.approximate_coefficient(q, mesh, cfg.rule)
    grid = sincquad.build_grid(mesh, cfg.K)
    return q, mesh, qbar, grid


def _solve_index(args):
    cfg, n = args
    q, mesh, qbar, grid = _build_problem(cfg)
    pair = basicsolver.solve_basic(n, qbar, grid, tol=cfg.bisect_tol)
    return fdengine.run_fd(pair, qbar, grid, q, rank=cfg.rank, tol=cfg.tol)


def _load_reference(path: str) -> dict[int, float]:
    refs: dict[int, float] = {}
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header = rows[0]
    lam_col = 1 if len(header) > 1 else 0
    for row in rows[1:]:
        refs[int(row[0])] = float(row[lam_col])
    return refs


def cmd_solve(cfg: ProblemConfig) -> int:
    indices = sorted(set(cfg.indices))
    if cfg.parallel > 1 and len(indices) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            solutions = list(pool.map(_solve_index, [(cfg, n) for n in indices]))
    else:
        q, mesh, qbar, grid = _build_problem(cfg)
        q_samples = fdengine.sample_potential(q, grid)
        solutions = []
        for n in indices:
            pair = basicsolver.solve_basic(n, qbar, grid, tol=cfg.bisect_tol)
            solutions.append(
                fdengine.run_fd(pair, qbar, grid, q, rank=cfg.rank, tol=cfg.tol,
                                q_samples=q_samples)
            )

    reference = _load_reference(cfg.reference) if cfg.reference else None
    os.makedirs(cfg.out_dir, exist_ok=True)
    table = report.summary_table(solutions, reference)
    sys.stdout.write(table)
    with open(os.path.join(cfg.out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(table)
    report.write_convergence_csv(solutions, os.path.join(cfg.out_dir, "convergence.csv"))
    with open(os.path.join(cfg.out_dir, "effective_config.txt"), "w", encoding="utf-8") as fh:
        fh.write(dumps_config(cfg))
    report.render_figures(solutions, cfg.out_dir)
    return EXIT_OK


def cmd_bounds(cfg: ProblemConfig, target: float = 1e-10) -> int:
    q, mesh, qbar, grid = _build_problem(cfg)
    dev = coeffmesh.sup_deviation(q, qbar)
    if not dev.reliable:
        sys.stderr.write(
            "warning: potential is unbounded on the mesh; the deviation "
            f"estimate dropped {dev.excluded} samples and is unreliable\n"
        )
    zero_qbar = all(v == 0.0 for v in qbar.values)
    qsup = coeffmesh.sup_deviation(
        q, coeffmesh.PiecewiseConstantCoeff(mesh, (0.0,) * mesh.n_intervals)
    ).value
    header = ["n", "M_n", "sup|q-qbar|", "r_bar", "r", "status", f"rank for {target:g}"]
    rows = [header]
    for n in sorted(set(cfg.indices)):
        pair = basicsolver.solve_basic(n, qbar, grid, tol=cfg.bisect_tol)
        bound = fdengine.apriori_bounds(pair.gap_M, dev.value)
        if bound.applicable:
            rank_needed = next(
                (m for m in range(1, 201) if bound.eig_bound(m) <= target), ">200"
            )
        else:
            rank_needed = "n/a"
        rows.append([
            str(n), f"{pair.gap_M:.6f}", f"{dev.value:.6f}",
            f"{bound.r_bar:.6f}", f"{bound.r:.6f}", bound.status, str(rank_needed),
        ])
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    for r, row in enumerate(rows):
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if r == 0:
            print("  ".join("-" * w for w in widths))
    if zero_qbar:
        for n in sorted(set(cfg.indices)):
            q_n = 2.0 * qsup / n if n >= 1 else 2.0 * qsup
            note = "" if q_n < 1.0 else "  (simple-scheme bound not applicable)"
            print(f"zero-qbar ratio q_{n} = {q_n:.6f}{note}")
    return EXIT_OK


def cmd_oracle(cfg: ProblemConfig, modes: int) -> int:
    q = coeffmesh.Potential.from_text(cfg.q_text, cfg.breakpoints)
    values = galerkin_oracle(q, modes, breakpoints=cfg.breakpoints, K=cfg.K)
    top = max(cfg.indices) + 1
    print("n  lambda (Galerkin oracle)")
    for n in range(min(top, len(values))):
        print(f"{n}  {values[n]:.12f}")
    return EXIT_OK


def cmd_validate(K_override: int | None = None) -> int:
    results = validate.run_all(K_override=K_override)
    for res in results:
        print(res.line())
    failures = sum(not r.passed for r in results)
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def _make_parser() -> _Parser:
    parser = _Parser(prog="slfd", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_opts(p, need_config=True):
        p.add_argument("--config", required=need_config, help="configuration file")
        p.add_argument("--n", help="comma-separated eigenvalue indices")
        p.add_argument("--rank", type=int, help="correction rank cap")
        p.add_argument("--K", type=int, dest="K", help="sinc half node count")
        p.add_argument("--N", type=int, dest="N", help="mesh interval count")
        p.add_argument("--out", help="output directory")
        p.add_argument("--parallel", type=int, help="concurrent index solves")

    add_config_opts(sub.add_parser("solve", help="run the correction series"))
    sub.add_parser("bounds", help="a-priori convergence bounds").add_argument(
        "--config", required=True)
    oracle_p = sub.add_parser("oracle", help="independent Galerkin eigenvalues")
    oracle_p.add_argument("--config", required=True)
    oracle_p.add_argument("--modes", type=int, required=True)
    val_p = sub.add_parser("validate", help="run the acceptance checks")
    val_p.add_argument("--K", type=int, dest="K", default=None,
                       help="override the node count (degrades precision)")
    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return cmd_validate(args.K)
        cfg = load_config(args.config)
        if args.command == "solve":
            indices = tuple(int(s) for s in args.n.split(",")) if args.n else None
            cfg = apply_overrides(
                cfg, indices=indices, rank=args.rank, K=args.K, N=args.N,
                out_dir=args.out, parallel=args.parallel,
            )
            return cmd_solve(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        return cmd_oracle(cfg, args.modes)
    except (_UsageError, InvalidParameter, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    except SlfdError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
