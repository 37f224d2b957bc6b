"""Command-line interface.

Subcommands:

    price             price the contracts described by --config
    table <1..7>      recompute a built-in reference table as CSV
    sweep <axis>      absolute error of each order along one parameter
    benchmark         run only the benchmark engine for a config

Exit codes: 0 success, 2 configuration error, 3 solver failure (the
message names the failing computation step).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .barrier import solve_american_barrier
from .config import RunConfig, load_config
from .errors import ConfigError, SolverError
from .fd import FDSettings, fd_american_vanilla
from .tables import (
    SWEEPS,
    TABLES,
    compute_sweep,
    compute_table,
    default_threads,
)
from .tree import TreeSettings, tree_barrier
from .vanilla import solve_american_vanilla


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpwave",
        description="perturbative American option pricing under "
                    "jump-diffusion, with FD and lattice benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = False):
        p.add_argument("--config", required=config_required,
                       help="path to a JSON run configuration")
        p.add_argument("--orders", type=int, default=3, choices=range(4),
                       help="highest approximation order (default 3)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: JUMPWAVE_THREADS "
                            "or hardware parallelism)")
        p.add_argument("--json", action="store_true",
                       help="emit machine-readable JSON at full precision")
        p.add_argument("--out", default=None,
                       help="write CSV/JSON output to this path")

    p_price = sub.add_parser("price", help="price contracts from a config")
    common(p_price, config_required=True)

    p_table = sub.add_parser("table", help="recompute a reference table")
    p_table.add_argument("table_id", type=int, choices=sorted(TABLES),
                         metavar="table_id", help="table number 1..7")
    p_table.add_argument("--no-benchmark", action="store_true",
                         help="skip the FD/lattice benchmark column")
    common(p_table)

    p_sweep = sub.add_parser("sweep", help="error sweep along a parameter")
    p_sweep.add_argument("axis", choices=sorted(SWEEPS))
    p_sweep.add_argument("--points", type=int, default=21,
                         help="number of sweep points (default 21)")
    common(p_sweep)

    p_bench = sub.add_parser("benchmark",
                             help="benchmark-engine prices for a config")
    common(p_bench, config_required=True)
    return parser


def _emit(text: str, out_path: str | None) -> None:
    """Write a payload to --out, or to stdout when no path was given."""
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(lines: list[str], to_stderr: bool) -> None:
    stream = sys.stderr if to_stderr else sys.stdout
    for line in lines:
        print(line, file=stream)


def _cmd_price(args) -> int:
    cfg = load_config(args.config)
    orders = max(max(cfg.orders), args.orders)
    rows = []
    for T in cfg.maturities:
        spec = cfg.option_spec(T)
        if cfg.barrier is None:
            sol = solve_american_vanilla(cfg.model, spec, orders=orders)
        else:
            sol = solve_american_barrier(cfg.model, spec, cfg.barrier,
                                         orders=orders)
        for S0 in cfg.spots:
            rep = sol.report(S0)
            rows.append({
                "maturity": T,
                "spot": S0,
                "price": rep.price,
                "european": rep.european,
                "prices_by_order": rep.prices,
                "premiums_by_order": rep.premiums,
                "boundary_at_T": rep.boundaries[-1],
                "exercised": bool(rep.exercised),
                "flags": list(rep.flags),
                "wall_time_s": rep.wall_time_s,
                "boundary_iterations": rep.boundary_iterations,
            })
    if args.json:
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
        return 0
    lines = []
    for row in rows:
        flags = f" [{', '.join(row['flags'])}]" if row["flags"] else ""
        by_order = " ".join(
            f"N{n}={p:.6f}" for n, p in enumerate(row["prices_by_order"])
        )
        lines.append(
            f"T={row['maturity']:g} S0={row['spot']:g} "
            f"price={row['price']:.6f} european={row['european']:.6f} "
            f"boundary={row['boundary_at_T']:.6f} {by_order}{flags}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def table_csv(result, table) -> str:
    """Render a TableResult in the reference row/column layout."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    labels = [b.label for b in table.blocks]
    header = ["maturity", "spot"]
    for label in labels:
        header.append(f"{label}_european")
        header.append(f"{label}_benchmark")
        header.extend(f"{label}_n{n}" for n in range(result.orders + 1))
    writer.writerow(header)

    by_key = {(c.block, c.maturity, c.spot): c for c in result.cells}
    for T in table.maturities:
        for S0 in table.spots:
            row = [f"{T:g}", f"{S0:g}"]
            for label in labels:
                cell = by_key[(label, T, S0)]
                row.append(f"{cell.european:.3f}")
                row.append("" if cell.benchmark is None
                           else f"{cell.benchmark:.3f}")
                row.extend(f"{p:.3f}" for p in cell.approximations)
            writer.writerow(row)
    if result.rmse:
        row = ["rmse", ""]
        for label in labels:
            row.extend(["", ""])
            row.extend(repr(v) for v in result.rmse[label])
        writer.writerow(row)
    return buf.getvalue()


def _cmd_table(args) -> int:
    result = compute_table(
        args.table_id,
        orders=args.orders,
        with_benchmark=not args.no_benchmark,
        threads=args.threads or default_threads(),
    )
    table = TABLES[args.table_id]
    if args.json:
        payload = {
            "table": args.table_id,
            "cells": [
                {
                    "block": c.block, "maturity": c.maturity,
                    "spot": c.spot, "european": c.european,
                    "benchmark": c.benchmark,
                    "approximations": c.approximations,
                }
                for c in result.cells
            ],
            "rmse": result.rmse,
            "solver_time_s": result.solver_time_s,
            "benchmark_time_s": result.benchmark_time_s,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    _emit(table_csv(result, table), args.out)
    lines = [f"table {args.table_id}: "
             f"solver {result.solver_time_s:.2f}s, "
             f"benchmark {result.benchmark_time_s:.2f}s"]
    for label, values in result.rmse.items():
        formatted = " ".join(f"N{n}={v:.6f}" for n, v in enumerate(values))
        lines.append(f"rmse[{label}]: {formatted}")
    _summary(lines, to_stderr=args.out is None)
    return 0


def _cmd_sweep(args) -> int:
    points = compute_sweep(
        args.axis, n_points=args.points, orders=args.orders,
        threads=args.threads or default_threads(),
    )
    if args.json:
        payload = [{"value": v, "abs_errors": errs} for v, errs in points]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([args.axis]
                    + [f"err_n{n}" for n in range(args.orders + 1)])
    for value, errs in points:
        writer.writerow([repr(value)] + [repr(e) for e in errs])
    _emit(buf.getvalue(), args.out)
    return 0


def _cmd_benchmark(args) -> int:
    cfg = load_config(args.config)
    rows = []
    for T in cfg.maturities:
        spec = cfg.option_spec(T)
        if cfg.barrier is None:
            res = fd_american_vanilla(
                cfg.model, spec, list(cfg.spots),
                FDSettings(n_space=cfg.fd_n_space),
            )
            for S0, price in zip(cfg.spots, res.prices):
                rows.append({"engine": "fd", "maturity": T, "spot": S0,
                             "price": float(price),
                             "wall_time_s": res.wall_time_s})
        else:
            for S0 in cfg.spots:
                res = tree_barrier(
                    cfg.model, spec, cfg.barrier, S0,
                    TreeSettings(n_steps=cfg.tree_steps),
                )
                rows.append({"engine": "tree", "maturity": T, "spot": S0,
                             "price": res.price,
                             "wall_time_s": res.wall_time_s})
    if args.json:
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
        return 0
    lines = [
        f"{row['engine']} T={row['maturity']:g} S0={row['spot']:g} "
        f"price={row['price']:.6f} ({row['wall_time_s']:.2f}s)"
        for row in rows
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_COMMANDS = {
    "price": _cmd_price,
    "table": _cmd_table,
    "sweep": _cmd_sweep,
    "benchmark": _cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error ({type(exc).__name__}): {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
