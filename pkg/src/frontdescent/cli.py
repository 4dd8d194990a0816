"""Experiment runner CLI.

Subcommands:
  run           execute the solver over a grid of (problem, n) x variant
  profiles      build performance profiles from one or more results directories
  trace-table   print selected iterations of a trace CSV in report form
  list-problems print the problem registry

Configuration is a JSON file mirroring the solver parameter names; command
line flags override file values. All output files are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import tempfile
import time
import warnings
from typing import Dict, List, Optional

import numpy as np

from .driver import TRACE_COLUMNS, FDConfig, RunResult, run
from .front import SCHEMA_HEADER, read_images_csv, write_front_csv
from .hypervolume import hypervolume, reference_point_cross_solver
from .metrics import (
    build_reference_front,
    delta_spread,
    gamma_spread,
    performance_profiles,
    profile_preprocess,
    purity,
)
from .suite import initial_points, list_problems, make_problem

__all__ = ["main"]

VARIANTS = ("sd", "newton", "bb")


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_front(path, front, n, m) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    os.close(fd)
    try:
        write_front_csv(front, tmp, n, m)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _trace_csv_text(result: RunResult) -> str:
    lines = [SCHEMA_HEADER, ",".join(TRACE_COLUMNS)]
    for rec in result.trace:
        row = rec.row()
        lines.append(
            ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row)
        )
    return "\n".join(lines) + "\n"


def _instance_key(problem: str, n: int) -> str:
    return f"{problem}_n{n}"


def _artifact_base(out_dir: str, problem: str, n: int, variant: str) -> str:
    return os.path.join(out_dir, f"{_instance_key(problem, n)}__{variant}")


def _fd_config(overrides: dict, variant: str, time_limit) -> FDConfig:
    fields = {f.name for f in dataclasses.fields(FDConfig)}
    kw = {k: v for k, v in overrides.items() if k in fields}
    unknown = set(overrides) - fields
    if unknown:
        raise ValueError(f"unknown solver parameter(s): {sorted(unknown)}")
    kw["variant"] = variant
    if time_limit is not None:
        kw["wall_clock_limit"] = float(time_limit)
    return FDConfig(**kw)


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.problem is not None:
        if args.n is None:
            raise ValueError("--problem requires --n")
        cfg["instances"] = [[args.problem, int(args.n)]]
    if args.variant is not None:
        cfg["variants"] = [args.variant]
    solver = dict(cfg.get("solver", {}))
    if args.sigma is not None:
        solver["sigma"] = float(args.sigma)
    if args.eps_hv is not None:
        solver["eps_hv"] = float(args.eps_hv)
    cfg["solver"] = solver
    if args.time_limit is not None:
        cfg["time_limit"] = float(args.time_limit)
    if args.out is not None:
        cfg["out"] = args.out
    cfg.setdefault("variants", ["sd"])
    cfg.setdefault("out", "results")
    return cfg


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args)
        instances = [(str(p), int(n)) for p, n in cfg.get("instances", [])]
        if not instances:
            raise ValueError("no instances configured (use --problem/--n or a config file)")
        deduped = list(dict.fromkeys(instances))
        if len(deduped) < len(instances):
            warnings.warn("duplicate instances in config were deduplicated")
        instances = deduped
        variants = list(dict.fromkeys(cfg["variants"]))
        for v in variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}")
        out_dir = cfg["out"]
        os.makedirs(out_dir, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise PermissionError(f"output directory {out_dir!r} is not writable")
        # validate instances and solver parameters up front: config errors
        # must fail before any run
        for pname, n in instances:
            make_problem(pname, n)
        for v in variants:
            _fd_config(cfg["solver"], v, cfg.get("time_limit"))
    except Exception as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    external = [read_images_csv(p) for p in cfg.get("external_fronts", [])]
    time_limit = cfg.get("time_limit")
    manifest = {"solver_parameters": {}, "runs": []}
    outputs: Dict[str, Dict[str, np.ndarray]] = {}
    run_meta: Dict[tuple, dict] = {}

    for pname, n in instances:
        problem = make_problem(pname, n)
        X0 = initial_points(problem, cfg.get("initial_points"))
        for variant in variants:
            fdcfg = _fd_config(cfg["solver"], variant, time_limit)
            base = _artifact_base(out_dir, pname, n, variant)
            entry = {
                "problem": pname,
                "n": n,
                "variant": variant,
                "artifacts": os.path.basename(base),
            }
            t0 = time.perf_counter()
            try:
                result = run(problem, X0, fdcfg)
            except Exception as exc:
                entry["status"] = "failed"
                entry["error"] = f"{type(exc).__name__}: {exc}"
                manifest["runs"].append(entry)
                continue
            wall = time.perf_counter() - t0
            _atomic_write_front(base + ".front.csv", result.front, n, problem.m)
            _atomic_write(base + ".trace.csv", _trace_csv_text(result))
            entry.update(
                status="ok",
                stop_reason=result.stop_reason,
                wall_time=wall,
                iterations=len(result.trace),
                front_size=len(result.front),
                evals=result.counters.as_dict(),
            )
            manifest["runs"].append(entry)
            manifest["solver_parameters"][variant] = dataclasses.asdict(fdcfg)
            outputs.setdefault(_instance_key(pname, n), {})[variant] = result.front.images()
            run_meta[(pname, n, variant)] = {
                "wall_time": wall,
                "evals": result.counters.as_dict(),
            }

    # cross-run metrics: reference front pools every variant plus external imports
    for pname, n in instances:
        key = _instance_key(pname, n)
        per_variant = outputs.get(key, {})
        if not per_variant:
            continue
        pool = list(per_variant.values()) + [e for e in external if e.shape[1] == next(
            iter(per_variant.values())
        ).shape[1]]
        ref = build_reference_front(pool)
        zeta = reference_point_cross_solver(np.vstack(pool))
        for variant, images in per_variant.items():
            inside = images[np.all(images <= zeta, axis=1)]
            metrics = {
                "purity": purity(images, ref),
                "gamma_spread": gamma_spread(images, ref),
                "delta_spread": delta_spread(images, ref),
                "hypervolume": hypervolume(inside, zeta) if inside.size else 0.0,
                "evals": run_meta[(pname, n, variant)]["evals"],
                "wall_time": run_meta[(pname, n, variant)]["wall_time"],
            }
            _atomic_write(
                _artifact_base(out_dir, pname, n, variant) + ".metrics.json",
                json.dumps(metrics, indent=2, sort_keys=True) + "\n",
            )

    _atomic_write(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    n_failed = sum(1 for r in manifest["runs"] if r["status"] != "ok")
    print(
        f"completed {len(manifest['runs']) - n_failed}/{len(manifest['runs'])} runs "
        f"into {out_dir}"
    )
    return 0


def _collect_fronts(dirs: List[str]) -> Dict[str, Dict[str, np.ndarray]]:
    """{instance: {solver: images}} from the front CSVs of the results dirs."""
    by_instance: Dict[str, Dict[str, np.ndarray]] = {}
    multiple = len(dirs) > 1
    for d in dirs:
        label = os.path.basename(os.path.normpath(d))
        for fname in sorted(os.listdir(d)):
            if not fname.endswith(".front.csv"):
                continue
            stem = fname[: -len(".front.csv")]
            if "__" not in stem:
                continue
            instance, variant = stem.rsplit("__", 1)
            solver = f"{label}:{variant}" if multiple else variant
            by_instance.setdefault(instance, {})[solver] = read_images_csv(
                os.path.join(d, fname)
            )
    return by_instance


def cmd_profiles(args) -> int:
    by_instance = _collect_fronts(args.results)
    shared = {
        inst: fronts for inst, fronts in by_instance.items() if len(fronts) >= 2
    }
    if not shared:
        print("error: need >= 2 solvers with overlapping instances", file=sys.stderr)
        return 2

    costs = []
    for inst in sorted(shared):
        fronts = shared[inst]
        pool = list(fronts.values())
        ref = build_reference_front(pool)
        if args.metric == "purity":
            values = {s: purity(Y, ref) for s, Y in fronts.items()}
        elif args.metric == "hypervolume":
            zeta = reference_point_cross_solver(np.vstack(pool))
            values = {s: hypervolume(Y, zeta) for s, Y in fronts.items()}
            costs.append(
                profile_preprocess("hypervolume", values, v_ref=hypervolume(ref, zeta))
            )
            continue
        elif args.metric == "gamma_spread":
            values = {s: gamma_spread(Y, ref) for s, Y in fronts.items()}
        else:
            values = {s: delta_spread(Y, ref) for s, Y in fronts.items()}
        costs.append(profile_preprocess(args.metric, values))

    curves = performance_profiles(costs)
    payload = {
        s: [[float(t), float(r)] for t, r in zip(taus, rhos)]
        for s, (taus, rhos) in curves.items()
    }
    _atomic_write(
        args.out + ".json", json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    solvers = sorted(curves)
    taus = curves[solvers[0]][0]
    lines = [",".join(["tau"] + solvers)]
    for i, t in enumerate(taus):
        lines.append(
            ",".join([repr(float(t))] + [repr(float(curves[s][1][i])) for s in solvers])
        )
    _atomic_write(args.out + ".csv", "\n".join(lines) + "\n")
    print(f"wrote {args.out}.json and {args.out}.csv ({len(costs)} instances)")
    return 0


def _read_trace(path: str) -> List[dict]:
    rows = []
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(row)
    return rows


def cmd_trace_table(args) -> int:
    rows = _read_trace(args.trace)
    if args.rows == "all":
        wanted = list(range(len(rows)))
    else:
        wanted = [int(s) for s in args.rows.split(",") if s.strip() != ""]
    header = f"{'k':>5}  {'|X^k| (% stat.)':>18}  {'n_r (last)':>12}  {'n_e (% stat.)':>15}  {'|X^k+1|':>8}"
    print(header)
    for k in wanted:
        match = [r for r in rows if int(r["k"]) == k]
        if not match:
            print(f"{k:>5}  -- not in trace --")
            continue
        r = match[0]
        print(
            f"{k:>5}  "
            f"{r['front_size_in']:>8} ({float(r['pct_sigma_stationary_in']):.1f}%)  "
            f"{r['n_refinements']:>6} ({r['iterations_since_last_refinement']})  "
            f"{r['n_explorations']:>6} ({float(r['pct_exploration_sigma_stationary']):.1f}%)  "
            f"{r['front_size_out']:>8}"
        )
    return 0


def cmd_list_problems(_args) -> int:
    for entry in list_problems():
        dims = ", ".join(str(d) for d in entry.dims)
        print(f"{entry.name:10s} m={entry.m}  n in {{{dims}}}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frontdescent")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="execute solver runs")
    pr.add_argument("--config", help="JSON experiment configuration file")
    pr.add_argument("--problem")
    pr.add_argument("--n", type=int)
    pr.add_argument("--variant", choices=VARIANTS)
    pr.add_argument("--sigma", type=float)
    pr.add_argument("--eps-hv", dest="eps_hv", type=float)
    pr.add_argument("--time-limit", dest="time_limit", type=float)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_run)

    pp = sub.add_parser("profiles", help="build performance profiles")
    pp.add_argument("results", nargs="+", help="results directories")
    pp.add_argument(
        "--metric",
        choices=["purity", "hypervolume", "gamma_spread", "delta_spread"],
        default="purity",
    )
    pp.add_argument("--out", default="profiles", help="output basename")
    pp.set_defaults(func=cmd_profiles)

    pt = sub.add_parser("trace-table", help="print a trace excerpt")
    pt.add_argument("trace", help="trace CSV path")
    pt.add_argument("--rows", default="all", help="comma-separated k values or 'all'")
    pt.set_defaults(func=cmd_trace_table)

    pl = sub.add_parser("list-problems", help="print the problem registry")
    pl.set_defaults(func=cmd_list_problems)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
