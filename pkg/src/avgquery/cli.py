"""Command-line front end: ``run``, ``verify`` and ``report``.

Exit codes: 0 success; 1 a verify criterion failed; 2 invalid config,
missing input or empty report directory; 3 runtime failure during ``run``.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from collections import defaultdict
from pathlib import Path

from . import bounds
from . import harness as h
from . import suites
from .config import ConfigError, ExperimentConfig, load, parse_text, with_overrides
from .oracle import SizeCapError

log = logging.getLogger("avgquery")


def _summary(cfg: ExperimentConfig, extra: dict) -> dict:
    return {"experiment": cfg.name, "kind": cfg.kind, "seed": cfg.seed, "config": cfg.to_text(), **extra}


def execute(cfg: ExperimentConfig) -> str:
    """Run one validated experiment, write its files and return a digest line."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / cfg.name
    if cfg.kind == "distinguish":
        rows, results = [], []
        for n in cfg.sizes:
            r = h.distinguishing_experiment(n, cfg.m, cfg.trials, cfg.seed, cfg.decider, experiment=f"{cfg.name}/{n}",
                                            amplify=cfg.amplify)
            results.append({"n": n, "m": cfg.m, "p0_d1": r.p0_d1, "p0_d2": r.p0_d2, "gap": r.gap,
                            "sigma": r.sigma, "timeouts": r.timeouts})
            rows.append(results[-1])
        h.write_csv(rows, f"{stem}.csv", ["n", "m", "p0_d1", "p0_d2", "gap", "sigma", "timeouts"])
        h.write_summary(_summary(cfg, {"results": results}), f"{stem}.summary.json")
        return f"{cfg.name}: gaps " + ", ".join(f"n={r['n']}: {r['gap']:.4f}" for r in results)

    if cfg.kind == "verify-bounds":
        rows = []
        for size in cfg.sizes:
            f, mu = cfg.make_function(size), cfg.make_distribution(size)
            for mode in ("linear", "sqrt"):
                e = bounds.expected_bs(f, mu, mode, rng=h.derive_rng(cfg.seed, cfg.name, size, mode))
                rows.append((f"E[{'bs' if mode == 'linear' else 'sqrt(bs)'}] {f} {mu}",
                             "exact" if e.exact else "estimate", e.value, 3 * e.stderr))
            if f.arity <= bounds.DTREE_CAP and mu.kind != "simon_d2":
                value, _ = bounds.optimal_avg_dtree(f, mu)
                rows.append((f"D^mu {f} {mu}", "exact", value, 0.0))
        bounds.write_report_csv(rows, f"{stem}.csv")
        h.write_summary(_summary(cfg, {"rows": [list(r) for r in rows]}), f"{stem}.summary.json")
        return f"{cfg.name}: {len(rows)} bound quantities"

    if cfg.kind == "certify":
        rows = []
        for size in cfg.sizes:
            f = cfg.make_function(size)
            rep = h.certify_bounded_error(cfg.algorithm, f, None, cfg.trials_per_input, cfg.seed,
                                          experiment=f"{cfg.name}/{size}", tunables=cfg.tunables)
            rows.append({"size": size, "trials": rep.inputs * rep.trials_per_input, "mean_queries": rep.mean_queries,
                         "stderr": rep.sigma, "min_success_rate": rep.min_rate, "mode": "certify", "seed": cfg.seed,
                         "passed": rep.passed})
        h.write_csv(rows, f"{stem}.csv")
        h.write_summary(_summary(cfg, {"certified": {str(r["size"]): r["passed"] for r in rows}}),
                        f"{stem}.summary.json")
        return f"{cfg.name}: " + ", ".join(f"size {r['size']} {'PASS' if r['passed'] else 'FAIL'}" for r in rows)

    stats = [h.avg_complexity(cfg.algorithm, cfg.make_function(s), cfg.make_distribution(s), cfg.trials, cfg.seed,
                              exact=cfg.exact, inner_reps=cfg.inner_reps, experiment=f"{cfg.name}/{s}",
                              tunables=cfg.tunables, jobs=cfg.jobs) for s in cfg.sizes]
    rows = [{"size": s, "trials": st.trials, "mean_queries": st.mean_queries, "stderr": st.stderr,
             "min_success_rate": st.min_success_rate if st.min_success_rate is not None else st.success_rate,
             "mode": st.mode, "seed": cfg.seed} for s, st in zip(cfg.sizes, stats)]
    extra = {"rows": rows}
    digest = f"{cfg.name}: mean queries " + ", ".join(f"{r['size']}: {r['mean_queries']:.4g}" for r in rows)
    if len(cfg.sizes) >= 3:
        slope, se, icpt, ci = h.fit_loglog(cfg.sizes, [s.mean_queries for s in stats])
        extra["fit"] = {"slope": slope, "slope_stderr": se, "intercept": icpt, "slope_ci95": list(map(float, ci))}
        digest += f"; slope {slope:.3f} [{ci[0]:.3f}, {ci[1]:.3f}]"
    h.write_csv(rows, f"{stem}.csv")
    h.write_summary(_summary(cfg, extra), f"{stem}.summary.json")
    return digest


def cmd_run(args) -> int:
    try:
        cfg = load(args.config)
        cfg = with_overrides(cfg, seed=args.seed, jobs=args.jobs, out=args.out, exact=True if args.exact else None)
        parse_text(cfg.to_text())  # overrides must still validate
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        print(execute(cfg))
    except SizeCapError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - any failure mid-run maps to exit 3
        log.debug("run failed", exc_info=True)
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args) -> int:
    try:
        results = suites.run_suite(args.suite, args.seed)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 2
    for r in results:
        for c in r.criteria:
            print(c.line())
    if args.out:
        suites.write_results(results, Path(args.out), args.seed)
    return 0 if all(r.passed for r in results) else 1


def _read_tables(directory: Path):
    groups = defaultdict(list)
    for path in sorted(directory.glob("*.csv")):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or not {"size", "mean_queries"} <= set(reader.fieldnames):
                continue
            for row in reader:
                try:
                    groups[path.stem].append((float(row["size"]), float(row["mean_queries"])))
                except ValueError:
                    continue
    return groups


def cmd_report(args) -> int:
    d = Path(args.directory)
    groups = _read_tables(d) if d.is_dir() else {}
    if not groups:
        print(f"error: no harness CSVs in {d}", file=sys.stderr)
        return 2
    out = Path(args.out) if args.out else d / "report"
    out.mkdir(parents=True, exist_ok=True)
    points, lines, table = [], [], []
    for exp, pts in sorted(groups.items()):
        pts = sorted(pts)
        points += [{"experiment": exp, "size": s, "mean_queries": m} for s, m in pts]
        usable = [(s, m) for s, m in pts if s > 0 and m > 0]
        if len(usable) < 3:
            print(f"{exp}: {len(usable)} size point(s), slope omitted")
            table.append({"experiment": exp, "points": len(pts), "slope": "", "slope_stderr": "", "intercept": ""})
            continue
        slope, se, icpt, _ = h.fit_loglog(*zip(*usable))
        table.append({"experiment": exp, "points": len(pts), "slope": slope, "slope_stderr": se, "intercept": icpt})
        lines += [{"experiment": exp, "size": s, "fitted": float(math.exp(icpt) * s**slope)}
                  for s, _ in usable]
        print(f"{exp}: slope {slope:.3f} +- {se:.3f} over {len(usable)} sizes")
    h.write_csv(points, out / "points.csv", ["experiment", "size", "mean_queries"])
    h.write_csv(lines, out / "fitted_lines.csv", ["experiment", "size", "fitted"])
    h.write_csv(table, out / "slopes.csv", ["experiment", "points", "slope", "slope_stderr", "intercept"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="avgquery", description="Average-case query complexity experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment described by a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int)
    r.add_argument("--out")
    r.add_argument("--exact", action="store_true", help="force exact enumeration mode")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", choices=suites.SUITES + ("all",))
    v.add_argument("--seed", type=int, default=20261015)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    rep = sub.add_parser("report", help="merge harness CSVs into plot-ready data")
    rep.add_argument("directory")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
