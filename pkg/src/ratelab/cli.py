"""Command-line surface: simulate, calibrate, analyze, report.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
error (e.g. a recommender exhausting its candidate items).  The root seed
comes from --seed, else the RATELAB_SEED environment variable, else the
config file, else 0; every subcommand derives all randomness from it
through named substreams, so identical invocations write identical bytes.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from . import config as cfgmod
from . import io as iomod
from .env_model import generate_environment, resolve_cutoffs
from .errors import ConfigError, DataError, RatelabError
from .rating_analytics import (
    build_mean_consistency_design,
    build_single_rating_design,
    cap_ratings,
    descriptive_suite,
    filter_min_ratings,
    group_partition,
    stratified_split,
    user_mean_scores,
)
from .sim_loop import run_simulation
from .stats import ols, user_bootstrap_variance


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratelab",
        description="Seeded recommender feedback-loop simulation and "
                    "rating-data analysis.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="FILE",
                       help="YAML config file overlaying the built-in defaults")
        p.add_argument("--seed", type=int,
                       help="root seed (default: RATELAB_SEED env var, then config)")

    sim = sub.add_parser("simulate", help="run the feedback-loop grid and write CSVs")
    common(sim)
    sim.add_argument("--suite", required=True, choices=sorted(cfgmod.SUITES))
    arm = sim.add_mutually_exclusive_group(required=True)
    arm.add_argument("--treatment", choices=cfgmod.TREATMENTS)
    arm.add_argument("--all-treatments", action="store_true")
    sim.add_argument("--recommender", nargs="+", default=["random"],
                     choices=cfgmod.RECOMMENDER_KINDS,
                     help="one or more policies to run (default: random)")
    sim.add_argument("--out", required=True, metavar="DIR")
    sim.add_argument("--jobs", type=int, default=1,
                     help="grid cells to run in parallel (default 1)")

    cal = sub.add_parser("calibrate", help="emit resolved rating cutoffs as CSV")
    common(cal)
    cal.add_argument("--suite", required=True, choices=sorted(cfgmod.SUITES))
    cal.add_argument("--out", required=True, metavar="FILE")

    ana = sub.add_parser("analyze", help="run an analysis on a ratings CSV")
    common(ana)
    ana.add_argument("input", metavar="RATINGS_CSV")
    ana.add_argument("--analysis", required=True,
                     choices=["single-rating-regression", "mean-consistency",
                              "variance-ci", "descriptives", "split"])
    ana.add_argument("--out", required=True, metavar="DIR")
    ana.add_argument("--cap", type=int,
                     help="cap per-user and per-item rating counts before analysis")
    ana.add_argument("--min-ratings", type=int,
                     help="drop users/items with fewer ratings (fixed-point filter)")
    ana.add_argument("--level", type=float,
                     help="confidence level for intervals (default from config)")
    ana.add_argument("--resamples", type=int,
                     help="bootstrap resample count (default from config)")
    ana.add_argument("--with-frac-personalized", action="store_true",
                     help="add the personalized-fraction covariate "
                          "(mean-consistency only)")

    rep = sub.add_parser("report", help="merge result CSVs into one summary")
    rep.add_argument("inputs", nargs="+", metavar="CSV")
    rep.add_argument("--out", required=True, metavar="FILE")

    return parser


def resolve_seed(args, cfg: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("RATELAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"RATELAB_SEED must be an integer, got {env!r}")
    return int(cfg["seed"])


# ---------------------------------------------------------------- simulate

def _simulate_cell(payload: dict) -> str:
    """Run one (suite, treatment, recommender) cell and write its files.

    Module-level so process pools can pickle it; cells share nothing but
    the read-only config, and file names are distinct per cell.
    """
    cfg = payload["cfg"]
    suite, treatment = payload["suite"], payload["treatment"]
    kind, seed = payload["recommender"], payload["seed"]
    sim_cfg = cfgmod.sim_config_from(cfg, suite, treatment, kind, seed)
    result = run_simulation(sim_cfg)
    base = os.path.join(payload["out"], f"{suite}_{treatment}_{kind}_{seed}")
    window = cfg["simulation"]["utility_window"]
    iomod.write_trace_csv(base + "_trace.csv", result)
    iomod.write_utility_csv(base + "_utility.csv", result.trace, window=window)
    iomod.write_fractions_csv(base + "_fractions.csv", result.trace, phase="loop")
    trace = result.trace
    iomod.write_manifest(base + "_manifest.json", iomod.manifest_payload(
        "simulate", seed, cfg,
        suite=suite, treatment=treatment, recommender=kind,
        cutoffs={"c1": result.cutoffs.c1, "c2": result.cutoffs.c2},
        rows={"total": len(trace),
              "init": int((trace.phases == "init").sum()),
              "loop": int((trace.phases == "loop").sum())},
        outputs=[os.path.basename(base + s) for s in
                 ("_trace.csv", "_utility.csv", "_fractions.csv")],
    ))
    return base


def cmd_simulate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    seed = resolve_seed(args, cfg)
    treatments = cfgmod.TREATMENTS if args.all_treatments else (args.treatment,)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    os.makedirs(args.out, exist_ok=True)
    payloads = [
        {"cfg": cfg, "suite": args.suite, "treatment": t, "recommender": kind,
         "seed": seed, "out": args.out}
        for t in treatments for kind in dict.fromkeys(args.recommender)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            bases = list(pool.map(_simulate_cell, payloads))
    else:
        bases = [_simulate_cell(p) for p in payloads]
    for base in bases:
        print(f"wrote {base}_{{trace,utility,fractions}}.csv")
    return 0


# ---------------------------------------------------------------- calibrate

def cmd_calibrate(args) -> int:
    cfg = cfgmod.load_config(args.config)
    seed = resolve_seed(args, cfg)
    env = generate_environment(cfgmod.env_config_from(cfg, seed))
    mode = cfg["thresholds"]["mode"]
    mc = cfg["simulation"]["mc_samples"]
    sigma = cfg["environment"]["noise_sigma"]
    rows = []
    for treatment in cfgmod.TREATMENTS:
        spec = cfgmod.threshold_spec(args.suite, treatment, mode)
        rows.append((treatment, resolve_cutoffs(spec, env, sigma, mc_samples=mc)))
    iomod.write_cutoffs_csv(args.out, rows)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- analyze

def _prepare_dataset(args, cfg, seed, out_dir, stem):
    mapping = iomod.mapping_from_config(cfg)
    rejects_path = os.path.join(out_dir, f"{stem}_rejects.csv")
    ds, ingest_report = iomod.ingest_csv(args.input, mapping,
                                         rejects_path=rejects_path)
    if len(ds) == 0:
        raise DataError(f"no ingestible rows in {args.input} "
                        f"({ingest_report['rows_rejected']} rejected)")
    prep_report = {"ingest": ingest_report, "rows_after_ingest": len(ds)}
    min_ratings = args.min_ratings if args.min_ratings is not None \
        else cfg["analysis"]["min_ratings"]
    if min_ratings is not None:
        ds = filter_min_ratings(ds, min_count=min_ratings)
        prep_report["min_ratings"] = min_ratings
        prep_report["rows_after_min_ratings_filter"] = len(ds)
    cap = args.cap if args.cap is not None else cfg["analysis"]["cap"]
    if cap is not None:
        ds = cap_ratings(ds, cap=cap, seed=seed)
        prep_report["cap"] = cap
        prep_report["rows_after_cap"] = len(ds)
    if len(ds) == 0:
        raise DataError("no rows left after filtering/capping")
    return ds, prep_report


def _write_fit(fit, out_dir, stem, analysis):
    csv_path = os.path.join(out_dir, f"{stem}_{analysis}.csv")
    fit.write_csv(csv_path)
    txt_path = os.path.join(out_dir, f"{stem}_{analysis}.txt")
    with open(txt_path, "w") as fh:
        fh.write(fit.format_table() + "\n")
    return [os.path.basename(csv_path), os.path.basename(txt_path)]


def cmd_analyze(args) -> int:
    cfg = cfgmod.load_config(args.config)
    seed = resolve_seed(args, cfg)
    level = args.level if args.level is not None else cfg["analysis"]["ci_level"]
    resamples = args.resamples if args.resamples is not None \
        else cfg["analysis"]["bootstrap_resamples"]
    os.makedirs(args.out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.input))[0]
    ds, prep_report = _prepare_dataset(args, cfg, seed, args.out, stem)
    analysis = args.analysis
    slug = analysis.replace("-", "_")
    outputs = []
    detail: dict = {}

    if analysis == "single-rating-regression":
        design, report = build_single_rating_design(ds)
        fit = ols(design, ci_level=level)
        outputs += _write_fit(fit, args.out, stem, slug)
        detail["design"] = report
        detail["r2"] = fit.r2

    elif analysis == "mean-consistency":
        split = stratified_split(ds, seed=seed)
        design, report = build_mean_consistency_design(
            split, with_frac_personalized=args.with_frac_personalized)
        fit = ols(design, ci_level=level)
        outputs += _write_fit(fit, args.out, stem, slug)
        detail["design"] = report
        detail["split_rows"] = {"train": len(split.train), "test": len(split.test)}
        detail["r2"] = fit.r2

    elif analysis == "variance-ci":
        field, parts = group_partition(ds)
        rows = []
        for label, sub in parts:
            ci = user_bootstrap_variance(user_mean_scores(sub),
                                         n_resamples=resamples,
                                         level=level, seed=seed)
            rows.append({"group": label, "n_users": sub.n_users,
                         "variance": ci.point, "ci_low": ci.low,
                         "ci_high": ci.high, "half_width": ci.half_width,
                         "level": ci.level, "n_resamples": ci.n_resamples})
        path = os.path.join(args.out, f"{stem}_{slug}.csv")
        iomod.write_table_csv(path, rows)
        outputs.append(os.path.basename(path))
        detail["group_field"] = field

    elif analysis == "descriptives":
        result = descriptive_suite(
            ds, histogram_bins=cfg["analysis"]["histogram_bins"],
            min_class_ratings=cfg["analysis"]["min_class_ratings"])
        empty = []
        for name, rows in result["tables"].items():
            if not rows:
                empty.append(name)
                continue
            path = os.path.join(args.out, f"{stem}_{name}.csv")
            iomod.write_table_csv(path, rows)
            outputs.append(os.path.basename(path))
        detail["skipped"] = result["skipped"]
        detail["empty_tables"] = empty

    elif analysis == "split":
        split = stratified_split(ds, seed=seed)
        for half, data in (("train", split.train), ("test", split.test)):
            path = os.path.join(args.out, f"{stem}_split_{half}.csv")
            iomod.export_records_csv(path, data)
            outputs.append(os.path.basename(path))
        detail["split_rows"] = {"train": len(split.train), "test": len(split.test)}

    manifest_path = os.path.join(args.out, f"{stem}_{slug}_manifest.json")
    iomod.write_manifest(manifest_path, iomod.manifest_payload(
        f"analyze --analysis {analysis}", seed, cfg,
        input=os.path.basename(args.input), preparation=prep_report,
        outputs=sorted(outputs), **detail))
    for name in sorted(outputs) + [os.path.basename(manifest_path)]:
        print(f"wrote {os.path.join(args.out, name)}")
    return 0


# ---------------------------------------------------------------- report

def cmd_report(args) -> int:
    import csv as _csv

    columns = ["source"]
    merged = []
    for path in args.inputs:
        try:
            fh = open(path, newline="")
        except OSError as err:
            raise DataError(f"cannot read {path}: {err}") from err
        with fh:
            reader = _csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{path} has no header row")
            for col in reader.fieldnames:
                if col not in columns:
                    columns.append(col)
            source = os.path.splitext(os.path.basename(path))[0]
            for row in reader:
                merged.append({"source": source, **row})
    with open(args.out, "w", newline="") as fh:
        writer = _csv.DictWriter(fh, fieldnames=columns, restval="")
        writer.writeheader()
        writer.writerows(merged)
    print(f"wrote {args.out} ({len(merged)} rows from {len(args.inputs)} files)")
    return 0


# ---------------------------------------------------------------- entry

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "calibrate": cmd_calibrate,
        "analyze": cmd_analyze,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"ratelab: config error: {err}", file=sys.stderr)
        return 2
    except DataError as err:
        print(f"ratelab: data error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"ratelab: data error: {err}", file=sys.stderr)
        return 3
    except RatelabError as err:
        print(f"ratelab: runtime error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
