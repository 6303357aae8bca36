"""Command-line front door.

Subcommands: construct, analyze, simulate, compare, reproduce. Every
command is deterministic under fixed flags and seed; simulation results
are additionally invariant to --threads. BIPSPREAD_OUTDIR sets the
default directory for output files given as bare names.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import sim
from .bitmatrix import coherence, load_matrix, save_matrix
from .codec import SparseCodeParams
from .constructors import METHODS, ConstructionSpec
from .sim import (
    SimConfig,
    compare_methods,
    config_to_dict,
    gram_histogram_export,
    histogram_to_csv,
    load_config,
    results_to_csv,
    run_bler,
)

# Per-figure experiment presets: matrix shape, packet bits, and SNR grids
# (dB) chosen so the weakest baseline still lands in the >= 1e-3 BLER
# regime at desk scale.
FIGURE_SHAPES = {
    2: (15, 24, 8),
    3: (20, 24, 8),
    4: (25, 65, 11),
    5: (40, 65, 11),
    6: (15, 24, 8),
}
FIGURE_SNR_GRIDS = {
    2: {"awgn": (2.0, 4.0, 6.0, 8.0), "rayleigh": (10.0, 14.0, 18.0, 22.0)},
    3: {"awgn": (0.0, 2.0, 4.0, 6.0), "rayleigh": (8.0, 12.0, 16.0, 20.0)},
    4: {"awgn": (2.0, 4.0, 6.0, 8.0), "rayleigh": (10.0, 14.0, 18.0, 22.0)},
    5: {"awgn": (0.0, 2.0, 4.0, 6.0), "rayleigh": (8.0, 12.0, 16.0, 20.0)},
}
BUDGETS = {
    "smoke": {"trials": 1000, "stop_errors": 200},
    "desk": {"trials": 20000, "stop_errors": 400},
}
PROPOSED = ("ophm", "oca")


def _out_path(name: str | Path) -> Path:
    path = Path(name)
    base = os.environ.get("BIPSPREAD_OUTDIR")
    if base and not path.is_absolute() and path.parent == Path("."):
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _default_threads() -> int:
    return os.cpu_count() or 1


# ---------- subcommands ----------


def cmd_construct(args) -> int:
    spec = ConstructionSpec(args.method, args.rows, args.cols, args.seed)
    mat = sim._resolve_matrix(spec)[0]
    save_matrix(mat, _out_path(args.out))
    profile = coherence(mat)
    print(
        json.dumps(
            {
                "method": args.method,
                "rows": mat.rows,
                "cols": mat.cols,
                "seed": args.seed,
                "max_abs_ip": profile.max_abs_ip,
                "mu": profile.mu,
                "mean_abs_coherence": profile.mean_abs_coherence,
            }
        )
    )
    return 0


def cmd_analyze(args) -> int:
    mat = load_matrix(args.matrix)
    rows, profile = gram_histogram_export(mat, bins=args.bins)
    out = _out_path(args.out)
    csv_path = out.with_suffix(".csv")
    json_path = out.with_suffix(".json")
    csv_path.write_text(histogram_to_csv(rows))
    sidecar = {
        "mu": profile.mu,
        "mean_abs_coherence": profile.mean_abs_coherence,
        "rows": mat.rows,
        "cols": mat.cols,
        "method": args.method,
        "seed": args.seed,
    }
    json_path.write_text(json.dumps(sidecar, indent=1) + "\n")
    print(json.dumps({"csv": str(csv_path), "json": str(json_path)}))
    return 0


def _config_from_args(args) -> SimConfig:
    overrides = {
        "channel": args.channel,
        "snr_grid_db": [float(s) for s in args.snr.split(",")] if args.snr else None,
        "trials_per_point": args.trials,
        "master_seed": args.master_seed,
        "mmp_branches": args.branches,
        "stop_errors": (args.stop_errors or None) if args.stop_errors is not None else None,
    }
    if args.config:
        return load_config(args.config, overrides)
    if args.snr is None or args.trials is None:
        raise ValueError("without --config, --snr and --trials are required")
    if args.matrix_file:
        mat = load_matrix(args.matrix_file)
        rows, cols = mat.rows, mat.cols
        matrix = args.matrix_file
    else:
        if args.rows is None or args.cols is None:
            raise ValueError("need --rows and --cols (or --matrix-file)")
        rows, cols = args.rows, args.cols
        matrix = ConstructionSpec(args.method, rows, cols, args.seed)
    params = SparseCodeParams(
        bits=args.bits, sparsity=args.sparsity, vec_len=cols, spread_len=rows
    )
    return SimConfig(
        params=params,
        matrix=matrix,
        snr_grid_db=tuple(overrides["snr_grid_db"]),
        trials_per_point=args.trials,
        channel=args.channel or "awgn",
        master_seed=args.master_seed or 0,
        mmp_branches=args.branches or 2,
        stop_errors=overrides["stop_errors"],
    )


def cmd_simulate(args) -> int:
    config = _config_from_args(args)
    result = run_bler(config, threads=args.threads)
    out = _out_path(args.out)
    out.write_text(results_to_csv([result]))
    print(json.dumps({"csv": str(out), "points": len(result.points)}))
    return 0


def cmd_compare(args) -> int:
    config = _config_from_args(args)
    methods = args.methods.split(",")
    results = compare_methods(config, methods, threads=args.threads)
    out = _out_path(args.out)
    out.write_text(results_to_csv(results))
    print(json.dumps({"csv": str(out), "methods": methods}))
    return 0


# ---------- reproduce ----------


def _ordering_entries(results_by_method, snr_grid):
    entries = []
    for proposed in PROPOSED:
        for baseline in results_by_method:
            if baseline in PROPOSED:
                continue
            for i, snr in enumerate(snr_grid):
                a = results_by_method[proposed].points[i]
                b = results_by_method[baseline].points[i]
                entries.append(
                    {
                        "snr_db": snr,
                        "method": proposed,
                        "baseline": baseline,
                        "bler": a.bler,
                        "baseline_bler": b.bler,
                        "better": a.bler < b.bler,
                        "ci_disjoint": a.ci_hi < b.ci_lo or b.ci_hi < a.ci_lo,
                    }
                )
    return entries


def _reproduce_bler(args, out_dir: Path) -> dict:
    rows, cols, bits = FIGURE_SHAPES[args.figure]
    budget = BUDGETS[args.budget]
    params = SparseCodeParams(bits=bits, sparsity=2, vec_len=cols, spread_len=rows)
    report_channels = {}
    for channel in ("awgn", "rayleigh"):
        grid = FIGURE_SNR_GRIDS[args.figure][channel]
        config = SimConfig(
            params=params,
            matrix=ConstructionSpec("bernoulli", rows, cols, args.seed),
            snr_grid_db=grid,
            trials_per_point=budget["trials"],
            channel=channel,
            master_seed=args.seed,
            stop_errors=budget["stop_errors"],
        )
        results = compare_methods(config, list(METHODS), threads=args.threads)
        csv_path = out_dir / f"fig{args.figure}_{channel}.csv"
        csv_path.write_text(results_to_csv(results))
        by_method = {res.method: res for res in results}
        report_channels[channel] = {
            "snr_db": list(grid),
            "bler": {m: [p.bler for p in r.points] for m, r in by_method.items()},
            "comparisons": _ordering_entries(by_method, grid),
        }
    all_entries = [e for ch in report_channels.values() for e in ch["comparisons"]]
    bern = [e for e in all_entries if e["baseline"] == "bernoulli"]
    return {
        "channels": report_channels,
        "summary": {
            "proposed_beat_bernoulli_fraction": sum(e["better"] for e in bern) / len(bern),
            "comparisons_won": sum(e["better"] for e in all_entries),
            "comparisons_total": len(all_entries),
        },
    }


def _reproduce_hist(args, out_dir: Path) -> dict:
    rows, cols, _ = FIGURE_SHAPES[6]
    methods = ("bernoulli", "bgm", "ophm", "oca")
    per_method = {}
    for method in methods:
        mat = sim._resolve_matrix(ConstructionSpec(method, rows, cols, args.seed))[0]
        hist_rows, profile = gram_histogram_export(mat)
        base = out_dir / f"fig6_{method}_hist"
        base.with_suffix(".csv").write_text(histogram_to_csv(hist_rows))
        sidecar = {
            "mu": profile.mu,
            "mean_abs_coherence": profile.mean_abs_coherence,
            "rows": rows,
            "cols": cols,
            "method": method,
            "seed": args.seed,
        }
        base.with_suffix(".json").write_text(json.dumps(sidecar, indent=1) + "\n")
        per_method[method] = {
            "mu": profile.mu,
            "mean_abs_coherence": profile.mean_abs_coherence,
            "fraction_030_040": next(
                frac for lo, hi, cnt, frac in hist_rows if abs(lo - 0.3) < 1e-9
            ),
        }
    bern = per_method["bernoulli"]
    return {
        "methods": per_method,
        "summary": {
            p: {
                "mu_below_bernoulli": per_method[p]["mu"] <= bern["mu"],
                "mean_below_bernoulli": per_method[p]["mean_abs_coherence"]
                < bern["mean_abs_coherence"],
            }
            for p in PROPOSED
        },
    }


def cmd_reproduce(args) -> int:
    out_dir = _out_path(Path(args.out_dir) / "x").parent  # ensure dir exists
    if args.figure == 6:
        report = _reproduce_hist(args, out_dir)
    else:
        report = _reproduce_bler(args, out_dir)
    report = {"figure": args.figure, "budget": args.budget, "seed": args.seed, **report}
    report_path = out_dir / f"fig{args.figure}_report.json"
    report_path.write_text(json.dumps(report, indent=1) + "\n")
    print(json.dumps({"report": str(report_path)}))
    return 0


# ---------- parser ----------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bipspread",
        description="Bipolar spreading-matrix design and sparse-vector-code simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a spreading matrix and write it to JSON")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--rows", required=True, type=int)
    p.add_argument("--cols", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="Gram histogram of a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--out", required=True, help="output stem for .csv and .json")
    p.add_argument("--method", default=None, help="label for the JSON sidecar")
    p.add_argument("--seed", type=int, default=None, help="label for the JSON sidecar")
    p.set_defaults(func=cmd_analyze)

    for name, func in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        p = sub.add_parser(name, help=f"{name} BLER over an SNR grid")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--method", default="bernoulli", choices=METHODS)
        p.add_argument("--matrix-file", default=None)
        p.add_argument("--rows", type=int, default=None)
        p.add_argument("--cols", type=int, default=None)
        p.add_argument("--seed", type=int, default=0, help="construction seed")
        p.add_argument("--bits", type=int, default=8)
        p.add_argument("--sparsity", type=int, default=2)
        p.add_argument("--channel", default=None, choices=("awgn", "rayleigh"))
        p.add_argument("--snr", default=None, help="comma-separated SNR grid in dB")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--master-seed", type=int, default=None)
        p.add_argument("--branches", type=int, default=None)
        p.add_argument("--stop-errors", type=int, default=None, help="0 disables")
        p.add_argument("--threads", type=int, default=_default_threads())
        p.add_argument("--out", required=True)
        if name == "compare":
            p.add_argument("--methods", required=True, help="comma-separated")
        p.set_defaults(func=func)

    p = sub.add_parser("reproduce", help="run a preset experiment end to end")
    p.add_argument("--figure", required=True, type=int, choices=sorted(FIGURE_SHAPES))
    p.add_argument("--budget", default="smoke", choices=sorted(BUDGETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out-dir", default="reproduce_out")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
