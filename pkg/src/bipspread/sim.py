"""Seeded Monte Carlo block-error-rate experiments.

Every trial draws its randomness from a private counter-based generator
keyed by (master seed, SNR point, trial index), so results are bit-exact
regardless of worker count or scheduling, and two methods simulated under
the same configuration see identical messages, channels, and noise
(common random numbers). Early stopping is evaluated on fixed-size trial
batches, which keeps the stop decision independent of threading too.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .bitmatrix import BipolarMatrix, GramProfile, coherence, load_matrix
from .codec import (
    DecodeError,
    SparseCodeParams,
    apply_channel,
    draw_channel,
    mmp_decode,
    sparse_demap,
    sparse_map,
    spread,
)
from .constructors import METHODS, ConstructionSpec, construct

__all__ = [
    "SimConfig",
    "PointResult",
    "SimResult",
    "run_bler",
    "compare_methods",
    "gram_histogram_export",
    "wilson_interval",
    "results_to_csv",
    "histogram_to_csv",
    "load_config",
    "config_to_dict",
]

_Z95 = 1.959963984540054
_BATCH = 512  # early-stop granularity; fixed so threading cannot move it


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= errors <= trials:
        raise ValueError("errors must lie in [0, trials]")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


# ---------- configuration ----------


@dataclass(frozen=True)
class SimConfig:
    params: SparseCodeParams
    matrix: ConstructionSpec | str | Path
    snr_grid_db: tuple[float, ...]
    trials_per_point: int
    channel: str = "awgn"
    master_seed: int = 0
    mmp_branches: int = 2
    stop_errors: int | None = 200  # None disables early stopping

    def __post_init__(self):
        if self.channel not in ("awgn", "rayleigh"):
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be positive")
        if not self.snr_grid_db:
            raise ValueError("snr grid must be non-empty")
        if self.mmp_branches < 1:
            raise ValueError("mmp_branches must be positive")
        if self.stop_errors is not None and self.stop_errors < 1:
            raise ValueError("stop_errors must be positive or None")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))


@lru_cache(maxsize=64)
def _construct_cached(spec: ConstructionSpec) -> BipolarMatrix:
    # constructions are pure functions of the spec, so caching is invisible
    return construct(spec)


def _resolve_matrix(source) -> tuple[BipolarMatrix, str, int | None]:
    """Matrix plus (method label, seed label) for reporting."""
    if isinstance(source, ConstructionSpec):
        return _construct_cached(source), source.method, source.seed
    mat = load_matrix(source)
    return mat, Path(source).stem, None


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    trials: int
    errors: int
    bler: float
    ci_lo: float
    ci_hi: float
    seconds: float


@dataclass(frozen=True)
class SimResult:
    method: str
    seed: int | None
    channel: str
    master_seed: int
    points: list[PointResult]
    gram: GramProfile


# ---------- trial execution ----------


def _trial_rng(master_seed: int, point: int, trial: int) -> np.random.Generator:
    """Private stream per (seed, SNR point, trial); stateless derivation."""
    return np.random.Generator(
        np.random.Philox(key=master_seed, counter=[0, trial, point, 0])
    )


def _run_trial(
    master_seed: int,
    point: int,
    trial: int,
    params: SparseCodeParams,
    mat: BipolarMatrix,
    channel: str,
    sigma2: float,
    branches: int,
) -> bool:
    """One encode/transmit/decode round; True on block error."""
    rng = _trial_rng(master_seed, point, trial)
    message = int(rng.integers(0, 1 << params.bits))
    x = spread(sparse_map(message, params), mat, params)
    realization = draw_channel(channel, params.spread_len, sigma2, rng)
    y = apply_channel(x, realization, rng)
    try:
        support = mmp_decode(y, realization.gains, mat, params, branches)
        decoded = sparse_demap(support, params)
    except DecodeError:
        return True
    return decoded != message


def _run_point(
    config: SimConfig,
    mat: BipolarMatrix,
    point: int,
    snr_db: float,
    threads: int,
) -> PointResult:
    sigma2 = 10.0 ** (-snr_db / 10.0)
    start = time.perf_counter()
    errors = 0
    done = 0
    total = config.trials_per_point

    def run_range(lo: int, hi: int) -> int:
        return sum(
            _run_trial(
                config.master_seed,
                point,
                t,
                config.params,
                mat,
                config.channel,
                sigma2,
                config.mmp_branches,
            )
            for t in range(lo, hi)
        )

    while done < total:
        batch_end = min(done + _BATCH, total)
        if threads > 1:
            bounds = np.linspace(done, batch_end, threads + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                errors += sum(pool.map(run_range, bounds[:-1], bounds[1:]))
        else:
            errors += run_range(done, batch_end)
        done = batch_end
        if config.stop_errors is not None and errors >= config.stop_errors:
            break

    lo, hi = wilson_interval(errors, done)
    return PointResult(
        snr_db=snr_db,
        trials=done,
        errors=errors,
        bler=errors / done,
        ci_lo=lo,
        ci_hi=hi,
        seconds=time.perf_counter() - start,
    )


def run_bler(config: SimConfig, threads: int | None = None) -> SimResult:
    """Simulate the configured link over the SNR grid."""
    mat, method, seed = _resolve_matrix(config.matrix)
    if mat.rows != config.params.spread_len or mat.cols != config.params.vec_len:
        raise ValueError(
            f"matrix {mat.rows}x{mat.cols} does not match code parameters "
            f"{config.params.spread_len}x{config.params.vec_len}"
        )
    threads = threads or 1
    points = [
        _run_point(config, mat, i, snr, threads)
        for i, snr in enumerate(config.snr_grid_db)
    ]
    return SimResult(
        method=method,
        seed=seed,
        channel=config.channel,
        master_seed=config.master_seed,
        points=points,
        gram=coherence(mat),
    )


def compare_methods(
    config: SimConfig, methods: list[str], threads: int | None = None
) -> list[SimResult]:
    """run_bler per method under one master seed (common random numbers).

    Entries of `methods` are construction names (built at the config's
    shape and seed) or matrix file paths. All constructions are resolved
    up front; if any fail, the whole comparison aborts with a per-method
    report.
    """
    base = config.matrix if isinstance(config.matrix, ConstructionSpec) else None
    sources = []
    failures = []
    for name in methods:
        try:
            if name in METHODS:
                spec = ConstructionSpec(
                    method=name,
                    rows=config.params.spread_len,
                    cols=config.params.vec_len,
                    seed=base.seed if base is not None else 0,
                )
                _resolve_matrix(spec)  # fail fast
                sources.append(spec)
            else:
                _resolve_matrix(name)
                sources.append(name)
        except Exception as exc:  # noqa: BLE001  (report, then abort)
            failures.append(f"{name}: {exc}")
    if failures:
        raise ValueError("construction failed:\n  " + "\n  ".join(failures))
    return [
        run_bler(replace(config, matrix=source), threads=threads) for source in sources
    ]


# ---------- gram histogram export ----------


def gram_histogram_export(mat: BipolarMatrix, bins: int = 10):
    """Rows (bin_lo, bin_hi, count, fraction) plus the underlying profile."""
    profile = coherence(mat, bins=bins)
    total = profile.pair_count
    rows = [
        (lo, hi, count, count / total) for lo, hi, count in profile.histogram
    ]
    return rows, profile


# ---------- serialization ----------

_CSV_HEADER = "method,snr_db,trials,errors,bler,ci_lo,ci_hi,seed"


def _fmt(x: float) -> str:
    return repr(float(x))


def results_to_csv(results: list[SimResult]) -> str:
    lines = [_CSV_HEADER]
    for res in results:
        seed = res.seed if res.seed is not None else ""
        for pt in res.points:
            lines.append(
                f"{res.method},{_fmt(pt.snr_db)},{pt.trials},{pt.errors},"
                f"{_fmt(pt.bler)},{_fmt(pt.ci_lo)},{_fmt(pt.ci_hi)},{seed}"
            )
    return "\n".join(lines) + "\n"


def histogram_to_csv(rows) -> str:
    lines = ["bin_lo,bin_hi,count,fraction"]
    for lo, hi, count, fraction in rows:
        lines.append(f"{_fmt(lo)},{_fmt(hi)},{count},{_fmt(fraction)}")
    return "\n".join(lines) + "\n"


def config_to_dict(config: SimConfig) -> dict:
    if isinstance(config.matrix, ConstructionSpec):
        matrix = {
            "method": config.matrix.method,
            "rows": config.matrix.rows,
            "cols": config.matrix.cols,
            "seed": config.matrix.seed,
        }
    else:
        matrix = {"path": str(config.matrix)}
    return {
        "params": {
            "bits": config.params.bits,
            "sparsity": config.params.sparsity,
            "vec_len": config.params.vec_len,
            "spread_len": config.params.spread_len,
        },
        "matrix": matrix,
        "channel": config.channel,
        "snr_grid_db": list(config.snr_grid_db),
        "trials_per_point": config.trials_per_point,
        "master_seed": config.master_seed,
        "mmp_branches": config.mmp_branches,
        "stop_errors": config.stop_errors,
    }


def config_from_dict(obj: dict, overrides: dict | None = None) -> SimConfig:
    merged = dict(obj)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    p = merged["params"]
    params = SparseCodeParams(
        bits=p["bits"],
        sparsity=p["sparsity"],
        vec_len=p["vec_len"],
        spread_len=p["spread_len"],
    )
    m = merged["matrix"]
    matrix = (
        ConstructionSpec(m["method"], m["rows"], m["cols"], m.get("seed", 0))
        if "method" in m
        else m["path"]
    )
    return SimConfig(
        params=params,
        matrix=matrix,
        snr_grid_db=tuple(merged["snr_grid_db"]),
        trials_per_point=merged["trials_per_point"],
        channel=merged.get("channel", "awgn"),
        master_seed=merged.get("master_seed", 0),
        mmp_branches=merged.get("mmp_branches", 2),
        stop_errors=merged.get("stop_errors", 200),
    )


def load_config(path, overrides: dict | None = None) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh), overrides)
