"""Experiment sweeps, CSV emission and log-log rate fitting."""
from __future__ import annotations

import csv
import io
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dirichlet import DirichletSampler, parse_seed
from .errors import ConfigInvalid, InsufficientHorizons, ZOSimplexError
from .estimator import BiasReport, EstimatorConfig, bias_check
from .objectives import from_id, numerical_minimizer
from .optimizers import ALGORITHMS, Schedule, run
from .simplex import on_simplex

OUT_DIR_ENV = "ZOSIMPLEX_OUT_DIR"

SUMMARY_FIELDS = (
    "algo", "objective", "d", "alpha", "T", "seed", "avg_gap", "f_avg_iterate_minus_opt", "wall_time",
)
GROUP_KEYS = ("algo", "objective", "d", "alpha")
SLOPE_BAND = (-0.55, -0.15)

_INT_FIELDS = {"d", "T", "seed", "n", "t"}
_BOOL_FIELDS = {"pass", "cor_pass"}
_STR_FIELDS = {"algo", "objective", "objective_id"}


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "."))


# -- CSV ---------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse(name: str, s: str):
    if s == "":
        return None
    if name in _STR_FIELDS:
        return s
    if name in _BOOL_FIELDS:
        return s == "true"
    if name in _INT_FIELDS:
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def emit_csv(rows, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in fields])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [{k: _parse(k, v) for k, v in zip(header, rec)} for rec in reader]


def write_csv(path, rows, fields) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(emit_csv(rows, fields), newline="")
    except OSError as e:
        raise ZOSimplexError(f"cannot write {path}: {e}") from e
    return path


def read_csv(path) -> list[dict]:
    return parse_csv(Path(path).read_text())


# -- experiment sweeps -------------------------------------------------------


@dataclass
class ExperimentConfig:
    algo: str
    objective_id: str
    d: int
    horizons: list[int]
    alpha: float = 1.0
    c_eta: float = 1.0
    c_delta: float = 1.0
    n_seeds: int = 1
    base_seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigInvalid(f"algo must be one of {ALGORITHMS}, got {self.algo!r}")
        if self.d < 2:
            raise ConfigInvalid(f"d must be at least 2, got {self.d}")
        if not self.horizons or any(t < 1 for t in self.horizons):
            raise ConfigInvalid("horizons must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise ConfigInvalid(f"horizons must be strictly increasing: {self.horizons}")
        if self.n_seeds < 1:
            raise ConfigInvalid("n_seeds must be at least 1")
        if not (self.alpha > 0 and self.c_eta > 0 and self.c_delta > 0):
            raise ConfigInvalid("alpha, c_eta and c_delta must be positive")
        try:
            self.base_seed = parse_seed(self.base_seed)
        except ZOSimplexError as e:
            raise ConfigInvalid(str(e)) from None
        if self.base_seed + self.n_seeds - 1 > 2**64 - 1:
            raise ConfigInvalid("seed range exceeds 64 bits")
        from_id(self.objective_id, self.d)  # raises ObjectiveUnknown

    @property
    def seeds(self) -> range:
        return range(self.base_seed, self.base_seed + self.n_seeds)


@dataclass
class ExperimentResult:
    rows: list[dict]
    # per cell: query/iterate feasibility counts and objective channel usage
    audits: list[dict] = field(default_factory=list)
    traces: list = field(default_factory=list)
    path: Path | None = None
    trace_path: Path | None = None


def _run_cell(cfg: ExperimentConfig, T: int, seed: int, keep_trace: bool):
    f = from_id(cfg.objective_id, cfg.d)
    _, opt = numerical_minimizer(f)
    schedule = Schedule(T, cfg.d, cfg.alpha, cfg.c_eta, cfg.c_delta)
    sampler = DirichletSampler(cfg.alpha, cfg.d, seed)
    t0 = time.perf_counter()
    trace = run(cfg.algo, f, schedule, sampler)
    wall = time.perf_counter() - t0
    audit = {
        "T": T,
        "seed": seed,
        "queries_on_simplex": int(on_simplex(trace.query_points).sum()),
        "iterates_on_simplex": int(on_simplex(trace.iterates).sum()),
        "query_count": f.query_count,
        "oracle_grad_calls": f.grad_count,
    }
    row = {
        "algo": cfg.algo,
        "objective": cfg.objective_id,
        "d": cfg.d,
        "alpha": cfg.alpha,
        "T": T,
        "seed": seed,
        "avg_gap": trace.avg_gap,
        "f_avg_iterate_minus_opt": trace.f_avg_iterate - opt,
        "wall_time": wall,
    }
    return row, audit, (trace if keep_trace else None)


def trace_rows(trace) -> list[dict]:
    d = trace.iterates.shape[1]
    rows = []
    for rec in trace.records():
        r = {"algo": trace.algo, "objective": trace.objective_id, "T": trace.T,
             "seed": trace.seed, "t": rec["t"], "f": rec["f"], "gap": rec["gap"]}
        r.update({f"x{i}": rec["x"][i] for i in range(d)})
        r.update({f"q{i}": rec["query_point"][i] for i in range(d)})
        rows.append(r)
    return rows


def trace_fields(d: int) -> list[str]:
    return ["algo", "objective", "T", "seed", "t", "f", "gap"] + [f"x{i}" for i in range(d)] + [
        f"q{i}" for i in range(d)
    ]


def run_experiment(
    cfg: ExperimentConfig, workers: int = 1, full_trace: bool = False, keep_traces: bool = False
) -> ExperimentResult:
    """Run every (horizon, seed) cell and collect one summary row per cell.

    Rows come back sorted by horizon then seed whatever the worker count, and
    each seed owns its own generator, so a cell's numbers do not depend on
    which other cells are in the batch.
    """
    cells = list(itertools.product(cfg.horizons, cfg.seeds))
    want = full_trace or keep_traces
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_run_cell, cfg, T, s, want) for T, s in cells]
            out = [fu.result() for fu in futs]
    else:
        out = [_run_cell(cfg, T, s, want) for T, s in cells]
    out.sort(key=lambda rt: (rt[0]["T"], rt[0]["seed"]))
    result = ExperimentResult(
        rows=[r for r, _, _ in out],
        audits=[a for _, a, _ in out],
        traces=[t for _, _, t in out if t is not None],
    )
    if cfg.output_path:
        result.path = write_csv(cfg.output_path, result.rows, SUMMARY_FIELDS)
        if full_trace:
            p = Path(cfg.output_path)
            rows = [r for t in result.traces for r in trace_rows(t)]
            result.trace_path = write_csv(p.with_name(p.stem + ".trace.csv"), rows, trace_fields(cfg.d))
    if not keep_traces:
        result.traces = []
    return result


# -- rate fitting ------------------------------------------------------------


@dataclass
class RateFit:
    horizons: list[int]
    means: list[float]
    slope: float
    intercept: float
    r_squared: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(np.log(self.horizons).tolist(), np.log(self.means).tolist()))

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.means, self.means[1:]))

    def in_band(self, band=SLOPE_BAND) -> bool:
        return band[0] <= self.slope <= band[1]


def fit_power_law(horizons, means) -> RateFit:
    """Ordinary least squares of ``log mean`` on ``log T``."""
    if len(horizons) < 3:
        raise InsufficientHorizons(f"need at least 3 horizons, got {len(horizons)}")
    means = [float(m) for m in means]
    if min(means) <= 0:
        raise ZOSimplexError("cannot take logs of nonpositive means")
    lx, ly = np.log(np.asarray(horizons, dtype=float)), np.log(means)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    ss_res = np.sum(resid**2)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(list(map(int, horizons)), means, float(slope), float(intercept), float(r2))


def rate_fit(rows, group_keys=GROUP_KEYS, metric: str = "avg_gap") -> dict[tuple, RateFit]:
    """Seed-average ``metric`` per horizon within each group, then fit the log-log slope."""
    groups: dict[tuple, dict[int, list[float]]] = {}
    for r in rows:
        key = tuple(r[k] for k in group_keys)
        groups.setdefault(key, {}).setdefault(int(r["T"]), []).append(float(r[metric]))
    fits = {}
    for key in sorted(groups, key=str):
        by_T = groups[key]
        Ts = sorted(by_T)
        fits[key] = fit_power_law(Ts, [np.mean(by_T[T]) for T in Ts])
    return fits


# -- bias study --------------------------------------------------------------


def _cell_seed(base_seed: int, index: int) -> int:
    ss = np.random.SeedSequence([base_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def bias_study(
    ds, alphas, deltas, objective_ids, n: int = 10**6, base_seed: int = 0
) -> list[BiasReport]:
    """One :class:`BiasReport` per grid cell, with the directional check included.

    The query point ``x`` and comparison point ``x'`` are fresh uniform draws
    per (objective, d); the same pair is reused across alpha and delta so that
    only the estimator parameters vary along those axes.
    """
    if not (ds and alphas and deltas and objective_ids):
        raise ConfigInvalid("bias grid is empty")
    base_seed = parse_seed(base_seed)
    reports = []
    idx = 0
    for oid, d in itertools.product(objective_ids, ds):
        f = from_id(oid, d)
        pts = np.random.Generator(np.random.PCG64(_cell_seed(base_seed, 10**6 + idx))).dirichlet(
            np.ones(d), size=2
        )
        for alpha, delta in itertools.product(alphas, deltas):
            cfg = EstimatorConfig(alpha, delta, d)
            sampler = DirichletSampler(alpha, d, _cell_seed(base_seed, idx))
            reports.append(bias_check(f, pts[0], cfg, n, sampler, x_prime=pts[1]))
            idx += 1
    return reports
