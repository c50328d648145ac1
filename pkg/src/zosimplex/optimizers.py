"""Zeroth-order projected gradient descent and exponential weights on the simplex."""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dirichlet import GENERATOR_FAMILY, DirichletSampler
from .errors import (
    EmptyTrace,
    HorizonTooSmallForStability,
    NonInteriorIterate,
    ObjectiveEvaluationFailure,
    ZOSimplexError,
)
from .estimator import EstimatorConfig, EstimatorSample
from .objectives import Objective
from .simplex import SimplexPoint, _project_array, first_order_gap, uniform_point, validate_simplex

ALGORITHMS = ("pgd", "ew")
DELTA_CAP = 0.5


@dataclass(frozen=True)
class Schedule:
    """Horizon-tuned constants: ``eta = c_eta T^-3/4 / (d (alpha d + 1))``, ``delta = min(c_delta T^-1/4, 0.5)``."""

    horizon_T: int
    d: int
    alpha: float = 1.0
    c_eta: float = 1.0
    c_delta: float = 1.0

    def __post_init__(self):
        if self.horizon_T < 1:
            raise ZOSimplexError(f"horizon must be at least 1, got {self.horizon_T}")
        if not (self.c_eta > 0 and self.c_delta > 0 and self.alpha > 0):
            raise ZOSimplexError("c_eta, c_delta and alpha must be positive")

    @property
    def scale(self) -> float:
        return self.d * (self.alpha * self.d + 1.0)

    @property
    def eta(self) -> float:
        return self.c_eta * self.horizon_T ** -0.75 / self.scale

    @property
    def delta(self) -> float:
        return min(self.c_delta * self.horizon_T ** -0.25, DELTA_CAP)

    def estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(self.alpha, self.delta, self.d)


def _grad_of(g) -> np.ndarray:
    return g.g if isinstance(g, EstimatorSample) else np.asarray(g, dtype=float)


def pgd_step(x_t, g_scaled, eta: float) -> SimplexPoint:
    """``Pi(x_t - eta g)``, the Euclidean projection of a plain gradient step."""
    if not eta > 0:
        raise ZOSimplexError(f"eta must be positive, got {eta!r}")
    x = np.asarray(x_t, dtype=float)
    return SimplexPoint(_project_array(x - eta * _grad_of(g_scaled)))


def _ew_update(x: np.ndarray, g: np.ndarray, eta: float) -> np.ndarray:
    z = -eta * g
    w = x * np.exp(z - z.max())
    return w / w.sum()


def ew_step(x_t, g_scaled, eta: float) -> SimplexPoint:
    """Multiplicative update ``x_i exp(-eta g_i) / Z``, exponentiated with a max shift."""
    if not eta > 0:
        raise ZOSimplexError(f"eta must be positive, got {eta!r}")
    x = np.asarray(x_t, dtype=float)
    if x.min() <= 0.0:
        raise NonInteriorIterate("exponential weights needs a strictly positive iterate")
    out = _ew_update(x, _grad_of(g_scaled), eta)
    if out.min() <= 0.0:
        raise NonInteriorIterate("exponential weights update underflowed to zero")
    return SimplexPoint(out)


def config_digest(**config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(eq=False)
class RunTrace:
    algo: str
    objective_id: str
    schedule: Schedule
    seed: int
    digest: str
    iterates: np.ndarray  # x_1 .. x_T, shape (T, d)
    query_points: np.ndarray  # (1 - delta) x_t + delta u_t
    query_values: np.ndarray
    f_values: np.ndarray  # f(x_t), audit channel
    gaps: np.ndarray  # first-order gap at x_t, audit channel
    final: np.ndarray  # x_{T+1}
    f_avg_iterate: float
    generator: str = GENERATOR_FAMILY
    opt_value: float | None = field(default=None)

    @property
    def T(self) -> int:
        return self.iterates.shape[0]

    @property
    def avg_iterate(self) -> SimplexPoint:
        return average_iterate(self)

    @property
    def avg_gap(self) -> float:
        return float(self.gaps.mean())

    def records(self):
        for t in range(self.T):
            yield {
                "t": t + 1,
                "x": self.iterates[t],
                "f": float(self.f_values[t]),
                "gap": float(self.gaps[t]),
                "query_point": self.query_points[t],
                "seed": self.seed,
                "digest": self.digest,
            }


def average_iterate(trace: RunTrace) -> SimplexPoint:
    """Coordinatewise mean of ``x_1 .. x_T``."""
    if trace.iterates.shape[0] == 0:
        raise EmptyTrace("trace has no iterates")
    return validate_simplex(trace.iterates.mean(axis=0))


def run(
    algo: str,
    f: Objective,
    schedule: Schedule,
    sampler: DirichletSampler,
    x1=None,
) -> RunTrace:
    """Run ``schedule.horizon_T`` zeroth-order iterations of ``algo`` on ``f``.

    Each iteration draws one ``u_t``, queries ``f`` once at the mixed point and
    steps with the scaled estimate. Only the zeroth-order channel of ``f`` is
    used inside the loop; values and gaps at the iterates are filled in
    afterwards through ``f.audit``.
    """
    if algo not in ALGORITHMS:
        raise ZOSimplexError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    if sampler.d != schedule.d or sampler.alpha != schedule.alpha or f.d != schedule.d:
        raise ZOSimplexError("objective, sampler and schedule disagree on (d, alpha)")
    T, d = schedule.horizon_T, schedule.d
    eta, delta, scale = schedule.eta, schedule.delta, schedule.scale
    x = uniform_point(d).coords.copy() if x1 is None else validate_simplex(x1).coords.copy()
    if algo == "ew":
        if x.min() <= 0.0:
            raise NonInteriorIterate("exponential weights must start in the interior")
        if eta * scale * f.bound_B / delta > 1.0:
            warnings.warn(
                f"eta*d(alpha d+1)*B/delta = {eta * scale * f.bound_B / delta:.3g} > 1 at T={T}",
                HorizonTooSmallForStability,
                stacklevel=2,
            )

    digest = config_digest(
        algo=algo,
        objective=f.name,
        d=d,
        alpha=schedule.alpha,
        c_eta=schedule.c_eta,
        c_delta=schedule.c_delta,
        T=T,
        seed=sampler.seed,
        x1=x.tolist(),
    )
    U = sampler.sample_n(T)
    iterates = np.empty((T, d))
    queries = np.empty((T, d))
    values = np.empty(T)
    coef = scale / delta
    for t in range(T):
        u = U[t]
        iterates[t] = x
        q = (1.0 - delta) * x + delta * u
        queries[t] = q
        fv = f(q)
        if not np.isfinite(fv):
            raise ObjectiveEvaluationFailure(f"{f.name} returned {fv!r} at {q}")
        values[t] = fv
        g = (coef * fv) * (u - u.mean())
        if algo == "pgd":
            x = _project_array(x - eta * g)
        else:
            x = _ew_update(x, g, eta)
            if x.min() <= 0.0:
                raise NonInteriorIterate(f"iterate hit the boundary at t={t + 1}")

    f_vals, grads = f.audit(iterates)
    xbar = iterates.mean(axis=0)
    f_bar, _ = f.audit(xbar)
    return RunTrace(
        algo=algo,
        objective_id=f.name,
        schedule=schedule,
        seed=sampler.seed,
        digest=digest,
        iterates=iterates,
        query_points=queries,
        query_values=values,
        f_values=np.asarray(f_vals, dtype=float),
        gaps=first_order_gap(grads, iterates),
        final=x,
        f_avg_iterate=float(f_bar),
        opt_value=f.min_value,
    )


def exact_gradient_run(algo: str, f: Objective, eta: float, T: int, x1=None) -> np.ndarray:
    """Baseline with the true gradient in place of the estimate; returns ``x_1 .. x_{T+1}``."""
    if algo not in ALGORITHMS:
        raise ZOSimplexError(f"unknown algorithm {algo!r}")
    x = uniform_point(f.d).coords.copy() if x1 is None else validate_simplex(x1).coords.copy()
    out = np.empty((T + 1, f.d))
    out[0] = x
    for t in range(T):
        g = f.oracle_grad(x)
        x = _project_array(x - eta * g) if algo == "pgd" else _ew_update(x, g, eta)
        out[t + 1] = x
    return out
