"""One-point zeroth-order gradient estimator on the simplex.

For ``u ~ Dir(alpha 1_d)`` the raw estimate is

    (1/delta) * f((1 - delta) x + delta u) * P_d u

whose mean is within ``2 beta delta`` of ``P_d grad f(x) / (d (alpha d + 1))``.
Multiplying by ``d (alpha d + 1)`` gives the scaled estimate that the
optimizers consume.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirichlet import DirichletSampler
from .errors import DeltaOutOfRange, DimensionMismatch, ObjectiveEvaluationFailure, ZOSimplexError
from .objectives import Objective
from .simplex import SimplexPoint, center, mix


@dataclass(frozen=True)
class EstimatorConfig:
    alpha: float
    delta: float
    d: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ZOSimplexError(f"alpha must be positive, got {self.alpha!r}")
        if not 0.0 < self.delta < 1.0:
            raise DeltaOutOfRange(f"delta must lie in (0, 1), got {self.delta!r}")

    @property
    def scale(self) -> float:
        """The normalizing factor ``d (alpha d + 1)``."""
        return self.d * (self.alpha * self.d + 1.0)


@dataclass(frozen=True, eq=False)
class EstimatorSample:
    g: np.ndarray
    query_point: SimplexPoint
    f_value: float
    u: SimplexPoint


def estimate_raw(f: Objective, x, cfg: EstimatorConfig, u) -> EstimatorSample:
    """One draw of ``(1/delta) f(mix(x, u, delta)) P_d u``; queries ``f`` once."""
    if np.shape(x)[-1] != cfg.d or np.shape(u)[-1] != cfg.d:
        raise DimensionMismatch(f"config has d={cfg.d}")
    q = mix(x, u, cfg.delta)
    fv = float(f(q.coords))
    if not np.isfinite(fv):
        raise ObjectiveEvaluationFailure(f"{f.name} returned {fv!r} at {q}")
    u = u if isinstance(u, SimplexPoint) else SimplexPoint(np.array(u, dtype=float))
    return EstimatorSample(fv / cfg.delta * center(u.coords), q, fv, u)


def estimate_scaled(f: Objective, x, cfg: EstimatorConfig, u) -> EstimatorSample:
    """``d (alpha d + 1)`` times :func:`estimate_raw`: the estimate the optimizers step with."""
    s = estimate_raw(f, x, cfg, u)
    return EstimatorSample(cfg.scale * s.g, s.query_point, s.f_value, s.u)


def raw_estimates(f: Objective, x, delta: float, U: np.ndarray) -> np.ndarray:
    """Raw estimates for every row of ``U`` at once, shape ``(n, d)``."""
    x = np.asarray(x, dtype=float)
    q = (1.0 - delta) * x + delta * U
    fv = f(q)
    if not np.all(np.isfinite(fv)):
        raise ObjectiveEvaluationFailure(f"{f.name} returned non-finite values")
    return (fv / delta)[:, None] * center(U)


class _Moments:
    """Streaming mean and variance (Chan et al. pairwise merge)."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, block: np.ndarray):
        nb = block.shape[0]
        mb = block.mean(axis=0)
        m2b = ((block - mb) ** 2).sum(axis=0)
        n = self.n + nb
        delta = mb - self.mean
        self.mean = self.mean + delta * (nb / n)
        self.m2 = self.m2 + m2b + delta**2 * (self.n * nb / n)
        self.n = n

    @property
    def var(self):
        return self.m2 / (self.n - 1)


@dataclass
class BiasReport:
    objective_id: str
    d: int
    alpha: float
    delta: float
    n: int
    mc_mean: np.ndarray
    target: np.ndarray
    bias_norm: float
    bound: float
    std_err: float
    passed: bool
    # optional comparison g~ . (x' - x) vs grad f(x) . (x' - x)
    cor_err: float | None = None
    cor_bound: float | None = None
    cor_std_err: float | None = None
    cor_passed: bool | None = None

    FIELDS = (
        "d", "alpha", "delta", "objective_id", "n", "bias_norm", "bound", "std_err", "pass",
        "cor_err", "cor_bound", "cor_std_err", "cor_pass",
    )

    def to_row(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "delta": self.delta,
            "objective_id": self.objective_id,
            "n": self.n,
            "bias_norm": self.bias_norm,
            "bound": self.bound,
            "std_err": self.std_err,
            "pass": self.passed,
            "cor_err": self.cor_err,
            "cor_bound": self.cor_bound,
            "cor_std_err": self.cor_std_err,
            "cor_pass": self.cor_passed,
        }


def bias_check(
    f: Objective,
    x,
    cfg: EstimatorConfig,
    n_samples: int,
    sampler: DirichletSampler,
    x_prime=None,
    chunk: int = 100_000,
) -> BiasReport:
    """Monte-Carlo estimate of the raw estimator's bias against ``2 beta delta``.

    Passes when ``||mean - target|| <= 2 beta delta + 3 std_err``, where
    ``std_err`` is the norm of the per-coordinate standard errors. With
    ``x_prime`` the scaled estimate is also checked in the directional form
    ``|E g~ . (x' - x) - grad f(x) . (x' - x)| <= 4 beta delta d (alpha d + 1)``.
    """
    if n_samples < 1000:
        raise ZOSimplexError("bias_check needs at least 1000 samples")
    if sampler.d != cfg.d or sampler.alpha != cfg.alpha:
        raise ZOSimplexError("sampler and estimator config disagree on (alpha, d)")
    x = np.asarray(x, dtype=float)
    direction = None if x_prime is None else np.asarray(x_prime, dtype=float) - x
    vec, dirm = _Moments(), _Moments()
    left = n_samples
    while left > 0:
        m = min(chunk, left)
        g = raw_estimates(f, x, cfg.delta, sampler.sample_n(m))
        vec.add(g)
        if direction is not None:
            dirm.add(cfg.scale * (g @ direction))
        left -= m

    grad = f.oracle_grad(x)
    target = center(grad) / cfg.scale
    bias_norm = float(np.linalg.norm(vec.mean - target))
    bound = 2.0 * f.beta * cfg.delta
    std_err = float(np.sqrt(np.sum(vec.var) / n_samples))
    report = BiasReport(
        objective_id=f.name,
        d=cfg.d,
        alpha=cfg.alpha,
        delta=cfg.delta,
        n=n_samples,
        mc_mean=vec.mean,
        target=target,
        bias_norm=bias_norm,
        bound=bound,
        std_err=std_err,
        passed=bias_norm <= bound + 3.0 * std_err,
    )
    if direction is not None:
        report.cor_err = float(abs(dirm.mean - grad @ direction))
        report.cor_bound = 4.0 * f.beta * cfg.delta * cfg.scale
        report.cor_std_err = float(np.sqrt(dirm.var / n_samples))
        report.cor_passed = report.cor_err <= report.cor_bound + 3.0 * report.cor_std_err
    return report
