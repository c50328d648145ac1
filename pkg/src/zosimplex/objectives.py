"""Smooth test objectives on the simplex, with the oracles used to check them.

Every objective carries its smoothness constant ``beta`` and a bound ``B`` on
``|f|`` over the simplex. Evaluations go through three separately counted
channels:

* ``f(x)``: zeroth-order queries, the only thing optimizers may use;
* ``f.oracle_grad(x)``: the exact gradient, for tests and exact-gradient baselines;
* ``f.audit(x)``: values and gradients used to log gaps after a run.
"""
from __future__ import annotations

import numpy as np

from .dirichlet import parse_seed
from .errors import (
    BadDimension,
    DimensionMismatch,
    NonFiniteInput,
    NotPSD,
    NotSymmetric,
    ObjectiveUnknown,
    ProbeOffSimplex,
    ZOSimplexError,
)
from .simplex import SimplexPoint, _project_array, first_order_gap, uniform_point, validate_simplex, vertex


class Objective:
    def __init__(
        self,
        name: str,
        d: int,
        value_fn,
        grad_fn,
        beta: float,
        bound_B: float,
        minimizer: SimplexPoint | None = None,
        min_value: float | None = None,
        convex: bool = True,
    ):
        self.name = name
        self.d = d
        self._value = value_fn
        self._grad = grad_fn
        self.beta = float(beta)
        self.bound_B = float(bound_B)
        self.minimizer = minimizer
        self.min_value = min_value
        self.convex = convex
        self.reset_counters()

    def __repr__(self):
        return f"Objective({self.name!r}, d={self.d}, beta={self.beta:g}, B={self.bound_B:g})"

    def reset_counters(self):
        self.query_count = 0
        self.grad_count = 0
        self.audit_count = 0

    def _check(self, x) -> np.ndarray:
        a = np.asarray(x, dtype=float)
        if a.shape[-1] != self.d:
            raise DimensionMismatch(f"{self.name} has dimension {self.d}, got {a.shape[-1]}")
        return a

    @staticmethod
    def _npoints(a) -> int:
        return int(np.prod(a.shape[:-1], dtype=int))

    def __call__(self, x):
        a = self._check(x)
        self.query_count += self._npoints(a)
        return self._value(a)

    def oracle_grad(self, x) -> np.ndarray:
        a = self._check(x)
        self.grad_count += self._npoints(a)
        return self._grad(a)

    def audit(self, x):
        """Values and gradients for logging; never touches the other counters."""
        a = self._check(x)
        self.audit_count += self._npoints(a)
        return self._value(a), self._grad(a)


def _vec(c) -> np.ndarray:
    a = np.array(c, dtype=float)
    if a.ndim != 1 or a.shape[0] < 2:
        raise BadDimension("parameter vector must be 1-D with at least 2 entries")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("parameter vector has non-finite entries")
    return a


def make_linear(c, name: str | None = None) -> Objective:
    """``f(x) = c . x``; beta = 0, minimized at the vertex of the smallest ``c_i``."""
    c = _vec(c)
    d = c.shape[0]
    i = int(np.argmin(c))
    return Objective(
        name or f"linear:{','.join(map(repr, c.tolist()))}",
        d,
        lambda x: x @ c,
        lambda x: np.broadcast_to(c, x.shape).copy(),
        beta=0.0,
        bound_B=float(np.abs(c).max()),
        minimizer=vertex(d, i),
        min_value=float(c[i]),
    )


def make_quadratic_distance(c, name: str | None = None) -> Objective:
    """``f(x) = ||x - c||^2 / 2`` for a point ``c`` of the simplex; beta = 1.

    ``B = 2`` uses only that the simplex has diameter at most 2.
    """
    c = validate_simplex(c).coords.copy()
    d = c.shape[0]
    return Objective(
        name or f"quaddist:{','.join(map(repr, c.tolist()))}",
        d,
        lambda x: 0.5 * np.sum((x - c) ** 2, axis=-1),
        lambda x: x - c,
        beta=1.0,
        bound_B=2.0,
        minimizer=SimplexPoint(c.copy()),
        min_value=0.0,
    )


def make_psd_quadratic(A, b, name: str | None = None) -> Objective:
    """``f(x) = x^T A x / 2 + b . x`` with ``A`` symmetric positive semidefinite."""
    A = np.array(A, dtype=float)
    b = _vec(b)
    d = b.shape[0]
    if A.shape != (d, d):
        raise DimensionMismatch(f"A has shape {A.shape}, expected {(d, d)}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12):
        raise NotSymmetric("A is not symmetric")
    A = 0.5 * (A + A.T)
    lam = np.linalg.eigvalsh(A)
    if lam[0] < -1e-10:
        raise NotPSD(f"A has eigenvalue {float(lam[0])!r}")
    lam_max = max(float(lam[-1]), 0.0)
    return Objective(
        name or "psdquad",
        d,
        lambda x: 0.5 * np.einsum("...i,ij,...j->...", x, A, x) + x @ b,
        lambda x: x @ A + b,
        beta=lam_max,
        # ||x|| <= 1 on the simplex
        bound_B=0.5 * lam_max + float(np.abs(b).max()),
    )


def numerical_minimizer(f: Objective, tol: float = 1e-13, max_iter: int = 200_000):
    """Minimize a convex objective over the simplex with accelerated projected gradient.

    Uses the audit channel. Returns ``(point, value)``.
    """
    if f.minimizer is not None:
        return f.minimizer, f.min_value
    step = 1.0 / f.beta if f.beta > 0 else 1.0
    x = uniform_point(f.d).coords.copy()
    y = x.copy()
    t = 1.0
    for _ in range(max_iter):
        _, g = f.audit(y)
        x_new = _project_array(y - step * g)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
        _, gx = f.audit(x)
        if first_order_gap(gx, x) < tol:
            break
    v, _ = f.audit(x)
    return validate_simplex(x), float(v)


def finite_diff_grad(f: Objective, x, h: float = 1e-5) -> np.ndarray:
    """Central differences along the tangent directions ``e_i - 1/d``.

    Every probe stays on the simplex, so this recovers only the centered
    gradient ``P_d grad f(x)``, which is all zeroth-order queries can see.
    """
    if not 1e-7 <= h <= 1e-4:
        raise ZOSimplexError(f"step h={h!r} outside [1e-7, 1e-4]")
    xa = validate_simplex(x).coords
    d = xa.shape[0]
    v = np.eye(d) - 1.0 / d
    plus = xa + h * v
    minus = xa - h * v
    if plus.min() < 0.0 or minus.min() < 0.0:
        raise ProbeOffSimplex(f"step h={h!r} leaves the simplex from {xa}")
    return (f(plus) - f(minus)) / (2.0 * h)


def smoothness_check(f: Objective, x, y, slack: float = 1e-10) -> bool:
    """``||grad f(x) - grad f(y)|| <= beta ||x - y||``."""
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    lhs = np.linalg.norm(f.oracle_grad(xa) - f.oracle_grad(ya))
    return bool(lhs <= f.beta * np.linalg.norm(xa - ya) + slack)


def descent_lemma_check(f: Objective, x, y, slack: float = 1e-10) -> bool:
    """``|f(y) - f(x) - grad f(x) . (y - x)| <= beta/2 ||x - y||^2``."""
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    lhs = abs(f(ya) - f(xa) - f.oracle_grad(xa) @ (ya - xa))
    return bool(lhs <= 0.5 * f.beta * np.sum((xa - ya) ** 2) + slack)


KINDS = ("linear", "quaddist", "psdquad")


def from_id(objective_id: str, d: int) -> Objective:
    """Resolve ``kind:arg`` where ``arg`` is a seed or an explicit comma list.

    ``linear:7`` and ``quaddist:0x2a`` draw parameters from the seed;
    ``quaddist:0.6,0.3,0.1`` and ``linear:0,1`` give them directly.
    """
    kind, sep, arg = objective_id.partition(":")
    if not sep or kind not in KINDS or not arg:
        raise ObjectiveUnknown(f"unknown objective id {objective_id!r}")
    if "," in arg:
        if kind == "psdquad":
            raise ObjectiveUnknown("psdquad takes a seed, not explicit parameters")
        try:
            vals = [float(s) for s in arg.split(",")]
        except ValueError:
            raise ObjectiveUnknown(f"bad parameter list in {objective_id!r}") from None
        if len(vals) != d:
            raise ObjectiveUnknown(f"{objective_id!r} has {len(vals)} entries but d={d}")
        make = make_linear if kind == "linear" else make_quadratic_distance
        return make(vals, name=objective_id)
    try:
        seed = parse_seed(arg)
    except ZOSimplexError:
        raise ObjectiveUnknown(f"bad seed in {objective_id!r}") from None
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "linear":
        return make_linear(rng.uniform(-1.0, 1.0, d), name=objective_id)
    if kind == "quaddist":
        return make_quadratic_distance(rng.dirichlet(np.ones(d)), name=objective_id)
    m = rng.standard_normal((d, d))
    return make_psd_quadratic(m.T @ m / d, rng.uniform(-1.0, 1.0, d), name=objective_id)
