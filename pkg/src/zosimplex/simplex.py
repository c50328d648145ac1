"""Geometry of the probability simplex.

Points are plain float64 vectors wrapped in :class:`SimplexPoint` once they
have been checked.  The centering projector ``I - (1/d) 1 1^T`` is never
formed as a matrix; :func:`center` subtracts the mean instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadDimension,
    DeltaOutOfRange,
    DimensionMismatch,
    NegativeCoordinate,
    NonFiniteInput,
    SumMismatch,
)

# entries down to -NEG_TOL are clamped to zero; sums within SUM_TOL of one are renormalized
NEG_TOL = 1e-9
SUM_TOL = 1e-9
# sums this close to one are left alone
EXACT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A validated point of the probability simplex.

    Build these with :func:`validate_simplex` (or the functions in this module
    that return them); the constructor itself does not check anything.
    """

    coords: np.ndarray

    def __post_init__(self):
        self.coords.setflags(write=False)

    @property
    def d(self) -> int:
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords
        return self.coords.astype(dtype)

    def __len__(self):
        return self.d

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        if isinstance(other, SimplexPoint):
            return np.array_equal(self.coords, other.coords)
        return NotImplemented

    def __repr__(self):
        return f"SimplexPoint({np.array2string(self.coords, precision=6)})"


def _as_vector(v) -> np.ndarray:
    a = np.array(v, dtype=float, copy=True)
    if a.ndim != 1:
        raise BadDimension(f"expected a 1-D vector, got shape {a.shape}")
    if a.shape[0] < 2:
        raise BadDimension(f"dimension must be at least 2, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("vector has non-finite entries")
    return a


def validate_simplex(v) -> SimplexPoint:
    """Check that ``v`` lies on the simplex, cleaning up round-off.

    Entries in ``[-1e-9, 0)`` are clamped to zero and a sum within ``1e-9`` of
    one is renormalized. Anything further off raises.
    """
    if isinstance(v, SimplexPoint):
        return v
    a = _as_vector(v)
    lo = a.min()
    if lo < -NEG_TOL:
        raise NegativeCoordinate(f"coordinate {float(lo)!r} is negative")
    np.maximum(a, 0.0, out=a)
    s = a.sum()
    if abs(s - 1.0) > SUM_TOL:
        raise SumMismatch(f"coordinates sum to {s!r}, not 1")
    if abs(s - 1.0) > EXACT_TOL:
        a /= s
    return SimplexPoint(a)


def on_simplex(X) -> np.ndarray:
    """Row-wise version of the test :func:`validate_simplex` applies (no cleanup)."""
    a = np.asarray(X, dtype=float)
    finite = np.all(np.isfinite(a), axis=-1)
    clamped = np.maximum(a, 0.0)
    ok_neg = a.min(axis=-1) >= -NEG_TOL
    ok_sum = np.abs(clamped.sum(axis=-1) - 1.0) <= SUM_TOL
    return finite & ok_neg & ok_sum


def uniform_point(d: int) -> SimplexPoint:
    if d < 2:
        raise BadDimension(f"dimension must be at least 2, got {d}")
    return SimplexPoint(np.full(d, 1.0 / d))


def vertex(d: int, i: int) -> SimplexPoint:
    if d < 2:
        raise BadDimension(f"dimension must be at least 2, got {d}")
    e = np.zeros(d)
    e[i] = 1.0
    return SimplexPoint(e)


def center(v) -> np.ndarray:
    """Apply ``P_d = I - (1/d) 1 1^T``, i.e. subtract the mean.

    Works along the last axis, so a stack of vectors is centered row by row.
    """
    a = np.asarray(v, dtype=float)
    if a.ndim == 0 or a.shape[-1] < 2:
        raise BadDimension("center needs vectors of dimension at least 2")
    return a - a.mean(axis=-1, keepdims=True)


def _project_array(y: np.ndarray) -> np.ndarray:
    # sort-and-threshold (Held et al. / Duchi et al.); first try the full support,
    # which is what the sort would find whenever y - theta is nonnegative
    d = y.shape[0]
    theta = (y.sum() - 1.0) / d
    x = y - theta
    if x.min() >= 0.0:
        return x
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, d + 1)
    rho = np.nonzero(u * k > css)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def project_to_simplex(y) -> SimplexPoint:
    """Euclidean projection of ``y`` onto the simplex, in O(d log d)."""
    a = _as_vector(y)
    x = _project_array(a)
    # cancellation in y - theta when |y| is large
    s = x.sum()
    if abs(s - 1.0) > EXACT_TOL:
        x /= s
    return SimplexPoint(x)


def mix(x, u, delta: float) -> SimplexPoint:
    """The query point ``(1 - delta) x + delta u``."""
    if not 0.0 < delta < 1.0:
        raise DeltaOutOfRange(f"delta must lie in (0, 1), got {delta!r}")
    xa = np.asarray(x, dtype=float)
    ua = np.asarray(u, dtype=float)
    if xa.shape != ua.shape:
        raise DimensionMismatch(f"shapes {xa.shape} and {ua.shape} differ")
    return SimplexPoint((1.0 - delta) * xa + delta * ua)


def first_order_gap(grad, x) -> float:
    """``max_{x* in simplex} grad . (x - x*)``, which equals ``grad . x - min(grad)``.

    The maximum is attained at the vertex of the smallest gradient entry.
    Broadcasts over leading axes, returning an array in that case.
    """
    g = np.asarray(grad, dtype=float)
    xa = np.asarray(x, dtype=float)
    if g.shape[-1] != xa.shape[-1]:
        raise DimensionMismatch(f"gradient has {g.shape[-1]} entries, point has {xa.shape[-1]}")
    gap = np.sum(g * xa, axis=-1) - g.min(axis=-1)
    if np.ndim(gap) == 0:
        return float(gap)
    return gap
