"""Seeded sampling from the symmetric Dirichlet distribution Dir(alpha * 1_d)."""
from __future__ import annotations

import numpy as np

from .errors import BadDimension, DegenerateDraw, ZOSimplexError
from .simplex import SimplexPoint

GENERATOR_FAMILY = "numpy.PCG64"
MAX_RESAMPLES = 100
SEED_MAX = 2**64 - 1


def parse_seed(text) -> int:
    """Accept a seed as an int, a decimal string or a 0x-prefixed hex string."""
    if isinstance(text, (int, np.integer)):
        seed = int(text)
    else:
        s = str(text).strip().lower()
        try:
            seed = int(s, 16) if s.startswith("0x") else int(s, 10)
        except ValueError:
            raise ZOSimplexError(f"not a valid seed: {text!r}") from None
    if not 0 <= seed <= SEED_MAX:
        raise ZOSimplexError(f"seed {seed} is outside the 64-bit range")
    return seed


class DirichletSampler:
    """Draws from Dir(alpha, ..., alpha) in dimension ``d``.

    Each draw normalizes ``d`` independent Gamma(alpha, 1) variates. The
    stream is a PCG64 generator seeded with a 64-bit integer, so equal seeds
    give bit-identical draws whether they are taken one at a time or in
    batches. An instance is stateful and must not be shared between threads.
    """

    def __init__(self, alpha: float, d: int, seed=0):
        if not alpha > 0:
            raise ZOSimplexError(f"alpha must be positive, got {alpha!r}")
        if d < 2:
            raise BadDimension(f"dimension must be at least 2, got {d}")
        self.alpha = float(alpha)
        self.d = int(d)
        self.seed = parse_seed(seed)
        self.rng = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self):
        return f"DirichletSampler(alpha={self.alpha}, d={self.d}, seed={self.seed})"

    def sample(self) -> SimplexPoint:
        return SimplexPoint(self.sample_n(1)[0])

    def sample_n(self, n: int) -> np.ndarray:
        """Return an ``(n, d)`` array of draws; rows are points of the simplex."""
        g = self.rng.standard_gamma(self.alpha, size=(n, self.d))
        s = g.sum(axis=1)
        bad = np.nonzero(s == 0.0)[0]
        # tiny alpha: every variate in a row can underflow to 0
        for i in bad:
            for _ in range(MAX_RESAMPLES):
                row = self.rng.standard_gamma(self.alpha, size=self.d)
                if row.sum() > 0.0:
                    g[i] = row
                    s[i] = row.sum()
                    break
            else:
                raise DegenerateDraw(
                    f"{MAX_RESAMPLES} consecutive all-zero gamma draws at alpha={self.alpha}"
                )
        return g / s[:, None]

    def jumped(self, jumps: int = 1) -> "DirichletSampler":
        """An independent sampler whose stream starts ``jumps * 2**127`` steps ahead."""
        other = DirichletSampler(self.alpha, self.d, self.seed)
        other.rng = np.random.Generator(self.rng.bit_generator.jumped(jumps))
        return other


def empirical_moments(sampler: DirichletSampler, n: int):
    """Sample mean and unbiased sample covariance of ``n`` fresh draws."""
    if n < 2:
        raise ZOSimplexError("need at least two draws for a covariance")
    u = sampler.sample_n(n)
    mean = u.mean(axis=0)
    cov = np.cov(u, rowvar=False, ddof=1)
    return mean, cov


def dirichlet_covariance(alpha: float, d: int) -> np.ndarray:
    """Closed-form covariance of Dir(alpha * 1_d): ``P_d / (d (alpha d + 1))``."""
    p = np.eye(d) - np.full((d, d), 1.0 / d)
    return p / (d * (alpha * d + 1.0))
