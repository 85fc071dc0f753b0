"""Gaussian sampling of the row matrices that span candidate update steps.

A candidate step is R'z for a binary selector z, i.e. a sum of a subset of the
rows of R. When the rows are i.i.d. N(mu, v I_d) and z is averaged uniformly
over {0,1}^n, the averaged step (1/2) sum_i R_i is Gaussian with mean
(n/2) mu and covariance (n/4) v I_d. Targeting a step covariance of
sigma I_d therefore means drawing rows with variance 4 sigma / n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RowSampler", "UpdateMatrix"]


@dataclass(frozen=True)
class UpdateMatrix:
    """n x d matrix whose row subsets form the candidate steps."""

    R: np.ndarray

    def __post_init__(self) -> None:
        R = np.array(self.R, dtype=np.float64)
        if R.ndim != 2 or R.shape[0] < 1 or R.shape[1] < 1:
            raise ValueError(f"expected a nonempty 2-d matrix, got shape {R.shape}")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @property
    def d(self) -> int:
        return self.R.shape[1]

    def step(self, z) -> np.ndarray:
        """Candidate step R'z selected by the binary vector z."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.n,):
            raise ValueError(f"expected a selector of shape ({self.n},), got {z.shape}")
        return self.R.T @ z

    def average_step(self) -> np.ndarray:
        """Mean of R'z over z uniform on {0,1}^n, i.e. half the row sum."""
        return 0.5 * self.R.sum(axis=0)


@dataclass(frozen=True)
class RowSampler:
    """Draws n x d matrices with i.i.d. Gaussian rows N(mu, row_variance I_d).

    Draws use numpy's default PCG64 generator, so a given seed always yields
    the same matrix.
    """

    d: int
    n: int
    mu: np.ndarray | float = 0.0
    row_variance: float = 1.0

    def __post_init__(self) -> None:
        if self.d < 1 or self.n < 1:
            raise ValueError("both n and d must be at least 1")
        if self.row_variance <= 0.0:
            raise ValueError("row_variance must be positive")
        mu = np.broadcast_to(np.asarray(self.mu, dtype=np.float64), (self.d,)).copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "row_variance", float(self.row_variance))

    @classmethod
    def for_target_step(cls, sigma: float, n: int, d: int) -> "RowSampler":
        """Sampler whose uniform-z averaged step is N(0, sigma I_d).

        Rows get mean zero and variance 4 sigma / n; sigma scales a
        covariance, not a standard deviation.
        """
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        return cls(d=d, n=n, mu=np.zeros(d), row_variance=4.0 * sigma / n)

    def _draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        scale = np.sqrt(self.row_variance)
        return self.mu + scale * rng.standard_normal((count, self.n, self.d))

    def sample(self, seed) -> UpdateMatrix:
        """One matrix draw; deterministic for a given seed."""
        rng = np.random.default_rng(seed)
        return UpdateMatrix(self._draw(rng, 1)[0])

    def sample_batch(self, count: int, seed) -> np.ndarray:
        """(count, n, d) array of independent draws, for Monte Carlo checks."""
        if count < 1:
            raise ValueError("count must be at least 1")
        rng = np.random.default_rng(seed)
        return self._draw(rng, count)

    def step_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Closed-form law of the uniform-z averaged step: mean and covariance.

        The average over z of R'z is Gaussian with mean (n/2) mu and
        covariance (n/4) row_variance I_d.
        """
        mean = (self.n / 2.0) * self.mu
        cov = (self.n / 4.0) * self.row_variance * np.eye(self.d)
        return mean, cov
