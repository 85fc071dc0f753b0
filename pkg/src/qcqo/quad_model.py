"""Unconstrained quadratic objectives over R^d and their basic calculus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["QuadraticProgram", "symmetrize"]


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Return the symmetric part (M + M') / 2 of a square matrix.

    Every quadratic form w'Mw is unchanged by this replacement, so curvature
    matrices can always be assumed symmetric.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return (m + m.T) / 2.0


@dataclass(frozen=True)
class QuadraticProgram:
    """Quadratic loss L(w) = w'Aw + a'w + c over R^d.

    Parameters
    ----------
    A : (d, d) array_like
        Curvature matrix. Any square matrix is accepted and symmetrized on
        construction, which leaves the loss unchanged.
    a : (d,) array_like
        Linear coefficients.
    c : float, optional
        Constant offset. Stored so reported losses match external
        definitions; irrelevant for minimization.

    The stored arrays are defensive read-only copies, so instances are
    immutable after construction.
    """

    A: np.ndarray
    a: np.ndarray
    c: float = 0.0

    def __post_init__(self) -> None:
        A = symmetrize(self.A)
        if A.shape[0] < 1:
            raise ValueError("dimension must be at least 1")
        a = np.array(self.a, dtype=np.float64)
        if a.shape != (A.shape[0],):
            raise ValueError(
                f"linear term has shape {np.shape(self.a)}, expected ({A.shape[0]},)"
            )
        A.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", float(self.c))

    @property
    def d(self) -> int:
        return self.A.shape[0]

    def _check_vector(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.d,):
            raise ValueError(f"expected a vector of shape ({self.d},), got {w.shape}")
        return w

    def loss(self, w) -> float:
        """Evaluate L(w) = w'Aw + a'w + c."""
        w = self._check_vector(w)
        return float(w @ self.A @ w + self.a @ w + self.c)

    def gradient(self, w) -> np.ndarray:
        """Evaluate the gradient 2Aw + a (A symmetric)."""
        w = self._check_vector(w)
        return 2.0 * (self.A @ w) + self.a

    def spectral_norm(self, rel_tol: float = 1e-10, max_iter: int = 100_000) -> float:
        """Largest singular value of A by power iteration on A @ A.

        Stops once the Rayleigh-quotient residual ||A(Av) - rho v|| drops to
        ``rel_tol * rho``; for a symmetric matrix that residual bounds the
        eigenvalue error of rho, so the returned sqrt(rho) carries the same
        relative guarantee. Restarts with a fresh vector if an unlucky start
        lands in the null space; a numerically zero matrix yields 0.
        """
        A = self.A
        rng = np.random.default_rng(0x5EC7)
        rho = 0.0
        for _ in range(5):
            v = rng.standard_normal(self.d)
            norm_v = np.linalg.norm(v)
            if norm_v == 0.0:
                continue
            v = v / norm_v
            rho = 0.0
            for _ in range(max_iter):
                u = A @ (A @ v)
                rho = float(v @ u)
                if rho == 0.0:
                    break
                if float(np.linalg.norm(u - rho * v)) <= rel_tol * rho:
                    return float(np.sqrt(rho))
                v = u / np.linalg.norm(u)
            else:
                return float(np.sqrt(rho))
        return float(np.sqrt(rho))
