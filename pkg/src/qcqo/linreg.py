"""Least-squares regression as the exemplary quadratic objective.

The mean squared error of a linear model with a fused bias column is a
quadratic in the weights, so a dataset reduces once to a curvature matrix and
a linear term and the refinement loop never touches the data again. This
module also provides the fixed-point bit encoding used to compare explicit
weight-discretization budgets against the per-iteration selector size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .quad_model import QuadraticProgram

__all__ = [
    "PrecisionEncoding",
    "RegressionDataset",
    "closed_form_optimum",
    "generate_synthetic",
    "load_dataset",
    "min_bits",
    "precision_vector",
    "save_dataset",
]

# Relative eigenvalue cutoff below which the Gram matrix is treated as
# rank-deficient rather than merely ill-conditioned.
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class RegressionDataset:
    """Design matrix with an all-ones last column (fused bias) and targets.

    Requires N >= d so the least-squares optimum can be unique. Arrays are
    stored as read-only copies; ``w_true`` carries the generating weights for
    synthetic data and is None for datasets loaded without one.
    """

    X: np.ndarray
    y: np.ndarray
    w_true: np.ndarray | None = None

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"expected a nonempty 2-d design matrix, got {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"targets have shape {y.shape}, expected ({X.shape[0]},)")
        if X.shape[0] < X.shape[1]:
            raise ValueError("need at least as many rows as features (N >= d)")
        if not np.all(X[:, -1] == 1.0):
            raise ValueError("last design column must be all ones (fused bias)")
        w_true = self.w_true
        if w_true is not None:
            w_true = np.array(w_true, dtype=np.float64)
            if w_true.shape != (X.shape[1],):
                raise ValueError(
                    f"w_true has shape {w_true.shape}, expected ({X.shape[1]},)"
                )
            w_true.setflags(write=False)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w_true", w_true)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def mse(self, w) -> float:
        """Mean squared error (1/N) ||Xw - y||^2."""
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.d,):
            raise ValueError(f"expected weights of shape ({self.d},), got {w.shape}")
        residual = self.X @ w - self.y
        return float(residual @ residual) / self.N

    def to_quadratic_program(self) -> QuadraticProgram:
        """MSE written as a quadratic: A = X'X/N, a = -2X'y/N, c = y'y/N."""
        A = self.X.T @ self.X / self.N
        a = -2.0 * (self.X.T @ self.y) / self.N
        c = float(self.y @ self.y) / self.N
        return QuadraticProgram(A=A, a=a, c=c)


def generate_synthetic(
    d: int,
    N: int,
    target_norm: float = 100.0,
    seed: int = 0,
    noise_std: float = 0.0,
) -> RegressionDataset:
    """Random regression problem with a known planted weight vector.

    Ground-truth weights are standard normal rescaled to ``target_norm``;
    feature rows are N(0, d I) with the last column overwritten by the bias
    ones; targets are exact unless ``noise_std`` adds Gaussian noise. Needs
    d >= 2 so that rescaling does not reduce the weights to a bare bias.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if N < 1:
        raise ValueError("N must be at least 1")
    if target_norm <= 0.0:
        raise ValueError("target_norm must be positive")
    if noise_std < 0.0:
        raise ValueError("noise_std must be nonnegative")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    norm = float(np.linalg.norm(w))
    while norm == 0.0:
        w = rng.standard_normal(d)
        norm = float(np.linalg.norm(w))
    w *= target_norm / norm
    X = np.sqrt(d) * rng.standard_normal((N, d))
    X[:, -1] = 1.0
    y = X @ w
    if noise_std > 0.0:
        y = y + noise_std * rng.standard_normal(N)
    return RegressionDataset(X=X, y=y, w_true=w)


def closed_form_optimum(ds: RegressionDataset) -> np.ndarray:
    """Least-squares weights from the normal equations (X'X) w = X'y.

    Solves by Cholesky after an explicit rank check on the Gram matrix; a
    rank-deficient design raises ``numpy.linalg.LinAlgError``. A lightly
    ridged retry covers factorizations that fail only through rounding, and
    the result is accepted only if it actually zeroes the MSE gradient.
    """
    gram = ds.X.T @ ds.X
    moment = ds.X.T @ ds.y
    eigenvalues = np.linalg.eigvalsh(gram)
    if eigenvalues[0] <= _RANK_RTOL * eigenvalues[-1]:
        raise np.linalg.LinAlgError(
            "design matrix is numerically rank-deficient; no unique optimum"
        )
    try:
        w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), moment)
    except scipy.linalg.LinAlgError:
        ridge = _RANK_RTOL * eigenvalues[-1] * np.eye(ds.d)
        w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram + ridge), moment)
    qp = ds.to_quadratic_program()
    gradient_norm = float(np.linalg.norm(qp.gradient(w)))
    if gradient_norm > 1e-6 * (float(np.linalg.norm(qp.a)) + 1e-300):
        raise np.linalg.LinAlgError(
            "normal equations solve failed to zero the gradient"
        )
    return w


# -- fixed-point weight encoding ----------------------------------------------


@dataclass(frozen=True)
class PrecisionEncoding:
    """k-bit fixed-point code for [0, 1]: bit weights p_i = 2^(i-1)/(2^k - 1).

    The representable values p'z are exactly the uniform grid
    {0, 1/(2^k - 1), ..., 1}, so the worst-case rounding error over [0, 1]
    is half the grid spacing.
    """

    k: int
    p: np.ndarray

    def decode(self, z) -> float:
        """Value p'z encoded by the binary vector z."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.k,):
            raise ValueError(f"expected {self.k} bits, got shape {z.shape}")
        return float(self.p @ z)


def precision_vector(k: int) -> PrecisionEncoding:
    """The k-bit encoding; k must be at least 1."""
    if k < 1:
        raise ValueError("k must be at least 1")
    p = 2.0 ** np.arange(k) / float(2**k - 1)
    p.setflags(write=False)
    return PrecisionEncoding(k=k, p=p)


def min_bits(epsilon: float) -> int:
    """Fewest bits covering [0, 1] to within epsilon.

    Smallest k with 2^k - 1 >= 1/(2 epsilon); the log is nudged down by an
    ulp-scale slack so exact powers of two do not round up spuriously.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    return max(1, math.ceil(math.log2(1.0 / (2.0 * epsilon) + 1.0) - 1e-12))


# -- CSV persistence ----------------------------------------------------------


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def save_dataset(ds: RegressionDataset, path, seed: int | None = None) -> None:
    """Write the dataset as CSV (header x1..xd,y, full float precision) plus a
    JSON sidecar (same path with a .meta.json suffix) holding d, N, the
    generating seed if known, and w_true."""
    path = Path(path)
    header = ",".join([f"x{i + 1}" for i in range(ds.d)] + ["y"])
    table = np.column_stack([ds.X, ds.y])
    lines = [header]
    lines.extend(",".join(f"{value:.17g}" for value in row) for row in table)
    path.write_text("\n".join(lines) + "\n")
    meta = {
        "d": ds.d,
        "N": ds.N,
        "seed": seed,
        "w_true": None if ds.w_true is None else [float(v) for v in ds.w_true],
    }
    _sidecar(path).write_text(json.dumps(meta, indent=2) + "\n")


def load_dataset(path) -> RegressionDataset:
    """Inverse of :func:`save_dataset`; tolerates a missing sidecar."""
    path = Path(path)
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    X, y = table[:, :-1], table[:, -1]
    w_true = None
    sidecar = _sidecar(path)
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        if meta.get("w_true") is not None:
            w_true = np.asarray(meta["w_true"], dtype=np.float64)
    return RegressionDataset(X=X, y=y, w_true=w_true)
