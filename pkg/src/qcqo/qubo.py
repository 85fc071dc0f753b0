"""Binary quadratic (QUBO) instances and two solver backends.

``solve_exhaustive`` scores every assignment and returns a certified global
minimizer; ``solve_sa`` is a restart Metropolis annealer that stands in for an
imperfect hardware sampler. Both are deterministic given (instance, params,
seed) and recompute the reported energy from the returned assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from numba import njit

from .quad_model import symmetrize

__all__ = [
    "DEFAULT_EXHAUSTIVE_CAP",
    "QuboInstance",
    "SAParams",
    "SolveResult",
    "dump_qubo",
    "exhaustive_solver",
    "load_qubo",
    "sa_solver",
    "solve_exhaustive",
    "solve_sa",
]

DEFAULT_EXHAUSTIVE_CAP = 25


def _check_binary(z, n: int) -> np.ndarray:
    z = np.asarray(z)
    if z.shape != (n,):
        raise ValueError(f"expected an assignment of shape ({n},), got {z.shape}")
    z = z.astype(np.float64)
    if not np.all((z == 0.0) | (z == 1.0)):
        raise ValueError("assignment entries must be 0 or 1")
    return z


@dataclass(frozen=True)
class QuboInstance:
    """Binary quadratic energy E(z) = z'Qz with symmetric weights.

    Any square weight matrix is accepted and symmetrized on construction;
    the energy of every assignment is unchanged. Entries are read-only.
    """

    Q: np.ndarray

    def __post_init__(self) -> None:
        Q = symmetrize(self.Q)
        if Q.shape[0] < 1:
            raise ValueError("need at least one variable")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def energy(self, z) -> float:
        """Evaluate z'Qz for a binary assignment z."""
        z = _check_binary(z, self.n)
        return float(z @ self.Q @ z)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solver call.

    ``energy`` is always recomputed from ``z`` by the returning solver, so it
    matches ``instance.energy(z)`` exactly. ``num_evaluations`` counts energy
    evaluations for the exhaustive backend and proposals (reads * sweeps) for
    the annealer.
    """

    z: np.ndarray
    energy: float
    solver_id: str
    num_evaluations: int


# -- exhaustive enumeration ---------------------------------------------------

_BITS_CACHE: dict[int, np.ndarray] = {}
_BUF_CACHE: dict[tuple[int, int], np.ndarray] = {}

_CHUNK_ROWS = 512


def _bit_matrix(nbits: int) -> np.ndarray:
    """(2^nbits, nbits) float matrix; row i holds the bits of i, LSB first."""
    got = _BITS_CACHE.get(nbits)
    if got is None:
        ints = np.arange(1 << nbits, dtype=np.uint64)[:, None]
        shifts = np.arange(nbits, dtype=np.uint64)[None, :]
        got = ((ints >> shifts) & 1).astype(np.float64)
        got.setflags(write=False)
        _BITS_CACHE[nbits] = got
    return got


def _index_to_assignment(index: int, n: int) -> np.ndarray:
    bits = (index >> np.arange(n, dtype=np.uint64)) & 1
    return bits.astype(np.int8)


def solve_exhaustive(
    instance: QuboInstance, max_bits: int = DEFAULT_EXHAUSTIVE_CAP
) -> SolveResult:
    """Global minimizer by full enumeration, feasible up to ``max_bits`` variables.

    The variables are split into a low and a high half, the energy separates
    into per-half quadratic forms plus a bilinear cross term, and one matrix
    product per row block scores every (high, low) combination at once. Ties
    break toward the smallest assignment read as an unsigned integer with z_1
    as the least significant bit, which pins down a unique reproducible
    minimizer (and makes the all-zero assignment win when everything ties).
    """
    n = instance.n
    if n > max_bits:
        raise ValueError(f"{n} variables exceed the exhaustive cap of {max_bits}")
    Q = instance.Q
    n_low = n // 2
    low = _bit_matrix(n_low)
    high = _bit_matrix(n - n_low)
    n_cols = low.shape[0]
    n_rows = high.shape[0]
    qf_low = np.einsum("ij,jk,ik->i", low, Q[:n_low, :n_low], low)
    qf_high = np.einsum("ij,jk,ik->i", high, Q[n_low:, n_low:], high)
    # E(high, low) = qf_high + 2 high' Q_cross low + qf_low, evaluated as a
    # single product per block by carrying the quadratic forms as extra
    # columns against constant-one columns on the other side.
    lhs = np.empty((n_rows, n_low + 2))
    lhs[:, :n_low] = high @ (2.0 * Q[n_low:, :n_low])
    lhs[:, n_low] = qf_high
    lhs[:, n_low + 1] = 1.0
    rhs = np.empty((n_low + 2, n_cols))
    rhs[:n_low] = low.T
    rhs[n_low] = 1.0
    rhs[n_low + 1] = qf_low

    buf_key = (min(_CHUNK_ROWS, n_rows), n_cols)
    buf = _BUF_CACHE.get(buf_key)
    if buf is None:
        buf = np.empty(buf_key)
        _BUF_CACHE[buf_key] = buf
    best_energy = np.inf
    best_index = 0
    for start in range(0, n_rows, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, n_rows)
        block = buf[: stop - start]
        np.dot(lhs[start:stop], rhs, out=block)
        flat = int(block.argmin())
        energy = float(block.reshape(-1)[flat])
        if energy < best_energy:
            best_energy = energy
            best_index = start * n_cols + flat
    z = _index_to_assignment(best_index, n)
    return SolveResult(
        z=z,
        energy=instance.energy(z),
        solver_id="exhaustive",
        num_evaluations=1 << n,
    )


# -- simulated annealing ------------------------------------------------------


@dataclass(frozen=True)
class SAParams:
    """Knobs for the restart annealer.

    ``reads`` independent restarts (the classical analogue of hardware shots)
    of ``sweeps`` full single-flip passes each. Temperatures follow a
    geometric schedule; left unset they default to the instance's own scale,
    from hot enough to accept almost any move down to effectively greedy.
    """

    reads: int = 100
    sweeps: int = 1000
    t_init: float | None = None
    t_final: float | None = None

    def __post_init__(self) -> None:
        if self.reads < 1:
            raise ValueError("reads must be at least 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if (self.t_init is None) != (self.t_final is None):
            raise ValueError("set both temperatures or neither")
        if self.t_init is not None and not (self.t_init >= self.t_final > 0.0):
            raise ValueError("temperatures must satisfy t_init >= t_final > 0")


def _temperature_bounds(Q: np.ndarray, params: SAParams) -> tuple[float, float]:
    if params.t_init is not None:
        return float(params.t_init), float(params.t_final)
    magnitudes = np.abs(Q[Q != 0.0])
    if magnitudes.size == 0:
        return 1.0, 1e-3
    return float(magnitudes.max()), float(1e-3 * magnitudes.min())


@njit(cache=True)
def _anneal(Q, reads, sweeps, t_init, t_final, read_seeds):  # pragma: no cover
    n = Q.shape[0]
    best_z = np.zeros(n, dtype=np.uint8)
    best_e = np.inf
    z = np.zeros(n, dtype=np.uint8)
    flip_cost = np.zeros(n)
    if sweeps > 1:
        decay = (t_final / t_init) ** (1.0 / (sweeps - 1))
    else:
        decay = 1.0
    for r in range(reads):
        np.random.seed(read_seeds[r])
        for j in range(n):
            z[j] = 1 if np.random.random() < 0.5 else 0
        # flip_cost[j] is the energy change of setting z_j to 1 with the rest
        # of z held fixed; its sign flips when z_j is already 1.
        e = 0.0
        for j in range(n):
            acc = 0.0
            for k in range(n):
                if z[k] == 1:
                    acc += Q[j, k]
            if z[j] == 1:
                acc -= Q[j, j]
            flip_cost[j] = Q[j, j] + 2.0 * acc
            if z[j] == 1:
                e += Q[j, j] + acc
        if e < best_e:
            best_e = e
            best_z[:] = z
        temp = t_init
        for _ in range(sweeps):
            for j in range(n):
                de = -flip_cost[j] if z[j] == 1 else flip_cost[j]
                accept = de <= 0.0
                if not accept and temp > 0.0:
                    accept = np.random.random() < np.exp(-de / temp)
                if accept:
                    e += de
                    if z[j] == 1:
                        z[j] = 0
                        for k in range(n):
                            flip_cost[k] -= 2.0 * Q[j, k]
                        flip_cost[j] += 2.0 * Q[j, j]
                    else:
                        z[j] = 1
                        for k in range(n):
                            flip_cost[k] += 2.0 * Q[j, k]
                        flip_cost[j] -= 2.0 * Q[j, j]
                    if e < best_e:
                        best_e = e
                        best_z[:] = z
            temp *= decay
    return best_z, best_e


def solve_sa(
    instance: QuboInstance, params: SAParams | None = None, seed: int = 0
) -> SolveResult:
    """Best assignment over ``params.reads`` independent annealing restarts.

    Restarts run sequentially with per-read seeds derived from ``seed``, and
    the merge keeps the earliest read on energy ties, so the result is a pure
    function of (instance, params, seed). There is no optimality certificate:
    the returned energy can exceed the true minimum, and callers guarding
    against positive energies should check it themselves.
    """
    if params is None:
        params = SAParams()
    t_init, t_final = _temperature_bounds(instance.Q, params)
    read_seeds = (
        np.random.SeedSequence(seed).generate_state(params.reads).astype(np.int64)
    )
    z, _ = _anneal(
        instance.Q, params.reads, params.sweeps, t_init, t_final, read_seeds
    )
    z = z.astype(np.int8)
    return SolveResult(
        z=z,
        energy=instance.energy(z),
        solver_id="sa",
        num_evaluations=params.reads * params.sweeps,
    )


# -- solver callables for the refinement loop --------------------------------

QuboSolver = Callable[[QuboInstance, int], SolveResult]


def exhaustive_solver(max_bits: int = DEFAULT_EXHAUSTIVE_CAP) -> QuboSolver:
    """Exhaustive backend as a (instance, seed) callable; the seed is unused."""

    def solve(instance: QuboInstance, seed: int) -> SolveResult:
        return solve_exhaustive(instance, max_bits=max_bits)

    return solve


def sa_solver(params: SAParams | None = None) -> QuboSolver:
    """Annealer backend as a (instance, seed) callable with fixed params."""
    params = params or SAParams()

    def solve(instance: QuboInstance, seed: int) -> SolveResult:
        return solve_sa(instance, params, seed)

    return solve


# -- debug dump ---------------------------------------------------------------


def dump_qubo(instance: QuboInstance, path) -> None:
    """Write a plain-text dump: first line n, then one ``i j Q_ij`` line per
    nonzero upper-triangle entry (0-indexed, full float precision)."""
    lines = [str(instance.n)]
    Q = instance.Q
    for i in range(instance.n):
        for j in range(i, instance.n):
            if Q[i, j] != 0.0:
                lines.append(f"{i} {j} {Q[i, j]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_qubo(path) -> QuboInstance:
    """Inverse of :func:`dump_qubo`."""
    lines = Path(path).read_text().strip().splitlines()
    n = int(lines[0])
    Q = np.zeros((n, n))
    for line in lines[1:]:
        i_text, j_text, value_text = line.split()
        i, j = int(i_text), int(j_text)
        Q[i, j] = Q[j, i] = float(value_text)
    return QuboInstance(Q)
