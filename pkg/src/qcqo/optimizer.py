"""Continuous quadratic minimization through a sequence of binary subproblems.

Each iteration draws an update matrix R, scores every candidate step R'z
through a QUBO whose energy equals the induced loss change, asks a solver for
a minimizer, and applies the step only if it does not increase the loss. A
window average of recent step norms can drive the sampling scale.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quad_model import QuadraticProgram, symmetrize
from .qubo import QuboInstance, SolveResult
from .sampling import RowSampler, UpdateMatrix

__all__ = [
    "SIGMA_FLOOR",
    "DiagnosticsReport",
    "OptimizerState",
    "StepRecord",
    "StoppingRule",
    "Trajectory",
    "build_qubo",
    "convergence_diagnostics",
    "run_adaptive",
    "run_fixed",
    "step",
]

QuboSolver = Callable[[QuboInstance, int], SolveResult]

# Keeps the sampler variance positive when every recent step was zero.
SIGMA_FLOOR = 1e-12


def build_qubo(qp: QuadraticProgram, w, R) -> QuboInstance:
    """Binary subproblem whose energy is the loss change of the step R'z.

    Q = sym(R A R') + diag(R (2Aw + a)); because z_i^2 == z_i for binary z,
    the linear part collapses onto the diagonal and z'Qz == L(w + R'z) - L(w)
    for every z in {0,1}^n.
    """
    rows = R.R if isinstance(R, UpdateMatrix) else np.asarray(R, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != qp.d:
        raise ValueError(
            f"update matrix has shape {rows.shape}, expected (n, {qp.d})"
        )
    quad = symmetrize(rows @ qp.A @ rows.T)
    linear = rows @ qp.gradient(w)
    return QuboInstance(quad + np.diag(linear))


@dataclass(frozen=True)
class StoppingRule:
    """Stop on an iteration budget, a loss threshold, or a wall-clock budget.

    At least one criterion must be set; any satisfied criterion stops the
    run. Wall-clock stopping trades reproducibility of the trajectory length
    for a hard time budget.
    """

    max_iterations: int | None = None
    loss_threshold: float | None = None
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        if (
            self.max_iterations is None
            and self.loss_threshold is None
            and self.max_seconds is None
        ):
            raise ValueError("at least one stopping criterion must be set")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")

    def should_stop(self, iteration: int, loss: float, elapsed: float) -> bool:
        if self.max_iterations is not None and iteration >= self.max_iterations:
            return True
        if self.loss_threshold is not None and loss <= self.loss_threshold:
            return True
        if self.max_seconds is not None and elapsed >= self.max_seconds:
            return True
        return False


@dataclass
class OptimizerState:
    """Loop state: iterate, iteration count, sampling scale, recent step norms."""

    w: np.ndarray
    t: int = 0
    sigma: float = 1.0
    step_window: deque = field(default_factory=lambda: deque(maxlen=10))


@dataclass(frozen=True)
class StepRecord:
    """What one iteration did: the loss after the step, the sampling scale
    used, the applied step's norm and energy, and the step vector itself."""

    t: int
    loss: float
    sigma: float
    step_norm: float
    qubo_energy: float
    step: np.ndarray


def step(
    qp: QuadraticProgram,
    state: OptimizerState,
    sampler: RowSampler,
    solver: QuboSolver,
    seed,
) -> tuple[OptimizerState, StepRecord]:
    """One refinement iteration; never increases the loss.

    The seed (an int or a SeedSequence) splits into one stream for the row
    draw and one for the solver. If the solver's best energy is positive,
    which can happen with imperfect solvers, the all-zero selector is used
    instead and the iterate stays put; the recorded energy is then 0.
    """
    entropy = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    row_seed, solver_seed = entropy.spawn(2)
    R = sampler.sample(row_seed)
    instance = build_qubo(qp, state.w, R)
    result = solver(instance, int(solver_seed.generate_state(1)[0]))
    if result.energy > 0.0:
        u = np.zeros(qp.d)
        applied_energy = 0.0
    else:
        u = R.step(result.z)
        applied_energy = result.energy
    w_next = state.w + u
    step_norm = float(np.linalg.norm(u))
    window = deque(state.step_window, maxlen=state.step_window.maxlen)
    window.append(step_norm)
    next_state = OptimizerState(
        w=w_next, t=state.t + 1, sigma=state.sigma, step_window=window
    )
    record = StepRecord(
        t=next_state.t,
        loss=qp.loss(w_next),
        sigma=state.sigma,
        step_norm=step_norm,
        qubo_energy=applied_energy,
        step=u,
    )
    return next_state, record


@dataclass
class Trajectory:
    """Per-iteration history of one run; row t describes iteration t (1-based),
    i.e. the iterate after step t and the step that produced it.

    ``iterates`` (length + 1 rows, starting at w0) and ``steps`` are populated
    only when the run recorded them.
    """

    loss: np.ndarray
    sigma: np.ndarray
    step_norm: np.ndarray
    qubo_energy: np.ndarray
    dist_opt: np.ndarray | None = None
    iterates: np.ndarray | None = None
    steps: np.ndarray | None = None

    def __len__(self) -> int:
        return self.loss.shape[0]


def _run_loop(
    qp: QuadraticProgram,
    w0,
    n: int,
    solver: QuboSolver,
    stop: StoppingRule,
    seed,
    sigma0: float,
    window_len: int,
    adapt,
    w_star,
    record_steps: bool,
) -> tuple[np.ndarray, Trajectory]:
    w0 = np.asarray(w0, dtype=np.float64)
    if w0.shape != (qp.d,):
        raise ValueError(f"w0 has shape {w0.shape}, expected ({qp.d},)")
    if n < 1:
        raise ValueError("n must be at least 1")
    if w_star is not None:
        w_star = np.asarray(w_star, dtype=np.float64)
    root = np.random.SeedSequence(seed)
    state = OptimizerState(
        w=w0.copy(), t=0, sigma=sigma0, step_window=deque(maxlen=window_len)
    )
    current_loss = qp.loss(state.w)
    records: list[StepRecord] = []
    distances: list[float] = []
    iterates = [state.w.copy()] if record_steps else None
    started = time.monotonic()
    while not stop.should_stop(state.t, current_loss, time.monotonic() - started):
        if adapt is not None:
            state.sigma = adapt(state.t, state.step_window)
        sampler = RowSampler.for_target_step(state.sigma, n, qp.d)
        state, record = step(qp, state, sampler, solver, root.spawn(1)[0])
        records.append(record)
        current_loss = record.loss
        if w_star is not None:
            distances.append(float(np.linalg.norm(state.w - w_star)))
        if record_steps:
            iterates.append(state.w.copy())
    trajectory = Trajectory(
        loss=np.array([r.loss for r in records]),
        sigma=np.array([r.sigma for r in records]),
        step_norm=np.array([r.step_norm for r in records]),
        qubo_energy=np.array([r.qubo_energy for r in records]),
        dist_opt=np.array(distances) if w_star is not None else None,
        iterates=np.array(iterates) if record_steps else None,
        steps=np.array([r.step for r in records]).reshape(len(records), qp.d)
        if record_steps
        else None,
    )
    return state.w, trajectory


def run_fixed(
    qp: QuadraticProgram,
    w0,
    sigma: float,
    n: int,
    solver: QuboSolver,
    stop: StoppingRule,
    seed,
    *,
    w_star=None,
    record_steps: bool = False,
) -> tuple[np.ndarray, Trajectory]:
    """Refinement loop with a constant sampling scale.

    Every iteration draws rows targeting a step covariance of sigma I_d.
    Returns the final iterate and the trajectory; with a zero iteration
    budget the trajectory is empty and w0 comes straight back.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return _run_loop(
        qp,
        w0,
        n,
        solver,
        stop,
        seed,
        sigma0=sigma,
        window_len=1,
        adapt=None,
        w_star=w_star,
        record_steps=record_steps,
    )


def run_adaptive(
    qp: QuadraticProgram,
    w0,
    n: int,
    window: int,
    solver: QuboSolver,
    stop: StoppingRule,
    seed,
    *,
    w_star=None,
    record_steps: bool = False,
    sigma_floor: float = SIGMA_FLOOR,
) -> tuple[np.ndarray, Trajectory]:
    """Refinement loop whose sampling scale follows recent step norms.

    Iterations t = 0..window use sigma = 1; afterwards sigma is the plain
    average of the last ``window`` step norms (zero steps included), floored
    at ``sigma_floor`` when that average is zero. Large early steps therefore
    raise the scale and a stalling run cools it down.
    """
    if window < 1:
        raise ValueError("window must be at least 1")

    def adapt(t: int, step_window: deque) -> float:
        if t <= window:
            return 1.0
        mean = sum(step_window) / len(step_window)
        return mean if mean > 0.0 else sigma_floor

    return _run_loop(
        qp,
        w0,
        n,
        solver,
        stop,
        seed,
        sigma0=1.0,
        window_len=window,
        adapt=adapt,
        w_star=w_star,
        record_steps=record_steps,
    )


@dataclass
class DiagnosticsReport:
    """Per-iteration convergence accounting for a recorded run.

    ``gap`` is the loss above the known optimum. The residual columns measure
    how far each applied step is from the rescaled negative gradient
    direction, in two conventions: ``resid_grad`` uses the full gradient
    2Aw + a, ``resid_half`` uses Aw + a. ``corr_*`` are the inner products of
    those residuals with the step, and ``bound_*`` are the running averaged
    upper bounds they induce on the gap, in an unsquared and a squared
    initial-distance variant each. All arrays align with iterations 1..len.
    """

    gap: np.ndarray
    resid_grad: np.ndarray
    resid_half: np.ndarray
    corr_grad: np.ndarray
    corr_half: np.ndarray
    bound_grad: np.ndarray
    bound_grad_sq: np.ndarray
    bound_half: np.ndarray
    bound_half_sq: np.ndarray

    def __len__(self) -> int:
        return self.gap.shape[0]


def convergence_diagnostics(
    qp: QuadraticProgram, trajectory: Trajectory, w_star
) -> DiagnosticsReport:
    """Report-only convergence diagnostics against a known optimum.

    Requires a convex objective (smallest eigenvalue of A above -1e-9) and a
    trajectory recorded with ``record_steps=True``. Nothing here feeds back
    into optimization; the bounds are descriptive and can be loose or even
    exceeded when their assumptions fail, so they are reported, not asserted.
    """
    if trajectory.iterates is None or trajectory.steps is None:
        raise ValueError("trajectory must be recorded with record_steps=True")
    eigenvalues = np.linalg.eigvalsh(qp.A)
    if eigenvalues[0] < -1e-9:
        raise ValueError("diagnostics require a convex objective (A PSD)")
    w_star = np.asarray(w_star, dtype=np.float64)
    if w_star.shape != (qp.d,):
        raise ValueError(f"w_star has shape {w_star.shape}, expected ({qp.d},)")
    norm_a = qp.spectral_norm()
    before = trajectory.iterates[:-1]
    steps = trajectory.steps
    count = steps.shape[0]
    loss_star = qp.loss(w_star)
    gap = trajectory.loss - loss_star
    gradients = 2.0 * (before @ qp.A) + qp.a
    halves = before @ qp.A + qp.a
    resid_grad_vec = steps + norm_a * gradients
    resid_half_vec = steps + norm_a * halves
    corr_grad = np.einsum("ij,ij->i", resid_grad_vec, steps)
    corr_half = np.einsum("ij,ij->i", resid_half_vec, steps)
    dist0 = float(np.linalg.norm(trajectory.iterates[0] - w_star))
    t = np.arange(1, count + 1, dtype=np.float64)
    mean_corr_grad = np.cumsum(corr_grad) / t
    mean_corr_half = np.cumsum(corr_half) / t
    return DiagnosticsReport(
        gap=gap,
        resid_grad=np.linalg.norm(resid_grad_vec, axis=1),
        resid_half=np.linalg.norm(resid_half_vec, axis=1),
        corr_grad=corr_grad,
        corr_half=corr_half,
        bound_grad=norm_a * dist0 / (2.0 * t) + mean_corr_grad,
        bound_grad_sq=norm_a * dist0**2 / (2.0 * t) + mean_corr_grad,
        bound_half=norm_a * dist0 / (2.0 * t) + mean_corr_half,
        bound_half_sq=norm_a * dist0**2 / (2.0 * t) + mean_corr_half,
    )
