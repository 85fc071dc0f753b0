"""Continuous quadratic minimization through sequences of small binary
(QUBO) subproblems, with least-squares regression as the worked example."""

from .linreg import (
    PrecisionEncoding,
    RegressionDataset,
    closed_form_optimum,
    generate_synthetic,
    load_dataset,
    min_bits,
    precision_vector,
    save_dataset,
)
from .optimizer import (
    SIGMA_FLOOR,
    DiagnosticsReport,
    OptimizerState,
    StepRecord,
    StoppingRule,
    Trajectory,
    build_qubo,
    convergence_diagnostics,
    run_adaptive,
    run_fixed,
    step,
)
from .quad_model import QuadraticProgram, symmetrize
from .qubo import (
    DEFAULT_EXHAUSTIVE_CAP,
    QuboInstance,
    SAParams,
    SolveResult,
    dump_qubo,
    exhaustive_solver,
    load_qubo,
    sa_solver,
    solve_exhaustive,
    solve_sa,
)
from .sampling import RowSampler, UpdateMatrix

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EXHAUSTIVE_CAP",
    "SIGMA_FLOOR",
    "DiagnosticsReport",
    "OptimizerState",
    "PrecisionEncoding",
    "QuadraticProgram",
    "QuboInstance",
    "RegressionDataset",
    "RowSampler",
    "SAParams",
    "SolveResult",
    "StepRecord",
    "StoppingRule",
    "Trajectory",
    "UpdateMatrix",
    "build_qubo",
    "closed_form_optimum",
    "convergence_diagnostics",
    "dump_qubo",
    "exhaustive_solver",
    "generate_synthetic",
    "load_dataset",
    "load_qubo",
    "min_bits",
    "precision_vector",
    "run_adaptive",
    "run_fixed",
    "sa_solver",
    "save_dataset",
    "solve_exhaustive",
    "solve_sa",
    "step",
    "symmetrize",
]
