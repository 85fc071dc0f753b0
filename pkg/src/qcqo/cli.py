"""Command line for the refinement experiments.

Subcommands: ``generate`` writes a synthetic regression dataset, ``run``
executes a multi-run experiment from a JSON config plus flag overrides,
``qubits`` tabulates explicit weight-encoding budgets against the
per-iteration selector size, and ``diagnose`` writes per-iteration
convergence diagnostics for a single recorded run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .linreg import (
    closed_form_optimum,
    generate_synthetic,
    load_dataset,
    min_bits,
    save_dataset,
)
from .optimizer import StoppingRule, convergence_diagnostics, run_adaptive, run_fixed
from .qubo import DEFAULT_EXHAUSTIVE_CAP, SAParams, exhaustive_solver, sa_solver

OUT_DIR_ENV = "QCQO_OUT_DIR"

RUN_CSV_HEADER = "t,mse,dist_wstar,sigma,step_norm,qubo_energy"
AGGREGATE_CSV_HEADER = "t,mse_median,mse_mean,dist_median,sigma_median"
DIAGNOSTICS_CSV_HEADER = (
    "t,gap,resid_grad,resid_half,corr_grad,corr_half,"
    "bound_grad,bound_grad_sq,bound_half,bound_half_sq"
)


class CliError(Exception):
    """Invalid arguments or configuration; maps to exit code 2."""


def _default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "results"))


def _format(value: float) -> str:
    return f"{value:.10g}"


@dataclass
class ExperimentConfig:
    """Everything one experiment needs, JSON-compatible.

    A dataset is either loaded from ``dataset_path`` or generated from
    (d, N, target_norm, data_seed, noise_std). Run r uses seed + r, so runs
    are independent and the whole experiment replays bit-identically.
    """

    dataset_path: str | None = None
    d: int = 16
    N: int = 10000
    target_norm: float = 100.0
    data_seed: int = 1
    noise_std: float = 0.0
    algorithm: str = "fixed"
    n: int = 16
    sigma: float | None = None
    window: int | None = None
    solver: str = "exhaustive"
    sa_reads: int = 100
    sa_sweeps: int = 1000
    sa_t_init: float | None = None
    sa_t_final: float | None = None
    iterations: int = 1000
    runs: int = 10
    seed: int = 0
    jobs: int = 1
    out: str | None = None

    def validate(self) -> None:
        if self.algorithm not in ("fixed", "adaptive"):
            raise CliError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == "fixed":
            if self.sigma is None:
                raise CliError("fixed mode requires sigma (flag --sigma or config key)")
            if self.sigma <= 0.0:
                raise CliError("sigma must be positive")
        if self.algorithm == "adaptive":
            if self.window is None:
                raise CliError("adaptive mode requires a window (flag --T or config key)")
            if self.window < 1:
                raise CliError("window T must be at least 1")
        if self.solver not in ("exhaustive", "sa"):
            raise CliError(f"unknown solver {self.solver!r}")
        if self.n < 1:
            raise CliError("n must be at least 1")
        if self.solver == "exhaustive" and self.n > DEFAULT_EXHAUSTIVE_CAP:
            raise CliError(
                f"n={self.n} exceeds the exhaustive solver cap of "
                f"{DEFAULT_EXHAUSTIVE_CAP}; use the sa solver"
            )
        if self.iterations < 0:
            raise CliError("iterations must be nonnegative")
        if self.runs < 1:
            raise CliError("runs must be at least 1")
        if self.jobs < 1:
            raise CliError("jobs must be at least 1")
        try:
            self.sa_params()
        except ValueError as error:
            raise CliError(f"invalid sa parameters: {error}") from error

    def sa_params(self) -> SAParams:
        return SAParams(
            reads=self.sa_reads,
            sweeps=self.sa_sweeps,
            t_init=self.sa_t_init,
            t_final=self.sa_t_final,
        )

    def make_dataset(self):
        if self.dataset_path is not None:
            return load_dataset(self.dataset_path)
        return generate_synthetic(
            d=self.d,
            N=self.N,
            target_norm=self.target_norm,
            seed=self.data_seed,
            noise_std=self.noise_std,
        )

    def make_solver(self):
        if self.solver == "exhaustive":
            return exhaustive_solver()
        return sa_solver(self.sa_params())

    def initial_sigma(self) -> float:
        return float(self.sigma) if self.algorithm == "fixed" else 1.0


_DATASET_KEYS = {"path", "d", "N", "target_norm", "seed", "noise_std"}
_SA_KEYS = {"reads", "sweeps", "t_init", "t_final"}
_TOP_KEYS = {
    "dataset",
    "algorithm",
    "n",
    "sigma",
    "T",
    "solver",
    "sa",
    "iterations",
    "runs",
    "seed",
    "jobs",
    "out",
}


def _apply_config_file(cfg: ExperimentConfig, path: Path) -> None:
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as error:
        raise CliError(f"config file not found: {path}") from error
    except json.JSONDecodeError as error:
        raise CliError(f"config file is not valid JSON: {error}") from error
    if not isinstance(raw, dict):
        raise CliError("config file must hold a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}")
    dataset = raw.get("dataset", {})
    if not isinstance(dataset, dict):
        raise CliError("config key 'dataset' must be an object")
    unknown = set(dataset) - _DATASET_KEYS
    if unknown:
        raise CliError(f"unknown dataset keys: {sorted(unknown)}")
    if "path" in dataset and len(set(dataset) - {"path"}) > 0:
        raise CliError("dataset takes either a path or generation parameters")
    sa = raw.get("sa", {})
    if not isinstance(sa, dict):
        raise CliError("config key 'sa' must be an object")
    unknown = set(sa) - _SA_KEYS
    if unknown:
        raise CliError(f"unknown sa keys: {sorted(unknown)}")

    cfg.dataset_path = dataset.get("path", cfg.dataset_path)
    cfg.d = dataset.get("d", cfg.d)
    cfg.N = dataset.get("N", cfg.N)
    cfg.target_norm = dataset.get("target_norm", cfg.target_norm)
    cfg.data_seed = dataset.get("seed", cfg.data_seed)
    cfg.noise_std = dataset.get("noise_std", cfg.noise_std)
    cfg.algorithm = raw.get("algorithm", cfg.algorithm)
    cfg.n = raw.get("n", cfg.n)
    cfg.sigma = raw.get("sigma", cfg.sigma)
    cfg.window = raw.get("T", cfg.window)
    cfg.solver = raw.get("solver", cfg.solver)
    cfg.sa_reads = sa.get("reads", cfg.sa_reads)
    cfg.sa_sweeps = sa.get("sweeps", cfg.sa_sweeps)
    cfg.sa_t_init = sa.get("t_init", cfg.sa_t_init)
    cfg.sa_t_final = sa.get("t_final", cfg.sa_t_final)
    cfg.iterations = raw.get("iterations", cfg.iterations)
    cfg.runs = raw.get("runs", cfg.runs)
    cfg.seed = raw.get("seed", cfg.seed)
    cfg.jobs = raw.get("jobs", cfg.jobs)
    cfg.out = raw.get("out", cfg.out)


_RUN_OVERRIDES = {
    "dataset": "dataset_path",
    "d": "d",
    "rows": "N",
    "target_norm": "target_norm",
    "data_seed": "data_seed",
    "noise_std": "noise_std",
    "algorithm": "algorithm",
    "n": "n",
    "sigma": "sigma",
    "T": "window",
    "solver": "solver",
    "sa_reads": "sa_reads",
    "sa_sweeps": "sa_sweeps",
    "sa_t_init": "sa_t_init",
    "sa_t_final": "sa_t_final",
    "iters": "iterations",
    "runs": "runs",
    "seed": "seed",
    "jobs": "jobs",
    "out": "out",
}


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None) is not None:
        _apply_config_file(cfg, Path(args.config))
    for flag, name in _RUN_OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, name, value)
    cfg.validate()
    return cfg


def _add_experiment_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--dataset", help="load the dataset from this CSV")
    parser.add_argument("--d", type=int, help="synthetic dataset dimension")
    parser.add_argument("--rows", type=int, help="synthetic dataset row count N")
    parser.add_argument("--target-norm", dest="target_norm", type=float)
    parser.add_argument("--data-seed", dest="data_seed", type=int)
    parser.add_argument("--noise-std", dest="noise_std", type=float)
    parser.add_argument("--algorithm", choices=["fixed", "adaptive"])
    parser.add_argument("--n", type=int, help="selector bits per iteration")
    parser.add_argument("--sigma", type=float, help="fixed-mode sampling scale")
    parser.add_argument("--T", type=int, help="adaptive-mode window length")
    parser.add_argument("--solver", choices=["exhaustive", "sa"])
    parser.add_argument("--sa-reads", dest="sa_reads", type=int)
    parser.add_argument("--sa-sweeps", dest="sa_sweeps", type=int)
    parser.add_argument("--sa-t-init", dest="sa_t_init", type=float)
    parser.add_argument("--sa-t-final", dest="sa_t_final", type=float)
    parser.add_argument("--iters", type=int, help="iterations per run")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--out", help="output location")


def _execute_run(payload: tuple[dict, int]) -> dict:
    """One experiment run; a top-level function so worker processes can run it."""
    cfg_dict, run_index = payload
    cfg = ExperimentConfig(**cfg_dict)
    seed = cfg.seed + run_index
    try:
        ds = cfg.make_dataset()
        qp = ds.to_quadratic_program()
        w_star = closed_form_optimum(ds)
        solver = cfg.make_solver()
        stop = StoppingRule(max_iterations=cfg.iterations)
        w0 = np.zeros(ds.d)
        if cfg.algorithm == "fixed":
            _, trajectory = run_fixed(
                qp, w0, cfg.sigma, cfg.n, solver, stop, seed, w_star=w_star
            )
        else:
            _, trajectory = run_adaptive(
                qp, w0, cfg.n, cfg.window, solver, stop, seed, w_star=w_star
            )
    except Exception as error:  # a solver failure loses one run, not the sweep
        return {"index": run_index, "seed": seed, "status": "failed", "error": str(error)}
    return {
        "index": run_index,
        "seed": seed,
        "status": "ok",
        "mse": trajectory.loss,
        "dist": trajectory.dist_opt,
        "sigma": trajectory.sigma,
        "step_norm": trajectory.step_norm,
        "qubo_energy": trajectory.qubo_energy,
    }


def _write_run_csv(
    path: Path, result: dict, mse0: float, dist0: float, sigma0: float
) -> None:
    lines = [RUN_CSV_HEADER]
    lines.append(
        "0," + ",".join(_format(v) for v in (mse0, dist0, sigma0, 0.0, 0.0))
    )
    for i in range(len(result["mse"])):
        row = (
            result["mse"][i],
            result["dist"][i],
            result["sigma"][i],
            result["step_norm"][i],
            result["qubo_energy"][i],
        )
        lines.append(f"{i + 1}," + ",".join(_format(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_aggregate_csv(path: Path, succeeded: list[dict], iterations: int) -> None:
    lines = [AGGREGATE_CSV_HEADER]
    if succeeded and iterations > 0:
        mse = np.stack([r["mse"] for r in succeeded])
        dist = np.stack([r["dist"] for r in succeeded])
        sigma = np.stack([r["sigma"] for r in succeeded])
        mse_median = np.median(mse, axis=0)
        mse_mean = np.mean(mse, axis=0)
        dist_median = np.median(dist, axis=0)
        sigma_median = np.median(sigma, axis=0)
        for i in range(iterations):
            row = (mse_median[i], mse_mean[i], dist_median[i], sigma_median[i])
            lines.append(f"{i + 1}," + ",".join(_format(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    out_dir = Path(cfg.out) if cfg.out is not None else _default_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    try:
        ds = cfg.make_dataset()
        w_star = closed_form_optimum(ds)
    except (ValueError, OSError, np.linalg.LinAlgError) as error:
        raise CliError(f"could not prepare the dataset: {error}") from error
    w0 = np.zeros(ds.d)
    mse0 = ds.mse(w0)
    dist0 = float(np.linalg.norm(w0 - w_star))
    cfg_dict = asdict(cfg)
    payloads = [(cfg_dict, r) for r in range(cfg.runs)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_execute_run, payloads))
    else:
        results = [_execute_run(p) for p in payloads]
    succeeded = [r for r in results if r["status"] == "ok"]
    for result in succeeded:
        _write_run_csv(
            out_dir / f"run_{result['index']:03d}.csv",
            result,
            mse0,
            dist0,
            cfg.initial_sigma(),
        )
    _write_aggregate_csv(out_dir / "aggregate.csv", succeeded, cfg.iterations)
    summary = {
        "config": cfg_dict,
        "initial_mse": mse0,
        "optimal_mse": ds.mse(w_star),
        "wall_seconds": time.monotonic() - started,
        "aggregate_over": len(succeeded),
        "runs": [
            {
                "index": r["index"],
                "seed": r["seed"],
                "status": r["status"],
                "final_mse": float(r["mse"][-1]) if r["status"] == "ok" and len(r["mse"]) else None,
                "error": r.get("error"),
            }
            for r in results
        ],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    failed = len(results) - len(succeeded)
    print(f"wrote {len(succeeded)} run(s) to {out_dir}" + (f"; {failed} failed" if failed else ""))
    return 0 if failed == 0 else 3


def _cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out) if args.out else _default_out_dir() / "dataset.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        ds = generate_synthetic(
            d=args.d,
            N=args.rows,
            target_norm=args.target_norm,
            seed=args.seed,
            noise_std=args.noise_std,
        )
    except ValueError as error:
        raise CliError(str(error)) from error
    save_dataset(ds, out, seed=args.seed)
    print(f"wrote {ds.N}x{ds.d} dataset to {out}")
    return 0


def _cmd_qubits(args: argparse.Namespace) -> int:
    try:
        epsilons = [float(text) for text in args.eps.split(",") if text]
    except ValueError as error:
        raise CliError(f"could not parse --eps: {error}") from error
    if not epsilons:
        raise CliError("--eps needs at least one value")
    if args.d < 1 or args.n < 1:
        raise CliError("--d and --n must be at least 1")
    rows = []
    for eps in epsilons:
        try:
            bits = min_bits(eps)
        except ValueError as error:
            raise CliError(str(error)) from error
        rows.append((eps, bits, args.d * bits, args.n))
    header = ("epsilon", "bits_per_weight", "explicit_qubits", "selector_qubits_per_iteration")
    widths = [max(len(header[i]), 14) for i in range(4)]
    print("  ".join(header[i].ljust(widths[i]) for i in range(4)))
    for row in rows:
        cells = (f"{row[0]:g}", str(row[1]), str(row[2]), str(row[3]))
        print("  ".join(cells[i].ljust(widths[i]) for i in range(4)))
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [",".join(header)]
        lines.extend(f"{eps:g},{bits},{total},{n}" for eps, bits, total, n in rows)
        path.write_text("\n".join(lines) + "\n")
        print(f"wrote {path}")
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.out) if cfg.out is not None else _default_out_dir() / "diagnostics.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        ds = cfg.make_dataset()
        w_star = closed_form_optimum(ds)
    except (ValueError, OSError, np.linalg.LinAlgError) as error:
        raise CliError(f"could not prepare the dataset: {error}") from error
    qp = ds.to_quadratic_program()
    solver = cfg.make_solver()
    stop = StoppingRule(max_iterations=cfg.iterations)
    w0 = np.zeros(ds.d)
    if cfg.algorithm == "fixed":
        _, trajectory = run_fixed(
            qp, w0, cfg.sigma, cfg.n, solver, stop, cfg.seed,
            w_star=w_star, record_steps=True,
        )
    else:
        _, trajectory = run_adaptive(
            qp, w0, cfg.n, cfg.window, solver, stop, cfg.seed,
            w_star=w_star, record_steps=True,
        )
    report = convergence_diagnostics(qp, trajectory, w_star)
    lines = [DIAGNOSTICS_CSV_HEADER]
    for i in range(len(report)):
        row = (
            report.gap[i],
            report.resid_grad[i],
            report.resid_half[i],
            report.corr_grad[i],
            report.corr_half[i],
            report.bound_grad[i],
            report.bound_grad_sq[i],
            report.bound_half[i],
            report.bound_half_sq[i],
        )
        lines.append(f"{i + 1}," + ",".join(_format(v) for v in row))
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(report)} diagnostic rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcqo",
        description="Continuous quadratic minimization via small binary subproblems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="write a synthetic dataset CSV")
    generate.add_argument("--d", type=int, required=True)
    generate.add_argument("--rows", type=int, required=True)
    generate.add_argument("--target-norm", dest="target_norm", type=float, default=100.0)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--noise-std", dest="noise_std", type=float, default=0.0)
    generate.add_argument("--out")
    generate.set_defaults(handler=_cmd_generate)

    run = commands.add_parser("run", help="execute a multi-run experiment")
    _add_experiment_args(run)
    run.add_argument("--runs", type=int, help="independent runs")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.set_defaults(handler=_cmd_run)

    qubits = commands.add_parser("qubits", help="explicit-encoding qubit budgets")
    qubits.add_argument("--d", type=int, required=True)
    qubits.add_argument("--eps", default="0.25,0.05,0.005")
    qubits.add_argument("--n", type=int, default=16)
    qubits.add_argument("--out")
    qubits.set_defaults(handler=_cmd_qubits)

    diagnose = commands.add_parser("diagnose", help="convergence diagnostics for one run")
    _add_experiment_args(diagnose)
    diagnose.set_defaults(handler=_cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
