"""Fixed-scale refinement on a synthetic regression problem.

Two things to watch: a larger sampling scale descends faster early but
plateaus higher, and more selector bits per iteration buy a lower floor.
Run with: python3 demos/fixed_step_refinement.py (about 30 seconds)
"""

import numpy as np

from qcqo import (
    StoppingRule,
    closed_form_optimum,
    exhaustive_solver,
    generate_synthetic,
    run_fixed,
)

MILESTONES = [1, 10, 50, 100, 200, 300]


def main():
    ds = generate_synthetic(d=16, N=10_000, target_norm=100.0, seed=1)
    qp = ds.to_quadratic_program()
    w_star = closed_form_optimum(ds)
    print(f"dataset: d=16, N=10000, mse(0) = {ds.mse(np.zeros(16)):.4g}, mse(w*) = {ds.mse(w_star):.3e}")

    stop = StoppingRule(max_iterations=300)
    solver = exhaustive_solver()

    print()
    print("=== scale tradeoff at n = 16 ===")
    print("  iter      sigma=0.1      sigma=1.0")
    curves = {}
    for sigma in (0.1, 1.0):
        _, trajectory = run_fixed(qp, np.zeros(16), sigma, 16, solver, stop, seed=5)
        curves[sigma] = trajectory.loss
    for t in MILESTONES:
        print(f"  {t:4d}   {curves[0.1][t - 1]:12.5g}   {curves[1.0][t - 1]:12.5g}")
    print("  (large scale wins early, small scale wins late)")

    print()
    print("=== selector bits at sigma = 1.0 ===")
    print("     n    final mse (median of 5 seeds)")
    for n in (8, 16):
        finals = []
        for seed in range(5):
            _, trajectory = run_fixed(qp, np.zeros(16), 1.0, n, solver, stop, seed=seed)
            finals.append(trajectory.loss[-1])
        print(f"  {n:4d}    {np.median(finals):.5g}")


if __name__ == "__main__":
    main()
