"""Random update rows and the averaged-step law.

Averaging the n rows of a Gaussian update matrix halves the mean and
shrinks the covariance by n/4, so a target step variance pins the row
variance at 4*sigma/n. Run with: python3 demos/step_sampling.py
"""

import numpy as np

from qcqo import RowSampler, UpdateMatrix


def main():
    print("=== one sampled update matrix ===")
    sampler = RowSampler(d=3, n=4, mu=np.array([0.5, 0.0, -0.5]), row_variance=1.0)
    update = sampler.sample(seed=42)
    print(f"  R has shape {update.R.shape}; selecting z = (1,0,1,0) moves the iterate by")
    print(f"  {update.step(np.array([1.0, 0.0, 1.0, 0.0]))}")
    print(f"  averaged step (z = all ones, halved): {update.average_step()}")

    print()
    print("=== closed-form moments vs 200k draws ===")
    mean, cov = sampler.step_moments()
    draws = sampler.sample_batch(200_000, seed=7)
    steps = 0.5 * draws.sum(axis=1)
    print(f"  predicted mean {mean}")
    print(f"  empirical mean {np.round(steps.mean(axis=0), 4)}")
    print(f"  predicted cov diagonal {np.diag(cov)}")
    print(f"  empirical cov diagonal {np.round(np.diag(np.cov(steps.T)), 4)}")

    print()
    print("=== hitting a requested step variance ===")
    for n in (4, 16, 64):
        tuned = RowSampler.for_target_step(sigma=1.0, n=n, d=3)
        _, cov = tuned.step_moments()
        print(f"  n={n:3d}: row_variance = {tuned.row_variance:.4f}  ->  step cov diag = {np.diag(cov)}")


if __name__ == "__main__":
    main()
