"""Quadratic losses, gradients, and the regression reduction.

Run with: python3 demos/quadratic_losses.py
"""

import numpy as np

from qcqo import QuadraticProgram, closed_form_optimum, generate_synthetic


def main():
    print("=== a tiny quadratic by hand ===")
    qp = QuadraticProgram(A=np.array([[2.0, 0.0], [0.0, 3.0]]), a=np.array([-4.0, 0.0]), c=5.0)
    for w in (np.zeros(2), np.array([1.0, 0.0]), np.array([1.0, 1.0])):
        print(f"  L({w}) = {qp.loss(w):.4f}   grad = {qp.gradient(w)}")
    print(f"  operator norm of A: {qp.spectral_norm():.4f}")
    print(f"  stationary point from the gradient: w* = {np.linalg.solve(2 * qp.A, -qp.a)}")

    print()
    print("=== least squares as the same object ===")
    ds = generate_synthetic(d=8, N=2_000, target_norm=100.0, seed=11)
    qp = ds.to_quadratic_program()
    w_star = closed_form_optimum(ds)
    print(f"  dataset: d={ds.d}, N={ds.N}, planted |w| = {np.linalg.norm(ds.w_true):.1f}")
    print(f"  mse(0)      = {ds.mse(np.zeros(8)):.6g}")
    print(f"  loss(0)     = {qp.loss(np.zeros(8)):.6g}   (identical by construction)")
    print(f"  mse(w*)     = {ds.mse(w_star):.3e}")
    print(f"  |w* - true| = {np.linalg.norm(w_star - ds.w_true):.3e}")


if __name__ == "__main__":
    main()
