"""Binary quadratic minimization with the two bundled solvers.

The exhaustive backend certifies the minimum up to 25 variables; the
annealer scales past that but only samples. Run with:
python3 demos/qubo_solvers.py
"""

import tempfile
from pathlib import Path

import numpy as np

from qcqo import QuboInstance, SAParams, dump_qubo, load_qubo, solve_exhaustive, solve_sa


def main():
    print("=== certified minimum on a hand-sized instance ===")
    rng = np.random.default_rng(3)
    Q = rng.standard_normal((12, 12))
    instance = QuboInstance(Q=Q)
    exact = solve_exhaustive(instance)
    print(f"  n = {instance.n}, evaluations = {exact.num_evaluations}")
    print(f"  z* = {exact.z.astype(int)}")
    print(f"  E* = {exact.energy:.6f}")

    print()
    print("=== annealer on the same instance ===")
    for reads, sweeps in [(1, 10), (10, 100), (100, 1000)]:
        result = solve_sa(instance, SAParams(reads=reads, sweeps=sweeps), seed=0)
        gap = result.energy - exact.energy
        print(f"  reads={reads:4d} sweeps={sweeps:5d}  E = {result.energy:.6f}  gap = {gap:.2e}")

    print()
    print("=== past the exhaustive cap ===")
    big = QuboInstance(Q=rng.standard_normal((60, 60)))
    result = solve_sa(big, SAParams(reads=20, sweeps=400), seed=1)
    zero = 0.0
    print(f"  n = {big.n}: annealer found E = {result.energy:.4f} (empty assignment gives {zero})")

    print()
    print("=== text round trip ===")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "instance.qubo"
        dump_qubo(instance, path)
        loaded = load_qubo(path)
        print(f"  wrote {path.name}, first line: {path.read_text().splitlines()[0]!r}")
        print(f"  energies agree after reload: {np.allclose(loaded.Q, instance.Q)}")


if __name__ == "__main__":
    main()
