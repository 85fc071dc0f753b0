"""QUBO energies, the exhaustive and annealing solvers, and the dump format."""

import numpy as np
import pytest

from qcqo import (
    QuboInstance,
    SAParams,
    dump_qubo,
    exhaustive_solver,
    load_qubo,
    sa_solver,
    solve_exhaustive,
    solve_sa,
)


def enumerate_assignments(n):
    """(2^n, n) matrix of every binary assignment, z_1 as the LSB of the row index."""
    ints = np.arange(1 << n, dtype=np.uint64)[:, None]
    return ((ints >> np.arange(n, dtype=np.uint64)[None, :]) & 1).astype(np.float64)


def brute_force_min(instance):
    """Independent oracle: scan all assignments, first minimum wins."""
    Z = enumerate_assignments(instance.n)
    energies = np.einsum("zi,ij,zj->z", Z, instance.Q, Z)
    best = int(energies.argmin())
    return Z[best].astype(np.int8), float(energies[best])


def random_symmetric(rng, n, scale=1.0):
    Q = rng.standard_normal((n, n)) * scale
    return (Q + Q.T) / 2.0


class TestQuboInstance:
    def test_diagonal_energy(self):
        q = QuboInstance(Q=np.diag([1.0, -2.0]))
        assert q.energy(np.array([1, 1])) == -1.0

    def test_zero_assignment(self):
        rng = np.random.default_rng(0)
        q = QuboInstance(random_symmetric(rng, 5))
        assert q.energy(np.zeros(5)) == 0.0

    def test_off_diagonal_coupling(self):
        q = QuboInstance(Q=np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert q.energy(np.array([1, 1])) == 2.0
        assert q.energy(np.array([1, 0])) == 0.0

    def test_energy_matches_double_sum(self):
        rng = np.random.default_rng(1)
        q = QuboInstance(random_symmetric(rng, 7))
        for _ in range(25):
            z = rng.integers(0, 2, size=7)
            expected = sum(
                q.Q[i, j] * z[i] * z[j] for i in range(7) for j in range(7)
            )
            assert q.energy(z) == pytest.approx(expected, abs=1e-12)

    def test_symmetrization_preserves_energies(self):
        rng = np.random.default_rng(2)
        raw = rng.standard_normal((6, 6))
        q = QuboInstance(raw)
        assert np.array_equal(q.Q, q.Q.T)
        for _ in range(20):
            z = rng.integers(0, 2, size=6).astype(float)
            assert q.energy(z) == pytest.approx(float(z @ raw @ z), abs=1e-12)

    def test_rejects_bad_assignments(self):
        q = QuboInstance(np.eye(3))
        with pytest.raises(ValueError):
            q.energy(np.array([0, 1]))
        with pytest.raises(ValueError):
            q.energy(np.array([0, 1, 2]))
        with pytest.raises(ValueError):
            q.energy(np.array([0.5, 0.0, 1.0]))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            QuboInstance(np.zeros((2, 3)))


class TestExhaustive:
    def test_all_negative_diagonal(self):
        result = solve_exhaustive(QuboInstance(np.diag([-1.0, -1.0])))
        assert np.array_equal(result.z, [1, 1])
        assert result.energy == -2.0
        assert result.num_evaluations == 4

    def test_all_positive_diagonal(self):
        result = solve_exhaustive(QuboInstance(np.diag([1.0, 1.0])))
        assert np.array_equal(result.z, [0, 0])
        assert result.energy == 0.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 3, 5, 8, 11, 12):
            for _ in range(3):
                q = QuboInstance(random_symmetric(rng, n, scale=float(rng.uniform(0.1, 5.0))))
                result = solve_exhaustive(q)
                z_expected, e_expected = brute_force_min(q)
                assert result.energy == pytest.approx(e_expected, abs=1e-9)
                assert np.array_equal(result.z, z_expected)

    def test_beats_random_sampling(self):
        rng = np.random.default_rng(4)
        q = QuboInstance(random_symmetric(rng, 12))
        result = solve_exhaustive(q)
        samples = rng.integers(0, 2, size=(10_000, 12)).astype(float)
        sampled_best = np.einsum("zi,ij,zj->z", samples, q.Q, samples).min()
        assert result.energy <= sampled_best + 1e-12

    def test_tie_breaks_toward_smallest_uint(self):
        # three assignments tie at -1; (1,0) reads as the smallest integer
        q = QuboInstance(np.array([[-1.0, 0.5], [0.5, -1.0]]))
        result = solve_exhaustive(q)
        assert np.array_equal(result.z, [1, 0])
        # all-zero weights tie everywhere; the all-zero assignment wins
        result = solve_exhaustive(QuboInstance(np.zeros((4, 4))))
        assert np.array_equal(result.z, [0, 0, 0, 0])

    def test_energy_recomputed_from_assignment(self):
        rng = np.random.default_rng(5)
        q = QuboInstance(random_symmetric(rng, 9))
        result = solve_exhaustive(q)
        assert result.energy == q.energy(result.z)

    def test_respects_cap(self):
        with pytest.raises(ValueError):
            solve_exhaustive(QuboInstance(np.zeros((26, 26))))
        with pytest.raises(ValueError):
            solve_exhaustive(QuboInstance(np.zeros((5, 5))), max_bits=4)

    def test_moderately_large_instance(self):
        rng = np.random.default_rng(6)
        q = QuboInstance(random_symmetric(rng, 18))
        result = solve_exhaustive(q)
        samples = rng.integers(0, 2, size=(5_000, 18)).astype(float)
        sampled_best = np.einsum("zi,ij,zj->z", samples, q.Q, samples).min()
        assert result.energy <= sampled_best


class TestSimulatedAnnealing:
    def test_positive_diagonal_always_solved(self):
        # every restart greedily clears bits, so the zero optimum is certain
        q = QuboInstance(np.diag([2.0, 1.0, 3.0, 0.5]))
        for seed in range(5):
            result = solve_sa(q, SAParams(reads=2, sweeps=10), seed=seed)
            assert np.array_equal(result.z, [0, 0, 0, 0])
            assert result.energy == 0.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(7)
        q = QuboInstance(random_symmetric(rng, 15))
        params = SAParams(reads=10, sweeps=100)
        first = solve_sa(q, params, seed=42)
        second = solve_sa(q, params, seed=42)
        assert np.array_equal(first.z, second.z)
        assert first.energy == second.energy

    def test_finds_exhaustive_optimum_usually(self):
        # default-scale parameters should hit the global optimum on nearly
        # every moderate instance
        rng = np.random.default_rng(8)
        hits = 0
        for trial in range(100):
            q = QuboInstance(random_symmetric(rng, 12))
            exact = solve_exhaustive(q).energy
            found = solve_sa(q, SAParams(reads=100, sweeps=1000), seed=trial).energy
            hits += abs(found - exact) <= 1e-9
        assert hits >= 95

    def test_large_instance_beats_random_sampling(self):
        rng = np.random.default_rng(9)
        q = QuboInstance(random_symmetric(rng, 64))
        result = solve_sa(q, SAParams(reads=20, sweeps=200), seed=0)
        samples = rng.integers(0, 2, size=(10_000, 64)).astype(float)
        sampled_best = np.einsum("zi,ij,zj->z", samples, q.Q, samples).min()
        assert result.energy <= sampled_best

    def test_energy_recomputed_from_assignment(self):
        rng = np.random.default_rng(10)
        q = QuboInstance(random_symmetric(rng, 20))
        result = solve_sa(q, SAParams(reads=5, sweeps=50), seed=1)
        assert result.energy == q.energy(result.z)
        assert result.num_evaluations == 250

    def test_never_beats_certified_minimum(self):
        # the exhaustive result is a true argmin, so any annealer energy is
        # bounded below by it on the same instance
        rng = np.random.default_rng(14)
        for trial in range(30):
            q = QuboInstance(random_symmetric(rng, 10))
            floor = solve_exhaustive(q).energy
            found = solve_sa(q, SAParams(reads=2, sweeps=10), seed=trial).energy
            assert found >= floor - 1e-9

    def test_zero_matrix_instance(self):
        result = solve_sa(QuboInstance(np.zeros((6, 6))), SAParams(reads=2, sweeps=5), seed=0)
        assert result.energy == 0.0

    def test_explicit_temperatures(self):
        q = QuboInstance(np.diag([-1.0, 2.0]))
        result = solve_sa(q, SAParams(reads=4, sweeps=50, t_init=5.0, t_final=0.01), seed=3)
        assert result.energy == -1.0

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            SAParams(reads=0)
        with pytest.raises(ValueError):
            SAParams(sweeps=0)
        with pytest.raises(ValueError):
            SAParams(t_init=1.0)
        with pytest.raises(ValueError):
            SAParams(t_init=0.1, t_final=1.0)
        with pytest.raises(ValueError):
            SAParams(t_init=1.0, t_final=0.0)


class TestSolverCallables:
    def test_exhaustive_ignores_seed(self):
        rng = np.random.default_rng(11)
        q = QuboInstance(random_symmetric(rng, 8))
        solve = exhaustive_solver()
        a = solve(q, 0)
        b = solve(q, 12345)
        assert np.array_equal(a.z, b.z) and a.energy == b.energy

    def test_exhaustive_cap_override(self):
        solve = exhaustive_solver(max_bits=6)
        with pytest.raises(ValueError):
            solve(QuboInstance(np.zeros((7, 7))), 0)

    def test_sa_uses_seed(self):
        rng = np.random.default_rng(12)
        q = QuboInstance(random_symmetric(rng, 10))
        solve = sa_solver(SAParams(reads=3, sweeps=30))
        assert solve(q, 5).energy == solve(q, 5).energy


class TestDumpFormat:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        Q = random_symmetric(rng, 6)
        Q[Q < 0.3] = 0.0  # keep some structural zeros out of the dump
        q = QuboInstance(Q)
        path = tmp_path / "instance.qubo"
        dump_qubo(q, path)
        loaded = load_qubo(path)
        assert np.array_equal(loaded.Q, q.Q)

    def test_format_shape(self, tmp_path):
        q = QuboInstance(np.array([[1.0, 0.5], [0.5, 0.0]]))
        path = tmp_path / "instance.qubo"
        dump_qubo(q, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "2"
        entries = [line.split() for line in lines[1:]]
        assert [(int(i), int(j)) for i, j, _ in entries] == [(0, 0), (0, 1)]
        assert float(entries[1][2]) == 0.5
