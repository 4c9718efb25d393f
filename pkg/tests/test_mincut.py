"""Exact min-cut solver against brute-force enumeration on small instances."""

import numpy as np
import pytest

from dropflow.mincut import solve_binary_energy


def _enumerate(n, unary, ea, eb, w):
    codes = np.arange(1 << n, dtype=np.int64)
    X = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int64)
    energies = X @ unary
    if ea.size:
        energies = energies + ((X[:, ea] != X[:, eb]) * w).sum(axis=1)
    best = energies.min()
    opt = X[energies == best].astype(bool)
    # the optimal family of a submodular energy is a lattice; its extremes
    # are the intersection and union of all optimal sets
    return int(best), np.logical_and.reduce(opt, axis=0), np.logical_or.reduce(opt, axis=0)


def _random_instance(rng, n):
    unary = rng.integers(-60, 60, size=n).astype(np.int64)
    pairs = set()
    for _ in range(rng.integers(n, 3 * n)):
        a, b = rng.integers(0, n, 2)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    pairs = sorted(pairs)
    ea = np.array([p[0] for p in pairs], np.int32)
    eb = np.array([p[1] for p in pairs], np.int32)
    w = rng.integers(1, 25, size=len(pairs)).astype(np.int64)
    return unary, ea, eb, w


def test_solver_matches_enumeration(rng):
    for _ in range(60):
        n = int(rng.integers(3, 13))
        unary, ea, eb, w = _random_instance(rng, n)
        sol = solve_binary_energy(n, unary, ea, eb, w)
        best, lo, hi = _enumerate(n, unary, ea, eb, w)
        assert sol.energy == best
        assert np.array_equal(sol.minimal, lo)
        assert np.array_equal(sol.maximal, hi)
        assert np.all(sol.minimal <= sol.maximal)


def test_solver_handles_edgeless_instances(rng):
    n = 6
    unary = np.array([-5, 3, 0, -1, 7, -2], np.int64)
    empty = np.empty(0, np.int32)
    sol = solve_binary_energy(n, unary, empty, empty, np.empty(0, np.int64))
    # zero unaries are ties: minimal drops them, maximal keeps them
    assert sol.minimal.tolist() == [True, False, False, True, False, True]
    assert sol.maximal.tolist() == [True, False, True, True, False, True]
    assert sol.energy == -8


def test_solver_is_deterministic(rng):
    unary, ea, eb, w = _random_instance(rng, 10)
    a = solve_binary_energy(10, unary, ea, eb, w)
    b = solve_binary_energy(10, unary, ea, eb, w)
    assert a.energy == b.energy
    assert np.array_equal(a.minimal, b.minimal)
    assert np.array_equal(a.maximal, b.maximal)


def test_solver_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        solve_binary_energy(
            2,
            np.array([1, -1], np.int64),
            np.array([0], np.int32),
            np.array([1], np.int32),
            np.array([0], np.int64),
        )
