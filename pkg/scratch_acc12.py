import time

import numpy as np

from dropflow import flatflow, mincut
from dropflow.energy import AdhesionField
from dropflow.grid import HalfSpaceGrid, rasterize_cap, signed_distance

# criterion 1 prototype: enumeration oracle
rng = np.random.default_rng(7)
t0 = time.time()
n_inst = 0
for trial in range(100):
    h = 1.0 / 12
    g = HalfSpaceGrid.cover(0.5, 0.7, h)
    rho = rng.uniform(0.2, 0.35)
    ch = rng.uniform(0.0, 0.3)
    E0 = rasterize_cap(g, rho, ch)
    bval = rng.uniform(-0.5, 0.5)
    beta = AdhesionField.constant(g, bval)
    tau = rng.uniform(0.005, 0.05)
    sd0 = signed_distance(E0)
    # free cells: random sample near the interface
    n_free = int(rng.integers(6, 21))
    band_cells = np.flatnonzero(np.abs(sd0.values.ravel()) < 2.5 * h)
    # exclude rim cells (build_cut_problem freezes them)
    mask = np.zeros(g.shape, bool).ravel()
    mask[rng.choice(band_cells, size=min(n_free, band_cells.size), replace=False)] = True
    mask = mask.reshape(g.shape)
    mask[:, :, 0] = mask[:, :, -1] = False
    mask[:, 0, :] = mask[:, -1, :] = False
    mask[-1, :, :] = False
    mask[0, :, :] = mask[0, :, :]  # bottom cells stay eligible
    if not mask.any():
        continue
    problem = flatflow.build_cut_problem(E0, beta, tau, free_mask=mask, sd0=sd0)
    n = problem.n_free
    sol = mincut.solve_binary_energy(
        n, problem.unary_q, problem.edge_a, problem.edge_b,
        flatflow.PAIR_WEIGHTS_Q[problem.edge_class],
    )
    codes = np.arange(1 << n, dtype=np.int64)
    X = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int64)
    w = flatflow.PAIR_WEIGHTS_Q[problem.edge_class]
    En = X @ problem.unary_q + ((X[:, problem.edge_a] != X[:, problem.edge_b]) * w).sum(axis=1)
    assert En.min() == sol.energy, (En.min(), sol.energy, n)
    opt = X[En == En.min()].astype(bool)
    assert np.array_equal(sol.minimal, np.logical_and.reduce(opt, axis=0))
    assert np.array_equal(sol.maximal, np.logical_or.reduce(opt, axis=0))
    n_inst += 1
print(f"criterion 1: {n_inst} instances exact, {time.time() - t0:.1f}s")

# criterion 2 prototype: interior ball r=1, tau=0.01, h=1/64
h = 1.0 / 64
tau = 0.01
t0 = time.time()
g = HalfSpaceGrid.cover(1.0 + 10 * h, 2.3 + 10 * h, h)
print("grid", g.shape, g.n_cells / 1e6, "Mcells")
E0 = rasterize_cap(g, 1.0, 1.15)
beta = AdhesionField.constant(g, 0.0)
t1 = time.time()
res = flatflow.minimize_step(E0, beta, tau)
t2 = time.time()
E = res.minimal
vol = E.volume()
rho_vol = (3.0 * vol / (4.0 * np.pi)) ** (1.0 / 3.0)
oracle = 0.5 * (1.0 + np.sqrt(1.0 - 8.0 * tau))
print(f"rho_vol={rho_vol:.5f} oracle={oracle:.5f} diff={abs(rho_vol-oracle)/h:.2f} cells")
print(f"rho^2={rho_vol**2:.5f} >= 1-5tau={1-5*tau:.5f}: {rho_vol**2 >= 1 - 5*tau}")
print(f"setup {t1-t0:.1f}s step {t2-t1:.1f}s stats {res.stats}")
