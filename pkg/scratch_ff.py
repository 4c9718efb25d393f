import time

import numpy as np

from dropflow import flatflow
from dropflow.energy import AdhesionField
from dropflow.grid import HalfSpaceGrid, rasterize_box, signed_distance

# locality ladder on a corner set (box): d_max(tau) ~ K sqrt(tau)
h = 1.0 / 32
g = HalfSpaceGrid.cover(0.65, 0.8, h)
E0 = rasterize_box(g, (-0.45, 0.45), (-0.45, 0.45), (0.0, 0.6))
beta = AdhesionField.constant(g, 0.2)
sd0 = signed_distance(E0)
for taus in [(0.016, 0.008, 0.004), (0.02, 0.01, 0.005), (0.0125, 0.00625, 0.003125)]:
    ds = []
    for tau in taus:
        res = flatflow.minimize_step(E0, beta, tau, sd0=sd0)
        moved = res.minimal.bits != E0.bits
        d = float(np.max(np.abs(sd0.values[moved]))) if moved.any() else 0.0
        ds.append(d)
    ds = np.array(ds)
    K = ds / np.sqrt(taus)
    p = np.polyfit(np.log(taus), np.log(ds), 1)[0]
    print(f"taus={taus} d={np.round(ds,4)} K={np.round(K,3)} exponent={p:.3f}")

# gmm_refine hemisphere example
t0 = time.time()
rep = flatflow.gmm_refine({"kind": "cap", "rho": 0.6}, 0.0, tau0=0.015625, levels=3, T=0.04)
print("symdiff rows:", np.round(rep.symdiff, 5))
means = rep.symdiff.mean(axis=1)
v0 = rep.trajectories[0].sets[0].volume()
print(f"means={np.round(means,5)} decreasing={bool(np.all(np.diff(means) <= 1e-12))} "
      f"final_max={rep.symdiff[-1].max():.5f} vs 0.02|E0|={0.02*v0:.5f} time={time.time()-t0:.1f}s")
print("extinct:", rep.extinct, "hs:", rep.hs)
