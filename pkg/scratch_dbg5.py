import numpy as np
from dropflow.grid import HalfSpaceGrid, rasterize_box, rasterize_cap, signed_distance
from dropflow.energy import AdhesionField
from dropflow.flatflow import minimize_step

h = 1/64
g1 = HalfSpaceGrid.cover(0.65, 0.8, h, pad=5)
box = rasterize_box(g1, (-0.45, 0.45), (-0.45, 0.45), (0.0, 0.6))
beta = AdhesionField.constant(g1, 0.2)
sd0 = signed_distance(box)
for tau in (0.04, 0.01, 0.0025):
    res = minimize_step(box, beta, tau, sd0=sd0)
    Em = res.minimal
    flipped = Em.bits != box.bits
    vals = np.abs(sd0.values[flipped])
    d = vals.max()
    # where is the max?
    idx = np.argwhere(flipped & (np.abs(sd0.values) > d - 1.5*h))
    pts = np.array([g1.cell_center(tuple(i)) for i in idx[:6]]) if hasattr(g1, "cell_center") else None
    # fallback: compute centers manually
    ox = g1.origin[0] if hasattr(g1, "origin") else None
    print(f"tau={tau}: d={d:.4f} ({d/np.sqrt(tau):.2f} sqrt(tau)), n_flip={flipped.sum()}",
          "added:", int((Em.bits & ~box.bits).sum()), "removed:", int((box.bits & ~Em.bits).sum()))
    print("   deep flip idx (i,j,k):", [tuple(int(v) for v in i) for i in idx[:8]])
    # direction: was the deep cell inside or outside E0?
    for i in idx[:4]:
        t = tuple(i)
        print("    inside_E0:", bool(box.bits[t]), " sd0:", float(sd0.values[t]))
