import numpy as np
from dropflow.grid import HalfSpaceGrid, rasterize_cap, signed_distance

R0, h = 0.6, 1/24
grid = HalfSpaceGrid.cover(R0+10*h, R0+10*h, h, pad=5)
E = rasterize_cap(grid, R0)
sd = signed_distance(E)
x, y, z = grid.center_axes()
exact = np.sqrt(x*x + y*y + z*z) - R0
err = sd.values - exact
for b in [(0, 0.5), (0.5, 1.5), (1.5, 3.0), (3.0, 6.0)]:
    m = (np.abs(exact) >= b[0]*h) & (np.abs(exact) < b[1]*h)
    print(f"band {b}: n={m.sum():6d} mean_err={err[m].mean()/h:+.3f}h  rms={np.sqrt((err[m]**2).mean())/h:.3f}h  max={np.abs(err[m]).max()/h:.3f}h")
# split inside vs outside
for name, m in [("inside", exact < -0.5*h), ("outside", exact > 0.5*h)]:
    mm = m & (np.abs(exact) < 4*h)
    print(f"{name}: mean={err[mm].mean()/h:+.3f}h")
