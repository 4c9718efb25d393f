import numpy as np
from dropflow.grid import HalfSpaceGrid, rasterize_cap
from dropflow.energy import AdhesionField
from dropflow.flatflow import minimize_step, run_flat_flow

# (a) tie degeneracy: minimal vs maximal over the same 6-step run
R0, h = 0.6, 1/24
tau = 4*h*h
grid = HalfSpaceGrid.cover(R0+10*h, R0+10*h, h, pad=5)
E0 = rasterize_cap(grid, R0)
beta = AdhesionField.constant(grid, 0.0)
for ext in ("minimal", "maximal"):
    traj = run_flat_flow(E0, beta, tau, 6, extremal=ext)
    rhos = [(3*traj.set_at(k).volume()/(2*np.pi))**(1/3) for k in range(7)]
    print(ext, " ".join(f"{r:.4f}" for r in rhos))
print("exact  ", " ".join(f"{np.sqrt(R0*R0-4*k*tau):.4f}" for k in range(7)))

# (b) one-step overshoot vs tau/h^2 ratio, unit ball interior
h2 = 1/32
grid2 = HalfSpaceGrid.cover(1.0+8*h2, 2.3, h2, pad=4)
beta2 = AdhesionField.constant(grid2, 0.0)
E1 = rasterize_cap(grid2, 1.0, center_height=1.15)
for mult in (41, 16, 8, 4, 2):
    tau2 = mult*h2*h2
    res = minimize_step(E1, beta2, tau2)
    for name, Em in (("min", res.minimal), ("max", res.maximal)):
        rho = (3*Em.volume()/(4*np.pi))**(1/3)
        delta = 1.0 - rho
        oracle = 0.5*(1.0 - np.sqrt(1.0 - 8*tau2))
        print(f"tau={mult:4.0f}h^2  {name}  delta={delta:.5f} oracle={oracle:.5f} ratio={delta/oracle:.3f}")
