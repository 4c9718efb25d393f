import numpy as np
from dropflow.grid import HalfSpaceGrid, rasterize_cap, hausdorff
from dropflow.energy import AdhesionField
from dropflow.flatflow import run_flat_flow

R0, h = 0.6, 1/24
tau = 4*h*h
grid = HalfSpaceGrid.cover(R0+10*h, R0+10*h, h, pad=5)
E0 = rasterize_cap(grid, R0)
beta = AdhesionField.constant(grid, 0.0)
traj = run_flat_flow(E0, beta, tau, 6)
for k in range(7):
    E = traj.set_at(k)
    vol = E.volume()
    rho_vol = (3*vol/(2*np.pi))**(1/3)
    Rex = np.sqrt(R0*R0 - 4*k*tau)
    ref = rasterize_cap(grid, Rex)
    hd = hausdorff(E, ref).max
    print(f"k={k} rho_vol={rho_vol:.4f} exact={Rex:.4f} hd={hd:.4f} ({hd/h:.2f}h) sdrel={E.symdiff_volume(ref)/ref.volume():.4f}")
