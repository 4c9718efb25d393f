import numpy as np, time
from dropflow.grid import HalfSpaceGrid, rasterize_cap, hausdorff
from dropflow.energy import AdhesionField
from dropflow.flatflow import run_flat_flow

R0, T = 0.6, 0.05
for h in (1/32, 1/45, 1/64):
    tau = 4*h*h
    n = int(np.ceil(T/tau - 1e-9))
    t0 = time.time()
    grid = HalfSpaceGrid.cover(R0+10*h, R0+10*h, h, pad=5)
    E0 = rasterize_cap(grid, R0)
    beta = AdhesionField.constant(grid, 0.0)
    traj = run_flat_flow(E0, beta, tau, n)
    out = []
    for i in range(1, 9):
        t = T*i/8
        k = min(max(1, round(t/tau)), n)
        E = traj.set_at(k)
        Rex = np.sqrt(R0*R0 - 4*k*tau)
        ref = rasterize_cap(grid, Rex)
        hd = hausdorff(E, ref).max
        out.append(hd/h)
    rho_end = (3*traj.set_at(n).volume()/(2*np.pi))**(1/3)
    print(f"h=1/{round(1/h)} steps={n} rho_end={rho_end:.4f} exact={np.sqrt(R0*R0-4*n*tau):.4f} hd/h={['%.2f'%v for v in out]} ({time.time()-t0:.0f}s)")
