import numpy as np, time
from dropflow import axisym, winterbottom, verify
from dropflow.axisym import AxisymFront, SmoothFlowConfig

t0 = time.time()
# offset_front
f = AxisymFront.cap(0.5, 0.0, n=160)
hi = axisym.offset_front(f, +0.11, 0.0)
lo = axisym.offset_front(f, -0.11, 0.0)
print("offset apex hi/lo:", hi.apex_height, lo.apex_height, "(want 0.61 / 0.39)")
print("offset contact hi/lo:", hi.r[-1], lo.r[-1])
# slide onto a different angle
hi2 = axisym.offset_front(f, +0.11, 0.0, 0.05)
print("resid of hi2 vs 0.05:", axisym.contact_angle_residual(hi2, 0.05))

# barrier_flows at one step time
tau = 4.0 / 64**2
blo, bhi = axisym.barrier_flows(f, 0.06, 0.05, SmoothFlowConfig(0.0), tau)
print("barrier finals:", blo.final.apex_height, bhi.final.apex_height, blo.extinct, bhi.extinct)
# degenerate
dlo, dhi = axisym.barrier_flows(f, 0.0, 0.0, SmoothFlowConfig(0.0), tau)
gap = float(np.max(dhi.final.distance_rz(np.stack([dlo.final.r, dlo.final.z], 1))))
print("degenerate gap:", gap)

# winterbottom contains / farthest / shrink_bound
W1 = winterbottom.WinterbottomShape(0.5, 0.4)
W2 = winterbottom.WinterbottomShape(0.3, 0.4)
W3 = winterbottom.WinterbottomShape(0.3, 0.4, center_x=0.25)
print("contains:", W1.contains(W2), W1.contains(W3))
print("farthest from origin:", W1.farthest_distance_from(0.0, 0.0, 0.0))
print("shrink_bound:", winterbottom.shrink_bound(1.0, 0.001, 50, 0.5), "(want 0.4375)")

# residual guard on plain evolutions
r1 = axisym.evolve(AxisymFront.cap(0.6, 0.0), 0.05, SmoothFlowConfig(0.0), save_times=[0.01, 0.03, 0.05])
print("hemi resid:", r1.diagnostics["max_contact_residual"])
r2 = axisym.evolve(AxisymFront.cap(0.5, 0.5), 0.03, SmoothFlowConfig(0.5), save_times=[0.01, 0.03])
print("beta=.5 resid:", r2.diagnostics["max_contact_residual"])
print("axisym smoke done", time.time() - t0)
