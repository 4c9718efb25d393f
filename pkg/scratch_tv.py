import json
import time

from dropflow import verify

CASES = {
    "ball_fix": (
        verify.ball_suite,
        {"recursion_h": 1.0 / 24, "recursion_steps": 3, "persist_h": 1.0 / 64, "persist_steps": 2},
    ),
    "density_fix": (
        verify.density_suite,
        {"hs": (1.0 / 32, 1.0 / 45), "ball_h": 1.0 / 32, "ball_taus": (0.04, 0.01), "max_probes": 15},
    ),
    "barrier_fix": (
        verify.barrier_suite,
        {"R0": 0.9, "s": 0.08, "r_off": 0.03, "h": 1.0 / 32, "n_markers": 140},
    ),
    "pinned_note": (
        verify.consistency_experiment,
        {"kind": "hemisphere", "R0": 0.6, "T": 0.008, "hs": (1.0 / 32,), "n_samples": 4},
    ),
}

for name, (fn, cfg) in CASES.items():
    t0 = time.time()
    try:
        rep = fn(cfg)
        dt = time.time() - t0
        print(f"== {name}: pass={rep.passed} in {dt:.1f}s")
        print("   fitted:", json.dumps(rep.fitted_constants, default=str)[:400])
        print("   notes:", rep.notes)
        for c in rep.cases:
            if not c.get("pass", True):
                print("   FAIL case:", json.dumps(c, default=str)[:500])
    except Exception as e:
        print(f"== {name}: RAISED {type(e).__name__}: {e} after {time.time()-t0:.1f}s")
