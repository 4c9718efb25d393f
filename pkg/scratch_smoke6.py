import time, traceback
from dropflow import verify

def run(name, cfg=None):
    t0 = time.time()
    try:
        r = verify.SUITES[name](cfg)
        dt = time.time() - t0
        print(f"== {name}: passed={r.passed} ({dt:.1f}s)")
        for c in r.failing_cases():
            print("   FAIL:", {k: v for k, v in c.items() if not isinstance(v, (list, dict))})
        print("   fitted:", r.fitted_constants)
        if r.notes:
            print("   notes:", r.notes)
        return r
    except Exception:
        print(f"== {name}: EXCEPTION ({time.time()-t0:.1f}s)")
        traceback.print_exc()

run("holder")
