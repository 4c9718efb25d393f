import time, json
from dropflow import verify

for kind, extra in (("hemisphere", {}), ("winterbottom", {"kind": "winterbottom", "R0": 0.5, "beta0": 0.4})):
    t0 = time.time()
    r = verify.consistency_experiment(extra or None)
    dt = time.time() - t0
    print(f"== consistency[{kind}]: passed={r.passed} ({dt:.1f}s)")
    print("   fitted:", json.dumps(verify._as_py(r.fitted_constants), indent=2))
    for c in r.cases:
        if c.get("case", "").startswith("sample"):
            print("   t=%.4f hd=%s sdrel=%s mono=%s pass=%s" % (
                c["t"], ["%.4f" % v for v in c["hausdorff_by_level"]],
                ["%.4f" % v for v in c["symdiff_rel_by_level"]],
                c.get("monotone_hausdorff"), c["pass"]))
    if r.notes:
        print("   notes:", r.notes)
