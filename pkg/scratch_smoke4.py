import time
from dropflow import verify

t0 = time.time()
r = verify.consistency_experiment({"hs": (1/16, 1/24), "T": 0.04, "n_samples": 4})
print("== consistency hemi:", r.passed, round(time.time()-t0, 1), "s")
for c in r.cases:
    print("  t=%.3f hd=%s sd=%s pass=%s" % (c["t"], ["%.4f" % v for v in c["hausdorff_by_level"]], ["%.4f" % v for v in c["symdiff_rel_by_level"]], c["pass"]))
print("  fitted:", {k: v for k, v in r.fitted_constants.items() if "rate" in k or "max" in k})

t0 = time.time()
r = verify.consistency_experiment({"kind": "winterbottom", "R0": 0.5, "beta0": 0.4, "T": 0.02, "hs": (1/16, 1/24), "n_samples": 4})
print("== consistency wint:", r.passed, round(time.time()-t0, 1), "s")
for c in r.cases:
    print("  t=%.3f hd=%s sd=%s pass=%s" % (c["t"], ["%.4f" % v for v in c["hausdorff_by_level"]], ["%.4f" % v for v in c["symdiff_rel_by_level"]], c["pass"]))
