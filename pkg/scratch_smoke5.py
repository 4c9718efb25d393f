import time, json
from dropflow import verify

t0 = time.time()
r = verify.density_suite()
print("== density:", r.passed, round(time.time()-t0, 1), "s")
for c in r.cases:
    keep = {k: v for k, v in c.items() if k in ("case", "h", "displacements", "exponent", "oracle_displacements", "oracle_agreement", "cells_flipped", "pass")}
    print("  ", keep)
print("  fitted:", r.fitted_constants)
