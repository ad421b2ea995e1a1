"""Smoke test for the ranklq_py extension.

Build and install first:
    pip install --no-build-isolation ./crates/python
"""

import json
import math
import random

import ranklq_py as rq

# exact moments
frac, dec = rq.exact_moment("kendall", 4, 10)
assert frac == "217493/20503125", frac
assert math.isclose(dec, 217493 / 20503125)
assert rq.exact_moment("rho", 3, 7) == rq.exact_moment("rho", 3, 7, brute_force=True)
assert rq.omega("D", 2, 6)[0] == "41/45"

# single pairs
x = [0.3, 1.2, -0.7, 2.2, 0.1, -1.5, 0.9]
assert rq.pair_statistic("tau", x, x) == 1.0
assert math.isclose(rq.pair_statistic("pearson", x, [2 * v + 1 for v in x]), 1.0)

# Cauchy combination returns the common p-value
assert math.isclose(rq.cauchy_combine([0.05] * 4), 0.05, rel_tol=1e-12)

# calibration round trip
cal = rq.calibrate("taustar", 40, replicates=10_000, seed=3)
again = rq.Calibration.from_json(cal.to_json())
assert again.entries() == cal.entries() and again.n == 40

# full test on independent data
rng = random.Random(1)
rows = [[rng.gauss(0, 1) for _ in range(6)] for _ in range(40)]
report = json.loads(rq.independence_test(rows, "taustar", calibration=cal))
pvals = [s["p"] for s in report["norms"].values()] + [report["max"]["p"]] + list(report["combined"].values())
assert len(pvals) == 6 and all(0 <= p <= 1 for p in pvals)

try:
    rq.calibrate("nope", 10)
except ValueError:
    pass
else:
    raise AssertionError("unknown coefficient accepted")

print("smoke test passed:", {k: round(v, 4) for k, v in report["combined"].items()})
