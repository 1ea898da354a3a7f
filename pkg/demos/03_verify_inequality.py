"""Put the transport inequality under random trial pairs.

Runs the mother suite for a few (n, p) pairs and reports the smallest
relative margin seen, then shows that family members sit on the
equality case while a bump does not.
"""

from trace_sobolev.verification.suites import SuiteConfig, mother_suite

for n, p in ((3, 2.0), (4, 1.5), (2, 1.2)):
    recs = mother_suite(SuiteConfig(n, p, trials=100, seed=1))
    sweep = [r for r in recs if r.check == "mother"]
    tightest = min(r.margin / abs(r.lhs) for r in sweep)
    bad = sum(not r.passed for r in recs)
    print(f"n={n} p={p}: {len(recs)} checks, {bad} failed, tightest random margin {tightest:.3e}")
    for r in recs:
        if r.check == "mother-equality":
            print(f"    equality at {r.params['g']}: relative margin {r.margin / abs(r.lhs):+.1e}")
            break
