"""Why only single linkage is functorial.

Runs complete linkage on a three-point space mapped onto a smaller one and
shows the level where a merge in the target is not matched in the source.
Then searches random maps for the same failure under average linkage and
confirms that single linkage survives the same search.
"""

from funclust import get_scheme, counterexample_search, is_persistence_preserving, theta_at, pullback
from funclust.fixtures import complete_linkage_counterexample

X, Y, f = complete_linkage_counterexample()
complete = get_scheme("complete")
DX, DY = complete(X), complete(Y)
verdict = is_persistence_preserving(f, DX, DY)
print("complete linkage preserves f:", bool(verdict))
print(f"  first failure at r = {verdict.r:g}")
print("  source partition:  ", theta_at(DX, verdict.r))
print("  pulled-back target:", pullback(f, theta_at(DY, verdict.r)))

for name in ("average", "rgen"):
    w = counterexample_search(name, max_n=8, trials=500, seed=0)
    print(f"{name}: " + ("no witness in 500 trials" if w is None else f"witness at trial {w.trial}, r = {w.r:.6g}"))
