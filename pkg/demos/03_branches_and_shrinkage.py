# Inverse branches of <z^2, z^3>: how many are regular, and how fast they shrink.

from ratcorr import branch_count_bound, branch_shrink_probe, critical_union, power_family, regular_branch_count
from ratcorr.measures import ShrinkProbeParams
from ratcorr.sphere import P1Point, random_point

chain = power_family([2, 3])
print("critical values of words up to length 2:", [p for p in critical_union(chain, 2)])

for l in (2, 3):
    rep = branch_count_bound(chain, 3, l)
    print(f"l={l}: tau={rep.tau} guaranteed fraction {rep.fraction:.3f} -> {rep.bound:.1f} of {5**3}")

center = P1Point.from_complex(0.6 + 0.8j)
for n in (3, 4):
    print(f"n={n}: regular branches over a 0.05-disk = {regular_branch_count(chain, n, center, 0.05)}")

# a small disk pulled back along random branches; the typical rate is sqrt(d0/d1) or better
params = ShrinkProbeParams(random_point(1), 0.01, 7, samples=200, seed=1)
res = branch_shrink_probe(chain, params)
for level, (m, q) in enumerate(zip(res.per_level, res.per_level_quantile)):
    print(f"level {level}: median {m:.3e}  90% quantile {q:.3e}")
print("median ratios:", [round(r, 3) for r in res.ratios()], f"(sqrt(2/5) = {0.4 ** 0.5:.3f})")
