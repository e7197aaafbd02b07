# A semigroup without rotation symmetry: <z^2, z^2 - 1>.
#
# The Julia set is no longer a circle, so the only handle on it is
# numerical: sample it by backward orbits, write a density image, and
# compare the box-counting estimate with the lower bound.  The warnings
# are genuine: 0 is critical for both maps and shows up in the sample, so
# the bound's hypothesis fails and the number is only indicative.

import os
import tempfile

from ratcorr import Chain, RationalMap, lower_bound, pullback_julia_sample, pullback_sample
from ratcorr.cli import render_density, write_pgm
from ratcorr.sphere import random_point

chain = Chain.from_maps([RationalMap.power(2), RationalMap.from_coeffs([-1, 0, 1])])
print(chain, "key condition:", chain.d1 > chain.d0)

cloud = pullback_sample(chain, random_point(3), 12, 50_000, seed=3, workers=2)
out = os.path.join(tempfile.gettempdir(), "ratcorr_demo_density.pgm")
write_pgm(out, render_density(cloud.h, [-2.0, 2.0, -2.0, 2.0], 256))
print("density image:", out)

sample = pullback_julia_sample(chain, 7)
report = lower_bound(chain, sample, k_max=5)
print(f"{len(sample)} sample points, M ~ {report.M:.4f}")
print(f"bound (sample M) ~ {report.bound:.4f}, box dimension {report.box_dim:.3f} (R^2 {report.fit_quality:.4f})")
for note in report.notes:
    print(" -", note)
