# The dimension lower bound log(max deg) / log M on the family <z^2, z^3>.
#
# M is the sup of |g_j'| over the Julia set (here the unit circle, so
# M = 3) and the bound is attained: the circle has dimension 1.

import math

from ratcorr import box_dimension, circle_sample, lambda_table, lower_bound, power_family, pullback_julia_sample

chain = power_family([2, 3])
report = lower_bound(chain, circle_sample(1000), k_max=10)
print(f"M = {report.M:.12f}, bound = {report.bound:.12f}")

# the weighted chains Gamma(k) climb toward the bound
for k, r, lam in lambda_table(chain, report.M, [1, 2, 5, 10, 100, 10**6]):
    print(f"k={k:>7}  R(k)={r:.6f}  lambda(k)={lam:.6f}")
print("closed form lambda(10) =", math.log(32 / 11) / math.log(3))

# box counting on a backward tree rooted at a repelling fixed point
sample = pullback_julia_sample(chain, 6)
dim, fit = box_dimension(sample)
print(f"{len(sample)} sample points, box dimension {dim:.4f} (R^2 {fit:.5f})")

# a family where 4 = 2*2 is rejected because z^4 is already in <z^2>
try:
    power_family([2, 4])
except ValueError as err:
    print("rejected:", err)
