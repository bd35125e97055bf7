"""Euler characteristics of Hilbert schemes of points on a K3 surface.

The generating function sum_n e(Hilb^n) q^(n-1) is the reciprocal of the
discriminant Delta(q) = q prod (1 - q^n)^24.  Everything below is exact.
"""

import math

from vwk3.qseries import delta, hilb_coefficients, hilb_series

# the discriminant, truncated: every exponent below the stated order is known
d = delta(8)
print("Delta(q) =", d)

# its reciprocal, one term per Hilbert scheme
h = hilb_series(8)
for n, e in enumerate(hilb_coefficients(8)):
    print(f"e(Hilb^{n}(K3)) = {e}")

# honesty check: the product is 1 up to the truncation it can vouch for
print("Delta * Delta^-1 =", d * h)

# growth: roughly exp(4 pi sqrt n), which the numeric code uses as a tail bound
for n in (10, 50, 100):
    e = hilb_coefficients(n)[n]
    print(f"n={n:3d}  log e = {math.log(e):8.2f}   4 pi sqrt(n) = {4 * math.pi * math.sqrt(n):8.2f}")
