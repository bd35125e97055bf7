"""SU(r) and SU(r)/Z_r partition functions of K3 at prime rank."""

from fractions import Fraction

from vwk3.k3lattice import k3_lattice, parse_vector
from vwk3.partition import PartitionRequest, z_su, z_su_modr, z_w, z_w_from_euler

L = k3_lattice()

# rank 2, c1 = 0: the familiar 1/8 q^-2 + 15 + ...
print(z_su(PartitionRequest(r=2, c1=L.zero(), order=3)))

# rank 3, primitive c1: only every third power of q^(1/3) survives
print(z_su(PartitionRequest(r=3, c1=parse_vector("U1:(1,1)"), order=2)))

# Z_w for a non-trivial class w is assembled from Hilbert schemes of vd/2 points,
# and it agrees with the closed form term by term.
w = parse_vector("U1:(1,2)")
a, b = z_w(3, w, 3), z_w_from_euler(3, w, 3)
print("Z_w closed form == Hilbert scheme assembly:", a == b)
print(b)

# SU(r)/Z_r two ways.  The direct route never lists the 3^22 classes; it sums over
# the (w.c1, w^2) tally instead.
req = PartitionRequest(r=3, c1=parse_vector("U1:(1,0)"), order=Fraction(4, 3))
closed, direct = z_su_modr(req, "closed"), z_su_modr(req, "direct")
print("routes agree:", closed == direct)
print(closed)
