# Gauss sums over H^2(K3, mu_r): the K3 lattice splits as U^3 + E8(-1)^2 and the
# sum factors over those blocks, so r^22 terms never have to be listed.

from vwk3.k3lattice import (
    flux_sum_closed_form,
    gauss_sum,
    joint_distribution,
    k3_lattice,
    parse_vector,
    square,
)

L = k3_lattice()
print("blocks:", [(b.name, b.rank) for b in L.blocks])

for r in (2, 3, 5):
    for name in ("zero", "U1:(1,1)", f"{r}*U1:(1,0)"):
        c1 = parse_vector(name)
        row = []
        for j in range(r):
            s = gauss_sum(L, r, j, c1)
            assert s == flux_sum_closed_form(L, r, j, c1)
            row.append(str(s))
        print(f"r={r} c1={name:10s} c1^2={square(L, c1):3d}  ", "  ".join(row))

# The same numbers from the tally of (w.c1 mod r, w^2 mod 2r).  This is what the
# direct route for SU(r)/Z_r sums over.
c1 = parse_vector("U1:(1,2)")
dist = joint_distribution(L, 3, c1)
print("classes counted:", dist.total, "= 3^22:", dist.total == 3**22)
print("distinct (m, k) pairs:", len(dist.counts))
print("j=1 from the tally:", dist.gauss_sum(1), " closed form:", flux_sum_closed_form(L, 3, 1, c1))
