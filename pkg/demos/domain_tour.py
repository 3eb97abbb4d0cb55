"""A short walk through the domains: membership, closure, gauges,
retracts, the symmetrized-polydisc embedding and the pentablock."""
import numpy as np

from mudom import (
    embed_symmetrized,
    member,
    member_closure,
    member_penta,
    minkowski,
    mu_quotient,
    penta_minkowski,
    symmetrized_polydisc,
    tetrablock,
)
from mudom.domains import g2_to_tetrablock, retract_iota, retract_theta, tetrablock_to_g2
from mudom.multiindex import split_table

tb = tetrablock()
for x in ([0, 0, 0], [0.3, 0.2, 0.1], [0, 0, 1], [0, 0, 2]):
    print(f"tetrablock {x}: member={member(tb, x).status.value:9s} "
          f"closure={member_closure(tb, x).status.value:9s} gauge={minkowski(tb, x):.6f}")

# (s, p) in G_2 sits inside the tetrablock as (s/2, s/2, p) and comes back unchanged.
sp = np.array([0.5 + 0.2j, 0.1])
print("G_2 -> tetrablock -> G_2:", tetrablock_to_g2(g2_to_tetrablock(sp)))

# the leading block of E_3 is a retract: pad with zeros, then truncate
e3 = mu_quotient(3)
split = split_table(e3.table, 1)
xp = np.array([0.4, 0.05])
lifted = retract_theta(e3, split, xp)
print("E_3 lift of", xp, "->", lifted, "back:", retract_iota(e3, split, lifted))

# members of E_3 map into a symmetrized polydisc
x = e3.sample_member(seed=1)
emb = embed_symmetrized(e3, x)
print(f"E_3 member embeds in G_{emb.M} with odd weights {emb.m_weights}:",
      member(symmetrized_polydisc(emb.M), emb.x_tilde).status.value)

for pt in ([0.5, 0, 0], [0.99, 0.5, 0.1], [1.5, 0, 0]):
    print(f"pentablock {pt}: {member_penta(pt).status.value}")
print("pentablock gauge of (1, 0, 0):", penta_minkowski((1, 0, 0), 1))
