"""
Excess, supermodularity and certified maxima
============================================

Excess of a subspace U of the vertex space is the dimension of the edge
vectors whose head and tail images both lie in U, minus dim U.  The function
is supermodular on compartmentalized subspaces, so its maximizers form a
lattice.  Several methods certify the maximum.
"""

import numpy as np

from sheaflab import PrimeField, bouquet, max_excess, random_digraph, structure_sheaf
from sheaflab.excess import CompartmentalizedSubspace, excess, excess_table, max_excess_subsheaf_oracle
from sheaflab.linalg import random_subspace
from sheaflab.sheaf import random_sheaf

rng = np.random.default_rng(1)
GF2 = PrimeField(2)

# %% Supermodularity on random pairs.
violations = 0
for _ in range(200):
    s = random_sheaf(random_digraph(rng, 3, 4), GF2, rng)
    a, b = (CompartmentalizedSubspace(s, {v: random_subspace(GF2, s.vdim[v], rng) for v in s.base.vertices}) for _ in range(2))
    violations += excess(s, a) + excess(s, b) > excess(s, a.meet(b)) + excess(s, a.join(b))
print("supermodularity violations in 200 random pairs:", violations)

# %% The full table over GF(2) for a small sheaf and its maximizers.
s = random_sheaf(random_digraph(rng, 2, 3), GF2, rng, max_vdim=2, max_edim=2)
table = excess_table(s)
print("excess values take", sorted(set(table.values.ravel().tolist())), "; maximizers:", len(table.maximizers()))

# %% Exhaustive search, the subsheaf oracle and the twisted-Betti method agree here.
print("brute:", max_excess(s, "brute").value, "oracle:", max_excess_subsheaf_oracle(s))

# %% On a structure sheaf the maximum excess is the reduced cyclicity.
res = max_excess(structure_sheaf(bouquet(2), GF2), "pullback")
print("B2 structure sheaf via pullback:", res.value, "cover degree", res.details["degree"])
