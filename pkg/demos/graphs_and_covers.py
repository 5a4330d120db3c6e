"""
Graph invariants, coverings and girths
======================================

Digraphs here are finite multigraphs with loops allowed.  This walk-through
computes homology and reduced cyclicity, checks how they scale under
coverings, and builds a cover whose universal Abelian cover has no short
cycles.
"""

import numpy as np

from sheaflab import Digraph, bouquet, classify_morphism, girth, invariants, random_cover, random_digraph
from sheaflab.digraph import girths
from sheaflab.excess import high_abelian_girth_cover

# %% The bouquet of two loops: one vertex, two self-loops.
b2 = bouquet(2)
inv = invariants(b2)
print("B2:", f"h0={inv.h0} h1={inv.h1} chi={inv.chi} rho={inv.rho}")

# %% A random covering of degree d multiplies chi and rho by d.
rng = np.random.default_rng(0)
g = random_digraph(rng, 4, 7)
for d in (1, 2, 3, 4):
    cov = random_cover(g, d, rng)
    a, b = invariants(cov.source), invariants(g)
    print(f"degree {d}: chi {b.chi} -> {a.chi}, rho {b.rho} -> {a.rho}, covering={classify_morphism(cov).is_covering}")

# %% Girth versus Abelian girth.  A theta graph (three parallel edges) has
# girth 2, but the shortest null-homologous closed walk is a commutator of length 6.
theta = Digraph.from_edges(["a", "b"], [("x", "a", "b"), ("y", "a", "b"), ("z", "a", "b")])
print("theta graph girths (ordinary, Abelian):", girths(theta, 10))

# %% A cover of B2 with Abelian girth at least 17.  The search returns a
# Galois cover and checks it by breadth-first search in its universal Abelian cover.
cover = high_abelian_girth_cover(b2, 17, max_degree=120)
print("found a cover of degree", classify_morphism(cover).degree,
      "with girth", girth(cover.source, 10))
