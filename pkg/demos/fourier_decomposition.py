"""
Characters of an Abelian cover
==============================

For a Z/n cover over GF(q) with n dividing q - 1, the homology of a pulled
back sheaf splits as a sum over characters of twisted homology.  Each
summand is at least the generic twisted Betti number.
"""

import numpy as np

from sheaflab import FiniteGroup, GaloisCoordinates, PrimeField, cover_from_coordinates, random_digraph
from sheaflab.sheaf import random_sheaf
from sheaflab.twisted import abelian_decomposition_check

rng = np.random.default_rng(3)
for n, q in [(2, 7), (3, 7), (3, 13)]:
    base = random_digraph(rng, 2, 4)
    s = random_sheaf(base, PrimeField(q), rng)
    cover = cover_from_coordinates(GaloisCoordinates.random(base, FiniteGroup.cyclic(n), n))
    rep = abelian_decomposition_check(cover, s, q=q)
    print(f"Z/{n} over GF({q}): pullback (h0, h1) = ({rep.pullback.h0}, {rep.pullback.h1}),",
          f"character sum = {rep.character_sum}, decomposition {rep.decomposition_holds}, bound {rep.bound_holds}")
