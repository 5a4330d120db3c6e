"""
Galois covers from coordinates
==============================

A group element per edge defines a cover with vertex set V x G.  We look at
monodromy, the decomposition of the self fibre product, Cayley bigraphs and
the normal extension of a non-Galois cover.
"""

import numpy as np

from sheaflab import FiniteGroup, GaloisCoordinates, bouquet, cayley_bigraph, cover_from_coordinates
from sheaflab import fibre_product, is_isomorphic, normal_extension, random_cover
from sheaflab.galois import monodromy_image

b2 = bouquet(2)
S3 = FiniteGroup.symmetric(3)

# %% Coordinates a(e1) = (1 0 2), a(e2) = (0 2 1) generate S3, so the cover is connected.
c = GaloisCoordinates.from_names(b2, S3, {"e1": "102", "e2": "021"})
cover = cover_from_coordinates(c)
cover.verify()
print("monodromy image size:", len(monodromy_image(c, "v")), "of", S3.order)
print("components of the cover:", len(cover.total.components()))

# %% K x_B2 K splits into |G| pieces, each a copy of K.
prod, _, _ = fibre_product(cover.projection, cover.projection)
pieces = prod.component_subgraphs()
print("pieces of the self fibre product:", len(pieces),
      "all isomorphic to K:", all(is_isomorphic(p, cover.total) for p in pieces))

# %% The same cover is the Cayley bigraph of S3 on the two generators.
cay = cayley_bigraph(S3, "102", "021")
print("Cayley bigraph isomorphic to the cover:", is_isomorphic(cay, cover.total))

# %% A random connected degree-3 cover of B2 is usually not Galois; its
# normal extension is an S3 cover mapping onto it.
rng = np.random.default_rng(5)
while True:
    three = random_cover(b2, 3, rng)
    if len(three.source.components()) == 1:
        break
ext, to_three = normal_extension(three)
print("normal extension: group order", ext.group.order, "vertices", len(ext.total.vertices))
