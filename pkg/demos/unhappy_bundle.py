"""
Twisted Betti numbers and maximum excess of a rank-4 bundle
============================================================

The shipped file ``unhappy.sheaf`` is a sheaf on the bouquet B2 with a
four-dimensional vertex space and two-dimensional edge spaces.  Its twisted
first Betti number is 1, yet no subspace of the vertex space has positive
excess; after pulling back to a double cover the twisted Betti number drops
to 0 as well.
"""

from sheaflab import cover_from_coordinates, data_file, max_excess, parse_sheaf, pullback, twisted_betti
from sheaflab.formats import parse_coordinates

path = data_file("unhappy.sheaf")
s = parse_sheaf(path.read_text(), path.parent)
print("field:", s.field.name, "vertex dims:", s.vdim, "edge dims:", s.edim)

# %% Twisted Betti numbers by random specialization of the twists.
tb = twisted_betti(s, samples=3, seed=7)
print(f"h0_twist={tb.h0t} h1_twist={tb.h1t} failure bound={tb.failure_bound}")

# %% Maximum excess by exhaustive search over GF(2) and GF(3).
for p in (2, 3):
    res = max_excess(parse_sheaf(path.read_text(), path.parent, p), "brute")
    print(f"GF({p}): maximum excess {res.value} ({res.method})")

# %% The double cover in which e1 lifts to self-loops and e2 swaps the sheets.
coords = data_file("b2_cover2.coords")
double = cover_from_coordinates(parse_coordinates(coords.read_text(), s.base, coords.parent)).projection
up = pullback(double, s)
print("pullback h1_twist:", twisted_betti(up, samples=3, seed=7).h1t)
for p in (2, 3):
    s_p = parse_sheaf(path.read_text(), path.parent, p)
    print(f"pullback over GF({p}): maximum excess",
          max_excess(pullback(double, s_p), "brute").value)
