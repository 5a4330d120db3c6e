"""
Rho-kernels, vertex families and the graph inequality
=====================================================

On the Cayley bigraph G of a group, a subgraph L and a totally independent
matrix M give a kernel sheaf whose values have dimension n_P - rho(L).  The
vertex-family criterion is checked exhaustively, the inequality
rho(K x L) <= rho(K) rho(L) is checked on Stallings cores, and small
experiments show the maximum excess falling to zero as k grows.
"""

from sheaflab import FiniteGroup, PrimeField, build_kernel, cayley_bigraph, invariants
from sheaflab import shnc_verify, stallings_core, vertex_family_check
from sheaflab.linalg import vandermonde_totally_independent
from sheaflab.rho import generic_excess_experiment

Z3 = FiniteGroup.cyclic(3)
G = cayley_bigraph(Z3, "1", "2")
L = G.subgraph(["0", "1", "2"], ["(0,1)", "(0,2)", "(1,1)", "(1,2)", "(2,1)"])
rho = invariants(L).rho
print("rho(L) =", rho)

# %% Kernel dimensions with a Vandermonde matrix.
F = PrimeField()
M = vandermonde_totally_independent(rho, Z3.elements, F, seed=0)
ker = build_kernel(L, G, Z3, rho, M, F)
print("vertex dims:", ker.sheaf.vdim)
print("orbit sizes:", {v: len(t) for v, t in ker.orbits.vertex.items()})

# %% No vertex family has positive deficit.
rep = vertex_family_check(L, G, Z3)
print(f"families checked: {rep.families}, worst deficit {rep.deficit}, holds={rep.holds}")

# %% Stallings cores and the inequality on fibre products over B2.
K = stallings_core(["ab", "ba", "aab"])
Lw = stallings_core(["a", "bab"])
r = shnc_verify(K, Lw)
print(f"rho(K)={r.rho_k} rho(L)={r.rho_l} rho(K x L)={r.rho_product} margin={r.shnc_margin}")
print("covering K gives equality:", shnc_verify(G, Lw).shnc_margin == 0)

# %% Maximum excess of k-th power kernels over GF(2): rho|G| at k = 0, then down to zero.
for k in range(rho + 1):
    ex = generic_excess_experiment(L, G, Z3, k, trials=3, seed=1, q=2)
    print(f"k={k}: values {ex.values} modal {ex.modal} divisible by |G|: {ex.divisible}")
