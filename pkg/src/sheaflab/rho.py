"""Orbit sets, rho-kernels, vertex families, SHNC checks and Stallings cores.

Everything lives on a Cayley bigraph G of a finite group, with L a subgraph
and the group acting on the right.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .digraph import Bigraph, Digraph, GraphMorphism, classify_morphism, fibre_product, invariants
from .errors import BudgetExceeded, InputError
from .excess import DEFAULT_BUDGET, max_excess
from .galois import FiniteGroup, cayley_action
from .linalg import Field, PrimeField, Subspace, kernel, random_totally_independent, rank
from .sheaf import Sheaf


def subgraphs(g: Digraph) -> Iterator[Digraph]:
    """Every subgraph of ``g``: vertex subsets, then edge subsets among their induced edges."""
    verts = list(g.vertices)
    for r in range(len(verts) + 1):
        for vs in itertools.combinations(verts, r):
            inside = [e for e in g.edges if g.tail[e] in vs and g.head[e] in vs]
            for mask in range(1 << len(inside)):
                yield g.subgraph(vs, [e for i, e in enumerate(inside) if mask >> i & 1])


@dataclass
class OrbitSets:
    """For each point P of G, the set of group indices g with P in Lg."""

    L: Digraph
    cayley: Bigraph
    group: FiniteGroup
    vertex: dict[str, frozenset[int]]
    edge: dict[str, frozenset[int]]

    def n(self, point: str, kind: str) -> int:
        return len(self.vertex[point] if kind == "v" else self.edge[point])


def orbit_sets(L: Digraph, cayley: Bigraph, group: FiniteGroup) -> OrbitSets:
    if not L.is_subgraph_of(cayley):
        raise InputError("L is not a subgraph of the Cayley bigraph")
    vact, eact = cayley_action(group, cayley)
    lv, le = set(L.vertices), set(L.edges)
    # P lies in Lg exactly when P g^-1 lies in L
    vertex = {
        v: frozenset(g for g in range(group.order) if vact[group.inv(g)][v] in lv) for v in cayley.vertices
    }
    edge = {e: frozenset(g for g in range(group.order) if eact[group.inv(g)][e] in le) for e in cayley.edges}
    return OrbitSets(L, cayley, group, vertex, edge)


def translate_union(L: Digraph, cayley: Bigraph, group: FiniteGroup) -> GraphMorphism:
    """The disjoint union of the translates Lg over the group, mapped into G by inclusion."""
    if not L.is_subgraph_of(cayley):
        raise InputError("L is not a subgraph of the Cayley bigraph")
    vact, eact = cayley_action(group, cayley)
    vs, es, t, h, col, vmap, emap = [], [], {}, {}, {}, {}, {}
    for g in range(group.order):
        tag = group.elements[g]
        for v in L.vertices:
            x = f"{tag}:{vact[g][v]}"
            vs.append(x)
            vmap[x] = vact[g][v]
        for e in L.edges:
            f = eact[g][e]
            x = f"{tag}:{f}"
            es.append(x)
            t[x], h[x] = f"{tag}:{cayley.tail[f]}", f"{tag}:{cayley.head[f]}"
            col[x] = cayley.colour[f]
            emap[x] = f
    return GraphMorphism(Bigraph(vs, es, t, h, col), cayley, vmap, emap)


def translate_columns(m: np.ndarray, group: FiniteGroup, g: int) -> np.ndarray:
    """The matrix Mg: its column x is column x g^-1 of M."""
    cols = [group.mul(x, group.inv(g)) for x in range(group.order)]
    return np.asarray(m)[:, cols]


def free_subspace(m: np.ndarray, support: Iterable[int], field: Field, size: int) -> Subspace:
    """Vectors of ker M with zero coordinates outside ``support``."""
    t = sorted(support)
    out = np.zeros((0, size), dtype=np.int64)
    if t:
        ker = kernel(np.asarray(m)[:, t], field) if m.shape[0] else np.eye(len(t), dtype=np.int64)
        out = np.zeros((ker.shape[0], size), dtype=np.int64)
        out[:, t] = ker
    return Subspace.span(field, size, out)


@dataclass
class RhoKernel:
    orbits: OrbitSets
    k: int
    M: np.ndarray
    sheaf: Sheaf
    values: dict[tuple[str, str], Subspace]


def build_kernel(
    L: Digraph, cayley: Bigraph, group: FiniteGroup, k: int, M: np.ndarray, field: Field | None = None
) -> RhoKernel:
    """Kernel of the map from F_L G to F^k given by M, as a sheaf on the Cayley bigraph.

    The value at P is Free_T(M) for T the orbit set of P; restrictions are
    inclusions written in the canonical bases.
    """
    field = field or PrimeField()
    M = field.embed(np.asarray(M, dtype=np.int64).reshape(k, group.order))
    orb = orbit_sets(L, cayley, group)
    n = group.order
    values: dict[tuple[str, str], Subspace] = {}
    for kind, sets in (("v", orb.vertex), ("e", orb.edge)):
        for p, t in sets.items():
            if k and rank(M[:, sorted(t)], field) < k:
                raise InputError(f"M is not L-surjective at {'vertex' if kind == 'v' else 'edge'} {p}")
            values[(kind, p)] = free_subspace(M, t, field, n)
    head, tail = {}, {}
    for e in cayley.edges:
        w = values[("e", e)]
        for ends, store in ((cayley.head, head), (cayley.tail, tail)):
            u = values[("v", ends[e])]
            store[e] = u.coordinates(w.basis).T if w.dim else np.zeros((u.dim, 0), dtype=np.int64)
    sheaf = Sheaf(
        cayley, field,
        {v: values[("v", v)].dim for v in cayley.vertices},
        {e: values[("e", e)].dim for e in cayley.edges},
        head, tail,
    )
    return RhoKernel(orb, k, M, sheaf, values)


def orbit_sheaf(L: Digraph, cayley: Bigraph, group: FiniteGroup, field: Field | None = None) -> Sheaf:
    """F_L G, the direct sum of the translates F_{Lg}; it is the k = 0 kernel."""
    return build_kernel(L, cayley, group, 0, np.zeros((0, group.order), dtype=np.int64), field).sheaf


def _rho_abs(x: np.ndarray, rho: int) -> np.ndarray:
    return np.maximum(0, x - rho)


@dataclass
class FamilyReport:
    holds: bool
    deficit: int
    worst: dict[str, frozenset[int]]
    families: int


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


def family_deficit(orb: OrbitSets, family: Mapping[str, Iterable[int]], rho: int | None = None) -> int:
    """Sum over edges of |U_E(e)|_rho minus sum over vertices of |U(v)|_rho, with |x|_k = max(0, x-k)."""
    if rho is None:
        rho = invariants(orb.L).rho
    G = orb.cayley
    u = {v: frozenset(family.get(v, ())) for v in G.vertices}
    for v in G.vertices:
        if not u[v] <= orb.vertex[v]:
            raise InputError(f"family at {v} leaves the orbit set")
    edge = sum(max(0, len(u[G.tail[e]] & u[G.head[e]] & orb.edge[e]) - rho) for e in G.edges)
    vert = sum(max(0, len(u[v]) - rho) for v in G.vertices)
    return edge - vert


def vertex_family_check(
    L: Digraph, cayley: Bigraph, group: FiniteGroup, budget: int = DEFAULT_BUDGET
) -> FamilyReport:
    """Exhaustive check that no vertex family has positive deficit.

    Families are encoded as bitmasks over group indices and evaluated in
    vectorized blocks; the worst family is the first one of maximal deficit.
    """
    orb = orbit_sets(L, cayley, group)
    rho = invariants(L).rho
    G = cayley
    verts = list(G.vertices)
    axis = {v: i for i, v in enumerate(verts)}

    def mask(s: Iterable[int]) -> int:
        return sum(1 << g for g in s)

    options = []
    for v in verts:
        allowed = sorted(orb.vertex[v])
        options.append(np.array([mask(c) for r in range(len(allowed) + 1) for c in itertools.combinations(allowed, r)], dtype=np.int64))
    total = 1
    for o in options:
        total *= len(o)
    if total > budget:
        raise BudgetExceeded(f"{total} vertex families exceed the budget {budget}")
    emask = {e: mask(orb.edge[e]) for e in G.edges}
    best, best_idx = None, None
    block = 1 << 16
    for start in range(0, total, block):
        flat = np.arange(start, min(total, start + block))
        idx = np.unravel_index(flat, [len(o) for o in options])
        chosen = [options[i][idx[i]] for i in range(len(verts))]
        score = np.zeros(flat.size, dtype=np.int64)
        for i in range(len(verts)):
            score -= _rho_abs(_popcount(chosen[i]), rho)
        for e in G.edges:
            both = chosen[axis[G.tail[e]]] & chosen[axis[G.head[e]]] & emask[e]
            score += _rho_abs(_popcount(both), rho)
        j = int(np.argmax(score))
        if best is None or score[j] > best:
            best, best_idx = int(score[j]), [int(x[j]) for x in idx]
    worst = {v: frozenset(g for g in range(group.order) if options[i][best_idx[i]] >> g & 1) for i, v in enumerate(verts)}
    return FamilyReport(best <= 0, best, worst, total)


def straight_subspace(kernel_: RhoKernel, family: Mapping[str, Iterable[int]]):
    """The compartmentalized subspace U(v) = Free_{family(v)}(M) of a kernel sheaf, in its value coordinates."""
    from .excess import CompartmentalizedSubspace

    s, F = kernel_.sheaf, kernel_.sheaf.field
    per = {}
    for v in s.base.vertices:
        sub = free_subspace(kernel_.M, family.get(v, ()), F, kernel_.orbits.group.order)
        val = kernel_.values[("v", v)]
        per[v] = Subspace.span(F, val.dim, val.coordinates(sub.basis)) if sub.dim else Subspace.zero(F, val.dim)
    return CompartmentalizedSubspace(s, per)


def pair_graph(orb: OrbitSets, family: Mapping[str, Iterable[int]], rho: int | None = None) -> tuple[Digraph, Digraph]:
    """Positive set L' of a family and the subgraph H of L x_B2 L' of pairs (P g^-1, P)."""
    if rho is None:
        rho = invariants(orb.L).rho
    G, grp = orb.cayley, orb.group
    vact, eact = cayley_action(grp, G)
    u = {v: frozenset(family.get(v, ())) for v in G.vertices}
    ue = {e: u[G.tail[e]] & u[G.head[e]] & orb.edge[e] for e in G.edges}
    pos_v = [v for v in G.vertices if len(u[v]) > rho]
    pos_e = [e for e in G.edges if len(ue[e]) > rho]
    L2 = G.subgraph(pos_v, pos_e)
    prod, _, _ = fibre_product(orb.L.to_bouquet() if isinstance(orb.L, Bigraph) else _colour(orb.L, G).to_bouquet(), L2.to_bouquet())
    hv = [f"({vact[grp.inv(g)][v]},{v})" for v in pos_v for g in sorted(u[v])]
    he = [f"({eact[grp.inv(g)][e]},{e})" for e in pos_e for g in sorted(ue[e])]
    return L2, prod.subgraph(hv, he)


def _colour(L: Digraph, G: Bigraph) -> Bigraph:
    return Bigraph.from_digraph(L, {e: G.colour[e] for e in L.edges})


@dataclass
class ShncReport:
    rho_k: int
    rho_l: int
    rho_product: int
    rho_prime_product: int
    shnc_margin: int
    hnc_margin: int

    @property
    def shnc_holds(self) -> bool:
        return self.shnc_margin >= 0

    @property
    def hnc_holds(self) -> bool:
        return self.hnc_margin >= 0


def shnc_verify(K: Bigraph, L: Bigraph) -> ShncReport:
    """Compare rho of the fibre product over B2 with rho(K) rho(L)."""
    for name, x in (("K", K), ("L", L)):
        if not isinstance(x, Bigraph):
            raise InputError(f"{name} must be a bigraph")
        if not classify_morphism(x.to_bouquet()).is_etale:
            raise InputError(f"{name} is not étale over B2")
    prod, _, _ = fibre_product(K.to_bouquet(), L.to_bouquet())
    ip, ik, il = invariants(prod), invariants(K), invariants(L)
    bound = ik.rho * il.rho
    return ShncReport(ik.rho, il.rho, ip.rho, ip.rho_prime, bound - ip.rho, bound - ip.rho_prime)


def rho_reducing_edge(L: Digraph) -> str | None:
    """An edge whose removal lowers rho by exactly one, or None when rho is zero."""
    r = invariants(L).rho
    if r == 0:
        return None
    for e in L.edges:
        if invariants(L.subgraph(L.vertices, [x for x in L.edges if x != e])).rho == r - 1:
            return e
    raise AssertionError("no edge lowers rho although rho is positive")


def stallings_core(words: Sequence[str]) -> Bigraph:
    """Core graph of the subgroup of the free group on a, b generated by ``words``.

    Uppercase letters are inverses.  Word loops are wedged at the basepoint,
    same-coloured edges sharing a tail or a head are folded, and leaves other
    than the basepoint are pruned.
    """
    words = [w.strip() for w in words if w.strip()]
    if not words:
        raise InputError("no words given")
    colour = {"a": 1, "b": 2, "A": 1, "B": 2}
    arcs: list[tuple[int, int, int]] = []  # (colour, tail, head)
    nxt = 1
    for w in words:
        bad = set(w) - set(colour)
        if bad:
            raise InputError(f"word {w!r} uses letters outside a, b, A, B")
        here = 0
        for i, ch in enumerate(w):
            there = 0 if i == len(w) - 1 else nxt
            if there:
                nxt += 1
            arcs.append((colour[ch], here, there) if ch.islower() else (colour[ch], there, here))
            here = there
    parent = list(range(nxt))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        a, b = find(a), find(b)
        if a == b:
            return False
        parent[max(a, b)] = min(a, b)
        return True

    changed = True
    while changed:
        changed = False
        arcs = sorted({(c, find(t), find(h)) for c, t, h in arcs})
        by_tail: dict[tuple[int, int], int] = {}
        by_head: dict[tuple[int, int], int] = {}
        for c, t, h in arcs:
            if (c, t) in by_tail and union(by_tail[(c, t)], h):
                changed = True
            by_tail.setdefault((c, t), h)
            if (c, h) in by_head and union(by_head[(c, h)], t):
                changed = True
            by_head.setdefault((c, h), t)
    arcs = sorted({(c, find(t), find(h)) for c, t, h in arcs})
    verts = {find(x) for x in range(nxt)}
    while True:
        deg = Counter()
        for _, t, h in arcs:
            deg[t] += 1
            deg[h] += 1
        leaves = {v for v in verts if v != 0 and deg[v] <= 1}
        if not leaves:
            break
        verts -= leaves
        arcs = [a for a in arcs if a[1] not in leaves and a[2] not in leaves]
    # canonical names by breadth-first discovery from the basepoint
    order = [0]
    seen = {0}
    for v in order:
        for c, t, h in sorted(arcs):
            for x, y in ((t, h), (h, t)):
                if x == v and y not in seen:
                    seen.add(y)
                    order.append(y)
    name = {v: f"v{i}" for i, v in enumerate(order)}
    arcs = sorted(arcs, key=lambda a: (order.index(a[1]), order.index(a[2]), a[0]))
    es = [f"f{i}" for i in range(len(arcs))]
    return Bigraph(
        [name[v] for v in order], es,
        {e: name[a[1]] for e, a in zip(es, arcs)},
        {e: name[a[2]] for e, a in zip(es, arcs)},
        {e: a[0] for e, a in zip(es, arcs)},
    )


@dataclass
class ExperimentReport:
    k: int
    field: str
    values: list[int]
    skipped: int
    modal: int | None
    divisible: bool
    methods: list[str] = field(default_factory=list)


def generic_excess_experiment(
    L: Digraph,
    cayley: Bigraph,
    group: FiniteGroup,
    k: int,
    trials: int = 10,
    seed: int = 0,
    q: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> ExperimentReport:
    """Maximum excess of k-th power kernels for random totally independent M over GF(q).

    Trials whose M cannot be realized, is not L-surjective, or whose kernel
    has no certified maximum-excess method within budget are counted as skipped.
    """
    field = PrimeField(q)
    rng = np.random.default_rng(seed)
    values, methods, skipped = [], [], 0
    for _ in range(trials):
        if k == 0:
            M = np.zeros((0, group.order), dtype=np.int64)
        else:
            M = random_totally_independent(k, group.order, field, rng)
            if M is None:
                skipped += 1
                continue
        try:
            ker = build_kernel(L, cayley, group, k, M, field)
            res = max_excess(ker.sheaf, "brute", budget=budget)
        except (InputError, BudgetExceeded):
            skipped += 1
            continue
        values.append(res.value)
        methods.append(res.method)
    modal = Counter(values).most_common(1)[0][0] if values else None
    return ExperimentReport(
        k, field.name, values, skipped, modal, all(v % group.order == 0 for v in values), methods
    )
