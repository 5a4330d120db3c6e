"""Excess, maximum excess and the methods that certify it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .digraph import Digraph, GraphMorphism, abelian_girth, classify_morphism, random_cover
from .errors import BudgetExceeded, InputError
from .galois import FiniteGroup, GaloisCoordinates, cover_from_coordinates
from .linalg import PrimeField, Subspace, count_subspaces, enumerate_subspaces, kernel, rank
from .sheaf import Sheaf, pullback
from .twisted import twisted_betti

DEFAULT_BUDGET = 10**6
BRUTE_FIELDS = (2, 3)


class CompartmentalizedSubspace:
    """A subspace U(v) of F(v) at every vertex."""

    def __init__(self, sheaf: Sheaf, per_vertex: Mapping[str, Subspace]):
        self.sheaf = sheaf
        self.per_vertex = {}
        for v in sheaf.base.vertices:
            u = per_vertex.get(v) or Subspace.zero(sheaf.field, sheaf.vdim[v])
            if u.ambient != sheaf.vdim[v] or u.field != sheaf.field:
                raise InputError(f"subspace at {v} lives in the wrong space")
            self.per_vertex[v] = u

    @classmethod
    def zero(cls, s: Sheaf) -> "CompartmentalizedSubspace":
        return cls(s, {})

    @classmethod
    def full(cls, s: Sheaf) -> "CompartmentalizedSubspace":
        return cls(s, {v: Subspace.full(s.field, s.vdim[v]) for v in s.base.vertices})

    def meet(self, other: "CompartmentalizedSubspace") -> "CompartmentalizedSubspace":
        return CompartmentalizedSubspace(
            self.sheaf, {v: u.intersection(other.per_vertex[v]) for v, u in self.per_vertex.items()}
        )

    def join(self, other: "CompartmentalizedSubspace") -> "CompartmentalizedSubspace":
        return CompartmentalizedSubspace(
            self.sheaf, {v: u.sum(other.per_vertex[v]) for v, u in self.per_vertex.items()}
        )

    @property
    def dim(self) -> int:
        return sum(u.dim for u in self.per_vertex.values())

    def global_subspace(self) -> Subspace:
        """The direct sum of the U(v) inside F(V)."""
        s = self.sheaf
        offs = s.vertex_offsets()
        rows = []
        for v, u in self.per_vertex.items():
            block = np.zeros((u.dim, s.dim_v), dtype=np.int64)
            block[:, offs[v] : offs[v] + s.vdim[v]] = u.basis
            rows.append(block)
        return Subspace.span(s.field, s.dim_v, np.vstack(rows) if rows else np.zeros((0, s.dim_v)))


def gamma_excess(u: CompartmentalizedSubspace) -> tuple[dict[str, int], int]:
    """Per-edge dimensions of the head/tail neighbourhood of U, and the excess of U.

    At edge e this is the kernel of F(e) -> F(he)/U(he) + F(te)/U(te).
    """
    s, F = u.sheaf, u.sheaf.field
    g = s.base
    quot = {v: x.quotient_matrix() for v, x in u.per_vertex.items()}
    dims = {}
    for e in g.edges:
        if s.edim[e] == 0:
            dims[e] = 0
            continue
        stacked = np.vstack([F.matmul(quot[g.head[e]], s.head[e]), F.matmul(quot[g.tail[e]], s.tail[e])])
        dims[e] = s.edim[e] - rank(stacked, F)
    return dims, sum(dims.values()) - u.dim


def excess(s: Sheaf, u: Subspace | CompartmentalizedSubspace) -> int:
    """Excess of an arbitrary subspace U of F(V): dim of its head/tail neighbourhood minus dim U."""
    if isinstance(u, CompartmentalizedSubspace):
        return gamma_excess(u)[1]
    if u.ambient != s.dim_v:
        raise InputError("subspace is not inside F(V)")
    F = s.field
    dh, dt = s.differential_parts()
    q = u.quotient_matrix()
    offs = s.edge_offsets()
    total = 0
    for e in s.base.edges:
        w = s.edim[e]
        if w == 0:
            continue
        cols = slice(offs[e], offs[e] + w)
        stacked = np.vstack([F.matmul(q, dh[:, cols]), F.matmul(q, dt[:, cols])])
        total += w - rank(stacked, F)
    return total - u.dim


@dataclass
class MaxExcess:
    value: int
    method: str
    certificate: Any = None
    details: dict = field(default_factory=dict)


def _check_brute(s: Sheaf, budget: int) -> list[int]:
    if not isinstance(s.field, PrimeField) or s.field.p not in BRUTE_FIELDS:
        raise InputError(f"brute force needs a sheaf over GF(2) or GF(3), not {s.field.name}")
    counts = [count_subspaces(s.field.p, s.vdim[v]) for v in s.base.vertices]
    if math.prod(counts) > budget:
        raise BudgetExceeded(f"{math.prod(counts)} subspace tuples exceed the budget {budget}")
    return counts


@dataclass
class ExcessTable:
    """Excess of every compartmentalized U, as a tensor indexed by per-vertex subspace numbers."""

    sheaf: Sheaf
    subspaces: list[list[Subspace]]
    values: np.ndarray

    def witness(self, index: tuple[int, ...]) -> CompartmentalizedSubspace:
        verts = self.sheaf.base.vertices
        return CompartmentalizedSubspace(self.sheaf, {v: self.subspaces[i][k] for i, (v, k) in enumerate(zip(verts, index))})

    def maximizers(self) -> list[tuple[int, ...]]:
        best = self.values.max()
        return [tuple(int(x) for x in idx) for idx in np.argwhere(self.values == best)]

    def index_of(self, u: CompartmentalizedSubspace) -> tuple[int, ...]:
        return tuple(self.subspaces[i].index(u.per_vertex[v]) for i, v in enumerate(self.sheaf.base.vertices))


def excess_table(s: Sheaf, budget: int = DEFAULT_BUDGET) -> ExcessTable:
    """Excess of all compartmentalized subspaces over GF(2) or GF(3), vectorized over tuples.

    Gamma at an edge is the intersection of the preimages of U(head) and
    U(tail), so a table over pairs of edge subspaces suffices.
    """
    _check_brute(s, budget)
    F, g = s.field, s.base
    verts = list(g.vertices)
    axis = {v: i for i, v in enumerate(verts)}
    subs = [list(enumerate_subspaces(F, s.vdim[v])) for v in verts]
    shape = tuple(len(x) for x in subs)
    total = np.zeros(shape, dtype=np.int64)
    for i, v in enumerate(verts):
        dims = np.array([u.dim for u in subs[i]], dtype=np.int64)
        total -= dims.reshape([-1 if j == i else 1 for j in range(len(verts))])
    for e in g.edges:
        w = s.edim[e]
        if w == 0:
            continue
        esubs = list(enumerate_subspaces(F, w))
        eid = {x: k for k, x in enumerate(esubs)}
        inter = np.array([[a.intersection(b).dim for b in esubs] for a in esubs], dtype=np.int64)

        def preimages(v: str, restriction: np.ndarray) -> np.ndarray:
            out = []
            for u in subs[axis[v]]:
                q = u.quotient_matrix()
                out.append(eid[Subspace.span(F, w, kernel(F.matmul(q, restriction), F))])
            return np.array(out, dtype=np.int64)

        ph = preimages(g.head[e], s.head[e])
        pt = preimages(g.tail[e], s.tail[e])
        ah, at = axis[g.head[e]], axis[g.tail[e]]
        if ah == at:
            table = inter[pt, ph]
            total += table.reshape([-1 if j == ah else 1 for j in range(len(verts))])
        else:
            table = inter[pt[:, None], ph[None, :]]
            if at > ah:
                table = table.T
            lo, hi = min(at, ah), max(at, ah)
            total += table.reshape([shape[j] if j in (lo, hi) else 1 for j in range(len(verts))])
    return ExcessTable(s, subs, total)


def max_excess_brute(s: Sheaf, budget: int = DEFAULT_BUDGET) -> MaxExcess:
    table = excess_table(s, budget)
    flat = int(np.argmax(table.values))
    index = np.unravel_index(flat, table.values.shape) if table.values.ndim else ()
    witness = table.witness(tuple(int(i) for i in index))
    return MaxExcess(int(table.values.max()), "brute", witness, {"tuples": int(table.values.size)})


def max_excess_subsheaf_oracle(s: Sheaf, budget: int = DEFAULT_BUDGET) -> int:
    """Largest -chi over subsheaves, found by enumerating vertex subspaces and all edge subspaces.

    For each choice of vertex subspaces, an edge subspace W is admissible when
    both restrictions map W into the chosen vertex subspaces; the largest
    admissible W is found by testing every subspace of F(e) by membership.
    """
    counts = _check_brute(s, budget)
    F, g = s.field, s.base
    verts = list(g.vertices)
    subs = [list(enumerate_subspaces(F, s.vdim[v])) for v in verts]
    esubs = {e: list(enumerate_subspaces(F, s.edim[e])) for e in g.edges}
    best_edge: dict[tuple[str, int, int], int] = {}
    axis = {v: i for i, v in enumerate(verts)}
    for e in g.edges:
        for i, ut in enumerate(subs[axis[g.tail[e]]]):
            for j, uh in enumerate(subs[axis[g.head[e]]]):
                best = 0
                for w in esubs[e]:
                    if w.dim <= best:
                        continue
                    if uh.contains(F.matmul(s.head[e], w.basis.T).T) and ut.contains(F.matmul(s.tail[e], w.basis.T).T):
                        best = w.dim
                best_edge[(e, i, j)] = best
    top = -math.inf
    for idx in np.ndindex(*counts):
        chi_sub = sum(subs[k][idx[k]].dim for k in range(len(verts)))
        for e in g.edges:
            chi_sub -= best_edge[(e, idx[axis[g.tail[e]]], idx[axis[g.head[e]]])]
        top = max(top, -chi_sub)
    return int(top)


def high_abelian_girth_cover(
    g: Digraph,
    bound: int,
    max_degree: int = 720,
    tries: int = 20,
    seed: int = 0,
    points: tuple[int, int] = (3, 7),
    group_tries: int = 400,
) -> GraphMorphism:
    """A covering of ``g`` whose Abelian girth is at least ``bound``, verified by search.

    Tries the identity, then random permutation covers of degree at most 8,
    then Galois covers whose group is generated by one random permutation of
    ``points`` letters per edge.  Abelian girth is at least three times the
    girth, since a null-homologous closed walk crosses each edge of a subgraph
    of rank two at least twice, so such covers with few short cycles are
    plentiful.  Acceptance rests only on a breadth-first search of the
    universal Abelian cover of each candidate.
    """
    rng = np.random.default_rng(seed)
    best = None

    def accept(cover: GraphMorphism, roots=None) -> bool:
        nonlocal best
        if bound <= 1:
            return True
        found = abelian_girth(cover.source, bound - 1, roots)
        if found is None:
            return True
        best = found if best is None else max(best, found)
        return False

    candidates = [GraphMorphism.identity(g)]
    for degree in range(1, min(max_degree, 8) + 1):
        if degree > 1:
            candidates = [random_cover(g, degree, rng) for _ in range(tries)]
        for cover in candidates:
            if accept(cover):
                return cover
    if g.edges:
        for m in range(points[0], points[1] + 1):
            for _ in range(group_tries):
                perms = [rng.permutation(m) for _ in g.edges]
                group = FiniteGroup.from_permutations(perms, max_degree)
                if group is None or group.order <= 8:
                    continue
                names = {e: "".join(map(str, p)) if m <= 10 else ",".join(map(str, p)) for e, p in zip(g.edges, perms)}
                galois = cover_from_coordinates(GaloisCoordinates.from_names(g, group, names))
                # deck transformations are transitive on fibres: one root per base vertex
                roots = [f"({v},{group.elements[group.identity]})" for v in g.vertices]
                if accept(galois.projection, roots):
                    return galois.projection
    raise BudgetExceeded(
        f"no cover of degree <= {max_degree} with Abelian girth >= {bound} (best {best})", best=best
    )


def pullback_bound(s: Sheaf) -> int:
    return 2 * (s.dim_v + s.dim_e) + 1


def max_excess_pullback(
    s: Sheaf, max_degree: int = 720, tries: int = 20, seed: int = 0, samples: int = 3
) -> MaxExcess:
    bound = pullback_bound(s)
    cover = high_abelian_girth_cover(s.base, bound, max_degree, tries, seed)
    up = pullback(cover, s)
    tb = twisted_betti(up, samples=samples, seed=seed)
    degree = classify_morphism(cover).degree or 1
    if tb.h1t % degree:
        raise AssertionError("twisted Betti number of the pullback is not divisible by the degree")
    return MaxExcess(tb.h1t // degree, "pullback", cover, {"degree": degree, "bound": bound, "twisted": tb})


def max_excess_edge_simple(s: Sheaf, samples: int = 3, seed: int = 0) -> MaxExcess:
    if any(d > 1 for d in s.edim.values()):
        raise InputError("edge-simple method needs every edge dimension at most one")
    tb = twisted_betti(s, samples=samples, seed=seed)
    return MaxExcess(tb.h1t, "edge_simple", tb)


def max_excess(s: Sheaf, method: str = "auto", budget: int = DEFAULT_BUDGET, seed: int = 0, **kw) -> MaxExcess:
    """Maximum excess with a certificate; ``method`` is auto, brute, edge_simple or pullback."""
    method = method.replace("-", "_")
    if method == "brute":
        return max_excess_brute(s, budget)
    if method == "edge_simple":
        return max_excess_edge_simple(s, seed=seed)
    if method == "pullback":
        return max_excess_pullback(s, seed=seed, **kw)
    if method != "auto":
        raise InputError(f"unknown method {method}")
    if all(d <= 1 for d in s.edim.values()):
        return max_excess_edge_simple(s, seed=seed)
    if isinstance(s.field, PrimeField) and s.field.p in BRUTE_FIELDS:
        try:
            return max_excess_brute(s, budget)
        except BudgetExceeded:
            pass
    return max_excess_pullback(s, seed=seed, **kw)
