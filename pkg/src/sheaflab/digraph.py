"""Finite directed multigraphs, bigraphs, morphisms and their classical invariants."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError


class Digraph:
    """A directed multigraph with string identifiers in declaration order.

    Self-loops and parallel edges are allowed.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Iterable[str] = (),
        tail: Mapping[str, str] | None = None,
        head: Mapping[str, str] | None = None,
    ):
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        tail = dict(tail or {})
        head = dict(head or {})
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex identifier")
        if len(set(self.edges)) != len(self.edges):
            raise InputError("duplicate edge identifier")
        vset = set(self.vertices)
        for e in self.edges:
            if e not in tail or e not in head:
                raise InputError(f"edge {e} lacks an endpoint")
            if tail[e] not in vset or head[e] not in vset:
                raise InputError(f"edge {e} has an undeclared endpoint")
        self.tail = {e: tail[e] for e in self.edges}
        self.head = {e: head[e] for e in self.edges}

    @classmethod
    def from_edges(cls, vertices: Iterable[str], arcs: Iterable[tuple[str, str, str]]) -> "Digraph":
        """Build from ``(edge, tail, head)`` triples."""
        arcs = list(arcs)
        return cls(vertices, [a[0] for a in arcs], {a[0]: a[1] for a in arcs}, {a[0]: a[2] for a in arcs})

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.tail == other.tail
            and self.head == other.head
            and getattr(self, "colour", None) == getattr(other, "colour", None)
        )

    __hash__ = None

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def out_edges(self) -> dict[str, list[str]]:
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[self.tail[e]].append(e)
        return out

    @cached_property
    def in_edges(self) -> dict[str, list[str]]:
        inc = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[self.head[e]].append(e)
        return inc

    def degree(self, v: str) -> int:
        return len(self.out_edges[v]) + len(self.in_edges[v])

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)

    def subgraph(self, vertices: Iterable[str], edges: Iterable[str]) -> "Digraph":
        """Subgraph keeping the ambient declaration order."""
        vs, es = set(vertices), set(edges)
        for e in es:
            if e not in self.edge_index:
                raise InputError(f"unknown edge {e}")
            if self.tail[e] not in vs or self.head[e] not in vs:
                raise InputError(f"edge {e} leaves the vertex set")
        kept_v = [v for v in self.vertices if v in vs]
        if len(kept_v) != len(vs):
            raise InputError("unknown vertex in subgraph")
        kept_e = [e for e in self.edges if e in es]
        return self._like(kept_v, kept_e)

    def induced_subgraph(self, vertices: Iterable[str]) -> "Digraph":
        vs = set(vertices)
        return self.subgraph(vs, [e for e in self.edges if self.tail[e] in vs and self.head[e] in vs])

    def _like(self, vertices, edges) -> "Digraph":
        return Digraph(vertices, edges, {e: self.tail[e] for e in edges}, {e: self.head[e] for e in edges})

    def is_subgraph_of(self, other: "Digraph") -> bool:
        ov = set(other.vertices)
        return all(v in ov for v in self.vertices) and all(
            e in other.edge_index and other.tail[e] == self.tail[e] and other.head[e] == self.head[e]
            for e in self.edges
        )

    def components(self) -> list[tuple[list[str], list[str]]]:
        """Connected components as (vertices, edges) in declaration order."""
        parent = list(range(len(self.vertices)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        idx = self.vertex_index
        for e in self.edges:
            a, b = find(idx[self.tail[e]]), find(idx[self.head[e]])
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[int, tuple[list[str], list[str]]] = {}
        for v in self.vertices:
            groups.setdefault(find(idx[v]), ([], []))[0].append(v)
        for e in self.edges:
            groups[find(idx[self.tail[e]])][1].append(e)
        return list(groups.values())

    def component_subgraphs(self) -> list["Digraph"]:
        return [self.subgraph(vs, es) for vs, es in self.components()]


class Bigraph(Digraph):
    """A digraph whose edges are coloured 1 or 2, i.e. a digraph over the bouquet B2."""

    def __init__(self, vertices, edges=(), tail=None, head=None, colour: Mapping[str, int] | None = None):
        super().__init__(vertices, edges, tail, head)
        colour = dict(colour or {})
        for e in self.edges:
            if colour.get(e) not in (1, 2):
                raise InputError(f"edge {e} needs colour 1 or 2")
        self.colour = {e: colour[e] for e in self.edges}

    @classmethod
    def from_digraph(cls, g: Digraph, colour: Mapping[str, int]) -> "Bigraph":
        return cls(g.vertices, g.edges, g.tail, g.head, colour)

    @property
    def base(self) -> Digraph:
        return Digraph(self.vertices, self.edges, self.tail, self.head)

    def _like(self, vertices, edges) -> "Bigraph":
        return Bigraph(
            vertices, edges, {e: self.tail[e] for e in edges}, {e: self.head[e] for e in edges},
            {e: self.colour[e] for e in edges},
        )

    def to_bouquet(self) -> "GraphMorphism":
        """The colouring as a morphism to B2."""
        b2 = bouquet(2)
        return GraphMorphism(self, b2, {v: "v" for v in self.vertices}, {e: f"e{self.colour[e]}" for e in self.edges})


def bouquet(n: int) -> Digraph:
    """One vertex ``v`` with self-loops ``e1..en``; ``bouquet(2)`` is a Bigraph."""
    edges = [f"e{i}" for i in range(1, n + 1)]
    ends = {e: "v" for e in edges}
    if n == 2:
        return Bigraph(["v"], edges, ends, ends, {"e1": 1, "e2": 2})
    return Digraph(["v"], edges, ends, ends)


def cycle_graph(n: int) -> Digraph:
    vs = [f"c{i}" for i in range(n)]
    return Digraph.from_edges(vs, [(f"a{i}", vs[i], vs[(i + 1) % n]) for i in range(n)])


def disjoint_union(*graphs: Digraph, tags: Iterable[str] | None = None) -> Digraph:
    """Disjoint union with identifiers prefixed by ``tag:``."""
    tags = list(tags) if tags is not None else [str(i) for i in range(len(graphs))]
    vs, es, t, h = [], [], {}, {}
    for tag, g in zip(tags, graphs):
        vs += [f"{tag}:{v}" for v in g.vertices]
        for e in g.edges:
            k = f"{tag}:{e}"
            es.append(k)
            t[k] = f"{tag}:{g.tail[e]}"
            h[k] = f"{tag}:{g.head[e]}"
    return Digraph(vs, es, t, h)


class GraphMorphism:
    """A pair of maps on vertices and edges commuting with tails and heads."""

    def __init__(self, source: Digraph, target: Digraph, vmap: Mapping[str, str], emap: Mapping[str, str]):
        self.source = source
        self.target = target
        self.vmap = {v: vmap[v] for v in source.vertices} if all(v in vmap for v in source.vertices) else None
        self.emap = {e: emap[e] for e in source.edges} if all(e in emap for e in source.edges) else None
        if self.vmap is None or self.emap is None:
            raise InputError("morphism maps are not total")
        tv, te = set(target.vertices), set(target.edge_index)
        for v, w in self.vmap.items():
            if w not in tv:
                raise InputError(f"vertex {v} maps outside the target")
        for e, f in self.emap.items():
            if f not in te:
                raise InputError(f"edge {e} maps outside the target")
            if target.tail[f] != self.vmap[source.tail[e]] or target.head[f] != self.vmap[source.head[e]]:
                raise InputError(f"edge {e} does not commute with tail/head")

    def __repr__(self) -> str:
        return f"GraphMorphism({self.source!r} -> {self.target!r})"

    @classmethod
    def identity(cls, g: Digraph) -> "GraphMorphism":
        return cls(g, g, {v: v for v in g.vertices}, {e: e for e in g.edges})

    @classmethod
    def inclusion(cls, sub: Digraph, g: Digraph) -> "GraphMorphism":
        return cls(sub, g, {v: v for v in sub.vertices}, {e: e for e in sub.edges})

    def compose(self, after: "GraphMorphism") -> "GraphMorphism":
        """``after`` applied after ``self``."""
        return GraphMorphism(
            self.source, after.target,
            {v: after.vmap[w] for v, w in self.vmap.items()},
            {e: after.emap[f] for e, f in self.emap.items()},
        )

    def vertex_fibres(self) -> dict[str, list[str]]:
        fib = {w: [] for w in self.target.vertices}
        for v, w in self.vmap.items():
            fib[w].append(v)
        return fib

    def edge_fibres(self) -> dict[str, list[str]]:
        fib = {f: [] for f in self.target.edges}
        for e, f in self.emap.items():
            fib[f].append(e)
        return fib


@dataclass(frozen=True)
class MorphismKind:
    kind: str  # "covering", "etale" or "neither"
    degree: int | None = None

    @property
    def is_covering(self) -> bool:
        return self.kind == "covering"

    @property
    def is_etale(self) -> bool:
        return self.kind in ("covering", "etale")


def classify_morphism(m: GraphMorphism) -> MorphismKind:
    """Covering if incoming and outgoing edges map bijectively at every vertex, étale if injectively."""
    src, tgt = m.source, m.target
    injective = bijective = True
    for v in src.vertices:
        w = m.vmap[v]
        for local, target_local in ((src.out_edges[v], tgt.out_edges[w]), (src.in_edges[v], tgt.in_edges[w])):
            images = [m.emap[e] for e in local]
            if len(set(images)) != len(images):
                injective = bijective = False
            elif len(images) != len(target_local):
                bijective = False
    if not injective:
        return MorphismKind("neither")
    if bijective:
        sizes = {len(f) for f in m.vertex_fibres().values()} | {len(f) for f in m.edge_fibres().values()}
        degree = sizes.pop() if len(sizes) == 1 else None
        return MorphismKind("covering", degree)
    return MorphismKind("etale")


def fibre_product(f1: GraphMorphism, f2: GraphMorphism) -> tuple[Digraph, GraphMorphism, GraphMorphism]:
    """Fibre product over a shared target with pair identifiers ``(a,b)``.

    When the common target is a Bigraph the product inherits its colouring.
    """
    if f1.target != f2.target:
        raise InputError("fibre product needs morphisms with the same target")
    g1, g2 = f1.source, f2.source
    fib2v = f2.vertex_fibres()
    fib2e = f2.edge_fibres()
    vs, pv1, pv2 = [], {}, {}
    for a in g1.vertices:
        for b in fib2v[f1.vmap[a]]:
            k = f"({a},{b})"
            vs.append(k)
            pv1[k], pv2[k] = a, b
    es, t, h, pe1, pe2 = [], {}, {}, {}, {}
    for a in g1.edges:
        for b in fib2e[f1.emap[a]]:
            k = f"({a},{b})"
            es.append(k)
            t[k] = f"({g1.tail[a]},{g2.tail[b]})"
            h[k] = f"({g1.head[a]},{g2.head[b]})"
            pe1[k], pe2[k] = a, b
    target = f1.target
    if isinstance(target, Bigraph):
        prod: Digraph = Bigraph(vs, es, t, h, {k: target.colour[f1.emap[pe1[k]]] for k in es})
    else:
        prod = Digraph(vs, es, t, h)
    return prod, GraphMorphism(prod, g1, pv1, pe1), GraphMorphism(prod, g2, pv2, pe2)


@dataclass(frozen=True)
class GraphInvariants:
    h0: int
    h1: int
    chi: int
    rho: int
    rho_prime: int
    acyclic_components: int


def invariants(g: Digraph) -> GraphInvariants:
    h0 = h1 = rho = rho_prime = acyclic = 0
    for vs, es in g.components():
        b1 = len(es) - len(vs) + 1
        h0 += 1
        h1 += b1
        rho += max(0, b1 - 1)
        rho_prime = max(rho_prime, b1 - 1)
        acyclic += b1 == 0
    return GraphInvariants(h0, h1, g.euler_characteristic, rho, rho_prime, acyclic)


def reduced_cyclicity(g: Digraph) -> int:
    return invariants(g).rho


def _shortest_cycle(roots, incident, bound: int) -> int | None:
    """Girth of an undirected multigraph given lazily by ``incident(x) -> [(edge_key, y)]``.

    Breadth-first search from every root, truncated at depth ceil(bound/2);
    any closed walk closing a non-tree edge contains a cycle, and a shortest
    cycle through a root is closed by some non-tree edge within that depth.
    """
    depth = math.ceil(bound / 2)
    best = math.inf
    for root in roots:
        dist = {root: 0}
        via = {root: None}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if 2 * dx >= best:
                break
            for key, y in incident(x):
                if key == via[x]:
                    continue
                if y in dist:
                    if via.get(y) != key:
                        best = min(best, dx + dist[y] + 1)
                elif dx + 1 <= depth:
                    dist[y] = dx + 1
                    via[y] = key
                    queue.append(y)
    return int(best) if best <= bound else None


def girth(g: Digraph, bound: int) -> int | None:
    """Length of a shortest undirected cycle, or None if it exceeds ``bound``.

    A self-loop is a cycle of length 1, a pair of parallel edges one of length 2.
    """
    if bound < 1:
        raise InputError("bound must be at least 1")

    def incident(v):
        out = [(e, g.head[e]) for e in g.out_edges[v]]
        return out + [(e, g.tail[e]) for e in g.in_edges[v]]

    return _shortest_cycle(g.vertices, incident, bound)


def abelian_girth(g: Digraph, bound: int, roots: Iterable[str] | None = None) -> int | None:
    """Girth of the universal Abelian cover, or None if it exceeds ``bound``.

    Vertices of the cover are pairs (v, x) with x an integer vector over
    the edges; crossing edge e forward adds the unit vector of e.  Translations
    act transitively on the lifts of each vertex, so rooting the search at
    (v, 0) for every v is exhaustive.  ``roots`` may restrict this to one
    vertex per orbit of a known automorphism group of ``g``.
    """
    if bound < 1:
        raise InputError("bound must be at least 1")
    # x is packed into one integer, sum of c_e * 2**(bits*i_e); a walk within
    # the search depth has |c_e| < 2**(bits-1), so the packing is injective
    bits = max(2, (math.ceil(bound / 2) + 1).bit_length() + 1)
    unit = {e: 1 << (bits * i) for e, i in g.edge_index.items()}

    def incident(node):
        v, x = node
        out = []
        for e in g.out_edges[v]:
            out.append(((e, x), (g.head[e], x + unit[e])))
        for e in g.in_edges[v]:
            y = x - unit[e]
            out.append(((e, y), (g.tail[e], y)))
        return out

    start = g.vertices if roots is None else list(roots)
    return _shortest_cycle([(v, 0) for v in start], incident, bound)


def girths(g: Digraph, bound: int) -> tuple[int | None, int | None]:
    return girth(g, bound), abelian_girth(g, bound)


def is_isomorphic(a: Digraph, b: Digraph) -> bool:
    """Exhaustive backtracking isomorphism test for small multigraphs (colours respected)."""
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return False
    ca = getattr(a, "colour", None)
    cb = getattr(b, "colour", None)
    if (ca is None) != (cb is None):
        return False

    def counts(g: Digraph, col):
        c: dict[tuple, int] = {}
        for e in g.edges:
            key = (g.tail[e], g.head[e], col[e] if col else 0)
            c[key] = c.get(key, 0) + 1
        return c

    na, nb = counts(a, ca), counts(b, cb)
    colours = {k[2] for k in na} | {k[2] for k in nb}

    def signature(g: Digraph, cnt, v):
        sig = []
        for c in sorted(colours):
            outs = sum(n for (t, h, cc), n in cnt.items() if t == v and cc == c and h != v)
            ins = sum(n for (t, h, cc), n in cnt.items() if h == v and cc == c and t != v)
            loops = cnt.get((v, v, c), 0)
            sig.append((outs, ins, loops))
        return tuple(sig)

    sa = {v: signature(a, na, v) for v in a.vertices}
    sb = {v: signature(b, nb, v) for v in b.vertices}
    if sorted(sa.values()) != sorted(sb.values()):
        return False
    order = sorted(a.vertices, key=lambda v: -sum(sum(s) for s in sa[v]))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        for c in colours:
            for u, x in list(mapping.items()) + [(v, w)]:
                if na.get((v, u, c), 0) != nb.get((w, x, c), 0):
                    return False
                if na.get((u, v, c), 0) != nb.get((x, w, c), 0):
                    return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in b.vertices:
            if w in used or sb[w] != sa[v] or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return extend(0)


def random_digraph(rng: np.random.Generator, n_vertices: int, n_edges: int, prefix: str = "") -> Digraph:
    vs = [f"{prefix}v{i}" for i in range(n_vertices)]
    ends = rng.integers(0, n_vertices, size=(n_edges, 2))
    return Digraph.from_edges(vs, [(f"{prefix}e{i}", vs[t], vs[h]) for i, (t, h) in enumerate(ends)])


def permutation_cover(g: Digraph, perms: Mapping[str, Iterable[int]], degree: int | None = None) -> GraphMorphism:
    """Covering of degree n: vertex (v,i), edge (e,i) from (te,i) to (he,perm_e(i))."""
    perms = {e: list(p) for e, p in perms.items()}
    n = degree if degree is not None else len(next(iter(perms.values()))) if perms else 1
    vs = [f"({v},{i})" for v in g.vertices for i in range(n)]
    es, t, h, vmap, emap = [], {}, {}, {}, {}
    for v in g.vertices:
        for i in range(n):
            vmap[f"({v},{i})"] = v
    for e in g.edges:
        p = perms[e]
        if sorted(p) != list(range(n)):
            raise InputError(f"not a permutation for edge {e}")
        for i in range(n):
            k = f"({e},{i})"
            es.append(k)
            t[k] = f"({g.tail[e]},{i})"
            h[k] = f"({g.head[e]},{p[i]})"
            emap[k] = e
    total = Digraph(vs, es, t, h)
    if isinstance(g, Bigraph):
        total = Bigraph.from_digraph(total, {k: g.colour[emap[k]] for k in es})
    return GraphMorphism(total, g, vmap, emap)


def random_cover(g: Digraph, degree: int, rng: np.random.Generator) -> GraphMorphism:
    """Uniformly random permutation covering of the given degree."""
    return permutation_cover(g, {e: rng.permutation(degree).tolist() for e in g.edges}, degree)

