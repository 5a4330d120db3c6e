"""Finite groups, Galois covers from coordinates, Cayley bigraphs and normal extensions."""

from __future__ import annotations

import itertools
from collections import deque
from typing import Mapping, Sequence

import numpy as np

from .digraph import Bigraph, Digraph, GraphMorphism, classify_morphism
from .errors import InputError

MAX_GROUP_ORDER = 5040


class FiniteGroup:
    """A finite group stored as a multiplication table over indices ``0..n-1``.

    ``table[a, b]`` is the index of the product ``a*b``.
    """

    def __init__(self, elements: Sequence[str], table, check: bool = True, seed: int = 0):
        self.elements = tuple(elements)
        n = len(self.elements)
        if n == 0 or n > MAX_GROUP_ORDER:
            raise InputError(f"group order {n} outside 1..{MAX_GROUP_ORDER}")
        if len(set(self.elements)) != n:
            raise InputError("duplicate group element")
        self.table = np.asarray(table, dtype=np.int64)
        if self.table.shape != (n, n) or self.table.min() < 0 or self.table.max() >= n:
            raise InputError("malformed multiplication table")
        self.index = {g: i for i, g in enumerate(self.elements)}
        ids = [i for i in range(n) if np.array_equal(self.table[i], np.arange(n))]
        if not ids:
            raise InputError("no identity element")
        self.identity = ids[0]
        inv = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.table == self.identity)
        inv[rows] = cols
        self.inverse = inv
        if check:
            self._check_axioms(seed)

    def _check_axioms(self, seed: int) -> None:
        n = self.order
        t = self.table
        if not np.array_equal(t[:, self.identity], np.arange(n)):
            raise InputError("identity is not two-sided")
        if (self.inverse < 0).any():
            raise InputError("some element has no inverse")
        for row in t:
            if len(set(row.tolist())) != n:
                raise InputError("table is not a Latin square")
        if n <= 64:
            a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        else:
            a, b, c = np.random.default_rng(seed).integers(0, n, size=(3, 20000))
        if not np.array_equal(t[t[a, b], c], t[a, t[b, c]]):
            raise InputError("multiplication is not associative")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.elements == other.elements and np.array_equal(
            self.table, other.table
        )

    __hash__ = None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def exponent(self) -> int:
        out = 1
        for a in range(self.order):
            out = np.lcm(out, self.element_order(a))
        return int(out)

    def subgroup_generated(self, gens: Sequence[int]) -> set[int]:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(g, x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        r = np.arange(n)
        return cls([str(i) for i in range(n)], (r[:, None] + r[None, :]) % n, check=False)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        """Permutations of 0..n-1 as words; the product ``p*q`` is ``p`` after ``q``."""
        perms = list(itertools.permutations(range(n)))
        pos = {p: i for i, p in enumerate(perms)}
        table = [[pos[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
        return cls(["".join(map(str, p)) for p in perms], table, check=False)

    @classmethod
    def from_permutations(cls, gens: Sequence[Sequence[int]], max_order: int = MAX_GROUP_ORDER) -> "FiniteGroup | None":
        """The group generated by permutations of 0..m-1, or None once it exceeds ``max_order``.

        Elements are named by their images; products compose as in :meth:`symmetric`.
        """
        m = len(gens[0])
        gens = [tuple(int(x) for x in g) for g in gens]
        ident = tuple(range(m))
        pos = {ident: 0}
        perms = [ident]
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = tuple(g[i] for i in x)
                if y not in pos:
                    if len(perms) >= max_order:
                        return None
                    pos[y] = len(perms)
                    perms.append(y)
                    queue.append(y)
        arr = np.array(perms)
        # row p, column q holds p after q
        comp = arr[:, None, :].repeat(len(perms), 1)
        comp = np.take_along_axis(comp, np.broadcast_to(arr[None, :, :], comp.shape), axis=2)
        table = [[pos[tuple(r)] for r in row] for row in comp.tolist()]
        sep = "" if m <= 10 else ","
        return cls([sep.join(map(str, p)) for p in perms], table, check=False)

    @classmethod
    def direct_product(cls, a: "FiniteGroup", b: "FiniteGroup") -> "FiniteGroup":
        na, nb = a.order, b.order
        names = [f"({x},{y})" for x in a.elements for y in b.elements]
        i, j = np.meshgrid(np.arange(na * nb), np.arange(na * nb), indexing="ij")
        table = a.table[i // nb, j // nb] * nb + b.table[i % nb, j % nb]
        return cls(names, table, check=False)

    def characters(self, n: int) -> list[list[int]]:
        """All homomorphisms into the cyclic group of order ``n`` (a multiple of the exponent).

        A character is a list of exponents k_g, read as omega**k_g for a primitive n-th root omega.
        """
        if not self.is_abelian():
            raise InputError("characters requested for a non-abelian group")
        if n % self.exponent():
            raise InputError(f"{n} is not a multiple of the group exponent")
        gens: list[int] = []
        span = {self.identity}
        for g in range(self.order):
            if g not in span:
                gens.append(g)
                span = self.subgroup_generated(gens)
        out = []
        for values in itertools.product(range(n), repeat=len(gens)):
            chi = {self.identity: 0}
            queue = deque([self.identity])
            ok = True
            while queue and ok:
                x = queue.popleft()
                for g, val in zip(gens, values):
                    y = self.mul(g, x)
                    v = (chi[x] + val) % n
                    if y in chi:
                        if chi[y] != v:
                            ok = False
                            break
                    else:
                        chi[y] = v
                        queue.append(y)
            if ok:
                out.append([chi[g] for g in range(self.order)])
        return out


def parse_group(desc: str, table_loader=None) -> FiniteGroup:
    """``cyclic:<n>``, ``product:cyclic:<n>,cyclic:<m>``, ``symmetric:<n>`` or ``table:<file>``."""
    desc = desc.strip()
    try:
        if desc.startswith("cyclic:"):
            return FiniteGroup.cyclic(int(desc.split(":", 1)[1]))
        if desc.startswith("symmetric:"):
            return FiniteGroup.symmetric(int(desc.split(":", 1)[1]))
        if desc.startswith("product:"):
            parts = [parse_group(p) for p in desc[len("product:") :].split(",")]
            out = parts[0]
            for p in parts[1:]:
                out = FiniteGroup.direct_product(out, p)
            return out
        if desc.startswith("table:"):
            if table_loader is None:
                raise InputError("table groups need a file loader")
            return table_loader(desc.split(":", 1)[1])
    except ValueError as exc:
        raise InputError(f"bad group description {desc!r}: {exc}") from exc
    raise InputError(f"unknown group description {desc!r}")


class GaloisCoordinates:
    """A group element ``a[e]`` (stored as an index) for every edge of the base."""

    def __init__(self, base: Digraph, group: FiniteGroup, a: Mapping[str, int]):
        missing = [e for e in base.edges if e not in a]
        if missing:
            raise InputError(f"coordinates missing for edges {missing}")
        self.base = base
        self.group = group
        self.a = {e: int(a[e]) for e in base.edges}

    @classmethod
    def from_names(cls, base: Digraph, group: FiniteGroup, names: Mapping[str, str]) -> "GaloisCoordinates":
        try:
            return cls(base, group, {e: group.index[names[e]] for e in names})
        except KeyError as exc:
            raise InputError(f"unknown group element {exc}") from exc

    @classmethod
    def random(cls, base: Digraph, group: FiniteGroup, seed) -> "GaloisCoordinates":
        rng = np.random.default_rng(seed)
        return cls(base, group, {e: int(x) for e, x in zip(base.edges, rng.integers(0, group.order, len(base.edges)))})

    def change_origin(self, g: Mapping[str, int]) -> "GaloisCoordinates":
        """Coordinates after moving the origin of each fibre: a_e -> g(he)^-1 a_e g(te)."""
        G = self.group
        return GaloisCoordinates(
            self.base, G,
            {e: G.mul(G.mul(G.inv(g[self.base.head[e]]), x), g[self.base.tail[e]]) for e, x in self.a.items()},
        )

    def spanning_tree_normalized(self, root: str | None = None) -> tuple["GaloisCoordinates", set[str]]:
        """Change of origin making every edge of a spanning forest trivial; returns the tree edges too.

        The forest is grown breadth-first, starting at ``root`` when given; tree roots keep their origin.
        """
        G, base = self.group, self.base
        g: dict[str, int] = {}
        tree: set[str] = set()
        starts = ([root] if root is not None else []) + list(base.vertices)
        for r in starts:
            if r in g:
                continue
            g[r] = G.identity
            queue = deque([r])
            while queue:
                v = queue.popleft()
                for e in base.out_edges[v]:
                    w = base.head[e]
                    if w not in g:
                        g[w] = G.mul(self.a[e], g[v])
                        tree.add(e)
                        queue.append(w)
                for e in base.in_edges[v]:
                    w = base.tail[e]
                    if w not in g:
                        g[w] = G.mul(G.inv(self.a[e]), g[v])
                        tree.add(e)
                        queue.append(w)
        return self.change_origin(g), tree


def monodromy(c: GaloisCoordinates, basepoint: str, walk: Sequence[tuple[str, int]]) -> int:
    """Product ``a_{e_k} ... a_{e_1}`` along a closed walk of oriented edges ``(edge, +1|-1)``."""
    G, base = c.group, c.base
    if basepoint not in base.vertex_index:
        raise InputError(f"unknown basepoint {basepoint}")
    here, acc = basepoint, G.identity
    for step, (e, sign) in enumerate(walk):
        if e not in base.edge_index or sign not in (1, -1):
            raise InputError(f"bad walk step {step}: {(e, sign)}")
        start, end = (base.tail[e], base.head[e]) if sign == 1 else (base.head[e], base.tail[e])
        if start != here:
            raise InputError(f"walk step {step} is not incident to {here}")
        x = c.a[e] if sign == 1 else G.inv(c.a[e])
        acc = G.mul(x, acc)
        here = end
    if here != basepoint:
        raise InputError("walk is not closed")
    return acc


def monodromy_image(c: GaloisCoordinates, basepoint: str) -> set[int]:
    """Subgroup of monodromies of closed walks at ``basepoint``.

    After normalizing along a spanning tree rooted there, each non-tree edge
    carries the monodromy of its fundamental cycle.
    """
    normalized, tree = c.spanning_tree_normalized(basepoint)
    base = c.base
    comp = next(vs for vs, _ in base.components() if basepoint in vs)
    comp = set(comp)
    gens = [normalized.a[e] for e in base.edges if e not in tree and base.tail[e] in comp]
    return c.group.subgroup_generated(gens)


class GaloisCover:
    """A covering ``projection: total -> base`` with a right action of ``group`` by automorphisms.

    ``vaction[g][x]`` and ``eaction[g][x]`` give the image of vertex/edge ``x`` under ``g``.
    """

    def __init__(
        self,
        projection: GraphMorphism,
        group: FiniteGroup,
        vaction: Sequence[Mapping[str, str]],
        eaction: Sequence[Mapping[str, str]],
        coordinates: GaloisCoordinates | None = None,
        check: bool = True,
    ):
        self.projection = projection
        self.total = projection.source
        self.base = projection.target
        self.group = group
        self.vaction = [dict(m) for m in vaction]
        self.eaction = [dict(m) for m in eaction]
        self.coordinates = coordinates
        if check:
            self.verify()

    def act(self, g: int) -> GraphMorphism:
        return GraphMorphism(self.total, self.total, self.vaction[g], self.eaction[g])

    def verify(self) -> None:
        kind = classify_morphism(self.projection)
        if not kind.is_covering:
            raise InputError("projection is not a covering")
        G, p = self.group, self.projection
        for g in range(G.order):
            m = self.act(g)
            if any(p.vmap[m.vmap[v]] != p.vmap[v] for v in self.total.vertices):
                raise InputError("action does not preserve vertex fibres")
            if any(p.emap[m.emap[e]] != p.emap[e] for e in self.total.edges):
                raise InputError("action does not preserve edge fibres")
        for g in range(G.order):
            for h in range(G.order):
                gh = G.mul(g, h)
                # right action: x(gh) = (xg)h
                for x in self.total.vertices:
                    if self.vaction[gh][x] != self.vaction[h][self.vaction[g][x]]:
                        raise InputError("vertex action is not a right action")
                for x in self.total.edges:
                    if self.eaction[gh][x] != self.eaction[h][self.eaction[g][x]]:
                        raise InputError("edge action is not a right action")
        for fibres, action in ((p.vertex_fibres(), self.vaction), (p.edge_fibres(), self.eaction)):
            for fib in fibres.values():
                if len(fib) != G.order:
                    raise InputError("fibre size differs from group order")
                for x in fib:
                    if len({action[g][x] for g in range(G.order)}) != G.order:
                        raise InputError("action is not simply transitive on a fibre")

    def coordinates_at(self, origins: Mapping[str, str] | None = None) -> GaloisCoordinates:
        """Galois coordinates read off from a choice of origin in each vertex fibre."""
        if self.coordinates is not None and origins is None:
            return self.coordinates
        G, p = self.group, self.projection
        fib = p.vertex_fibres()
        origins = dict(origins or {})
        label: dict[str, int] = {}
        for v in self.base.vertices:
            o = origins.get(v, fib[v][0])
            for g in range(G.order):
                label[self.vaction[g][o]] = g
        a = {}
        lifts = p.edge_fibres()
        for e in self.base.edges:
            f = lifts[e][0]
            t, h = label[self.total.tail[f]], label[self.total.head[f]]
            a[e] = G.mul(h, G.inv(t))
        return GaloisCoordinates(self.base, G, a)


def cover_from_coordinates(c: GaloisCoordinates) -> GaloisCover:
    """Total graph V x G, E x G with tails (te, x) and heads (he, a_e x); right action (P, x)g = (P, xg)."""
    G, base = c.group, c.base
    names = G.elements
    vs = [f"({v},{names[x]})" for v in base.vertices for x in range(G.order)]
    es, t, h, vmap, emap = [], {}, {}, {}, {}
    for v in base.vertices:
        for x in range(G.order):
            vmap[f"({v},{names[x]})"] = v
    for e in base.edges:
        for x in range(G.order):
            k = f"({e},{names[x]})"
            es.append(k)
            t[k] = f"({base.tail[e]},{names[x]})"
            h[k] = f"({base.head[e]},{names[G.mul(c.a[e], x)]})"
            emap[k] = e
    total = Digraph(vs, es, t, h)
    if isinstance(base, Bigraph):
        total = Bigraph.from_digraph(total, {k: base.colour[emap[k]] for k in es})
    proj = GraphMorphism(total, base, vmap, emap)
    vaction = [
        {f"({v},{names[x]})": f"({v},{names[G.mul(x, g)]})" for v in base.vertices for x in range(G.order)}
        for g in range(G.order)
    ]
    eaction = [
        {f"({e},{names[x]})": f"({e},{names[G.mul(x, g)]})" for e in base.edges for x in range(G.order)}
        for g in range(G.order)
    ]
    return GaloisCover(proj, G, vaction, eaction, coordinates=c, check=False)


def self_fibre_product_pieces(cover: GaloisCover) -> list[Digraph]:
    """The pieces {(x, xg)} of K x_G K, one per group element, each isomorphic to K."""
    from .digraph import fibre_product

    prod, _, _ = fibre_product(cover.projection, cover.projection)
    K = cover.total
    pieces = []
    for g in range(cover.group.order):
        vs = [f"({x},{cover.vaction[g][x]})" for x in K.vertices]
        es = [f"({x},{cover.eaction[g][x]})" for x in K.edges]
        pieces.append(prod.subgraph(vs, es))
    return pieces


def cayley_bigraph(group: FiniteGroup, g1, g2) -> Bigraph:
    """Vertices are group elements; edge ``(g,i)`` has colour i, tail g and head g_i g."""
    gens = []
    for x in (g1, g2):
        gens.append(group.index[x] if isinstance(x, str) else int(x))
    names = group.elements
    es, t, h, col = [], {}, {}, {}
    for i, gi in enumerate(gens, start=1):
        for g in range(group.order):
            k = f"({names[g]},{i})"
            es.append(k)
            t[k] = names[g]
            h[k] = names[group.mul(gi, g)]
            col[k] = i
    order = sorted(es, key=lambda k: (group.index[t[k]], col[k]))
    return Bigraph(list(names), order, t, h, col)


def cayley_action(group: FiniteGroup, cayley: Bigraph) -> tuple[list[dict], list[dict]]:
    """Right action h -> hg, (h,i) -> (hg,i) on a Cayley bigraph."""
    names = group.elements
    vact, eact = [], []
    for g in range(group.order):
        vact.append({names[x]: names[group.mul(x, g)] for x in range(group.order)})
        eact.append({
            f"({names[x]},{i})": f"({names[group.mul(x, g)]},{i})" for x in range(group.order) for i in (1, 2)
        })
    return vact, eact


def cayley_cover(group: FiniteGroup, g1, g2) -> GaloisCover:
    cay = cayley_bigraph(group, g1, g2)
    vact, eact = cayley_action(group, cay)
    return GaloisCover(cay.to_bouquet(), group, vact, eact, check=False)


def normal_extension(pi: GraphMorphism, n: int | None = None) -> tuple[GaloisCover, GraphMorphism]:
    """Gross's construction: distinct-coordinate tuples in the n-fold fibre power over the base.

    ``n`` defaults to the degree of ``pi`` (equal to |V_G| over a one-vertex base).
    Returns the S_n cover of the base together with the first-coordinate map to G.
    """
    kind = classify_morphism(pi)
    if not kind.is_covering or kind.degree is None:
        raise InputError("normal extension needs a covering of constant degree")
    G, B = pi.source, pi.target
    if len(G.components()) != 1:
        raise InputError("normal extension needs a connected cover")
    d = kind.degree
    if n is None:
        n = d
    if n != d:
        raise InputError(f"tuple length {n} must equal the covering degree {d}")
    if n > 7:
        raise InputError("normal extension limited to degree at most 7")
    sym = FiniteGroup.symmetric(n)
    perms = [tuple(int(c) for c in w) for w in sym.elements]
    vfib = pi.vertex_fibres()

    def name(parts) -> str:
        return "(" + ",".join(parts) + ")"

    vs, vmap, first_v, vtuple = [], {}, {}, {}
    for b in B.vertices:
        for tup in itertools.permutations(vfib[b]):
            k = name(tup)
            vs.append(k)
            vmap[k] = b
            first_v[k] = tup[0]
            vtuple[k] = tup
    out_lift = {(G.tail[e], pi.emap[e]): e for e in G.edges}
    es, t, h, emap, first_e, etuple = [], {}, {}, {}, {}, {}
    for f in B.edges:
        for tails in itertools.permutations(vfib[B.tail[f]]):
            lifts = tuple(out_lift[(x, f)] for x in tails)
            k = name(lifts)
            es.append(k)
            t[k] = name(tails)
            h[k] = name(tuple(G.head[e] for e in lifts))
            emap[k] = f
            first_e[k] = lifts[0]
            etuple[k] = lifts
    total = Digraph(vs, es, t, h)
    if isinstance(B, Bigraph):
        total = Bigraph.from_digraph(total, {k: B.colour[emap[k]] for k in es})
    proj = GraphMorphism(total, B, vmap, emap)
    # tuple x acted on by sigma has coordinates x_sigma(1), ..., x_sigma(n)
    vaction = [{k: name(tuple(tup[s[i]] for i in range(n))) for k, tup in vtuple.items()} for s in perms]
    eaction = [{k: name(tuple(tup[s[i]] for i in range(n))) for k, tup in etuple.items()} for s in perms]
    cover = GaloisCover(proj, sym, vaction, eaction)
    return cover, GraphMorphism(total, G, first_v, first_e)
