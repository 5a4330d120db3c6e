"""Sheaves of finite-dimensional vector spaces on digraphs and their functors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .digraph import Digraph, GraphMorphism
from .errors import InputError
from .linalg import DEFAULT_PRIME, Field, PrimeField, Subspace, kernel, random_subspace, rank


def _kron(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = field.mul(a[:, None, :, None], b[None, :, None, :])
    return np.asarray(out, dtype=np.int64).reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


@dataclass(frozen=True)
class DimensionProfile:
    vertex: dict
    edge: dict

    @property
    def chi(self) -> int:
        return sum(self.vertex.values()) - sum(self.edge.values())

    @property
    def size(self) -> int:
        return sum(self.vertex.values()) + sum(self.edge.values())


@dataclass(frozen=True)
class HomologySummary:
    h0: int
    h1: int
    chi: int


class Sheaf:
    """Vector spaces ``field**vdim[v]`` and ``field**edim[e]`` with head/tail restriction matrices.

    ``head[e]`` has shape ``(vdim[head(e)], edim[e])`` and likewise for ``tail``.
    Global bases of F(V) and F(E) concatenate the local ones in declaration order.
    """

    def __init__(
        self,
        base: Digraph,
        field: Field,
        vdim: Mapping[str, int],
        edim: Mapping[str, int],
        head: Mapping[str, np.ndarray] | None = None,
        tail: Mapping[str, np.ndarray] | None = None,
    ):
        self.base = base
        self.field = field
        for v, d in vdim.items():
            if v not in base.vertex_index:
                raise InputError(f"unknown vertex {v}")
        for e, d in edim.items():
            if e not in base.edge_index:
                raise InputError(f"unknown edge {e}")
        self.vdim = {v: int(vdim.get(v, 0)) for v in base.vertices}
        self.edim = {e: int(edim.get(e, 0)) for e in base.edges}
        if any(d < 0 for d in self.vdim.values()) or any(d < 0 for d in self.edim.values()):
            raise InputError("negative dimension")
        head = dict(head or {})
        tail = dict(tail or {})
        self.head: dict[str, np.ndarray] = {}
        self.tail: dict[str, np.ndarray] = {}
        for e in base.edges:
            for name, given, store, end in (("head", head, self.head, base.head), ("tail", tail, self.tail, base.tail)):
                shape = (self.vdim[end[e]], self.edim[e])
                if e in given:
                    m = np.asarray(given[e], dtype=np.int64)
                    if m.size == 0 and shape[0] * shape[1] == 0:
                        m = np.zeros(shape, dtype=np.int64)
                    if m.shape != shape:
                        raise InputError(f"{name} map of edge {e} has shape {m.shape}, expected {shape}")
                    store[e] = m
                elif shape[0] * shape[1] == 0:
                    store[e] = np.zeros(shape, dtype=np.int64)
                else:
                    raise InputError(f"{name} map of edge {e} missing (expected shape {shape})")

    def __repr__(self) -> str:
        return f"Sheaf({self.field.name}, dim V={self.dim_v}, dim E={self.dim_e})"

    @property
    def dim_v(self) -> int:
        return sum(self.vdim.values())

    @property
    def dim_e(self) -> int:
        return sum(self.edim.values())

    @property
    def chi(self) -> int:
        return self.dim_v - self.dim_e

    def profile(self) -> DimensionProfile:
        return DimensionProfile(dict(self.vdim), dict(self.edim))

    def vertex_offsets(self) -> dict[str, int]:
        out, k = {}, 0
        for v in self.base.vertices:
            out[v] = k
            k += self.vdim[v]
        return out

    def edge_offsets(self) -> dict[str, int]:
        out, k = {}, 0
        for e in self.base.edges:
            out[e] = k
            k += self.edim[e]
        return out

    def differential_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """The block maps d_h and d_t from F(E) to F(V)."""
        dh = np.zeros((self.dim_v, self.dim_e), dtype=np.int64)
        dt = np.zeros_like(dh)
        vo, eo = self.vertex_offsets(), self.edge_offsets()
        g = self.base
        for e in g.edges:
            c = eo[e]
            w = self.edim[e]
            r = vo[g.head[e]]
            dh[r : r + self.vdim[g.head[e]], c : c + w] = self.head[e]
            r = vo[g.tail[e]]
            dt[r : r + self.vdim[g.tail[e]], c : c + w] = self.tail[e]
        return dh, dt

    def differential(self) -> np.ndarray:
        dh, dt = self.differential_parts()
        return self.field.sub(dh, dt)

    def with_field(self, field: Field) -> "Sheaf":
        """The same integer restriction data read in another field."""
        return Sheaf(
            self.base, field, self.vdim, self.edim,
            {e: field.embed(m) for e, m in self.head.items()},
            {e: field.embed(m) for e, m in self.tail.items()},
        )

    def same_data(self, other: "Sheaf") -> bool:
        return (
            self.base == other.base
            and self.field == other.field
            and self.vdim == other.vdim
            and self.edim == other.edim
            and all(np.array_equal(self.head[e], other.head[e]) for e in self.base.edges)
            and all(np.array_equal(self.tail[e], other.tail[e]) for e in self.base.edges)
        )


def homology(s: Sheaf) -> HomologySummary:
    r = rank(s.differential(), s.field) if s.dim_v and s.dim_e else 0
    return HomologySummary(s.dim_v - r, s.dim_e - r, s.chi)


def constant_sheaf(g: Digraph, dim: int, field: Field | None = None) -> Sheaf:
    field = field or PrimeField(DEFAULT_PRIME)
    eye = np.eye(dim, dtype=np.int64)
    return Sheaf(
        g, field, {v: dim for v in g.vertices}, {e: dim for e in g.edges},
        {e: eye for e in g.edges}, {e: eye for e in g.edges},
    )


def structure_sheaf(g: Digraph, field: Field | None = None) -> Sheaf:
    return constant_sheaf(g, 1, field)


def zero_sheaf(g: Digraph, field: Field | None = None) -> Sheaf:
    return constant_sheaf(g, 0, field)


def pullback(f: GraphMorphism, s: Sheaf) -> Sheaf:
    """Values and restrictions copied along ``f``."""
    if f.target != s.base:
        raise InputError("pullback along a morphism with a different target")
    return Sheaf(
        f.source, s.field,
        {v: s.vdim[w] for v, w in f.vmap.items()},
        {e: s.edim[x] for e, x in f.emap.items()},
        {e: s.head[x] for e, x in f.emap.items()},
        {e: s.tail[x] for e, x in f.emap.items()},
    )


def pushforward_shriek(f: GraphMorphism, s: Sheaf) -> Sheaf:
    """Direct sums over fibres, in source declaration order, with induced block restrictions."""
    if f.source != s.base:
        raise InputError("pushforward of a sheaf living elsewhere")
    src, tgt = f.source, f.target
    vfib, efib = f.vertex_fibres(), f.edge_fibres()
    voff: dict[str, int] = {}
    vdim = {}
    for w, fib in vfib.items():
        k = 0
        for v in fib:
            voff[v] = k
            k += s.vdim[v]
        vdim[w] = k
    edim, head, tail = {}, {}, {}
    for x, fib in efib.items():
        eoff, k = {}, 0
        for e in fib:
            eoff[e] = k
            k += s.edim[e]
        edim[x] = k
        for ends, store, local in ((src.head, head, s.head), (src.tail, tail, s.tail)):
            end = tgt.head[x] if store is head else tgt.tail[x]
            m = np.zeros((vdim[end], k), dtype=np.int64)
            for e in fib:
                v = ends[e]
                m[voff[v] : voff[v] + s.vdim[v], eoff[e] : eoff[e] + s.edim[e]] = local[e]
            store[x] = m
    return Sheaf(tgt, s.field, vdim, edim, head, tail)


def extend_by_zero(f: GraphMorphism, inner: Sheaf) -> Sheaf:
    """The pushforward ``f_!``; for a subgraph inclusion this is extension by zero."""
    return pushforward_shriek(f, inner)


def tensor(a: Sheaf, b: Sheaf) -> Sheaf:
    if a.base != b.base or a.field != b.field:
        raise InputError("tensor product needs sheaves on the same base and field")
    g, F = a.base, a.field
    return Sheaf(
        g, F,
        {v: a.vdim[v] * b.vdim[v] for v in g.vertices},
        {e: a.edim[e] * b.edim[e] for e in g.edges},
        {e: _kron(F, a.head[e], b.head[e]) for e in g.edges},
        {e: _kron(F, a.tail[e], b.tail[e]) for e in g.edges},
    )


def direct_sum(a: Sheaf, b: Sheaf) -> Sheaf:
    if a.base != b.base or a.field != b.field:
        raise InputError("direct sum needs sheaves on the same base and field")
    from .linalg import block_diag

    g = a.base
    return Sheaf(
        g, a.field,
        {v: a.vdim[v] + b.vdim[v] for v in g.vertices},
        {e: a.edim[e] + b.edim[e] for e in g.edges},
        {e: block_diag([a.head[e], b.head[e]]) for e in g.edges},
        {e: block_diag([a.tail[e], b.tail[e]]) for e in g.edges},
    )


class SheafMorphism:
    """Linear maps at every vertex and edge making both restriction squares commute."""

    def __init__(self, source: Sheaf, target: Sheaf, vmaps: Mapping[str, np.ndarray], emaps: Mapping[str, np.ndarray]):
        if source.base != target.base or source.field != target.field:
            raise InputError("sheaf morphism between different bases or fields")
        self.source, self.target = source, target
        g, F = source.base, source.field
        self.vmaps, self.emaps = {}, {}
        for pts, maps, store, sd, td in (
            (g.vertices, vmaps, self.vmaps, source.vdim, target.vdim),
            (g.edges, emaps, self.emaps, source.edim, target.edim),
        ):
            for p in pts:
                shape = (td[p], sd[p])
                m = np.asarray(maps.get(p, np.zeros(shape)), dtype=np.int64).reshape(shape)
                store[p] = m
        for e in g.edges:
            for ends, sr, tr in ((g.head, source.head, target.head), (g.tail, source.tail, target.tail)):
                lhs = F.matmul(tr[e], self.emaps[e])
                rhs = F.matmul(self.vmaps[ends[e]], sr[e])
                if not np.array_equal(lhs, rhs):
                    raise InputError(f"restriction square at edge {e} does not commute")

    @property
    def field(self) -> Field:
        return self.source.field


@dataclass
class SubQuotient:
    kernel: Sheaf
    inclusion: SheafMorphism
    image_dims: DimensionProfile
    quotient: Sheaf
    projection: SheafMorphism


def subsheaf(s: Sheaf, values: Mapping[str, Subspace], edge_values: Mapping[str, Subspace]) -> tuple[Sheaf, SheafMorphism]:
    """The subsheaf with the given subspaces, which must be closed under restriction."""
    g, F = s.base, s.field
    head, tail = {}, {}
    for e in g.edges:
        w = edge_values[e]
        for ends, src, store in ((g.head, s.head, head), (g.tail, s.tail, tail)):
            u = values[ends[e]]
            images = F.matmul(src[e], w.basis.T).T
            if not u.contains(images):
                raise InputError(f"subspaces are not closed under restriction at edge {e}")
            store[e] = u.coordinates(images).T if w.dim else np.zeros((u.dim, 0), dtype=np.int64)
    sub = Sheaf(g, F, {v: values[v].dim for v in g.vertices}, {e: edge_values[e].dim for e in g.edges}, head, tail)
    inc = SheafMorphism(
        sub, s, {v: values[v].basis.T for v in g.vertices}, {e: edge_values[e].basis.T for e in g.edges}
    )
    return sub, inc


def sub_quotient(m: SheafMorphism) -> SubQuotient:
    """Kernel (with its inclusion), pointwise image dimensions and cokernel (with its projection)."""
    s, t, F = m.source, m.target, m.field
    g = s.base
    kv = {v: Subspace.span(F, s.vdim[v], kernel(m.vmaps[v], F)) for v in g.vertices}
    ke = {e: Subspace.span(F, s.edim[e], kernel(m.emaps[e], F)) for e in g.edges}
    ker, inc = subsheaf(s, kv, ke)
    iv = {v: Subspace.span(F, t.vdim[v], m.vmaps[v].T) for v in g.vertices}
    ie = {e: Subspace.span(F, t.edim[e], m.emaps[e].T) for e in g.edges}
    image = DimensionProfile({v: iv[v].dim for v in g.vertices}, {e: ie[e].dim for e in g.edges})
    qv = {v: iv[v].quotient_matrix() for v in g.vertices}
    qe = {e: ie[e].quotient_matrix() for e in g.edges}
    head, tail = {}, {}
    for e in g.edges:
        comp = ie[e].complement_columns()
        head[e] = F.matmul(qv[g.head[e]], t.head[e][:, comp])
        tail[e] = F.matmul(qv[g.tail[e]], t.tail[e][:, comp])
    quot = Sheaf(
        g, F, {v: qv[v].shape[0] for v in g.vertices}, {e: qe[e].shape[0] for e in g.edges}, head, tail
    )
    proj = SheafMorphism(t, quot, qv, qe)
    return SubQuotient(ker, inc, image, quot, proj)


def hom_dim(a: Sheaf, b: Sheaf) -> int:
    """Dimension of the space of sheaf morphisms ``a -> b``."""
    if a.base != b.base or a.field != b.field:
        raise InputError("Hom between sheaves on different bases or fields")
    g, F = a.base, a.field
    offsets, n = {}, 0
    for kind, pts, ad, bd in (("v", g.vertices, a.vdim, b.vdim), ("e", g.edges, a.edim, b.edim)):
        for p in pts:
            offsets[(kind, p)] = n
            n += ad[p] * bd[p]
    blocks = []
    for e in g.edges:
        for ends, ar, br in ((g.head, a.head, b.head), (g.tail, a.tail, b.tail)):
            v = ends[e]
            rows = b.vdim[v] * a.edim[e]
            if rows == 0:
                continue
            eq = np.zeros((rows, n), dtype=np.int64)
            # row-major vec(A X B) = kron(A, B^T) vec(X)
            oe = offsets[("e", e)]
            eq[:, oe : oe + b.edim[e] * a.edim[e]] = _kron(F, br[e], np.eye(a.edim[e], dtype=np.int64))
            ov = offsets[("v", v)]
            part = _kron(F, np.eye(b.vdim[v], dtype=np.int64), ar[e].T)
            eq[:, ov : ov + b.vdim[v] * a.vdim[v]] = F.sub(eq[:, ov : ov + b.vdim[v] * a.vdim[v]], part)
            blocks.append(eq)
    if not blocks:
        return n
    return n - rank(np.vstack(blocks), F)


def random_sheaf(
    g: Digraph,
    field: Field,
    rng: np.random.Generator,
    max_vdim: int = 2,
    max_edim: int = 2,
    min_dim: int = 0,
) -> Sheaf:
    vdim = {v: int(rng.integers(min_dim, max_vdim + 1)) for v in g.vertices}
    edim = {e: int(rng.integers(min_dim, max_edim + 1)) for e in g.edges}
    head = {e: field.random(rng, (vdim[g.head[e]], edim[e])) for e in g.edges}
    tail = {e: field.random(rng, (vdim[g.tail[e]], edim[e])) for e in g.edges}
    return Sheaf(g, field, vdim, edim, head, tail)


def random_subsheaf(s: Sheaf, rng: np.random.Generator) -> tuple[Sheaf, SheafMorphism]:
    """Random edge subspaces, then vertex subspaces enlarged until closed under restriction."""
    g, F = s.base, s.field
    ev = {e: random_subspace(F, s.edim[e], rng) for e in g.edges}
    vv = {v: random_subspace(F, s.vdim[v], rng) for v in g.vertices}
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            for ends, maps in ((g.head, s.head), (g.tail, s.tail)):
                v = ends[e]
                images = F.matmul(maps[e], ev[e].basis.T).T
                if not vv[v].contains(images):
                    vv[v] = vv[v].sum(Subspace.span(F, s.vdim[v], images))
                    changed = True
    return subsheaf(s, vv, ev)
