"""Twists, twisted differentials and twisted Betti numbers by random specialization."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .digraph import Digraph
from .errors import InputError
from .galois import GaloisCover
from .linalg import Field, PrimeField, generic_field, prime_factors, rank
from .sheaf import HomologySummary, Sheaf, homology, pullback

# a working field must have at least this many elements per unit of degree
SAFETY_FACTOR = 16


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SHEAFLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Twist:
    """A scalar per edge, multiplying the tail restriction of that edge."""

    base: Digraph
    psi: Mapping[str, int]
    field: Field

    def __post_init__(self):
        missing = [e for e in self.base.edges if e not in self.psi]
        if missing:
            raise InputError(f"twist undefined on edges {missing}")


@dataclass(frozen=True)
class TwistedBetti:
    h0t: int
    h1t: int
    samples: int
    failure_bound: Fraction
    field: str
    ranks: tuple[int, ...]


def twisted_differential(s: Sheaf, t: Twist) -> np.ndarray:
    """d_h minus d_t with the columns of edge e scaled by psi(e), over the twist's field."""
    if t.base != s.base:
        raise InputError("twist lives on a different digraph")
    F = t.field
    if F.characteristic != s.field.characteristic:
        raise InputError("twist field has a different characteristic from the sheaf")
    dh, dt = s.differential_parts()
    dh, dt = F.embed(dh), F.embed(dt)
    scale = np.zeros(s.dim_e, dtype=np.int64)
    offs = s.edge_offsets()
    for e in s.base.edges:
        scale[offs[e] : offs[e] + s.edim[e]] = t.psi[e]
    return F.sub(dh, F.mul(dt, scale[None, :]))


def twisted_homology(s: Sheaf, t: Twist) -> HomologySummary:
    r = rank(twisted_differential(s, t), t.field) if s.dim_v and s.dim_e else 0
    return HomologySummary(s.dim_v - r, s.dim_e - r, s.chi)


def working_field(s: Sheaf, field: Field | None = None) -> Field:
    """Field for generic specialization: the sheaf's own, or an extension of the same characteristic."""
    deg = min(s.dim_v, s.dim_e)
    if field is None:
        field = generic_field(s.field)
    if field.characteristic != s.field.characteristic:
        raise InputError("working field must share the sheaf's characteristic")
    if field.order <= deg * SAFETY_FACTOR:
        raise InputError(f"{field.name} is too small for generic rank of degree {deg}")
    return field


def _sample_rank(s: Sheaf, field: Field, seed: int, index: int) -> int:
    rng = np.random.default_rng([seed, index])
    psi = field.random(rng, len(s.base.edges))
    twist = Twist(s.base, dict(zip(s.base.edges, psi.tolist())), field)
    return rank(twisted_differential(s, twist), field)


def twisted_ranks(s: Sheaf, samples: int = 3, seed: int = 0, field: Field | None = None) -> list[int]:
    """Ranks of the twisted differential at ``samples`` seeded random twists."""
    field = working_field(s, field)
    if s.dim_v == 0 or s.dim_e == 0:
        return [0] * samples
    workers = min(thread_count(), samples)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda i: _sample_rank(s, field, seed, i), range(samples)))
    return [_sample_rank(s, field, seed, i) for i in range(samples)]


def twisted_betti(s: Sheaf, samples: int = 3, seed: int = 0, field: Field | None = None) -> TwistedBetti:
    """Generic twisted Betti numbers, estimated as the maximum rank over random twists.

    Each sample underestimates the generic rank with probability at most
    deg/|F|, deg = min(dim F(V), dim F(E)), since the entries are of degree
    at most one in each twist variable.
    """
    if samples < 1:
        raise InputError("need at least one sample")
    field = working_field(s, field)
    ranks = twisted_ranks(s, samples, seed, field)
    r = max(ranks)
    deg = min(s.dim_v, s.dim_e)
    return TwistedBetti(s.dim_v - r, s.dim_e - r, samples, Fraction(deg, field.order), field.name, tuple(ranks))


def primitive_root(q: int) -> int:
    factors = prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // r, q) != 1 for r in factors):
            return g
    return 1


@dataclass(frozen=True)
class AbelianReport:
    degree: int
    pullback: HomologySummary
    character_sum: tuple[int, int]
    twisted: TwistedBetti
    decomposition_holds: bool
    bound_holds: bool


def abelian_decomposition_check(cover: GaloisCover, s: Sheaf, q: int | None = None, seed: int = 0) -> AbelianReport:
    """Compare h_i of the pullback with the sum over characters of character-twisted h_i.

    The sheaf data is read in GF(q), which must contain |G| distinct |G|-th roots of unity.
    """
    G = cover.group
    if not G.is_abelian():
        raise InputError("the Galois group must be abelian")
    if s.base != cover.base:
        raise InputError("sheaf must live on the base of the cover")
    n = G.order
    if q is None:
        q = s.field.characteristic
    field = PrimeField(q)
    if (q - 1) % n:
        raise InputError(f"GF({q}) lacks primitive {n}-th roots of unity")
    s = s.with_field(field) if s.field != field else s
    omega = pow(primitive_root(q), (q - 1) // n, q)
    powers = [pow(omega, k, q) for k in range(n)]
    coords = cover.coordinates_at()
    up = homology(pullback(cover.projection, s))
    h0 = h1 = 0
    for chi in G.characters(n):
        psi = {e: powers[chi[coords.a[e]]] for e in s.base.edges}
        h = twisted_homology(s, Twist(s.base, psi, field))
        h0 += h.h0
        h1 += h.h1
    tb = twisted_betti(s, seed=seed)
    return AbelianReport(
        degree=n,
        pullback=up,
        character_sum=(h0, h1),
        twisted=tb,
        decomposition_holds=(h0, h1) == (up.h0, up.h1),
        bound_holds=up.h0 >= n * tb.h0t and up.h1 >= n * tb.h1t,
    )
