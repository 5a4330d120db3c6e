from fractions import Fraction

import numpy as np
import pytest

from sheaflab.digraph import bouquet, invariants, random_digraph
from sheaflab.errors import InputError
from sheaflab.galois import FiniteGroup, GaloisCoordinates, cover_from_coordinates
from sheaflab.linalg import ExtensionField, PrimeField
from sheaflab.sheaf import homology, pullback, random_sheaf, structure_sheaf
from sheaflab.twisted import (
    Twist,
    abelian_decomposition_check,
    twisted_betti,
    twisted_differential,
    twisted_ranks,
)

from conftest import unhappy


def b2_double_cover(b2):
    return cover_from_coordinates(GaloisCoordinates.from_names(b2, FiniteGroup.cyclic(2), {"e1": "0", "e2": "1"}))


def test_constant_twists_recover_differentials():
    s = unhappy(101)
    F = s.field
    dh, dt = s.differential_parts()
    ones = Twist(s.base, {"e1": 1, "e2": 1}, F)
    zeros = Twist(s.base, {"e1": 0, "e2": 0}, F)
    assert np.array_equal(twisted_differential(s, ones), s.differential())
    assert np.array_equal(twisted_differential(s, zeros), dh)


def test_unhappy_twisted_matrix_pattern():
    s = unhappy(101)
    p1, p2 = 7, 11
    d = twisted_differential(s, Twist(s.base, {"e1": p1, "e2": p2}, s.field))
    expect = np.array([[1, 0, 1, 0], [0, 1, -p2, 0], [-p1, 0, 0, 1], [0, -p1, 0, -p2]]) % 101
    assert np.array_equal(d, expect)


@pytest.mark.parametrize("p", [None, 2, 3, 101])
def test_unhappy_bundle_and_its_double_cover(b2, p):
    s = unhappy(p)
    tb = twisted_betti(s, samples=3, seed=7)
    assert tb.h1t == 1 and tb.h0t == 1
    up = pullback(b2_double_cover(b2).projection, s)
    assert twisted_betti(up, samples=3, seed=7).h1t == 0


def test_small_fields_use_an_extension():
    tb = twisted_betti(unhappy(2))
    assert tb.field == "GF(2^16)"
    assert tb.failure_bound == Fraction(4, 1 << 16)
    with pytest.raises(InputError):
        twisted_betti(unhappy(2), field=PrimeField(3))
    with pytest.raises(InputError):
        twisted_betti(unhappy(2), field=ExtensionField(2, 3))


def test_structure_sheaf_gives_rho():
    rng = np.random.default_rng(0)
    for _ in range(30):
        g = random_digraph(rng, int(rng.integers(1, 8)), int(rng.integers(0, 12)))
        inv = invariants(g)
        tb = twisted_betti(structure_sheaf(g))
        assert tb.h1t == inv.rho
        assert tb.h0t == inv.chi + inv.rho


def test_report_identities_and_sample_monotonicity():
    rng = np.random.default_rng(1)
    for seed in range(30):
        g = random_digraph(rng, 3, 5)
        s = random_sheaf(g, PrimeField(3), rng)
        tb = twisted_betti(s, samples=4, seed=seed)
        assert tb.h0t - tb.h1t == s.chi
        ranks = twisted_ranks(s, samples=6, seed=seed)
        # samples are the same prefix, so the running maximum never decreases
        assert list(ranks[:4]) == list(tb.ranks)
        running = np.maximum.accumulate(ranks)
        assert all(running[i] <= running[i + 1] for i in range(5))
        # any specialization, twisted or untwisted, is at most the generic rank
        assert s.dim_v - homology(s).h0 <= max(ranks)


def test_thread_count_does_not_change_results(monkeypatch):
    s = unhappy()
    one = twisted_ranks(s, samples=5, seed=3)
    monkeypatch.setenv("SHEAFLAB_THREADS", "4")
    assert twisted_ranks(s, samples=5, seed=3) == one


def test_abelian_decomposition_b2(b2):
    cover = b2_double_cover(b2)
    rep = abelian_decomposition_check(cover, structure_sheaf(b2), q=101)
    assert rep.decomposition_holds and rep.bound_holds
    assert rep.pullback.h1 == 3


def test_trivial_group_decomposition(b2):
    cover = cover_from_coordinates(GaloisCoordinates(b2, FiniteGroup.cyclic(1), {"e1": 0, "e2": 0}))
    s = unhappy(7)
    rep = abelian_decomposition_check(cover, s)
    assert rep.character_sum == (homology(s).h0, homology(s).h1)


def test_abelian_decomposition_random_z3():
    rng = np.random.default_rng(2)
    G = FiniteGroup.cyclic(3)
    for seed in range(15):
        g = random_digraph(rng, 3, 4)
        s = random_sheaf(g, PrimeField(7), rng)
        cover = cover_from_coordinates(GaloisCoordinates.random(g, G, seed))
        rep = abelian_decomposition_check(cover, s)
        assert rep.decomposition_holds
        assert rep.bound_holds


def test_roots_of_unity_required(b2):
    with pytest.raises(InputError):
        abelian_decomposition_check(b2_double_cover(b2), structure_sheaf(b2), q=2)


def test_twist_must_cover_every_edge():
    with pytest.raises(InputError):
        Twist(bouquet(2), {"e1": 1}, PrimeField(5))
