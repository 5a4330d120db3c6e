import itertools

import numpy as np
import pytest

from sheaflab.digraph import (
    GraphMorphism,
    bouquet,
    classify_morphism,
    fibre_product,
    is_isomorphic,
    permutation_cover,
    random_cover,
)
from sheaflab.errors import InputError
from sheaflab.galois import (
    FiniteGroup,
    GaloisCoordinates,
    cayley_action,
    cayley_bigraph,
    cayley_cover,
    cover_from_coordinates,
    monodromy,
    monodromy_image,
    normal_extension,
    parse_group,
    self_fibre_product_pieces,
)

from conftest import connected_digraph


def test_group_builtins():
    z = FiniteGroup.cyclic(5)
    assert z.order == 5 and z.is_abelian() and z.exponent() == 5
    s3 = FiniteGroup.symmetric(3)
    assert s3.order == 6 and not s3.is_abelian() and s3.exponent() == 6
    p = parse_group("product:cyclic:2,cyclic:3")
    assert p.order == 6 and p.is_abelian() and p.exponent() == 6


def test_group_axioms_enforced():
    with pytest.raises(InputError):
        FiniteGroup(["a", "b"], [[0, 0], [0, 1]])
    with pytest.raises(InputError):
        parse_group("dihedral:4")


def test_characters_are_homomorphisms():
    G = parse_group("product:cyclic:2,cyclic:2")
    chars = G.characters(2)
    assert len(chars) == 4
    for chi in chars:
        for a, b in itertools.product(range(4), repeat=2):
            assert chi[G.mul(a, b)] == (chi[a] + chi[b]) % 2


def test_identity_coordinates_give_disjoint_copies():
    base = connected_digraph(np.random.default_rng(0), 3, 4)
    G = FiniteGroup.cyclic(3)
    cover = cover_from_coordinates(GaloisCoordinates(base, G, {e: G.identity for e in base.edges}))
    comps = cover.total.component_subgraphs()
    assert len(comps) == 3 and all(is_isomorphic(c, base) for c in comps)


def test_double_cover_of_b2_connected(b2):
    G = FiniteGroup.cyclic(2)
    c = GaloisCoordinates.from_names(b2, G, {"e1": "1", "e2": "0"})
    cover = cover_from_coordinates(c)
    cover.verify()
    assert monodromy_image(c, "v") == {0, 1}
    assert len(cover.total.components()) == 1
    kind = classify_morphism(cover.projection)
    assert kind.is_covering and kind.degree == 2
    # colour-1 lifts cross the sheets
    for e in cover.projection.edge_fibres()["e1"]:
        assert cover.total.tail[e] != cover.total.head[e]


def test_random_coordinates_are_deterministic(b2):
    G = FiniteGroup.symmetric(3)
    assert GaloisCoordinates.random(b2, G, 5).a == GaloisCoordinates.random(b2, G, 5).a


def test_monodromy_and_tree_normalization():
    rng = np.random.default_rng(1)
    G = FiniteGroup.symmetric(3)
    for seed in range(20):
        base = connected_digraph(rng, 4, 6)
        c = GaloisCoordinates.random(base, G, seed)
        v0 = base.vertices[0]
        assert monodromy(GaloisCoordinates(base, G, {e: G.identity for e in base.edges}), v0, []) == G.identity
        norm, tree = c.spanning_tree_normalized(v0)
        assert all(norm.a[e] == G.identity for e in tree)
        assert len(tree) == len(base.vertices) - 1
        # a change of origin conjugates monodromy at the basepoint
        g = {v: int(rng.integers(G.order)) for v in base.vertices}
        moved = c.change_origin(g)
        loops = [e for e in base.edges if base.tail[e] == v0 == base.head[e]]
        for e in loops:
            expect = G.mul(G.mul(G.inv(g[v0]), c.a[e]), g[v0])
            assert monodromy(moved, v0, [(e, 1)]) == expect
        assert monodromy_image(moved, v0) == {G.mul(G.mul(G.inv(g[v0]), x), g[v0]) for x in monodromy_image(c, v0)}


def test_surjective_monodromy_gives_connected_cover():
    rng = np.random.default_rng(2)
    hits = 0
    for seed in range(60):
        base = connected_digraph(rng, 3, 5)
        G = [FiniteGroup.cyclic(2), FiniteGroup.cyclic(3), FiniteGroup.symmetric(3)][seed % 3]
        c = GaloisCoordinates.random(base, G, seed)
        cover = cover_from_coordinates(c)
        cover.verify()
        image = monodromy_image(c, base.vertices[0])
        n_comp = len(cover.total.components())
        assert n_comp == G.order // len(image)
        hits += len(image) == G.order
    assert hits > 10


def test_cover_roundtrip_through_coordinates():
    rng = np.random.default_rng(3)
    G = FiniteGroup.symmetric(3)
    base = connected_digraph(rng, 3, 5)
    c = GaloisCoordinates.random(base, G, 9)
    cover = cover_from_coordinates(c)
    cover.coordinates = None
    again = cover.coordinates_at({v: f"({v},{G.elements[G.identity]})" for v in base.vertices})
    assert again.a == c.a


def test_self_fibre_product_decomposes():
    rng = np.random.default_rng(4)
    for seed, n in enumerate([2, 3, 4, 2, 3, 4]):
        base = connected_digraph(rng, 3, 5)
        G = FiniteGroup.cyclic(n)
        while True:
            c = GaloisCoordinates.random(base, G, [seed, int(rng.integers(1 << 30))])
            if len(monodromy_image(c, base.vertices[0])) == n:
                break
        cover = cover_from_coordinates(c)
        prod, _, _ = fibre_product(cover.projection, cover.projection)
        comps = prod.component_subgraphs()
        assert len(comps) == n
        assert all(is_isomorphic(k, cover.total) for k in comps)
        pieces = self_fibre_product_pieces(cover)
        assert sorted(map(len, (p.vertices for p in pieces))) == sorted(len(k.vertices) for k in comps)


def test_cayley_bigraph_is_galois_over_b2():
    for G, g1, g2 in [(FiniteGroup.cyclic(3), "1", "2"), (FiniteGroup.symmetric(3), "102", "021")]:
        cay = cayley_bigraph(G, g1, g2)
        kind = classify_morphism(cay.to_bouquet())
        assert kind.is_covering and kind.degree == G.order
        cayley_cover(G, g1, g2).verify()
        vact, _ = cayley_action(G, cay)
        assert all(vact[G.identity][v] == v for v in cay.vertices)


def test_normal_extension_degrees(b2):
    cover, to_g = normal_extension(GraphMorphism.identity(b2))
    assert cover.group.order == 1 and is_isomorphic(cover.total, b2)

    two = permutation_cover(b2, {"e1": [0, 1], "e2": [1, 0]})
    cover, to_g = normal_extension(two)
    assert cover.group.order == 2
    assert all(len(f) == 2 for f in cover.projection.vertex_fibres().values())
    assert classify_morphism(to_g).is_covering

    rng = np.random.default_rng(5)
    while True:
        three = random_cover(b2, 3, rng)
        if len(three.source.components()) == 1:
            break
    cover, to_g = normal_extension(three)
    cover.verify()
    assert all(len(f) == 6 for f in cover.projection.vertex_fibres().values())
    assert classify_morphism(to_g).is_covering


def test_normal_extension_rejects_disconnected(b2):
    split = permutation_cover(b2, {"e1": [0, 1], "e2": [0, 1]})
    with pytest.raises(InputError):
        normal_extension(split)
    with pytest.raises(InputError):
        normal_extension(GraphMorphism.identity(bouquet(1)), n=2)
