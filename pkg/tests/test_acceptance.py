"""Acceptance criteria, one test per criterion.

Each test prints a ``criterion N: PASS|FAIL`` line.  Run the file directly
(``python tests/test_acceptance.py``) for the summary alone.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import connected_digraph, triangular, unhappy  # noqa: E402
from sheaflab.digraph import Bigraph, fibre_product, invariants, is_isomorphic, random_cover, random_digraph  # noqa: E402
from sheaflab.errors import BudgetExceeded  # noqa: E402
from sheaflab.excess import CompartmentalizedSubspace, excess, max_excess, max_excess_brute, max_excess_subsheaf_oracle  # noqa: E402
from sheaflab.formats import data_file, parse_coordinates, parse_digraph  # noqa: E402
from sheaflab.galois import FiniteGroup, GaloisCoordinates, cayley_bigraph, cover_from_coordinates, monodromy_image  # noqa: E402
from sheaflab.linalg import PrimeField, random_subspace, vandermonde_totally_independent  # noqa: E402
from sheaflab.rho import (  # noqa: E402
    build_kernel,
    generic_excess_experiment,
    shnc_verify,
    subgraphs,
    vertex_family_check,
)
from sheaflab.sheaf import homology, pullback, random_sheaf, random_subsheaf, structure_sheaf, sub_quotient  # noqa: E402
from sheaflab.twisted import abelian_decomposition_check, twisted_betti  # noqa: E402

GF2, GF3 = PrimeField(2), PrimeField(3)


def _b2_double_cover():
    b2 = parse_digraph(data_file("b2.dg").read_text())
    path = data_file("b2_cover2.coords")
    return cover_from_coordinates(parse_coordinates(path.read_text(), b2, path.parent))


def check_1():
    start = time.perf_counter()
    cover = _b2_double_cover()
    # the lifts of e1 are self-loops
    loops = all(cover.total.tail[f] == cover.total.head[f] for f in cover.projection.edge_fibres()["e1"])
    s = unhappy()
    up = pullback(cover.projection, s)
    got = {
        "h1_twist": twisted_betti(s, samples=3, seed=7).h1t,
        "me_gf2": max_excess(unhappy(2), "brute").value,
        "me_gf3": max_excess(unhappy(3), "brute").value,
        "pullback_h1_twist": twisted_betti(up, samples=3, seed=7).h1t,
        "pullback_me_gf2": max_excess(pullback(cover.projection, unhappy(2)), "brute").value,
        "pullback_me_gf3": max_excess(pullback(cover.projection, unhappy(3)), "brute").value,
    }
    elapsed = time.perf_counter() - start
    want = {"h1_twist": 1, "me_gf2": 0, "me_gf3": 0, "pullback_h1_twist": 0, "pullback_me_gf2": 0, "pullback_me_gf3": 0}
    ok = loops and got == want and elapsed < 1.0
    return ok, f"{got} loops={loops} time={elapsed:.2f}s (limit 1s)"


def check_2():
    start = time.perf_counter()
    rng = np.random.default_rng(2002)
    bad = 0
    for _ in range(50):
        g = random_digraph(rng, int(rng.integers(1, 9)), int(rng.integers(0, 13)))
        bad += twisted_betti(structure_sheaf(g)).h1t != invariants(g).rho
    elapsed = time.perf_counter() - start
    return bad == 0 and elapsed < 5.0, f"mismatches={bad}/50 time={elapsed:.2f}s (limit 5s)"


def check_3():
    rng = np.random.default_rng(3003)
    bad_graph = 0
    for _ in range(100):
        g = random_digraph(rng, int(rng.integers(1, 7)), int(rng.integers(0, 10)))
        d = int(rng.integers(1, 5))
        cov = random_cover(g, d, rng)
        a, b = invariants(cov.source), invariants(g)
        bad_graph += (a.chi, a.rho) != (d * b.chi, d * b.rho)
    bad_me, done, skipped = 0, 0, 0
    while done < 30:
        g = random_digraph(rng, int(rng.integers(1, 4)), int(rng.integers(1, 5)))
        s = random_sheaf(g, GF2, rng, max_vdim=2, max_edim=2)
        d = int(rng.integers(2, 4))
        up = pullback(random_cover(g, d, rng), s)
        try:
            top, base = max_excess_brute(up, budget=2 * 10**5).value, max_excess_brute(s).value
        except BudgetExceeded:
            skipped += 1
            continue
        bad_me += top != d * base
        done += 1
    return bad_graph == 0 and bad_me == 0, f"graph violations={bad_graph}/100 excess violations={bad_me}/30 (over-budget draws skipped={skipped})"


def _compartmentalized(s, rng):
    return CompartmentalizedSubspace(s, {v: random_subspace(s.field, s.vdim[v], rng) for v in s.base.vertices})


def check_4():
    rng = np.random.default_rng(4004)
    bad = 0
    for _ in range(500):
        F = [GF2, GF3, PrimeField(7)][int(rng.integers(3))]
        s = random_sheaf(random_digraph(rng, int(rng.integers(1, 5)), int(rng.integers(0, 7))), F, rng)
        a, b = _compartmentalized(s, rng), _compartmentalized(s, rng)
        bad += excess(s, a) + excess(s, b) > excess(s, a.meet(b)) + excess(s, a.join(b))
    return bad == 0, f"violations={bad}/500"


def check_5():
    rng = np.random.default_rng(5005)
    groups = [FiniteGroup.cyclic(n) for n in (2, 3, 4)]
    bad, rejected = 0, 0
    for i in range(20):
        G = groups[i % 3]
        nv = int(rng.integers(1, 4))
        # at least one independent cycle, so some coordinates give a connected cover
        base = connected_digraph(rng, nv, int(rng.integers(nv, 6)))
        # a connected total graph needs surjective monodromy
        while True:
            c = GaloisCoordinates.random(base, G, [5005, i, rejected])
            if len(monodromy_image(c, base.vertices[0])) == G.order:
                break
            rejected += 1
        cover = cover_from_coordinates(c)
        prod, _, _ = fibre_product(cover.projection, cover.projection)
        comps = prod.component_subgraphs()
        bad += not (len(comps) == G.order and all(is_isomorphic(k, cover.total) for k in comps))
    return bad == 0, f"failures={bad}/20 (disconnected coordinate draws redrawn={rejected})"


def check_6():
    rng = np.random.default_rng(6006)
    bad = 0
    for i in range(500):
        F = [GF2, GF3][i % 2]
        g = random_digraph(rng, int(rng.integers(1, 5)), int(rng.integers(0, 6)))
        s = random_sheaf(g, F, rng)
        sub, inc = random_subsheaf(s, rng)
        quot = sub_quotient(inc).quotient
        ha, hb, hc = homology(sub), homology(s), homology(quot)
        bad += not triangular([0, ha.h1, hb.h1, hc.h1, ha.h0, hb.h0, hc.h0, 0])
    return bad == 0, f"violations={bad}/500"


def check_7():
    rng = np.random.default_rng(7007)
    bad = 0
    for i in range(20):
        n = 2 + i % 2
        q = [7, 13, 31][i % 3]
        base = random_digraph(rng, int(rng.integers(1, 4)), int(rng.integers(1, 6)))
        s = random_sheaf(base, PrimeField(q), rng)
        cover = cover_from_coordinates(GaloisCoordinates.random(base, FiniteGroup.cyclic(n), [7007, i]))
        rep = abelian_decomposition_check(cover, s, q=q)
        bad += not (rep.decomposition_holds and rep.bound_holds)
    return bad == 0, f"failures={bad}/20"


def check_8():
    start = time.perf_counter()
    grp = FiniteGroup.cyclic(2)
    G = cayley_bigraph(grp, "1", "1")
    subs = list(subgraphs(G))
    col = [Bigraph.from_digraph(L, {e: G.colour[e] for e in L.edges}) for L in subs]
    disagree = 0
    for L, Lc in zip(subs, col):
        shnc_all = all(shnc_verify(Lc, L2).shnc_holds for L2 in col)
        disagree += vertex_family_check(L, G, grp).holds != shnc_all
    elapsed = time.perf_counter() - start
    return disagree == 0 and elapsed < 30.0, f"subgraphs={len(subs)} disagreements={disagree} time={elapsed:.2f}s (limit 30s)"


def check_9():
    grp = FiniteGroup.cyclic(3)
    G = cayley_bigraph(grp, "1", "2")
    F = PrimeField()
    n_l, bad_family, bad_profile = 0, 0, 0
    for L in subgraphs(G):
        rho = invariants(L).rho
        if rho < 1:
            continue
        n_l += 1
        bad_family += not vertex_family_check(L, G, grp).holds
        for seed in range(10):
            M = vandermonde_totally_independent(rho, grp.elements, F, seed)
            ker = build_kernel(L, G, grp, rho, M, F)
            bad_profile += any(
                ker.values[(kind, p)].dim != len(t) - rho
                for kind, sets in (("v", ker.orbits.vertex), ("e", ker.orbits.edge))
                for p, t in sets.items()
            )
    return bad_family == 0 and bad_profile == 0, f"L with rho>=1: {n_l}; family violations={bad_family} profile mismatches={bad_profile}/{10 * n_l}"


def check_10():
    instances = []
    for grp, g1, g2 in [(FiniteGroup.cyclic(2), "1", "1"), (FiniteGroup.cyclic(3), "1", "2")]:
        G = cayley_bigraph(grp, g1, g2)
        for L in subgraphs(G):
            rho = invariants(L).rho
            if 1 <= rho <= 2:
                instances.append((L, G, grp, rho))
    bad, certified, problems = 0, 0, []
    for i, (L, G, grp, rho) in enumerate(instances):
        modal = []
        for k in range(rho + 1):
            rep = generic_excess_experiment(L, G, grp, k, trials=3 if k else 1, seed=i, q=2)
            if not rep.values:
                rep = generic_excess_experiment(L, G, grp, k, trials=3, seed=i, q=3)
            if not rep.values:
                modal.append(None)
                continue
            certified += len(rep.values)
            if not rep.divisible:
                problems.append(("divisibility", grp.order, L.edges, k))
            if k == 0 and rep.values != [rho * grp.order] * len(rep.values):
                problems.append(("k=0", grp.order, L.edges, rep.values))
            modal.append(rep.modal)
        if modal[-1] != 0:
            problems.append(("k=rho", grp.order, L.edges, modal))
        chain = [m for m in modal if m is not None]
        if any(a < b or (a == b and a > 0) for a, b in zip(chain, chain[1:])):
            problems.append(("chain", grp.order, L.edges, modal))
    bad = len(problems)
    return bad == 0, f"instances={len(instances)} certified values={certified} problems={problems[:3]}"


def check_11():
    rng = np.random.default_rng(1111)
    bad_oracle = 0
    for _ in range(200):
        g = random_digraph(rng, int(rng.integers(1, 4)), int(rng.integers(0, 5)))
        s = random_sheaf(g, GF2, rng, max_vdim=2, max_edim=2)
        bad_oracle += max_excess(s, "brute").value != max_excess_subsheaf_oracle(s)
    bad_simple = 0
    for _ in range(100):
        g = random_digraph(rng, int(rng.integers(1, 4)), int(rng.integers(0, 6)))
        s = random_sheaf(g, GF2, rng, max_vdim=2, max_edim=1)
        bad_simple += max_excess(s, "edge-simple").value != max_excess(s, "brute").value
    return bad_oracle == 0 and bad_simple == 0, f"oracle mismatches={bad_oracle}/200 edge-simple mismatches={bad_simple}/100"


CHECKS = {n: globals()[f"check_{n}"] for n in range(1, 12)}


def _line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n, capsys):
    ok, detail = CHECKS[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(n, *CHECKS[n]()) for n in sorted(CHECKS)]
    for n, ok, detail in results:
        print(_line(n, ok, detail))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
