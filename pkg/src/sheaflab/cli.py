"""Command-line front end.

Every command prints flat ``key=value`` lines, optionally followed by witness
blocks in the text formats of :mod:`sheaflab.formats`.  Exit codes: 0 all
checks pass, 1 mathematical violation (witness printed), 2 input error,
3 budget exhausted or everything skipped.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import formats
from .digraph import Bigraph, classify_morphism, fibre_product, girths, invariants
from .errors import BudgetExceeded, InputError
from .excess import DEFAULT_BUDGET, CompartmentalizedSubspace, max_excess
from .galois import cayley_bigraph, cover_from_coordinates, monodromy_image, normal_extension, parse_group
from .linalg import DEFAULT_PRIME, PrimeField, is_prime, vandermonde_totally_independent
from .rho import build_kernel, generic_excess_experiment, pair_graph, shnc_verify, stallings_core, vertex_family_check
from .sheaf import homology, pullback
from .twisted import twisted_betti

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.code = EXIT_OK

    def put(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = int(value)
        self.lines.append(f"{key}={value}")

    def block(self, kind: str, text: str) -> None:
        self.lines.append(f"begin {kind}")
        self.lines.extend(text.rstrip("\n").splitlines())
        self.lines.append(f"end {kind}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error={message}")
        raise SystemExit(EXIT_INPUT)


# ---- loaders


def load_graph(path: str, bigraph: bool = False):
    return formats.read_text(path, lambda t: formats.parse_digraph(t, require_colour=bigraph))


def load_sheaf(path: str, prime: int | None = None):
    if prime is not None and not is_prime(prime):
        raise InputError(f"{prime} is not prime")
    return formats.read_text(path, lambda t: formats.parse_sheaf(t, Path(path).parent, prime))


def load_cover(base, path: str):
    coords = formats.read_text(path, lambda t: formats.parse_coordinates(t, base, Path(path).parent))
    return cover_from_coordinates(coords)


def maybe_pullback(s, coords_path: str | None, rep: Report):
    if not coords_path:
        return s
    cover = load_cover(s.base, coords_path)
    rep.put("pullback_degree", cover.group.order)
    return pullback(cover.projection, s)


def _cayley(args):
    group = parse_group(args.group)
    for g in (args.g1, args.g2):
        if g not in group.index:
            raise InputError(f"{g} is not an element of {args.group}")
    G = cayley_bigraph(group, args.g1, args.g2)
    L = load_graph(args.subgraph)
    if not L.is_subgraph_of(G):
        raise InputError("subgraph file does not describe a subgraph of the Cayley bigraph")
    return group, G, Bigraph.from_digraph(L, {e: G.colour[e] for e in L.edges})


def _put_invariants(rep: Report, g, prefix: str = "") -> None:
    inv = invariants(g)
    rep.put(prefix + "h0", inv.h0)
    rep.put(prefix + "h1", inv.h1)
    rep.put(prefix + "chi", inv.chi)
    rep.put(prefix + "rho", inv.rho)
    rep.put(prefix + "rho_prime", inv.rho_prime)


# ---- commands


def cmd_invariants(args, rep: Report):
    g = load_graph(args.graph)
    _put_invariants(rep, g)
    rep.put("acyclic_components", invariants(g).acyclic_components)
    if args.girth_bound is not None:
        gi, ab = girths(g, args.girth_bound)
        rep.put("girth", gi if gi is not None else f">{args.girth_bound}")
        rep.put("abelian_girth", ab if ab is not None else f">{args.girth_bound}")


def cmd_fibre(args, rep: Report):
    if args.base:
        if not (args.map1 and args.map2):
            raise InputError("--base needs --map1 and --map2")
        base = load_graph(args.base)
        a, b = load_graph(args.first), load_graph(args.second)
        f1 = formats.read_text(args.map1, lambda t: formats.parse_morphism(t, a, base))
        f2 = formats.read_text(args.map2, lambda t: formats.parse_morphism(t, b, base))
    else:
        f1 = load_graph(args.first, bigraph=True).to_bouquet()
        f2 = load_graph(args.second, bigraph=True).to_bouquet()
    for name, f in (("first", f1), ("second", f2)):
        k = classify_morphism(f)
        rep.put(f"{name}_kind", k.kind)
    prod, _, _ = fibre_product(f1, f2)
    _put_invariants(rep, prod)
    rep.block("graph", formats.emit_digraph(prod))


def cmd_cover(args, rep: Report):
    base = load_graph(args.base)
    cover = load_cover(base, args.coords)
    cover.verify()
    rep.put("group_order", cover.group.order)
    rep.put("degree", cover.group.order)
    if len(base.components()) == 1 and base.vertices:
        image = monodromy_image(cover.coordinates_at(), base.vertices[0])
        rep.put("monodromy_image", len(image))
    total = cover.projection.source
    rep.put("components", len(total.components()))
    _put_invariants(rep, total, "cover_")
    text = formats.emit_digraph(total)
    if args.out:
        Path(args.out).write_text(text)
        rep.put("cover_file", args.out)
    else:
        rep.block("graph", text)


def cmd_normal_ext(args, rep: Report):
    if args.base:
        if not args.map:
            raise InputError("--base needs --map")
        base = load_graph(args.base)
        src = load_graph(args.cover)
        pi = formats.read_text(args.map, lambda t: formats.parse_morphism(t, src, base))
    else:
        pi = load_graph(args.cover, bigraph=True).to_bouquet()
    kind = classify_morphism(pi)
    gal, to_g = normal_extension(pi)
    gal.verify()
    rep.put("degree", kind.degree)
    rep.put("group", f"symmetric:{kind.degree}")
    rep.put("group_order", gal.group.order)
    total = gal.projection.source
    rep.put("vertices", len(total.vertices))
    rep.put("edges", len(total.edges))
    rep.put("components", len(total.components()))
    rep.put("factors_through_cover", classify_morphism(to_g).is_covering)
    rep.block("graph", formats.emit_digraph(total))


def cmd_homology(args, rep: Report):
    s = maybe_pullback(load_sheaf(args.sheaf, args.prime), args.pullback, rep)
    h = homology(s)
    rep.put("field", s.field.name)
    rep.put("h0", h.h0)
    rep.put("h1", h.h1)
    rep.put("chi", h.chi)


def cmd_twisted(args, rep: Report):
    s = maybe_pullback(load_sheaf(args.sheaf, args.prime), args.pullback, rep)
    tb = twisted_betti(s, samples=args.samples, seed=args.seed)
    rep.put("field", tb.field)
    rep.put("samples", tb.samples)
    rep.put("seed", args.seed)
    rep.put("h0_twist", tb.h0t)
    rep.put("h1_twist", tb.h1t)
    rep.put("failure_bound", tb.failure_bound)


def _emit_subspace(u: CompartmentalizedSubspace) -> str:
    return "\n".join(f"U {v} ambient={u.per_vertex[v].ambient} {formats.emit_matrix(u.per_vertex[v].basis)}" for v in u.sheaf.base.vertices) + "\n"


def cmd_maxexcess(args, rep: Report):
    s = maybe_pullback(load_sheaf(args.sheaf, args.prime), args.pullback, rep)
    res = max_excess(s, args.method, budget=args.budget, seed=args.seed)
    rep.put("field", s.field.name)
    rep.put("budget", args.budget)
    rep.put("method", res.method)
    rep.put("max_excess", res.value)
    if res.method == "brute":
        rep.put("certificate", "witness_subspace")
        rep.block("witness", _emit_subspace(res.certificate))
    elif res.method == "edge_simple":
        rep.put("certificate", "twisted_betti")
        rep.put("h1_twist", res.certificate.h1t)
        rep.put("failure_bound", res.certificate.failure_bound)
    else:
        rep.put("certificate", "cover")
        rep.put("cover_degree", res.details["degree"])
        rep.put("abelian_girth_bound", res.details["bound"])
        rep.put("failure_bound", res.details["twisted"].failure_bound)
        text = formats.emit_morphism(res.certificate)
        if args.cover_out:
            Path(args.cover_out).write_text(formats.emit_digraph(res.certificate.source) + text)
            rep.put("cover_file", args.cover_out)
        else:
            rep.block("graph", formats.emit_digraph(res.certificate.source))
            rep.block("morphism", text)


def _emit_family(family) -> str:
    return "\n".join(f"family {v} " + " ".join(str(g) for g in sorted(u)) for v, u in family.items()) + "\n"


def cmd_rho_kernel(args, rep: Report):
    group, G, L = _cayley(args)
    rho = invariants(L).rho
    k = rho if args.k is None else args.k
    if k < 0:
        raise InputError("k must be non-negative")
    field = PrimeField(args.prime)
    M = vandermonde_totally_independent(k, group.elements, field, args.seed)
    ker = build_kernel(L, G, group, k, M, field)
    rep.put("rho", rho)
    rep.put("k", k)
    rep.put("field", field.name)
    profile = all(
        ker.values[(kind, p)].dim == len(sets[p]) - k
        for kind, sets in (("v", ker.orbits.vertex), ("e", ker.orbits.edge))
        for p in sets
    )
    rep.put("profile_ok", profile)
    rep.put("dim_v", ker.sheaf.dim_v)
    rep.put("dim_e", ker.sheaf.dim_e)
    if not profile:
        rep.code = EXIT_VIOLATION
    if args.check_families:
        fam = vertex_family_check(L, G, group, budget=args.budget)
        rep.put("families", fam.families)
        rep.put("max_deficit", fam.deficit)
        rep.put("families_ok", fam.holds)
        if not fam.holds:
            rep.code = EXIT_VIOLATION
            fmap = {v: {group.elements[g] for g in u} for v, u in fam.worst.items()}
            rep.block("family", _emit_family(fmap))
            L2, _ = pair_graph(ker.orbits, fam.worst, rho)
            rep.block("graph", formats.emit_digraph(L2))
    if args.trials:
        _experiment(L, G, group, k, args, rep)


def _experiment(L, G, group, k, args, rep: Report):
    if args.q not in (2, 3):
        raise InputError("experiments certify maximum excess by brute force over GF(2) or GF(3)")
    ex = generic_excess_experiment(L, G, group, k, args.trials, args.seed, args.q, args.budget)
    rep.put("experiment_field", ex.field)
    rep.put("trials", args.trials)
    rep.put("values", ",".join(str(v) for v in ex.values))
    rep.put("skipped", ex.skipped)
    rep.put("modal", ex.modal if ex.modal is not None else "none")
    rep.put("divisible", ex.divisible)
    if not ex.divisible:
        rep.code = EXIT_VIOLATION
    elif not ex.values and rep.code == EXIT_OK:
        rep.code = EXIT_BUDGET


def cmd_generic_exp(args, rep: Report):
    group, G, L = _cayley(args)
    k = invariants(L).rho if args.k is None else args.k
    rep.put("rho", invariants(L).rho)
    rep.put("k", k)
    _experiment(L, G, group, k, args, rep)


def cmd_shnc(args, rep: Report):
    K, L = load_graph(args.K, bigraph=True), load_graph(args.L, bigraph=True)
    r = shnc_verify(K, L)
    rep.put("rho_k", r.rho_k)
    rep.put("rho_l", r.rho_l)
    rep.put("rho_product", r.rho_product)
    rep.put("rho_prime_product", r.rho_prime_product)
    rep.put("shnc_margin", r.shnc_margin)
    rep.put("hnc_margin", r.hnc_margin)
    if not r.shnc_holds:
        rep.code = EXIT_VIOLATION
        prod, _, _ = fibre_product(K.to_bouquet(), L.to_bouquet())
        rep.block("graph", formats.emit_digraph(prod))


def cmd_stallings(args, rep: Report):
    core = stallings_core(args.words.split(","))
    _put_invariants(rep, core)
    rep.put("rank", invariants(core).h1)
    rep.put("covering", classify_morphism(core.to_bouquet()).is_covering)
    text = formats.emit_digraph(core)
    if args.out:
        Path(args.out).write_text(text)
        rep.put("graph_file", args.out)
    else:
        rep.block("graph", text)


# ---- parser


def _seed(p):
    p.add_argument("--seed", type=int, default=0)


def _sheaf_opts(p):
    p.add_argument("sheaf")
    p.add_argument("--prime", type=int, default=None, help="read the sheaf over GF(p), overriding the file header")
    p.add_argument("--pullback", metavar="COORDS", help="pull back along the cover given by a coordinates file first")


def _cayley_opts(p):
    p.add_argument("--group", required=True, help="cyclic:<n>, symmetric:<n> or product:...")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--subgraph", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--q", type=int, default=2, help="field size for experiments (2 or 3)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _seed(p)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sheaflab", description="Sheaves on graphs, Galois covers and rho-kernels.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="h0, h1, chi, rho of a digraph")
    p.add_argument("graph")
    p.add_argument("--girth-bound", type=int, default=None, help="also report girth and Abelian girth up to this bound")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("fibre", help="fibre product of two graphs over a base (B2 by default)")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--base")
    p.add_argument("--map1")
    p.add_argument("--map2")
    p.set_defaults(func=cmd_fibre)

    p = sub.add_parser("cover", help="Galois cover from a coordinates file")
    p.add_argument("base")
    p.add_argument("coords")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("normal-ext", help="normal extension of a covering (of B2 by default)")
    p.add_argument("cover")
    p.add_argument("--base")
    p.add_argument("--map")
    p.set_defaults(func=cmd_normal_ext)

    p = sub.add_parser("homology", help="h0 and h1 of a sheaf")
    _sheaf_opts(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("twisted", help="twisted Betti numbers by random specialization")
    _sheaf_opts(p)
    p.add_argument("--samples", type=int, default=3)
    _seed(p)
    p.set_defaults(func=cmd_twisted)

    p = sub.add_parser("maxexcess", help="maximum excess with a certificate")
    _sheaf_opts(p)
    p.add_argument("--method", choices=["auto", "brute", "edge-simple", "pullback"], default="auto")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--cover-out", help="write the pullback certificate here instead of inline")
    _seed(p)
    p.set_defaults(func=cmd_maxexcess)

    p = sub.add_parser("rho-kernel", help="build a rho-kernel on a Cayley bigraph and check it")
    _cayley_opts(p)
    p.add_argument("--check-families", action="store_true")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.set_defaults(func=cmd_rho_kernel)

    p = sub.add_parser("shnc", help="check rho(K x L) <= rho(K) rho(L) for bigraphs K and L")
    p.add_argument("K")
    p.add_argument("L")
    p.set_defaults(func=cmd_shnc)

    p = sub.add_parser("stallings", help="Stallings core graph of a finitely generated subgroup of F(a,b)")
    p.add_argument("--words", required=True, help='comma-separated words, uppercase for inverses, e.g. "a,b,abA"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_stallings)

    p = sub.add_parser("generic-exp", help="maximum excess of k-th power kernels for random M")
    _cayley_opts(p)
    p.set_defaults(func=cmd_generic_exp)
    return ap


def run(argv: Sequence[str] | None = None) -> tuple[str, int]:
    """Run one command; returns the report text and the exit code."""
    args = build_parser().parse_args(argv)
    rep = Report()
    try:
        args.func(args, rep)
    except InputError as exc:
        rep.put("error", str(exc))
        rep.code = EXIT_INPUT
    except BudgetExceeded as exc:
        rep.put("error", f"budget: {exc}")
        rep.code = EXIT_BUDGET
    except (OSError, ValueError) as exc:
        rep.put("error", str(exc))
        rep.code = EXIT_INPUT
    return rep.text(), rep.code


def main(argv: Sequence[str] | None = None) -> int:
    text, code = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
