"""Line-oriented text formats for graphs, morphisms, sheaves, coordinates and groups."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Callable

import numpy as np

from .digraph import Bigraph, Digraph, GraphMorphism
from .errors import InputError
from .galois import FiniteGroup, GaloisCoordinates, parse_group
from .linalg import DEFAULT_PRIME, Field, PrimeField
from .sheaf import Sheaf


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_digraph(text: str, require_colour: bool = False) -> Digraph:
    """``vertex <id>`` and ``edge <id> <tail> <head> [colour=1|2]`` lines.

    The result is a Bigraph exactly when every edge carries a colour.
    """
    vertices, edges, tail, head, colour = [], [], {}, {}, {}
    vseen, eseen, where = set(), set(), {}
    for no, line in _lines(text):
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            if parts[1] in vseen:
                raise InputError(f"line {no}: duplicate vertex {parts[1]}")
            vseen.add(parts[1])
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) in (4, 5):
            e, t, h = parts[1:4]
            if e in eseen:
                raise InputError(f"line {no}: duplicate edge {e}")
            for x in (t, h):
                if x not in vseen:
                    raise InputError(f"line {no}: edge {e} references unknown vertex {x}")
            eseen.add(e)
            where[e] = no
            edges.append(e)
            tail[e], head[e] = t, h
            if len(parts) == 5:
                key, _, val = parts[4].partition("=")
                if key != "colour" or val not in ("1", "2"):
                    raise InputError(f"line {no}: bad colour annotation {parts[4]!r}")
                colour[e] = int(val)
        else:
            raise InputError(f"line {no}: cannot parse {line!r}")
    if colour and len(colour) != len(edges):
        if require_colour:
            missing = next(e for e in edges if e not in colour)
            raise InputError(f"line {where[missing]}: edge {missing} lacks a colour")
    if edges and len(colour) == len(edges) or (not edges and require_colour):
        return Bigraph(vertices, edges, tail, head, colour)
    if require_colour:
        raise InputError("a bigraph needs every edge coloured")
    return Digraph(vertices, edges, tail, head)


def emit_digraph(g: Digraph) -> str:
    out = [f"vertex {v}" for v in g.vertices]
    col = getattr(g, "colour", None)
    for e in g.edges:
        line = f"edge {e} {g.tail[e]} {g.head[e]}"
        if col is not None:
            line += f" colour={col[e]}"
        out.append(line)
    return "\n".join(out) + "\n"


def parse_matrix(literal: str, rows: int, cols: int, field: Field, where: str) -> np.ndarray:
    """Rows separated by ``;``, entries by spaces, integers read in the field."""
    lit = literal.strip()
    if lit in ("", "[]"):
        if rows * cols:
            raise InputError(f"{where}: empty matrix, expected shape {rows}x{cols}")
        return np.zeros((rows, cols), dtype=np.int64)
    try:
        data = [[int(x) for x in row.split()] for row in lit.split(";")]
    except ValueError as exc:
        raise InputError(f"{where}: non-integer entry ({exc})") from exc
    if len(data) != rows or any(len(r) != cols for r in data):
        got = f"{len(data)}x{len(data[0]) if data else 0}"
        raise InputError(f"{where}: matrix is {got}, expected shape {rows}x{cols}")
    return field.embed(np.array(data, dtype=np.int64).reshape(rows, cols))


def emit_matrix(m: np.ndarray) -> str:
    m = np.asarray(m)
    if m.size == 0:
        return "[]"
    return "; ".join(" ".join(str(int(x)) for x in row) for row in m)


def parse_sheaf(
    text: str,
    base_dir: str | os.PathLike | None = None,
    prime: int | None = None,
    graph: Digraph | None = None,
) -> Sheaf:
    """Sheaf file: ``field p=<prime>``, ``graph <path>``, then vdim/edim/head/tail lines.

    ``structure`` declares the structure sheaf.  Vertex and edge lines may be
    given inline instead of a graph path.  An explicit ``prime`` overrides the header.
    """
    header_p = None
    graph_lines: list[str] = []
    body: list[tuple[int, list[str], str]] = []
    structure = False
    for no, line in _lines(text):
        parts = line.split()
        key = parts[0]
        if key == "field":
            if len(parts) != 2 or not parts[1].startswith("p="):
                raise InputError(f"line {no}: expected 'field p=<prime>'")
            try:
                header_p = int(parts[1][2:])
            except ValueError as exc:
                raise InputError(f"line {no}: bad prime") from exc
        elif key == "graph":
            if len(parts) != 2:
                raise InputError(f"line {no}: expected 'graph <path>'")
            path = Path(parts[1])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            try:
                graph = parse_digraph(path.read_text())
            except OSError as exc:
                raise InputError(f"line {no}: cannot read graph {path}: {exc.strerror}") from exc
        elif key in ("vertex", "edge"):
            graph_lines.append(line)
        elif key == "structure":
            structure = True
        elif key in ("vdim", "edim", "head", "tail"):
            body.append((no, parts, line))
        else:
            raise InputError(f"line {no}: unknown declaration {key!r}")
    if graph_lines:
        if graph is not None:
            raise InputError("graph given both inline and by path")
        graph = parse_digraph("\n".join(graph_lines))
    if graph is None:
        raise InputError("sheaf file names no graph")
    field = PrimeField(prime if prime is not None else header_p if header_p is not None else DEFAULT_PRIME)
    if structure:
        if body:
            raise InputError("structure sheaf takes no further declarations")
        from .sheaf import structure_sheaf

        return structure_sheaf(graph, field)
    vdim, edim = {}, {}
    for no, parts, _ in body:
        if parts[0] in ("vdim", "edim"):
            if len(parts) != 3:
                raise InputError(f"line {no}: expected '{parts[0]} <id> <dim>'")
            try:
                d = int(parts[2])
            except ValueError as exc:
                raise InputError(f"line {no}: bad dimension") from exc
            if d < 0:
                raise InputError(f"line {no}: negative dimension")
            pts = graph.vertex_index if parts[0] == "vdim" else graph.edge_index
            if parts[1] not in pts:
                raise InputError(f"line {no}: unknown {'vertex' if parts[0] == 'vdim' else 'edge'} {parts[1]}")
            (vdim if parts[0] == "vdim" else edim)[parts[1]] = d
    head, tail = {}, {}
    for no, parts, line in body:
        if parts[0] in ("head", "tail"):
            if len(parts) < 2 or parts[1] not in graph.edge_index:
                raise InputError(f"line {no}: unknown edge in {parts[0]} map")
            e = parts[1]
            end = graph.head[e] if parts[0] == "head" else graph.tail[e]
            literal = line.split(None, 2)[2] if len(parts) > 2 else ""
            where = f"line {no}: {parts[0]} map of edge {e}"
            m = parse_matrix(literal, vdim.get(end, 0), edim.get(e, 0), field, where)
            (head if parts[0] == "head" else tail)[e] = m
    return Sheaf(graph, field, vdim, edim, head, tail)


def emit_sheaf(s: Sheaf, graph_path: str | None = None) -> str:
    out = [f"field p={s.field.characteristic}"]
    if graph_path:
        out.append(f"graph {graph_path}")
    else:
        out += emit_digraph(s.base).splitlines()
    out += [f"vdim {v} {d}" for v, d in s.vdim.items() if d]
    out += [f"edim {e} {d}" for e, d in s.edim.items() if d]
    for e in s.base.edges:
        if s.edim[e]:
            out.append(f"head {e} {emit_matrix(s.head[e])}")
            out.append(f"tail {e} {emit_matrix(s.tail[e])}")
    return "\n".join(out) + "\n"


def parse_group_table(text: str) -> FiniteGroup:
    """First line lists the elements; each following line is the product row of one element."""
    rows = [line.split() for _, line in _lines(text)]
    if not rows:
        raise InputError("empty group table")
    names = rows[0]
    index = {g: i for i, g in enumerate(names)}
    if len(rows) != len(names) + 1:
        raise InputError("group table needs one row per element")
    try:
        table = [[index[x] for x in r] for r in rows[1:]]
    except KeyError as exc:
        raise InputError(f"unknown element {exc} in group table") from exc
    return FiniteGroup(names, table)


def parse_coordinates(text: str, base: Digraph, base_dir: str | os.PathLike | None = None) -> GaloisCoordinates:
    """``group <name>`` header followed by ``coord <edge> <element>`` lines."""
    group = None
    names: dict[str, str] = {}

    def load(path: str) -> FiniteGroup:
        p = Path(path)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        return parse_group_table(p.read_text())

    for no, line in _lines(text):
        parts = line.split()
        if parts[0] == "group" and len(parts) == 2:
            group = parse_group(parts[1], load)
        elif parts[0] == "coord" and len(parts) == 3:
            if group is None:
                raise InputError(f"line {no}: coordinates before the group header")
            if parts[1] not in base.edge_index:
                raise InputError(f"line {no}: unknown edge {parts[1]}")
            if parts[2] not in group.index:
                raise InputError(f"line {no}: unknown group element {parts[2]}")
            names[parts[1]] = parts[2]
        else:
            raise InputError(f"line {no}: cannot parse {line!r}")
    if group is None:
        raise InputError("coordinates file lacks a group header")
    return GaloisCoordinates.from_names(base, group, names)


def parse_morphism(text: str, source: Digraph, target: Digraph) -> GraphMorphism:
    """``vmap <v> <w>`` and ``emap <e> <f>`` lines."""
    vmap, emap = {}, {}
    for no, line in _lines(text):
        parts = line.split()
        if len(parts) == 3 and parts[0] in ("vmap", "emap"):
            (vmap if parts[0] == "vmap" else emap)[parts[1]] = parts[2]
        else:
            raise InputError(f"line {no}: cannot parse {line!r}")
    return GraphMorphism(source, target, vmap, emap)


def emit_morphism(m: GraphMorphism) -> str:
    out = [f"vmap {v} {w}" for v, w in m.vmap.items()]
    out += [f"emap {e} {f}" for e, f in m.emap.items()]
    return "\n".join(out) + "\n"


def read_text(path: str | os.PathLike, reader: Callable[[str], object] | None = None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return reader(text) if reader else text


def data_file(name: str) -> Path:
    """Path of a file shipped in the package's data directory."""
    from importlib.resources import files

    return Path(str(files("sheaflab") / "data" / name))
