"""EDS graph data model, native text / JSON-lines I/O and Smatch triples.

The native serialization looks like::

    {e3:
     _1:_the_q<0:3>[BV x2]
     x2:_drug_n_1<4:8>[]
     e3:_introduce_v_to<13:23>[ARG2 x2]
    }

Anchors are character offsets into the sentence text.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple


class EdsError(ValueError):
    """Invalid graph content (dangling endpoints, duplicates, ...)."""


class EdsSyntaxError(EdsError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class EdsNode:
    id: str
    predicate: str
    start: int
    end: int
    carg: str | None = None

    @property
    def anchor(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class EdsEdge:
    source: str
    target: str
    role: str


@dataclass(frozen=True)
class EdsGraph:
    nodes: tuple[EdsNode, ...] = ()
    edges: tuple[EdsEdge, ...] = ()
    top: str | None = None
    text: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        validate(self)

    @cached_property
    def node_map(self) -> dict[str, EdsNode]:
        return {n.id: n for n in self.nodes}

    def outgoing(self, node_id: str) -> list[EdsEdge]:
        return [e for e in self.edges if e.source == node_id]

    def __len__(self) -> int:
        return len(self.nodes)


def validate(g: EdsGraph) -> None:
    ids = set()
    for n in g.nodes:
        if n.id in ids:
            raise EdsError(f"duplicate node id {n.id!r}")
        ids.add(n.id)
        if not n.predicate:
            raise EdsError(f"node {n.id!r} has an empty predicate")
        if n.start < 0 or n.end < n.start:
            raise EdsError(f"node {n.id!r} has invalid anchor <{n.start}:{n.end}>")
    seen = set()
    for e in g.edges:
        for end in (e.source, e.target):
            if end not in ids:
                raise EdsError(f"edge {e.source} -{e.role}-> {e.target} has dangling endpoint {end!r}")
        if e.source == e.target:
            raise EdsError(f"self-loop on node {e.source!r} ({e.role})")
        key = (e.source, e.target, e.role)
        if key in seen:
            raise EdsError(f"duplicate edge {e.source} -{e.role}-> {e.target}")
        seen.add(key)
    if g.top is not None and g.top not in ids:
        raise EdsError(f"top {g.top!r} is not a node")


# -- native text format ---------------------------------------------------

_ID_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.")
_PRED_STOP = frozenset("<([]{}\t\n\r ")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None):
        return EdsSyntaxError(message, *self.where(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {ch!r}, found {found}")
        self.pos += 1

    def ident(self, what: str = "identifier") -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _ID_CHARS:
            self.pos += 1
        if start == self.pos:
            raise self.error(f"expected {what}")
        return self.text[start:self.pos]

    def integer(self) -> int:
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        if self.text[start:self.pos] in ("", "-"):
            raise self.error("expected integer", start)
        return int(self.text[start:self.pos])

    def predicate(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _PRED_STOP:
            self.pos += 1
        if start == self.pos:
            raise self.error("expected predicate")
        return self.text[start:self.pos]

    def quoted(self) -> str:
        self.expect('"')
        out = []
        while True:
            ch = self.peek()
            if not ch:
                raise self.error("unterminated string")
            self.pos += 1
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                nxt = self.peek()
                if not nxt:
                    raise self.error("unterminated string")
                out.append(nxt)
                self.pos += 1
            else:
                out.append(ch)


def _parse_node(sc: _Scanner) -> tuple[EdsNode, list[EdsEdge]]:
    node_id = sc.ident("node id")
    sc.expect(":")
    pred = sc.predicate()
    carg = None
    if sc.peek() == "(":
        sc.pos += 1
        carg = sc.quoted()
        sc.expect(")")
    sc.expect("<")
    start = sc.integer()
    sc.expect(":")
    end = sc.integer()
    sc.expect(">")
    sc.expect("[")
    edges = []
    sc.skip_ws()
    if sc.peek() != "]":
        while True:
            sc.skip_ws()
            role = sc.ident("role")
            if not sc.peek().isspace():
                raise sc.error("expected space between role and target")
            sc.skip_ws()
            target = sc.ident("edge target")
            edges.append(EdsEdge(node_id, target, role))
            sc.skip_ws()
            if sc.peek() == ",":
                sc.pos += 1
                continue
            break
    sc.expect("]")
    if start < 0 or end < start:
        raise EdsError(f"node {node_id!r} has invalid anchor <{start}:{end}>")
    return EdsNode(node_id, pred, start, end, carg), edges


def _parse_graph(sc: _Scanner, text: str | None = None) -> EdsGraph:
    sc.skip_ws()
    sc.expect("{")
    sc.skip_ws()
    top = None
    # "{id:" followed by whitespace or "}" introduces the top; "{id:pred" is a node
    mark = sc.pos
    if sc.peek() and sc.peek() in _ID_CHARS:
        cand = sc.ident()
        if sc.peek() == ":" and (sc.pos + 1 >= len(sc.text) or sc.text[sc.pos + 1].isspace()
                                 or sc.text[sc.pos + 1] == "}"):
            sc.pos += 1
            top = cand
        else:
            sc.pos = mark
    nodes, edges, positions = [], [], {}
    while True:
        sc.skip_ws()
        if sc.peek() == "}":
            sc.pos += 1
            break
        if not sc.peek():
            raise sc.error("unexpected end of input, expected '}'")
        pos = sc.pos
        node, out = _parse_node(sc)
        if node.id in positions:
            raise sc.error(f"duplicate node id {node.id!r}", pos)
        positions[node.id] = pos
        nodes.append(node)
        edges.extend(out)
    return EdsGraph(tuple(nodes), tuple(edges), top, text)


def parse_eds(text: str) -> EdsGraph:
    """Parse one graph in the native format; trailing content is an error."""
    sc = _Scanner(text)
    g = _parse_graph(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise sc.error("trailing content after graph")
    return g


def node_sort_key(n: EdsNode):
    return (n.start, n.end, n.predicate, n.id)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_eds(g: EdsGraph) -> str:
    out_edges: dict[str, list[EdsEdge]] = {}
    for e in g.edges:
        out_edges.setdefault(e.source, []).append(e)
    lines = ["{" + (f"{g.top}:" if g.top is not None else "")]
    for n in sorted(g.nodes, key=node_sort_key):
        es = sorted(out_edges.get(n.id, []), key=lambda e: (e.role, e.target))
        carg = f"({_quote(n.carg)})" if n.carg is not None else ""
        body = ", ".join(f"{e.role} {e.target}" for e in es)
        lines.append(f" {n.id}:{n.predicate}{carg}<{n.start}:{n.end}>[{body}]")
    lines.append("}")
    return "\n".join(lines)


# -- JSON-lines interchange -------------------------------------------------

def graph_to_json(g: EdsGraph, graph_id: str) -> str:
    nodes = []
    for n in sorted(g.nodes, key=node_sort_key):
        d = {"id": n.id, "predicate": n.predicate, "start": n.start, "end": n.end}
        if n.carg is not None:
            d["carg"] = n.carg
        nodes.append(d)
    edges = [{"src": e.source, "tgt": e.target, "role": e.role}
             for e in sorted(g.edges, key=lambda e: (e.source, e.role, e.target))]
    return json.dumps({"id": graph_id, "top": g.top, "nodes": nodes, "edges": edges},
                      ensure_ascii=False, sort_keys=True)


def graph_from_json(line: str | dict) -> tuple[str, EdsGraph]:
    d = json.loads(line) if isinstance(line, str) else line
    try:
        nodes = tuple(EdsNode(str(n["id"]), n["predicate"], int(n["start"]), int(n["end"]),
                              n.get("carg")) for n in d["nodes"])
        edges = tuple(EdsEdge(str(e["src"]), str(e["tgt"]), e["role"]) for e in d["edges"])
        gid = str(d["id"])
    except (KeyError, TypeError) as exc:
        raise EdsError(f"malformed JSON graph: missing field {exc}") from None
    return gid, EdsGraph(nodes, edges, d.get("top"))


# -- Smatch triples -----------------------------------------------------------

class Triple(NamedTuple):
    kind: str  # "instance" | "relation" | "top"
    args: tuple


def to_triples(g: EdsGraph, include_top: bool = True) -> list[Triple]:
    """Decompose into instance/relation/top triples; anchors are dropped."""
    triples = [Triple("instance", (n.id, n.predicate)) for n in g.nodes]
    triples += [Triple("relation", (e.role, e.source, e.target)) for e in g.edges]
    triples += [Triple("relation", ("CARG", n.id, n.carg)) for n in g.nodes if n.carg is not None]
    if include_top and g.top is not None:
        triples.append(Triple("top", (g.top,)))
    return triples


def is_connected(g: EdsGraph) -> bool:
    if not g.nodes:
        raise EdsError("connectivity is undefined for an empty graph")
    adj: dict[str, set[str]] = {n.id: set() for n in g.nodes}
    for e in g.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    start = g.nodes[0].id
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in adj[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(adj)


def iter_graph_blocks(text: str) -> Iterable[tuple[str, str]]:
    """Yield (id, graph text) from a ``#id``-prefixed native graph file."""
    gid, buf = None, []
    for line in text.splitlines():
        if line.startswith("#id "):
            if gid is not None:
                yield gid, "\n".join(buf)
            gid, buf = line[4:].strip(), []
        elif gid is not None:
            buf.append(line)
        elif line.strip():
            raise EdsError(f"graph content before any '#id' line: {line[:40]!r}")
    if gid is not None:
        yield gid, "\n".join(buf)


def read_graphs(text: str) -> dict[str, EdsGraph]:
    """Read either a ``#id`` native graph file or JSON lines (auto-detected)."""
    stripped = text.lstrip()
    graphs: dict[str, EdsGraph] = {}
    if stripped.startswith('{"') or stripped.startswith("{ \""):
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                gid, g = graph_from_json(line)
            except json.JSONDecodeError as exc:
                raise EdsError(f"line {lineno}: invalid JSON: {exc}") from None
            if gid in graphs:
                raise EdsError(f"duplicate graph id {gid!r}")
            graphs[gid] = g
        return graphs
    for gid, block in iter_graph_blocks(text):
        if gid in graphs:
            raise EdsError(f"duplicate graph id {gid!r}")
        graphs[gid] = parse_eds(block) if block.strip() else EdsGraph()
    return graphs


def write_graphs(graphs: Iterable[tuple[str, EdsGraph]], fmt: str = "eds") -> str:
    if fmt == "json":
        return "".join(graph_to_json(g, gid) + "\n" for gid, g in graphs)
    return "".join(f"#id {gid}\n{serialize_eds(g)}\n\n" for gid, g in graphs)
