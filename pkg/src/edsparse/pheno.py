"""Construction-focused evaluation over bi-lexical projections of EDS graphs."""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .align import align_node
from .corpus import Sentence
from .graph import EdsGraph

log = logging.getLogger(__name__)

PHENOMENA = ("comp", "as", "ditr", "causemo", "way", "passive", "vpart", "itexpl", "ned",
             "argadj", "barerel", "tough", "rnr", "absol", "vger", "control")
COMPLETE_MATCH = ("as", "ditr", "causemo", "way")
COMPOUND_ROLE = "compound"


class PhenoError(ValueError):
    pass


@dataclass(frozen=True)
class PhenoTriple:
    sentence_id: str
    phenomenon: str
    subtype: str | None
    head: str
    head_pos: int
    role: str
    dep: str
    dep_pos: int

    def key(self):
        return (self.head_pos, self.role, self.dep_pos)

    def to_line(self) -> str:
        return "\t".join([self.sentence_id, self.phenomenon, self.subtype or "-",
                          f"{self.head}_{self.head_pos}", self.role, f"{self.dep}_{self.dep_pos}"])


def _word_pos(field_: str, where: str) -> tuple[str, int]:
    form, sep, pos = field_.rpartition("_")
    if not sep or not form or not pos.isdigit() or int(pos) < 1:
        raise PhenoError(f"{where}: malformed word_position {field_!r}")
    return form, int(pos)


def parse_pheno_gold(text: str, sentences: dict[str, Sentence] | None = None,
                     source: str = "<string>") -> list[PhenoTriple]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        cols = line.split("\t") if "\t" in line else line.split()
        if len(cols) != 6:
            raise PhenoError(f"{where}: expected 6 fields, got {len(cols)}")
        sid, phen, sub, head, role, dep = (c.strip() for c in cols)
        if phen not in PHENOMENA:
            raise PhenoError(f"{where}: unknown phenomenon {phen!r}")
        if sub not in ("-", "A", "B"):
            raise PhenoError(f"{where}: subtype must be A, B or '-', got {sub!r}")
        hform, hpos = _word_pos(head, where)
        dform, dpos = _word_pos(dep, where)
        if sentences is not None:
            if sid not in sentences:
                raise PhenoError(f"{where}: unknown sentence id {sid!r}")
            n = len(sentences[sid].tokens)
            for form, pos in ((hform, hpos), (dform, dpos)):
                if pos > n:
                    raise PhenoError(f"{where}: position {pos} out of range ({n} tokens)")
                if sentences[sid].tokens[pos - 1].form != form:
                    log.warning("%s: %r at position %d is %r in the sentence", where, form, pos,
                                sentences[sid].tokens[pos - 1].form)
        out.append(PhenoTriple(sid, phen, None if sub == "-" else sub, hform, hpos, role,
                               dform, dpos))
    return out


def load_pheno_gold(path, sentences: dict[str, Sentence] | None = None) -> list[PhenoTriple]:
    path = Path(path)
    return parse_pheno_gold(path.read_text(encoding="utf-8"), sentences, str(path))


def write_pheno_gold(triples) -> str:
    return "".join(t.to_line() + "\n" for t in triples)


# -- projection ------------------------------------------------------------------

def node_tokens(graph: EdsGraph, sentence: Sentence) -> dict[str, int]:
    """1-based token position per node; unalignable nodes are dropped."""
    out = {}
    for n in graph.nodes:
        i = align_node(n, sentence)
        if i is None:
            log.warning("%s: node %s:%s<%d:%d> aligns to no token; skipped", sentence.id,
                        n.id, n.predicate, n.start, n.end)
            continue
        out[n.id] = i + 1
    return out


def extract_bilexical(graph: EdsGraph, sentence: Sentence,
                      alignment: dict[str, int] | None = None) -> set[tuple[int, str, int]]:
    """Project edges onto (head position, role, dependent position).

    Edges keep their EDS direction. A ``compound`` node with ARG1 and ARG2
    becomes a single ``compound`` arc from the ARG1 word to the ARG2 word.
    Arcs whose endpoints fall on the same token are dropped.
    """
    pos = alignment if alignment is not None else node_tokens(graph, sentence)
    out = set()
    for e in graph.edges:
        if graph.node_map[e.source].predicate == COMPOUND_ROLE:
            continue
        h, d = pos.get(e.source), pos.get(e.target)
        if h is not None and d is not None and h != d:
            out.add((h, e.role, d))
    for h, d, _ in compound_pairs(graph, pos):
        if h != d:
            out.add((h, COMPOUND_ROLE, d))
    return out


def compound_pairs(graph: EdsGraph, pos: dict[str, int]):
    """(ARG1 position, ARG2 position, compound node id) per compound node."""
    out = []
    for n in graph.nodes:
        if n.predicate != COMPOUND_ROLE:
            continue
        args = {e.role: e.target for e in graph.outgoing(n.id)}
        a1, a2 = args.get("ARG1"), args.get("ARG2")
        if a1 in pos and a2 in pos:
            out.append((pos[a1], pos[a2], n.id))
    return out


class _SystemView:
    """Per-sentence projections used to decide triple recovery."""

    def __init__(self, graph: EdsGraph | None, sentence: Sentence):
        self.graph = graph
        self.sentence = sentence
        if graph is None:
            self.pos, self.arcs = {}, set()
            return
        self.pos = node_tokens(graph, sentence)
        self.arcs = extract_bilexical(graph, sentence, self.pos)

    def has(self, h, roles, d) -> bool:
        """True when some role links h to d; ``R^`` stands for an R arc from d to h."""
        for r in roles:
            if r.endswith("^"):
                if (d, r[:-1], h) in self.arcs:
                    return True
            elif (h, r, d) in self.arcs:
                return True
        return False

    def compound_ok(self, h, d) -> bool:
        """A compound arc h -> d whose named endpoints carry their surface string."""
        g = self.graph
        for a1, a2, cid in compound_pairs(g, self.pos):
            if (a1, a2) != (h, d):
                continue
            good = True
            for e in g.outgoing(cid):
                tgt = g.node_map[e.target]
                if e.role in ("ARG1", "ARG2") and tgt.predicate == "named":
                    form = self.sentence.tokens[self.pos[tgt.id] - 1].form
                    good &= tgt.carg == form
            if good:
                return True
        return False

    def passive_ok(self, h, role, d) -> bool:
        g = self.graph
        at = lambda node_id, p: self.pos.get(node_id) == p  # noqa: E731
        for n in g.nodes:
            if n.predicate != "parg_d" or not at(n.id, h):
                continue
            args = {e.role: e.target for e in g.outgoing(n.id)}
            if "ARG1" not in args or not at(args["ARG1"], h):
                continue
            if role == "ARG2" and not ("ARG2" in args and at(args["ARG2"], d)):
                continue
            return True
        return False


def recovered(t: PhenoTriple, view: _SystemView, role_map: dict[str, set[str]] | None = None) -> bool:
    if view.graph is None:
        return False
    roles = (role_map or {}).get(t.role, {t.role})
    if t.phenomenon == "comp":
        return view.compound_ok(t.head_pos, t.dep_pos)
    if not view.has(t.head_pos, roles, t.dep_pos):
        return False
    if t.phenomenon == "passive":
        return view.passive_ok(t.head_pos, t.role, t.dep_pos)
    return True


@dataclass
class PhenoRow:
    phenomenon: str
    subtype: str
    count: int
    recovered: int
    complete_total: int | None = None
    complete_hit: int | None = None

    @property
    def recall(self) -> float:
        return self.recovered / self.count if self.count else 0.0

    @property
    def complete_match(self) -> float | None:
        if self.complete_total is None:
            return None
        return self.complete_hit / self.complete_total if self.complete_total else 0.0


@dataclass
class PhenoReport:
    system: str
    rows: list[PhenoRow]
    coverage: float = 1.0
    missing: list[str] = field(default_factory=list)

    def get(self, phenomenon: str, subtype: str = "all") -> PhenoRow:
        for r in self.rows:
            if r.phenomenon == phenomenon and r.subtype == subtype:
                return r
        raise KeyError((phenomenon, subtype))

    def recall(self, phenomenon: str, subtype: str = "all") -> float:
        return self.get(phenomenon, subtype).recall


def _report(system: str, gold: list[PhenoTriple], hits: list[bool]) -> PhenoReport:
    groups: dict[tuple[str, str], list[bool]] = defaultdict(list)
    preds: dict[str, dict[tuple, bool]] = defaultdict(dict)
    for t, ok in zip(gold, hits):
        groups[(t.phenomenon, "all")].append(ok)
        if t.subtype:
            groups[(t.phenomenon, t.subtype)].append(ok)
        if t.phenomenon in COMPLETE_MATCH:
            groups[(t.phenomenon, t.role)].append(ok)
            key = (t.sentence_id, t.head_pos)
            preds[t.phenomenon][key] = preds[t.phenomenon].get(key, True) and ok
        groups[("overall", "all")].append(ok)
    rows = []
    order = {p: i for i, p in enumerate(PHENOMENA + ("overall",))}
    for (phen, sub), oks in sorted(groups.items(), key=lambda kv: (order[kv[0][0]], kv[0][1] != "all", kv[0][1])):
        row = PhenoRow(phen, sub, len(oks), sum(oks))
        if phen in COMPLETE_MATCH and sub == "all":
            row.complete_total = len(preds[phen])
            row.complete_hit = sum(preds[phen].values())
        rows.append(row)
    return PhenoReport(system, rows)


def pheno_score(gold: list[PhenoTriple], systems: dict[str, dict[str, EdsGraph | None]],
                sentences: dict[str, Sentence],
                role_map: dict[str, set[str]] | None = None) -> dict[str, list[PhenoReport]]:
    """Score each system; returns [full report] or [full, coverage-restricted]."""
    out = {}
    sids = sorted({t.sentence_id for t in gold})
    for name, graphs in systems.items():
        views = {sid: _SystemView(graphs.get(sid), sentences[sid]) for sid in sids}
        hits = [recovered(t, views[t.sentence_id], role_map) for t in gold]
        missing = [sid for sid in sids if graphs.get(sid) is None]
        report = _report(name, gold, hits)
        report.coverage = 1 - len(missing) / len(sids) if sids else 1.0
        report.missing = missing
        reports = [report]
        if missing:
            keep = [(t, h) for t, h in zip(gold, hits) if t.sentence_id not in set(missing)]
            covered = _report(f"{name}@covered", [t for t, _ in keep], [h for _, h in keep])
            covered.coverage = 1.0
            reports.append(covered)
        out[name] = reports
    return out


def format_reports(reports: dict[str, list[PhenoReport]]) -> str:
    lines = ["system,phenomenon,subtype,count,recall,complete_match"]
    for group in reports.values():
        for rep in group:
            for r in rep.rows:
                cm = "" if r.complete_match is None else f"{r.complete_match:.4f}"
                lines.append(f"{rep.system},{r.phenomenon},{r.subtype},{r.count},{r.recall:.4f},{cm}")
    return "\n".join(lines) + "\n"


def load_role_map(path) -> dict[str, set[str]]:
    """TSV ``gold-role<TAB>system-role[,system-role...]``.

    A trailing ``^`` on a system role means the system arc runs the other way
    (dependent to head), e.g. ``MOD<TAB>ARG1^`` for modifiers whose EDS
    functor is the modifier.
    """
    out: dict[str, set[str]] = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        gold, systems = line.split("\t")
        out.setdefault(gold.strip(), {gold.strip()}).update(s.strip() for s in systems.split(","))
    return out


# -- gold triples derived from gold graphs (learning curves) ----------------------

CURVE_GROUPS = {"compound": ("comp", None), "ner": ("comp", "A"), "arg": ("as", None),
                "valency": ("ditr", None), "passive": ("passive", None)}


def derive_pheno_triples(instances) -> list[PhenoTriple]:
    """Diagnostic triples read off gold graphs.

    comp: compound arcs (subtype A when both ends are ``named``, i.e. named
    entities); as: ARG1-3 of verbal predicates; ditr: ARG3 of verbal
    predicates; passive: ARG1/ARG2 of verbs marked by ``parg_d``.
    """
    out = []
    for x in instances:
        g, s = x.graph, x.sentence
        pos = node_tokens(g, s)
        form = lambda p: s.tokens[p - 1].form  # noqa: E731
        for h, d, cid in compound_pairs(g, pos):
            args = {e.role: g.node_map[e.target].predicate for e in g.outgoing(cid)}
            sub = "A" if args.get("ARG1") == "named" and args.get("ARG2") == "named" else None
            out.append(PhenoTriple(s.id, "comp", sub, form(h), h, COMPOUND_ROLE, form(d), d))
        passive_heads = set()
        for n in g.nodes:
            if n.predicate == "parg_d":
                args = {e.role: e.target for e in g.outgoing(n.id)}
                if "ARG1" in args and args["ARG1"] in pos:
                    passive_heads.add(args["ARG1"])
        for e in sorted(g.edges, key=lambda e: (e.source, e.role, e.target)):
            src = g.node_map[e.source]
            if "_v_" not in src.predicate or e.role not in ("ARG1", "ARG2", "ARG3"):
                continue
            h, d = pos.get(e.source), pos.get(e.target)
            if h is None or d is None or h == d:
                continue
            out.append(PhenoTriple(s.id, "as", None, form(h), h, e.role, form(d), d))
            if e.role == "ARG3":
                out.append(PhenoTriple(s.id, "ditr", None, form(h), h, e.role, form(d), d))
            if e.source in passive_heads and e.role in ("ARG1", "ARG2"):
                out.append(PhenoTriple(s.id, "passive", None, form(h), h, e.role, form(d), d))
    return out


def curve_metrics(report: PhenoReport) -> dict[str, float | None]:
    """Recall per learning-curve group; None when the group has no gold triples."""
    out: dict[str, float | None] = {}
    for name, (phen, sub) in CURVE_GROUPS.items():
        try:
            row = report.get(phen, sub or "all")
        except KeyError:
            out[name] = None
            continue
        if name == "compound":
            # nominal compounds only: total minus the named-entity subtype
            try:
                ner = report.get("comp", "A")
            except KeyError:
                ner = PhenoRow("comp", "A", 0, 0)
            count, hit = row.count - ner.count, row.recovered - ner.recovered
            out[name] = hit / count if count else None
        else:
            out[name] = row.recall
    return out
