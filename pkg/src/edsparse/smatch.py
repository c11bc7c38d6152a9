"""Smatch for possibly disconnected EDS graphs.

Nodes are matched on predicate only (anchors ignored). The node mapping is
searched by steepest-ascent hill climbing with restarts; ``smatch_oracle``
enumerates all injective mappings and is the reference for small graphs.
"""
from __future__ import annotations

import random
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .graph import EdsGraph

ORACLE_LIMIT = 8


@dataclass
class AlignmentMapping:
    mapping: dict[str, str]
    matched: int
    pred_total: int
    gold_total: int
    precision: float
    recall: float
    f: float
    concept_matched: int = 0
    concept_pred: int = 0
    concept_gold: int = 0
    arc_matched: int = 0
    arc_pred: int = 0
    arc_gold: int = 0
    flags: list[str] = field(default_factory=list)

    @property
    def concept_f(self) -> float:
        return _f(self.concept_matched, self.concept_pred, self.concept_gold)

    @property
    def arc_f(self) -> float:
        return _f(self.arc_matched, self.arc_pred, self.arc_gold)


def _prf(matched, n_pred, n_gold):
    p = matched / n_pred if n_pred else 0.0
    r = matched / n_gold if n_gold else 0.0
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def _f(matched, n_pred, n_gold):
    if n_pred == 0 and n_gold == 0:
        return 1.0
    return _prf(matched, n_pred, n_gold)[2]


class _Problem:
    """Precomputed match tables between a predicted and a gold graph."""

    def __init__(self, pred: EdsGraph, gold: EdsGraph, include_top: bool = True):
        self.pred, self.gold = pred, gold
        self.p_ids = [n.id for n in pred.nodes]
        self.g_ids = [n.id for n in gold.nodes]
        np_, ng = len(self.p_ids), len(self.g_ids)
        pidx = {x: i for i, x in enumerate(self.p_ids)}
        gidx = {x: j for j, x in enumerate(self.g_ids)}
        ptop = pidx.get(pred.top) if include_top and pred.top is not None else None
        gtop = gidx.get(gold.top) if include_top and gold.top is not None else None
        # per node pair: instance match, plus top and CARG attribute matches
        self.inst = [[0] * ng for _ in range(np_)]
        self.inst_only = [[0] * ng for _ in range(np_)]
        for i, pn in enumerate(pred.nodes):
            for j, gn in enumerate(gold.nodes):
                hit = int(pn.predicate == gn.predicate)
                self.inst_only[i][j] = hit
                extra = int(ptop == i and gtop == j)
                extra += int(pn.carg is not None and pn.carg == gn.carg)
                self.inst[i][j] = hit + extra
        self.p_edges = [(pidx[e.source], pidx[e.target], e.role) for e in pred.edges]
        self.g_edges = {(gidx[e.source], gidx[e.target], e.role) for e in gold.edges}
        self.incident: list[list[int]] = [[] for _ in range(np_)]
        for k, (a, b, _) in enumerate(self.p_edges):
            self.incident[a].append(k)
            self.incident[b].append(k)
        n_carg_p = sum(n.carg is not None for n in pred.nodes)
        n_carg_g = sum(n.carg is not None for n in gold.nodes)
        self.pred_total = np_ + len(pred.edges) + n_carg_p + (ptop is not None)
        self.gold_total = ng + len(gold.edges) + n_carg_g + (gtop is not None)
        self.best_inst = [max(row, default=0) for row in self.inst]

    def edge_hit(self, m, k) -> int:
        a, b, r = self.p_edges[k]
        return int(m[a] >= 0 and m[b] >= 0 and (m[a], m[b], r) in self.g_edges)

    def score(self, m) -> int:
        s = sum(self.inst[i][j] for i, j in enumerate(m) if j >= 0)
        return s + sum(self.edge_hit(m, k) for k in range(len(self.p_edges)))

    def local(self, m, nodes) -> int:
        s = sum(self.inst[i][m[i]] for i in nodes if m[i] >= 0)
        edges = set()
        for i in nodes:
            edges.update(self.incident[i])
        return s + sum(self.edge_hit(m, k) for k in edges)

    def result(self, m) -> AlignmentMapping:
        matched = self.score(m)
        flags = []
        if self.pred_total == 0 and self.gold_total == 0:
            p = r = f = 1.0
            flags.append("both graphs empty")
        else:
            p, r, f = _prf(matched, self.pred_total, self.gold_total)
        concept = sum(self.inst_only[i][j] for i, j in enumerate(m) if j >= 0)
        arcs = sum(self.edge_hit(m, k) for k in range(len(self.p_edges)))
        mapping = {self.p_ids[i]: self.g_ids[j] for i, j in enumerate(m) if j >= 0}
        return AlignmentMapping(mapping, matched, self.pred_total, self.gold_total, p, r, f,
                                concept, len(self.p_ids), len(self.g_ids),
                                arcs, len(self.p_edges), len(self.g_edges), flags)


def _greedy_init(prob: _Problem) -> list[int]:
    m = [-1] * len(prob.p_ids)
    used = set()
    for i in range(len(m)):
        best, best_j = 0, -1
        for j in range(len(prob.g_ids)):
            if j not in used and prob.inst[i][j] > best:
                best, best_j = prob.inst[i][j], j
        if best_j >= 0:
            m[i] = best_j
            used.add(best_j)
    return m


def _random_init(prob: _Problem, rng: random.Random) -> list[int]:
    m = [-1] * len(prob.p_ids)
    free = list(range(len(prob.g_ids)))
    order = list(range(len(m)))
    rng.shuffle(order)
    for i in order:
        if not free:
            break
        cands = [j for j in free if prob.inst_only[i][j]]
        j = rng.choice(cands or free)
        m[i] = j
        free.remove(j)
    return m


def _climb(prob: _Problem, m: list[int], trace: list[int] | None = None) -> tuple[list[int], int]:
    score = prob.score(m)
    n_p, n_g = len(prob.p_ids), len(prob.g_ids)
    while True:
        used = set(j for j in m if j >= 0)
        best_gain, best_move = 0, None
        for i in range(n_p):
            before = prob.local(m, (i,))
            old = m[i]
            for j in range(n_g):
                if j in used:
                    continue
                m[i] = j
                gain = prob.local(m, (i,)) - before
                m[i] = old
                if gain > best_gain:
                    best_gain, best_move = gain, ("move", i, j)
        for i in range(n_p):
            for k in range(i + 1, n_p):
                if m[i] == m[k]:
                    continue
                before = prob.local(m, (i, k))
                m[i], m[k] = m[k], m[i]
                gain = prob.local(m, (i, k)) - before
                m[i], m[k] = m[k], m[i]
                if gain > best_gain:
                    best_gain, best_move = gain, ("swap", i, k)
        if best_move is None:
            return m, score
        kind, a, b = best_move
        if kind == "move":
            m[a] = b
        else:
            m[a], m[b] = m[b], m[a]
        score += best_gain
        if trace is not None:
            trace.append(score)


def smatch(pred: EdsGraph, gold: EdsGraph, restarts: int = 4, seed: int = 0,
           include_top: bool = True, trace: list[int] | None = None) -> AlignmentMapping:
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    prob = _Problem(pred, gold, include_top)
    rng = random.Random(seed)
    best_m, best = _climb(prob, _greedy_init(prob), trace)
    upper = sum(prob.best_inst) + len(prob.p_edges)
    for _ in range(restarts - 1):
        if best >= upper:
            break
        m, s = _climb(prob, _random_init(prob, rng))
        if s > best:
            best_m, best = m, s
    return prob.result(best_m)


def smatch_oracle(pred: EdsGraph, gold: EdsGraph, include_top: bool = True) -> AlignmentMapping:
    """Exact optimum by branch-and-bound over injective node mappings."""
    n_p, n_g = len(pred.nodes), len(gold.nodes)
    if min(n_p, n_g) > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to graphs with at most {ORACLE_LIMIT} nodes on one side")
    prob = _Problem(pred, gold, include_top)
    # edges are scored once both endpoints are assigned; endpoints in DFS order
    closing: list[list[int]] = [[] for _ in range(n_p)]
    for k, (a, b, _) in enumerate(prob.p_edges):
        closing[max(a, b)].append(k)
    rest_inst = [0] * (n_p + 1)
    rest_edges = [0] * (n_p + 1)
    for i in range(n_p - 1, -1, -1):
        rest_inst[i] = rest_inst[i + 1] + prob.best_inst[i]
        rest_edges[i] = rest_edges[i + 1] + len(closing[i])
    skips_allowed = max(0, n_p - n_g)
    m = [-1] * n_p
    used = [False] * n_g
    best = [-1, list(m)]

    def dfs(i, score, skips):
        if score + rest_inst[i] + rest_edges[i] <= best[0]:
            return
        if i == n_p:
            best[0], best[1] = score, list(m)
            return
        for j in range(n_g):
            if used[j]:
                continue
            used[j], m[i] = True, j
            gain = prob.inst[i][j] + sum(prob.edge_hit(m, k) for k in closing[i])
            dfs(i + 1, score + gain, skips)
            used[j], m[i] = False, -1
        if skips < skips_allowed:
            dfs(i + 1, score, skips + 1)

    dfs(0, 0, 0)
    return prob.result(best[1])


# -- corpus level ------------------------------------------------------------------

@dataclass
class CorpusSmatch:
    precision: float
    recall: float
    f: float
    concept_f: float
    arc_f: float
    rows: list[tuple[str, AlignmentMapping]]
    flags: list[str] = field(default_factory=list)


def graph_seed(seed: int, graph_id: str) -> int:
    return (seed * 1000003 + zlib.crc32(graph_id.encode("utf-8"))) & 0x7FFFFFFF


def _score_pair(args):
    gid, pred, gold, restarts, seed, include_top = args
    return smatch(pred, gold, restarts, graph_seed(seed, gid), include_top)


def corpus_smatch(pairs, restarts: int = 4, seed: int = 0, include_top: bool = True,
                  macro: bool = False, jobs: int = 1) -> CorpusSmatch:
    """``pairs`` is a list of (id, pred, gold); a None prediction counts as empty."""
    tasks = [(gid, pred if pred is not None else EdsGraph(), gold, restarts, seed, include_top)
             for gid, pred, gold in pairs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_score_pair, tasks, chunksize=8))
    else:
        results = [_score_pair(t) for t in tasks]
    rows = [(t[0], r) for t, r in zip(tasks, results)]
    flags = [f"{gid}: {fl}" for gid, r in rows for fl in r.flags]
    if macro:
        n = len(rows) or 1
        p = sum(r.precision for _, r in rows) / n
        rc = sum(r.recall for _, r in rows) / n
        f = sum(r.f for _, r in rows) / n
        cf = sum(r.concept_f for _, r in rows) / n
        af = sum(r.arc_f for _, r in rows) / n
        return CorpusSmatch(p, rc, f, cf, af, rows, flags)
    m = sum(r.matched for _, r in rows)
    tp = sum(r.pred_total for _, r in rows)
    tg = sum(r.gold_total for _, r in rows)
    if tp == 0 and tg == 0:
        p = rc = f = 1.0
    else:
        p, rc, f = _prf(m, tp, tg)
    cf = _f(sum(r.concept_matched for _, r in rows), sum(r.concept_pred for _, r in rows),
            sum(r.concept_gold for _, r in rows))
    af = _f(sum(r.arc_matched for _, r in rows), sum(r.arc_pred for _, r in rows),
            sum(r.arc_gold for _, r in rows))
    return CorpusSmatch(p, rc, f, cf, af, rows, flags)


def format_report(result: CorpusSmatch) -> str:
    lines = ["id\tP\tR\tF\tconcept_F\tarc_F"]
    for gid, r in result.rows:
        lines.append(f"{gid}\t{r.precision:.4f}\t{r.recall:.4f}\t{r.f:.4f}\t"
                     f"{r.concept_f:.4f}\t{r.arc_f:.4f}")
    lines.append(f"#corpus\t{result.precision:.4f}\t{result.recall:.4f}\t{result.f:.4f}\t"
                 f"{result.concept_f:.4f}\t{result.arc_f:.4f}")
    return "\n".join(lines) + "\n"
