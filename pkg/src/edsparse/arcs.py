"""Stage 2: dependency identification between concept nodes.

Arcs are scored by an MLP over concatenated concept representations
(contextual token vector ⊕ concept embedding) and trained with a structured
hinge loss whose margin is a weighted Hamming cost.
"""
from __future__ import annotations

import copy
import logging
import random
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .align import align_nodes, delexicalize
from .config import TrainConfig
from .corpus import Instance, Sentence
from .encoder import UNK, BiLSTM, TokenEmbedder, Vocab, glorot_, param
from .graph import EdsEdge, EdsGraph, node_sort_key
from .tagger import prf

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HammingCost:
    fp: float = 0.4
    fn: float = 0.6

    def __post_init__(self):
        if self.fp < 0 or self.fn < 0:
            raise ValueError("Hamming weights must be non-negative")


def hamming_delta(gold, pred, cost: HammingCost) -> float:
    gold, pred = set(gold), set(pred)
    return cost.fp * len(pred - gold) + cost.fn * len(gold - pred)


class Index:
    """String <-> id with an optional reserved unknown entry at id 0."""

    def __init__(self, items=(), unk: bool = True):
        self.items = ([UNK] if unk else []) + [x for x in items if not (unk and x == UNK)]
        self._ids = {x: i for i, x in enumerate(self.items)}
        self.unk = unk

    def __len__(self):
        return len(self.items)

    def __getitem__(self, x) -> int:
        if x in self._ids:
            return self._ids[x]
        if self.unk:
            return 0
        raise KeyError(x)


class ArcModel(nn.Module):
    def __init__(self, vocab: Vocab, concepts: Index, roles: Index, cfg: TrainConfig):
        super().__init__()
        self.concepts, self.roles = concepts, roles
        self.activation = cfg.activation
        self.embedder = TokenEmbedder(vocab, cfg.word_dim, cfg.char_dim, cfg.char_hidden,
                                      cfg.pos_dim, cfg.ctx_dim, cfg.ctx_layers)
        self.encoder = BiLSTM(self.embedder.output_dim, cfg.hidden, cfg.layers)
        self.concept_emb = param(len(concepts), cfg.concept_dim)
        dim = self.encoder.output_dim + cfg.concept_dim
        self.arc_w1 = param(cfg.mlp_hidden, 2 * dim)
        self.arc_b = param(cfg.mlp_hidden)
        self.arc_w2 = param(cfg.mlp_hidden)
        self.label_w1 = param(cfg.label_hidden, 2 * dim)
        self.label_b = param(cfg.label_hidden)
        self.label_w2 = param(len(roles), cfg.label_hidden)
        self.label_b2 = param(len(roles))
        self.top_w = param(dim)

    def init(self, gen, pretrained=None):
        self.embedder.init(gen, pretrained)
        self.encoder.init(gen)
        for p in (self.concept_emb, self.arc_w1, self.label_w1, self.label_w2):
            glorot_(p, gen)
        glorot_(self.arc_w2.view(1, -1), gen)
        glorot_(self.top_w.view(1, -1), gen)
        return self

    def delta(self, x):
        return torch.relu(x) if self.activation == "relu" else torch.tanh(x)

    def concept_reprs(self, sentence: Sentence, tokens: list[int], concepts: list[str],
                      ctx=None) -> torch.Tensor:
        """c_i = r_{token(i)} ⊕ n_i for every node."""
        r = self.encoder(self.embedder(sentence, ctx))
        ids = torch.tensor([self.concepts[c] for c in concepts], dtype=torch.long)
        return torch.cat([r[torch.tensor(tokens, dtype=torch.long)], self.concept_emb[ids]], dim=1)

    def arc_scores(self, c: torch.Tensor) -> torch.Tensor:
        return mlp_pair_scores(c, self.arc_w1, self.arc_b, self.arc_w2, self.delta)

    def label_scores(self, c: torch.Tensor, arcs: list[tuple[int, int]]) -> torch.Tensor:
        if not arcs:
            return c.new_zeros(0, len(self.roles))
        heads = torch.tensor([p for p, _ in arcs])
        deps = torch.tensor([a for _, a in arcs])
        pair = torch.cat([c[heads], c[deps]], dim=1)
        hidden = self.delta(pair @ self.label_w1.T + self.label_b)
        return hidden @ self.label_w2.T + self.label_b2

    def top_scores(self, c: torch.Tensor) -> torch.Tensor:
        return c @ self.top_w


def mlp_pair_scores(c, w1, b, w2, delta=torch.relu) -> torch.Tensor:
    """score[p, a] = w2 · δ(W1 (c_p ⊕ c_a) + b); the diagonal is zeroed."""
    dim = c.shape[1]
    head = c @ w1[:, :dim].T
    dep = c @ w1[:, dim:].T
    hidden = delta(head[:, None, :] + dep[None, :, :] + b)
    scores = hidden @ w2
    n = c.shape[0]
    return scores * (1 - torch.eye(n, dtype=scores.dtype))


def score_arcs(c: torch.Tensor, model: ArcModel) -> torch.Tensor:
    return model.arc_scores(c)


def label_arcs(c: torch.Tensor, model: ArcModel, arcs) -> dict[tuple[int, int], str]:
    arcs = sorted(arcs)
    with torch.no_grad():
        scores = model.label_scores(c, arcs)
    out = {}
    for arc, row in zip(arcs, scores.tolist()):
        best = 0
        for j, v in enumerate(row):
            if v > row[best]:
                best = j
        out[arc] = model.roles.items[best]
    return out


def positive_arcs(scores) -> set[tuple[int, int]]:
    s = np.asarray(scores, dtype=float)
    n = s.shape[0]
    return {(p, a) for p in range(n) for a in range(n) if p != a and s[p, a] > 0}


def spanning_arcs(scores) -> set[tuple[int, int]]:
    """Maximum spanning tree on the undirected collapse, oriented per edge."""
    s = np.asarray(scores, dtype=float)
    n = s.shape[0]
    cand = []
    for u in range(n):
        for v in range(u + 1, n):
            if s[u, v] >= s[v, u]:
                cand.append((-s[u, v], u, v, (u, v)))
            else:
                cand.append((-s[v, u], u, v, (v, u)))
    cand.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for _, u, v, arc in cand:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.add(arc)
            if len(tree) == n - 1:
                break
    return tree


def decode_mscg(scores, connected: bool = True) -> set[tuple[int, int]]:
    """Positive-score arcs, plus a maximum spanning tree when ``connected``."""
    arcs = positive_arcs(scores)
    if connected:
        arcs |= spanning_arcs(scores)
    return arcs


def cost_augment(scores, gold: set[tuple[int, int]], cost: HammingCost) -> np.ndarray:
    """Scores under which independent arc selection maximizes Score + Δ."""
    s = np.array(scores, dtype=float)
    n = s.shape[0]
    for p in range(n):
        for a in range(n):
            if p != a:
                s[p, a] += -cost.fn if (p, a) in gold else cost.fp
    return s


def structure_score(scores: torch.Tensor, arcs) -> torch.Tensor:
    if not arcs:
        return scores.new_zeros(())
    idx = sorted(arcs)
    return scores[torch.tensor([p for p, _ in idx]), torch.tensor([a for _, a in idx])].sum()


def hinge_loss(scores: torch.Tensor, gold: set, cost: HammingCost):
    """max(0, Δ(G*, Ĝ) − Score(G*) + Score(Ĝ)) with Ĝ from cost-augmented decoding.

    Returns (loss, Ĝ). Connectivity is not enforced while training.
    """
    pred = positive_arcs(cost_augment(scores.detach().numpy(), gold, cost))
    margin = (hamming_delta(gold, pred, cost) - structure_score(scores, gold)
              + structure_score(scores, pred))
    return torch.clamp(margin, min=0.0), pred


# -- instance preparation ------------------------------------------------------

@dataclass
class ArcExample:
    instance: Instance
    node_ids: list[str]
    tokens: list[int]
    concepts: list[str]
    arcs: set[tuple[int, int]]
    labels: dict[tuple[int, int], str]
    top: int | None


def prepare(instance: Instance) -> ArcExample:
    align = align_nodes(instance)
    nodes = sorted(instance.graph.nodes, key=node_sort_key)
    pos = {n.id: i for i, n in enumerate(nodes)}
    toks = instance.sentence.tokens
    concepts = [delexicalize(n.predicate, toks[align[n.id]].lemma) for n in nodes]
    labels: dict[tuple[int, int], str] = {}
    for e in sorted(instance.graph.edges, key=lambda e: e.role):
        labels.setdefault((pos[e.source], pos[e.target]), e.role)
    top = pos.get(instance.graph.top) if instance.graph.top is not None else None
    return ArcExample(instance, [n.id for n in nodes], [align[n.id] for n in nodes],
                      concepts, set(labels), labels, top)


def predict_graph(model: ArcModel, sentence: Sentence, nodes, tokens: list[int],
                  concepts: list[str], connected: bool, ctx=None) -> EdsGraph:
    """Attach labeled arcs and a top to an ordered list of nodes."""
    if not nodes:
        return EdsGraph((), (), None, sentence.text)
    with torch.no_grad():
        c = model.concept_reprs(sentence, tokens, concepts, ctx)
        scores = model.arc_scores(c).numpy()
        top_scores = model.top_scores(c).tolist()
    arcs = decode_mscg(scores, connected)
    labels = label_arcs(c, model, arcs)
    edges = tuple(EdsEdge(nodes[p].id, nodes[a].id, labels[(p, a)]) for p, a in sorted(arcs))
    top = max(range(len(nodes)), key=lambda i: (top_scores[i], -i))
    return EdsGraph(tuple(nodes), edges, nodes[top].id, sentence.text)


# -- dependency metrics ----------------------------------------------------------

@dataclass
class DepMetrics:
    up: float
    ur: float
    uf: float
    lp: float
    lr: float
    lf: float
    gold: int = 0
    pred: int = 0
    unlabeled_matched: int = 0
    labeled_matched: int = 0
    gold_pairs: int = 0
    pred_pairs: int = 0

    def __add__(self, other: DepMetrics) -> DepMetrics:
        return dep_metrics_from_counts(self.gold + other.gold, self.pred + other.pred,
                                       self.labeled_matched + other.labeled_matched,
                                       self.gold_pairs + other.gold_pairs,
                                       self.pred_pairs + other.pred_pairs,
                                       self.unlabeled_matched + other.unlabeled_matched)


def dep_metrics_from_counts(n_gold, n_pred, l_match, g_pairs, p_pairs, u_match) -> DepMetrics:
    up, ur, uf = prf(u_match, p_pairs, g_pairs)
    lp, lr, lf = prf(l_match, n_pred, n_gold)
    return DepMetrics(up, ur, uf, lp, lr, lf, n_gold, n_pred, u_match, l_match, g_pairs, p_pairs)


def dep_counts(gold: EdsGraph, pred: EdsGraph, correspondence: dict[str, str]) -> DepMetrics:
    """⟨c_h, c_d, l⟩ tuple overlap; ``correspondence`` maps pred ids to gold ids."""
    g_lab = {(e.source, e.target, e.role) for e in gold.edges}
    p_lab = set()
    for e in pred.edges:
        h, d = correspondence.get(e.source), correspondence.get(e.target)
        # unmapped endpoints can never match; keep them distinct from gold ids
        p_lab.add((h if h is not None else ("pred", e.source),
                   d if d is not None else ("pred", e.target), e.role))
    g_un = {(h, d) for h, d, _ in g_lab}
    p_un = {(h, d) for h, d, _ in p_lab}
    return dep_metrics_from_counts(len(g_lab), len(p_lab), len(g_lab & p_lab),
                                   len(g_un), len(p_un), len(g_un & p_un))


def dep_metrics(gold: EdsGraph, pred: EdsGraph, correspondence: dict[str, str] | None = None):
    if correspondence is None:
        correspondence = {n.id: n.id for n in pred.nodes}
    return dep_counts(gold, pred, correspondence)


# -- training ------------------------------------------------------------------

def evaluate_arcs(model: ArcModel, examples: list[ArcExample], connected: bool, ctx=None) -> DepMetrics:
    """Labeled/unlabeled scores with gold concepts and alignments."""
    ctx = ctx or {}
    total = dep_metrics_from_counts(0, 0, 0, 0, 0, 0)
    for ex in examples:
        g = ex.instance.graph
        node_map = g.node_map
        nodes = [node_map[i] for i in ex.node_ids]
        pred = predict_graph(model, ex.instance.sentence, nodes, ex.tokens, ex.concepts,
                             connected, ctx.get(ex.instance.id))
        total = total + dep_metrics(g, pred)
    return total


def build_arc_model(train: list[Instance], config: TrainConfig, vocab: Vocab | None = None,
                    pretrained=None) -> tuple[ArcModel, list[ArcExample]]:
    examples = [prepare(x) for x in train]
    vocab = vocab or Vocab.build([x.sentence for x in train], config.threshold)
    concepts = Index(sorted({c for ex in examples for c in ex.concepts}))
    roles = Index(sorted({r for ex in examples for r in ex.labels.values()}) or ["ARG1"], unk=False)
    gen = torch.Generator().manual_seed(config.seed + 1)
    return ArcModel(vocab, concepts, roles, config).init(gen, pretrained), examples


def example_loss(model: ArcModel, ex: ArcExample, cost: HammingCost, ctx=None):
    c = model.concept_reprs(ex.instance.sentence, ex.tokens, ex.concepts, ctx)
    scores = model.arc_scores(c)
    loss, pred = hinge_loss(scores, ex.arcs, cost)
    if ex.labels:
        arcs = sorted(ex.labels)
        target = torch.tensor([model.roles[ex.labels[a]] for a in arcs])
        loss = loss + nn.functional.cross_entropy(model.label_scores(c, arcs), target,
                                                  reduction="sum")
    if ex.top is not None:
        loss = loss - torch.log_softmax(model.top_scores(c), 0)[ex.top]
    return loss, pred


def train_arcs(train: list[Instance], dev: list[Instance], config: TrainConfig,
               ctx: dict | None = None, vocab: Vocab | None = None, pretrained=None,
               on_epoch=None) -> ArcModel:
    if not train:
        raise ValueError("empty training set")
    ctx = ctx or {}
    cost = HammingCost(config.cost_fp, config.cost_fn)
    model, examples = build_arc_model(train, config, vocab, pretrained)
    dev_examples = [prepare(x) for x in dev] if dev else examples
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    rng = random.Random(config.seed + 1)

    best_f, best_state = -1.0, None
    for epoch in range(1, config.arc_epochs + 1):
        total = 0.0
        order = list(range(len(examples)))
        rng.shuffle(order)
        for i in range(0, len(order), config.batch_size):
            batch = [examples[j] for j in order[i:i + config.batch_size]]
            opt.zero_grad()
            losses = [example_loss(model, ex, cost, ctx.get(ex.instance.id))[0] for ex in batch]
            loss = sum(losses) / len(batch)
            if loss.requires_grad:
                loss.backward()
                nn.utils.clip_grad_norm_(model.parameters(), config.clip)
                opt.step()
            total += float(loss.detach()) * len(batch)
        metrics = evaluate_arcs(model, dev_examples, config.connected, ctx)
        if on_epoch:
            on_epoch(epoch, total, metrics)
        if metrics.lf > best_f:
            best_f, best_state = metrics.lf, copy.deepcopy(model.state_dict())
    model.load_state_dict(best_state)
    return model
