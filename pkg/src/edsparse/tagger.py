"""Stage 1: concept identification as per-token tag classification."""
from __future__ import annotations

import copy
import logging
import random
from collections import Counter
from dataclasses import dataclass, field

import torch
from torch import nn

from .align import ConceptTag, TagVocabulary, gold_tags
from .config import TrainConfig
from .corpus import Instance, Sentence
from .encoder import BiLSTM, TokenEmbedder, Vocab, glorot_, param

log = logging.getLogger(__name__)


class Tagger(nn.Module):
    def __init__(self, vocab: Vocab, tags: TagVocabulary, cfg: TrainConfig):
        super().__init__()
        self.tags = tags
        self.embedder = TokenEmbedder(vocab, cfg.word_dim, cfg.char_dim, cfg.char_hidden,
                                      cfg.pos_dim, cfg.ctx_dim, cfg.ctx_layers)
        self.encoder = BiLSTM(self.embedder.output_dim, cfg.hidden, cfg.layers)
        self.out = param(len(tags), self.encoder.output_dim)
        self.out_bias = param(len(tags))

    def init(self, gen, pretrained=None):
        self.embedder.init(gen, pretrained)
        self.encoder.init(gen)
        glorot_(self.out, gen)
        return self

    def logits(self, sentence: Sentence, ctx=None) -> torch.Tensor:
        r = self.encoder(self.embedder(sentence, ctx))
        return r @ self.out.T + self.out_bias

    def probabilities(self, sentence: Sentence, ctx=None) -> torch.Tensor:
        return torch.softmax(self.logits(sentence, ctx), dim=1)

    def predict(self, sentence: Sentence, ctx=None) -> list[ConceptTag]:
        with torch.no_grad():
            scores = self.logits(sentence, ctx)
        return [self.tags.tag(i) for i in argmax_rows(scores)]


def argmax_rows(scores: torch.Tensor) -> list[int]:
    """Row-wise argmax, ties resolved to the lowest column."""
    out = []
    for row in scores.tolist():
        best = 0
        for j, v in enumerate(row):
            if v > row[best]:
                best = j
        out.append(best)
    return out


def predict_tags(sentence: Sentence, tagger: Tagger, ctx=None) -> list[ConceptTag]:
    return tagger.predict(sentence, ctx)


@dataclass
class TagMetrics:
    accuracy: float
    precision: float
    recall: float
    f: float
    tokens: int = 0
    correct_tags: int = 0
    gold_concepts: int = 0
    pred_concepts: int = 0
    matched_concepts: int = 0
    flags: list[str] = field(default_factory=list)


def prf(matched: int, n_pred: int, n_gold: int, flags: list | None = None):
    if n_pred == 0 and flags is not None:
        flags.append("precision undefined (no predictions)")
    if n_gold == 0 and flags is not None:
        flags.append("recall undefined (no gold items)")
    p = matched / n_pred if n_pred else 0.0
    r = matched / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def tag_metrics(gold: list[list[ConceptTag]], pred: list[list[ConceptTag]]) -> TagMetrics:
    """Tag accuracy counts ∅ as a tag; concept P/R/F ignores empty concepts."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold vs {len(pred)} predicted sentences")
    tokens = correct = 0
    g_total = p_total = matched = 0
    for k, (gs, ps) in enumerate(zip(gold, pred)):
        if len(gs) != len(ps):
            raise ValueError(f"sentence {k}: {len(gs)} gold vs {len(ps)} predicted tags")
        for gt, pt in zip(gs, ps):
            tokens += 1
            correct += gt == pt
            gc, pc = Counter(gt.parts), Counter(pt.parts)
            g_total += sum(gc.values())
            p_total += sum(pc.values())
            matched += sum((gc & pc).values())
    flags: list[str] = []
    p, r, f = prf(matched, p_total, g_total, flags)
    acc = correct / tokens if tokens else 0.0
    return TagMetrics(acc, p, r, f, tokens, correct, g_total, p_total, matched, flags)


def _batches(items, size, rng):
    order = list(range(len(items)))
    rng.shuffle(order)
    for i in range(0, len(order), size):
        yield [items[j] for j in order[i:i + size]]


def evaluate_tagger(tagger: Tagger, instances, ctx=None) -> TagMetrics:
    ctx = ctx or {}
    gold = [gold_tags(x) for x in instances]
    pred = [tagger.predict(x.sentence, ctx.get(x.id)) for x in instances]
    return tag_metrics(gold, pred)


def train_tagger(train: list[Instance], dev: list[Instance], config: TrainConfig,
                 ctx: dict | None = None, vocab: Vocab | None = None, pretrained=None,
                 on_epoch=None) -> Tagger:
    if not train:
        raise ValueError("empty training set")
    ctx = ctx or {}
    vocab = vocab or Vocab.build([x.sentence for x in train], config.threshold)
    gold = {x.id: gold_tags(x) for x in train}
    tags = TagVocabulary.build(gold.values(), config.min_tag_count)
    gen = torch.Generator().manual_seed(config.seed)
    model = Tagger(vocab, tags, config).init(gen, pretrained)
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    rng = random.Random(config.seed)
    targets = {k: torch.tensor([tags.index(t) for t in v]) for k, v in gold.items()}

    best_f, best_state = -1.0, None
    for epoch in range(1, config.tagger_epochs + 1):
        total = 0.0
        for batch in _batches(train, config.batch_size, rng):
            opt.zero_grad()
            n_tok = sum(len(x.sentence) for x in batch)
            loss = sum(nn.functional.cross_entropy(model.logits(x.sentence, ctx.get(x.id)),
                                                   targets[x.id], reduction="sum")
                       for x in batch) / n_tok
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), config.clip)
            opt.step()
            total += loss.item() * n_tok
        metrics = evaluate_tagger(model, dev or train, ctx)
        if on_epoch:
            on_epoch(epoch, total, metrics)
        if metrics.f > best_f:
            best_f, best_state = metrics.f, copy.deepcopy(model.state_dict())
    model.load_state_dict(best_state)
    return model

