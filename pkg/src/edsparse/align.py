"""Node-to-token alignment, (de)lexicalization and per-token concept tags."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Instance, Sentence
from .graph import EdsGraph, EdsNode

EMPTY = "∅"
SEP = "⊕"


class AlignmentError(ValueError):
    def __init__(self, nodes):
        self.nodes = list(nodes)
        super().__init__("unalignable node(s): " + ", ".join(
            f"{n.id}:{n.predicate}<{n.start}:{n.end}>" for n in self.nodes))


@dataclass(frozen=True)
class ConceptTag:
    parts: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))

    def __str__(self):
        return SEP.join(self.parts) if self.parts else EMPTY

    @classmethod
    def parse(cls, s: str) -> ConceptTag:
        if s == EMPTY or s == "":
            return cls(())
        return cls(tuple(s.split(SEP)))

    @property
    def empty(self) -> bool:
        return not self.parts


def is_surface(predicate: str) -> bool:
    return predicate.startswith("_")


def align_node(node: EdsNode, sentence: Sentence) -> int | None:
    """Token index for one node, or None when its anchor overlaps no token."""
    toks = sentence.tokens
    covered = [i for i, t in enumerate(toks)
               if t.start < node.end and node.start < t.end
               or (node.start == node.end and t.start <= node.start < t.end)]
    if not covered:
        return None
    if len(covered) == 1:
        return covered[0]
    first, last = toks[covered[0]], toks[covered[-1]]
    if node.start != first.start or node.end != last.end:
        # anchor does not sit on token boundaries
        for i in covered:
            if toks[i].start <= node.start < toks[i].end:
                return i
        return covered[0]
    if node.predicate.startswith("compound"):
        return covered[0]
    if not is_surface(node.predicate):
        return covered[-1]
    return covered[0]


def align_nodes(instance: Instance) -> dict[str, int]:
    return align_graph(instance.graph, instance.sentence)


def align_graph(graph: EdsGraph, sentence: Sentence) -> dict[str, int]:
    out, bad = {}, []
    for node in graph.nodes:
        i = align_node(node, sentence)
        if i is None:
            bad.append(node)
        else:
            out[node.id] = i
    if bad:
        raise AlignmentError(bad)
    return out


def split_surface(predicate: str) -> tuple[str, str] | None:
    """``_drug_n_1`` -> ("drug", "_n_1"); None for abstract predicates."""
    if not is_surface(predicate):
        return None
    cut = predicate.find("_", 1)
    if cut == -1:
        return predicate[1:], ""
    return predicate[1:cut], predicate[cut:]


def delexicalize(predicate: str, lemma: str | None = None) -> str:
    """Replace the lemma part of a surface predicate by ``*``.

    When ``lemma`` is given and does not match the predicate's lemma part the
    predicate is kept lexicalized, so relexicalization stays exact.
    """
    parts = split_surface(predicate)
    if parts is None:
        return predicate
    pred_lemma, rest = parts
    if lemma is not None and pred_lemma.lower() != lemma.lower():
        return predicate
    return "*" + rest


def compose_tags(instance: Instance, alignment: dict[str, int]) -> list[ConceptTag]:
    per_token: list[list[str]] = [[] for _ in instance.sentence.tokens]
    for node in instance.graph.nodes:
        tok = instance.sentence.tokens[alignment[node.id]]
        per_token[alignment[node.id]].append(delexicalize(node.predicate, tok.lemma))
    return [ConceptTag(tuple(p)) for p in per_token]


def relexicalize_part(part: str, lemma: str) -> str:
    if part.startswith("*"):
        return "_" + lemma.lower() + part[1:]
    return part


def relexicalize(tags: list[ConceptTag], sentence: Sentence) -> list[tuple[EdsNode, int]]:
    """Expand tags into nodes anchored on their token; returns (node, token index)."""
    if len(tags) != len(sentence.tokens):
        raise ValueError(f"{len(tags)} tags for {len(sentence.tokens)} tokens")
    out = []
    for i, (tag, tok) in enumerate(zip(tags, sentence.tokens)):
        for k, part in enumerate(tag.parts):
            pred = relexicalize_part(part, tok.lemma)
            carg = tok.form if pred == "named" else None
            out.append((EdsNode(f"n{i}_{k}", pred, tok.start, tok.end, carg), i))
    return out


def gold_tags(instance: Instance) -> list[ConceptTag]:
    return compose_tags(instance, align_nodes(instance))


class TagVocabulary:
    """Bijective tag <-> id mapping with id 0 reserved for the empty tag."""

    def __init__(self, tags=(), counts=None):
        self.itos: list[str] = [EMPTY]
        self.stoi: dict[str, int] = {EMPTY: 0}
        self.counts: Counter = Counter()
        for t in tags:
            self.add(t, (counts or {}).get(t, 0))

    def add(self, tag: str, count: int = 0) -> int:
        if tag not in self.stoi:
            self.stoi[tag] = len(self.itos)
            self.itos.append(tag)
        self.counts[tag] += count
        return self.stoi[tag]

    @classmethod
    def build(cls, tag_sequences, min_count: int = 1) -> TagVocabulary:
        counts = Counter(str(t) for seq in tag_sequences for t in seq)
        vocab = cls()
        vocab.counts[EMPTY] = counts.pop(EMPTY, 0)
        for tag in sorted(counts, key=lambda t: (-counts[t], t)):
            if counts[tag] >= min_count:
                vocab.add(tag, counts[tag])
            else:
                vocab.counts[EMPTY] += counts[tag]
        return vocab

    def __len__(self):
        return len(self.itos)

    def index(self, tag: ConceptTag | str) -> int:
        return self.stoi.get(str(tag), 0)

    def tag(self, i: int) -> ConceptTag:
        return ConceptTag.parse(self.itos[i])

    def dumps(self) -> str:
        return "".join(f"{t}\t{i}\t{self.counts.get(t, 0)}\n" for i, t in enumerate(self.itos))

    @classmethod
    def loads(cls, text: str) -> TagVocabulary:
        vocab = cls()
        rows = [line.split("\t") for line in text.splitlines() if line.strip()]
        for tag, idx, count in sorted(rows, key=lambda r: int(r[1])):
            if int(idx) == 0:
                if tag != EMPTY:
                    raise ValueError("tag id 0 must be the empty tag")
                vocab.counts[EMPTY] = int(count)
                continue
            if int(idx) != len(vocab.itos):
                raise ValueError(f"non-contiguous tag id {idx}")
            vocab.add(tag, int(count))
        return vocab
