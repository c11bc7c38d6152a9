"""Tokenized sentences, (sentence, graph) instances and down-sampling.

Sentence file layout (blank-line separated blocks)::

    #id s1
    #text The drug was introduced .
    1<TAB>The<TAB>the<TAB>DT<TAB>0<TAB>3
    ...
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .graph import EdsGraph, read_graphs


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    form: str
    lemma: str
    pos: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise CorpusError(f"sentence {self.id!r} has no tokens")
        prev_end = 0
        for i, t in enumerate(self.tokens):
            if t.start < prev_end or t.end <= t.start or t.end > len(self.text):
                raise CorpusError(f"sentence {self.id!r}: token {i + 1} ({t.form!r}) has bad span "
                                  f"{t.start}:{t.end}")
            prev_end = t.end

    def __len__(self):
        return len(self.tokens)

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]


@dataclass(frozen=True)
class Instance:
    sentence: Sentence
    graph: EdsGraph

    def __post_init__(self):
        n = len(self.sentence.text)
        for node in self.graph.nodes:
            if node.end > n:
                raise CorpusError(f"sentence {self.sentence.id!r}: node {node.id} anchor "
                                  f"<{node.start}:{node.end}> exceeds text length {n}")

    @property
    def id(self) -> str:
        return self.sentence.id


def parse_sentences(text: str, source: str = "<string>") -> list[Sentence]:
    sentences: list[Sentence] = []
    seen = set()
    block: list[tuple[int, str]] = []

    def flush():
        if not block:
            return
        sid = stext = None
        toks = []
        for lineno, line in block:
            if line.startswith("#id "):
                sid = line[4:].strip()
            elif line.startswith("#text "):
                stext = line[6:]
            elif line.startswith("#"):
                continue
            else:
                cols = line.split("\t")
                if len(cols) != 6:
                    raise CorpusError(f"{source}:{lineno}: expected 6 tab-separated columns, got {len(cols)}")
                try:
                    idx, start, end = int(cols[0]), int(cols[4]), int(cols[5])
                except ValueError:
                    raise CorpusError(f"{source}:{lineno}: non-integer index or span") from None
                if idx != len(toks) + 1:
                    raise CorpusError(f"{source}:{lineno}: token index {idx}, expected {len(toks) + 1}")
                toks.append(Token(cols[1], cols[2], cols[3], start, end))
        first = block[0][0]
        if sid is None or stext is None:
            raise CorpusError(f"{source}:{first}: block lacks '#id' or '#text'")
        if sid in seen:
            raise CorpusError(f"{source}:{first}: duplicate sentence id {sid!r}")
        seen.add(sid)
        try:
            sentences.append(Sentence(sid, stext, tuple(toks)))
        except CorpusError as exc:
            raise CorpusError(f"{source}:{first}: {exc}") from None
        block.clear()

    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            block.append((lineno, line))
        else:
            flush()
    flush()
    return sentences


def write_sentences(sentences) -> str:
    out = []
    for s in sentences:
        out.append(f"#id {s.id}\n#text {s.text}\n")
        for i, t in enumerate(s.tokens, 1):
            out.append(f"{i}\t{t.form}\t{t.lemma}\t{t.pos}\t{t.start}\t{t.end}\n")
        out.append("\n")
    return "".join(out)


def read_sentences(path) -> list[Sentence]:
    path = Path(path)
    return parse_sentences(path.read_text(encoding="utf-8"), str(path))


def pair_instances(sentences: list[Sentence], graphs: dict[str, EdsGraph]) -> list[Instance]:
    ids = {s.id for s in sentences}
    missing_sent = [gid for gid in graphs if gid not in ids]
    if missing_sent:
        raise CorpusError(f"graph ids without a sentence: {', '.join(missing_sent)}")
    missing_graph = [s.id for s in sentences if s.id not in graphs]
    if missing_graph:
        raise CorpusError(f"sentence ids without a graph: {', '.join(missing_graph)}")
    return [Instance(s, graphs[s.id]) for s in sentences]


def load_corpus(sentences_path, graphs_path) -> list[Instance]:
    sentences = read_sentences(sentences_path)
    graphs = read_graphs(Path(graphs_path).read_text(encoding="utf-8"))
    return pair_instances(sentences, graphs)


def downsample(instances: list[Instance], fraction: float, seed: int) -> list[Instance]:
    """Seeded subset of size round(fraction * N), returned in corpus order.

    Subsets are prefixes of one seeded shuffle, so for a fixed seed a larger
    fraction always contains a smaller one.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = len(instances)
    size = int(fraction * n + 0.5)
    if size == 0:
        raise ValueError(f"fraction {fraction} of {n} instances selects nothing")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    keep = sorted(order[:size])
    return [instances[i] for i in keep]
