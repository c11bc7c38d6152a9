"""Token embeddings (word / char-composed / POS / external context) and BiLSTM."""
from __future__ import annotations

import logging
import math
from collections import Counter
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .corpus import Sentence

log = logging.getLogger(__name__)

DTYPE = torch.float64
UNK = "<unk>"


def glorot_(t: torch.Tensor, gen: torch.Generator) -> torch.Tensor:
    fan_out, fan_in = (t.shape[0], t.shape[1]) if t.dim() == 2 else (t.shape[0], 1)
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    with torch.no_grad():
        t.copy_(torch.rand(t.shape, generator=gen, dtype=t.dtype) * 2 * bound - bound)
    return t


def param(*shape) -> nn.Parameter:
    return nn.Parameter(torch.zeros(*shape, dtype=DTYPE))


class LSTM(nn.Module):
    """One direction, one layer. Gates ordered input, forget, cell, output."""

    def __init__(self, input_dim: int, hidden: int):
        super().__init__()
        self.hidden = hidden
        self.weight = param(4 * hidden, input_dim + hidden)
        self.bias = param(4 * hidden)

    def init(self, gen):
        glorot_(self.weight, gen)

    def forward(self, xs: torch.Tensor, reverse: bool = False) -> torch.Tensor:
        m = xs.shape[0]
        h = xs.new_zeros(self.hidden)
        c = xs.new_zeros(self.hidden)
        # input projection for all steps at once; recurrence only for the hidden part
        wx = xs @ self.weight[:, : xs.shape[1]].T + self.bias
        wh = self.weight[:, xs.shape[1]:]
        out = [None] * m
        steps = range(m - 1, -1, -1) if reverse else range(m)
        H = self.hidden
        for t in steps:
            z = wx[t] + wh @ h
            i = torch.sigmoid(z[:H])
            f = torch.sigmoid(z[H:2 * H])
            g = torch.tanh(z[2 * H:3 * H])
            o = torch.sigmoid(z[3 * H:])
            c = f * c + i * g
            h = o * torch.tanh(c)
            out[t] = h
        if m == 0:
            return xs.new_zeros(0, self.hidden)
        return torch.stack(out)


class BiLSTM(nn.Module):
    """Stacked bidirectional LSTM; output row i is forward_i ⊕ backward_i."""

    def __init__(self, input_dim: int, hidden: int, layers: int = 1):
        super().__init__()
        if layers < 1:
            raise ValueError("need at least one layer")
        self.hidden = hidden
        self.fwd = nn.ModuleList()
        self.bwd = nn.ModuleList()
        for layer in range(layers):
            dim = input_dim if layer == 0 else 2 * hidden
            self.fwd.append(LSTM(dim, hidden))
            self.bwd.append(LSTM(dim, hidden))

    def init(self, gen):
        for a, b in zip(self.fwd, self.bwd):
            a.init(gen)
            b.init(gen)

    @property
    def output_dim(self):
        return 2 * self.hidden

    def forward(self, xs: torch.Tensor) -> torch.Tensor:
        for f, b in zip(self.fwd, self.bwd):
            xs = torch.cat([f(xs), b(xs, reverse=True)], dim=1)
        return xs

    def final_states(self, xs: torch.Tensor) -> torch.Tensor:
        """Last forward state ⊕ first backward state of the top layer."""
        out = self.forward(xs)
        return torch.cat([out[-1, : self.hidden], out[0, self.hidden:]])


def encode_sequence(a: torch.Tensor, encoder: BiLSTM) -> torch.Tensor:
    return encoder(a)


class CharComposer(nn.Module):
    """Word vector from a BiLSTM over character embeddings, projected to d_w."""

    def __init__(self, n_chars: int, char_dim: int, hidden: int, word_dim: int):
        super().__init__()
        self.chars = param(n_chars, char_dim)
        self.rnn = BiLSTM(char_dim, hidden, 1)
        self.proj = param(word_dim, 2 * hidden)
        self.proj_bias = param(word_dim)

    def init(self, gen):
        glorot_(self.chars, gen)
        self.rnn.init(gen)
        glorot_(self.proj, gen)

    def forward(self, char_ids: list[int]) -> torch.Tensor:
        xs = self.chars[torch.tensor(char_ids, dtype=torch.long)]
        return self.proj @ self.rnn.final_states(xs) + self.proj_bias


class ScalarMix(nn.Module):
    """Softmax-normalized weighted average over external context layers."""

    def __init__(self, n_layers: int):
        super().__init__()
        self.logits = param(n_layers)

    @property
    def weights(self) -> torch.Tensor:
        return torch.softmax(self.logits, 0)

    def forward(self, layers: torch.Tensor) -> torch.Tensor:
        return torch.einsum("l,lmd->md", self.weights, layers)


class Vocab:
    """Index for words (frequent only), characters and POS tags."""

    def __init__(self, words=(), chars=(), pos=(), threshold: int = 3):
        self.words = [UNK] + [w for w in words if w != UNK]
        self.chars = [UNK] + [c for c in chars if c != UNK]
        self.pos = [UNK] + [p for p in pos if p != UNK]
        self.threshold = threshold
        self._w = {w: i for i, w in enumerate(self.words)}
        self._c = {c: i for i, c in enumerate(self.chars)}
        self._p = {p: i for i, p in enumerate(self.pos)}

    @classmethod
    def build(cls, sentences, threshold: int = 3) -> Vocab:
        counts = Counter(t.form.lower() for s in sentences for t in s.tokens)
        words = sorted(w for w, c in counts.items() if c > threshold)
        chars = sorted({ch for s in sentences for t in s.tokens for ch in t.form})
        pos = sorted({t.pos for s in sentences for t in s.tokens})
        return cls(words, chars, pos, threshold)

    def word_id(self, form: str) -> int:
        """Lookup row for frequent words, 0 for words routed to the char composer."""
        return self._w.get(form.lower(), 0)

    def char_ids(self, form: str) -> list[int]:
        return [self._c.get(ch, 0) for ch in form] or [0]

    def pos_id(self, tag: str) -> int:
        return self._p.get(tag, 0)

    def to_dict(self):
        return {"words": self.words, "chars": self.chars, "pos": self.pos,
                "threshold": self.threshold}

    @classmethod
    def from_dict(cls, d) -> Vocab:
        return cls(d["words"], d["chars"], d["pos"], d["threshold"])


class TokenEmbedder(nn.Module):
    """a_i = w_i ⊕ e_i ⊕ t_i."""

    def __init__(self, vocab: Vocab, word_dim=100, char_dim=32, char_hidden=32,
                 pos_dim=16, ctx_dim=64, ctx_layers=3):
        super().__init__()
        self.vocab = vocab
        self.word_dim, self.pos_dim, self.ctx_dim = word_dim, pos_dim, ctx_dim
        self.words = param(len(vocab.words), word_dim)
        self.char = CharComposer(len(vocab.chars), char_dim, char_hidden, word_dim)
        self.pos = param(len(vocab.pos), pos_dim)
        self.mix = ScalarMix(ctx_layers)

    def init(self, gen, pretrained: dict[str, np.ndarray] | None = None):
        glorot_(self.words, gen)
        self.char.init(gen)
        glorot_(self.pos, gen)
        if pretrained:
            with torch.no_grad():
                for i, w in enumerate(self.vocab.words):
                    vec = pretrained.get(w)
                    if vec is not None and len(vec) == self.word_dim:
                        self.words[i] = torch.as_tensor(vec, dtype=DTYPE)

    @property
    def output_dim(self):
        return self.word_dim + self.ctx_dim + self.pos_dim

    def word_vector(self, form: str) -> torch.Tensor:
        wid = self.vocab.word_id(form)
        if wid:
            return self.words[wid]
        return self.char(self.vocab.char_ids(form))

    def forward(self, sentence: Sentence, ctx: np.ndarray | None = None) -> torch.Tensor:
        m = len(sentence.tokens)
        w = torch.stack([self.word_vector(t.form) for t in sentence.tokens])
        p = self.pos[torch.tensor([self.vocab.pos_id(t.pos) for t in sentence.tokens])]
        if ctx is None:
            e = w.new_zeros(m, self.ctx_dim)
        else:
            ctx_t = torch.as_tensor(np.asarray(ctx), dtype=DTYPE)
            if ctx_t.dim() == 2:
                ctx_t = ctx_t.unsqueeze(0)
            if ctx_t.shape[1] != m:
                raise ValueError(f"sentence {sentence.id!r}: {ctx_t.shape[1]} context rows "
                                 f"for {m} tokens")
            if ctx_t.shape[0] != self.mix.logits.shape[0] or ctx_t.shape[2] != self.ctx_dim:
                raise ValueError(f"sentence {sentence.id!r}: context block shape "
                                 f"{tuple(ctx_t.shape)} does not match the model")
            e = self.mix(ctx_t)
        return torch.cat([w, e, p], dim=1)


def embed_tokens(sentence: Sentence, embedder: TokenEmbedder, ctx=None) -> torch.Tensor:
    return embedder(sentence, ctx)


# -- external vector files ----------------------------------------------------

def read_context_vectors(path) -> dict[str, np.ndarray]:
    """``#id <sid>`` then one line per token: ``layer0 | layer1 | ...``.

    Returns arrays shaped (layers, tokens, dim).
    """
    out: dict[str, np.ndarray] = {}
    sid, rows = None, []

    def flush():
        if sid is None:
            return
        if not rows:
            raise ValueError(f"{path}: no vectors for {sid!r}")
        out[sid] = np.stack(rows, axis=1)

    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#id "):
            flush()
            sid, rows = line[4:].strip(), []
            continue
        if sid is None:
            raise ValueError(f"{path}:{lineno}: vector line before '#id'")
        layers = [np.array(chunk.split(), dtype=np.float64) for chunk in line.split("|")]
        if len({len(v) for v in layers}) != 1:
            raise ValueError(f"{path}:{lineno}: layers differ in width")
        rows.append(np.stack(layers))
    flush()
    return out


def write_context_vectors(vectors: dict[str, np.ndarray]) -> str:
    lines = []
    for sid, arr in vectors.items():
        lines.append(f"#id {sid}")
        for t in range(arr.shape[1]):
            lines.append(" | ".join(" ".join(repr(float(x)) for x in arr[l, t])
                                    for l in range(arr.shape[0])))
    return "\n".join(lines) + "\n"


def read_word_vectors(path) -> dict[str, np.ndarray]:
    vecs = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        cols = line.rstrip().split(" ")
        if len(cols) < 2:
            continue
        if lineno == 0 and len(cols) == 2 and all(c.isdigit() for c in cols):
            continue  # "<count> <dim>" header
        try:
            vecs[cols[0]] = np.array(cols[1:], dtype=np.float64)
        except ValueError:
            continue
    return vecs
