"""Two-stage parser: tags -> concept nodes -> labeled arcs."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import torch

from .align import TagVocabulary, relexicalize
from .arcs import ArcModel, Index, predict_graph, train_arcs
from .config import TrainConfig
from .corpus import Instance, Sentence
from .encoder import Vocab
from .graph import EdsGraph
from .model_io import append_section, read_container, write_container
from .tagger import Tagger, train_tagger

log = logging.getLogger(__name__)


@dataclass
class Parser:
    tagger: Tagger
    arcs: ArcModel
    config: TrainConfig
    uses_ctx: bool = False

    def parse(self, sentence: Sentence, ctx=None, connected: bool | None = None) -> EdsGraph:
        connected = self.config.connected if connected is None else connected
        tags = self.tagger.predict(sentence, ctx)
        placed = relexicalize(tags, sentence)
        nodes = [n for n, _ in placed]
        tokens = [i for _, i in placed]
        concepts = [tags[i].parts[int(n.id.rsplit("_", 1)[1])] for n, i in placed]
        return predict_graph(self.arcs, sentence, nodes, tokens, concepts, connected, ctx)

    def save(self, path) -> None:
        meta, state = tagger_section(self.tagger)
        meta["uses_ctx"] = self.uses_ctx
        write_container(path, {"tagger": (meta, state)}, self.config.to_dict())
        append_section(path, "arcs", *arc_section(self.arcs))

    @classmethod
    def load(cls, path) -> Parser:
        sections, cfg = read_container(path)
        missing = {"tagger", "arcs"} - set(sections)
        if missing:
            raise ValueError(f"model file lacks section(s): {', '.join(sorted(missing))}")
        config = TrainConfig.from_dict(cfg)
        meta, state = sections["tagger"]
        tagger = Tagger(Vocab.from_dict(meta["vocab"]), TagVocabulary.loads(meta["tags"]), config)
        tagger.load_state_dict(state)
        uses_ctx = bool(meta.get("uses_ctx", False))
        meta, state = sections["arcs"]
        arcs = ArcModel(Vocab.from_dict(meta["vocab"]), Index(meta["concepts"][1:]),
                        Index(meta["roles"], unk=False), config)
        arcs.load_state_dict(state)
        tagger.eval()
        arcs.eval()
        return cls(tagger, arcs, config, uses_ctx)


def tagger_section(tagger: Tagger):
    meta = {"vocab": tagger.embedder.vocab.to_dict(), "tags": tagger.tags.dumps()}
    return meta, tagger.state_dict()


def arc_section(arcs: ArcModel):
    meta = {"vocab": arcs.embedder.vocab.to_dict(), "concepts": arcs.concepts.items,
            "roles": arcs.roles.items}
    return meta, arcs.state_dict()


def train_parser(train: list[Instance], dev: list[Instance], config: TrainConfig,
                 ctx: dict | None = None, pretrained=None, report=None) -> Parser:
    """Stage 1 on gold tags, then stage 2 on gold concepts and alignments."""
    torch.set_num_threads(1)
    vocab = Vocab.build([x.sentence for x in train], config.threshold)

    def tag_epoch(epoch, loss, m):
        if report:
            report(f"tagger epoch {epoch}: loss {loss:.4f} tag-acc {m.accuracy:.4f} "
                   f"concept P/R/F {m.precision:.4f}/{m.recall:.4f}/{m.f:.4f}")

    def arc_epoch(epoch, loss, m):
        if report:
            report(f"arcs epoch {epoch}: loss {loss:.4f} UF {m.uf:.4f} LF {m.lf:.4f}")

    tagger = train_tagger(train, dev, config, ctx, vocab, pretrained, tag_epoch)
    arcs = train_arcs(train, dev, config, ctx, vocab, pretrained, arc_epoch)
    tagger.eval()
    arcs.eval()
    return Parser(tagger, arcs, config, bool(ctx))
