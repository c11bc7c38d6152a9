from pathlib import Path

from edsparse.config import TrainConfig
from edsparse.corpus import load_corpus

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# recall on the corrupted copy, counted by hand from the fixture
CORRUPTED = {
    ("comp", "all"): 0.5, ("comp", "A"): 0.0,
    ("as", "all"): 2 / 3, ("ditr", "all"): 2 / 3, ("causemo", "all"): 2 / 3, ("way", "all"): 2 / 3,
    ("passive", "all"): 0.5, ("vpart", "all"): 0.0, ("vpart", "B"): 0.0, ("itexpl", "all"): 0.0,
    ("ned", "all"): 0.5, ("ned", "A"): 0.0, ("ned", "B"): 1.0,
    ("argadj", "all"): 0.5, ("argadj", "A"): 0.0, ("argadj", "B"): 1.0,
    ("barerel", "all"): 0.0, ("barerel", "B"): 0.0,
    ("tough", "all"): 0.5, ("tough", "A"): 1.0, ("tough", "B"): 0.0,
    ("rnr", "all"): 0.5, ("rnr", "A"): 0.0, ("rnr", "B"): 1.0,
    ("absol", "all"): 0.5, ("absol", "A"): 0.0, ("absol", "B"): 1.0,
    ("vger", "all"): 0.5, ("vger", "A"): 0.0, ("vger", "B"): 1.0,
    ("control", "all"): 2 / 3, ("control", "A"): 1.0, ("control", "B"): 0.0,
    ("overall", "all"): 18 / 34,
}


def corpus(name: str, stem: str = ""):
    d = DATA / name
    return load_corpus(d / f"{stem}sentences.conll", d / f"{stem}graphs.eds")


def tiny_config(**kw) -> TrainConfig:
    """Small dimensions so that training runs take seconds."""
    base = dict(seed=5, tagger_epochs=2, arc_epochs=2, word_dim=8, char_dim=4, char_hidden=4,
                pos_dim=4, ctx_dim=6, ctx_layers=2, hidden=6, layers=1, concept_dim=4,
                mlp_hidden=8, label_hidden=8)
    base.update(kw)
    return TrainConfig(**base)
