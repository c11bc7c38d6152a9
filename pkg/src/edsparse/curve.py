"""Learning curves over nested down-sampled training sets."""
from __future__ import annotations

from dataclasses import dataclass

from .config import TrainConfig
from .corpus import Instance, downsample
from .pheno import curve_metrics, derive_pheno_triples, pheno_score
from .pipeline import train_parser
from .smatch import corpus_smatch


@dataclass(frozen=True)
class CurveRow:
    fraction: float
    metric: str
    value: float | None

    def to_line(self) -> str:
        v = "NA" if self.value is None else f"{self.value:.4f}"
        return f"{self.fraction:g},{self.metric},{v}"


def check_fractions(fractions) -> list[float]:
    fr = [float(f) for f in fractions]
    if not fr:
        raise ValueError("no fractions given")
    for f in fr:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {f}")
    if any(a >= b for a, b in zip(fr, fr[1:])):
        raise ValueError("fractions must be strictly ascending")
    return fr


def evaluate_parser(parser, dev: list[Instance], ctx=None, seed: int = 0) -> dict[str, float | None]:
    """Smatch plus diagnostic recalls of ``parser`` on ``dev``."""
    ctx = ctx or {}
    preds = {x.id: parser.parse(x.sentence, ctx.get(x.id)) for x in dev}
    sm = corpus_smatch([(x.id, preds[x.id], x.graph) for x in dev],
                       restarts=parser.config.restarts, seed=seed)
    out: dict[str, float | None] = {"smatch": sm.f, "concept_f": sm.concept_f, "arc_f": sm.arc_f}
    gold = derive_pheno_triples(dev)
    if gold:
        report = pheno_score(gold, {"sys": preds}, {x.id: x.sentence for x in dev})["sys"][0]
        out.update(curve_metrics(report))
    return out


def learning_curve(train: list[Instance], dev: list[Instance], fractions, config: TrainConfig,
                   seed: int | None = None, ctx=None, trainer=train_parser) -> list[CurveRow]:
    """Train both stages on each nested subset and evaluate on ``dev``.

    Subsets come from one seeded shuffle, so each is contained in the next.
    Subsets run one after another with the same model seed.
    """
    fractions = check_fractions(fractions)
    seed = config.seed if seed is None else seed
    rows = []
    for f in fractions:
        subset = downsample(train, f, seed)
        parser = trainer(subset, dev, config, ctx)
        rows.append(CurveRow(f, "train_size", float(len(subset))))
        for name, value in evaluate_parser(parser, dev, ctx, config.seed).items():
            rows.append(CurveRow(f, name, value))
    return rows


def format_curve(rows: list[CurveRow]) -> str:
    return "fraction,metric,value\n" + "".join(r.to_line() + "\n" for r in rows)
