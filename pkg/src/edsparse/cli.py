"""``edsparse`` command line: train, parse, eval, pheno, curve.

Reports go to stdout or ``-o``; human-readable summaries go to stderr.
Exit codes: 0 success, 1 a threshold flag was not met, 2 input error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .align import AlignmentError, align_graph, compose_tags
from .arcs import dep_counts, dep_metrics_from_counts
from .config import TrainConfig, default_seed
from .corpus import CorpusError, Instance, Sentence, load_corpus, read_sentences
from .curve import format_curve, learning_curve
from .encoder import read_context_vectors, read_word_vectors
from .graph import EdsError, EdsGraph, is_connected, read_graphs, write_graphs
from .model_io import ModelFormatError
from .pheno import PhenoError, format_reports, load_pheno_gold, load_role_map, pheno_score
from .pipeline import Parser, train_parser
from .smatch import corpus_smatch, format_report, graph_seed, smatch
from .tagger import tag_metrics

log = logging.getLogger("edsparse")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2

# flags that override TrainConfig fields
_CONFIG_FLAGS = {
    "tagger_epochs": int, "arc_epochs": int, "batch_size": int, "lr": float, "clip": float,
    "word_dim": int, "char_dim": int, "char_hidden": int, "pos_dim": int, "ctx_dim": int,
    "ctx_layers": int, "hidden": int, "layers": int, "concept_dim": int, "mlp_hidden": int,
    "label_hidden": int, "threshold": int, "cost_fp": float, "cost_fn": float, "restarts": int,
}


class InputError(Exception):
    pass


def _say(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> TrainConfig:
    cfg = TrainConfig.from_file(args.config) if args.config else TrainConfig(seed=default_seed())
    overrides = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
    overrides["seed"] = args.seed
    if getattr(args, "connected", None) is not None:
        overrides["connected"] = args.connected
    return cfg.replace(**overrides)


def _seed(args) -> int:
    return default_seed() if args.seed is None else args.seed


def _corpus(sentences, graphs, what="training") -> list[Instance]:
    data = load_corpus(sentences, graphs)
    if not data:
        raise InputError(f"{what} corpus is empty")
    return data


def _ctx(path):
    return read_context_vectors(path) if path else None


# -- train -----------------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = _config(args)
    train = _corpus(args.sentences, args.graphs)
    dev = _corpus(args.dev_sentences, args.dev_graphs, "dev") if args.dev_sentences else []
    ctx = _ctx(args.ctx)
    pretrained = read_word_vectors(args.word_vectors) if args.word_vectors else None
    _say(f"training on {len(train)} sentences, dev {len(dev)}, seed {cfg.seed}")
    parser = train_parser(train, dev, cfg, ctx, pretrained, report=_say)
    parser.save(args.output)
    _say(f"model written to {args.output}")
    return EXIT_OK


# -- parse -----------------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(model_path, connected):
    _WORKER["parser"] = Parser.load(model_path)
    _WORKER["connected"] = connected


def _parse_one(job):
    sentence, ctx = job
    return _WORKER["parser"].parse(sentence, ctx, _WORKER["connected"])


def cmd_parse(args) -> int:
    parser = Parser.load(args.model)
    sentences = read_sentences(args.sentences)
    if not sentences:
        raise InputError("no sentences to parse")
    ctx = _ctx(args.ctx) or {}
    if parser.uses_ctx and not args.ctx:
        log.warning("model was trained with context vectors but none were given; "
                    "using a zero block")
    elif args.ctx:
        missing = [s.id for s in sentences if s.id not in ctx]
        if missing:
            log.warning("no context vectors for %d sentence(s), e.g. %s; using a zero block",
                        len(missing), missing[0])
    jobs = [(s, ctx.get(s.id)) for s in sentences]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_worker,
                                 initargs=(args.model, args.connected)) as ex:
            graphs = list(ex.map(_parse_one, jobs, chunksize=4))
    else:
        graphs = [parser.parse(s, c, args.connected) for s, c in jobs]
    if args.connected:
        bad = [s.id for s, g in zip(sentences, graphs) if len(g) and not is_connected(g)]
        if bad:
            raise RuntimeError(f"disconnected output for {', '.join(bad)}")
    _emit(write_graphs([(s.id, g) for s, g in zip(sentences, graphs)], args.format), args.output)
    _say(f"parsed {len(graphs)} sentences")
    return EXIT_OK


# -- eval ------------------------------------------------------------------------

def _read_graph_file(path):
    return read_graphs(Path(path).read_text(encoding="utf-8"))


def _paired(pred: dict, gold: dict, allow_missing: bool):
    extra = sorted(set(pred) - set(gold))
    if extra:
        raise InputError(f"predicted ids not in gold: {', '.join(extra[:5])}")
    missing = sorted(set(gold) - set(pred))
    if missing and not allow_missing:
        raise InputError(f"gold ids without prediction: {', '.join(missing[:5])}")
    if missing:
        log.warning("%d gold graph(s) without prediction scored as empty", len(missing))
    return [(gid, pred.get(gid), gold[gid]) for gid in gold]


def _eval_smatch(pairs, args):
    res = corpus_smatch(pairs, args.restarts, _seed(args), macro=args.macro, jobs=args.jobs)
    for fl in res.flags:
        log.warning(fl)
    _say(f"smatch P {res.precision:.4f} R {res.recall:.4f} F {res.f:.4f}")
    return format_report(res), res.f


def _eval_dep(pairs, args):
    lines = ["id\tUP\tUR\tUF\tLP\tLR\tLF"]
    total = dep_metrics_from_counts(0, 0, 0, 0, 0, 0)
    for gid, pred, gold in pairs:
        pred = pred if pred is not None else EdsGraph()
        mapping = smatch(pred, gold, args.restarts, graph_seed(_seed(args), gid)).mapping
        m = dep_counts(gold, pred, mapping)
        total = total + m
        lines.append(f"{gid}\t{m.up:.4f}\t{m.ur:.4f}\t{m.uf:.4f}\t{m.lp:.4f}\t{m.lr:.4f}\t{m.lf:.4f}")
    t = total
    lines.append(f"#corpus\t{t.up:.4f}\t{t.ur:.4f}\t{t.uf:.4f}\t{t.lp:.4f}\t{t.lr:.4f}\t{t.lf:.4f}")
    _say(f"dependencies UF {t.uf:.4f} LF {t.lf:.4f}")
    return "\n".join(lines) + "\n", t.lf


def _graph_tags(graph, sentence: Sentence):
    graph = graph if graph is not None else EdsGraph()
    return compose_tags(Instance(sentence, graph), align_graph(graph, sentence))


def _eval_tags(pairs, args):
    if not args.sentences:
        raise InputError("--mode tags needs --sentences")
    sents = {s.id: s for s in read_sentences(args.sentences)}
    lost = [gid for gid, _, _ in pairs if gid not in sents]
    if lost:
        raise InputError(f"no sentence for graph id(s): {', '.join(lost[:5])}")
    gold = [_graph_tags(g, sents[gid]) for gid, _, g in pairs]
    pred = [_graph_tags(p, sents[gid]) for gid, p, _ in pairs]
    m = tag_metrics(gold, pred)
    for fl in m.flags:
        log.warning(fl)
    rows = [("tag_accuracy", m.accuracy), ("concept_P", m.precision), ("concept_R", m.recall),
            ("concept_F", m.f)]
    _say(f"tags acc {m.accuracy:.4f} concept F {m.f:.4f}")
    return "metric\tvalue\n" + "".join(f"{k}\t{v:.4f}\n" for k, v in rows), m.f


def cmd_eval(args) -> int:
    pairs = _paired(_read_graph_file(args.pred), _read_graph_file(args.gold), args.allow_missing)
    if not pairs:
        raise InputError("gold file holds no graphs")
    text, score = {"smatch": _eval_smatch, "dep": _eval_dep, "tags": _eval_tags}[args.mode](pairs, args)
    _emit(text, args.output)
    if args.min_f is not None and score < args.min_f:
        _say(f"score {score:.4f} below threshold {args.min_f}")
        return EXIT_MISMATCH
    return EXIT_OK


# -- pheno -----------------------------------------------------------------------

def _system_spec(spec: str):
    name, sep, path = spec.partition("=")
    if not sep or not name or not path:
        raise InputError(f"system must be NAME=PATH, got {spec!r}")
    return name, path


def cmd_pheno(args) -> int:
    sentences = {s.id: s for s in read_sentences(args.sentences)}
    gold = load_pheno_gold(args.gold, sentences)
    if not gold:
        raise InputError(f"{args.gold}: no gold triples")
    systems = {}
    for spec in args.system:
        name, path = _system_spec(spec)
        if name in systems:
            raise InputError(f"system {name!r} given twice")
        systems[name] = _read_graph_file(path)
    if args.select:
        unknown = [s for s in args.select if s not in systems]
        if unknown:
            raise InputError(f"unknown system name(s): {', '.join(unknown)}")
        systems = {k: systems[k] for k in args.select}
    role_map = load_role_map(args.role_map) if args.role_map else None
    reports = pheno_score(gold, systems, sentences, role_map)
    for group in reports.values():
        for rep in group:
            row = rep.get("overall")
            _say(f"{rep.system}: {row.recovered}/{row.count} gold triples recovered")
    _emit(format_reports(reports), args.output)
    return EXIT_OK


# -- curve -----------------------------------------------------------------------

def cmd_curve(args) -> int:
    cfg = _config(args)
    train = _corpus(args.sentences, args.graphs)
    dev = _corpus(args.dev_sentences, args.dev_graphs, "dev")
    fractions = [float(f) for f in args.fractions.split(",")]
    rows = learning_curve(train, dev, fractions, cfg, cfg.seed, _ctx(args.ctx),
                          trainer=lambda tr, dv, c, x: train_parser(tr, dv, c, x, report=_say))
    _emit(format_curve(rows), args.output)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def _add_config_flags(p):
    p.add_argument("--config", help="JSON file with TrainConfig fields (flags win)")
    for name, typ in _CONFIG_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edsparse", description="Two-stage EDS parser.")
    ap.add_argument("--seed", type=int,
                    help="random seed (default: --config file, then $EDSPARSE_SEED, else 1)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train both stages and write a model file")
    p.add_argument("--sentences", required=True)
    p.add_argument("--graphs", required=True)
    p.add_argument("--dev-sentences")
    p.add_argument("--dev-graphs")
    p.add_argument("--ctx", help="context vectors for training sentences")
    p.add_argument("--word-vectors", help="pretrained word vectors (text format)")
    p.add_argument("--connected", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("-o", "--output", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse sentences with a trained model")
    p.add_argument("model")
    p.add_argument("--sentences", required=True)
    p.add_argument("--ctx")
    p.add_argument("--connected", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--format", choices=("eds", "json"), default="eds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="score predicted graphs against gold graphs")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--mode", choices=("smatch", "dep", "tags"), default="smatch")
    p.add_argument("--sentences", help="needed for --mode tags")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--macro", action="store_true")
    p.add_argument("--allow-missing", action="store_true",
                   help="score gold graphs without prediction as empty")
    p.add_argument("--min-f", type=float, help="exit 1 when the headline score is lower")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pheno", help="phenomenon recall report")
    p.add_argument("--gold", required=True)
    p.add_argument("--sentences", required=True)
    p.add_argument("--system", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--select", action="append", metavar="NAME")
    p.add_argument("--role-map")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pheno)

    p = sub.add_parser("curve", help="learning curve over down-sampled training data")
    p.add_argument("--sentences", required=True)
    p.add_argument("--graphs", required=True)
    p.add_argument("--dev-sentences", required=True)
    p.add_argument("--dev-graphs", required=True)
    p.add_argument("--fractions", default="0.25,0.5,1.0")
    p.add_argument("--ctx")
    p.add_argument("-o", "--output")
    _add_config_flags(p)
    p.set_defaults(func=cmd_curve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, EdsError, CorpusError, PhenoError, ModelFormatError, AlignmentError,
            OSError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
