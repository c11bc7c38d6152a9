import json
import subprocess
import sys

import numpy as np
import pytest
from helpers import DATA, ROOT

from edsparse.cli import main
from edsparse.corpus import write_sentences
from edsparse.encoder import write_context_vectors
from edsparse.graph import read_graphs, write_graphs

TINY = ["--tagger-epochs", "2", "--arc-epochs", "2", "--word-dim", "8", "--char-dim", "4",
        "--char-hidden", "4", "--pos-dim", "4", "--ctx-dim", "6", "--ctx-layers", "2",
        "--hidden", "6", "--layers", "1", "--concept-dim", "4", "--mlp-hidden", "8",
        "--label-hidden", "8"]

GOLD = "{e:\n x:_dog_n_1<0:4>[]\n e:_bark_v_1<5:9>[ARG1 x]\n}"
WRONG = GOLD.replace("ARG1", "ARG2")
SENT = "#id a\n#text Dogs bark\n1\tDogs\tdog\tNNS\t0\t4\n2\tbark\tbark\tVBP\t5\t9\n"


@pytest.fixture(scope="module")
def work(tmp_path_factory, synthetic):
    d = tmp_path_factory.mktemp("cli")
    small = synthetic[:16]
    (d / "s.conll").write_text(write_sentences([x.sentence for x in small]))
    (d / "g.eds").write_text(write_graphs([(x.id, x.graph) for x in small]))
    rng = np.random.default_rng(0)
    ctx = {x.id: rng.normal(size=(2, len(x.sentence), 6)) for x in small}
    (d / "ctx.txt").write_text(write_context_vectors(ctx))
    (d / "gold.eds").write_text("#id a\n" + GOLD + "\n")
    (d / "wrong.eds").write_text("#id a\n" + WRONG + "\n")
    (d / "dogs.conll").write_text(SENT)
    assert main(["--seed", "3", "train", "--sentences", str(d / "s.conll"), "--graphs",
                 str(d / "g.eds"), "-o", str(d / "model.edsf"), *TINY]) == 0
    return d


def run(*argv):
    return main([str(a) for a in argv])


def test_parse_and_eval(work, capsys):
    out = work / "pred.eds"
    assert run("parse", work / "model.edsf", "--sentences", work / "s.conll", "-o", out) == 0
    pred = read_graphs(out.read_text())
    assert list(pred) == list(read_graphs((work / "g.eds").read_text()))
    capsys.readouterr()
    assert run("eval", out, work / "g.eds") == 0
    report = capsys.readouterr().out.splitlines()
    assert report[0] == "id\tP\tR\tF\tconcept_F\tarc_F" and report[-1].startswith("#corpus")
    assert len(report) == 18


def test_parse_json_and_jobs(work):
    a, b, c = work / "a.eds", work / "b.eds", work / "c.jsonl"
    assert run("parse", work / "model.edsf", "--sentences", work / "s.conll", "-o", a) == 0
    assert run("parse", work / "model.edsf", "--sentences", work / "s.conll", "-o", b,
               "--jobs", "2") == 0
    assert a.read_bytes() == b.read_bytes()
    assert run("parse", work / "model.edsf", "--sentences", work / "s.conll", "-o", c,
               "--format", "json") == 0
    first = json.loads(c.read_text().splitlines()[0])
    assert set(first) == {"id", "top", "nodes", "edges"}
    assert read_graphs(c.read_text()).keys() == read_graphs(a.read_text()).keys()


def test_eval_modes_on_fixture(work, capsys):
    assert run("eval", work / "wrong.eds", work / "gold.eds") == 0
    assert capsys.readouterr().out.splitlines()[-1].startswith("#corpus\t0.7500\t0.7500\t0.7500")
    assert run("eval", work / "wrong.eds", work / "gold.eds", "--mode", "dep") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id\tUP\tUR\tUF\tLP\tLR\tLF"
    assert lines[-1] == "#corpus\t1.0000\t1.0000\t1.0000\t0.0000\t0.0000\t0.0000"
    assert run("eval", work / "gold.eds", work / "gold.eds", "--mode", "tags",
               "--sentences", work / "dogs.conll") == 0
    assert capsys.readouterr().out == ("metric\tvalue\ntag_accuracy\t1.0000\nconcept_P\t1.0000\n"
                                       "concept_R\t1.0000\nconcept_F\t1.0000\n")


def test_eval_exit_codes(work, tmp_path, capsys):
    assert run("eval", work / "wrong.eds", work / "gold.eds", "--min-f", "0.9") == 1
    assert run("eval", work / "wrong.eds", work / "gold.eds", "--min-f", "0.7") == 0
    extra = tmp_path / "extra.eds"
    extra.write_text("#id a\n" + GOLD + "\n#id zz\n" + GOLD + "\n")
    assert run("eval", extra, work / "gold.eds") == 2
    assert run("eval", work / "gold.eds", extra) == 2
    assert run("eval", work / "gold.eds", extra, "--allow-missing") == 0
    assert run("eval", work / "gold.eds", work / "gold.eds", "--mode", "tags") == 2
    empty = tmp_path / "empty.eds"
    empty.write_text("")
    assert run("eval", empty, empty) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_inputs_exit_2(work, tmp_path):
    junk = tmp_path / "junk.edsf"
    junk.write_bytes(b"hello")
    assert run("parse", junk, "--sentences", work / "s.conll") == 2
    assert run("parse", work / "model.edsf", "--sentences", tmp_path / "nope.conll") == 2
    bad = tmp_path / "bad.eds"
    bad.write_text("#id a\n{e: e:_x<0:1>[ARG1 e]}\n")
    assert run("eval", bad, bad) == 2
    assert run("train", "--sentences", work / "s.conll", "--graphs", work / "g.eds",
               "-o", tmp_path / "m", "--lr", "-1") == 2


def test_context_vectors(work, tmp_path, caplog):
    model = tmp_path / "ctx.edsf"
    assert run("train", "--sentences", work / "s.conll", "--graphs", work / "g.eds",
               "--ctx", work / "ctx.txt", "-o", model, *TINY, "--tagger-epochs", "1",
               "--arc-epochs", "1") == 0
    caplog.clear()
    assert run("parse", model, "--sentences", work / "s.conll", "--ctx", work / "ctx.txt",
               "-o", tmp_path / "p1.eds") == 0
    assert not [r for r in caplog.records if r.levelname == "WARNING"]
    assert run("parse", model, "--sentences", work / "s.conll", "-o", tmp_path / "p2.eds") == 0
    assert "zero block" in caplog.text


def test_pheno_command(tmp_path, capsys):
    p = DATA / "pheno"
    out = tmp_path / "pheno.csv"
    assert run("pheno", "--gold", p / "gold.tsv", "--sentences", p / "sentences.conll",
               "--system", f"gold={p / 'graphs.eds'}", "--system", f"bad={p / 'corrupted.eds'}",
               "--role-map", p / "roles.tsv", "-o", out) == 0
    lines = out.read_text().splitlines()
    assert "gold,overall,all,34,1.0000," in lines
    assert "bad,overall,all,34,0.5294," in lines
    assert "bad: 18/34" in capsys.readouterr().err
    assert run("pheno", "--gold", p / "gold.tsv", "--sentences", p / "sentences.conll",
               "--system", f"gold={p / 'graphs.eds'}", "--select", "other") == 2
    assert run("pheno", "--gold", p / "gold.tsv", "--sentences", p / "sentences.conll",
               "--system", "broken") == 2
    empty = tmp_path / "g.tsv"
    empty.write_text("# nothing\n")
    assert run("pheno", "--gold", empty, "--sentences", p / "sentences.conll",
               "--system", f"gold={p / 'graphs.eds'}") == 2


def test_curve_command(tmp_path):
    c = DATA / "curve"
    out = tmp_path / "curve.csv"
    assert run("--seed", "7", "curve", "--sentences", c / "train_sentences.conll",
               "--graphs", c / "train_graphs.eds", "--dev-sentences", c / "dev_sentences.conll",
               "--dev-graphs", c / "dev_graphs.eds", "--fractions", "0.25", "-o", out,
               *TINY, "--tagger-epochs", "1", "--arc-epochs", "1") == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "fraction,metric,value"
    assert "0.25,train_size,12.0000" in lines and "0.25,valency,0.0000" in lines
    assert run("curve", "--sentences", c / "train_sentences.conll", "--graphs",
               c / "train_graphs.eds", "--dev-sentences", c / "dev_sentences.conll",
               "--dev-graphs", c / "dev_graphs.eds", "--fractions", "0.5,0.25") == 2


def test_seed_from_config_file(work, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "tagger_epochs": 2, "arc_epochs": 2}))
    a, b = tmp_path / "a.edsf", tmp_path / "b.edsf"
    assert run("train", "--sentences", work / "s.conll", "--graphs", work / "g.eds",
               "--config", cfg, "-o", a, *TINY) == 0
    assert a.read_bytes() == (work / "model.edsf").read_bytes()
    assert run("--seed", "4", "train", "--sentences", work / "s.conll", "--graphs",
               work / "g.eds", "--config", cfg, "-o", b, *TINY) == 0
    assert a.read_bytes() != b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "edsparse", "--help"], capture_output=True,
                         text=True, cwd=ROOT)
    assert res.returncode == 0
    for cmd in ("train", "parse", "eval", "pheno", "curve"):
        assert cmd in res.stdout
