import random

import pytest
from helpers import CORRUPTED, DATA
from hypothesis import given
from hypothesis import strategies as st

from edsparse.corpus import parse_sentences
from edsparse.graph import EdsEdge, EdsGraph, EdsNode, parse_eds, read_graphs
from edsparse.pheno import (PHENOMENA, PhenoError, PhenoTriple, curve_metrics,
                            derive_pheno_triples, extract_bilexical, format_reports,
                            load_pheno_gold, load_role_map, parse_pheno_gold, pheno_score,
                            write_pheno_gold)


@pytest.fixture(scope="module")
def suite(pheno_corpus):
    data = pheno_corpus
    sents = {x.id: x.sentence for x in data}
    gold = load_pheno_gold(DATA / "pheno" / "gold.tsv", sents)
    graphs = {x.id: x.graph for x in data}
    corrupted = read_graphs((DATA / "pheno" / "corrupted.eds").read_text())
    roles = load_role_map(DATA / "pheno" / "roles.tsv")
    return gold, sents, graphs, corrupted, roles


def test_parse_table_lines():
    [t] = parse_pheno_gold("s12 tough B find_7 ARG2 copies_2")
    assert t == PhenoTriple("s12", "tough", "B", "find", 7, "ARG2", "copies", 2)
    [p] = parse_pheno_gold("s3\tpassive\t-\taccepted_4\tARG2\tpaper_2")
    assert p.phenomenon == "passive" and p.subtype is None and p.key() == (4, "ARG2", 2)
    assert parse_pheno_gold(write_pheno_gold([t, p])) == [t, p]


@pytest.mark.parametrize("line, fragment", [
    ("s1 tough B find7 ARG2 copies_2", "malformed"),
    ("s1 tough B find_0 ARG2 copies_2", "malformed"),
    ("s1 tough B find_x ARG2 copies_2", "malformed"),
    ("s1 idioms - a_1 ARG1 b_2", "unknown phenomenon"),
    ("s1 tough C a_1 ARG1 b_2", "subtype"),
    ("s1 tough a_1 ARG1 b_2", "6 fields"),
])
def test_malformed_lines(line, fragment):
    with pytest.raises(PhenoError, match=fragment) as info:
        parse_pheno_gold("# header\n" + line)
    assert ":2:" in str(info.value)


def test_positions_checked_against_sentences(fig1):
    sents = {"fig1": fig1.sentence}
    with pytest.raises(PhenoError, match="out of range"):
        parse_pheno_gold("fig1 passive - introduced_4 ARG2 drug_12", sents)
    with pytest.raises(PhenoError, match="unknown sentence"):
        parse_pheno_gold("zz passive - introduced_4 ARG2 drug_2", sents)


def test_fig1_projection(fig1):
    arcs = extract_bilexical(fig1.graph, fig1.sentence)
    assert (4, "ARG2", 2) in arcs
    assert (7, "compound", 6) in arcs
    assert (1, "BV", 2) in arcs
    assert not any(r == "ARG1" and h == 8 for h, r, _ in arcs)  # compound node itself vanishes
    single = EdsGraph((EdsNode("x", "_drug_n_1", 4, 8),))
    assert extract_bilexical(single, fig1.sentence) == set()


def test_self_consistency(suite):
    gold, sents, graphs, _, roles = suite
    [report] = pheno_score(gold, {"gold": graphs}, sents, roles)["gold"]
    assert {t.phenomenon for t in gold} == set(PHENOMENA)
    for phen in PHENOMENA:
        assert report.recall(phen) == 1.0, phen
    for phen in ("as", "ditr", "causemo", "way"):
        assert report.get(phen).complete_match == 1.0


def test_corrupted_recalls(suite):
    gold, sents, _, corrupted, roles = suite
    [report] = pheno_score(gold, {"bad": corrupted}, sents, roles)["bad"]
    for (phen, sub), want in CORRUPTED.items():
        assert report.recall(phen, sub) == pytest.approx(want), (phen, sub)
    for phen in ("as", "ditr", "causemo", "way"):
        assert report.recall(phen, "ARG1") == 0.0
        assert report.recall(phen, "ARG2") == report.recall(phen, "ARG3") == 1.0
        assert report.get(phen).complete_match == 0.0


def test_role_map_needed_for_modifiers(suite):
    gold, sents, graphs, _, _ = suite
    [report] = pheno_score(gold, {"gold": graphs}, sents)["gold"]
    assert report.recall("ned", "A") == 0.0


def test_empty_and_missing_systems(suite):
    gold, sents, graphs, _, roles = suite
    empty = {sid: EdsGraph((EdsNode("x", "pron", 0, 1),)) for sid in sents}
    [report] = pheno_score(gold, {"e": empty}, sents, roles)["e"]
    assert all(r.recall == 0.0 for r in report.rows)
    partial = dict(graphs)
    del partial["p01"]
    full, covered = pheno_score(gold, {"s": partial}, sents, roles)["s"]
    assert full.missing == ["p01"] and covered.system == "s@covered"
    assert full.recall("comp") == 0.0 and covered.recall("overall") == 1.0
    assert full.get("overall").count == 34 and covered.get("overall").count == 32


def _ditr_fixture():
    text, sents, gold, graphs, system = "Kim gave Lee books", [], [], {}, {}
    for i in range(4):
        sid = f"d{i}"
        sents.append(f"#id {sid}\n#text {text}\n1\tKim\tKim\tNNP\t0\t3\n2\tgave\tgive\tVBD\t4\t8\n"
                     f"3\tLee\tLee\tNNP\t9\t12\n4\tbooks\tbook\tNNS\t13\t18\n")
        g = parse_eds("{e: a:named(\"Kim\")<0:3>[] e:_give_v_1<4:8>[ARG1 a, ARG2 b, ARG3 c] "
                      "c:named(\"Lee\")<9:12>[] b:_book_n_of<13:18>[]}")
        graphs[sid] = g
        edges = g.edges if i else tuple(e for e in g.edges if e.role != "ARG3")
        system[sid] = EdsGraph(g.nodes, edges, g.top)
        for role, dep, p in (("ARG1", "Kim", 1), ("ARG2", "books", 4), ("ARG3", "Lee", 3)):
            gold.append(PhenoTriple(sid, "ditr", None, "gave", 2, role, dep, p))
    sentences = {s.id: s for s in parse_sentences("\n".join(sents))}
    return gold, sentences, graphs, system


def test_three_of_four_ditransitives():
    gold, sents, _, system = _ditr_fixture()
    [r] = pheno_score(gold, {"s": system}, sents)["s"]
    assert r.recall("ditr", "ARG3") == 0.75
    assert r.recall("ditr", "ARG1") == r.recall("ditr", "ARG2") == 1.0
    assert r.get("ditr").complete_match == 0.75
    assert r.recall("ditr") == pytest.approx(11 / 12)


@given(st.integers(0, 10**6))
def test_recall_monotone_under_added_arcs(seed):
    gold, sents, graphs, _ = _ditr_fixture()
    rng = random.Random(seed)
    system = {}
    bigger = {}
    for sid, g in graphs.items():
        keep = tuple(e for e in g.edges if rng.random() < 0.5)
        extra = tuple(e for e in g.edges if e not in keep and rng.random() < 0.5)
        system[sid] = EdsGraph(g.nodes, keep, g.top)
        bigger[sid] = EdsGraph(g.nodes, keep + extra, g.top)
    [a] = pheno_score(gold, {"s": system}, sents)["s"]
    [b] = pheno_score(gold, {"s": bigger}, sents)["s"]
    for row in a.rows:
        assert b.get(row.phenomenon, row.subtype).recall >= row.recall
    cm = a.get("ditr").complete_match
    assert all(cm <= a.recall("ditr", r) for r in ("ARG1", "ARG2", "ARG3"))


def test_inverted_role_map(tmp_path, fig1):
    path = tmp_path / "roles.tsv"
    path.write_text("# comment\nMOD\tARG1^,ARG2\n")
    roles = load_role_map(path)
    assert roles == {"MOD": {"MOD", "ARG1^", "ARG2"}}
    # loc_nonsp on "year" takes ARG1 "introduced": a MOD from introduced to year
    t = PhenoTriple("fig1", "argadj", None, "introduced", 4, "MOD", "year", 9)
    [r] = pheno_score([t], {"s": {"fig1": fig1.graph}}, {"fig1": fig1.sentence}, roles)["s"]
    assert r.recall("argadj") == 1.0
    [r] = pheno_score([t], {"s": {"fig1": fig1.graph}}, {"fig1": fig1.sentence})["s"]
    assert r.recall("argadj") == 0.0


def test_passive_needs_parg(fig1):
    t = PhenoTriple("fig1", "passive", None, "introduced", 4, "ARG2", "drug", 2)
    sents = {"fig1": fig1.sentence}
    [r] = pheno_score([t], {"s": {"fig1": fig1.graph}}, sents)["s"]
    assert r.recall("passive") == 1.0
    g = fig1.graph
    nodes = tuple(n for n in g.nodes if n.predicate != "parg_d")
    edges = tuple(e for e in g.edges if e.source != "n3")
    [r] = pheno_score([t], {"s": {"fig1": EdsGraph(nodes, edges, g.top)}}, sents)["s"]
    assert r.recall("passive") == 0.0


def test_named_entity_needs_carg(fig1):
    t = PhenoTriple("fig1", "comp", "A", "Germany", 7, "compound", "West", 6)
    sents = {"fig1": fig1.sentence}
    [r] = pheno_score([t], {"s": {"fig1": fig1.graph}}, sents)["s"]
    assert r.recall("comp") == 1.0
    g = fig1.graph
    nodes = tuple(EdsNode(n.id, n.predicate, n.start, n.end, "Wast") if n.carg == "West" else n
                  for n in g.nodes)
    [r] = pheno_score([t], {"s": {"fig1": EdsGraph(nodes, g.edges, g.top)}}, sents)["s"]
    assert r.recall("comp") == 0.0


def test_report_csv(suite):
    gold, sents, graphs, _, roles = suite
    text = format_reports(pheno_score(gold, {"gold": graphs}, sents, roles))
    lines = text.splitlines()
    assert lines[0] == "system,phenomenon,subtype,count,recall,complete_match"
    assert "gold,ditr,all,3,1.0000,1.0000" in lines
    assert lines[-1] == "gold,overall,all,34,1.0000,"


def test_derived_triples_fig1(fig1):
    triples = derive_pheno_triples([fig1])
    kinds = {(t.phenomenon, t.subtype, t.head_pos, t.role, t.dep_pos) for t in triples}
    assert ("comp", "A", 7, "compound", 6) in kinds
    assert ("as", None, 4, "ARG2", 2) in kinds
    assert ("passive", None, 4, "ARG2", 2) in kinds
    [r] = pheno_score(triples, {"s": {"fig1": fig1.graph}}, {"fig1": fig1.sentence})["s"]
    m = curve_metrics(r)
    assert m["ner"] == 1.0 and m["passive"] == 1.0
    assert m["compound"] is None and m["valency"] is None
    assert set(m) == {"compound", "ner", "arg", "valency", "passive"}


def test_edge_case_edges_ignored(fig1):
    # an arc between two nodes on the same token does not project
    g = EdsGraph((EdsNode("a", "named", 27, 31, "West"), EdsNode("b", "proper_q", 27, 31)),
                 (EdsEdge("b", "a", "BV"),), "b")
    assert extract_bilexical(g, fig1.sentence) == set()
