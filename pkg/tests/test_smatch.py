import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_smatch, random_graph

from edsparse.graph import EdsEdge, EdsGraph, EdsNode, parse_eds
from edsparse.smatch import corpus_smatch, format_report, graph_seed, smatch, smatch_oracle

GOLD = parse_eds("{e: x:_dog_n_1<0:3>[] e:_bark_v_1<4:9>[ARG1 x]}")
WRONG_LABEL = parse_eds("{e: x:_dog_n_1<0:3>[] e:_bark_v_1<4:9>[ARG2 x]}")


def test_wrong_label_fixture():
    r = smatch(WRONG_LABEL, GOLD)
    assert (r.matched, r.pred_total, r.gold_total) == (3, 4, 4)
    assert r.precision == r.recall == r.f == 0.75
    assert brute_smatch(WRONG_LABEL, GOLD)[3] == 0.75
    assert smatch_oracle(WRONG_LABEL, GOLD).f == 0.75


def test_identity():
    r = smatch(GOLD, GOLD)
    assert r.f == 1.0 and r.mapping == {"x": "x", "e": "e"}


def test_spans_ignored_arcs_disambiguate():
    gold = parse_eds('{e: a:named("Kim")<0:3>[] b:named("Lee")<8:11>[] '
                     'e:_see_v_1<4:7>[ARG1 a, ARG2 b] q:proper_q<0:3>[BV a]}')
    pred = parse_eds('{e: a:named("Kim")<8:11>[] b:named("Lee")<0:3>[] '
                     'e:_see_v_1<4:7>[ARG1 a, ARG2 b] q:proper_q<8:11>[BV a]}')
    assert smatch(pred, gold).f == 1.0


def test_top_switch():
    other_top = parse_eds("{x: x:_dog_n_1<0:3>[] e:_bark_v_1<4:9>[ARG1 x]}")
    assert smatch(other_top, GOLD).f == 0.75
    assert smatch(other_top, GOLD, include_top=False).f == 1.0


def test_empty_cases():
    empty = EdsGraph()
    assert smatch(empty, GOLD).f == 0.0
    assert smatch_oracle(empty, GOLD).f == 0.0
    r = smatch(empty, empty)
    assert r.f == 1.0 and r.flags


def test_restarts_validated():
    with pytest.raises(ValueError):
        smatch(GOLD, GOLD, restarts=0)


def test_oracle_size_limit():
    big = EdsGraph(tuple(EdsNode(f"n{i}", "p", 0, 1) for i in range(9)))
    with pytest.raises(ValueError):
        smatch_oracle(big, big)


def test_concept_and_arc_breakdown():
    r = smatch(WRONG_LABEL, GOLD)
    assert r.concept_f == 1.0 and r.arc_f == 0.0


def _pair(seed, n=4):
    rng = random.Random(seed)
    return (random_graph(rng, n, 6, "p", min_nodes=0 if rng.random() < 0.1 else 1),
            random_graph(rng, n, 6, "g"))


@given(st.integers(0, 10**6))
def test_oracle_matches_exhaustive_search(seed):
    pred, gold = _pair(seed)
    r = smatch_oracle(pred, gold)
    matched, p, rc, f = brute_smatch(pred, gold)
    assert r.matched == matched
    assert (r.precision, r.recall, r.f) == pytest.approx((p, rc, f))


@given(st.integers(0, 10**6))
def test_hill_climbing_never_exceeds_oracle(seed):
    pred, gold = _pair(seed, 6)
    assert smatch(pred, gold, restarts=3, seed=seed).matched <= smatch_oracle(pred, gold).matched


@given(st.integers(0, 10**6))
def test_climb_trace_monotone(seed):
    pred, gold = _pair(seed, 6)
    trace = []
    smatch(pred, gold, restarts=1, trace=trace)
    assert all(a < b for a, b in zip(trace, trace[1:]))


@given(st.integers(0, 10**6))
def test_precision_recall_swap(seed):
    pred, gold = _pair(seed)
    a, b = smatch_oracle(pred, gold), smatch_oracle(gold, pred)
    assert (a.precision, a.recall) == pytest.approx((b.recall, b.precision))
    assert a.f == pytest.approx(b.f)


@given(st.integers(0, 10**6))
def test_self_match_and_renaming(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 6, 8)
    assert smatch(g, g).f == 1.0
    ids = [n.id for n in g.nodes]
    perm = ids[:]
    rng.shuffle(perm)
    ren = dict(zip(ids, ("r" + p for p in perm)))
    h = EdsGraph(tuple(EdsNode(ren[n.id], n.predicate, n.start, n.end, n.carg) for n in g.nodes),
                 tuple(EdsEdge(ren[e.source], ren[e.target], e.role) for e in g.edges),
                 ren.get(g.top) if g.top else None)
    assert smatch(h, g).f == 1.0
    other = random_graph(rng, 4, 6, "o")
    assert smatch_oracle(other, g).f == pytest.approx(smatch_oracle(other, h).f)


def test_deterministic_given_seed():
    pred, gold = _pair(11, 6)
    a = smatch(pred, gold, restarts=5, seed=3)
    b = smatch(pred, gold, restarts=5, seed=3)
    assert a.mapping == b.mapping and a.matched == b.matched


def test_corpus_micro_average():
    rows = [("a", WRONG_LABEL, GOLD), ("b", GOLD, GOLD)]
    res = corpus_smatch(rows)
    assert res.f == pytest.approx(7 / 8)
    assert res.concept_f == 1.0 and res.arc_f == pytest.approx(0.5)
    macro = corpus_smatch(rows, macro=True)
    assert macro.f == pytest.approx((0.75 + 1.0) / 2)


def test_corpus_missing_prediction_counts_gold():
    res = corpus_smatch([("a", None, GOLD), ("b", GOLD, GOLD)])
    assert res.recall == pytest.approx(4 / 8) and res.precision == 1.0


def test_corpus_parallel_agrees():
    rows = [(f"g{i}", *_pair(i, 5)) for i in range(12)]
    one = corpus_smatch(rows, restarts=3, seed=2)
    many = corpus_smatch(rows, restarts=3, seed=2, jobs=2)
    assert format_report(one) == format_report(many)


def test_graph_seed_stable():
    assert graph_seed(0, "s1") == graph_seed(0, "s1") != graph_seed(1, "s1")
    assert format_report(corpus_smatch([("a", GOLD, GOLD)])).endswith("#corpus\t1.0000\t1.0000\t1.0000\t1.0000\t1.0000\n")
