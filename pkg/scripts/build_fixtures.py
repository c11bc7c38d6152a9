"""Regenerate the shipped fixtures under data/.

    python scripts/build_fixtures.py [--out data]

Writes
  synthetic/   64-sentence generated corpus (sentences.conll, graphs.eds)
  fig1/        the running example sentence and its 13-node graph
  pheno/       one sentence per phenomenon family, gold graphs, gold triples,
               role map, and a corrupted copy (one arc removed per sentence)
  curve/       train/dev corpora where ditransitives never enter the 25% subset
"""
from __future__ import annotations

import argparse
from pathlib import Path

from edsparse.corpus import write_sentences
from edsparse.graph import EdsGraph, write_graphs
from edsparse.pheno import PhenoTriple, write_pheno_gold
from edsparse.synthetic import generate_corpus, held_out_corpus, make_instance

CURVE_SEED = 7
CURVE_FRACTION = 0.25


def fig1():
    toks = [("The", "the", "DT"), ("drug", "drug", "NN"), ("was", "be", "VBD"),
            ("introduced", "introduce", "VBN"), ("in", "in", "IN"), ("West", "West", "NNP"),
            ("Germany", "Germany", "NNP"), ("this", "this", "DT"), ("year", "year", "NN"),
            (".", ".", ".")]
    nodes = [("n1", "_the_q", 0, 1), ("n2", "_drug_n_1", 1, 2), ("n3", "parg_d", 3, 4),
             ("n4", "_introduce_v_to", 3, 4), ("n5", "_in_p", 4, 5),
             ("n6", "named", 6, 7, "Germany"), ("n7", "proper_q", 6, 7),
             ("n8", "compound", 5, 7), ("n9", "named", 5, 6, "West"), ("n10", "proper_q", 5, 6),
             ("n11", "loc_nonsp", 7, 9), ("n12", "_year_n_1", 8, 9), ("n13", "_this_q_dem", 7, 8)]
    edges = [("n1", "BV", "n2"), ("n3", "ARG2", "n2"), ("n3", "ARG1", "n4"), ("n4", "ARG2", "n2"),
             ("n5", "ARG1", "n4"), ("n11", "ARG1", "n4"), ("n5", "ARG2", "n6"),
             ("n7", "BV", "n6"), ("n8", "ARG1", "n6"), ("n8", "ARG2", "n9"), ("n10", "BV", "n9"),
             ("n11", "ARG2", "n12"), ("n13", "BV", "n12")]
    return make_instance("fig1", toks, nodes, edges, "n4")


def _t(words: str):
    """'form/lemma/POS ...' -> token triples."""
    return [tuple(w.split("/")) for w in words.split()]


# sid, tokens, nodes (id, pred, first, last_excl[, carg]), edges, top,
# gold triples (phenomenon, subtype, head_pos, role, dep_pos), corrupted edge
PHENO = [
    ("p01", _t("Donald/Donald/NNP Trump/Trump/NNP withdrew/withdraw/VBD his/his/PRP$ "
               "price/price/NN offer/offer/NN ././."),
     [("x1", "proper_q", 0, 1), ("x2", "named", 0, 1, "Donald"), ("x3", "compound", 0, 2),
      ("x4", "proper_q", 1, 2), ("x5", "named", 1, 2, "Trump"), ("e6", "_withdraw_v_1", 2, 3),
      ("x7", "def_explicit_q", 3, 4), ("x8", "poss", 3, 4), ("x9", "pronoun_q", 3, 4),
      ("x10", "pron", 3, 4), ("x11", "udef_q", 4, 5), ("x12", "_price_n_1", 4, 5),
      ("x13", "compound", 4, 6), ("x14", "_offer_n_1", 5, 6)],
     [("x1", "BV", "x2"), ("x4", "BV", "x5"), ("x3", "ARG1", "x5"), ("x3", "ARG2", "x2"),
      ("e6", "ARG1", "x5"), ("e6", "ARG2", "x14"), ("x7", "BV", "x14"), ("x8", "ARG1", "x14"),
      ("x8", "ARG2", "x10"), ("x9", "BV", "x10"), ("x11", "BV", "x12"), ("x13", "ARG1", "x14"),
      ("x13", "ARG2", "x12")],
     "e6",
     [("comp", "A", 2, "compound", 1), ("comp", None, 6, "compound", 5)],
     ("x3", "ARG2", "x2")),
    ("p02", _t("Mike/Mike/NNP gave/give/VBD them/them/PRP to/to/TO a/a/DT new/new/JJ "
               "bureaucracy/bureaucracy/NN ././."),
     [("x1", "proper_q", 0, 1), ("x2", "named", 0, 1, "Mike"), ("e3", "_give_v_1", 1, 2),
      ("x4", "pronoun_q", 2, 3), ("x5", "pron", 2, 3), ("x6", "_a_q", 4, 5),
      ("e7", "_new_a_1", 5, 6), ("x8", "_bureaucracy_n_1", 6, 7)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x5"), ("e3", "ARG3", "x8"),
      ("x4", "BV", "x5"), ("x6", "BV", "x8"), ("e7", "ARG1", "x8")],
     "e3",
     [("as", None, 2, "ARG1", 1), ("as", None, 2, "ARG2", 3), ("as", None, 2, "ARG3", 7)],
     ("e3", "ARG1", "x2")),
    ("p03", _t("Sally/Sally/NNP baked/bake/VBD her/her/PRP$ sister/sister/NN a/a/DT cake/cake/NN "
               "././."),
     [("x1", "proper_q", 0, 1), ("x2", "named", 0, 1, "Sally"), ("e3", "_bake_v_1", 1, 2),
      ("x4", "def_explicit_q", 2, 3), ("x5", "poss", 2, 3), ("x6", "pronoun_q", 2, 3),
      ("x7", "pron", 2, 3), ("x8", "_sister_n_of", 3, 4), ("x9", "_a_q", 4, 5),
      ("x10", "_cake_n_1", 5, 6)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x10"), ("e3", "ARG3", "x8"),
      ("x4", "BV", "x8"), ("x5", "ARG1", "x8"), ("x5", "ARG2", "x7"), ("x6", "BV", "x7"),
      ("x9", "BV", "x10")],
     "e3",
     [("ditr", None, 2, "ARG1", 1), ("ditr", None, 2, "ARG2", 6), ("ditr", None, 2, "ARG3", 4)],
     ("e3", "ARG1", "x2")),
    ("p04", _t("The/the/DT audience/audience/NN laughed/laugh/VBD Bob/Bob/NNP off/off/RP "
               "the/the/DT stage/stage/NN ././."),
     [("x1", "_the_q", 0, 1), ("x2", "_audience_n_1", 1, 2), ("e3", "_laugh_v_1", 2, 3),
      ("x4", "proper_q", 3, 4), ("x5", "named", 3, 4, "Bob"), ("e6", "_off_p", 4, 5),
      ("x7", "_the_q", 5, 6), ("x8", "_stage_n_1", 6, 7)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x5"), ("e3", "ARG3", "e6"),
      ("x4", "BV", "x5"), ("e6", "ARG1", "x5"), ("e6", "ARG2", "x8"), ("x7", "BV", "x8")],
     "e3",
     [("causemo", None, 3, "ARG1", 2), ("causemo", None, 3, "ARG2", 4),
      ("causemo", None, 3, "ARG3", 5)],
     ("e3", "ARG1", "x2")),
    ("p05", _t("Frank/Frank/NNP dug/dig/VBD his/his/PRP$ way/way/NN out/out/IN of/of/IN "
               "prison/prison/NN ././."),
     [("x1", "proper_q", 0, 1), ("x2", "named", 0, 1, "Frank"), ("e3", "_dig_v_1", 1, 2),
      ("x4", "def_explicit_q", 2, 3), ("x5", "poss", 2, 3), ("x6", "pronoun_q", 2, 3),
      ("x7", "pron", 2, 3), ("x8", "_way_n_1", 3, 4), ("e9", "_out+of_p", 4, 6),
      ("x10", "udef_q", 6, 7), ("x11", "_prison_n_1", 6, 7)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x8"), ("e3", "ARG3", "e9"),
      ("x4", "BV", "x8"), ("x5", "ARG1", "x8"), ("x5", "ARG2", "x7"), ("x6", "BV", "x7"),
      ("e9", "ARG1", "x8"), ("e9", "ARG2", "x11"), ("x10", "BV", "x11")],
     "e3",
     [("way", None, 2, "ARG1", 1), ("way", None, 2, "ARG2", 4), ("way", None, 2, "ARG3", 5)],
     ("e3", "ARG1", "x2")),
    ("p06", _t("The/the/DT paper/paper/NN was/be/VBD accepted/accept/VBN by/by/IN the/the/DT "
               "reviewer/reviewer/NN ././."),
     [("x1", "_the_q", 0, 1), ("x2", "_paper_n_1", 1, 2), ("e3", "_accept_v_1", 3, 4),
      ("e4", "parg_d", 3, 4), ("x5", "_the_q", 5, 6), ("x6", "_reviewer_n_1", 6, 7)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x6"), ("e3", "ARG2", "x2"), ("e4", "ARG1", "e3"),
      ("e4", "ARG2", "x2"), ("x5", "BV", "x6")],
     "e3",
     [("passive", None, 4, "ARG2", 2), ("passive", None, 4, "ARG1", 7)],
     ("e4", "ARG2", "x2")),
    ("p07", _t("The/the/DT pass/pass/NN helped/help/VBD set/set/VB up/up/RP Donny/Donny/NNP "
               "'s/'s/POS two/two/CD companies/company/NNS ././."),
     [("x1", "_the_q", 0, 1), ("x2", "_pass_n_1", 1, 2), ("e3", "_help_v_1", 2, 3),
      ("e4", "_set_v_up", 3, 5), ("x5", "proper_q", 5, 6), ("x6", "named", 5, 6, "Donny"),
      ("x7", "def_explicit_q", 6, 7), ("x8", "poss", 6, 7), ("e9", "card", 7, 8, "2"),
      ("x10", "_company_n_of", 8, 9)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "e4"), ("e4", "ARG2", "x10"),
      ("x5", "BV", "x6"), ("x7", "BV", "x10"), ("x8", "ARG1", "x10"), ("x8", "ARG2", "x6"),
      ("e9", "ARG1", "x10")],
     "e3",
     [("vpart", "B", 4, "ARG2", 9)],
     ("e4", "ARG2", "x10")),
    ("p08", _t("It/it/PRP is/be/VBZ suggested/suggest/VBN that/that/IN the/the/DT "
               "flight/flight/NN was/be/VBD canceled/cancel/VBN ././."),
     [("x1", "pronoun_q", 0, 1), ("x2", "pron", 0, 1), ("e3", "_suggest_v_to", 2, 3),
      ("e4", "parg_d", 2, 3), ("x5", "_the_q", 4, 5), ("x6", "_flight_n_1", 5, 6),
      ("e7", "_cancel_v_1", 7, 8), ("e8", "parg_d", 7, 8)],
     [("x1", "BV", "x2"), ("e3", "ARG2", "x2"), ("e3", "ARG3", "e7"), ("e4", "ARG1", "e3"),
      ("x5", "BV", "x6"), ("e7", "ARG2", "x6"), ("e8", "ARG1", "e7"),
      ("e8", "ARG2", "x6")],
     "e3",
     [("itexpl", None, 3, "ARG2", 1)],
     ("e3", "ARG2", "x2")),
    ("p09", _t("The/the/DT light/light/JJ colored/colored/JJ glazes/glaze/NNS have/have/VBP "
               "softening/soften/VBG effects/effect/NNS ././."),
     [("x1", "_the_q", 0, 1), ("e2", "_light_a_1", 1, 2), ("e3", "_colored_a_1", 2, 3),
      ("x4", "_glaze_n_1", 3, 4), ("e5", "_have_v_1", 4, 5), ("e6", "_soften_v_1", 5, 6),
      ("x7", "udef_q", 6, 7), ("x8", "_effect_n_1", 6, 7)],
     [("x1", "BV", "x4"), ("e2", "ARG1", "e3"), ("e3", "ARG1", "x4"), ("e5", "ARG1", "x4"),
      ("e5", "ARG2", "x8"), ("e6", "ARG1", "x8"), ("x7", "BV", "x8")],
     "e5",
     [("ned", "A", 3, "MOD", 2), ("ned", "B", 4, "MOD", 3)],
     ("e2", "ARG1", "e3")),
    ("p10", _t("The/the/DT story/story/NN shows/show/VBZ ,/,/, through/through/IN "
               "flashbacks/flashback/NNS ,/,/, the/the/DT different/different/JJ "
               "histories/history/NNS ././."),
     [("x1", "_the_q", 0, 1), ("x2", "_story_n_1", 1, 2), ("e3", "_show_v_1", 2, 3),
      ("e4", "_through_p", 4, 5), ("x5", "udef_q", 5, 6), ("x6", "_flashback_n_1", 5, 6),
      ("x7", "_the_q", 7, 8), ("e8", "_different_a_1", 8, 9), ("x9", "_history_n_1", 9, 10)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x9"), ("e4", "ARG1", "e3"),
      ("e4", "ARG2", "x6"), ("x5", "BV", "x6"), ("x7", "BV", "x9"), ("e8", "ARG1", "x9")],
     "e3",
     [("argadj", "A", 3, "MOD", 5), ("argadj", "B", 3, "ARG2", 10)],
     ("e4", "ARG1", "e3")),
    ("p11", _t("They/they/PRP took/take/VBD over/over/RP the/the/DT lead/lead/NN "
               "Brooklyn/Brooklyn/NNP has/have/VBZ held/hold/VBN ././."),
     [("x1", "pronoun_q", 0, 1), ("x2", "pron", 0, 1), ("e3", "_take_v_over", 1, 3),
      ("x4", "_the_q", 3, 4), ("x5", "_lead_n_1", 4, 5), ("x6", "proper_q", 5, 6),
      ("x7", "named", 5, 6, "Brooklyn"), ("e8", "_hold_v_1", 7, 8)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x5"), ("x4", "BV", "x5"),
      ("x6", "BV", "x7"), ("e8", "ARG1", "x7"), ("e8", "ARG2", "x5")],
     "e3",
     [("barerel", "B", 8, "ARG2", 5)],
     ("e8", "ARG2", "x5")),
    ("p12", _t("Original/original/JJ copies/copy/NNS are/be/VBP very/very/RB hard/hard/JJ "
               "to/to/TO find/find/VB ././."),
     [("e1", "_original_a_1", 0, 1), ("x2", "udef_q", 1, 2), ("x3", "_copy_n_1", 1, 2),
      ("e4", "_very_x_deg", 3, 4), ("e5", "_hard_a_for", 4, 5), ("e6", "_find_v_1", 6, 7)],
     [("e1", "ARG1", "x3"), ("x2", "BV", "x3"), ("e4", "ARG1", "e5"), ("e5", "ARG1", "e6"),
      ("e6", "ARG2", "x3")],
     "e5",
     [("tough", "B", 7, "ARG2", 2), ("tough", "A", 5, "ARG1", 7)],
     ("e6", "ARG2", "x3")),
    ("p13", _t("Humboldt/Humboldt/NNP supported/support/VBD and/and/CC worked/work/VBD "
               "with/with/IN other/other/JJ scientists/scientist/NNS ././."),
     [("x1", "proper_q", 0, 1), ("x2", "named", 0, 1, "Humboldt"), ("e3", "_support_v_1", 1, 2),
      ("e4", "_and_c", 2, 3), ("e5", "_work_v_with", 3, 5), ("e6", "_other_a_1", 5, 6),
      ("x7", "udef_q", 6, 7), ("x8", "_scientist_n_1", 6, 7)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x8"), ("e5", "ARG1", "x2"),
      ("e5", "ARG2", "x8"), ("e4", "L-INDEX", "e3"), ("e4", "R-INDEX", "e5"),
      ("e6", "ARG1", "x8"), ("x7", "BV", "x8")],
     "e4",
     [("rnr", "A", 4, "ARG2", 7), ("rnr", "B", 2, "ARG2", 7)],
     ("e5", "ARG2", "x8")),
    ("p14", _t("It/it/PRP consisted/consist/VBD of/of/IN four/four/CD games/game/NNS "
               "each/each/DT team/team/NN facing/face/VBG other/other/JJ teams/team/NNS "
               "twice/twice/RB ././."),
     [("x1", "pronoun_q", 0, 1), ("x2", "pron", 0, 1), ("e3", "_consist_v_of", 1, 3),
      ("e4", "card", 3, 4, "4"), ("x5", "udef_q", 4, 5), ("x6", "_game_n_1", 4, 5),
      ("x7", "_each_q", 5, 6), ("x8", "_team_n_1", 6, 7), ("e9", "_face_v_1", 7, 8),
      ("e10", "subord", 7, 8), ("e11", "_other_a_1", 8, 9), ("x12", "udef_q", 9, 10),
      ("x13", "_team_n_1", 9, 10), ("e14", "_twice_a_1", 10, 11)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "x6"), ("e4", "ARG1", "x6"),
      ("x5", "BV", "x6"), ("x7", "BV", "x8"), ("e9", "ARG1", "x8"), ("e9", "ARG2", "x13"),
      ("e10", "ARG1", "e3"), ("e10", "ARG2", "e9"), ("e11", "ARG1", "x13"),
      ("x12", "BV", "x13"), ("e14", "ARG1", "e9")],
     "e3",
     [("absol", "A", 8, "ARG1", 7), ("absol", "B", 2, "MOD", 8)],
     ("e9", "ARG1", "x8")),
    ("p15", _t("Asking/ask/VBG for/for/IN the/the/DT help/help/NN from/from/IN the/the/DT "
               "school/school/NN prompts/prompt/VBZ an/a/DT announcement/announcement/NN "
               "././."),
     [("e1", "_ask_v_for", 0, 2), ("x2", "_the_q", 2, 3), ("x3", "_help_n_1", 3, 4),
      ("e4", "_from_p", 4, 5), ("x5", "_the_q", 5, 6), ("x6", "_school_n_1", 6, 7),
      ("e7", "_prompt_v_1", 7, 8), ("x8", "_a_q", 8, 9), ("x9", "_announcement_n_1", 9, 10)],
     [("e1", "ARG2", "x3"), ("x2", "BV", "x3"), ("e4", "ARG1", "x3"), ("e4", "ARG2", "x6"),
      ("x5", "BV", "x6"), ("e7", "ARG1", "e1"), ("e7", "ARG2", "x9"), ("x8", "BV", "x9")],
     "e7",
     [("vger", "A", 8, "ARG1", 1), ("vger", "B", 1, "ARG2", 4)],
     ("e7", "ARG1", "e1")),
    ("p16", _t("They/they/PRP managed/manage/VBD to/to/TO house/house/VB and/and/CC "
               "feed/feed/VB the/the/DT poor/poor/NN ././."),
     [("x1", "pronoun_q", 0, 1), ("x2", "pron", 0, 1), ("e3", "_manage_v_1", 1, 2),
      ("e4", "_house_v_1", 3, 4), ("e5", "_and_c", 4, 5), ("e6", "_feed_v_1", 5, 6),
      ("x7", "_the_q", 6, 7), ("x8", "_poor_n_1", 7, 8)],
     [("x1", "BV", "x2"), ("e3", "ARG1", "x2"), ("e3", "ARG2", "e4"), ("e3", "ARG2", "e6"),
      ("e5", "L-INDEX", "e4"), ("e5", "R-INDEX", "e6"), ("e4", "ARG1", "x2"),
      ("e4", "ARG2", "x8"), ("e6", "ARG1", "x2"), ("e6", "ARG2", "x8"), ("x7", "BV", "x8")],
     "e3",
     [("control", "B", 2, "ARG1", 1), ("control", "A", 2, "ARG2", 4),
      ("control", "A", 2, "ARG2", 6)],
     ("e3", "ARG1", "x2")),
]

ROLE_MAP = "# gold role\tsystem roles (trailing ^ = arc runs dependent -> head)\nMOD\tARG1^\n"


def pheno_fixture():
    instances, triples, corrupted = [], [], []
    for sid, toks, nodes, edges, top, gold, drop in PHENO:
        x = make_instance(sid, toks, nodes, edges, top)
        instances.append(x)
        for phen, sub, h, role, d in gold:
            triples.append(PhenoTriple(sid, phen, sub, toks[h - 1][0], h, role,
                                       toks[d - 1][0], d))
        kept = tuple(e for e in x.graph.edges if (e.source, e.role, e.target) != drop)
        assert len(kept) == len(x.graph.edges) - 1, sid
        corrupted.append((sid, EdsGraph(x.graph.nodes, kept, x.graph.top, x.graph.text)))
    return instances, triples, corrupted


def curve_fixture():
    train = held_out_corpus(48, CURVE_SEED, "ditransitive", CURVE_FRACTION, CURVE_SEED, 8)
    dev = held_out_corpus(12, CURVE_SEED + 1, "ditransitive", 1.0 / 12, CURVE_SEED, 4)
    return train, dev


def _write_corpus(out: Path, instances, stem=""):
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}sentences.conll").write_text(
        write_sentences([x.sentence for x in instances]), encoding="utf-8")
    (out / f"{stem}graphs.eds").write_text(
        write_graphs([(x.id, x.graph) for x in instances]), encoding="utf-8")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args(argv)
    out = Path(args.out)
    _write_corpus(out / "synthetic", generate_corpus())
    _write_corpus(out / "fig1", [fig1()])
    instances, triples, corrupted = pheno_fixture()
    _write_corpus(out / "pheno", instances)
    (out / "pheno" / "gold.tsv").write_text(write_pheno_gold(triples), encoding="utf-8")
    (out / "pheno" / "roles.tsv").write_text(ROLE_MAP, encoding="utf-8")
    (out / "pheno" / "corrupted.eds").write_text(write_graphs(corrupted), encoding="utf-8")
    train, dev = curve_fixture()
    _write_corpus(out / "curve", train, "train_")
    _write_corpus(out / "curve", dev, "dev_")
    print(f"fixtures written to {out}")


if __name__ == "__main__":
    main()
