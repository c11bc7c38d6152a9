"""Small generated EDS corpora for overfitting checks and learning curves.

Sentences follow four templates (transitive, passive, ditransitive,
coordinated verbs) over noun phrases built from determiners + nouns, single
names, two-word named entities and pronouns. The resulting corpus uses ten
tag types (∅ included) and six roles.
"""
from __future__ import annotations

import random

from .corpus import Instance, Sentence, Token, downsample
from .graph import EdsEdge, EdsGraph, EdsNode

DETS = ["the", "a", "every", "some"]
NOUNS = ["drug", "paper", "reviewer", "cake", "sister", "book", "letter", "student",
         "teacher", "city", "company", "report", "plan", "idea", "team", "game", "house",
         "car", "dog", "river", "garden", "song", "story", "window", "door", "box", "gift",
         "friend", "doctor", "farmer", "painter", "lawyer", "museum", "bridge", "ticket",
         "engine", "photo", "recipe", "map", "coin", "nurse", "pilot", "parcel", "lamp",
         "table", "chair", "poem", "film", "shop", "school", "village", "boat", "horse", "cat",
         "apple", "key", "bottle", "jacket", "camera", "guitar"]
# lemma -> past tense / participle (regular spelling only)
VERBS = {"introduce": "introduced", "accept": "accepted", "bake": "baked", "deliver": "delivered",
         "open": "opened", "paint": "painted", "visit": "visited", "reject": "rejected",
         "praise": "praised", "describe": "described", "offer": "offered", "mail": "mailed",
         "hand": "handed", "show": "showed", "clean": "cleaned", "repair": "repaired",
         "study": "studied", "sell": "sold", "find": "found", "bring": "brought"}
DITRANSITIVE = ["bake", "offer", "mail", "hand", "show", "sell", "deliver", "bring"]
PREPS = ["in", "near", "with", "for", "after", "behind"]
NAMES = ["Sally", "Frank", "Mike", "Bob", "Paris", "London", "Berlin", "Germany", "Anna",
         "Tom", "Maria", "Oslo", "Kim"]
ENTITIES = [("West", "Germany"), ("New", "York"), ("Donald", "Trump"), ("Hong", "Kong"),
            ("South", "Africa"), ("Sally", "Smith")]
SUBJ_PRONOUNS = ["they", "she", "he", "we"]
OBJ_PRONOUNS = ["them", "her", "him", "us"]


def make_instance(sid: str, tokens, nodes, edges, top=None) -> Instance:
    """Build an instance from token-indexed node anchors.

    ``tokens``: (form, lemma, pos) triples, joined by single spaces.
    ``nodes``: (id, predicate, first_token, last_token_exclusive[, carg]).
    ``edges``: (source, role, target).
    """
    spans, text, pos = [], [], 0
    for form, _, _ in tokens:
        spans.append((pos, pos + len(form)))
        text.append(form)
        pos += len(form) + 1
    toks = tuple(Token(f, l, p, s, e) for (f, l, p), (s, e) in zip(tokens, spans))
    sentence = Sentence(sid, " ".join(text), toks)
    gnodes = []
    for spec in nodes:
        nid, pred, a, b = spec[:4]
        carg = spec[4] if len(spec) > 4 else None
        gnodes.append(EdsNode(nid, pred, spans[a][0], spans[b - 1][1], carg))
    gedges = tuple(EdsEdge(s, t, r) for s, r, t in edges)
    return Instance(sentence, EdsGraph(tuple(gnodes), gedges, top, sentence.text))


class _Builder:
    def __init__(self):
        self.tokens, self.nodes, self.edges = [], [], []
        self.count = 0

    def tok(self, form, lemma, pos) -> int:
        self.tokens.append((form, lemma, pos))
        return len(self.tokens) - 1

    def node(self, pred, a, b=None, carg=None) -> str:
        self.count += 1
        nid = f"x{self.count}" if pred not in ("_and_c",) and "_v_" not in pred else f"e{self.count}"
        spec = (nid, pred, a, (a + 1) if b is None else b)
        self.nodes.append(spec + ((carg,) if carg is not None else ()))
        return nid

    def edge(self, src, role, tgt):
        self.edges.append((src, role, tgt))


def _np(b: _Builder, rng: random.Random, role: str) -> str:
    """Append a noun phrase; returns the id of its head node."""
    kind = rng.choices(["det", "name", "entity", "pron"], weights=[6, 2, 2, 2])[0]
    if kind == "det":
        d = rng.choice(DETS)
        n = rng.choice(NOUNS)
        i = b.tok(d, d, "DT")
        j = b.tok(n, n, "NN")
        q = b.node(f"_{d}_q", i)
        head = b.node(f"_{n}_n_1", j)
        b.edge(q, "BV", head)
        return head
    if kind == "name":
        name = rng.choice(NAMES)
        i = b.tok(name, name, "NNP")
        head = b.node("named", i, carg=name)
        b.edge(b.node("proper_q", i), "BV", head)
        return head
    if kind == "entity":
        first, last = rng.choice(ENTITIES)
        i = b.tok(first, first, "NNP")
        j = b.tok(last, last, "NNP")
        n1 = b.node("named", i, carg=first)
        b.edge(b.node("proper_q", i), "BV", n1)
        comp = b.node("compound", i, j + 1)
        n2 = b.node("named", j, carg=last)
        b.edge(b.node("proper_q", j), "BV", n2)
        b.edge(comp, "ARG1", n2)
        b.edge(comp, "ARG2", n1)
        return n2
    forms = SUBJ_PRONOUNS if role == "subj" else OBJ_PRONOUNS
    p = rng.choice(forms)
    i = b.tok(p, p, "PRP")
    head = b.node("pron", i)
    b.edge(b.node("pronoun_q", i), "BV", head)
    return head


def _verb(b: _Builder, lemma: str, passive=False) -> str:
    form = VERBS[lemma]
    i = b.tok(form, lemma, "VBN" if passive else "VBD")
    v = b.node(f"_{lemma}_v_1", i)
    if passive:
        b.node("parg_d", i)
    return v


def _pp(b: _Builder, rng: random.Random, head: str):
    p = rng.choice(PREPS)
    i = b.tok(p, p, "IN")
    pn = b.node(f"_{p}_p", i)
    b.edge(pn, "ARG1", head)
    b.edge(pn, "ARG2", _np(b, rng, "obj"))


def generate_sentence(sid: str, template: str, rng: random.Random) -> Instance:
    b = _Builder()
    if template == "transitive":
        s = _np(b, rng, "subj")
        v = _verb(b, rng.choice(sorted(VERBS)))
        o = _np(b, rng, "obj")
        b.edge(v, "ARG1", s)
        b.edge(v, "ARG2", o)
        if rng.random() < 0.7:
            _pp(b, rng, v)
        top = v
    elif template == "passive":
        o = _np(b, rng, "subj")
        b.tok("was", "be", "VBD")
        lemma = rng.choice(sorted(VERBS))
        v = _verb(b, lemma, passive=True)
        parg = b.nodes[-1][0]
        b.edge(v, "ARG2", o)
        b.edge(parg, "ARG1", v)
        b.edge(parg, "ARG2", o)
        if rng.random() < 0.5:
            b.tok("by", "by", "IN")
            b.edge(v, "ARG1", _np(b, rng, "obj"))
        if rng.random() < 0.6:
            _pp(b, rng, v)
        top = v
    elif template == "ditransitive":
        s = _np(b, rng, "subj")
        v = _verb(b, rng.choice(DITRANSITIVE))
        r = _np(b, rng, "obj")
        o = _np(b, rng, "obj")
        b.edge(v, "ARG1", s)
        b.edge(v, "ARG3", r)
        b.edge(v, "ARG2", o)
        if rng.random() < 0.4:
            _pp(b, rng, v)
        top = v
    elif template == "coordination":
        s = _np(b, rng, "subj")
        l1, l2 = rng.sample(sorted(VERBS), 2)
        v1 = _verb(b, l1)
        c = b.node("_and_c", b.tok("and", "and", "CC"))
        v2 = _verb(b, l2)
        o = _np(b, rng, "obj")
        for v in (v1, v2):
            b.edge(v, "ARG1", s)
            b.edge(v, "ARG2", o)
        b.edge(c, "L-INDEX", v1)
        b.edge(c, "R-INDEX", v2)
        top = c
    else:
        raise ValueError(f"unknown template {template!r}")
    b.tok(".", ".", ".")
    return make_instance(sid, b.tokens, b.nodes, b.edges, top)


TEMPLATE_MIX = [("transitive", 24), ("passive", 16), ("ditransitive", 12), ("coordination", 12)]


def generate_corpus(n: int = 64, seed: int = 13, templates=None) -> list[Instance]:
    """Seeded corpus; template proportions follow TEMPLATE_MIX."""
    rng = random.Random(seed)
    mix = templates or TEMPLATE_MIX
    total = sum(w for _, w in mix)
    plan = []
    for name, w in mix:
        plan += [name] * round(n * w / total)
    while len(plan) < n:
        plan.append(mix[0][0])
    plan = plan[:n]
    rng.shuffle(plan)
    return [generate_sentence(f"syn{i + 1:03d}", t, rng) for i, t in enumerate(plan)]


def held_out_corpus(n: int, seed: int, template: str, fraction: float, split_seed: int,
                    count: int) -> list[Instance]:
    """Corpus where ``template`` appears ``count`` times, never inside
    ``downsample(corpus, fraction, split_seed)``.
    """
    inside = set(downsample(list(range(n)), fraction, split_seed))
    outside = [i for i in range(n) if i not in inside]
    if count > len(outside):
        raise ValueError("not enough held-out slots")
    rng = random.Random(seed)
    chosen = set(rng.sample(outside, count))
    others = [name for name, _ in TEMPLATE_MIX if name != template]
    plan = [template if i in chosen else others[i % len(others)] for i in range(n)]
    return [generate_sentence(f"ho{i + 1:03d}", t, rng) for i, t in enumerate(plan)]
