"""Synthetic ambiguous corpora with known context rules.

Each planted choose rule is turned into phrases: the rule's context
positions become unambiguous tokens and the focus token gets the correct
parse (the rule's target made concrete) plus, with probability
``ambiguous``, a few distractor parses that the target does not subsume.
Unambiguous filler tokens that match no planted context are mixed in to
bring the corpus to the requested average ambiguity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Corpus, Sentence, Token
from .featstruct import CAT, ROOT, FeatureStructure, subsumes
from .rules import OFFSETS, Action

ROOTS = ("ev", "kalem", "masa", "kitap", "okul", "yol", "deniz", "bahçe")

VALUES = {
    CAT: ("NOUN", "ADJ", "VERB", "ADVERB", "PRONOUN"),
    "CASE": ("NOM", "ACC", "DAT", "LOC", "ABL", "GEN"),
    "POSS": ("NONE", "1SG", "2SG", "3SG"),
    "AGR": ("3SG", "1SG", "2SG", "3PL"),
    "SUBCAT": ("NOM", "ABL", "DAT", "GEN"),
}

FILLERS = (
    [(CAT, "VERB"), (ROOT, "gel"), ("TAM1", "PAST"), ("AGR", "3SG")],
    [(CAT, "VERB"), (ROOT, "oku"), ("TAM1", "PRES"), ("AGR", "1SG")],
    [(CAT, "ADVERB"), (ROOT, "çok")],
    [(CAT, "ADVERB"), (ROOT, "hemen")],
    [(CAT, "NOUN"), (ROOT, "kapı"), ("AGR", "3SG"), ("POSS", "NONE"), ("CASE", "ACC")],
    [(CAT, "NOUN"), (ROOT, "şehir"), ("AGR", "3SG"), ("POSS", "NONE"), ("CASE", "LOC")],
    [(CAT, "ADJ"), (ROOT, "büyük")],
    [(CAT, "CONN"), (ROOT, "ama")],
    [(CAT, "POSTP"), (ROOT, "gibi"), ("SUBCAT", "NOM")],
    [(CAT, "DET"), (ROOT, "bu")],
    [(CAT, "NOUN"), (ROOT, "adam"), ("CASE", "GEN")],
)


@dataclass
class SyntheticConfig:
    sentences: int = 500
    ambiguous: float = 0.7
    distractors: tuple = (2, 3, 4)
    phrases: tuple = (2, 4)
    fillers: tuple = (1, 3)
    seed: int = 0


def _concrete(c, rng, default_cat="NOUN"):
    """A full parse subsumed by constraint ``c``."""
    items = [(CAT, c.get(CAT, default_cat)), (ROOT, c.get(ROOT, rng.choice(ROOTS)))]
    items += [(n, v) for n, v in c.items() if n not in (CAT, ROOT)]
    return FeatureStructure(items)


def _distractors(correct, target, n, rng):
    names = [k for k in target if k != ROOT]
    out = []
    for _ in range(20 * n):
        if len(out) >= n:
            break
        name = rng.choice(names)
        pool = [v for v in VALUES.get(name, ()) if v != correct[name]] or [correct[name] + "X"]
        d = correct.replace(**{name: rng.choice(pool)})
        if not subsumes(target, d) and d != correct and d not in out:
            out.append(d)
    return out


def _anchors(rules):
    return [c for r in rules for _, c in r.context() if isinstance(c, FeatureStructure)]


def filler_pool(rules):
    anchors = _anchors(rules)
    pool = [FeatureStructure(f) for f in FILLERS]
    return [f for f in pool if not any(subsumes(a, f) for a in anchors)]


def _phrase(rule, cfg, rng, fillers):
    """(tokens, gold tokens) realizing one occurrence of ``rule``."""
    offsets = [OFFSETS[p] for p, _ in rule.context()]
    lo, hi = min(offsets + [0]), max(offsets + [0])
    by_off = {OFFSETS[p]: c for p, c in rule.context()}
    toks, gold = [], []
    for off in range(lo, hi + 1):
        if off == 0:
            correct = _concrete(rule.target, rng)
            parses = [correct]
            if rng.random() < cfg.ambiguous:
                parses += _distractors(correct, rule.target, rng.choice(cfg.distractors), rng)
                rng.shuffle(parses)
        else:
            c = by_off.get(off)
            correct = _concrete(c, rng) if c is not None else rng.choice(fillers)
            parses = [correct]
        toks.append(Token(correct[ROOT], tuple(parses)))
        gold.append(Token(correct[ROOT], (correct,)))
    return toks, gold


def generate(rules, cfg=None):
    """Return ``(corpus, gold)`` built from the planted choose ``rules``."""
    cfg = cfg or SyntheticConfig()
    rules = [r for r in rules if r.action is Action.CHOOSE]
    if not rules:
        raise ValueError("need at least one planted choose rule")
    rng = random.Random(cfg.seed)
    fillers = filler_pool(rules)
    if not fillers:
        raise ValueError("every filler token matches a planted context")
    corpus, gold = Corpus(provenance="synthetic"), Corpus(provenance="synthetic")
    for _ in range(cfg.sentences):
        units = [("phrase", rng.choice(rules)) for _ in range(rng.randint(*cfg.phrases))]
        units += [("filler", None)] * rng.randint(*cfg.fillers)
        rng.shuffle(units)
        toks, gtoks = [], []
        for kind, rule in units:
            if kind == "filler":
                f = rng.choice(fillers)
                toks.append(Token(f[ROOT], (f,)))
                gtoks.append(Token(f[ROOT], (f,)))
            else:
                t, g = _phrase(rule, cfg, rng, fillers)
                toks += t
                gtoks += g
        corpus.sentences.append(Sentence(toks))
        gold.sentences.append(Sentence(gtoks))
    return corpus, gold


def split(corpus, n_test):
    """Last ``n_test`` sentences held out."""
    k = len(corpus.sentences) - n_test
    return (Corpus(corpus.sentences[:k], corpus.provenance),
            Corpus(corpus.sentences[k:], corpus.provenance))


def specializes(learned, planted) -> bool:
    """True when ``learned`` fires only where ``planted`` would, choosing a subset of its parses."""
    if learned.action is not planted.action or not subsumes(planted.target, learned.target):
        return False
    for pos, c in planted.context():
        lc = getattr(learned, pos)
        if lc is None:
            return False
        if not isinstance(c, FeatureStructure) or not isinstance(lc, FeatureStructure):
            if c is not lc:
                return False
        elif not subsumes(c, lc):
            return False
    return True
