import random

from hypothesis import strategies as st

from morphdis.corpus import Corpus, Sentence, Token
from morphdis.featstruct import CAT, ROOT, STEM, SUFFIX, FeatureStructure
from morphdis.rules import Action, Provenance, Rule

CATS = ("NOUN", "VERB", "ADJ")
FEATS = {"AGR": ("3SG", "2SG"), "CASE": ("NOM", "GEN", "ABL"), "POSS": ("NONE", "3SG")}
ROOTS = ("ev", "git", "oy")


@st.composite
def parses(draw, max_depth=2):
    """Analyzer-style structures: CAT/ROOT at the base, CAT/SUFFIX on derived levels."""
    depth = draw(st.integers(0, max_depth))
    items = [(CAT, draw(st.sampled_from(CATS))), (ROOT, draw(st.sampled_from(ROOTS)))]
    for name, vals in FEATS.items():
        if draw(st.booleans()):
            items.append((name, draw(st.sampled_from(vals))))
    f = FeatureStructure(items)
    for _ in range(depth):
        items = [(CAT, draw(st.sampled_from(CATS))), (SUFFIX, draw(st.sampled_from(("DIK", "REL")))),
                 (STEM, f)]
        for name, vals in FEATS.items():
            if draw(st.booleans()):
                items.append((name, draw(st.sampled_from(vals))))
        f = FeatureStructure(items)
    return f


@st.composite
def constraints(draw, max_depth=3):
    """Partial descriptions over the same vocabulary (any feature may be missing)."""
    items = []
    if draw(st.booleans()):
        items.append((CAT, draw(st.sampled_from(CATS))))
    if draw(st.integers(0, 3)) == 0:
        items.append((ROOT, draw(st.sampled_from(ROOTS))))
    for name, vals in FEATS.items():
        if draw(st.integers(0, 2)) == 0:
            items.append((name, draw(st.sampled_from(vals))))
    if max_depth > 1 and draw(st.integers(0, 2)) == 0:
        items.append((STEM, draw(constraints(max_depth=max_depth - 1))))
    return FeatureStructure(items)


@st.composite
def tokens(draw, max_parses=4):
    ps = draw(st.lists(parses(max_depth=1), min_size=1, max_size=max_parses, unique=True))
    return Token(ps[0].innermost()[ROOT], tuple(ps))


@st.composite
def corpora(draw, max_sentences=4, max_len=6):
    sents = draw(st.lists(st.lists(tokens(), min_size=1, max_size=max_len),
                          min_size=1, max_size=max_sentences))
    return Corpus([Sentence(s) for s in sents])


@st.composite
def rules(draw):
    from morphdis.rules import SHAPES

    shape = draw(st.sampled_from(sorted(SHAPES)))
    ctx = {p: draw(constraints(max_depth=1)) for p in shape}
    action = draw(st.sampled_from(list(Action)))
    prov = Provenance.HAND_CHOOSE if action is Action.CHOOSE else Provenance.HAND_DELETE
    return Rule(**ctx, action=action, target=draw(constraints(max_depth=1).filter(bool)),
                provenance=prov)


def random_corpus(rng: random.Random, n_tokens=60, n_types=6, max_parses=3):
    """Corpus over a small parse inventory so contexts repeat."""
    inventory = []
    for cat in CATS:
        for case in FEATS["CASE"]:
            inventory.append(FeatureStructure([(CAT, cat), (ROOT, "r"), ("CASE", case)]))
    derived = FeatureStructure([(CAT, "VERB"), (SUFFIX, "NONE"), (STEM, inventory[0]),
                                ("AGR", "3SG")])
    inventory = inventory[: n_types] + [derived]
    sents, cur = [], []
    for _ in range(n_tokens):
        k = rng.choice([1, 1, 1, 2, 3][: max(1, max_parses + 2)])
        k = min(k, max_parses)
        ps = rng.sample(inventory, k)
        cur.append(Token("w", tuple(ps)))
        if rng.random() < 0.15:
            sents.append(Sentence(cur))
            cur = []
    if cur:
        sents.append(Sentence(cur))
    return Corpus(sents)


# (criterion number, title, passed, seconds); filled by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, secs in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} "
                                    f"({secs:.2f}s) {title}")
