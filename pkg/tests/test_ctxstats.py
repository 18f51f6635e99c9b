import random

import pytest
from hypothesis import given, settings

from conftest import corpora, random_corpus
from oracles import ctxstats_bf

from morphdis.corpus import Corpus, Sentence, Token
from morphdis.ctxstats import CtxStatsConfig, prune_by_context_stats
from morphdis.featstruct import FeatureStructure, read_masks, read_templates
from morphdis.tables import Keyer


def P(cat):
    return FeatureStructure([("CAT", cat), ("ROOT", "r")])


A, B, C, D = P("A"), P("B"), P("C"), P("D")


def tok(*ps):
    return Token("w", tuple(ps))


def test_all_zero_scores_leave_token_alone():
    c = Corpus([Sentence([tok(A), tok(B, C)])])
    assert prune_by_context_stats(c) == 0
    assert c.sentences[0].tokens[1].parses == (B, C)


def test_weak_parse_is_deleted():
    # q(B | lc=A) = 8/20 = 0.4, q(C | lc=A) = 1/20 = 0.05 < 0.2 * 0.4
    sents = [[tok(A), tok(B)]] * 8 + [[tok(D), tok(B)]] * 12
    sents += [[tok(A), tok(C)]] + [[tok(D), tok(C)]] * 19
    sents += [[tok(A), tok(B, C)]]
    c = Corpus([Sentence(list(s)) for s in sents])
    assert prune_by_context_stats(c) == 1
    assert c.sentences[-1].tokens[1].parses == (B,)


def test_close_scores_survive():
    sents = [[tok(A), tok(B)]] * 8 + [[tok(D), tok(B)]] * 12
    sents += [[tok(A), tok(C)]] * 4 + [[tok(D), tok(C)]] * 16
    sents += [[tok(A), tok(B, C)]]
    c = Corpus([Sentence(list(s)) for s in sents])
    assert prune_by_context_stats(c) == 0


def test_fraction_zero_is_identity():
    c = random_corpus(random.Random(1), n_tokens=200)
    before = c.copy()
    assert prune_by_context_stats(c, CtxStatsConfig(fraction=0)) == 0
    assert c == before


@pytest.mark.parametrize("seed", range(15))
def test_matches_rebuilding_oracle(seed):
    rng = random.Random(seed)
    c = random_corpus(rng, n_tokens=60)
    cfg = CtxStatsConfig(passes=2, fraction=rng.choice([0.2, 0.5, 0.9]))
    k = Keyer(read_templates("NOUN: CASE\n") if seed % 2 else None,
              read_masks("lc: CASE\n") if seed % 3 == 0 else None)
    fast, slow = c.copy(), c.copy()
    prune_by_context_stats(fast, cfg, keyer=k)
    ctxstats_bf(slow, cfg, k)
    assert fast == slow


@settings(max_examples=100, deadline=None)
@given(corpora(max_sentences=6))
def test_never_empties_and_only_shrinks(c):
    before = c.copy()
    n = prune_by_context_stats(c, CtxStatsConfig(fraction=0.9))
    assert all(t.parses for t in c.tokens())
    assert before.n_parses - c.n_parses == n
    for old, new in zip(before.tokens(), c.tokens()):
        assert set(new.parses) <= set(old.parses)


def test_config_validation():
    with pytest.raises(ValueError):
        CtxStatsConfig(weights=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        CtxStatsConfig(fraction=1)
    with pytest.raises(ValueError):
        CtxStatsConfig(passes=0)
