"""Prune parses that have no support in the unambiguous contexts of the current text."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .featstruct import IDENTITY_TEMPLATE, NO_MASK
from .tables import Keyer, add_unambiguous, build_tables

_BOTH, _LEFT, _RIGHT = ("lc", "rc"), ("lc",), ("rc",)


@dataclass
class CtxStatsConfig:
    passes: int = 3
    weights: tuple = (0.5, 0.25, 0.25)
    fraction: float = 0.2

    def __post_init__(self):
        self.weights = tuple(self.weights)
        if self.passes < 1:
            raise ValueError("ctxstats.passes must be at least 1")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError("ctxstats.weights needs three non-negative numbers")
        if abs(sum(self.weights) - 1) > 1e-9:
            raise ValueError("ctxstats.weights must sum to 1")
        if not 0 <= self.fraction < 1:
            raise ValueError("ctxstats.fraction must lie in [0, 1)")


def _q(tables, key, p):
    cnt = tables.cnt(p)
    return Fraction(tables.inc(key, p), cnt) if cnt else Fraction(0)


def _key(views, i, keyer, shape):
    key = [None, None, None, None]
    if "lc" in shape:
        key[1] = keyer.ctx(views[i - 1][0], "lc")
    if "rc" in shape:
        key[2] = keyer.ctx(views[i + 1][0], "rc")
    return tuple(key)


def token_scores(views, i, keyer, tables, weights):
    """Per-view-parse weighted scores for token ``i``, or None without evidence."""
    n = len(views)
    left = i > 0 and len(views[i - 1]) == 1
    right = i + 1 < n and len(views[i + 1]) == 1
    if left and right:
        parts = [(w, _key(views, i, keyer, s)) for w, s in zip(weights, (_BOTH, _LEFT, _RIGHT))]
    elif left:
        parts = [(1, _key(views, i, keyer, _LEFT))]
    elif right:
        parts = [(1, _key(views, i, keyer, _RIGHT))]
    else:
        return None
    return [sum((w * _q(tables, k, p) for w, k in parts), Fraction(0)) for p in views[i]]


def prune_by_context_stats(corpus, cfg=None, masks=NO_MASK, template=IDENTITY_TEMPLATE,
                           keyer=None) -> int:
    """Delete weak parses in place, left to right, over ``cfg.passes`` passes.

    Deletions and table updates happen immediately, before the next token is
    scored.  Returns the number of parses removed.
    """
    cfg = cfg or CtxStatsConfig()
    if cfg.fraction <= 0:
        return 0
    keyer = keyer or Keyer(template, masks)
    weights = [Fraction(w).limit_denominator(10 ** 6) for w in cfg.weights]
    frac = Fraction(cfg.fraction).limit_denominator(10 ** 6)
    tables = build_tables(corpus, keyer)
    removed = 0
    for _ in range(cfg.passes):
        for s in corpus.sentences:
            views = [keyer.view(t) for t in s.tokens]
            for i, tok in enumerate(s.tokens):
                v = views[i]
                if len(v) < 2:
                    continue
                scores = token_scores(views, i, keyer, tables, weights)
                if scores is None:
                    continue
                top = max(scores)
                weak = {p for p, sc in zip(v, scores) if sc < frac * top}
                if not weak:
                    continue
                keep = [p for p in tok.parses if keyer.focus(p) not in weak]
                if not keep:
                    continue
                removed += len(tok.parses) - len(keep)
                s.tokens[i] = tok.with_parses(keep)
                views[i] = keyer.view(s.tokens[i])
                if len(views[i]) == 1:
                    add_unambiguous(tables, views, i, keyer, lambda j: True)
    return removed


__all__ = ["CtxStatsConfig", "prune_by_context_stats", "token_scores"]
