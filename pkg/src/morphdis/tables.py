"""Statistics over unambiguous contexts.

``incontext[(C, P)]`` counts how often a token whose only (projected)
parse is ``P`` occurs in the fully unambiguous context ``C``;
``count[P]`` counts unambiguous occurrences of ``P``.

A context key is a 4-tuple ``(llc, lc, rc, rrc)`` of masked, projected
parses with ``None`` for unused positions.  When the right neighbour is a
derived form its stem is entered as a second ``rc`` key.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .featstruct import IDENTITY_TEMPLATE, NO_MASK, STEM, project

LEARN_SHAPES = (
    ("llc", "lc", "rc", "rrc"),
    ("llc", "lc"),
    ("rc", "rrc"),
    ("lc", "rc"),
    ("lc",),
    ("rc",),
)
DELETE_SHAPES = (("lc", "rc"), ("lc",), ("rc",))

_INDEX = {"llc": 0, "lc": 1, "rc": 2, "rrc": 3}
_OFFSET = {"llc": -2, "lc": -1, "rc": 1, "rrc": 2}


class Keyer:
    """Projection plus relevance masks, memoized.

    ``view(token)`` is the token's parse set as the learner sees it: the
    distinct projected, focus-masked parses in order of first appearance.
    """

    def __init__(self, template=IDENTITY_TEMPLATE, masks=NO_MASK):
        self.template = template or IDENTITY_TEMPLATE
        self.masks = masks or NO_MASK
        self._focus = {}
        self._views = {}
        self._ctx = {}

    def focus(self, p):
        out = self._focus.get(p)
        if out is None:
            out = self.masks.apply(project(p, self.template), "focus")
            self._focus[p] = out
        return out

    def view(self, token):
        parses = token.parses
        out = self._views.get(parses)
        if out is None:
            out = tuple(dict.fromkeys(self.focus(p) for p in parses))
            self._views[parses] = out
        return out

    def ctx(self, f, pos):
        k = (f, pos)
        out = self._ctx.get(k)
        if out is None:
            out = self.masks.apply(f, pos)
            self._ctx[k] = out
        return out


def shape_of(key) -> tuple[str, ...]:
    return tuple(p for p, i in _INDEX.items() if key[i] is not None)


def contexts_at(views, i, keyer, shapes=LEARN_SHAPES, stem_shapes=None):
    """Context keys around position ``i`` whose positions are all unambiguous.

    ``views`` holds each token's view.  For shapes in ``stem_shapes``
    (default: every shape with ``rc``) a derived ``rc`` adds a second key
    made from its stem.
    """
    n = len(views)
    out = []
    for shape in shapes:
        key = [None, None, None, None]
        ok = True
        for pos in shape:
            j = i + _OFFSET[pos]
            if not (0 <= j < n) or len(views[j]) != 1:
                ok = False
                break
            key[_INDEX[pos]] = keyer.ctx(views[j][0], pos)
        if not ok:
            continue
        out.append(tuple(key))
        if "rc" in shape and (stem_shapes is None or shape in stem_shapes):
            rc = views[i + 1][0]
            if STEM in rc:
                key[2] = keyer.ctx(rc[STEM], "rc")
                out.append(tuple(key))
    return out


@dataclass
class Tables:
    incontext: Counter = field(default_factory=Counter)
    count: Counter = field(default_factory=Counter)

    def __eq__(self, other):
        # Counter equality ignores zero entries in 3.10 only partially
        return (+self.incontext == +other.incontext) and (+self.count == +other.count)

    def inc(self, context, parse) -> int:
        return self.incontext.get((context, parse), 0)

    def cnt(self, parse) -> int:
        return self.count.get(parse, 0)


def _count_token(tables, parse, changed):
    tables.count[parse] += 1
    changed.append(parse)
    if STEM in parse:
        tables.count[parse[STEM]] += 1
        changed.append(parse[STEM])


def build_tables(corpus, keyer: Keyer) -> Tables:
    """incontext/count tables for the current state of ``corpus``."""
    tables = Tables()
    sink = []
    for sentence in corpus.sentences:
        views = [keyer.view(t) for t in sentence.tokens]
        for i, v in enumerate(views):
            if len(v) != 1:
                continue
            p = v[0]
            _count_token(tables, p, sink)
            for key in contexts_at(views, i, keyer):
                tables.incontext[(key, p)] += 1
        sink.clear()
    return tables


def _touches(key_shape, i, k):
    return any(i + _OFFSET[pos] == k for pos in key_shape)


def add_unambiguous(tables, views, k, keyer, done):
    """Record that token ``k`` just became unambiguous.

    ``views`` must already reflect the new state of token ``k``;
    ``done(j)`` tells whether another token that also changed in the same
    step has already been entered (windows containing a not-yet-entered
    token are left for that token's own call).  Returns the changed
    ``(contexts, parses)`` so callers can refresh derived data.
    """
    touched_ctx = []
    touched_parse = []
    n = len(views)

    def ready(j):
        return len(views[j]) == 1 and (j == k or done(j))

    _count_token(tables, views[k][0], touched_parse)
    for i in range(max(0, k - 2), min(n, k + 3)):
        if not ready(i):
            continue
        p = views[i][0]
        for shape in LEARN_SHAPES:
            if i != k and not _touches(shape, i, k):
                continue
            if not all(0 <= i + _OFFSET[pos] < n and ready(i + _OFFSET[pos]) for pos in shape):
                continue
            for key in contexts_at(views, i, keyer, shapes=(shape,)):
                tables.incontext[(key, p)] += 1
                touched_ctx.append(key)
                touched_parse.append(p)
    return touched_ctx, touched_parse
