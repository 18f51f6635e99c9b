"""Unsupervised induction of choose and delete rules.

Choose learning is a greedy loop over an untagged training corpus: every
unambiguous context around an ambiguous token proposes ``choose P`` for
each of the token's parses, candidates are scored against the
incontext/count tables, and the best sufficiently specific candidate is
applied and recorded.  Scores use exact rational arithmetic.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .featstruct import IDENTITY_TEMPLATE, NO_MASK, subsumes
from .rules import SHAPES, Action, Mode, Provenance, Rule, apply_rule_at, encode_rule, run_pass
from .tables import (
    DELETE_SHAPES,
    LEARN_SHAPES,
    Keyer,
    add_unambiguous,
    build_tables,
    contexts_at,
    shape_of,
)

log = logging.getLogger(__name__)

NO_EVIDENCE = "lack of sufficient unambiguous contexts"

# stem(rc) variants are proposed only when rrc is empty
CANDIDATE_STEM_SHAPES = tuple(s for s in LEARN_SHAPES if "rrc" not in s)


@dataclass
class ThresholdSchedule:
    thresholds: tuple = (4, 6, 9, 13)
    damping: float = 0.9
    stop_limit: float = 7

    def __post_init__(self):
        self.thresholds = tuple(self.thresholds)
        if len(self.thresholds) != 4:
            raise ValueError("need one threshold per specificity rank (4)")
        if any(a > b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must not decrease with rank")
        if not 0 < self.damping < 1:
            raise ValueError("damping must lie strictly between 0 and 1")

    def rounds_to_stop(self) -> int:
        """Damping rounds after which the rank-1 threshold is below the stop limit."""
        t, k = self.thresholds[0], 0
        while True:
            t *= self.damping
            k += 1
            if t < self.stop_limit:
                return k


@dataclass
class DeleteLearnConfig:
    fraction: float = 0.2
    template: object = IDENTITY_TEMPLATE

    def __post_init__(self):
        if not 0 < self.fraction < 1:
            raise ValueError("delete fraction must lie strictly between 0 and 1")


# --------------------------------------------------------------------------
# Scoring


def score_candidate(context, parse, competitors, tables) -> Fraction:
    """Score of ``choose parse`` in ``context`` against the other parses.

    ``P_max`` is the competitor with positive count maximizing
    ``cnt(Pi)/cnt(Pj) * inc(C, Pj)``; the score is
    ``inc(C, Pi) - cnt(Pi)/cnt(P_max) * inc(C, P_max)``.  A parse never seen
    unambiguously counts as 1.  Ties for ``P_max`` do not change the score.
    """
    inc_i = tables.inc(context, parse)
    cnt_i = tables.cnt(parse) or 1
    best_inc = best_cnt = None
    for pj in competitors:
        if pj == parse:
            continue
        cnt_j = tables.cnt(pj)
        if cnt_j <= 0:
            continue
        inc_j = tables.inc(context, pj)
        # compare inc_j / cnt_j without division
        if best_inc is None or inc_j * best_cnt > best_inc * cnt_j:
            best_inc, best_cnt = inc_j, cnt_j
    if best_inc is None or best_inc == 0:
        return Fraction(inc_i)
    return Fraction(inc_i * best_cnt - cnt_i * best_inc, best_cnt)


def candidate_rule(context, parse, action=Action.CHOOSE, provenance=Provenance.LEARNED_CHOOSE,
                   comment="") -> Rule:
    return Rule(*context, action=action, target=parse, provenance=provenance, comment=comment)


def _serial(cand):
    return encode_rule(candidate_rule(*cand))


def select_rule(scores, thresholds):
    """Pick a candidate from ``{(context, parse): score}``.

    Ranks are scanned from most to least specific; the best candidate of the
    first rank whose top score reaches its threshold wins, with ties going
    to the lexicographically smallest rule text.  Returns
    ``(candidate, score)`` or ``None``.
    """
    best = {}
    for cand, s in scores.items():
        r = SHAPES[shape_of(cand[0])]
        cur = best.get(r)
        if cur is None or s > cur[0]:
            best[r] = [s, [cand]]
        elif s == cur[0]:
            cur[1].append(cand)
    for r in (1, 2, 3, 4):
        if r in best and best[r][0] >= thresholds[r - 1]:
            s, cands = best[r]
            return min(cands, key=_serial), s
    return None


# --------------------------------------------------------------------------
# Choose learning


def project_corpus(corpus, keyer):
    """Copy of ``corpus`` whose tokens carry only their projected views."""
    out = corpus.copy()
    for s in out.sentences:
        s.tokens = [t.with_parses(keyer.view(t)) for t in s.tokens]
    return out


@dataclass
class LogEntry:
    iteration: int
    rule: Rule
    score: Fraction
    thresholds: tuple
    changed: int


class ChooseLearner:
    """State of one choose-learning run over a projected corpus.

    ``check`` (if given) is called as ``check(learner)`` after every rule
    application; tests use it to compare the tables against a rebuild.
    """

    def __init__(self, corpus, sched=None, keyer=None, check=None):
        self.keyer = keyer or Keyer()
        self.corpus = project_corpus(corpus, self.keyer)
        self.sched = sched or ThresholdSchedule()
        self.check = check
        self.thresholds = list(self.sched.thresholds)
        self.rules = []
        self.log = []
        self.damping_rounds = 0
        self.diagnostics = []
        self.blacklist = set()
        self.tables = build_tables(self.corpus, self.keyer)
        # candidate bookkeeping
        self._occ = {}
        self._n_occ = Counter()
        self._comp = defaultdict(Counter)
        self._by_ctx = defaultdict(set)
        self._by_parse = defaultdict(set)
        self.scores = {}
        dirty = set()
        for si, s in enumerate(self.corpus.sentences):
            views = self._views(si)
            for i in range(len(s.tokens)):
                self._add_occurrences(si, i, views, dirty)
        self._rescore(dirty)

    def _views(self, si):
        return [self.keyer.view(t) for t in self.corpus.sentences[si].tokens]

    def _occurrences(self, views, i):
        v = views[i]
        if len(v) < 2:
            return []
        out = []
        keys = contexts_at(views, i, self.keyer, LEARN_SHAPES, CANDIDATE_STEM_SHAPES)
        for p in v:
            hit = sum(1 for q in v if subsumes(p, q))
            if hit == len(v):
                continue
            others = tuple(q for q in v if q != p)
            for key in keys:
                out.append(((key, p), others))
        return out

    def _add_occurrences(self, si, i, views, dirty):
        occ = self._occurrences(views, i)
        self._occ[(si, i)] = occ
        for cand, others in occ:
            self._n_occ[cand] += 1
            self._comp[cand].update(others)
            self._by_ctx[cand[0]].add(cand)
            self._by_parse[cand[1]].add(cand)
            for q in others:
                self._by_parse[q].add(cand)
            dirty.add(cand)

    def _drop_occurrences(self, si, i, dirty):
        for cand, others in self._occ.pop((si, i), ()):
            self._n_occ[cand] -= 1
            comp = self._comp[cand]
            comp.subtract(others)
            for q in others:
                if comp[q] <= 0:
                    del comp[q]
            if self._n_occ[cand] <= 0:
                del self._n_occ[cand]
                del self._comp[cand]
            dirty.add(cand)

    def _rescore(self, dirty):
        for cand in dirty:
            if cand not in self._n_occ or cand in self.blacklist:
                self.scores.pop(cand, None)
                continue
            self.scores[cand] = score_candidate(cand[0], cand[1], self._comp[cand], self.tables)

    def _apply(self, rule):
        """Apply ``rule`` to a fixpoint, keeping tables and candidates current."""
        changed = 0
        dirty = set()
        regions = set()
        progress = True
        while progress:
            progress = False
            for si, s in enumerate(self.corpus.sentences):
                for i in range(len(s.tokens)):
                    if not apply_rule_at(s, i, rule, Mode.UNAMBIGUOUS, stem_rc=True,
                                         keyer=self.keyer):
                        continue
                    changed += 1
                    progress = True
                    views = self._views(si)
                    if len(views[i]) == 1:
                        ctxs, parses = add_unambiguous(self.tables, views, i, self.keyer,
                                                       lambda j: True)
                        for c in ctxs:
                            dirty |= self._by_ctx.get(c, set())
                        for p in parses:
                            dirty |= self._by_parse.get(p, set())
                    for j in range(max(0, i - 2), min(len(s.tokens), i + 3)):
                        regions.add((si, j))
        for si, j in sorted(regions):
            self._drop_occurrences(si, j, dirty)
        views_cache = {}
        for si, j in sorted(regions):
            if si not in views_cache:
                views_cache[si] = self._views(si)
            self._add_occurrences(si, j, views_cache[si], dirty)
        self._rescore(dirty)
        return changed

    def step(self) -> bool:
        """One selection/application or damping step; False when learning is over."""
        if not self.scores:
            if not self.rules and not self.damping_rounds and not self.diagnostics:
                self.diagnostics.append(NO_EVIDENCE)
                log.warning("no candidate rules: %s", NO_EVIDENCE)
            return False
        picked = select_rule(self.scores, self.thresholds)
        if picked is None:
            self.thresholds = [t * self.sched.damping for t in self.thresholds]
            self.damping_rounds += 1
            log.info("damping round %d: thresholds %s", self.damping_rounds,
                     " ".join(f"{t:.4g}" for t in self.thresholds))
            return self.thresholds[0] >= self.sched.stop_limit
        cand, score = picked
        n = len(self.log) + 1
        rule = candidate_rule(*cand, comment=f"learned-choose iter={n} score={format_score(score)}")
        changed = self._apply(rule)
        if not changed:
            self.blacklist.add(cand)
            self.scores.pop(cand, None)
            return True
        if rule not in self.rules:
            self.rules.append(rule)
        self.log.append(LogEntry(n, rule, score, tuple(self.thresholds), changed))
        log.info("iter %d score %s: %s", n, format_score(score), encode_rule(rule))
        if self.check is not None:
            self.check(self)
        return True

    def run(self):
        while self.step():
            pass
        return self.rules


def format_score(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{float(x):.4g}"
    return str(int(x))


def prepare(corpus, hand_choose=(), hand_delete=()):
    """Copy of ``corpus`` with the hand-written rules applied."""
    c = corpus.copy()
    run_pass(c, hand_choose, Mode.ANY_PARSE)
    run_pass(c, hand_delete, Mode.UNAMBIGUOUS)
    return c


def learn_choose(corpus, hand_choose=(), hand_delete=(), sched=None, masks=NO_MASK,
                 template=IDENTITY_TEMPLATE, check=None) -> ChooseLearner:
    """Run choose learning; the learned rules are in ``.rules``."""
    c = prepare(corpus, hand_choose, hand_delete)
    learner = ChooseLearner(c, sched, Keyer(template, masks), check)
    learner.run()
    return learner


# --------------------------------------------------------------------------
# Delete learning


def delete_scores(context, parses, tables):
    """``inc(C, P) / cnt(P)`` per parse, 0 for parses never seen unambiguously."""
    out = []
    for p in parses:
        cnt = tables.cnt(p)
        out.append(Fraction(tables.inc(context, p), cnt) if cnt else Fraction(0))
    return out


def learn_delete(corpus, choose_rules=(), hand_choose=(), hand_delete=(), cfg=None,
                 masks=NO_MASK, choose_template=IDENTITY_TEMPLATE) -> list[Rule]:
    """Delete rules for parses that score far below their best sibling.

    The corpus is re-run through the hand rules and the learned choose rules
    and then viewed through the finer delete template.
    """
    cfg = cfg or DeleteLearnConfig()
    c = corpus.copy()
    run_pass(c, hand_choose, Mode.ANY_PARSE)
    run_pass(c, choose_rules, Mode.UNAMBIGUOUS, stem_rc=True,
             keyer=Keyer(choose_template, masks))
    run_pass(c, hand_delete, Mode.UNAMBIGUOUS)
    keyer = Keyer(cfg.template, masks)
    tables = build_tables(c, keyer)
    frac = Fraction(cfg.fraction).limit_denominator(10 ** 6)
    rules = []
    seen = set()
    for s in c.sentences:
        views = [keyer.view(t) for t in s.tokens]
        for i, v in enumerate(views):
            if len(v) < 2:
                continue
            for key in contexts_at(views, i, keyer, DELETE_SHAPES):
                scores = delete_scores(key, v, tables)
                top = max(scores)
                if top <= 0:
                    continue
                for p, sc in zip(v, scores):
                    if sc >= frac * top or (key, p) in seen:
                        continue
                    if subsumes(p, v[scores.index(top)]):
                        continue
                    seen.add((key, p))
                    rules.append(candidate_rule(
                        key, p, Action.DELETE, Provenance.LEARNED_DELETE,
                        f"learned-delete score={format_score(sc)} max={format_score(top)}"))
    return rules
