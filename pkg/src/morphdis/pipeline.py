"""The five-step disambiguation procedure and gold-standard evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ctxstats import CtxStatsConfig, prune_by_context_stats
from .featstruct import IDENTITY_TEMPLATE, NO_MASK
from .rules import Mode, run_pass
from .tables import Keyer

HAND_CHOOSE = "hand-choose"
HAND_DELETE = "hand-delete"
CTXSTATS = "ctxstats"
LEARNED_CHOOSE = "learned-choose"
LEARNED_DELETE = "learned-delete"
STEPS = (HAND_CHOOSE, HAND_DELETE, CTXSTATS, LEARNED_CHOOSE, LEARNED_DELETE)

STAGE_NAMES = {
    None: "BASE",
    HAND_CHOOSE: "INITIAL CHOOSE",
    HAND_DELETE: "INITIAL DELETE",
    CTXSTATS: "CONTEXT STATISTICS",
    LEARNED_CHOOSE: "LEARNED CHOOSE",
    LEARNED_DELETE: "LEARNED DELETE",
}


@dataclass
class PipelineConfig:
    hand_choose: list = field(default_factory=list)
    hand_delete: list = field(default_factory=list)
    learned_choose: list = field(default_factory=list)
    learned_delete: list = field(default_factory=list)
    masks: object = NO_MASK
    template: object = IDENTITY_TEMPLATE
    delete_template: object = IDENTITY_TEMPLATE
    ctxstats: CtxStatsConfig = field(default_factory=CtxStatsConfig)
    steps: tuple = STEPS
    # repeat the whole procedure until nothing changes, so that a second
    # run on the output is a no-op
    until_fixpoint: bool = True


def run_step(corpus, step, cfg: PipelineConfig):
    """Run one named step on ``corpus`` in place."""
    if step == HAND_CHOOSE:
        run_pass(corpus, cfg.hand_choose, Mode.ANY_PARSE)
    elif step == HAND_DELETE:
        run_pass(corpus, cfg.hand_delete, Mode.UNAMBIGUOUS)
    elif step == CTXSTATS:
        prune_by_context_stats(corpus, cfg.ctxstats, keyer=Keyer(cfg.delete_template, cfg.masks))
    elif step == LEARNED_CHOOSE:
        run_pass(corpus, cfg.learned_choose, Mode.UNAMBIGUOUS, stem_rc=True,
                 keyer=Keyer(cfg.template, cfg.masks))
    elif step == LEARNED_DELETE:
        run_pass(corpus, cfg.learned_delete, Mode.UNAMBIGUOUS, stem_rc=True,
                 keyer=Keyer(cfg.delete_template, cfg.masks))
    else:
        raise ValueError(f"unknown pipeline step {step!r}")


def disambiguate_staged(corpus, cfg=None):
    """Disambiguate a copy of ``corpus``.

    Returns the result and a list of ``(stage name, snapshot)`` pairs: the
    input, the state after each step of the first round, and a final
    ``FIXPOINT`` entry when further rounds removed more parses.
    """
    cfg = cfg or PipelineConfig()
    c = corpus.copy()
    stages = [(STAGE_NAMES[None], corpus.copy())]
    first = True
    while True:
        before = c.n_parses
        for step in cfg.steps:
            run_step(c, step, cfg)
            if first:
                stages.append((STAGE_NAMES.get(step, step.upper()), c.copy()))
        first = False
        # steps only ever remove parses, so an equal count means no change
        if not cfg.until_fixpoint or c.n_parses == before:
            break
    if c.n_parses < stages[-1][1].n_parses:
        stages.append(("FIXPOINT", c.copy()))
    return c, stages


def disambiguate(corpus, cfg=None):
    return disambiguate_staged(corpus, cfg)[0]


# --------------------------------------------------------------------------
# Evaluation


class AlignmentError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class EvalReport:
    tokens: int = 0
    parses: int = 0
    correct: int = 0
    sentences: int = 0
    unambiguous_correct: int = 0
    ambiguous_correct: int = 0
    # sentences with exactly 1, 2, 3 and more than 3 wrong tokens
    wrong: tuple = (0, 0, 0, 0)

    @property
    def ambiguity(self) -> float:
        return self.parses / self.tokens if self.tokens else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.tokens if self.tokens else 0.0

    @property
    def precision(self) -> float:
        return self.correct / self.parses if self.parses else 0.0

    def pct(self, n) -> float:
        return 100.0 * n / self.sentences if self.sentences else 0.0

    def as_dict(self) -> dict:
        d = {
            "tokens": self.tokens, "parses": self.parses, "correct": self.correct,
            "ambiguity": f"{self.ambiguity:.3f}", "recall": f"{100 * self.recall:.2f}",
            "precision": f"{100 * self.precision:.2f}", "sentences": self.sentences,
            "ua_c": self.unambiguous_correct, "a_c": self.ambiguous_correct,
            "c": self.unambiguous_correct + self.ambiguous_correct,
        }
        for label, n in zip(("wrong1", "wrong2", "wrong3", "wrong_gt3"), self.wrong):
            d[label] = n
        return d


def _project_all(parses, keyer):
    return {keyer.focus(p) for p in parses}


def evaluate(pred, gold, keyer=None) -> EvalReport:
    """Compare ``pred`` against a single-parse ``gold`` corpus.

    With ``keyer`` both sides are compared after projection.
    """
    if len(pred.sentences) != len(gold.sentences):
        raise AlignmentError(f"{len(pred.sentences)} predicted sentences, "
                             f"{len(gold.sentences)} gold sentences")
    r = EvalReport()
    wrong = [0, 0, 0, 0]
    for ps, gs in zip(pred.sentences, gold.sentences):
        if len(ps) != len(gs):
            raise AlignmentError(f"sentence has {len(ps)} tokens, gold has {len(gs)}",
                                 gs.tokens[0].line or ps.tokens[0].line)
        r.sentences += 1
        n_wrong = 0
        ambiguous = False
        for pt, gt in zip(ps.tokens, gs.tokens):
            if pt.surface != gt.surface:
                raise AlignmentError(f"surface {pt.surface!r} does not match gold {gt.surface!r}",
                                     gt.line or pt.line)
            g = gt.parses[0]
            if keyer is None:
                ok = g in pt.parses
            else:
                ok = keyer.focus(g) in _project_all(pt.parses, keyer)
            r.tokens += 1
            r.parses += len(pt.parses)
            r.correct += ok
            n_wrong += not ok
            ambiguous |= len(pt.parses) > 1
        if n_wrong == 0:
            if ambiguous:
                r.ambiguous_correct += 1
            else:
                r.unambiguous_correct += 1
        else:
            wrong[min(n_wrong, 4) - 1] += 1
    r.wrong = tuple(wrong)
    return r


def format_stage_table(rows) -> str:
    """``rows`` is ``[(stage name, EvalReport)]``."""
    lines = [f"{'Disambiguation Stage':<22}{'Ambiguity':>10}{'Recall (%)':>12}{'Pre. (%)':>10}"]
    for name, rep in rows:
        lines.append(f"{name:<22}{rep.ambiguity:>10.3f}{100 * rep.recall:>12.2f}"
                     f"{100 * rep.precision:>10.2f}")
    return "\n".join(lines) + "\n"


def format_sentence_table(rep: EvalReport) -> str:
    def cell(n):
        return f"{n} ({rep.pct(n):.2f}%)"

    head = ["Total", "UA/C", "A/C", "C (UA/C+A/C)", "1", "2", "3", ">3"]
    vals = [str(rep.sentences), cell(rep.unambiguous_correct), cell(rep.ambiguous_correct),
            cell(rep.unambiguous_correct + rep.ambiguous_correct)] + [cell(n) for n in rep.wrong]
    return "\t".join(head) + "\n" + "\t".join(vals) + "\n"


def format_report(rep: EvalReport, stages=None) -> str:
    rows = stages if stages else [("RESULT", rep)]
    out = [format_stage_table(rows), format_sentence_table(rep)]
    out.append("".join(f"{k}={v}\n" for k, v in rep.as_dict().items()))
    return "\n".join(out)
