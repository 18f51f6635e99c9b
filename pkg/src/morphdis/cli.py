"""morphdis command line.

Exit status: 0 on success, 1 on usage errors, 2 on missing files and
malformed or misaligned data.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .corpus import decode_corpus, encode_corpus, preprocess, read_patterns
from .featstruct import FormatError
from .learner import ChooseLearner, format_score, learn_delete, prepare
from .pipeline import (
    AlignmentError,
    PipelineConfig,
    disambiguate_staged,
    evaluate,
    format_report,
    format_stage_table,
)
from .rules import decode_rules, encode_rules
from .synthetic import SyntheticConfig, generate
from .tables import Keyer
from .unknown import read_lexicon

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _corpus(path, lexicon=None):
    from .config import read_text

    return decode_corpus(read_text(path), lexicon, source=path)


def _rules(path):
    from .config import read_text

    return decode_rules(read_text(path), source=path) if path else []


def _settings(args):
    from .config import load_settings

    return load_settings(args.config, args.templates, args.delete_templates, args.masks)


def cmd_preprocess(args):
    from .config import read_text

    lexicon = read_lexicon(read_text(args.suffixes), args.suffixes) if args.suffixes else None
    patterns = read_patterns(read_text(args.patterns), args.patterns) if args.patterns else []
    c = _corpus(args.corpus, lexicon)
    _write(args.out, encode_corpus(preprocess(c, patterns, args.jobs)))


def cmd_learn(args):
    s = _settings(args)
    train = _corpus(args.corpus)
    hc, hd = _rules(args.hand_choose), _rules(args.hand_delete)
    learner = ChooseLearner(prepare(train, hc, hd), s.sched, Keyer(s.template, s.masks))
    learner.run()
    deletes = learn_delete(train, learner.rules, hc, hd, s.delete, s.masks, s.template)
    lines = []
    for e in learner.log:
        lines.append(f"iter={e.iteration}\tscore={format_score(e.score)}\t"
                     f"thresholds={','.join(f'{t:.4g}' for t in e.thresholds)}\t"
                     f"changed={e.changed}\t{e.rule}")
    lines.append(f"damping_rounds={learner.damping_rounds}\tfinal_thresholds="
                 f"{','.join(f'{t:.4g}' for t in learner.thresholds)}")
    for d in learner.diagnostics:
        lines.append(f"warning: {d}")
    lines.append(f"choose_rules={len(learner.rules)}\tdelete_rules={len(deletes)}")
    text = "".join(x + "\n" for x in lines)
    if args.log:
        _write(args.log, text)
    else:
        sys.stderr.write(text)
    _write(args.learned_choose, encode_rules(learner.rules))
    _write(args.learned_delete, encode_rules(deletes))


def cmd_disambiguate(args):
    s = _settings(args)
    cfg = PipelineConfig(
        hand_choose=_rules(args.hand_choose), hand_delete=_rules(args.hand_delete),
        learned_choose=_rules(args.learned_choose), learned_delete=_rules(args.learned_delete),
        masks=s.masks, template=s.template, delete_template=s.delete.template,
        ctxstats=s.ctxstats)
    c = _corpus(args.corpus)
    out, stages = disambiguate_staged(c, cfg)
    _write(args.out, encode_corpus(out))
    if args.gold:
        gold = _corpus(args.gold)
        rows = [(name, evaluate(snap, gold)) for name, snap in stages]
        text = format_stage_table(rows)
        if args.out in (None, "-"):
            sys.stderr.write(text)
        else:
            sys.stdout.write(text)


def cmd_evaluate(args):
    rep = evaluate(_corpus(args.corpus), _corpus(args.gold))
    _write(args.out, format_report(rep))


def cmd_gen_synthetic(args):
    planted = _rules(args.rules)
    cfg = SyntheticConfig(sentences=args.sentences, seed=args.seed, ambiguous=args.ambiguous)
    c, g = generate(planted, cfg)
    _write(args.out, encode_corpus(c))
    if args.gold:
        _write(args.gold, encode_corpus(g))


def build_parser():
    p = _Parser(prog="morphdis", description="Rule-based morphological disambiguation.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, *flags):
        for f in flags:
            sp.add_argument(f"--{f}")

    sp = sub.add_parser("preprocess", help="group collocations and guess unknown words")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out")
    sp.add_argument("--patterns")
    sp.add_argument("--suffixes", help="suffix lexicon for unknown words (@turkish.suffixes)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_preprocess)

    sp = sub.add_parser("learn", help="learn choose and delete rules from a corpus")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--learned-choose", required=True)
    sp.add_argument("--learned-delete", required=True)
    sp.add_argument("--log", help="learning log (default stderr)", default=None)
    common(sp, "hand-choose", "hand-delete", "config", "templates", "delete-templates", "masks")
    sp.set_defaults(func=cmd_learn)

    sp = sub.add_parser("disambiguate", help="run the disambiguation pipeline")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out")
    common(sp, "gold", "hand-choose", "hand-delete", "learned-choose", "learned-delete",
           "config", "templates", "delete-templates", "masks")
    sp.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; runs serially")
    sp.set_defaults(func=cmd_disambiguate)

    sp = sub.add_parser("evaluate", help="score a disambiguated corpus against gold")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--gold", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("gen-synthetic", help="generate a corpus from planted rules")
    sp.add_argument("--rules", default="@planted.rules")
    sp.add_argument("--out")
    sp.add_argument("--gold")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sentences", type=int, default=500)
    sp.add_argument("--ambiguous", type=float, default=0.7)
    sp.set_defaults(func=cmd_gen_synthetic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (FormatError, AlignmentError) as e:
        print(f"morphdis: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"morphdis: error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"morphdis: error: {e}", file=sys.stderr)
        return 2
    return 0


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
