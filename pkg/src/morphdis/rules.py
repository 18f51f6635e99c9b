"""Choose/delete constraint rules over a five-token window.

A rule looks at up to two tokens on each side of an ambiguous token
(``llc lc _ rc rrc``) and either keeps (choose) or removes (delete) the
parses of that token subsumed by its target constraint::

    [llc:[ ],lc:[ ],choose:[case:abl],rc:[[cat:postp,subcat:abl]],rrc:[ ]]

``[ ]`` leaves a position unused; ``[boundary]`` only matches outside the
sentence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .featstruct import (
    STEM,
    FeatureStructure,
    FormatError,
    _ConstraintReader,
    _constraint_tokens,
    format_constraint,
    subsumes,
)

CONTEXT_POSITIONS = ("llc", "lc", "rc", "rrc")
OFFSETS = {"llc": -2, "lc": -1, "rc": 1, "rrc": 2}


class _Boundary:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOUNDARY"

    def __reduce__(self):
        return (_Boundary, ())


BOUNDARY = _Boundary()


class Action(str, Enum):
    CHOOSE = "choose"
    DELETE = "delete"


class Provenance(str, Enum):
    HAND_CHOOSE = "hand-choose"
    HAND_DELETE = "hand-delete"
    LEARNED_CHOOSE = "learned-choose"
    LEARNED_DELETE = "learned-delete"


class Mode(str, Enum):
    UNAMBIGUOUS = "unambiguous-only"
    ANY_PARSE = "any-parse"


# Context shapes by specificity rank.  The two three-position shapes do not
# appear in the learner's enumeration but occur in hand-written rules.
SHAPES = {
    ("llc", "lc", "rc", "rrc"): 1,
    ("llc", "lc"): 2,
    ("rc", "rrc"): 2,
    ("llc", "lc", "rc"): 2,
    ("lc", "rc", "rrc"): 2,
    ("lc", "rc"): 3,
    ("lc",): 4,
    ("rc",): 4,
}


def specificity(shape) -> int:
    try:
        return SHAPES[tuple(shape)]
    except KeyError:
        raise ValueError(f"unsupported context shape {shape}") from None


@dataclass(frozen=True)
class Rule:
    llc: object = None
    lc: object = None
    rc: object = None
    rrc: object = None
    action: Action = Action.CHOOSE
    target: FeatureStructure = field(default_factory=FeatureStructure)
    provenance: Provenance = Provenance.HAND_CHOOSE
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.target:
            raise ValueError("rule target must not be empty")
        specificity(self.shape)

    @property
    def shape(self) -> tuple[str, ...]:
        return tuple(p for p in CONTEXT_POSITIONS if getattr(self, p) is not None)

    @property
    def rank(self) -> int:
        return specificity(self.shape)

    def context(self):
        """(position, constraint) pairs for the positions in use."""
        return [(p, getattr(self, p)) for p in CONTEXT_POSITIONS if getattr(self, p) is not None]

    def __str__(self):
        return encode_rule(self)


# --------------------------------------------------------------------------
# Rule file syntax


def _format_ctx(c):
    if c is None:
        return "[ ]"
    if c is BOUNDARY:
        return "[boundary]"
    return "[" + format_constraint(c) + "]"


def encode_rule(r: Rule, with_comment=False) -> str:
    text = (f"[llc:{_format_ctx(r.llc)},lc:{_format_ctx(r.lc)},"
            f"{r.action.value}:{format_constraint(r.target)},"
            f"rc:{_format_ctx(r.rc)},rrc:{_format_ctx(r.rrc)}]")
    if with_comment and r.comment:
        text += f"  # {r.comment}"
    return text


def encode_rules(rules) -> str:
    return "".join(encode_rule(r, with_comment=True) + "\n" for r in rules)


class _RuleReader(_ConstraintReader):
    def context(self):
        self.punct("[")
        kind, value = self.peek()
        if (kind, value) == ("punct", "]"):
            self.next()
            return None
        if (kind, value) == ("word", "boundary"):
            self.next()
            self.punct("]")
            return BOUNDARY
        c = self.constraint()
        self.punct("]")
        return c

    def record(self):
        self.punct("[")
        fields = {}
        action = target = None
        while True:
            kind, name = self.next()
            if kind != "word":
                raise FormatError(f"expected field name in rule, got {name!r}")
            name = name.lower()
            self.punct(":")
            if name in OFFSETS:
                if name in fields:
                    raise FormatError(f"duplicate {name} field")
                fields[name] = self.context()
            elif name in ("choose", "delete"):
                if action is not None:
                    raise FormatError("rule has more than one action")
                action = Action(name)
                target = self.constraint()
            else:
                raise FormatError(f"unknown rule field {name!r}")
            kind, value = self.next()
            if (kind, value) == ("punct", "]"):
                break
            if (kind, value) != ("punct", ","):
                raise FormatError(f"expected ',' or ']' in rule, got {value!r}")
        if action is None:
            raise FormatError("rule has no choose/delete field")
        return fields, action, target


def _split_records(text, source):
    """Return [(line number, record text, trailing comment)]."""
    records = []
    depth = 0
    buf = []
    start = None
    for lineno, line in enumerate(text.splitlines(), 1):
        body, comment = line, ""
        in_quote = False
        for k, ch in enumerate(line):
            if ch == "'":
                in_quote = not in_quote
            elif ch == "#" and not in_quote:
                body, comment = line[:k], line[k + 1:].strip()
                break
        closed_here = None
        for ch in body:
            if ch == "[":
                if depth == 0:
                    start = lineno
                depth += 1
            elif ch == "]":
                depth -= 1
                if depth < 0:
                    raise FormatError("unbalanced ']'", lineno, source)
            elif depth == 0 and ch not in " \t.,":
                raise FormatError(f"unexpected {ch!r} outside a rule record", lineno, source)
            if start is not None:
                buf.append(ch)
            if depth == 0 and start is not None:
                records.append([start, "".join(buf), ""])
                closed_here = records[-1]
                buf, start = [], None
        if start is not None:
            if comment:
                raise FormatError("comment inside a rule record", lineno, source)
            buf.append(" ")
        if closed_here is not None and comment:
            closed_here[2] = comment
    if depth != 0:
        raise FormatError("unterminated rule record", start, source)
    return records


def decode_rules(text: str, provenance=None, source="<rules>") -> list[Rule]:
    """Parse a rule file.

    ``provenance`` defaults to hand-choose/hand-delete by action, unless a
    trailing ``# learned-...`` comment says otherwise.
    """
    rules = []
    for lineno, body, comment in _split_records(text, source):
        try:
            reader = _RuleReader(_constraint_tokens(body))
            fields, action, target = reader.record()
            if reader.pos != len(reader.toks):
                raise FormatError("trailing text after rule")
            prov = provenance
            if prov is None:
                tag = comment.split()[0] if comment else ""
                if tag in (Provenance.LEARNED_CHOOSE.value, Provenance.LEARNED_DELETE.value):
                    prov = tag
                elif action is Action.CHOOSE:
                    prov = Provenance.HAND_CHOOSE
                else:
                    prov = Provenance.HAND_DELETE
            rules.append(Rule(action=action, target=target, provenance=Provenance(prov),
                              comment=comment, **fields))
        except (FormatError, ValueError) as e:
            msg = e.message if isinstance(e, FormatError) else str(e)
            raise FormatError(msg, lineno, source) from None
    return rules


def read_rules(path, provenance=None) -> list[Rule]:
    with open(path, encoding="utf-8") as fh:
        return decode_rules(fh.read(), provenance, source=path)


def write_rules(rules, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(encode_rules(rules))


# --------------------------------------------------------------------------
# Matching and application


def is_unambiguous(token, keyer=None) -> bool:
    if keyer is None:
        return len(token.parses) == 1
    return len(keyer.view(token)) == 1


def _parse_matches(c, p, stem):
    if subsumes(c, p):
        return True
    return stem and STEM in p and subsumes(c, p[STEM])


def _viewer(keyer):
    return (lambda p: p) if keyer is None else keyer.focus


def match_position(c, token, mode=Mode.UNAMBIGUOUS, *, stem=False, keyer=None):
    """Match one context constraint against a token (``None`` = outside sentence).

    Returns ``(matched, parses)``.  In unambiguous-only mode the token must
    have a single parse (after projection when ``keyer`` is given) and every
    parse must be subsumed; in any-parse mode the subsumed parses are
    returned.  With ``stem`` a derived parse also matches through its stem,
    one level down.
    """
    if token is None:
        return c is BOUNDARY, ()
    if c is BOUNDARY:
        return False, ()
    see = _viewer(keyer)
    if mode is Mode.UNAMBIGUOUS:
        if not is_unambiguous(token, keyer):
            return False, ()
        if all(_parse_matches(c, see(p), stem) for p in token.parses):
            return True, token.parses
        return False, ()
    hits = tuple(p for p in token.parses if _parse_matches(c, see(p), stem))
    return bool(hits), hits


def apply_rule_at(sentence, i, rule: Rule, mode=Mode.UNAMBIGUOUS, *, stem_rc=False,
                  keyer=None) -> bool:
    """Try ``rule`` on token ``i``; the sentence is updated in place.

    Applies only when every context position matches and the target picks
    out a proper, non-empty subset of the token's parses.  With a keyer the
    target is tested against projected parses, so all full parses sharing a
    projection are kept or removed together.  In any-parse mode the
    ambiguous context tokens are cut down to their matching parses at the
    same time.  Returns whether anything changed.
    """
    tokens = sentence.tokens
    tok = tokens[i]
    parses = tok.parses
    if len(parses) < 2:
        return False
    see = _viewer(keyer)
    target = rule.target
    hit = [subsumes(target, see(p)) for p in parses]
    n_hit = sum(hit)
    if not n_hit or n_hit == len(parses):
        return False
    keep = rule.action is Action.CHOOSE
    new = [p for p, h in zip(parses, hit) if h == keep]
    reductions = {}
    n = len(tokens)
    for pos, c in rule.context():
        j = i + OFFSETS[pos]
        other = tokens[j] if 0 <= j < n else None
        ok, matched = match_position(c, other, mode, stem=stem_rc and pos == "rc", keyer=keyer)
        if not ok:
            return False
        if mode is Mode.ANY_PARSE and other is not None and len(matched) < len(other.parses):
            reductions[j] = matched
    tokens[i] = tok.with_parses(new)
    for j, matched in reductions.items():
        tokens[j] = tokens[j].with_parses(matched)
    return True


def run_pass(corpus, rules, mode=Mode.UNAMBIGUOUS, *, stem_rc=False, keyer=None) -> int:
    """Sweep the corpus until no rule applies anywhere; returns the number of applications.

    Works in place.  At each position the rules are tried in list order.
    """
    rules = list(rules)
    if not rules:
        return 0
    total = 0
    while True:
        changed = 0
        for sentence in corpus.sentences:
            tokens = sentence.tokens
            for i in range(len(tokens)):
                for rule in rules:
                    if len(tokens[i].parses) < 2:
                        break
                    if apply_rule_at(sentence, i, rule, mode, stem_rc=stem_rc, keyer=keyer):
                        changed += 1
        total += changed
        if not changed:
            return total
