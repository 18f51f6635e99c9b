"""Feature structures for morphological parses.

A parse arrives as a flat sequence of ``[NAME VALUE]`` entries in which
``[CONV CAT SUFFIX]`` entries mark category-changing derivations.  It is
turned into a nested structure where every derivation opens a new outer
level whose ``STEM`` is the structure derived from, so the features of the
final category sit at the top.

The same class doubles as a *constraint*: a partial description that
matches (subsumes) any structure agreeing on every feature it names.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

STEM = "STEM"
CAT = "CAT"
ROOT = "ROOT"
SUFFIX = "SUFFIX"
CONV = "CONV"

_NAME_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")
_BAD_VALUE_CHARS = frozenset(" \t\r\n[],=:'\"#")


class FormatError(ValueError):
    """Raised for malformed parses, constraints, rules and data files."""

    def __init__(self, message, line=None, source=None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += str(source)
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


def _check_value(value):
    if not value or any(ch in _BAD_VALUE_CHARS for ch in value):
        raise FormatError(f"illegal feature value {value!r}")


class FeatureStructure(Mapping):
    """Immutable, ordered attribute-value record.

    Values are atomic strings, except under ``STEM`` where the value is
    another ``FeatureStructure``.  Equality and hashing are structural and
    ignore insertion order.
    """

    __slots__ = ("_items", "_key", "_hash")

    def __init__(self, items: Iterable[tuple[str, object]] | Mapping = ()):
        if isinstance(items, Mapping):
            items = items.items()
        data = {}
        for name, value in items:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise FormatError(f"illegal feature name {name!r}")
            if name in data:
                raise FormatError(f"duplicate feature {name} in one level")
            if isinstance(value, FeatureStructure):
                if name != STEM:
                    raise FormatError(f"nested value only allowed under STEM, not {name}")
            elif isinstance(value, str):
                if name == STEM:
                    raise FormatError("STEM must hold a feature structure")
                _check_value(value)
            else:
                raise FormatError(f"bad value type for {name}: {type(value).__name__}")
            data[name] = value
        self._items = data
        self._key = None
        self._hash = None

    def __getitem__(self, name):
        return self._items[name]

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FeatureStructure):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    @property
    def key(self) -> str:
        if self._key is None:
            self._key = canonical_key(self)
        return self._key

    @property
    def stem(self) -> FeatureStructure | None:
        return self._items.get(STEM)

    @property
    def is_derived(self) -> bool:
        return STEM in self._items

    def depth(self) -> int:
        """Number of nested STEM levels below this one."""
        n, level = 0, self.stem
        while level is not None:
            n += 1
            level = level.stem
        return n

    def innermost(self) -> FeatureStructure:
        level = self
        while level.stem is not None:
            level = level.stem
        return level

    def replace(self, **changes) -> FeatureStructure:
        """Copy with features set (value) or removed (None); order kept."""
        items = [(k, changes.pop(k) if k in changes else v) for k, v in self._items.items()]
        items.extend(changes.items())
        return FeatureStructure((k, v) for k, v in items if v is not None)

    def without(self, names) -> FeatureStructure:
        return FeatureStructure((k, v) for k, v in self._items.items() if k not in names)

    def __repr__(self):
        return f"FeatureStructure({format_structure(self)})"


# Constraints share the representation; every feature is optional.
FeatureConstraint = FeatureStructure

EMPTY = FeatureStructure()


def canonical_key(f: FeatureStructure) -> str:
    """Order-independent serialization; equal structures give equal keys."""
    parts = []
    for name in sorted(f):
        value = f[name]
        if isinstance(value, FeatureStructure):
            parts.append(f"{name}={canonical_key(value)}")
        else:
            parts.append(f"{name}={value}")
    return "[" + ",".join(parts) + "]"


def subsumes(c: FeatureStructure, f: FeatureStructure) -> bool:
    """True iff every feature of ``c`` is present in ``f`` with an equal value."""
    items = f._items
    for name, value in c._items.items():
        other = items.get(name)
        if other is None:
            return False
        if isinstance(value, FeatureStructure):
            if not isinstance(other, FeatureStructure) or not subsumes(value, other):
                return False
        elif value != other:
            return False
    return True


def format_structure(f: FeatureStructure) -> str:
    """Human-readable one-line rendering, insertion order kept."""
    parts = []
    for name, value in f.items():
        if isinstance(value, FeatureStructure):
            parts.append(f"{name} {format_structure(value)}")
        else:
            parts.append(f"{name} {value}")
    return "[" + ", ".join(parts) + "]"


# --------------------------------------------------------------------------
# Linear parses


@dataclass(frozen=True)
class LinearParse:
    """Flat analyzer output: ``(name, value)`` entries, CONV with two values."""

    entries: tuple[tuple[str, ...], ...]

    def __str__(self):
        return "[" + "".join("[" + " ".join(e) + "]" for e in self.entries) + "]"


_PARSE_TOKEN_RE = re.compile(r"\[|\]|[^\s\[\]]+")


def parse_linear(text: str) -> LinearParse:
    """Read ``[[CAT VERB][ROOT gel]...[CONV ADJ REL]]``."""
    toks = _PARSE_TOKEN_RE.findall(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            got = toks[pos] if pos < len(toks) else "end of input"
            raise FormatError(f"expected {tok!r} in parse, got {got!r}")
        pos += 1

    expect("[")
    entries = []
    while pos < len(toks) and toks[pos] == "[":
        pos += 1
        entry = []
        while pos < len(toks) and toks[pos] not in "[]":
            entry.append(toks[pos])
            pos += 1
        expect("]")
        entries.append(tuple(entry))
    expect("]")
    if pos != len(toks):
        raise FormatError(f"trailing text after parse: {' '.join(toks[pos:])!r}")
    if not entries:
        raise FormatError("empty parse")
    for entry in entries:
        if not entry:
            raise FormatError("empty entry in parse")
        if entry[0] == CONV:
            if len(entry) != 3:
                raise FormatError(f"CONV needs a category and a suffix label: {list(entry)}")
        elif len(entry) != 2:
            raise FormatError(f"entry must be [NAME VALUE]: {list(entry)}")
    return LinearParse(tuple(entries))


def hierarchize(p: LinearParse) -> FeatureStructure:
    """Nest a linear parse so the last derivation's features are on top."""
    entries = p.entries
    if len(entries) < 2 or entries[0][0] != CAT or entries[1][0] != ROOT:
        raise FormatError(f"parse must begin with CAT and ROOT entries: {p}")
    level = []
    for entry in entries:
        if entry[0] == CONV:
            if len(entry) != 3:
                raise FormatError(f"malformed CONV entry {list(entry)}")
            stem = FeatureStructure(level)
            level = [(CAT, entry[1]), (SUFFIX, entry[2]), (STEM, stem)]
        else:
            if len(entry) != 2:
                raise FormatError(f"malformed entry {list(entry)}")
            if entry[0] in (STEM, SUFFIX) and any(k == entry[0] for k, _ in level):
                raise FormatError(f"duplicate {entry[0]} in one level")
            level.append((entry[0], entry[1]))
    return FeatureStructure(level)


def linearize(f: FeatureStructure) -> LinearParse:
    """Inverse of :func:`hierarchize`."""
    entries = []
    if f.is_derived:
        if SUFFIX not in f or CAT not in f:
            raise FormatError(f"derived level lacks CAT or SUFFIX: {format_structure(f)}")
        entries.extend(linearize(f.stem).entries)
        entries.append((CONV, f[CAT], f[SUFFIX]))
        skip = (CAT, SUFFIX, STEM)
    else:
        skip = ()
    for name, value in f.items():
        if name not in skip:
            entries.append((name, value))
    return LinearParse(tuple(entries))


def parse_structure(text: str) -> FeatureStructure:
    return hierarchize(parse_linear(text))


def format_parse(f: FeatureStructure) -> str:
    return str(linearize(f))


# --------------------------------------------------------------------------
# Constraint syntax: [cat:noun, case:abl, stem:[cat:verb]]
#
# Names are case-insensitive.  Unquoted values are upper-cased, except ROOT
# values which are kept verbatim; quoted values ('NONE', '2SG') are verbatim.

_CONSTRAINT_TOKEN_RE = re.compile(r"\s*(?:(\[)|(\])|(:)|(,)|'([^']*)'|([^\s\[\],:']+))")


def _constraint_tokens(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _CONSTRAINT_TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormatError(f"unexpected character {text[pos]!r} in constraint {text!r}")
        pos = m.end()
        if m.group(5) is not None:
            out.append(("quoted", m.group(5)))
        elif m.group(6) is not None:
            out.append(("word", m.group(6)))
        else:
            out.append(("punct", m.group(0).strip()))
    return out


class _ConstraintReader:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def punct(self, ch):
        kind, value = self.next()
        if kind != "punct" or value != ch:
            raise FormatError(f"expected {ch!r} in constraint, got {value!r}")

    def constraint(self):
        self.punct("[")
        items = []
        if self.peek() == ("punct", "]"):
            self.next()
            return FeatureStructure()
        while True:
            kind, name = self.next()
            if kind != "word":
                raise FormatError(f"expected feature name, got {name!r}")
            name = name.upper()
            self.punct(":")
            if name == STEM:
                items.append((name, self.constraint()))
            else:
                kind, value = self.next()
                if kind == "quoted":
                    items.append((name, value))
                elif kind == "word":
                    items.append((name, value if name == ROOT else value.upper()))
                else:
                    raise FormatError(f"expected value for {name.lower()}, got {value!r}")
            kind, value = self.next()
            if (kind, value) == ("punct", "]"):
                return FeatureStructure(items)
            if (kind, value) != ("punct", ","):
                raise FormatError(f"expected ',' or ']' in constraint, got {value!r}")


def parse_constraint(text: str) -> FeatureStructure:
    reader = _ConstraintReader(_constraint_tokens(text))
    c = reader.constraint()
    if reader.pos != len(reader.toks):
        raise FormatError(f"trailing text after constraint {text!r}")
    return c


_PLAIN_VALUE_RE = re.compile(r"^[A-Z][A-Z0-9_-]*$")
_PLAIN_ROOT_RE = re.compile(r"^[^\s\[\],:'A-Z0-9][^\s\[\],:']*$")


def _format_value(name, value):
    if name == ROOT:
        return value if _PLAIN_ROOT_RE.match(value) and value.lower() == value else f"'{value}'"
    if _PLAIN_VALUE_RE.match(value):
        return value.lower()
    return f"'{value}'"


def format_constraint(c: FeatureStructure) -> str:
    parts = []
    for name, value in c.items():
        if isinstance(value, FeatureStructure):
            parts.append(f"{name.lower()}:{format_constraint(value)}")
        else:
            parts.append(f"{name.lower()}:{_format_value(name, value)}")
    return "[" + ",".join(parts) + "]"


# --------------------------------------------------------------------------
# Projection templates and relevance masks


@dataclass(frozen=True)
class ProjectionTemplate:
    """Per-category feature selection.

    ``levels`` maps a CAT value to ``(kept feature names, recurse into
    STEM)``.  Categories not listed use ``default``; a ``None`` feature set
    keeps every feature.
    """

    levels: Mapping[str, tuple[frozenset | None, bool]] = field(default_factory=dict)
    default: tuple[frozenset | None, bool] = (None, True)

    def for_cat(self, cat):
        return self.levels.get(cat, self.default)

    def __hash__(self):
        return hash((tuple(sorted(self.levels.items(), key=lambda kv: kv[0])), self.default))


IDENTITY_TEMPLATE = ProjectionTemplate()


def project(f: FeatureStructure, t: ProjectionTemplate) -> FeatureStructure:
    keep, recurse = t.for_cat(f.get(CAT))
    items = []
    for name, value in f.items():
        if name == STEM:
            if recurse:
                items.append((name, project(value, t)))
        elif name == CAT or keep is None or name in keep:
            items.append((name, value))
    return FeatureStructure(items)


def read_templates(text: str, source=None) -> ProjectionTemplate:
    """Template file: ``CAT: NAME NAME ... [+stem]`` per line, ``*`` is the default.

    ``CAT: *`` keeps every feature at that category.
    """
    levels = {}
    default = (None, True)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError("expected 'CAT: features'", lineno, source)
        cat, rest = line.split(":", 1)
        cat = cat.strip()
        words = rest.split()
        recurse = "+stem" in words
        names = [w for w in words if w != "+stem"]
        if names == ["*"]:
            keep = None
        else:
            for n in names:
                if not _NAME_RE.match(n) or n in (STEM,):
                    raise FormatError(f"illegal feature name {n!r} in template", lineno, source)
            keep = frozenset(names)
        if cat == "*":
            default = (keep, recurse)
        else:
            if not _NAME_RE.match(cat) and not _PLAIN_VALUE_RE.match(cat):
                raise FormatError(f"illegal category {cat!r}", lineno, source)
            levels[cat] = (keep, recurse)
    return ProjectionTemplate(levels, default)


POSITIONS = ("llc", "lc", "rc", "rrc", "focus")


@dataclass(frozen=True)
class RelevanceMask:
    """Features dropped (top level only) when keying each window position."""

    drop: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        for pos in self.drop:
            if pos not in POSITIONS:
                raise FormatError(f"unknown mask position {pos!r}")

    def at(self, pos) -> frozenset:
        return self.drop.get(pos, frozenset())

    def apply(self, f: FeatureStructure, pos) -> FeatureStructure:
        names = self.drop.get(pos)
        if not names or not any(n in f for n in names):
            return f
        return f.without(names)

    def __hash__(self):
        return hash(tuple(sorted(self.drop.items())))


NO_MASK = RelevanceMask()


def read_masks(text: str, source=None) -> RelevanceMask:
    """Mask file: ``position: NAME NAME ...`` per line."""
    drop = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError("expected 'position: features'", lineno, source)
        pos, rest = line.split(":", 1)
        pos = pos.strip().lower()
        if pos not in POSITIONS:
            raise FormatError(f"unknown position {pos!r}", lineno, source)
        names = rest.split()
        for n in names:
            if not _NAME_RE.match(n):
                raise FormatError(f"illegal feature name {n!r}", lineno, source)
        drop[pos] = frozenset(names) | drop.get(pos, frozenset())
    return RelevanceMask(drop)


def collapse(parses, t: ProjectionTemplate):
    """Group parses by projection.

    Returns ``[(projected, [indices of original parses]), ...]`` in order of
    first occurrence.
    """
    groups = {}
    for i, p in enumerate(parses):
        groups.setdefault(project(p, t), []).append(i)
    return list(groups.items())
