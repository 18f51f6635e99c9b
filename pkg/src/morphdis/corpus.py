"""Analyzed-corpus files, tokens and two-token collocation grouping.

File layout (UTF-8)::

    # comment line
    surface<TAB>[[CAT ..][ROOT ..]...]<TAB>[[...]]...[<TAB># origin]
    ...
    <blank line between sentences>
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum

from .featstruct import (
    CAT,
    ROOT,
    FeatureStructure,
    FormatError,
    format_parse,
    linearize,
    parse_constraint,
    parse_structure,
    hierarchize,
    LinearParse,
    parse_linear,
    subsumes,
)

log = logging.getLogger(__name__)


class Origin(str, Enum):
    ANALYZER = "analyzer"
    UNKNOWN = "unknown-guesser"
    COLLOCATION = "collocation"


@dataclass(frozen=True)
class Token:
    surface: str
    parses: tuple[FeatureStructure, ...]
    origin: Origin = Origin.ANALYZER
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.parses:
            raise ValueError(f"token {self.surface!r} has no parses")
        if len(set(self.parses)) != len(self.parses):
            raise ValueError(f"token {self.surface!r} has duplicate parses")

    @property
    def ambiguous(self) -> bool:
        return len(self.parses) > 1

    def with_parses(self, parses) -> Token:
        return Token(self.surface, tuple(parses), self.origin, self.line)


@dataclass
class Sentence:
    tokens: list[Token]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("empty sentence")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


@dataclass
class Corpus:
    sentences: list[Sentence] = field(default_factory=list)
    provenance: str = field(default="", compare=False)
    warnings: list[str] = field(default_factory=list, compare=False)

    def tokens(self):
        for s in self.sentences:
            yield from s.tokens

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    @property
    def n_parses(self) -> int:
        return sum(len(t.parses) for s in self.sentences for t in s.tokens)

    def copy(self) -> Corpus:
        return Corpus([Sentence(list(s.tokens)) for s in self.sentences],
                      self.provenance, list(self.warnings))


def unknown_parse(surface) -> FeatureStructure:
    return FeatureStructure([(CAT, "UNKNOWN"), (ROOT, _safe_root(surface))])


def _safe_root(surface):
    root = re.sub(r"[\s\[\],=:'\"#]", "_", surface)
    return root or "_"


def decode_corpus(stream, lexicon=None, source="<corpus>") -> Corpus:
    """Read a corpus.  ``stream`` is text or an iterable of lines.

    Tokens without parses go through the unknown-word guesser when a suffix
    lexicon is given; otherwise they get a single ``[CAT UNKNOWN]`` parse
    and a warning is recorded.
    """
    from .unknown import guess

    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in stream]
    corpus = Corpus(provenance=str(source))
    current = []

    def flush():
        if current:
            corpus.sentences.append(Sentence(list(current)))
            current.clear()

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#") and "\t" not in line:
            continue
        fields = line.split("\t")
        surface = fields[0]
        origin = Origin.ANALYZER
        if len(fields) > 1 and fields[-1].startswith("#"):
            tag = fields.pop()[1:].strip()
            try:
                origin = Origin(tag)
            except ValueError:
                raise FormatError(f"unknown origin comment {tag!r}", lineno, source) from None
        if not surface:
            raise FormatError("empty surface form", lineno, source)
        parses = []
        for text in fields[1:]:
            if not text.strip():
                continue
            try:
                fs = parse_structure(text)
            except FormatError as e:
                raise FormatError(e.message, lineno, source) from None
            if fs in parses:
                corpus.warnings.append(f"{source}:{lineno}: duplicate parse dropped")
                continue
            parses.append(fs)
        if not parses:
            if lexicon is not None:
                parses = list(guess(surface, lexicon))
            if not parses:
                parses = [unknown_parse(surface)]
                msg = f"{source}:{lineno}: no parses for {surface!r}, marked UNKNOWN"
                corpus.warnings.append(msg)
                log.warning(msg)
            origin = Origin.UNKNOWN
        current.append(Token(surface, tuple(parses), origin, lineno))
    flush()
    return corpus


def encode_token(t: Token) -> str:
    fields = [t.surface] + [format_parse(p) for p in t.parses]
    if t.origin is not Origin.ANALYZER:
        fields.append(f"# {t.origin.value}")
    return "\t".join(fields)


def encode_corpus(c: Corpus) -> str:
    blocks = []
    for s in c.sentences:
        blocks.append("\n".join(encode_token(t) for t in s.tokens))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def read_corpus(path, lexicon=None) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return decode_corpus(fh.read(), lexicon, source=path)


def write_corpus(c: Corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(encode_corpus(c))


# --------------------------------------------------------------------------
# Collocations


class Duplication(str, Enum):
    NONE = "none"
    EQUAL_ROOT = "equal-root"
    EQUAL_ROOT_OPPOSITE_SENSE = "equal-root-opposite-sense"


def _root(f):
    return f.innermost().get(ROOT)


def _sense(f):
    return f.innermost().get("SENSE")


@dataclass(frozen=True)
class CollocationPattern:
    """Two positional constraints, a duplication test and an output template.

    The output template is a list of items: ``"$1"``/``"$2"`` stand for the
    linear entries of the first/second matched parse, anything else is a
    fixed entry such as ``("CONV", "ADVERB", "DUP1")``.
    """

    first: FeatureStructure
    second: FeatureStructure
    predicate: Duplication
    output: tuple

    def holds(self, p1, p2) -> bool:
        if self.predicate is Duplication.NONE:
            return True
        r1, r2 = _root(p1), _root(p2)
        if r1 is None or r1 != r2:
            return False
        if self.predicate is Duplication.EQUAL_ROOT_OPPOSITE_SENSE:
            s1, s2 = _sense(p1), _sense(p2)
            return s1 is not None and s2 is not None and s1 != s2
        return True

    def fill(self, p1, p2) -> FeatureStructure:
        entries = []
        for item in self.output:
            if item == "$1":
                entries.extend(linearize(p1).entries)
            elif item == "$2":
                entries.extend(linearize(p2).entries)
            else:
                entries.append(item)
        return hierarchize(LinearParse(tuple(entries)))

    def match(self, t1: Token, t2: Token):
        """First (p1, p2) pair in parse order satisfying the pattern, or None."""
        for p1 in t1.parses:
            if not subsumes(self.first, p1):
                continue
            for p2 in t2.parses:
                if subsumes(self.second, p2) and self.holds(p1, p2):
                    return p1, p2
        return None


_SLOT_RE = re.compile(r"\$[12]|\[[^\[\]]*\]")


def parse_output_template(text: str) -> tuple:
    items = []
    pos = 0
    for m in _SLOT_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise FormatError(f"unexpected text in output template: {text[pos:m.start()]!r}")
        pos = m.end()
        tok = m.group(0)
        if tok.startswith("$"):
            items.append(tok)
        else:
            entry = parse_linear("[" + tok + "]").entries[0]
            items.append(entry)
    if text[pos:].strip():
        raise FormatError(f"unexpected text in output template: {text[pos:]!r}")
    if not items:
        raise FormatError("empty output template")
    return tuple(items)


def format_output_template(items) -> str:
    return " ".join(i if isinstance(i, str) else "[" + " ".join(i) + "]" for i in items)


def read_patterns(text: str, source="<patterns>") -> list[CollocationPattern]:
    """One pattern per line: constraint TAB constraint TAB predicate TAB template."""
    patterns = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in raw.split("\t") if f.strip()]
        if len(fields) != 4:
            raise FormatError("pattern needs 4 TAB-separated fields", lineno, source)
        try:
            pred = Duplication(fields[2])
        except ValueError:
            raise FormatError(f"unknown predicate {fields[2]!r}", lineno, source) from None
        try:
            pat = CollocationPattern(parse_constraint(fields[0]), parse_constraint(fields[1]),
                                     pred, parse_output_template(fields[3]))
        except FormatError as e:
            raise FormatError(e.message, lineno, source) from None
        patterns.append(pat)
    return patterns


def group_collocations(s: Sentence, patterns) -> Sentence:
    """Greedy left-to-right merge of adjacent token pairs; file order is priority."""
    out = []
    tokens = s.tokens
    i = 0
    while i < len(tokens):
        merged = None
        if i + 1 < len(tokens):
            for pat in patterns:
                hit = pat.match(tokens[i], tokens[i + 1])
                if hit is not None:
                    merged = Token(f"{tokens[i].surface} {tokens[i + 1].surface}",
                                   (pat.fill(*hit),), Origin.COLLOCATION, tokens[i].line)
                    break
        if merged is not None:
            out.append(merged)
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return Sentence(out)


def preprocess(c: Corpus, patterns=(), jobs=1) -> Corpus:
    """Collocation grouping over a whole corpus (unknowns are guessed on decode)."""
    patterns = list(patterns)
    if jobs > 1 and len(c.sentences) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            sentences = list(pool.map(group_collocations, c.sentences,
                                      [patterns] * len(c.sentences), chunksize=64))
    else:
        sentences = [group_collocations(s, patterns) for s in c.sentences]
    out = Corpus(sentences, c.provenance, list(c.warnings))
    return out


__all__ = [
    "Origin", "Token", "Sentence", "Corpus", "decode_corpus", "encode_corpus",
    "read_corpus", "write_corpus", "CollocationPattern", "Duplication",
    "read_patterns", "group_collocations", "preprocess", "unknown_parse",
]
