"""Nominal guesses for words the analyzer does not know.

Every unknown word is assumed to have a nominal root.  A guess splits the
surface into ``root + s1 + ... + sn`` where ``s1..sn`` is a chain of
suffix allomorphs taken from a :class:`SuffixLexicon`, in morphotactic
order.  Vowel harmony is only checked between suffixes, never between the
root and the first suffix (foreign roots are spelled by their own rules).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from importlib import resources

from .featstruct import CAT, ROOT, FeatureStructure, FormatError, LinearParse, hierarchize

DEFAULTS = (("AGR", "3SG"), ("POSS", "NONE"), ("CASE", "NOM"))

# Turkish graphemes; upper-case I/O/U follow the ASCII analyzer convention
# (dotless i, o-umlaut, u-umlaut).
_VOWELS = {
    # vowel: (front, rounded, high)
    "a": (False, False, False), "e": (True, False, False),
    "ı": (False, False, True), "I": (False, False, True),
    "i": (True, False, True), "o": (False, True, False),
    "ö": (True, True, False), "O": (True, True, False),
    "u": (False, True, True), "ü": (True, True, True), "U": (True, True, True),
}


def is_vowel(ch) -> bool:
    return ch in _VOWELS


def harmonizes(prev_vowel, next_vowel) -> bool:
    """Front/back agreement, plus rounding agreement when the next vowel is high."""
    f1, r1, _ = _VOWELS[prev_vowel]
    f2, r2, h2 = _VOWELS[next_vowel]
    if f1 != f2:
        return False
    return r1 == r2 if h2 else True


@dataclass(frozen=True)
class Allomorph:
    surface: str
    cls: str
    effects: tuple[tuple[str, str], ...] = ()
    after: str | None = None  # "vowel", "consonant" or None
    conv: tuple[str, str] | None = None  # opens a derived level (CAT, SUFFIX)

    @property
    def first_vowel(self):
        return next((ch for ch in self.surface if ch in _VOWELS), None)

    @property
    def last_vowel(self):
        return next((ch for ch in reversed(self.surface) if ch in _VOWELS), None)

    def attaches_after(self, ch) -> bool:
        if self.after == "vowel":
            return is_vowel(ch)
        if self.after == "consonant":
            return not is_vowel(ch)
        return True


@dataclass(frozen=True)
class SuffixLexicon:
    allomorphs: tuple[Allomorph, ...] = ()
    order: frozenset[tuple[str, str]] = frozenset()
    harmony: bool = True

    def __post_init__(self):
        for a in self.allomorphs:
            if not a.surface:
                raise FormatError("empty allomorph")
        closure = self.precedes
        for a, _ in closure:
            if (a, a) in closure:
                raise FormatError(f"suffix order has a cycle through {a}")

    @cached_property
    def precedes(self) -> frozenset[tuple[str, str]]:
        """Transitive closure of the ordering edges."""
        rel = set(self.order)
        while True:
            extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
            if not extra:
                return frozenset(rel)
            rel |= extra

    @cached_property
    def by_surface(self) -> dict[str, list[Allomorph]]:
        out = {}
        for a in self.allomorphs:
            out.setdefault(a.surface, []).append(a)
        return out

    @cached_property
    def max_len(self) -> int:
        return max((len(a.surface) for a in self.allomorphs), default=0)


EMPTY_LEXICON = SuffixLexicon()


def read_lexicon(text: str, source="<suffixes>", harmony=True) -> SuffixLexicon:
    """Parse a suffix lexicon.

    Allomorph lines are ``surface TAB class TAB NAME=VALUE ...`` where the
    pseudo-features ``after=vowel|consonant`` and ``conv=CAT/SUFFIX`` are
    recognized; ordering lines are ``CLASS < CLASS``.  A line
    ``harmony=off`` disables harmony checks.
    """
    allomorphs = []
    order = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.strip().lower() in ("harmony=off", "harmony=on"):
            harmony = line.strip().lower() == "harmony=on"
            continue
        if "\t" not in line and "<" in line:
            left, right = (x.strip() for x in line.split("<", 1))
            if not left or not right:
                raise FormatError("ordering line needs two classes", lineno, source)
            order.add((left, right))
            continue
        fields = [f for f in line.split("\t") if f.strip()]
        if len(fields) < 2:
            raise FormatError("allomorph line needs surface TAB class", lineno, source)
        surface, cls = fields[0].strip(), fields[1].strip()
        effects, after, conv = [], None, None
        for item in " ".join(fields[2:]).split():
            if "=" not in item:
                raise FormatError(f"expected NAME=VALUE, got {item!r}", lineno, source)
            name, value = item.split("=", 1)
            if name == "after":
                if value not in ("vowel", "consonant"):
                    raise FormatError("after= must be vowel or consonant", lineno, source)
                after = value
            elif name == "conv":
                if "/" not in value:
                    raise FormatError("conv= must be CAT/SUFFIX", lineno, source)
                conv = tuple(value.split("/", 1))
            else:
                effects.append((name.upper(), value))
        allomorphs.append(Allomorph(surface, cls, tuple(effects), after, conv))
    return SuffixLexicon(tuple(allomorphs), frozenset(order), harmony)


def turkish_lexicon() -> SuffixLexicon:
    text = resources.files("morphdis.data").joinpath("turkish.suffixes").read_text("utf-8")
    return read_lexicon(text, "turkish.suffixes")


def chains(rest: str, before: str, lex: SuffixLexicon):
    """All valid allomorph chains spelling ``rest`` after a root ending in ``before``."""
    out = []

    def walk(pos, prev_char, last_cls, last_vowel, acc):
        if pos == len(rest):
            out.append(tuple(acc))
            return
        for size in range(1, min(lex.max_len, len(rest) - pos) + 1):
            for a in lex.by_surface.get(rest[pos:pos + size], ()):
                if last_cls is not None and (last_cls, a.cls) not in lex.precedes:
                    continue
                if not a.attaches_after(prev_char):
                    continue
                fv = a.first_vowel
                if lex.harmony and last_vowel is not None and fv is not None \
                        and not harmonizes(last_vowel, fv):
                    continue
                acc.append(a)
                walk(pos + size, a.surface[-1], a.cls, a.last_vowel or last_vowel, acc)
                acc.pop()

    walk(0, before, None, None, [])
    return out


def build_guess(root: str, chain) -> FeatureStructure:
    entries = [(CAT, "NOUN"), (ROOT, root)]
    level = dict(DEFAULTS)
    for a in chain:
        if a.conv is not None:
            entries.extend(level.items())
            entries.append(("CONV", a.conv[0], a.conv[1]))
            level = {}
        level.update(a.effects)
    entries.extend(level.items())
    return hierarchize(LinearParse(tuple(entries)))


def guess(surface: str, lex: SuffixLexicon = EMPTY_LEXICON) -> list[FeatureStructure]:
    """Every root/suffix-chain reading of ``surface``, longest root first."""
    if not surface:
        raise ValueError("empty surface")
    from .corpus import _safe_root

    seen = {}
    bare = build_guess(_safe_root(surface), ())
    seen[bare] = None
    stem, sep, tail = surface.rpartition("'")
    if sep:
        # Apostrophe spelling (Carter'a): root is fixed, suffixes follow it.
        if stem:
            for chain in chains(tail, stem[-1], lex):
                if chain:
                    seen.setdefault(build_guess(_safe_root(stem), chain), None)
        return list(seen)
    for cut in range(len(surface) - 1, 0, -1):
        root, rest = surface[:cut], surface[cut:]
        for chain in chains(rest, root[-1], lex):
            seen.setdefault(build_guess(_safe_root(root), chain), None)
    return list(seen)
