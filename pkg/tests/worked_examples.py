"""Worked examples: inputs and the exact structures expected from them."""

from morphdis.corpus import Sentence, Token, group_collocations, read_patterns
from morphdis.config import read_text
from morphdis.featstruct import FeatureStructure as FS
from morphdis.featstruct import parse_structure, project, read_templates
from morphdis.rules import Mode, apply_rule_at, decode_rules
from morphdis.unknown import guess, turkish_lexicon


def geldigimdeki():
    got = parse_structure("[[CAT VERB][ROOT gel][SENSE POS][CONV NOUN DIK][AGR 3SG]"
                          "[POSS 1SG][CASE LOC][CONV ADJ REL]]")
    verb = FS([("CAT", "VERB"), ("ROOT", "gel"), ("SENSE", "POS")])
    noun = FS([("CAT", "NOUN"), ("SUFFIX", "DIK"), ("STEM", verb), ("AGR", "3SG"),
               ("POSS", "1SG"), ("CASE", "LOC")])
    want = FS([("CAT", "ADJ"), ("SUFFIX", "REL"), ("STEM", noun)])
    return got, want


def geldigimdeki_projected():
    got, _ = geldigimdeki()
    t = read_templates(read_text("@turkish.templates"))
    noun = FS([("CAT", "NOUN"), ("AGR", "3SG"), ("POSS", "1SG"), ("CASE", "LOC"),
               ("STEM", FS([("CAT", "VERB")])), ("SUFFIX", "DIK")])
    return project(got, t), FS([("CAT", "ADJ"), ("STEM", noun), ("SUFFIX", "REL")])


def masadir():
    got = parse_structure("[[CAT NOUN][ROOT masa][AGR 3SG][POSS NONE][CASE NOM]"
                          "[CONV VERB NONE][TAM1 PRES][AGR 3SG]]")
    stem = FS([("CAT", "NOUN"), ("ROOT", "masa"), ("AGR", "3SG"), ("POSS", "NONE"),
               ("CASE", "NOM")])
    want = FS([("CAT", "VERB"), ("SUFFIX", "NONE"), ("STEM", stem), ("TAM1", "PRES"),
               ("AGR", "3SG")])
    return got, want


ABLATIVE_RULE = "[llc:[ ],lc:[ ],\n  choose:[case:abl],\n  rc:[[cat:postp,subcat:abl]],rrc:[ ]]"


def ablative_window():
    rule = decode_rules(ABLATIVE_RULE)[0]
    parses = tuple(parse_structure(f"[[CAT NOUN][ROOT ev][AGR 3SG][POSS NONE][CASE {c}]]")
                   for c in ("NOM", "ABL", "DAT"))
    postp = parse_structure("[[CAT POSTP][ROOT sonra][SUBCAT ABL]]")
    s = Sentence([Token("evden", parses), Token("sonra", (postp,))])
    apply_rule_at(s, 0, rule, Mode.ANY_PARSE)
    return s.tokens[0].parses, (parses[1],)


def talkshow():
    rows = [("talkshowumun", "NONE", "NOM"), ("talkshowumu", "2SG", "NOM"),
            ("talkshowum", "NONE", "GEN"), ("talkshowum", "2SG", "NOM"),
            ("talkshowu", "1SG", "GEN"), ("talkshow", "1SG", "GEN")]
    want = [parse_structure(f"[[CAT NOUN][ROOT {r}][AGR 3SG][POSS {p}][CASE {c}]]")
            for r, p, c in rows]
    return guess("talkshowumun", turkish_lexicon()), want


def collocations():
    patterns = read_patterns(read_text("@turkish.patterns"))
    kosa = parse_structure("[[CAT VERB][ROOT koS][SENSE POS][TAM1 OPT][AGR 3SG]]")
    s = group_collocations(Sentence([Token("koşa", (kosa,)), Token("koşa", (kosa,))]), patterns)
    want1 = parse_structure("[[CAT VERB][ROOT koS][SENSE POS][TAM1 OPT][AGR 3SG]"
                            "[CONV ADVERB DUP1][TYPE MANNER]]")
    yap_pos = parse_structure("[[CAT VERB][ROOT yap][SENSE POS][TAM1 AORIST][AGR 3SG]]")
    yap_neg = parse_structure("[[CAT VERB][ROOT yap][SENSE NEG][TAM1 AORIST][AGR 3SG]]")
    s2 = group_collocations(Sentence([Token("yapar", (yap_pos,)), Token("yapmaz", (yap_neg,))]),
                            patterns)
    want2 = parse_structure("[[CAT VERB][ROOT yap][SENSE POS][TAM1 AORIST][AGR 3SG]"
                            "[CONV ADVERB DUP-AOR][TYPE TEMP]]")
    return [(s.tokens, want1, "koşa koşa"), (s2.tokens, want2, "yapar yapmaz")]


def all_worked_examples_hold():
    """(ok, message) over every worked example."""
    checks = []
    checks.append(("geldiGimdeki", *geldigimdeki()))
    checks.append(("geldiGimdeki projected", *geldigimdeki_projected()))
    checks.append(("masa+dir", *masadir()))
    checks.append(("ablative rule", *ablative_window()))
    got, want = talkshow()
    checks.append(("talkshowumun", sorted(got), sorted(want)))
    for toks, want, surface in collocations():
        ok = len(toks) == 1 and toks[0].surface == surface and toks[0].parses == (want,)
        checks.append((surface, ok, True))
    bad = [name for name, g, w in checks if g != w]
    return not bad, ", ".join(bad) or "all examples match"
