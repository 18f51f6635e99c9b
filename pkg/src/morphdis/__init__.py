"""Rule-based morphological disambiguation with unsupervised rule learning."""

from .corpus import Corpus, Sentence, Token, read_corpus, write_corpus
from .featstruct import FeatureStructure, FormatError, hierarchize, parse_constraint, subsumes
from .learner import ThresholdSchedule, learn_choose, learn_delete
from .pipeline import PipelineConfig, disambiguate, evaluate
from .rules import Rule, decode_rules, encode_rules

__version__ = "0.1.0"

__all__ = [
    "Corpus", "Sentence", "Token", "read_corpus", "write_corpus",
    "FeatureStructure", "FormatError", "hierarchize", "parse_constraint", "subsumes",
    "ThresholdSchedule", "learn_choose", "learn_delete",
    "PipelineConfig", "disambiguate", "evaluate",
    "Rule", "decode_rules", "encode_rules",
]
