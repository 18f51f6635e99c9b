"""key=value configuration and bundled data lookup.

A file argument written ``@name`` refers to ``name`` in the bundled data
directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources

from .ctxstats import CtxStatsConfig
from .featstruct import IDENTITY_TEMPLATE, NO_MASK, FormatError, read_masks, read_templates
from .learner import DeleteLearnConfig, ThresholdSchedule

KEYS = {
    "thresholds.rank1", "thresholds.rank2", "thresholds.rank3", "thresholds.rank4",
    "damping", "stop_limit", "delete.fraction", "masks", "templates", "delete.templates",
    "ctxstats.passes", "ctxstats.weights", "ctxstats.fraction",
}


def read_text(ref, base=None) -> str:
    """Contents of a file path or ``@bundled`` reference."""
    ref = str(ref)
    if ref.startswith("@"):
        res = resources.files("morphdis.data").joinpath(ref[1:])
        if not res.is_file():
            raise FileNotFoundError(f"no bundled data file {ref[1:]!r}")
        return res.read_text("utf-8")
    if base and not os.path.isabs(ref):
        ref = os.path.join(base, ref)
    with open(ref, encoding="utf-8") as fh:
        return fh.read()


@dataclass
class Settings:
    sched: ThresholdSchedule = field(default_factory=ThresholdSchedule)
    delete: DeleteLearnConfig = field(default_factory=DeleteLearnConfig)
    ctxstats: CtxStatsConfig = field(default_factory=CtxStatsConfig)
    masks: object = NO_MASK
    template: object = IDENTITY_TEMPLATE


def _number(values, key, path, kind=float):
    try:
        return kind(values[key])
    except ValueError:
        raise FormatError(f"{key}: expected a number, got {values[key]!r}", source=path) from None


def load_settings(path=None, templates=None, delete_templates=None, masks=None) -> Settings:
    """Settings from a config file; explicit file arguments override it."""
    values = {}
    base = None
    if path:
        parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                           inline_comment_prefixes=("#",))
        parser.optionxform = str
        try:
            parser.read_string("[config]\n" + read_text(path), source=str(path))
        except configparser.Error as e:
            raise FormatError(str(e).splitlines()[0], source=path) from None
        values = dict(parser["config"])
        unknown = sorted(set(values) - KEYS)
        if unknown:
            raise FormatError(f"unknown configuration key {unknown[0]!r}", source=path)
        if not str(path).startswith("@"):
            base = os.path.dirname(os.path.abspath(path))
    s = Settings()
    th = list(s.sched.thresholds)
    for r in range(4):
        key = f"thresholds.rank{r + 1}"
        if key in values:
            th[r] = _number(values, key, path)
    damping = _number(values, "damping", path) if "damping" in values else s.sched.damping
    stop = _number(values, "stop_limit", path) if "stop_limit" in values else s.sched.stop_limit
    try:
        s.sched = ThresholdSchedule(tuple(th), damping, stop)
        cs = s.ctxstats
        passes = _number(values, "ctxstats.passes", path, int) if "ctxstats.passes" in values \
            else cs.passes
        weights = cs.weights
        if "ctxstats.weights" in values:
            weights = tuple(float(w) for w in values["ctxstats.weights"].replace(",", " ").split())
        frac = _number(values, "ctxstats.fraction", path) if "ctxstats.fraction" in values \
            else cs.fraction
        s.ctxstats = CtxStatsConfig(passes, weights, frac)
        dfrac = _number(values, "delete.fraction", path) if "delete.fraction" in values \
            else s.delete.fraction
    except ValueError as e:
        raise FormatError(str(e), source=path) from None
    tref = templates or values.get("templates")
    dref = delete_templates or values.get("delete.templates")
    mref = masks or values.get("masks")
    tbase = None if templates else base
    dbase = None if delete_templates else base
    mbase = None if masks else base
    if tref:
        s.template = read_templates(read_text(tref, tbase), str(tref))
    if mref:
        s.masks = read_masks(read_text(mref, mbase), str(mref))
    dtemp = read_templates(read_text(dref, dbase), str(dref)) if dref else s.template
    s.delete = DeleteLearnConfig(dfrac, dtemp)
    return s
