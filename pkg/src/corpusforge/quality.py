"""Quality filtering and PII scrubbing.

Two ratio tests weed out junk documents: too few stopwords means the text
is unlikely to be running prose (boilerplate, tag soup, word salad), and
too many flagged words means it fails the content policy. Both compare a
token ratio against a threshold; documents on the boundary are kept.

PII scrubbing replaces emails, phone numbers (international and Pakistani
local formats), and national identity numbers with typed placeholders
like ``<PII:EMAIL>``. Placeholders contain no digits, so scrubbing twice
changes nothing.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache, partial
from importlib import resources
from pathlib import Path

from ._parallel import pmap
from .corpus import Corpus
from .errors import ConfigError
from .report import StageReport

REASON_EMPTY = "empty"
REASON_STOPWORD_LOW = "stopword_low"
REASON_FLAGGED_HIGH = "flagged_high"

_REPLACEMENT_RE = re.compile(r"^<PII:[A-Z_]+>$")
_NAME_RE = re.compile(r"^[A-Z][A-Z_]*$")


def load_wordlist(path: str | Path, table=None) -> frozenset[str]:
    """Read one word per line, skipping blanks and ``#`` comments.

    Words are lowercased; when a character table is given each word is
    standardized with it so the list matches standardized text.
    """
    from .normalize import standardize

    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read wordlist {path}: {exc}") from exc
    words = set()
    for line in lines:
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        word = word.lower()
        if table is not None:
            word = standardize(word, table)
        words.add(word)
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    data = resources.files("corpusforge.data").joinpath("urdu_stopwords.txt")
    words = set()
    for line in data.read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


@dataclass(frozen=True)
class QualityConfig:
    stopword_threshold: float = 0.1
    flagged_threshold: float = 0.025
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    flagged: frozenset[str] = frozenset()
    min_tokens: int = 1

    def __post_init__(self):
        for name in ("stopword_threshold", "flagged_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.min_tokens < 0:
            raise ConfigError(f"min_tokens must be >= 0, got {self.min_tokens}")


def stopword_ratio(text: str, stopwords: frozenset[str]) -> float:
    tokens = text.lower().split()
    if not tokens:
        return 0.0
    return sum(1 for t in tokens if t in stopwords) / len(tokens)


def flagged_ratio(text: str, flagged: frozenset[str]) -> float:
    tokens = text.lower().split()
    if not tokens:
        return 0.0
    return sum(1 for t in tokens if t in flagged) / len(tokens)


def _check_quality(text: str, cfg: QualityConfig) -> str | None:
    """Drop reason for a document's text, or None to keep it."""
    tokens = text.lower().split()
    if len(tokens) < cfg.min_tokens:
        return REASON_EMPTY
    if cfg.stopwords:
        ratio = sum(1 for t in tokens if t in cfg.stopwords) / len(tokens)
        if ratio < cfg.stopword_threshold:
            return REASON_STOPWORD_LOW
    if cfg.flagged:
        ratio = sum(1 for t in tokens if t in cfg.flagged) / len(tokens)
        if ratio > cfg.flagged_threshold:
            return REASON_FLAGGED_HIGH
    return None


def filter_quality(
    corpus: Corpus,
    cfg: QualityConfig | None = None,
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Keep documents that pass the stopword and flagged-word ratio tests.

    With an empty stopword set the stopword test is skipped entirely
    rather than dropping everything; same for the flagged set.
    """
    t0 = time.perf_counter()
    if cfg is None:
        cfg = QualityConfig()
    report = StageReport(
        stage="quality_filter", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    reasons = pmap(partial(_check_quality, cfg=cfg), [d.text for d in corpus], workers)
    kept = []
    for doc, reason in zip(corpus, reasons):
        if reason is None:
            kept.append(doc)
        else:
            report.record_drop(doc.id, reason)
    out = Corpus(kept)
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report


@lru_cache(maxsize=64)
def _compile_rule(pattern: str) -> re.Pattern:
    return re.compile(pattern)


@dataclass(frozen=True)
class PiiRule:
    name: str
    pattern: str
    replacement: str

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ConfigError(f"bad PII rule name {self.name!r}")
        if not _REPLACEMENT_RE.match(self.replacement):
            raise ConfigError(
                f"PII replacement must look like <PII:KIND>, got {self.replacement!r}"
            )
        try:
            _compile_rule(self.pattern)
        except re.error as exc:
            raise ConfigError(
                f"PII rule {self.name!r} has a bad pattern: {exc}"
            ) from exc

    @property
    def regex(self) -> re.Pattern:
        return _compile_rule(self.pattern)


@dataclass(frozen=True)
class PiiRuleSet:
    """Ordered scrub rules; earlier rules see the original text first."""

    rules: tuple[PiiRule, ...]

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise ConfigError(f"duplicate PII rule names in {names}")

    @classmethod
    def from_data(cls, data) -> "PiiRuleSet":
        """Build from a JSON array of {name, pattern, replacement} objects."""
        if not isinstance(data, list):
            raise ConfigError(
                "PII rules must be a JSON array of {name, pattern, replacement}"
            )
        rules = []
        for i, entry in enumerate(data):
            if not isinstance(entry, dict):
                raise ConfigError(f"PII rule #{i} is not an object")
            unknown = set(entry) - {"name", "pattern", "replacement"}
            if unknown:
                raise ConfigError(f"unknown key(s) {sorted(unknown)} in PII rule #{i}")
            try:
                rules.append(
                    PiiRule(entry["name"], entry["pattern"], entry["replacement"])
                )
            except KeyError as exc:
                raise ConfigError(f"PII rule #{i} is missing key {exc}") from exc
        return cls(rules=tuple(rules))

    @classmethod
    def from_json(cls, path: str | Path) -> "PiiRuleSet":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read PII rules {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"PII rules {path} is not valid JSON: {exc}") from exc
        return cls.from_data(data)


@lru_cache(maxsize=1)
def default_pii_rules() -> PiiRuleSet:
    data = resources.files("corpusforge.data").joinpath("pii_rules.json")
    return PiiRuleSet.from_data(json.loads(data.read_text(encoding="utf-8")))


def scrub_pii(text: str, rules: PiiRuleSet | None = None) -> tuple[str, dict[str, int]]:
    """Apply each rule in order; returns the text and nonzero match counts."""
    if rules is None:
        rules = default_pii_rules()
    counts: dict[str, int] = {}
    for rule in rules.rules:
        text, n = rule.regex.subn(rule.replacement, text)
        if n:
            counts[rule.name] = counts.get(rule.name, 0) + n
    return text, counts


def scrub_corpus_pii(
    corpus: Corpus,
    rules: PiiRuleSet | None = None,
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Scrub every document; nothing is dropped, only rewritten."""
    t0 = time.perf_counter()
    if rules is None:
        rules = default_pii_rules()
    report = StageReport(
        stage="pii_scrub", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    results = pmap(partial(scrub_pii, rules=rules), [d.text for d in corpus], workers)
    out_docs = []
    changed = 0
    for doc, (text, counts) in zip(corpus, results):
        for name, n in counts.items():
            report.counters[name] = report.counters.get(name, 0) + n
        if text != doc.text:
            changed += 1
            doc = doc.with_text(text)
        out_docs.append(doc)
    out = Corpus(out_docs)
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.counters["docs_changed"] = changed
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report
