"""End-to-end curation pipeline.

Stage order is fixed: ingest, language filter, standardize, quality
filter, PII scrub, dedup (per-source, corpus-wide, in-document lines),
split. Any stage can be disabled; it then appears in the report as a
pass-through so token accounting always covers the same chain.

Configuration comes from a JSON file with one section per stage. Unknown
keys are rejected so typos fail loudly instead of silently using a
default. Paths inside the file resolve relative to the file itself.

The pipeline is deterministic: no randomness, worker count does not
affect output, and input files are processed in the order given.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import Corpus, read_jsonl
from .dedup import DedupConfig, DedupRegistry, dedup_pass
from .errors import ConfigError
from .langid import LangFilterConfig, filter_language
from .normalize import (
    CharMapTable,
    SplitConfig,
    _parse_cp,
    default_table,
    split_corpus,
    standardize_corpus,
)
from .quality import (
    PiiRuleSet,
    QualityConfig,
    filter_quality,
    load_wordlist,
    scrub_corpus_pii,
)
from .report import PipelineReport, StageReport

_STAGE_ORDER = (
    "ingest",
    "lang_filter",
    "standardize",
    "quality_filter",
    "pii_scrub",
    "dedup",
    "split",
)


def _section(data: dict, name: str, allowed: set[str]) -> dict:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in config section {name!r}"
        )
    return section


def _enabled(section: dict) -> bool:
    v = section.get("enabled", True)
    if not isinstance(v, bool):
        raise ConfigError(f"'enabled' must be true or false, got {v!r}")
    return v


def _resolve(path: str, base_dir: Path | None) -> Path:
    p = Path(path)
    if base_dir is not None and not p.is_absolute():
        p = base_dir / p
    return p


@dataclass(frozen=True)
class PipelineConfig:
    lang_enabled: bool = True
    lang: LangFilterConfig = LangFilterConfig()
    normalize_enabled: bool = True
    charmap: CharMapTable | None = None
    quality_enabled: bool = True
    quality: QualityConfig | None = None
    pii_enabled: bool = True
    pii_rules: PiiRuleSet | None = None
    dedup_enabled: bool = True
    dedup: DedupConfig = DedupConfig()
    dedup_per_source: bool = True
    dedup_overall: bool = True
    dedup_lines: bool = True
    split_enabled: bool = True
    split: SplitConfig = SplitConfig()
    workers: int | None = None  # None = all available cores

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "PipelineConfig":
        top_allowed = {"workers", "lang", "normalize", "quality", "pii", "dedup", "split"}
        unknown = set(data) - top_allowed
        if unknown:
            raise ConfigError(f"unknown top-level config key(s) {sorted(unknown)}")

        norm = _section(data, "normalize", {"enabled", "charmap"})
        normalize_enabled = _enabled(norm)
        charmap = None
        if "charmap" in norm:
            charmap = CharMapTable.from_json(_resolve(norm["charmap"], base_dir))
        wordlist_table = (charmap or default_table()) if normalize_enabled else None

        lang_sec = _section(data, "lang", {"enabled", "threshold", "ranges"})
        lang_kwargs = {}
        if "threshold" in lang_sec:
            lang_kwargs["threshold"] = lang_sec["threshold"]
        if "ranges" in lang_sec:
            try:
                lang_kwargs["script_ranges"] = tuple(
                    (ord(_parse_cp(lo)), ord(_parse_cp(hi)))
                    for lo, hi in lang_sec["ranges"]
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad lang 'ranges': {exc}") from exc
        lang = LangFilterConfig(**lang_kwargs)

        q_sec = _section(
            data,
            "quality",
            {
                "enabled",
                "stopword_threshold",
                "flagged_threshold",
                "stopwords",
                "flagged",
                "min_tokens",
            },
        )
        q_kwargs = {}
        for key in ("stopword_threshold", "flagged_threshold", "min_tokens"):
            if key in q_sec:
                q_kwargs[key] = q_sec[key]
        if "stopwords" in q_sec:
            q_kwargs["stopwords"] = load_wordlist(
                _resolve(q_sec["stopwords"], base_dir), wordlist_table
            )
        if "flagged" in q_sec:
            q_kwargs["flagged"] = load_wordlist(
                _resolve(q_sec["flagged"], base_dir), wordlist_table
            )
        quality = QualityConfig(**q_kwargs) if q_kwargs else None

        pii_sec = _section(data, "pii", {"enabled", "rules"})
        pii_rules = None
        if "rules" in pii_sec:
            pii_rules = PiiRuleSet.from_json(_resolve(pii_sec["rules"], base_dir))

        d_sec = _section(
            data,
            "dedup",
            {
                "enabled",
                "mode",
                "hamming_threshold",
                "shingle_width",
                "per_source",
                "overall",
                "lines",
            },
        )
        d_kwargs = {
            k: d_sec[k]
            for k in ("mode", "hamming_threshold", "shingle_width")
            if k in d_sec
        }

        s_sec = _section(data, "split", {"enabled", "target_tokens", "sentence_end_chars"})
        s_kwargs = {
            k: s_sec[k] for k in ("target_tokens", "sentence_end_chars") if k in s_sec
        }

        workers = data.get("workers")
        if workers is not None and (not isinstance(workers, int) or workers < 1):
            raise ConfigError(f"workers must be a positive integer, got {workers!r}")

        try:
            return cls(
                lang_enabled=_enabled(lang_sec),
                lang=lang,
                normalize_enabled=normalize_enabled,
                charmap=charmap,
                quality_enabled=_enabled(q_sec),
                quality=quality,
                pii_enabled=_enabled(pii_sec),
                pii_rules=pii_rules,
                dedup_enabled=_enabled(d_sec),
                dedup=DedupConfig(**d_kwargs),
                dedup_per_source=bool(d_sec.get("per_source", True)),
                dedup_overall=bool(d_sec.get("overall", True)),
                dedup_lines=bool(d_sec.get("lines", True)),
                split_enabled=_enabled(s_sec),
                split=SplitConfig(**s_kwargs),
                workers=workers,
            )
        except TypeError as exc:
            raise ConfigError(f"bad config value: {exc}") from exc

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        return cls.from_dict(data, base_dir=path.parent)

    def with_workers(self, workers: int | None) -> "PipelineConfig":
        return replace(self, workers=workers)


def _identity_report(stage: str, corpus: Corpus) -> StageReport:
    n, t = len(corpus), corpus.total_tokens
    return StageReport(
        stage=stage, docs_in=n, docs_out=n, tokens_in=t, tokens_out=t, enabled=False
    )


def ingest(paths: list[str | Path]) -> tuple[Corpus, StageReport]:
    """Read and concatenate JSONL files; ids must be unique across files."""
    t0 = time.perf_counter()
    docs = []
    for path in paths:
        docs.extend(read_jsonl(path).docs)
    corpus = Corpus(docs)
    corpus.check_unique_ids()
    n, t = len(corpus), corpus.total_tokens
    report = StageReport(
        stage="ingest", docs_in=n, docs_out=n, tokens_in=t, tokens_out=t
    )
    report.counters["files"] = len(paths)
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return corpus, report


def run_pipeline(
    inputs: list[str | Path] | Corpus,
    cfg: PipelineConfig | None = None,
    dedup_registry: DedupRegistry | None = None,
) -> tuple[Corpus, PipelineReport]:
    """Run every stage over the input files (or an in-memory corpus)."""
    if cfg is None:
        cfg = PipelineConfig()
    w = cfg.workers

    if isinstance(inputs, Corpus):
        inputs.check_unique_ids()
        corpus = inputs
        n, t = len(corpus), corpus.total_tokens
        ingest_report = StageReport(
            stage="ingest", docs_in=n, docs_out=n, tokens_in=t, tokens_out=t
        )
    else:
        corpus, ingest_report = ingest(list(inputs))

    stages = [ingest_report]
    original = corpus.source_tokens()

    if cfg.lang_enabled:
        corpus, rep = filter_language(corpus, cfg.lang, workers=w)
    else:
        rep = _identity_report("lang_filter", corpus)
    stages.append(rep)

    if cfg.normalize_enabled:
        corpus, rep = standardize_corpus(corpus, cfg.charmap, workers=w)
    else:
        rep = _identity_report("standardize", corpus)
    stages.append(rep)

    if cfg.quality_enabled:
        corpus, rep = filter_quality(corpus, cfg.quality, workers=w)
    else:
        rep = _identity_report("quality_filter", corpus)
    stages.append(rep)

    if cfg.pii_enabled:
        corpus, rep = scrub_corpus_pii(corpus, cfg.pii_rules, workers=w)
    else:
        rep = _identity_report("pii_scrub", corpus)
    stages.append(rep)

    if cfg.dedup_enabled:
        corpus, rep = dedup_pass(
            corpus,
            cfg.dedup,
            per_source=cfg.dedup_per_source,
            overall=cfg.dedup_overall,
            lines=cfg.dedup_lines,
            registry=dedup_registry,
            workers=w,
        )
    else:
        rep = _identity_report("dedup", corpus)
    stages.append(rep)

    if cfg.split_enabled:
        corpus, rep = split_corpus(corpus, cfg.split, workers=w)
    else:
        rep = _identity_report("split", corpus)
    stages.append(rep)

    report = PipelineReport(
        original_source_tokens=original,
        stages=stages,
        final_source_tokens=corpus.source_tokens(),
    )
    return corpus, report
