"""Text standardization and context-length splitting for Urdu corpora.

Standardization is driven by a data file of character rules: confusable
Arabic forms are rewritten to their Urdu counterparts (U+064A to U+06CC,
U+0643 to U+06A9, Arabic-Indic digits to Extended Arabic-Indic, curly
quotes to straight ones), control and zero-width junk is stripped, and
runs of three or more identical punctuation marks collapse to one. Urdu
sentence ends (U+06D4) and poetic/ornate marks are left alone. The rule
table is replaceable wholesale, so a different published mapping can be
dropped in without code changes.

Splitting cuts long documents near a target token count, preferring
paragraph breaks, then sentence ends, then any whitespace.
"""

from __future__ import annotations

import json
import re
import time
import unicodedata
from dataclasses import dataclass
from functools import lru_cache, partial
from importlib import resources
from pathlib import Path

from ._parallel import pmap
from .corpus import Corpus, Document
from .errors import ConfigError, StageError
from .report import StageReport

_CP_RE = re.compile(r"^U\+([0-9A-Fa-f]{4,6})$")
_PUNCT_RUN_RE = re.compile(r"(.)\1{2,}")
_TOKEN_RE = re.compile(r"\S+")


def _parse_cp(spec: str) -> str:
    m = _CP_RE.match(spec.strip())
    if not m:
        raise ConfigError(f"bad codepoint spec {spec!r} (expected U+XXXX)")
    return chr(int(m.group(1), 16))


def _parse_seq(spec: str) -> str:
    """Space-separated "U+XXXX" specs to a string."""
    return "".join(_parse_cp(part) for part in spec.split())


def _parse_strip_entry(spec: str) -> list[str]:
    """A single "U+XXXX" or an inclusive range "U+XXXX-U+YYYY"."""
    spec = spec.strip()
    if "-" in spec:
        lo_s, hi_s = spec.split("-", 1)
        lo, hi = ord(_parse_cp(lo_s)), ord(_parse_cp(hi_s))
        if lo > hi:
            raise ConfigError(f"bad strip range {spec!r}")
        return [chr(c) for c in range(lo, hi + 1)]
    return [_parse_cp(spec)]


@dataclass(frozen=True)
class CharMapTable:
    """Ordered rewrite rules plus a set of codepoints to delete.

    The table must be closed: no rule output may contain any rule input
    or any stripped codepoint, which makes standardization idempotent.
    """

    rules: tuple[tuple[str, str], ...]
    strip: frozenset[str]

    def __post_init__(self):
        inputs = [src for src, _ in self.rules]
        for src, dst in self.rules:
            if not src:
                raise ConfigError("rule input must be non-empty")
            if src == dst:
                raise ConfigError(f"rule maps {src!r} to itself")
        for _, dst in self.rules:
            for src in inputs:
                if src in dst:
                    raise ConfigError(
                        f"table not closed: output {dst!r} contains input {src!r}"
                    )
            for ch in self.strip:
                if ch in dst:
                    raise ConfigError(
                        f"table not closed: output {dst!r} contains stripped "
                        f"codepoint U+{ord(ch):04X}"
                    )

    @classmethod
    def from_dict(cls, data: dict) -> "CharMapTable":
        unknown = set(data) - {"map", "strip"}
        if unknown:
            raise ConfigError(f"unknown charmap keys: {sorted(unknown)}")
        try:
            rules = tuple(
                (_parse_seq(src), _parse_seq(dst)) for src, dst in data.get("map", [])
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad charmap 'map' section: {exc}") from exc
        strip: set[str] = set()
        for entry in data.get("strip", []):
            strip.update(_parse_strip_entry(entry))
        return cls(rules=rules, strip=frozenset(strip))

    @classmethod
    def from_json(cls, path: str | Path) -> "CharMapTable":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read charmap table {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"charmap table {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@lru_cache(maxsize=1)
def default_table() -> CharMapTable:
    data = resources.files("corpusforge.data").joinpath("charmap_default.json")
    return CharMapTable.from_dict(json.loads(data.read_text(encoding="utf-8")))


@lru_cache(maxsize=8)
def _compiled(table: CharMapTable) -> tuple[re.Pattern, dict[str, str]]:
    mapping = {ch: "" for ch in table.strip}
    mapping.update({src: dst for src, dst in table.rules})
    # Longest input first so alternation implements longest-match-first.
    keys = sorted(mapping, key=len, reverse=True)
    pattern = re.compile("|".join(re.escape(k) for k in keys))
    return pattern, mapping


def _collapse_punct(m: re.Match) -> str:
    ch = m.group(1)
    if unicodedata.category(ch).startswith("P"):
        return ch
    return m.group(0)


def standardize(text: str, table: CharMapTable | None = None) -> str:
    """Apply rewrite rules (one pass, longest match first), strip junk
    codepoints, and collapse runs of 3+ identical punctuation marks."""
    if table is None:
        table = default_table()
    if table.rules or table.strip:
        pattern, mapping = _compiled(table)
        text = pattern.sub(lambda m: mapping[m.group(0)], text)
    return _PUNCT_RUN_RE.sub(_collapse_punct, text)


@dataclass(frozen=True)
class SplitConfig:
    target_tokens: int = 512
    sentence_end_chars: str = "۔؟!?."
    boundary_preference: tuple[str, ...] = ("paragraph", "sentence", "whitespace")

    def __post_init__(self):
        if self.target_tokens < 1:
            raise ConfigError(f"target_tokens must be >= 1, got {self.target_tokens}")
        unknown = set(self.boundary_preference) - {"paragraph", "sentence", "whitespace"}
        if unknown:
            raise ConfigError(f"unknown boundary preference {sorted(unknown)}")


def _pick_cut(
    text: str,
    spans: list[tuple[int, int]],
    start: int,
    lo: int,
    hi: int,
    target: int,
    cfg: SplitConfig,
) -> int:
    """Choose a gap index g in [lo, hi]: cut before token start+g.

    Highest-priority boundary class wins; within a class the gap closest
    to the target chunk length is chosen (ties toward the earlier gap).
    """
    def gap_ws(g: int) -> str:
        return text[spans[start + g - 1][1] : spans[start + g][0]]

    candidates = range(lo, hi + 1)
    for kind in cfg.boundary_preference:
        if kind == "paragraph":
            hits = [g for g in candidates if gap_ws(g).count("\n") >= 2]
        elif kind == "sentence":
            hits = [
                g
                for g in candidates
                if text[spans[start + g - 1][1] - 1] in cfg.sentence_end_chars
            ]
        else:
            hits = list(candidates)
        if hits:
            return min(hits, key=lambda g: (abs(g - target), g))
    return hi  # unreachable: "whitespace" matches every gap


def split_document(doc: Document, cfg: SplitConfig = SplitConfig()) -> list[Document]:
    """Split a long document into chunks near ``target_tokens`` tokens.

    Cuts land between tokens, so the non-whitespace token multiset is
    preserved exactly; whitespace at each cut is consumed. Chunks get ids
    "<parent>#0", "<parent>#1", ... and inherit source and meta. A
    document of at most 1.5x the target is returned unchanged.
    """
    target = cfg.target_tokens
    spans = [m.span() for m in _TOKEN_RE.finditer(doc.text)]
    n = len(spans)
    if n <= int(1.5 * target):
        return [doc]

    chunks: list[Document] = []
    start = 0
    k = 0
    while n - start > int(1.5 * target):
        lo = max(1, (target + 1) // 2)
        hi = min(int(1.5 * target), n - start - 1)
        g = _pick_cut(doc.text, spans, start, lo, hi, target, cfg)
        piece = doc.text[spans[start][0] : spans[start + g - 1][1]]
        chunks.append(doc.with_text(piece).with_id(f"{doc.id}#{k}"))
        start += g
        k += 1
    piece = doc.text[spans[start][0] : spans[n - 1][1]]
    chunks.append(doc.with_text(piece).with_id(f"{doc.id}#{k}"))
    return chunks


def _standardize_text(text: str, table: CharMapTable) -> str:
    return standardize(text, table)


def standardize_corpus(
    corpus: Corpus,
    table: CharMapTable | None = None,
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Standardize every document; document count is unchanged."""
    t0 = time.perf_counter()
    if table is None:
        table = default_table()
    report = StageReport(
        stage="standardize", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    texts = pmap(partial(_standardize_text, table=table), [d.text for d in corpus], workers)
    out_docs = []
    changed = 0
    for doc, text in zip(corpus, texts):
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


def split_corpus(
    corpus: Corpus,
    cfg: SplitConfig = SplitConfig(),
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Split every over-length document; short documents pass through."""
    t0 = time.perf_counter()
    report = StageReport(
        stage="split", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    try:
        piece_lists = pmap(partial(split_document, cfg=cfg), list(corpus), workers)
    except Exception as exc:
        raise StageError("split", str(exc)) from exc
    out_docs: list[Document] = []
    split_count = 0
    for pieces in piece_lists:
        if len(pieces) > 1:
            split_count += 1
        out_docs.extend(pieces)
    out = Corpus(out_docs)
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.counters["docs_split"] = split_count
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report
