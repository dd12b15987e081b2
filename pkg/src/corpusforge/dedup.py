"""Near-duplicate removal with 64-bit simhash fingerprints.

A document's fingerprint hashes its character 4-shingles after removing
every whitespace character, so re-wrapped or re-spaced copies collide
exactly. Exact mode drops fingerprint-equal documents; near mode also
drops documents within a small Hamming distance. The first document in
input order always wins.

Duplicates are removed in three passes: within each source, across the
whole corpus, then repeated lines inside each document. Fingerprints can
be saved to a sidecar file and reloaded to dedup new data against an
existing collection.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from ._parallel import pmap
from .corpus import Corpus, Document
from .errors import ConfigError, DataError
from .report import StageReport

REASON_DUP = "dup_doc"
REASON_DUP_EMPTY = "dup_doc_empty"

# Keyed hash fixes the fingerprint function; bump the tag if it changes.
_HASH_KEY = b"simhash-v1"
_BIT_SHIFTS = np.arange(64, dtype=np.uint64)


@dataclass(frozen=True)
class Fingerprint:
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < 1 << 64:
            raise DataError(f"fingerprint out of range: {self.bits}")

    def hamming(self, other: "Fingerprint") -> int:
        return (self.bits ^ other.bits).bit_count()

    @property
    def hex(self) -> str:
        return f"{self.bits:016x}"

    @classmethod
    def from_hex(cls, s: str) -> "Fingerprint":
        try:
            return cls(int(s, 16))
        except ValueError as exc:
            raise DataError(f"bad fingerprint {s!r}") from exc


@dataclass(frozen=True)
class DedupConfig:
    mode: str = "exact"
    hamming_threshold: int = 3
    shingle_width: int = 4

    def __post_init__(self):
        if self.mode not in ("exact", "near"):
            raise ConfigError(f"dedup mode must be 'exact' or 'near', got {self.mode!r}")
        if not 0 <= self.hamming_threshold <= 64:
            raise ConfigError(
                f"hamming_threshold must be in [0, 64], got {self.hamming_threshold}"
            )
        if self.shingle_width < 1:
            raise ConfigError(f"shingle_width must be >= 1, got {self.shingle_width}")


def _shingle_hash(shingle: str) -> int:
    digest = hashlib.blake2b(
        shingle.encode("utf-8"), digest_size=8, key=_HASH_KEY
    ).digest()
    return int.from_bytes(digest, "big")


def simhash(text: str, cfg: DedupConfig = DedupConfig()) -> Fingerprint:
    """Fingerprint of the text's whitespace-free character shingles.

    Whitespace-only text maps to the zero fingerprint. Text shorter than
    the shingle width is hashed as one shingle.
    """
    content = "".join(text.split())
    if not content:
        return Fingerprint(0)
    w = cfg.shingle_width
    if len(content) <= w:
        shingles = [content]
    else:
        shingles = [content[i : i + w] for i in range(len(content) - w + 1)]
    hashes = np.fromiter(
        (_shingle_hash(s) for s in shingles), dtype=np.uint64, count=len(shingles)
    )
    ones = ((hashes[:, None] >> _BIT_SHIFTS) & 1).sum(axis=0)
    bits_arr = (2 * ones > len(shingles)).astype(np.uint64)
    bits = int((bits_arr << _BIT_SHIFTS).sum())
    return Fingerprint(bits)


def fingerprint_corpus(
    corpus: Corpus, cfg: DedupConfig = DedupConfig(), workers: int | None = 1
) -> list[tuple[str, Fingerprint]]:
    fps = pmap(partial(simhash, cfg=cfg), [d.text for d in corpus], workers)
    return [(doc.id, fp) for doc, fp in zip(corpus, fps)]


class DedupRegistry:
    """Seen fingerprints with first-wins lookup."""

    def __init__(self, cfg: DedupConfig):
        self.cfg = cfg
        self._exact: dict[int, str] = {}
        self._near: list[tuple[int, str]] = []

    def probe(self, fp: Fingerprint) -> str | None:
        """Id of the kept duplicate, or None if unseen."""
        hit = self._exact.get(fp.bits)
        if hit is not None:
            return hit
        if self.cfg.mode == "near":
            limit = self.cfg.hamming_threshold
            for bits, doc_id in self._near:
                if (bits ^ fp.bits).bit_count() <= limit:
                    return doc_id
        return None

    def add(self, fp: Fingerprint, doc_id: str) -> None:
        if fp.bits not in self._exact:
            self._exact[fp.bits] = doc_id
            self._near.append((fp.bits, doc_id))

    def __len__(self) -> int:
        return len(self._exact)


def dedup_documents(
    corpus: Corpus,
    cfg: DedupConfig = DedupConfig(),
    group_by_source: bool = False,
    registry: DedupRegistry | None = None,
    stage: str = "dedup_overall",
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Drop documents whose fingerprint was already seen.

    With ``group_by_source`` each source gets its own registry, so only
    same-source copies are dropped. A shared ``registry`` carries seen
    fingerprints in (and accumulates the kept ones).
    """
    t0 = time.perf_counter()
    if group_by_source and registry is not None:
        raise ConfigError("group_by_source cannot use a shared registry")
    report = StageReport(
        stage=stage, docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    fps = pmap(partial(simhash, cfg=cfg), [d.text for d in corpus], workers)
    registries: dict[str, DedupRegistry] = {}
    shared = registry if registry is not None else DedupRegistry(cfg)
    kept = []
    for doc, fp in zip(corpus, fps):
        reg = registries.setdefault(doc.source, DedupRegistry(cfg)) if group_by_source else shared
        hit = reg.probe(fp)
        if hit is None:
            reg.add(fp, doc.id)
            kept.append(doc)
        else:
            reason = REASON_DUP_EMPTY if fp.bits == 0 else REASON_DUP
            report.record_drop(doc.id, reason, kept_id=hit)
    out = Corpus(kept)
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report


def dedup_lines(doc: Document) -> Document:
    """Remove repeated lines inside one document, keeping first occurrences.

    Lines compare with trailing whitespace ignored; the kept line is the
    original, untouched one.
    """
    lines = doc.text.split("\n")
    if len(lines) < 2:
        return doc
    seen = set()
    kept = []
    for line in lines:
        key = line.rstrip()
        if key in seen:
            continue
        seen.add(key)
        kept.append(line)
    if len(kept) == len(lines):
        return doc
    return doc.with_text("\n".join(kept))


def dedup_corpus_lines(
    corpus: Corpus, workers: int | None = 1
) -> tuple[Corpus, StageReport]:
    t0 = time.perf_counter()
    report = StageReport(
        stage="dedup_lines", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    out_docs = pmap(dedup_lines, list(corpus), workers)
    changed = sum(1 for a, b in zip(corpus, out_docs) if a.text != b.text)
    out = Corpus(list(out_docs))
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.counters["docs_changed"] = changed
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report


def dedup_pass(
    corpus: Corpus,
    cfg: DedupConfig = DedupConfig(),
    per_source: bool = True,
    overall: bool = True,
    lines: bool = True,
    registry: DedupRegistry | None = None,
    workers: int | None = 1,
) -> tuple[Corpus, StageReport]:
    """Per-source dedup, then corpus-wide dedup, then in-document lines.

    The aggregate report carries one sub-report per enabled pass; drops
    appear under the pass that made them.
    """
    t0 = time.perf_counter()
    report = StageReport(
        stage="dedup", docs_in=len(corpus), tokens_in=corpus.total_tokens
    )
    out = corpus
    if per_source:
        out, sub = dedup_documents(
            out, cfg, group_by_source=True, stage="dedup_per_source", workers=workers
        )
        report.sub_reports.append(sub)
    if overall:
        out, sub = dedup_documents(
            out, cfg, registry=registry, stage="dedup_overall", workers=workers
        )
        report.sub_reports.append(sub)
    if lines:
        out, sub = dedup_corpus_lines(out, workers=workers)
        report.sub_reports.append(sub)
    for sub in report.sub_reports:
        for reason, n in sub.drop_reasons.items():
            report.drop_reasons[reason] = report.drop_reasons.get(reason, 0) + n
        report.drop_details.extend(sub.drop_details)
    report.docs_out = len(out)
    report.tokens_out = out.total_tokens
    report.duration_ms = int((time.perf_counter() - t0) * 1000)
    return out, report


def write_fingerprints(path: str | Path, pairs: list[tuple[str, Fingerprint]]) -> None:
    """Write an "id<TAB>hex" line per fingerprint."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id, fp in pairs:
            if "\t" in doc_id or "\n" in doc_id:
                raise DataError(f"document id {doc_id!r} cannot be stored in a sidecar")
            fh.write(f"{doc_id}\t{fp.hex}\n")
    tmp.replace(path)


def read_fingerprints(path: str | Path) -> list[tuple[str, Fingerprint]]:
    pairs = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    doc_id, hex_part = line.split("\t")
                except ValueError as exc:
                    raise DataError(
                        f"{path}:{lineno}: expected 'id<TAB>hex', got {line!r}"
                    ) from exc
                pairs.append((doc_id, Fingerprint.from_hex(hex_part)))
    except OSError as exc:
        raise DataError(f"cannot read fingerprints {path}: {exc}") from exc
    return pairs


def seed_registry(
    pairs: list[tuple[str, Fingerprint]], cfg: DedupConfig = DedupConfig()
) -> DedupRegistry:
    reg = DedupRegistry(cfg)
    for doc_id, fp in pairs:
        reg.add(fp, doc_id)
    return reg
