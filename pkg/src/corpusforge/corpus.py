"""Document model, token accounting, and streaming JSONL corpus I/O.

A corpus is an ordered sequence of immutable Document records exchanged
as JSON Lines (UTF-8, one object per line, LF endings). Token counts are
whitespace-token counts by default; pass a different tokenizer to
``count_tokens`` (or the readers) to substitute a subword tokenizer.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, IO, Iterable, Iterator

from .errors import CorpusError

Tokenizer = Callable[[str], list[str]]

# JSONL field order is fixed so serialization is byte-stable.
_FIELD_ORDER = ("id", "source", "text", "meta", "token_count")


def whitespace_tokens(text: str) -> list[str]:
    """Maximal runs of non-whitespace characters (Unicode whitespace rules)."""
    return text.split()


def count_tokens(text: str, tokenizer: Tokenizer = whitespace_tokens) -> int:
    """Number of tokens in ``text``; 0 for empty or all-whitespace input."""
    return len(tokenizer(text))


def _strip_surrogates(text: str) -> str:
    """Drop unpaired UTF-16 surrogate codepoints left over from JSON escapes."""
    if any("\ud800" <= ch <= "\udfff" for ch in text):
        return "".join(ch for ch in text if not "\ud800" <= ch <= "\udfff")
    return text


@dataclass(frozen=True)
class Document:
    """One corpus record. ``token_count`` is derived from ``text`` when omitted."""

    id: str
    source: str
    text: str
    meta: dict[str, str] = field(default_factory=dict)
    token_count: int | None = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if self.token_count is None:
            object.__setattr__(self, "token_count", count_tokens(self.text))

    def with_text(self, text: str) -> "Document":
        """Copy with new text and a recomputed token count."""
        return replace(self, text=text, token_count=count_tokens(text))

    def with_id(self, doc_id: str) -> "Document":
        return replace(self, id=doc_id)


@dataclass
class Corpus:
    """Ordered document container; iteration order is ingestion order."""

    docs: list[Document] = field(default_factory=list)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.docs)

    def __len__(self) -> int:
        return len(self.docs)

    def __getitem__(self, i):
        return self.docs[i]

    @property
    def total_tokens(self) -> int:
        return sum(d.token_count for d in self.docs)

    def source_counts(self) -> dict[str, int]:
        """Documents per source tag, in order of first appearance."""
        counts: dict[str, int] = {}
        for d in self.docs:
            counts[d.source] = counts.get(d.source, 0) + 1
        return counts

    def source_tokens(self) -> dict[str, int]:
        """Token totals per source tag, in order of first appearance."""
        totals: dict[str, int] = {}
        for d in self.docs:
            totals[d.source] = totals.get(d.source, 0) + d.token_count
        return totals

    def check_unique_ids(self) -> None:
        seen: set[str] = set()
        for d in self.docs:
            if d.id in seen:
                raise CorpusError(f"duplicate document id {d.id!r}")
            seen.add(d.id)


def iter_jsonl(
    path: str | Path,
    source_default: str | None = None,
    tokenizer: Tokenizer = whitespace_tokens,
) -> Iterator[Document]:
    """Stream Documents from a JSONL file in file order.

    Each line must be a JSON object with string fields "id" and "text";
    "source" and "meta" are optional. A leading UTF-8 BOM is stripped,
    blank lines are skipped, and unpaired surrogates are removed from the
    text. Malformed lines raise CorpusError with the line number and byte
    offset; a repeated id raises CorpusError naming both lines.
    """
    path = Path(path)
    if source_default is None:
        source_default = path.stem
    seen: dict[str, int] = {}
    offset = 0
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line_offset = offset
            offset += len(raw)
            if lineno == 1 and raw.startswith(b"\xef\xbb\xbf"):
                raw = raw[3:]
            stripped = raw.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise CorpusError(
                    f"{path}: line {lineno} (byte offset {line_offset}): "
                    f"invalid JSON: {exc}"
                ) from exc
            if not isinstance(obj, dict):
                raise CorpusError(
                    f"{path}: line {lineno} (byte offset {line_offset}): "
                    "expected a JSON object"
                )
            doc = _doc_from_record(obj, path, lineno, source_default, tokenizer)
            if doc.id in seen:
                raise CorpusError(
                    f"{path}: duplicate id {doc.id!r} on lines "
                    f"{seen[doc.id]} and {lineno}"
                )
            seen[doc.id] = lineno
            yield doc


def _doc_from_record(
    obj: dict,
    path: Path,
    lineno: int,
    source_default: str,
    tokenizer: Tokenizer,
) -> Document:
    where = f"{path}: line {lineno}"
    doc_id = obj.get("id")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"{where}: missing or non-string 'id'")
    if not isinstance(text, str):
        raise CorpusError(f"{where}: missing or non-string 'text'")
    source = obj.get("source", source_default)
    if not isinstance(source, str):
        raise CorpusError(f"{where}: 'source' must be a string")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
    ):
        raise CorpusError(f"{where}: 'meta' must be a string-to-string map")
    text = _strip_surrogates(text)
    return Document(
        id=doc_id,
        source=source,
        text=text,
        meta=dict(meta),
        token_count=count_tokens(text, tokenizer),
    )


def read_jsonl(
    path: str | Path,
    source_default: str | None = None,
    tokenizer: Tokenizer = whitespace_tokens,
) -> Corpus:
    """Load a whole JSONL file into a Corpus (see ``iter_jsonl``)."""
    return Corpus(list(iter_jsonl(path, source_default, tokenizer)))


def _record(doc: Document) -> dict:
    return {name: getattr(doc, name) for name in _FIELD_ORDER}


def dump_jsonl(corpus: Corpus | Iterable[Document], fp: IO[str]) -> None:
    """Write documents to an open text stream, one JSON object per line."""
    for doc in corpus:
        fp.write(json.dumps(_record(doc), ensure_ascii=False))
        fp.write("\n")


def write_jsonl(corpus: Corpus | Iterable[Document], path: str | Path) -> None:
    """Write a corpus to ``path`` atomically (temp file + rename).

    Output is UTF-8 with LF line endings and a fixed field order
    (id, source, text, meta, token_count), so repeated writes of equal
    corpora are byte-identical.
    """
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            dump_jsonl(corpus, fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
