"""Corpus-level BLEU with 4-gram clipped precision.

Scores are on a 0-100 scale. Tokenization is whitespace splitting and
each hypothesis has a single reference. Clipped n-gram counts are summed
over the whole test set before dividing, the four orders get uniform 1/4
weights, and a brevity penalty of exp(1 - ref/hyp) applies when the
hypothesis side is shorter.

Smoothing "epsilon" replaces a zero precision with 1/(2 * total n-grams
of that order); with no n-grams at all (every hypothesis shorter than the
order) the precision stays 0 and the score is 0. Smoothing "none" leaves
zeros alone, so any zero precision also zeroes the score.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

from .errors import ConfigError, DataError

_ORDERS = (1, 2, 3, 4)
SMOOTHINGS = ("none", "epsilon")


@dataclass(frozen=True)
class BleuResult:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        }


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    hypotheses: list[str], references: list[str], smoothing: str = "epsilon"
) -> BleuResult:
    """BLEU over aligned hypothesis and single-reference lists."""
    if smoothing not in SMOOTHINGS:
        raise ConfigError(f"smoothing must be one of {SMOOTHINGS}, got {smoothing!r}")
    if len(hypotheses) != len(references):
        raise DataError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise DataError("empty test set")

    hyp_tokens = [h.split() for h in hypotheses]
    ref_tokens = [r.split() for r in references]
    hyp_length = sum(len(t) for t in hyp_tokens)
    ref_length = sum(len(t) for t in ref_tokens)

    precisions = []
    for n in _ORDERS:
        clipped = 0
        total = 0
        for hyp, ref in zip(hyp_tokens, ref_tokens):
            total += max(len(hyp) - n + 1, 0)
            if len(hyp) >= n:
                clipped += sum((_ngrams(hyp, n) & _ngrams(ref, n)).values())
        if total == 0:
            p = 0.0
        elif clipped == 0 and smoothing == "epsilon":
            p = 1.0 / (2 * total)
        else:
            p = clipped / total
        precisions.append(p)

    if hyp_length == 0:
        bp = 0.0
    elif hyp_length >= ref_length:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_length / hyp_length)

    if min(precisions) == 0.0 or bp == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / len(precisions)) * 100.0
    return BleuResult(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_length=hyp_length,
        ref_length=ref_length,
    )


@dataclass(frozen=True)
class EvalSet:
    """One test set: references plus each system's aligned outputs."""

    name: str
    references: tuple[str, ...]
    hypotheses: dict[str, tuple[str, ...]]

    def __post_init__(self):
        if not self.name:
            raise ConfigError("test set needs a name")
        if not self.references:
            raise DataError(f"test set {self.name!r} has no references")
        for system, hyps in self.hypotheses.items():
            if len(hyps) != len(self.references):
                raise DataError(
                    f"set {self.name!r}, system {system!r}: "
                    f"{len(hyps)} hypotheses vs {len(self.references)} references"
                )


def evaluate_sets(
    sets: list[EvalSet], smoothing: str = "epsilon"
) -> dict[str, dict[str, BleuResult]]:
    """Score every system on every set: scores[set_name][system]."""
    names = [s.name for s in sets]
    if len(names) != len(set(names)):
        raise ConfigError(f"duplicate test set names in {names}")
    return {
        s.name: {
            system: corpus_bleu(list(hyps), list(s.references), smoothing)
            for system, hyps in s.hypotheses.items()
        }
        for s in sets
    }


def _system_order(sets: list[EvalSet]) -> list[str]:
    seen: dict[str, None] = {}
    for s in sets:
        for system in s.hypotheses:
            seen.setdefault(system)
    return list(seen)


def compare_systems(
    sets: list[EvalSet], smoothing: str = "epsilon", fmt: str = "table"
) -> str:
    """Systems-by-sets score grid; "*" marks the best score per set.

    A system absent from a set renders as "-". JSON output keeps full
    precision; the table rounds to 2 decimals.
    """
    scores = evaluate_sets(sets, smoothing)
    systems = _system_order(sets)
    if fmt == "json":
        payload = {
            "smoothing": smoothing,
            "systems": systems,
            "sets": [s.name for s in sets],
            "scores": {
                name: {sys: res.to_dict() for sys, res in per_set.items()}
                for name, per_set in scores.items()
            },
        }
        return json.dumps(payload, ensure_ascii=False, indent=2)
    if fmt != "table":
        raise ConfigError(f"fmt must be 'table' or 'json', got {fmt!r}")

    best = {
        s.name: max(
            (res.score for res in scores[s.name].values()), default=None
        )
        for s in sets
    }
    header = ["System"] + [s.name for s in sets]
    rows = [header]
    for system in systems:
        row = [system]
        for s in sets:
            res = scores[s.name].get(system)
            if res is None:
                row.append("-")
            else:
                mark = "*" if res.score == best[s.name] else ""
                row.append(f"{res.score:.2f}{mark}")
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [
            c.rjust(widths[j + 1]) for j, c in enumerate(row[1:])
        ]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
