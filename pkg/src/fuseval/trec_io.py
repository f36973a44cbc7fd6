"""TREC run file and qrels parsing, canonical ordering, and serialization.

A run file has six whitespace-separated columns per line:

    topic Q0 docid rank score tag

and a qrels file has four:

    topic 0 docid grade

The rank column of a run file is read but never trusted: ranking is always
recomputed as (score descending, doc_id descending), which is the ordering
the reference evaluation tool applies internally. Canonical form is a fixed
point: parse(write(run)) == run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Iterable

from .errors import (
    DuplicateDocument,
    DuplicateJudgment,
    MalformedLine,
    RunTagMismatch,
)

DEFAULT_TOPIC_CAP = 10_000


_CANONICAL_KEY = itemgetter(1, 0)


def canonical_sort(entries: Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    """Order (doc_id, score) pairs by score descending, doc_id descending."""
    return sorted(entries, key=_CANONICAL_KEY, reverse=True)


@dataclass
class Run:
    """One system's output: per-topic ranked (doc_id, score) lists in canonical order."""

    run_tag: str
    lists: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def topics(self) -> list[str]:
        return sorted(self.lists)

    def topic_list(self, topic_id: str) -> list[tuple[str, float]]:
        return self.lists.get(topic_id, [])

    def __eq__(self, other):
        if not isinstance(other, Run):
            return NotImplemented
        return self.run_tag == other.run_tag and self.lists == other.lists


@dataclass
class Qrels:
    """Relevance judgments: topic -> doc -> integer grade (>0 relevant, 0 nonrelevant)."""

    judgments: dict[str, dict[str, int]] = field(default_factory=dict)
    negative_clamped: int = 0

    def topics(self) -> list[str]:
        return sorted(self.judgments)

    def grade(self, topic_id: str, doc_id: str) -> int | None:
        """Judged grade, or None when the pair is unjudged."""
        return self.judgments.get(topic_id, {}).get(doc_id)

    def relevant_count(self, topic_id: str) -> int:
        return sum(1 for g in self.judgments.get(topic_id, {}).values() if g > 0)

    def nonrelevant_count(self, topic_id: str) -> int:
        return sum(1 for g in self.judgments.get(topic_id, {}).values() if g == 0)

    def relevant_docs(self, topic_id: str) -> set[str]:
        return {d for d, g in self.judgments.get(topic_id, {}).items() if g > 0}


def _lines(source: str | Iterable[str]) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source


def parse_run(source: str | Iterable[str], max_per_topic: int | None = DEFAULT_TOPIC_CAP) -> Run:
    """Parse TREC run text into a canonically ordered Run.

    Accepts a string or an iterable of lines. Blank lines are skipped; an
    empty input yields an empty Run. Raises MalformedLine, DuplicateDocument
    or RunTagMismatch on bad input.
    """
    tag: str | None = None
    raw: dict[str, dict[str, float]] = {}  # per-topic doc -> score; insertion order
    isfinite = math.isfinite  # local bindings: the hot loop sees millions of lines
    for line_no, line in enumerate(_lines(source), start=1):
        fields = line.split()
        if len(fields) != 6:
            if not fields:
                continue
            raise MalformedLine(line_no, f"expected 6 fields, got {len(fields)}")
        topic_id, q0, doc_id, _rank, score_s, line_tag = fields
        if q0 != "Q0" and q0.upper() != "Q0":
            raise MalformedLine(line_no, f"expected Q0, got {q0!r}")
        try:
            score = float(score_s)
        except ValueError:
            raise MalformedLine(line_no, f"unparseable score {score_s!r}") from None
        if not isfinite(score):
            raise MalformedLine(line_no, f"non-finite score {score_s!r}")
        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            raise RunTagMismatch(tag, line_tag, line_no)
        bucket = raw.get(topic_id)
        if bucket is None:
            bucket = raw[topic_id] = {}
        if doc_id in bucket:
            raise DuplicateDocument(topic_id, doc_id)
        if max_per_topic is not None and len(bucket) >= max_per_topic:
            raise MalformedLine(line_no, f"topic {topic_id!r} exceeds cap of {max_per_topic}")
        bucket[doc_id] = score
    return Run(
        run_tag=tag or "",
        lists={t: canonical_sort(v.items()) for t, v in raw.items()},
    )


def parse_qrels(source: str | Iterable[str]) -> Qrels:
    """Parse 4-column qrels text.

    Negative grades are clamped to 0; the count of clamped lines is recorded
    on the returned Qrels. Identical duplicate judgments are de-duplicated
    silently; conflicting duplicates raise DuplicateJudgment.
    """
    judgments: dict[str, dict[str, int]] = {}
    clamped = 0
    for line_no, line in enumerate(_lines(source), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 4:
            raise MalformedLine(line_no, f"expected 4 fields, got {len(fields)}")
        topic_id, _iter, doc_id, grade_s = fields
        try:
            grade = int(grade_s)
        except ValueError:
            raise MalformedLine(line_no, f"unparseable grade {grade_s!r}") from None
        if grade < 0:
            grade = 0
            clamped += 1
        topic = judgments.setdefault(topic_id, {})
        if doc_id in topic:
            if topic[doc_id] != grade:
                raise DuplicateJudgment(topic_id, doc_id)
            continue
        topic[doc_id] = grade
    return Qrels(judgments=judgments, negative_clamped=clamped)


def format_score(score: float) -> str:
    """Render a score with 6 significant digits, keeping trailing zeros."""
    return format(score, "#.6g")


def write_run(run: Run, tag_override: str | None = None) -> str:
    """Serialize a Run as TREC text: topics ascending, rank = canonical position."""
    tag = tag_override if tag_override is not None else run.run_tag
    out = []
    rendered: dict[float, str] = {}  # scores repeat heavily; format once each
    for topic_id in sorted(run.lists):
        prefix = f"{topic_id} Q0 "
        for rank, (doc_id, score) in enumerate(run.lists[topic_id], start=1):
            text = rendered.get(score)
            if text is None:
                text = rendered[score] = format_score(score)
            out.append(f"{prefix}{doc_id} {rank} {text} {tag}")
    return "\n".join(out) + ("\n" if out else "")
