"""Canonical data model and line-delimited JSON I/O.

One record per line, UTF-8, field names are part of the contract:

  problem  {"id", "question", "solution_steps": [...], "golden_answer",
            "hint_prefix": [...], "source_tags": {}}
  sample   {"problem_id", "accuracy", "responses": [{"text",
            "extracted_answer", "correct", "finish_reason"}]}

Accuracies are serialized as exact fraction strings ("3/4", "1", "0")
so that read-back equality is exact. Problems and sample records are
treated as immutable once constructed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .errors import IntegrityError, ParseError, ValidationError

FINISH_REASONS = ("stop", "length", "error")

ORIGINAL = "original"
ADAPTED = "adapted"
DISCARDED = "discarded"


@dataclass
class Problem:
    id: str
    question: str
    solution_steps: list[str]
    golden_answer: str
    hint_prefix: list[str] = field(default_factory=list)
    source_tags: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.id:
            raise ValidationError("problem id must be non-empty")
        if not self.solution_steps:
            raise ValidationError(f"problem {self.id}: solution_steps must be non-empty")
        if not self.golden_answer:
            raise ValidationError(f"problem {self.id}: golden_answer must be non-empty")
        if len(self.hint_prefix) >= len(self.solution_steps):
            raise ValidationError(
                f"problem {self.id}: hint_prefix must be a proper prefix "
                f"({len(self.hint_prefix)} hints for {len(self.solution_steps)} steps)"
            )
        if self.hint_prefix != self.solution_steps[: len(self.hint_prefix)]:
            raise ValidationError(f"problem {self.id}: hint_prefix is not a prefix of solution_steps")

    @property
    def remaining_steps(self) -> list[str]:
        """Solution steps not revealed by the hint prefix."""
        return self.solution_steps[len(self.hint_prefix) :]


@dataclass
class Response:
    text: str
    extracted_answer: str | None = None
    correct: bool = False
    finish_reason: str = "stop"

    def validate(self) -> None:
        if self.finish_reason not in FINISH_REASONS:
            raise ValidationError(f"unknown finish_reason {self.finish_reason!r}")
        if self.correct and self.extracted_answer is None:
            raise ValidationError("correct response must carry an extracted_answer")


@dataclass
class SampleRecord:
    problem_id: str
    responses: list[Response]
    accuracy: Fraction

    def validate(self) -> None:
        if not self.responses:
            raise ValidationError(f"sample record {self.problem_id}: needs at least one response")
        for response in self.responses:
            response.validate()
        recomputed = Fraction(sum(r.correct for r in self.responses), len(self.responses))
        if recomputed != self.accuracy:
            raise IntegrityError(
                f"sample record {self.problem_id}: stored accuracy {self.accuracy} "
                f"!= recomputed {recomputed}"
            )


@dataclass
class CurriculumDataset:
    """Ordered difficulty buckets plus per-problem provenance.

    buckets[0] holds the highest-accuracy problems; the last bucket the
    hardest. ``provenance`` maps every input problem id to original /
    adapted / discarded; discarded ids appear in no bucket.
    """

    buckets: list[list[str]]
    provenance: dict[str, str]
    accuracy_index: dict[str, Fraction]

    def validate(self) -> None:
        seen: set[str] = set()
        for bucket in self.buckets:
            for pid in bucket:
                if pid in seen:
                    raise ValidationError(f"problem {pid} appears in more than one bucket")
                seen.add(pid)
        discarded = {pid for pid, tag in self.provenance.items() if tag == DISCARDED}
        if seen & discarded:
            raise ValidationError("discarded problems must not appear in buckets")
        if seen | discarded != set(self.provenance):
            raise ValidationError("buckets plus discards must cover the provenance map exactly")

    def bucket_of(self, problem_id: str) -> int | None:
        for index, bucket in enumerate(self.buckets):
            if problem_id in bucket:
                return index
        return None


def _parse_fraction(text: str | int | float, line: int | None = None) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad fraction value {text!r}: {exc}", line)


def problem_to_dict(problem: Problem) -> dict:
    from . import grader  # deferred: grader imports Response from this module

    return {
        "id": problem.id,
        "question": problem.question,
        "solution_steps": list(problem.solution_steps),
        "golden_answer": problem.golden_answer,
        "golden_answer_canonical": grader.normalize(problem.golden_answer).text,
        "hint_prefix": list(problem.hint_prefix),
        "source_tags": dict(problem.source_tags),
    }


def problem_from_dict(record: dict, line: int | None = None) -> Problem:
    try:
        problem = Problem(
            id=record["id"],
            question=record["question"],
            solution_steps=list(record["solution_steps"]),
            golden_answer=record["golden_answer"],
            hint_prefix=list(record.get("hint_prefix", [])),
            source_tags=dict(record.get("source_tags", {})),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed problem record: {exc!r}", line)
    problem.validate()
    return problem


def response_to_dict(response: Response) -> dict:
    return {
        "text": response.text,
        "extracted_answer": response.extracted_answer,
        "correct": response.correct,
        "finish_reason": response.finish_reason,
    }


def response_from_dict(record: dict, line: int | None = None) -> Response:
    try:
        response = Response(
            text=record["text"],
            extracted_answer=record.get("extracted_answer"),
            correct=bool(record["correct"]),
            finish_reason=record["finish_reason"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed response record: {exc!r}", line)
    response.validate()
    return response


def record_to_dict(record: SampleRecord) -> dict:
    return {
        "problem_id": record.problem_id,
        "accuracy": str(record.accuracy),
        "responses": [response_to_dict(r) for r in record.responses],
    }


def record_from_dict(record: dict, line: int | None = None) -> SampleRecord:
    try:
        sample = SampleRecord(
            problem_id=record["problem_id"],
            responses=[response_from_dict(r, line) for r in record["responses"]],
            accuracy=_parse_fraction(record["accuracy"], line),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed sample record: {exc!r}", line)
    sample.validate()
    return sample


def _read_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", number)
            if not isinstance(record, dict):
                raise ParseError("record is not a JSON object", number)
            yield number, record


def _write_jsonl(rows: Iterable[dict], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> list[Problem]:
    """Load problems in file order, rejecting duplicate ids."""
    problems: list[Problem] = []
    first_seen: dict[str, int] = {}
    for number, record in _read_jsonl(path):
        problem = problem_from_dict(record, number)
        if problem.id in first_seen:
            raise ValidationError(
                f"duplicate problem id {problem.id!r} on lines "
                f"{first_seen[problem.id]} and {number}"
            )
        first_seen[problem.id] = number
        problems.append(problem)
    return problems


def write_corpus(problems: list[Problem], path: str | Path) -> None:
    """Write problems as JSONL; validates every record before touching the file."""
    seen: set[str] = set()
    for problem in problems:
        problem.validate()
        if problem.id in seen:
            raise ValidationError(f"duplicate problem id {problem.id!r}")
        seen.add(problem.id)
    _write_jsonl((problem_to_dict(p) for p in problems), path)


def read_samples(path: str | Path) -> list[SampleRecord]:
    """Load sample records; stored accuracy must match the responses exactly."""
    return [record_from_dict(record, number) for number, record in _read_jsonl(path)]


def write_samples(records: list[SampleRecord], path: str | Path) -> None:
    for record in records:
        record.validate()
    _write_jsonl((record_to_dict(r) for r in records), path)


def index_by_id(problems: list[Problem]) -> dict[str, Problem]:
    return {p.id: p for p in problems}


def check_referential_integrity(problems: list[Problem], records: list[SampleRecord]) -> None:
    """Every record's problem_id must resolve to exactly one problem."""
    index = index_by_id(problems)
    if len(index) != len(problems):
        raise ValidationError("corpus contains duplicate ids")
    for record in records:
        if record.problem_id not in index:
            raise ValidationError(f"sample record references unknown problem {record.problem_id!r}")
