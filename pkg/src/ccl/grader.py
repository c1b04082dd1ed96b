"""Answer extraction, exact normalization, and equivalence grading.

Verdicts are exact: numeric answers are compared as rationals with no
tolerance, everything unparseable falls back to a normalized symbolic
string. The supported LaTeX surface is deliberately small (\\frac,
\\boxed, \\sqrt of perfect squares, \\pi, brace stripping); the rules are
a declared substitute for an unpublished grading script and are pinned
by the test corpus in tests/test_grader.py.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .errors import ValidationError

if TYPE_CHECKING:
    from .corpus import Response

INTEGER = "integer"
RATIONAL = "rational"
DECIMAL = "decimal"
SYMBOLIC = "symbolic"

_INT_RE = re.compile(r"^[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+)$")
_SLASH_RE = re.compile(r"^([+-]?\d+)\s*/\s*(\d+)$")
_FRAC_RE = re.compile(r"^([+-]?)\\[dt]?frac\{([+-]?\d+)\}\{([+-]?\d+)\}$")
_PERCENT_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+))\s*\\?%$")
_SQRT_RE = re.compile(r"^([+-]?)\\sqrt\{(\d+)\}$")
_ANSWER_TAG_RE = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)
_ANSWER_IS_RE = re.compile(r"answer\s+is\b[:\s]*", re.IGNORECASE)


@dataclass(frozen=True)
class CanonicalAnswer:
    """Exact canonical form of an answer string.

    kind selects the representation: integers and rationals are stored
    as reduced numerator/denominator (denominator > 0), decimals as a
    scaled integer mantissa with a base-10 exponent, and everything
    else as a whitespace-collapsed symbolic string in ``text``.
    """

    kind: str
    text: str
    numerator: int | None = None
    denominator: int | None = None
    mantissa: int | None = None
    exponent: int | None = None

    @property
    def is_numeric(self) -> bool:
        return self.kind in (INTEGER, RATIONAL, DECIMAL)

    def as_fraction(self) -> Fraction:
        if self.kind in (INTEGER, RATIONAL):
            return Fraction(self.numerator, self.denominator)
        if self.kind == DECIMAL:
            return Fraction(self.mantissa) * Fraction(10) ** self.exponent
        raise ValidationError(f"no exact numeric value for kind {self.kind!r}")


def _balanced_braces(text: str, start: int) -> str | None:
    """Content of the brace group opening at ``start``, or None if unbalanced."""
    depth = 0
    for pos in range(start, len(text)):
        ch = text[pos]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1 : pos]
    return None


def extract_answer(text: str) -> str | None:
    """Pull the raw final answer out of generated text.

    Preference order: last balanced ``\\boxed{...}``, then the last
    ``<answer>...</answer>`` pair, then whatever follows the last
    "answer is". Returns None when nothing matches; absence is a value,
    not an error.
    """
    marker = "\\boxed{"
    idx = text.rfind(marker)
    while idx != -1:
        content = _balanced_braces(text, idx + len(marker) - 1)
        if content is not None:
            return content.strip()
        idx = text.rfind(marker, 0, idx)

    tags = _ANSWER_TAG_RE.findall(text)
    if tags:
        stripped = tags[-1].strip()
        if stripped:
            return stripped

    matches = list(_ANSWER_IS_RE.finditer(text))
    if matches:
        tail = text[matches[-1].end() :].splitlines()
        if tail:
            candidate = tail[0].strip().rstrip(".").strip()
            if candidate:
                return candidate
    return None


def _strip_wrappers(s: str) -> str:
    """Peel surrounding dollar signs, \\boxed, outer braces, and edge noise."""
    prev = None
    while prev != s:
        prev = s
        s = s.strip()
        if len(s) >= 2 and s.startswith("$") and s.endswith("$"):
            s = s[1:-1]
            continue
        if s.startswith("\\boxed{"):
            inner = _balanced_braces(s, len("\\boxed"))
            if inner is not None and s == "\\boxed{" + inner + "}":
                s = inner
                continue
        if s.startswith("{") and s.endswith("}"):
            inner = _balanced_braces(s, 0)
            if inner is not None and s == "{" + inner + "}":
                s = inner
                continue
        if s.startswith("+"):
            s = s[1:]
            continue
        if s.endswith("."):
            s = s[:-1]
            continue
    return s


def _integer(value: int) -> CanonicalAnswer:
    return CanonicalAnswer(INTEGER, str(value), numerator=value, denominator=1)


def _rational(num: int, den: int) -> CanonicalAnswer:
    frac = Fraction(num, den)
    if frac.denominator == 1:
        return _integer(frac.numerator)
    text = f"{frac.numerator}/{frac.denominator}"
    return CanonicalAnswer(RATIONAL, text, numerator=frac.numerator, denominator=frac.denominator)


def _decimal(mantissa: int, exponent: int) -> CanonicalAnswer:
    while mantissa != 0 and mantissa % 10 == 0 and exponent < 0:
        mantissa //= 10
        exponent += 1
    if exponent >= 0:
        return _integer(mantissa * 10**exponent)
    digits = str(abs(mantissa)).rjust(-exponent + 1, "0")
    text = ("-" if mantissa < 0 else "") + digits[:exponent] + "." + digits[exponent:]
    return CanonicalAnswer(DECIMAL, text, mantissa=mantissa, exponent=exponent)


def _parse_decimal(s: str) -> CanonicalAnswer:
    sign = -1 if s.startswith("-") else 1
    body = s.lstrip("+-")
    whole, _, frac = body.partition(".")
    mantissa = sign * int((whole or "0") + frac)
    return _decimal(mantissa, -len(frac))


def _symbolic(s: str) -> CanonicalAnswer:
    s = s.replace("π", "\\pi")
    s = " ".join(s.split())
    return CanonicalAnswer(SYMBOLIC, s)


def normalize(raw: str) -> CanonicalAnswer:
    """Map a raw answer string to its canonical exact form.

    Deterministic and idempotent: normalizing the canonical ``text``
    again yields the same CanonicalAnswer. Unparseable input falls back
    to the symbolic kind rather than raising.
    """
    if not raw or not raw.strip():
        raise ValidationError("cannot normalize an empty answer")
    s = _strip_wrappers(raw)
    if not s:
        return _symbolic(raw.strip())

    if _INT_RE.match(s):
        return _integer(int(s))
    if _DECIMAL_RE.match(s):
        return _parse_decimal(s)

    m = _SLASH_RE.match(s)
    if m and int(m.group(2)) != 0:
        return _rational(int(m.group(1)), int(m.group(2)))

    m = _FRAC_RE.match(s)
    if m and int(m.group(3)) != 0:
        num = int(m.group(2))
        if m.group(1) == "-":
            num = -num
        return _rational(num, int(m.group(3)))

    m = _PERCENT_RE.match(s)
    if m:
        inner = normalize(m.group(1))
        if inner.is_numeric:
            frac = inner.as_fraction() / 100
            return _rational(frac.numerator, frac.denominator)

    m = _SQRT_RE.match(s)
    if m:
        radicand = int(m.group(2))
        root = math.isqrt(radicand)
        if root * root == radicand:
            return _integer(-root if m.group(1) == "-" else root)

    return _symbolic(s)


def is_equivalent(pred: CanonicalAnswer, gold: CanonicalAnswer) -> bool:
    """Exact equivalence: rational comparison for numeric kinds, normalized
    string equality for symbolic; numeric never equals symbolic."""
    if pred.is_numeric and gold.is_numeric:
        return pred.as_fraction() == gold.as_fraction()
    if pred.kind == SYMBOLIC and gold.kind == SYMBOLIC:
        return pred.text == gold.text
    return False


def grade_text(text: str, gold: CanonicalAnswer) -> tuple[str | None, bool]:
    """Extract and judge one response text; returns (raw answer, correct)."""
    raw = extract_answer(text)
    if raw is None or not raw.strip():
        return None, False
    return raw, is_equivalent(normalize(raw), gold)


def accuracy(responses: "list[Response]", gold: CanonicalAnswer) -> Fraction:
    """Fraction of responses whose answer is equivalent to the golden one.

    Also fills each response's ``extracted_answer`` and ``correct``
    fields as a side effect of grading.
    """
    if not responses:
        raise ValidationError("accuracy requires at least one response")
    hits = 0
    for response in responses:
        raw, correct = grade_text(response.text, gold)
        response.extracted_answer = raw
        response.correct = correct
        hits += correct
    return Fraction(hits, len(responses))
