"""Conversational prompt templates.

One template serves plain and hinted questions: hints are appended to
the user turn inside a fenced "Partial solution:" block. The fence is
lengthened when a hint step happens to contain it, so the block can
always be recovered verbatim by extract_hint_block.
"""

from __future__ import annotations

import re

SYSTEM_PROMPT = (
    "You are a careful mathematical reasoner. Work through the problem "
    "step by step inside <think> </think> tags, then give only the final "
    "answer inside <answer> </answer> tags."
)

HINT_HEADER = "Partial solution (continue from these steps):"

_FENCE_BASE = "partial-solution"


def _fence_tag(steps: list[str]) -> str:
    """Smallest fence label that no hint step collides with."""
    body = "\n".join(steps)
    label = _FENCE_BASE
    counter = 1
    while f"</{label}>" in body or f"<{label}>" in body:
        counter += 1
        label = f"{_FENCE_BASE}-{counter}"
    return label


def render_user_turn(question: str, hint_steps: list[str] | None = None) -> str:
    if not hint_steps:
        return question
    label = _fence_tag(hint_steps)
    block = "\n".join(hint_steps)
    return f"{question}\n\n{HINT_HEADER}\n<{label}>\n{block}\n</{label}>"


def build_messages(question: str, hint_steps: list[str] | None = None) -> list[dict[str, str]]:
    """Chat-completions message list for a (possibly hinted) question."""
    return [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": render_user_turn(question, hint_steps)},
    ]


def extract_hint_block(user_turn: str) -> str | None:
    """Recover the verbatim hint block from a rendered user turn."""
    match = re.search(
        rf"{re.escape(HINT_HEADER)}\n<({_FENCE_BASE}(?:-\d+)?)>\n(.*)\n</\1>\s*$",
        user_turn,
        re.DOTALL,
    )
    return match.group(2) if match else None
