"""Generative overhead ratio: LLM output tokens per dashboard token.

Counting uses a lexical tokenizer: maximal runs of letters/digits are one
token each, every other non-whitespace character is one token, whitespace
only delimits. That is a proxy for model tokenizers, so ratios are
meaningful for ordering comparisons, not as absolute reproductions of any
particular provider's billing counts - the reports say so.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import EmptyDashboard, TokenizerMismatch

DEFAULT_TOKENIZER_ID = "lexical-v1"

TOKENIZER_NOTE = (
    "token counts use a lexical tokenizer; ratios support ordering "
    "comparisons, not provider-accurate absolute values"
)

# Alternation order matters: alnum runs first, then any single non-space char.
_TOKEN_RE = re.compile(r"[^\W_]+|\S")


def count_tokens(text: str) -> int:
    """Token count under the default lexical tokenizer."""
    if not text:
        return 0
    return len(_TOKEN_RE.findall(text))


@dataclass(frozen=True)
class GorReport:
    """Token counts for one LLM output / dashboard pair."""

    tokens_llm: int
    tokens_db: int
    tokenizer_id: str = DEFAULT_TOKENIZER_ID

    def __post_init__(self) -> None:
        if self.tokens_llm < 0:
            raise ValueError(f"tokens_llm must be non-negative, got {self.tokens_llm}")
        if self.tokens_db <= 0:
            raise EmptyDashboard("dashboard token count must be positive")

    @property
    def ratio(self) -> Fraction:
        """Exact overhead ratio; lower means cheaper per dashboard token."""
        return Fraction(self.tokens_llm, self.tokens_db)

    def to_json_dict(self) -> dict:
        return {
            "tokens_llm": self.tokens_llm,
            "tokens_db": self.tokens_db,
            "ratio": float(self.ratio),
            "tokenizer_id": self.tokenizer_id,
            "note": TOKENIZER_NOTE,
        }


def gor(llm_output: str, dashboard_file: str) -> GorReport:
    """Build a report for one LLM output against one dashboard document.

    Both counts use the same tokenizer. Raises EmptyDashboard when the
    dashboard text has no tokens at all.
    """
    tokens_db = count_tokens(dashboard_file)
    if tokens_db == 0:
        raise EmptyDashboard("dashboard text is empty; ratio is undefined")
    return GorReport(tokens_llm=count_tokens(llm_output), tokens_db=tokens_db)


def ensure_same_tokenizer(reports: Iterable[GorReport]) -> None:
    """Reject ratio comparisons across reports from different tokenizers."""
    ids = {report.tokenizer_id for report in reports}
    if len(ids) > 1:
        raise TokenizerMismatch(f"reports mix tokenizers: {', '.join(sorted(ids))}")
