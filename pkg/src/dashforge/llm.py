"""LLM plumbing: wire-format extraction, prompt expansion, providers.

Three wire formats come back from the model:

* an intent word wrapped in a ``<result>`` block,
* an ordered list of produced filenames wrapped in a ``<result>`` block,
* a modify script inside a ```` ```json ```` fenced block.

Extractors are pure functions over the verbatim response text. When a
response carries several ``<result>`` blocks (models often echo the
instructions before complying), intent detection reads the first block and
file extraction reads the last.

Providers hide where completions come from: HttpProvider posts to a
chat-completion-compatible endpoint, ScriptedProvider replays a recorded
transcript so whole pipelines are bit-reproducible in tests.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import requests

from .errors import (
    MalformedDocument,
    MalformedList,
    MissingJsonBlock,
    MissingPlaceholder,
    MissingResultBlock,
    ProviderError,
    TranscriptMismatch,
    UnknownIntent,
)
from .model import DashboardConfig, serialize_config

API_KEY_ENV = "DASHFORGE_API_KEY"

USER_TABLE_PLACEHOLDER = "{{USER_TABLE}}"
USER_QUERY_PLACEHOLDER = "{{USER_QUERY}}"
DBCONFIG_PLACEHOLDER = "{{DBCONFIG}}"

_RESULT_RE = re.compile(r"<result>(.*?)</result>", re.DOTALL)
_JSON_FENCE_RE = re.compile(r"```json\s*\n?(.*?)```", re.DOTALL)
_QUOTED_ITEM_RE = re.compile(r"\"([^\"]*)\"|'([^']*)'")
_FILE_LIST_RE = re.compile(
    r"\A\[\s*(?:(?:\"[^\"]*\"|'[^']*')(?:\s*,\s*(?:\"[^\"]*\"|'[^']*'))*\s*,?\s*)?\]\Z",
    re.DOTALL,
)


class Intent(enum.Enum):
    """What the user wants done, as declared by the model."""

    GENERATION = "generation"
    MODIFY = "modify"


def detect_intent(response: str) -> Intent:
    """Read the intent word from the first <result> block, case-sensitive."""
    match = _RESULT_RE.search(response)
    if not match:
        raise MissingResultBlock("response has no <result>...</result> block")
    word = match.group(1).strip()
    try:
        return Intent(word)
    except ValueError:
        raise UnknownIntent(f"expected 'generation' or 'modify', got {word!r}") from None


def extract_result_files(response: str) -> list[str]:
    """Parse the filename list from the last <result> block, in order."""
    matches = _RESULT_RE.findall(response)
    if not matches:
        raise MissingResultBlock("response has no <result>...</result> block")
    content = matches[-1].strip()
    if not _FILE_LIST_RE.match(content):
        raise MalformedList(f"result block is not a bracketed list of quoted filenames: {content!r}")
    return [a if b == "" else b for a, b in _QUOTED_ITEM_RE.findall(content)]


def extract_modify_script(response: str) -> tuple[str, list[str]]:
    """Pull the first ```json block and the new-file list, if any.

    Returns (script JSON text, filenames); the file list is empty when the
    response carries no <result> block. Both parts go on to the script
    parser untouched.
    """
    match = _JSON_FENCE_RE.search(response)
    if not match:
        raise MissingJsonBlock("response has no ```json fenced block")
    script_text = match.group(1).strip()
    try:
        files = extract_result_files(response)
    except MissingResultBlock:
        files = []
    return script_text, files


# --- table schema ------------------------------------------------------------

_DATE_RE = re.compile(r"\d{4}[-/]\d{1,2}(?:[-/]\d{1,2})?\Z")

NUMERIC = "numeric"
TEXT = "text"
DATE = "date"


@dataclass(frozen=True)
class TableSchema:
    """Shape of a user table: column names, value categories, sample rows."""

    columns: tuple[str, ...]
    categories: tuple[str, ...]
    sample_rows: tuple[tuple[str, ...], ...]
    total_rows: int = 0

    def __post_init__(self) -> None:
        if len(self.categories) != len(self.columns):
            raise ValueError("one category per column required")
        for row in self.sample_rows:
            if len(row) != len(self.columns):
                raise ValueError("sample row width must match column count")

    @classmethod
    def from_rows(
        cls,
        header: Sequence[str],
        rows: Sequence[Sequence[str]],
        sample_rows: int = 5,
    ) -> "TableSchema":
        categories = tuple(
            _infer_category([row[i] for row in rows if i < len(row)])
            for i in range(len(header))
        )
        sample = tuple(tuple(row) for row in rows[:sample_rows])
        return cls(tuple(header), categories, sample, total_rows=len(rows))

    @classmethod
    def from_csv(cls, path: "str | Path", sample_rows: int = 5) -> "TableSchema":
        with open(path, encoding="utf-8", newline="") as handle:
            records = list(csv.reader(handle))
        if not records:
            raise MalformedDocument(f"{Path(path).name}: table has no records")
        return cls.from_rows(records[0], records[1:], sample_rows=sample_rows)

    def render(self) -> str:
        """Human-readable schema text injected into prompts."""
        lines = ["Columns (name: type):"]
        lines += [f"- {name}: {cat}" for name, cat in zip(self.columns, self.categories)]
        lines.append(f"Sample rows (first {len(self.sample_rows)} of {self.total_rows}):")
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.sample_rows)
        lines.append(buffer.getvalue().rstrip("\n"))
        return "\n".join(lines)


def _infer_category(values: list[str]) -> str:
    non_empty = [v for v in values if v.strip()]
    if not non_empty:
        return TEXT
    if all(_DATE_RE.match(v.strip()) for v in non_empty):
        return DATE
    try:
        for v in non_empty:
            float(v)
    except ValueError:
        return TEXT
    return NUMERIC


# --- prompt templates ---------------------------------------------------------

_PROMPT_DIR = Path(__file__).parent / "prompts"
_PROMPT_REQUIREMENTS = {
    "intent": (USER_QUERY_PLACEHOLDER,),
    "generation": (USER_TABLE_PLACEHOLDER, USER_QUERY_PLACEHOLDER),
    "modification": (USER_TABLE_PLACEHOLDER, USER_QUERY_PLACEHOLDER, DBCONFIG_PLACEHOLDER),
}
_prompt_cache: dict[str, str] = {}


def load_prompt_template(name: str, path: "str | Path | None" = None) -> str:
    """Load a prompt template, checking its required placeholders are present."""
    required = _PROMPT_REQUIREMENTS[name]
    if path is None:
        if name in _prompt_cache:
            return _prompt_cache[name]
        path = _PROMPT_DIR / f"{name}.txt"
    text = Path(path).read_text(encoding="utf-8")
    for placeholder in required:
        if placeholder not in text:
            raise MissingPlaceholder(f"prompt template {name!r} lacks {placeholder}")
    if Path(path).parent == _PROMPT_DIR:
        _prompt_cache[name] = text
    return text


def expand_intent_prompt(user_prompt: str) -> str:
    """Instantiate the intent-detection prompt."""
    template = load_prompt_template("intent")
    return template.replace(USER_QUERY_PLACEHOLDER, user_prompt)


def expand_generation_prompt(user_prompt: str, schema: TableSchema) -> str:
    """Instantiate the generation prompt with the table schema injected."""
    template = load_prompt_template("generation")
    return template.replace(USER_TABLE_PLACEHOLDER, schema.render()).replace(
        USER_QUERY_PLACEHOLDER, user_prompt
    )


def expand_modification_prompt(
    user_prompt: str,
    schema: TableSchema,
    prior_config: DashboardConfig,
) -> str:
    """Instantiate the modification prompt with schema and prior config."""
    template = load_prompt_template("modification")
    config_text = serialize_config(prior_config).decode("utf-8")
    return (
        template.replace(USER_TABLE_PLACEHOLDER, schema.render())
        .replace(USER_QUERY_PLACEHOLDER, user_prompt)
        .replace(DBCONFIG_PLACEHOLDER, config_text)
    )


# --- providers ----------------------------------------------------------------

@dataclass(frozen=True)
class Exchange:
    """One completed round trip, recorded verbatim."""

    prompt: str
    response: str
    provider_id: str
    sent_at: float
    received_at: float


class Provider(Protocol):
    """Anything that can complete a prompt into response text."""

    provider_id: str

    def complete(self, prompt: str) -> str: ...


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class ScriptedProvider:
    """Replays a recorded transcript deterministically, in order.

    Each completion must match the next recorded entry's prompt hash
    exactly; any drift raises TranscriptMismatch. Not thread-safe: one
    in-flight completion per instance.
    """

    entries: list[dict]
    provider_id: str = "scripted"
    exchanges: list[Exchange] = field(default_factory=list)
    _cursor: int = 0

    @classmethod
    def from_file(cls, path: "str | Path") -> "ScriptedProvider":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"transcript {Path(path).name}: {exc}") from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("exchanges"), list):
            raise MalformedDocument(f"transcript {Path(path).name}: expected an 'exchanges' list")
        for index, entry in enumerate(doc["exchanges"]):
            if not isinstance(entry, dict) or "prompt_sha256" not in entry or "response" not in entry:
                raise MalformedDocument(
                    f"transcript {Path(path).name}: exchange {index} needs prompt_sha256 and response"
                )
        return cls(entries=list(doc["exchanges"]))

    def complete(self, prompt: str) -> str:
        sent = time.time()
        if self._cursor >= len(self.entries):
            raise TranscriptMismatch(f"transcript exhausted after {len(self.entries)} exchange(s)")
        entry = self.entries[self._cursor]
        digest = _sha256(prompt)
        if digest != entry["prompt_sha256"]:
            raise TranscriptMismatch(
                f"exchange {self._cursor}: prompt hash {digest[:12]}... does not match "
                f"recorded {entry['prompt_sha256'][:12]}..."
            )
        self._cursor += 1
        response = entry["response"]
        self.exchanges.append(Exchange(prompt, response, self.provider_id, sent, time.time()))
        return response


def write_transcript(path: "str | Path", pairs: Sequence[tuple[str, str]]) -> None:
    """Record ordered (prompt, response) pairs as a replayable transcript."""
    doc = {
        "exchanges": [
            {"prompt_sha256": _sha256(prompt), "prompt": prompt, "response": response}
            for prompt, response in pairs
        ]
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=4) + "\n", encoding="utf-8")


class HttpProvider:
    """Calls a chat-completion-compatible HTTP endpoint.

    The API key comes from the DASHFORGE_API_KEY environment variable unless
    passed explicitly. Not thread-safe: one in-flight completion per
    instance.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: "str | None" = None,
        timeout: float = 120.0,
    ) -> None:
        self.base_url = base_url
        self.model = model
        self.timeout = timeout
        self.provider_id = f"http:{model}"
        self.exchanges: list[Exchange] = []
        key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        if not key:
            raise ProviderError(f"no API key: set {API_KEY_ENV} or pass api_key")
        self._api_key = key

    def complete(self, prompt: str) -> str:
        sent = time.time()
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {
            "Authorization": f"Bearer {self._api_key}",
            "Content-Type": "application/json",
        }
        try:
            reply = requests.post(self.base_url, json=payload, headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"completion request failed: {exc}") from exc
        if reply.status_code != 200:
            raise ProviderError(f"completion endpoint returned HTTP {reply.status_code}")
        try:
            response = reply.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected completion response shape: {exc}") from exc
        if not isinstance(response, str):
            raise ProviderError("completion content is not text")
        self.exchanges.append(Exchange(prompt, response, self.provider_id, sent, time.time()))
        return response
