"""Loaders for the three analytical artifact classes.

The upstream analysis phase drops three kinds of files into one directory:
metric lists (``.json``), tables (``.csv``) and self-contained chart
documents (``.html``). This module turns those files into validated values;
it never executes analysis code and never re-renders a chart.

Strict mode enforces the generation-phase constraints (non-empty metric
groups, table size bounds). Lenient mode downgrades those to warnings so
modification flows can carry legacy artifacts.
"""

from __future__ import annotations

import csv
import json
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from .errors import (
    ConstraintViolation,
    EmptyDocument,
    EmptyGroup,
    MalformedChart,
    MalformedCsv,
    MalformedDocument,
    MissingField,
    SchemaViolation,
)
from .model import CONFIG_SUFFIX, ComponentKind, ComponentRef

#: Strict-mode table bounds.
MIN_TABLE_ROWS = 10
TABLE_COLUMN_RANGE = (3, 5)

_METRIC_FIELDS = ("Indicator", "Value", "Unit")


class ValidationWarning(UserWarning):
    """Emitted when lenient loading downgrades a strict constraint."""


@dataclass(frozen=True)
class Metric:
    """One statistical metric: short description, value text, unit."""

    indicator: str
    value: str
    unit: str


@dataclass(frozen=True)
class MetricGroup:
    """An ordered list of metrics loaded from one JSON file."""

    name: str
    metrics: tuple[Metric, ...]


@dataclass(frozen=True)
class TableArtifact:
    """A loaded CSV table: header plus body rows, all strings."""

    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        width = len(self.header)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise MalformedCsv(
                    f"table {self.name!r}: row {index + 1} has {len(row)} cells, header has {width}"
                )


@dataclass(frozen=True)
class ChartArtifact:
    """The renderable pieces extracted from a standalone chart document.

    dependencies: external script URLs in first-occurrence document order.
    container_markup: the element the chart draws into (outer HTML).
    init_script: the inline script that targets the container.
    """

    name: str
    dependencies: tuple[str, ...]
    container_id: str
    container_markup: str
    init_script: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "dependencies", _dedupe(self.dependencies))
        if self.container_id not in self.init_script:
            raise MalformedChart(
                f"chart {self.name!r}: init script does not reference container id {self.container_id!r}"
            )
        occurrences = self.container_markup.count(self.container_id)
        if occurrences != 1:
            raise MalformedChart(
                f"chart {self.name!r}: container id {self.container_id!r} appears "
                f"{occurrences} times in container markup (expected exactly 1)"
            )


Artifact = Union[MetricGroup, ChartArtifact, TableArtifact]


@dataclass(frozen=True)
class ArtifactSet:
    """All loaded artifacts for one dashboard, names unique within each kind."""

    metrics: tuple[MetricGroup, ...] = ()
    charts: tuple[ChartArtifact, ...] = ()
    tables: tuple[TableArtifact, ...] = ()

    def __post_init__(self) -> None:
        for label, items in (("metrics", self.metrics), ("charts", self.charts), ("tables", self.tables)):
            names = [item.name for item in items]
            if len(names) != len(set(names)):
                dupes = sorted({n for n in names if names.count(n) > 1})
                raise SchemaViolation(f"duplicate {label} artifact name(s): {', '.join(dupes)}")

    @property
    def component_count(self) -> int:
        return len(self.metrics) + len(self.charts) + len(self.tables)

    def find(self, ref: ComponentRef) -> "Artifact | None":
        """Resolve a placement reference by name within its kind, or None."""
        pool: Iterable[Artifact]
        if ref.kind is ComponentKind.METRICS:
            pool = self.metrics
        elif ref.kind is ComponentKind.CHART:
            pool = self.charts
        else:
            pool = self.tables
        for artifact in pool:
            if artifact.name == ref.name:
                return artifact
        return None


def classify_artifact(path: "str | Path") -> ComponentKind:
    """Map a filename to its component kind by extension (case-insensitive)."""
    return ComponentKind.for_path(path)


def load_metrics(path: "str | Path", strict: bool = True) -> MetricGroup:
    """Load a metric-list JSON file.

    Each entry must carry Indicator, Value and Unit; Value may be a bare
    number and is coerced to text. Entry order is preserved.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"{path.name}: not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedDocument(f"{path.name}: metrics document must be a JSON list")

    metrics = []
    for index, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise MalformedDocument(f"{path.name}: entry {index} must be an object")
        values = {}
        for key in _METRIC_FIELDS:
            if key not in entry:
                raise MissingField(f"{path.name}: entry {index} missing {key!r}")
            value = entry[key]
            if key == "Value" and isinstance(value, (int, float)) and not isinstance(value, bool):
                value = str(value)
            if not isinstance(value, str):
                raise MalformedDocument(f"{path.name}: entry {index} field {key!r} must be text")
            if not value.strip():
                raise MissingField(f"{path.name}: entry {index} has empty {key!r}")
            values[key] = value
        metrics.append(Metric(values["Indicator"], values["Value"], values["Unit"]))

    if not metrics:
        if strict:
            raise EmptyGroup(f"{path.name}: metric list is empty")
        warnings.warn(f"{path.name}: metric list is empty", ValidationWarning, stacklevel=2)
    return MetricGroup(name=path.stem, metrics=tuple(metrics))


def load_table(path: "str | Path", strict: bool = True) -> TableArtifact:
    """Load a CSV table; first record is the header, no index column.

    Strict mode enforces at least 10 body rows and 3 to 5 columns.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        try:
            records = list(csv.reader(handle))
        except csv.Error as exc:
            raise MalformedCsv(f"{path.name}: {exc}") from exc
    if not records:
        raise MalformedCsv(f"{path.name}: no records")

    header = tuple(records[0])
    rows = []
    for index, record in enumerate(records[1:], start=1):
        if len(record) != len(header):
            raise MalformedCsv(
                f"{path.name}: row {index} has {len(record)} cells, header has {len(header)}"
            )
        rows.append(tuple(record))

    lo, hi = TABLE_COLUMN_RANGE
    problems = []
    if len(rows) < MIN_TABLE_ROWS:
        problems.append(f"{len(rows)} rows (minimum {MIN_TABLE_ROWS})")
    if not lo <= len(header) <= hi:
        problems.append(f"{len(header)} columns (allowed {lo} to {hi})")
    if problems:
        message = f"{path.name}: " + "; ".join(problems)
        if strict:
            raise ConstraintViolation(message)
        warnings.warn(message, ValidationWarning, stacklevel=2)

    return TableArtifact(name=path.stem, header=header, rows=tuple(rows))


# Matches a whole <script> element; group 1 = attributes, group 2 = body.
_SCRIPT_RE = re.compile(r"<script\b([^>]*)>(.*?)</script\s*>", re.IGNORECASE | re.DOTALL)
_SRC_ATTR_RE = re.compile(r"""(?:^|\s)src\s*=\s*["']([^"']+)["']""", re.IGNORECASE)
_ID_ATTR_RE = re.compile(r"""(?:^|\s)id\s*=\s*["']([^"']+)["']""", re.IGNORECASE)
_START_TAG_RE = re.compile(r"""<([a-zA-Z][a-zA-Z0-9-]*)((?:[^>"']|"[^"]*"|'[^']*')*)>""")

_VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})


def load_chart(path: "str | Path") -> ChartArtifact:
    """Extract the renderable pieces from a standalone chart document.

    Collects external script URLs in document order, then finds the first
    element whose id is referenced by an inline script; that element is the
    container and that script is the chart's init code.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise EmptyDocument(f"{path.name}: chart document is empty")

    dependencies: list[str] = []
    inline_scripts: list[str] = []
    masked = list(text)
    for match in _SCRIPT_RE.finditer(text):
        attrs, body = match.group(1), match.group(2)
        src = _SRC_ATTR_RE.search(attrs)
        if src:
            dependencies.append(src.group(1))
        elif body.strip():
            inline_scripts.append(body)
        # Blank the whole element so script bodies cannot masquerade as markup.
        for i in range(*match.span()):
            if masked[i] != "\n":
                masked[i] = " "
    masked_text = "".join(masked)

    if not inline_scripts:
        raise MalformedChart(f"{path.name}: no inline script found")

    for tag_match in _START_TAG_RE.finditer(masked_text):
        id_match = _ID_ATTR_RE.search(tag_match.group(2))
        if not id_match:
            continue
        element_id = id_match.group(1)
        for script in inline_scripts:
            if element_id and element_id in script:
                markup = _outer_html(text, masked_text, tag_match)
                if markup is None:
                    raise MalformedChart(f"{path.name}: container element {element_id!r} is never closed")
                return ChartArtifact(
                    name=path.stem,
                    dependencies=tuple(dependencies),
                    container_id=element_id,
                    container_markup=markup,
                    init_script=script.strip(),
                )

    raise MalformedChart(f"{path.name}: no element whose id is referenced by an inline script")


def load_artifact_files(
    directory: "str | Path",
    filenames: Iterable[str],
    strict: bool = True,
) -> ArtifactSet:
    """Load the named files from one artifact directory, preserving order.

    Files listed but absent on disk are skipped with a warning; a config
    placement pointing at one will surface later as a dangling reference.
    """
    directory = Path(directory)
    metrics: list[MetricGroup] = []
    charts: list[ChartArtifact] = []
    tables: list[TableArtifact] = []
    for filename in filenames:
        file_path = directory / filename
        if not file_path.is_file():
            warnings.warn(f"listed artifact missing on disk: {filename}", ValidationWarning, stacklevel=2)
            continue
        kind = classify_artifact(filename)
        if kind is ComponentKind.METRICS:
            metrics.append(load_metrics(file_path, strict=strict))
        elif kind is ComponentKind.CHART:
            charts.append(load_chart(file_path))
        else:
            tables.append(load_table(file_path, strict=strict))
    return ArtifactSet(metrics=tuple(metrics), charts=tuple(charts), tables=tuple(tables))


def load_artifact_dir(directory: "str | Path", strict: bool = True) -> ArtifactSet:
    """Load every artifact in a directory, sorted by filename.

    Config files (``*.dbconfig.json``) and unrelated extensions are ignored.
    """
    directory = Path(directory)
    names = sorted(
        entry.name
        for entry in directory.iterdir()
        if entry.is_file()
        and entry.suffix.lower() in (".json", ".csv", ".html")
        and not entry.name.endswith(CONFIG_SUFFIX)
    )
    return load_artifact_files(directory, names, strict=strict)


def _dedupe(items: Iterable[str]) -> tuple[str, ...]:
    """Drop duplicates, keeping first occurrences in order."""
    seen: set[str] = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return tuple(out)


def _outer_html(text: str, masked: str, start_match: "re.Match[str]") -> "str | None":
    """Slice the outer HTML of the element opened by start_match.

    Nesting depth is tracked on the masked document (script bodies blanked)
    and the slice is taken from the original text at the same offsets.
    """
    tag = start_match.group(1).lower()
    start, after_open = start_match.span()
    if start_match.group(0).rstrip().endswith("/>") or tag in _VOID_ELEMENTS:
        return text[start:after_open]

    token_re = re.compile(rf"<{re.escape(tag)}\b[^>]*>|</{re.escape(tag)}\s*>", re.IGNORECASE)
    depth = 1
    for token in token_re.finditer(masked, after_open):
        if token.group(0).startswith("</"):
            depth -= 1
            if depth == 0:
                return text[start:token.end()]
        elif not token.group(0).endswith("/>"):
            depth += 1
    return None
