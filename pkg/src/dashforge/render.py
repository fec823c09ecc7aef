"""Deterministic dashboard compilation via template slot filling.

A base template is an HTML document with ``{{name}}`` placeholders and a
sidecar manifest declaring its columns (column arity is not discoverable
from the HTML alone). Compilation converts each placed artifact into an
HTML fragment, concatenates fragments per column in row order, and fills
every slot. Identical inputs produce byte-identical output; nothing here
consults a clock, the filesystem layout, or any other ambient state.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from html import escape
from pathlib import Path
from typing import Mapping

from .artifacts import ArtifactSet, ChartArtifact, MetricGroup, TableArtifact
from .errors import (
    DanglingRef,
    EmptyGroup,
    IdCollision,
    MalformedDocument,
    MissingRequiredSlot,
    SchemaViolation,
    TemplateColumnMismatch,
    UnfilledSlot,
    UnknownSlotValue,
    UnknownTemplate,
)
from .model import ORDERS, POSITIONS, ComponentKind, ComponentRef, Coordinate, DashboardConfig

TITLE_SLOT = "title"
FOOTNOTE_SLOT = "footnote"
FONT_COLOR_SLOT = "font-color"
DEPENDENCE_SLOT = "TODO-DEPENDENCE"
JS_SLOT = "TODO-JS-Chart"

#: Default cap on table body rows at render time (top-K presentation).
DEFAULT_ROW_CAP = 10

SLOT_RE = re.compile(r"\{\{([A-Za-z0-9-]+)\}\}")

SlotValues = Mapping[str, str]


def column_slot(position: str) -> str:
    """Slot name holding a column's concatenated fragments."""
    return f"TODO-{position.upper()}-COLUMN-CONTENT"


@dataclass(frozen=True)
class BaseTemplate:
    """A slotted HTML document plus its declared column layout."""

    id: str
    columns: tuple[str, ...]
    body: str
    slots: frozenset[str]
    optional_slots: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not set(self.columns) <= set(POSITIONS) or len(self.columns) < 2:
            raise SchemaViolation(
                f"template {self.id!r} must declare at least 2 of {', '.join(POSITIONS)}"
            )
        if len(set(self.columns)) != len(self.columns):
            raise SchemaViolation(f"template {self.id!r} declares duplicate columns")

    @property
    def capacity(self) -> int:
        return len(self.columns) * len(ORDERS)

    def required_slots(self) -> frozenset[str]:
        return frozenset(
            {TITLE_SLOT, FOOTNOTE_SLOT, DEPENDENCE_SLOT, JS_SLOT}
            | {column_slot(position) for position in self.columns}
        )


@dataclass(frozen=True)
class PlacedFragment:
    """Manifest entry: what was placed where, and how large it rendered."""

    coordinate: Coordinate
    ref: ComponentRef
    byte_length: int


@dataclass(frozen=True)
class RenderOutput:
    """A compiled dashboard document and its placement manifest."""

    html: str
    manifest: tuple[PlacedFragment, ...]

    def __post_init__(self) -> None:
        leftover = SLOT_RE.search(self.html)
        if leftover:
            raise UnfilledSlot(f"rendered output still contains placeholder {leftover.group(0)!r}")


class TemplateRegistry:
    """Loads templates from ``<root>/<id>/template.html`` + ``manifest.json``."""

    def __init__(self, root: "str | Path") -> None:
        self.root = Path(root)

    def ids(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(
            entry.name
            for entry in self.root.iterdir()
            if entry.is_dir() and (entry / "template.html").is_file()
        )

    def load(self, template_id: str) -> BaseTemplate:
        """Load and check a template; all required slots must be present."""
        base_dir = self.root / template_id
        html_path = base_dir / "template.html"
        manifest_path = base_dir / "manifest.json"
        if not html_path.is_file() or not manifest_path.is_file():
            raise UnknownTemplate(
                f"no template {template_id!r} under {self.root} "
                f"(known: {', '.join(self.ids()) or 'none'})"
            )

        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"template {template_id!r}: bad manifest: {exc}") from exc
        if not isinstance(manifest, dict) or not isinstance(manifest.get("columns"), list):
            raise SchemaViolation(f"template {template_id!r}: manifest must declare a columns list")
        if manifest.get("id") != template_id:
            raise SchemaViolation(
                f"template {template_id!r}: manifest id {manifest.get('id')!r} does not match directory"
            )
        declared = manifest["columns"]
        # Canonical order regardless of how the manifest lists them.
        columns = tuple(p for p in POSITIONS if p in declared)
        if len(columns) != len(declared):
            raise SchemaViolation(f"template {template_id!r}: unknown column in manifest: {declared!r}")
        optional = manifest.get("optional_slots", [])
        if not isinstance(optional, list):
            raise SchemaViolation(f"template {template_id!r}: optional_slots must be a list")

        body = html_path.read_text(encoding="utf-8")
        slots = frozenset(SLOT_RE.findall(body))
        template = BaseTemplate(
            id=template_id,
            columns=columns,
            body=body,
            slots=slots,
            optional_slots=frozenset(optional),
        )
        missing = sorted(template.required_slots() - slots)
        if missing:
            raise MissingRequiredSlot(f"template {template_id!r} lacks slot(s): {', '.join(missing)}")
        return template


def default_registry() -> TemplateRegistry:
    """Registry over the templates bundled with the package."""
    return TemplateRegistry(Path(__file__).parent / "templates")


def fragment_metrics(group: MetricGroup) -> str:
    """One panel of stacked stat cards, one card per metric, in order."""
    if not group.metrics:
        raise EmptyGroup(f"metric group {group.name!r} has no entries to render")
    cards = []
    for metric in group.metrics:
        cards.append(
            '<div class="stat-card">\n'
            f'<div class="stat-indicator">{escape(metric.indicator)}</div>\n'
            f'<div class="stat-value">{escape(metric.value)}</div>\n'
            f'<div class="stat-unit">{escape(metric.unit)}</div>\n'
            "</div>"
        )
    return '<div class="stat-panel">\n' + "\n".join(cards) + "\n</div>"


def fragment_table(table: TableArtifact, row_cap: int = DEFAULT_ROW_CAP) -> str:
    """Header plus at most row_cap body rows, every cell HTML-escaped."""
    head = "".join(f"<th>{escape(cell)}</th>" for cell in table.header)
    body_rows = []
    for row in table.rows[:row_cap]:
        cells = "".join(f"<td>{escape(cell)}</td>" for cell in row)
        body_rows.append(f"<tr>{cells}</tr>")
    return (
        '<div class="table-panel">\n<table class="data-table">\n'
        f"<thead><tr>{head}</tr></thead>\n<tbody>\n"
        + "\n".join(body_rows)
        + "\n</tbody>\n</table>\n</div>"
    )


def fragment_chart(chart: ChartArtifact, coordinate: Coordinate) -> tuple[str, str, tuple[str, ...]]:
    """Rewrite a chart onto its coordinate-derived container id.

    Returns (container fragment, init-script fragment, dependencies). The
    rewritten id is chart-<position>-<order>, so co-existing charts can
    never collide; upstream ids are whatever the charting tool generated.
    """
    new_id = f"chart-{coordinate.position}-{coordinate.order}"
    container = chart.container_markup.replace(chart.container_id, new_id)
    init = chart.init_script.replace(chart.container_id, new_id)
    return container, init, chart.dependencies


def fill_slots(template: BaseTemplate, values: SlotValues, strict: bool = False) -> str:
    """Replace every placeholder occurrence; one value fills all occurrences.

    Values must cover all template slots. Strict mode also rejects values
    for slots the template does not declare. Replacement is single-pass, so
    slot values themselves are never re-interpreted.
    """
    missing = sorted(template.slots - set(values))
    if missing:
        raise UnfilledSlot(f"no value for slot(s): {', '.join(missing)}")
    if strict:
        extra = sorted(set(values) - template.slots)
        if extra:
            raise UnknownSlotValue(f"value(s) for undeclared slot(s): {', '.join(extra)}")
    return SLOT_RE.sub(lambda match: values[match.group(1)], template.body)


def compile_dashboard(
    config: DashboardConfig,
    artifacts: ArtifactSet,
    registry: TemplateRegistry,
    row_cap: int = DEFAULT_ROW_CAP,
) -> RenderOutput:
    """Compile a config and its artifacts into one self-contained document.

    Column content is the concatenation of that column's fragments in row
    order; chart dependencies fill the dependency slot de-duplicated in
    first-occurrence order; chart init scripts are emitted in placement
    order. Raises DanglingRef if a placement's path is not in the set.
    """
    template = registry.load(config.template_id)
    for coord in config.placements:
        if coord.position not in template.columns:
            raise TemplateColumnMismatch(
                f"placement at {coord} but template {template.id!r} has columns "
                f"{', '.join(template.columns)}"
            )

    column_parts: dict[str, list[str]] = {position: [] for position in template.columns}
    dependencies: list[str] = []
    seen_deps: set[str] = set()
    init_blocks: list[str] = []
    chart_ids: set[str] = set()
    manifest: list[PlacedFragment] = []

    for position in template.columns:
        for order in ORDERS:
            coord = Coordinate(position, order)
            ref = config.placements.get(coord)
            if ref is None:
                continue
            artifact = artifacts.find(ref)
            if artifact is None:
                raise DanglingRef(f"placement at {coord} references missing artifact {ref.path!r}")

            if ref.kind is ComponentKind.METRICS:
                fragment = fragment_metrics(artifact)
            elif ref.kind is ComponentKind.TABLE:
                fragment = fragment_table(artifact, row_cap)
            else:
                fragment, init, chart_deps = fragment_chart(artifact, coord)
                new_id = f"chart-{coord.position}-{coord.order}"
                if new_id in chart_ids:
                    raise IdCollision(f"two charts rewrote to container id {new_id!r}")
                chart_ids.add(new_id)
                init_blocks.append(f'<script type="text/javascript">\n{init}\n</script>')
                for url in chart_deps:
                    if url not in seen_deps:
                        seen_deps.add(url)
                        dependencies.append(url)

            wrapped = (
                f'<section class="panel panel-{ref.kind.value}" '
                f'id="panel-{coord.position}-{coord.order}">\n{fragment}\n</section>'
            )
            column_parts[position].append(wrapped)
            manifest.append(PlacedFragment(coord, ref, len(wrapped.encode("utf-8"))))

    values: dict[str, str] = {
        TITLE_SLOT: escape(config.title),
        FOOTNOTE_SLOT: escape(config.footnote),
        DEPENDENCE_SLOT: "\n".join(
            f'<script type="text/javascript" src="{url}"></script>' for url in dependencies
        ),
        JS_SLOT: "\n".join(init_blocks),
    }
    for position in template.columns:
        values[column_slot(position)] = "\n".join(column_parts[position])
    if FONT_COLOR_SLOT in template.slots:
        values[FONT_COLOR_SLOT] = config.font_color

    html = fill_slots(template, values, strict=True)
    return RenderOutput(html=html, manifest=tuple(manifest))
