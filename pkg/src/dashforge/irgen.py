"""Default config generation from a set of analytical artifacts.

Placement policy: coordinates are enumerated column-major in the canonical
column order (left, middle, right - skipping columns the template lacks),
rows 1..3 within each column. Metric groups are placed first (one panel per
group), then charts in artifact order, then tables in artifact order. The
policy is a pure function of its inputs, so identical inputs always produce
byte-identical configs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import CapacityExceeded, EmptyArtifactSet, MissingRequiredSlot
from .model import CONFIG_VERSION, ORDERS, ComponentKind, ComponentRef, Coordinate, DashboardConfig, TemplateRef

if TYPE_CHECKING:
    from .artifacts import ArtifactSet
    from .render import TemplateRegistry

FALLBACK_TITLE = "Dashboard"
FALLBACK_FONT_COLOR = "#FFFFFF"


@dataclass(frozen=True)
class DefaultProps:
    """Textual defaults for a new dashboard.

    Empty title and font color fall back to stock values; an empty footnote
    is only acceptable when the template marks its footnote slot optional.
    """

    title: str = ""
    footnote: str = ""
    font_color: str = ""

    def resolved(self) -> "DefaultProps":
        return replace(
            self,
            title=self.title or FALLBACK_TITLE,
            font_color=self.font_color or FALLBACK_FONT_COLOR,
        )


def template_coordinates(columns: Sequence[str]) -> list[Coordinate]:
    """All grid coordinates of a template, in placement order."""
    return [Coordinate(position, order) for position in columns for order in ORDERS]


def component_refs(artifacts: "ArtifactSet") -> list[ComponentRef]:
    """Placement-ordered refs for a set: metric groups, charts, then tables."""
    refs = [ComponentRef(ComponentKind.METRICS, f"{group.name}.json") for group in artifacts.metrics]
    refs += [ComponentRef(ComponentKind.CHART, f"{chart.name}.html") for chart in artifacts.charts]
    refs += [ComponentRef(ComponentKind.TABLE, f"{table.name}.csv") for table in artifacts.tables]
    return refs


def assign_layout(
    artifacts: "ArtifactSet",
    template: TemplateRef,
    registry: "TemplateRegistry",
) -> list[tuple[Coordinate, ComponentRef]]:
    """Deterministically place every component on the template grid."""
    base = registry.load(template.id)
    return _assign(component_refs(artifacts), base.columns)


def generate_config(
    artifacts: "ArtifactSet",
    template: TemplateRef,
    defaults: DefaultProps,
    registry: "TemplateRegistry",
) -> DashboardConfig:
    """Build a default config covering every artifact exactly once."""
    if artifacts.component_count == 0:
        raise EmptyArtifactSet("cannot generate a config from zero components")
    return generate_config_from_refs(component_refs(artifacts), template, defaults, registry)


def generate_config_from_refs(
    refs: Iterable[ComponentRef],
    template: TemplateRef,
    defaults: DefaultProps,
    registry: "TemplateRegistry",
) -> DashboardConfig:
    """Build a config from bare component refs (kind + path).

    Same policy as generate_config; refs are bucketed as metrics, charts,
    then tables, preserving the given order within each bucket. This is the
    path the CLI uses: placement needs only filenames, while the renderer
    resolves content later and reports anything missing.
    """
    refs = list(refs)
    if not refs:
        raise EmptyArtifactSet("cannot generate a config from zero components")
    base = registry.load(template.id)

    props = defaults.resolved()
    if not props.footnote and "footnote" not in base.optional_slots:
        raise MissingRequiredSlot(
            f"template {template.id!r} requires footnote content; supply a non-empty footnote"
        )

    ordered = (
        [r for r in refs if r.kind is ComponentKind.METRICS]
        + [r for r in refs if r.kind is ComponentKind.CHART]
        + [r for r in refs if r.kind is ComponentKind.TABLE]
    )
    placements = dict(_assign(ordered, base.columns))
    return DashboardConfig(
        version=CONFIG_VERSION,
        template_id=template.id,
        title=props.title,
        footnote=props.footnote,
        font_color=props.font_color,
        placements=placements,
    )


def _assign(refs: Sequence[ComponentRef], columns: Sequence[str]) -> list[tuple[Coordinate, ComponentRef]]:
    coords = template_coordinates(columns)
    if len(refs) > len(coords):
        raise CapacityExceeded(
            f"{len(refs)} components exceed template capacity of {len(coords)} "
            f"({len(columns)} columns x {len(ORDERS)} rows)"
        )
    return list(zip(coords, refs))
