"""Test-side builders and checkers shared across the suite."""

from __future__ import annotations

import json
from html.parser import HTMLParser

from dashforge.artifacts import ArtifactSet, ChartArtifact, Metric, MetricGroup, TableArtifact
from dashforge.model import DashboardConfig

STOCK_DEP = "https://cdn.example.com/echarts.min.js"

_VOID = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

_TEXT_FIELDS = ("version", "template_id", "title", "footnote", "font_color")


def make_chart(name: str, deps: tuple[str, ...] = (STOCK_DEP,)) -> ChartArtifact:
    cid = f"cid-{name}"
    return ChartArtifact(
        name=name,
        dependencies=deps,
        container_id=cid,
        container_markup=f'<div id="{cid}" class="chart-container"></div>',
        init_script=(
            f'var chart = echarts.init(document.getElementById("{cid}"));\n'
            'chart.setOption({"series": []});'
        ),
    )


def make_table(name: str, n_rows: int = 10, n_cols: int = 3) -> TableArtifact:
    header = tuple(f"col{i}" for i in range(n_cols))
    rows = tuple(tuple(f"{name}-r{r}c{c}" for c in range(n_cols)) for r in range(n_rows))
    return TableArtifact(name=name, header=header, rows=rows)


def make_group(name: str, n: int = 2) -> MetricGroup:
    metrics = tuple(Metric(f"{name} indicator {i}", str(100 + i), "units") for i in range(n))
    return MetricGroup(name=name, metrics=metrics)


def make_set(n_metrics: int = 0, n_charts: int = 0, n_tables: int = 0) -> ArtifactSet:
    return ArtifactSet(
        metrics=tuple(make_group(f"group{i}") for i in range(n_metrics)),
        charts=tuple(make_chart(f"chart{i}") for i in range(n_charts)),
        tables=tuple(make_table(f"table{i}") for i in range(n_tables)),
    )


def placement_entry_bytes(config: DashboardConfig) -> dict:
    """Canonical per-placement byte encoding, for precise diffing."""
    return {
        coord: json.dumps(
            {"position": coord.position, "order": coord.order, "kind": ref.kind.value, "path": ref.path},
            ensure_ascii=False,
        ).encode("utf-8")
        for coord, ref in config.placements.items()
    }


def assert_non_interference(before, after, touched_coords=(), touched_fields=()):
    """Everything an edit did not name must be byte-identical."""
    touched_coords = set(touched_coords)
    before_entries = placement_entry_bytes(before)
    after_entries = placement_entry_bytes(after)
    for coord in set(before_entries) | set(after_entries):
        if coord in touched_coords:
            continue
        assert before_entries.get(coord) == after_entries.get(coord), (
            f"untouched placement at {coord} changed"
        )
    for name in _TEXT_FIELDS:
        if name in touched_fields:
            continue
        assert getattr(before, name) == getattr(after, name), f"untouched field {name!r} changed"


class _BalanceChecker(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.stack: list[str] = []
        self.problems: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag not in _VOID:
            self.stack.append(tag)

    def handle_startendtag(self, tag, attrs):
        pass

    def handle_endtag(self, tag):
        if tag in _VOID:
            return
        if not self.stack:
            self.problems.append(f"stray closing </{tag}>")
            return
        if self.stack[-1] != tag:
            self.problems.append(f"expected </{self.stack[-1]}>, got </{tag}>")
            # Recover so later problems still surface.
            if tag in self.stack:
                while self.stack and self.stack[-1] != tag:
                    self.stack.pop()
        if self.stack:
            self.stack.pop()


def assert_well_formed_html(text: str) -> None:
    """The document must parse with balanced non-void elements."""
    checker = _BalanceChecker()
    checker.feed(text)
    checker.close()
    assert not checker.problems, f"unbalanced HTML: {checker.problems[:5]}"
    assert not checker.stack, f"unclosed elements: {checker.stack}"
