"""Core dashboard config model and its canonical on-disk form.

The config is the single source of truth for a dashboard: which template it
uses, its textual defaults, and which component sits at which grid
coordinate. Serialization is canonical - fixed field order, placements
sorted by column then row - so equal configs are byte-identical and diffs
stay local to what actually changed.
"""

from __future__ import annotations

import enum
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Mapping

from .errors import (
    BadCoordinate,
    MalformedDocument,
    SchemaViolation,
    UnknownKind,
    VersionMismatch,
)

CONFIG_VERSION = "1"
CONFIG_SUFFIX = ".dbconfig.json"

#: Grid columns in canonical order; templates declare a subset of these.
POSITIONS = ("left", "middle", "right")
#: Rows within a column, top to bottom.
ORDERS = (1, 2, 3)

_POSITION_RANK = {p: i for i, p in enumerate(POSITIONS)}

_HEX_COLOR_RE = re.compile(r"#(?:[0-9a-fA-F]{3}|[0-9a-fA-F]{4}|[0-9a-fA-F]{6}|[0-9a-fA-F]{8})\Z")

# CSS named colors (Color Module Level 4 keyword set).
CSS_NAMED_COLORS = frozenset({
    "aliceblue", "antiquewhite", "aqua", "aquamarine", "azure", "beige",
    "bisque", "black", "blanchedalmond", "blue", "blueviolet", "brown",
    "burlywood", "cadetblue", "chartreuse", "chocolate", "coral",
    "cornflowerblue", "cornsilk", "crimson", "cyan", "darkblue", "darkcyan",
    "darkgoldenrod", "darkgray", "darkgreen", "darkgrey", "darkkhaki",
    "darkmagenta", "darkolivegreen", "darkorange", "darkorchid", "darkred",
    "darksalmon", "darkseagreen", "darkslateblue", "darkslategray",
    "darkslategrey", "darkturquoise", "darkviolet", "deeppink", "deepskyblue",
    "dimgray", "dimgrey", "dodgerblue", "firebrick", "floralwhite",
    "forestgreen", "fuchsia", "gainsboro", "ghostwhite", "gold", "goldenrod",
    "gray", "green", "greenyellow", "grey", "honeydew", "hotpink", "indianred",
    "indigo", "ivory", "khaki", "lavender", "lavenderblush", "lawngreen",
    "lemonchiffon", "lightblue", "lightcoral", "lightcyan",
    "lightgoldenrodyellow", "lightgray", "lightgreen", "lightgrey",
    "lightpink", "lightsalmon", "lightseagreen", "lightskyblue",
    "lightslategray", "lightslategrey", "lightsteelblue", "lightyellow",
    "lime", "limegreen", "linen", "magenta", "maroon", "mediumaquamarine",
    "mediumblue", "mediumorchid", "mediumpurple", "mediumseagreen",
    "mediumslateblue", "mediumspringgreen", "mediumturquoise",
    "mediumvioletred", "midnightblue", "mintcream", "mistyrose", "moccasin",
    "navajowhite", "navy", "oldlace", "olive", "olivedrab", "orange",
    "orangered", "orchid", "palegoldenrod", "palegreen", "paleturquoise",
    "palevioletred", "papayawhip", "peachpuff", "peru", "pink", "plum",
    "powderblue", "purple", "rebeccapurple", "red", "rosybrown", "royalblue",
    "saddlebrown", "salmon", "sandybrown", "seagreen", "seashell", "sienna",
    "silver", "skyblue", "slateblue", "slategray", "slategrey", "snow",
    "springgreen", "steelblue", "tan", "teal", "thistle", "tomato",
    "turquoise", "violet", "wheat", "white", "whitesmoke", "yellow",
    "yellowgreen",
})


def is_css_color(value: str) -> bool:
    """True if value is a hex color or a CSS named color."""
    if not isinstance(value, str) or not value:
        return False
    if _HEX_COLOR_RE.match(value):
        return True
    return value.lower() in CSS_NAMED_COLORS


class ComponentKind(enum.Enum):
    """The three component classes, keyed to artifact file extensions."""

    CHART = "chart"
    TABLE = "table"
    METRICS = "metrics"

    @property
    def extension(self) -> str:
        return _KIND_EXTENSIONS[self]

    @classmethod
    def for_path(cls, path: "str | os.PathLike[str]") -> "ComponentKind":
        """Classify a filename by extension (case-insensitive).

        Raises UnknownKind for anything that is not .html, .csv or .json.
        """
        ext = PurePosixPath(str(path).replace("\\", "/")).suffix.lower()
        try:
            return _EXTENSION_KINDS[ext]
        except KeyError:
            raise UnknownKind(f"no component kind for {str(path)!r} (extension {ext or 'none'!r})") from None


_KIND_EXTENSIONS = {
    ComponentKind.CHART: ".html",
    ComponentKind.TABLE: ".csv",
    ComponentKind.METRICS: ".json",
}
_EXTENSION_KINDS = {ext: kind for kind, ext in _KIND_EXTENSIONS.items()}


@dataclass(frozen=True)
class Coordinate:
    """One cell of the dashboard grid: a column name and a 1-based row."""

    position: str
    order: int

    def __post_init__(self) -> None:
        if self.position not in POSITIONS:
            raise BadCoordinate(
                f"position must be one of {', '.join(POSITIONS)}; got {self.position!r}"
            )
        if type(self.order) is not int or self.order not in ORDERS:
            raise BadCoordinate(f"order must be an integer in [1, 3]; got {self.order!r}")

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_POSITION_RANK[self.position], self.order)

    def __str__(self) -> str:
        return f"{self.position}/{self.order}"


@dataclass(frozen=True)
class ComponentRef:
    """A placed component: its kind and the artifact file it points at."""

    kind: ComponentKind
    path: str

    def __post_init__(self) -> None:
        if not isinstance(self.path, str) or not self.path:
            raise SchemaViolation("component path must be a non-empty string")
        parts = PurePosixPath(self.path.replace("\\", "/")).parts
        if ".." in parts or self.path.startswith(("/", "\\")):
            raise SchemaViolation(f"component path must be relative without traversal: {self.path!r}")
        try:
            derived = ComponentKind.for_path(self.path)
        except UnknownKind as exc:
            raise SchemaViolation(str(exc)) from None
        if derived is not self.kind:
            raise SchemaViolation(
                f"kind {self.kind.value!r} does not match extension of {self.path!r} "
                f"(expected {derived.value!r})"
            )

    @property
    def name(self) -> str:
        """Artifact name: the filename stem."""
        return PurePosixPath(self.path.replace("\\", "/")).stem


@dataclass(frozen=True)
class TemplateRef:
    """Reference to a registered base template by id."""

    id: str


_CONFIG_FIELDS = ("version", "template_id", "title", "footnote", "font_color", "placements")
_PLACEMENT_FIELDS = ("position", "order", "kind", "path")


@dataclass(frozen=True)
class DashboardConfig:
    """The dashboard config: template choice, textual defaults, placements.

    Immutable after construction; edits produce new values. Placements are
    sparse - deleting a component leaves a hole and nothing is renumbered.
    """

    template_id: str
    title: str
    footnote: str
    font_color: str
    placements: Mapping[Coordinate, ComponentRef] = field(default_factory=dict)
    version: str = CONFIG_VERSION

    def __post_init__(self) -> None:
        for name in ("version", "template_id", "title", "footnote", "font_color"):
            if not isinstance(getattr(self, name), str):
                raise SchemaViolation(f"{name} must be a string")
        if not self.template_id:
            raise SchemaViolation("template_id must be non-empty")
        if not is_css_color(self.font_color):
            raise SchemaViolation(f"font_color is not a hex or named CSS color: {self.font_color!r}")
        placements = dict(self.placements)
        for coord, ref in placements.items():
            if not isinstance(coord, Coordinate) or not isinstance(ref, ComponentRef):
                raise SchemaViolation("placements must map Coordinate to ComponentRef")
        object.__setattr__(self, "placements", placements)

    def sorted_placements(self) -> list[tuple[Coordinate, ComponentRef]]:
        """Placements in canonical order: left<middle<right, then top-down."""
        return sorted(self.placements.items(), key=lambda item: item[0].sort_key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DashboardConfig):
            return NotImplemented
        return (
            self.version == other.version
            and self.template_id == other.template_id
            and self.title == other.title
            and self.footnote == other.footnote
            and self.font_color == other.font_color
            and dict(self.placements) == dict(other.placements)
        )


def serialize_config(config: DashboardConfig) -> bytes:
    """Canonical UTF-8 JSON for a config.

    Fixed field order, placements sorted by (column, row), 4-space indent,
    non-ASCII emitted literally. Equal configs serialize byte-identically.
    """
    doc = {
        "version": config.version,
        "template_id": config.template_id,
        "title": config.title,
        "footnote": config.footnote,
        "font_color": config.font_color,
        "placements": [
            {
                "position": coord.position,
                "order": coord.order,
                "kind": ref.kind.value,
                "path": ref.path,
            }
            for coord, ref in config.sorted_placements()
        ],
    }
    return (json.dumps(doc, ensure_ascii=False, indent=4) + "\n").encode("utf-8")


def deserialize_config(data: "bytes | str") -> DashboardConfig:
    """Parse a config document, enforcing every type invariant.

    Raises MalformedDocument for unparseable input, VersionMismatch for an
    unsupported version string, and SchemaViolation for anything that parses
    but breaks the schema (missing/unknown fields, bad coordinates,
    duplicate placements, kind/extension mismatch).
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"config is not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("config document must be a JSON object")

    missing = [name for name in _CONFIG_FIELDS if name not in doc]
    if missing:
        raise SchemaViolation(f"config missing field(s): {', '.join(missing)}")
    unknown = [name for name in doc if name not in _CONFIG_FIELDS]
    if unknown:
        raise SchemaViolation(f"config has unknown field(s): {', '.join(sorted(unknown))}")

    version = doc["version"]
    if not isinstance(version, str):
        raise SchemaViolation("version must be a string")
    if version != CONFIG_VERSION:
        raise VersionMismatch(f"unsupported config version {version!r} (supported: {CONFIG_VERSION!r})")

    raw_placements = doc["placements"]
    if not isinstance(raw_placements, list):
        raise SchemaViolation("placements must be a list")
    placements: dict[Coordinate, ComponentRef] = {}
    for index, entry in enumerate(raw_placements):
        if not isinstance(entry, dict):
            raise SchemaViolation(f"placement {index} must be an object")
        entry_missing = [name for name in _PLACEMENT_FIELDS if name not in entry]
        if entry_missing:
            raise SchemaViolation(f"placement {index} missing field(s): {', '.join(entry_missing)}")
        entry_unknown = [name for name in entry if name not in _PLACEMENT_FIELDS]
        if entry_unknown:
            raise SchemaViolation(f"placement {index} has unknown field(s): {', '.join(sorted(entry_unknown))}")
        try:
            coord = Coordinate(entry["position"], entry["order"])
        except BadCoordinate as exc:
            raise SchemaViolation(f"placement {index}: {exc}") from None
        if coord in placements:
            raise SchemaViolation(f"duplicate placement at {coord}")
        kind_value = entry["kind"]
        try:
            kind = ComponentKind(kind_value)
        except ValueError:
            raise SchemaViolation(f"placement {index}: unknown kind {kind_value!r}") from None
        ref = ComponentRef(kind, entry["path"])
        placements[coord] = ref

    return DashboardConfig(
        version=version,
        template_id=doc["template_id"],
        title=doc["title"],
        footnote=doc["footnote"],
        font_color=doc["font_color"],
        placements=placements,
    )


def read_config(path: "str | os.PathLike[str]") -> DashboardConfig:
    """Load a config file from disk."""
    return deserialize_config(Path(path).read_bytes())


def write_config(path: "str | os.PathLike[str]", config: DashboardConfig) -> None:
    """Write a config atomically (temp file in place, then rename)."""
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(serialize_config(config))
    os.replace(tmp, target)
