"""Modify scripts: parsing the action list and applying it to a config.

A modify script is an ordered list of atomic actions (change, delete, add,
swap) plus the queue of newly produced artifact files that add actions
consume in order. Application is all-or-nothing: configs are immutable, so
a failure at any action leaves the caller's config untouched, and the error
carries the index of the failing action.

Non-interference is the core guarantee: an action touches exactly the
coordinates and fields it names, and nothing else.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, replace
from typing import Collection, Union

from .errors import (
    BadCoordinate,
    BadSwapArity,
    DashforgeError,
    DeleteEmptySlot,
    FileCountMismatch,
    MalformedDocument,
    QueueExhausted,
    SwapEmptySlot,
    TemplateColumnMismatch,
    UnknownAction,
    UnknownChangeField,
    UnknownKind,
)
from .model import ComponentKind, ComponentRef, Coordinate, DashboardConfig

#: Config fields a change action may rewrite.
MUTABLE_FIELDS = ("title", "footnote", "font_color", "template_id")

ACTION_OPTIONS = ("change", "delete", "add", "swap")


@dataclass(frozen=True)
class ChangeAction:
    """Rewrite textual config fields; pairs apply in order, later wins."""

    changes: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class DeleteAction:
    """Remove the components at the target coordinates."""

    targets: tuple[Coordinate, ...]


@dataclass(frozen=True)
class AddAction:
    """Place the next queued file at each target, inserting or replacing."""

    targets: tuple[Coordinate, ...]


@dataclass(frozen=True)
class SwapAction:
    """Exchange the components at two occupied coordinates."""

    first: Coordinate
    second: Coordinate


Action = Union[ChangeAction, DeleteAction, AddAction, SwapAction]

_ACTION_NAMES = {
    ChangeAction: "change",
    DeleteAction: "delete",
    AddAction: "add",
    SwapAction: "swap",
}


@dataclass(frozen=True)
class ModifyScript:
    """An ordered action list plus the new-file queue add actions consume."""

    actions: tuple[Action, ...]
    new_files: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        add_targets = sum(len(a.targets) for a in self.actions if isinstance(a, AddAction))
        if add_targets != len(self.new_files):
            raise FileCountMismatch(
                f"add actions target {add_targets} slot(s) but {len(self.new_files)} new file(s) supplied"
            )
        for filename in self.new_files:
            kind = ComponentKind.for_path(filename)
            if kind not in (ComponentKind.CHART, ComponentKind.TABLE):
                raise UnknownKind(
                    f"new file {filename!r} must be a chart (.html) or table (.csv), not {kind.value}"
                )


def parse_modify_script(script_text: str, file_list: "list[str] | tuple[str, ...]") -> ModifyScript:
    """Parse the JSON action list into a validated script.

    script_text is the bare JSON array (fence stripping happens upstream).
    Action order is preserved exactly as written.
    """
    try:
        doc = json.loads(script_text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"modify script is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedDocument("modify script must be a JSON list of actions")

    actions: list[Action] = []
    for index, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise MalformedDocument(f"action {index} must be an object")
        extra = sorted(set(entry) - {"option", "changes"})
        if extra:
            raise MalformedDocument(f"action {index} has unknown key(s): {', '.join(extra)}")
        if "option" not in entry or "changes" not in entry:
            raise MalformedDocument(f"action {index} must have 'option' and 'changes'")
        option = entry["option"]
        if option not in ACTION_OPTIONS:
            raise UnknownAction(f"action {index}: unknown option {option!r}")
        changes = entry["changes"]
        if not isinstance(changes, list):
            raise MalformedDocument(f"action {index}: 'changes' must be a list")

        if option == "change":
            actions.append(_parse_change(index, changes))
        elif option == "swap":
            if len(changes) != 2:
                raise BadSwapArity(f"action {index}: swap needs exactly 2 positions, got {len(changes)}")
            first, second = (_parse_coordinate(index, c) for c in changes)
            actions.append(SwapAction(first, second))
        else:
            if not changes:
                raise MalformedDocument(f"action {index}: {option} needs at least one position")
            targets = tuple(_parse_coordinate(index, c) for c in changes)
            actions.append(DeleteAction(targets) if option == "delete" else AddAction(targets))

    return ModifyScript(actions=tuple(actions), new_files=tuple(file_list))


def apply_action(
    config: DashboardConfig,
    action: Action,
    pending_files: "deque[str]",
    columns: "Collection[str] | None" = None,
) -> DashboardConfig:
    """Apply one action, returning a new config; the input is never mutated.

    pending_files is the shared new-file queue; each add target dequeues one
    file. When columns is given, every coordinate the action names must sit
    in a declared column.
    """
    if columns is not None:
        for coord in _action_coordinates(action):
            if coord.position not in columns:
                raise TemplateColumnMismatch(
                    f"coordinate {coord} is outside the template columns ({', '.join(columns)})"
                )

    if isinstance(action, ChangeAction):
        fields: dict[str, str] = {}
        for name, value in action.changes:
            if name not in MUTABLE_FIELDS:
                raise UnknownChangeField(
                    f"cannot change {name!r}; mutable fields are {', '.join(MUTABLE_FIELDS)}"
                )
            fields[name] = value
        return replace(config, **fields)

    placements = dict(config.placements)

    if isinstance(action, DeleteAction):
        for coord in action.targets:
            if coord not in placements:
                raise DeleteEmptySlot(f"nothing to delete at {coord}")
        for coord in action.targets:
            del placements[coord]
        return replace(config, placements=placements)

    if isinstance(action, SwapAction):
        for coord in (action.first, action.second):
            if coord not in placements:
                raise SwapEmptySlot(f"cannot swap: no component at {coord}")
        placements[action.first], placements[action.second] = (
            placements[action.second],
            placements[action.first],
        )
        return replace(config, placements=placements)

    if isinstance(action, AddAction):
        for coord in action.targets:
            if not pending_files:
                raise QueueExhausted(f"no queued file left for add at {coord}")
            filename = pending_files.popleft()
            placements[coord] = ComponentRef(ComponentKind.for_path(filename), filename)
        return replace(config, placements=placements)

    raise UnknownAction(f"unsupported action type {type(action).__name__}")


def apply_script(
    config: DashboardConfig,
    script: ModifyScript,
    columns: "Collection[str] | None" = None,
) -> DashboardConfig:
    """Apply every action in order against the evolving config.

    All-or-nothing: any action error propagates annotated with its index,
    and the caller's config value is unchanged.
    """
    queue: deque[str] = deque(script.new_files)
    current = config
    for index, action in enumerate(script.actions):
        try:
            current = apply_action(current, action, queue, columns=columns)
        except DashforgeError as exc:
            wrapped = type(exc)(f"action {index} ({_ACTION_NAMES[type(action)]}): {exc}")
            wrapped.action_index = index
            raise wrapped from exc
    if queue:
        raise FileCountMismatch(f"{len(queue)} queued file(s) left over after the last action")
    return current


def _parse_change(index: int, changes: list) -> ChangeAction:
    pairs: list[tuple[str, str]] = []
    for item in changes:
        if not isinstance(item, dict) or not item:
            raise MalformedDocument(f"action {index}: change entries must be non-empty objects")
        for name, value in item.items():
            if not isinstance(value, str):
                raise MalformedDocument(f"action {index}: change value for {name!r} must be a string")
            pairs.append((name, value))
    if not pairs:
        raise MalformedDocument(f"action {index}: change needs at least one field")
    return ChangeAction(tuple(pairs))


def _parse_coordinate(index: int, raw: object) -> Coordinate:
    if not isinstance(raw, dict) or set(raw) != {"position", "order"}:
        raise BadCoordinate(
            f"action {index}: position entries must be objects with exactly 'position' and 'order'"
        )
    order = raw["order"]
    if isinstance(order, bool) or not isinstance(order, int):
        raise BadCoordinate(f"action {index}: 'order' must be an integer, got {order!r}")
    try:
        return Coordinate(raw["position"], order)
    except BadCoordinate as exc:
        raise BadCoordinate(f"action {index}: {exc}") from None


def _action_coordinates(action: Action) -> tuple[Coordinate, ...]:
    if isinstance(action, (DeleteAction, AddAction)):
        return action.targets
    if isinstance(action, SwapAction):
        return (action.first, action.second)
    return ()
