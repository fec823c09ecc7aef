import json
from collections import deque

import pytest

import cases
from dashforge.errors import (
    BadCoordinate,
    BadSwapArity,
    DeleteEmptySlot,
    FileCountMismatch,
    MalformedDocument,
    QueueExhausted,
    SchemaViolation,
    SwapEmptySlot,
    TemplateColumnMismatch,
    UnknownAction,
    UnknownChangeField,
    UnknownKind,
)
from dashforge.model import ComponentKind, ComponentRef, Coordinate, DashboardConfig, serialize_config
from dashforge.modify import (
    AddAction,
    ChangeAction,
    DeleteAction,
    ModifyScript,
    SwapAction,
    apply_action,
    apply_script,
    parse_modify_script,
)

from helpers import assert_non_interference


def C(position, order):
    return Coordinate(position, order)


def ref(path):
    return ComponentRef(ComponentKind.for_path(path), path)


class TestParse:
    def test_example_a(self):
        script = parse_modify_script(cases.EXAMPLE_A_SCRIPT, [])
        assert len(script.actions) == 2
        change, delete = script.actions
        assert isinstance(change, ChangeAction)
        assert change.changes == (("title", "2024 Financial Report"), ("footnote", "2024"))
        assert isinstance(delete, DeleteAction)
        assert delete.targets == (C("right", 2),)
        assert script.new_files == ()

    def test_example_b(self):
        script = parse_modify_script(cases.EXAMPLE_B_SCRIPT, ["new_chart.html", "new_table.csv"])
        add, swap = script.actions
        assert isinstance(add, AddAction)
        assert add.targets == (C("right", 1), C("right", 2))
        assert isinstance(swap, SwapAction)
        assert (swap.first, swap.second) == (C("middle", 2), C("left", 3))
        assert len(script.new_files) == 2

    def test_example_c(self):
        script = parse_modify_script(cases.EXAMPLE_C_SCRIPT, ["new_chart1.html", "new_chart2.html"])
        assert [type(a).__name__ for a in script.actions] == ["AddAction", "SwapAction", "AddAction"]
        assert len(script.new_files) == 2

    @pytest.mark.parametrize("n", [1, 3])
    def test_swap_arity(self, n):
        coords = [{"position": "left", "order": i + 1} for i in range(n)]
        text = json.dumps([{"option": "swap", "changes": coords}])
        with pytest.raises(BadSwapArity):
            parse_modify_script(text, [])

    def test_unknown_option(self):
        text = json.dumps([{"option": "remove", "changes": [{"position": "left", "order": 1}]}])
        with pytest.raises(UnknownAction):
            parse_modify_script(text, [])

    @pytest.mark.parametrize("coord", [
        {"position": "center", "order": 1},
        {"position": "left", "order": 4},
        {"position": "left", "order": "2"},
        {"position": "left"},
        {"position": "left", "order": 1, "extra": True},
        "left-1",
    ])
    def test_bad_coordinates(self, coord):
        text = json.dumps([{"option": "delete", "changes": [coord]}])
        with pytest.raises(BadCoordinate):
            parse_modify_script(text, [])

    def test_file_count_mismatch(self):
        text = json.dumps([{"option": "add", "changes": [{"position": "left", "order": 1}]}])
        with pytest.raises(FileCountMismatch):
            parse_modify_script(text, ["a.html", "b.csv"])
        with pytest.raises(FileCountMismatch):
            parse_modify_script(text, [])

    def test_new_file_kind_restricted(self):
        text = json.dumps([{"option": "add", "changes": [{"position": "left", "order": 1}]}])
        with pytest.raises(UnknownKind):
            parse_modify_script(text, ["metrics.json"])
        with pytest.raises(UnknownKind):
            parse_modify_script(text, ["report.pdf"])

    @pytest.mark.parametrize("text", [
        "{nope",
        '{"option": "change"}',
        '[{"option": "change"}]',
        '[{"option": "change", "changes": [{"title": 5}]}]',
        '[{"option": "change", "changes": []}]',
        '[{"option": "delete", "changes": []}]',
        '[{"option": "change", "changes": [{"title": "x"}], "note": "hi"}]',
        '[42]',
    ])
    def test_malformed_documents(self, text):
        with pytest.raises(MalformedDocument):
            parse_modify_script(text, [])

    def test_action_order_preserved(self):
        script = parse_modify_script(cases.EXAMPLE_C_SCRIPT, ["a.html", "b.html"])
        assert isinstance(script.actions[0], AddAction)
        assert isinstance(script.actions[1], SwapAction)
        assert isinstance(script.actions[2], AddAction)


class TestApplyAction:
    def test_swap_exchanges_and_touches_nothing_else(self, full_config):
        swapped = apply_action(full_config, SwapAction(C("left", 3), C("middle", 2)), deque())
        assert swapped.placements[C("left", 3)] == full_config.placements[C("middle", 2)]
        assert swapped.placements[C("middle", 2)] == full_config.placements[C("left", 3)]
        assert_non_interference(full_config, swapped, touched_coords={C("left", 3), C("middle", 2)})

    def test_swap_empty_slot(self, generated_config):
        with pytest.raises(SwapEmptySlot):
            apply_action(generated_config, SwapAction(C("left", 2), C("right", 3)), deque())

    def test_add_replaces_occupied_slot(self, full_config):
        queue = deque(["new_chart.html"])
        updated = apply_action(full_config, AddAction((C("right", 1),)), queue)
        assert updated.placements[C("right", 1)] == ref("new_chart.html")
        assert not queue
        assert_non_interference(full_config, updated, touched_coords={C("right", 1)})

    def test_add_inserts_into_empty_slot(self, generated_config):
        updated = apply_action(generated_config, AddAction((C("right", 3),)), deque(["new_table.csv"]))
        assert updated.placements[C("right", 3)] == ref("new_table.csv")
        assert len(updated.placements) == len(generated_config.placements) + 1

    def test_add_queue_exhausted(self, full_config):
        with pytest.raises(QueueExhausted):
            apply_action(full_config, AddAction((C("right", 1),)), deque())

    def test_delete_removes_targets(self, full_config):
        updated = apply_action(full_config, DeleteAction((C("right", 2),)), deque())
        assert C("right", 2) not in updated.placements
        assert len(updated.placements) == 8

    def test_delete_empty_slot(self, generated_config):
        with pytest.raises(DeleteEmptySlot):
            apply_action(generated_config, DeleteAction((C("right", 3),)), deque())

    def test_change_fields(self, full_config):
        action = ChangeAction((("title", "New"), ("font_color", "teal")))
        updated = apply_action(full_config, action, deque())
        assert updated.title == "New"
        assert updated.font_color == "teal"
        assert_non_interference(full_config, updated, touched_fields={"title", "font_color"})

    def test_change_template_id_accepted(self, full_config):
        updated = apply_action(full_config, ChangeAction((("template_id", "light"),)), deque())
        assert updated.template_id == "light"

    def test_change_unknown_field(self, full_config):
        with pytest.raises(UnknownChangeField):
            apply_action(full_config, ChangeAction((("theme", "dark"),)), deque())

    def test_change_invalid_color_is_schema_error(self, full_config):
        with pytest.raises(SchemaViolation):
            apply_action(full_config, ChangeAction((("font_color", "nope"),)), deque())

    def test_column_membership_enforced_when_known(self, generated_config):
        action = AddAction((C("middle", 2),))
        with pytest.raises(TemplateColumnMismatch):
            apply_action(generated_config, action, deque(["new_chart.html"]), columns=("left", "right"))

    def test_input_config_never_mutated(self, full_config):
        before = serialize_config(full_config)
        apply_action(full_config, DeleteAction((C("right", 2),)), deque())
        assert serialize_config(full_config) == before


class TestApplyScript:
    def test_example_a_trace(self, full_config):
        script = parse_modify_script(cases.EXAMPLE_A_SCRIPT, [])
        updated = apply_script(full_config, script)
        assert updated.title == "2024 Financial Report"
        assert updated.footnote == "2024"
        assert C("right", 2) not in updated.placements
        assert len(updated.placements) == 8
        assert_non_interference(
            full_config, updated,
            touched_coords={C("right", 2)}, touched_fields={"title", "footnote"},
        )

    def test_example_c_trace_on_full_grid(self, full_config):
        former_middle_2 = full_config.placements[C("middle", 2)]
        script = parse_modify_script(cases.EXAMPLE_C_SCRIPT, ["new_chart1.html", "new_chart2.html"])
        updated = apply_script(full_config, script)
        assert updated.placements[C("middle", 2)] == ref("new_chart2.html")
        assert updated.placements[C("right", 3)] == former_middle_2
        assert_non_interference(full_config, updated, touched_coords={C("middle", 2), C("right", 3)})

    def test_example_c_trace_with_empty_bottom_right(self, full_config):
        # Same script, but right/3 starts empty: add may target an empty slot.
        placements = dict(full_config.placements)
        former_middle_2 = placements[C("middle", 2)]
        del placements[C("right", 3)]
        config = DashboardConfig(
            template_id=full_config.template_id,
            title=full_config.title,
            footnote=full_config.footnote,
            font_color=full_config.font_color,
            placements=placements,
        )
        script = parse_modify_script(cases.EXAMPLE_C_SCRIPT, ["new_chart1.html", "new_chart2.html"])
        updated = apply_script(config, script)
        assert updated.placements[C("middle", 2)] == ref("new_chart2.html")
        assert updated.placements[C("right", 3)] == former_middle_2

    def test_empty_script_is_identity(self, full_config):
        updated = apply_script(full_config, ModifyScript(actions=()))
        assert serialize_config(updated) == serialize_config(full_config)

    def test_error_annotated_with_action_index(self, full_config):
        script = ModifyScript(actions=(
            ChangeAction((("title", "ok"),)),
            SwapAction(C("left", 1), C("left", 1)),
            DeleteAction((C("right", 2),)),
            DeleteAction((C("right", 2),)),  # right/2 already gone: fails here
        ))
        with pytest.raises(DeleteEmptySlot) as excinfo:
            apply_script(full_config, script)
        assert excinfo.value.action_index == 3
        assert "action 3" in str(excinfo.value)

    def test_all_or_nothing_leaves_input_unchanged(self, full_config):
        before = serialize_config(full_config)
        script = ModifyScript(actions=(
            DeleteAction((C("left", 2),)),
            SwapAction(C("left", 2), C("middle", 1)),  # left/2 now empty: fails
        ))
        with pytest.raises(SwapEmptySlot):
            apply_script(full_config, script)
        assert serialize_config(full_config) == before

    def test_swap_involution(self, full_config):
        action = SwapAction(C("left", 2), C("right", 1))
        once = apply_action(full_config, action, deque())
        twice = apply_action(once, action, deque())
        assert serialize_config(twice) == serialize_config(full_config)

    def test_change_idempotent(self, full_config):
        action = ChangeAction((("title", "Same"),))
        once = apply_action(full_config, action, deque())
        twice = apply_action(once, action, deque())
        assert serialize_config(twice) == serialize_config(once)

    def test_merged_adds_differ_from_sequential(self, full_config):
        files = ["new_chart1.html", "new_chart2.html"]
        sequential = apply_script(
            full_config, parse_modify_script(cases.EXAMPLE_C_SCRIPT, list(files))
        )
        merged_text = json.dumps([
            {"option": "add", "changes": [
                {"position": "right", "order": 3}, {"position": "middle", "order": 2},
            ]},
            {"option": "swap", "changes": [
                {"position": "middle", "order": 2}, {"position": "right", "order": 3},
            ]},
        ])
        merged = apply_script(full_config, parse_modify_script(merged_text, list(files)))
        assert merged != sequential
        assert merged.placements[C("middle", 2)] == ref("new_chart1.html")
        assert sequential.placements[C("middle", 2)] == ref("new_chart2.html")

    def test_leftover_queue_rejected(self, full_config):
        script = ModifyScript.__new__(ModifyScript)  # bypass count validation on purpose
        object.__setattr__(script, "actions", (ChangeAction((("title", "x"),)),))
        object.__setattr__(script, "new_files", ("new_chart.html",))
        with pytest.raises(FileCountMismatch):
            apply_script(full_config, script)
