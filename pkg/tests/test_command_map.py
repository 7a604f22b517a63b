import json
import math

import pytest

from gesturebot.command_map import (
    RobotCommand,
    Verb,
    default_table,
    dump_mapping,
    load_mapping,
    map_gesture,
)
from gesturebot.eigengesture import Classification
from gesturebot.errors import MagnitudeOutOfRange, SchemaViolation


def test_default_table_contents():
    t = default_table()
    assert t.lookup(0) == RobotCommand(Verb.STOP, 0.0)
    assert t.lookup(1) == RobotCommand(Verb.FORWARD, 0.5)
    assert t.lookup(2) == RobotCommand(Verb.BACKWARD, 0.5)
    assert t.lookup(3) == RobotCommand(Verb.TURN_LEFT, math.pi / 2)
    assert t.lookup(4) == RobotCommand(Verb.TURN_RIGHT, math.pi / 2)
    assert t.lookup(5) == RobotCommand(Verb.GRIP_TOGGLE, 0.0)
    assert t.labels() == [0, 1, 2, 3, 4, 5]


def test_negative_magnitude_rejected():
    cfg = {"default": "stop", "entries": {"1": {"verb": "forward", "magnitude": -1}}}
    with pytest.raises(MagnitudeOutOfRange):
        load_mapping(json.dumps(cfg))


def test_magnitude_caps():
    with pytest.raises(MagnitudeOutOfRange):
        RobotCommand(Verb.FORWARD, 10.5)
    with pytest.raises(MagnitudeOutOfRange):
        RobotCommand(Verb.TURN_LEFT, 7.0)
    # caps are per verb family
    RobotCommand(Verb.FORWARD, 10.0)
    RobotCommand(Verb.TURN_RIGHT, 2 * math.pi)


def test_unmapped_label_is_noop():
    t = load_mapping('{"default": "stop", "entries": {}}')
    c = Classification(7, 0.1)
    assert map_gesture(t, c) == RobotCommand(Verb.NOOP, 0.0)


def test_unknown_maps_to_stop():
    t = default_table()
    assert map_gesture(t, Classification(None, 99.0)) == RobotCommand(Verb.STOP, 0.0)


def test_label_3_default_is_turn_left():
    c = Classification(3, 0.1)
    assert map_gesture(default_table(), c) == RobotCommand(Verb.TURN_LEFT, math.pi / 2)


def test_label_9_absent_is_noop():
    assert map_gesture(default_table(), Classification(9, 0.1)).verb is Verb.NOOP


def test_total_over_all_labels():
    t = default_table()
    for label in range(256):
        cmd = map_gesture(t, Classification(label if label <= 254 else None, 0.0))
        assert isinstance(cmd, RobotCommand)


def test_round_trip_serialization():
    t = default_table()
    reloaded = load_mapping(dump_mapping(t))
    for label in range(256):
        a = map_gesture(t, Classification(min(label, 254), 0.0))
        b = map_gesture(reloaded, Classification(min(label, 254), 0.0))
        assert a == b


@pytest.mark.parametrize("text", [
    "[]",
    "not json",
    '{"default": "noop", "entries": {}}',
    '{"default": "stop", "entries": {"x": {"verb": "stop"}}}',
    '{"default": "stop", "entries": {"1": {"verb": "sprint"}}}',
    '{"default": "stop", "entries": {"1": {}}}',
    '{"default": "stop", "entries": {"999": {"verb": "stop"}}}',
    '{"default": "stop", "entries": {"1": {"verb": "forward", "magnitude": "fast"}}}',
])
def test_schema_violations(text):
    with pytest.raises(SchemaViolation):
        load_mapping(text)
