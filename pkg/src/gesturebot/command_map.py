"""Classification labels to robot commands via a configurable JSON table."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

from .eigengesture import Classification
from .errors import MagnitudeOutOfRange, SchemaViolation


class Verb(Enum):
    STOP = "stop"
    FORWARD = "forward"
    BACKWARD = "backward"
    TURN_LEFT = "turnleft"
    TURN_RIGHT = "turnright"
    GRIP_TOGGLE = "griptoggle"
    NOOP = "noop"


_LINEAR_VERBS = {Verb.FORWARD, Verb.BACKWARD}
_ANGULAR_VERBS = {Verb.TURN_LEFT, Verb.TURN_RIGHT}

MAX_LINEAR = 10.0  # meters per command
MAX_ANGULAR = 2 * math.pi  # radians per command


def _check_magnitude(verb: Verb, magnitude: float):
    if magnitude < 0:
        raise MagnitudeOutOfRange(f"magnitude {magnitude} < 0")
    if verb in _LINEAR_VERBS and magnitude > MAX_LINEAR:
        raise MagnitudeOutOfRange(f"linear magnitude {magnitude} > {MAX_LINEAR}")
    if verb in _ANGULAR_VERBS and magnitude > MAX_ANGULAR:
        raise MagnitudeOutOfRange(f"angular magnitude {magnitude} > {MAX_ANGULAR}")


@dataclass(frozen=True)
class RobotCommand:
    verb: Verb
    magnitude: float = 0.0

    def __post_init__(self):
        _check_magnitude(self.verb, self.magnitude)


STOP_COMMAND = RobotCommand(Verb.STOP, 0.0)
NOOP_COMMAND = RobotCommand(Verb.NOOP, 0.0)


class MappingTable:
    """Immutable label -> command table; Unknown always maps to Stop."""

    def __init__(self, entries: dict[int, RobotCommand]):
        for label in entries:
            if not (0 <= label <= 255):
                raise SchemaViolation(f"label {label} out of range")
        self._entries = MappingProxyType(dict(entries))

    @property
    def entries(self):
        return self._entries

    def labels(self) -> list[int]:
        return sorted(self._entries)

    def lookup(self, label: int) -> RobotCommand:
        return self._entries.get(label, NOOP_COMMAND)


def default_table() -> MappingTable:
    """The shipped six-gesture table; labels 6+ are left to configuration."""
    return MappingTable(
        {
            0: RobotCommand(Verb.STOP),
            1: RobotCommand(Verb.FORWARD, 0.5),
            2: RobotCommand(Verb.BACKWARD, 0.5),
            3: RobotCommand(Verb.TURN_LEFT, math.pi / 2),
            4: RobotCommand(Verb.TURN_RIGHT, math.pi / 2),
            5: RobotCommand(Verb.GRIP_TOGGLE),
        }
    )


def load_mapping(config_text: str) -> MappingTable:
    """Parse and validate {"default": "stop", "entries": {label: {verb, magnitude}}}."""
    try:
        doc = json.loads(config_text)
    except json.JSONDecodeError as e:
        raise SchemaViolation(f"bad JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("top level must be an object")
    if doc.get("default", "stop") != "stop":
        raise SchemaViolation('the safety default must be "stop"')
    raw_entries = doc.get("entries", {})
    if not isinstance(raw_entries, dict):
        raise SchemaViolation('"entries" must be an object')
    entries: dict[int, RobotCommand] = {}
    for key, val in raw_entries.items():
        try:
            label = int(key)
        except ValueError:
            raise SchemaViolation(f"label key {key!r} is not an integer") from None
        if not (0 <= label <= 255):
            raise SchemaViolation(f"label {label} out of range")
        if not isinstance(val, dict) or "verb" not in val:
            raise SchemaViolation(f"entry for label {label} must carry a verb")
        try:
            verb = Verb(val["verb"])
        except ValueError:
            raise SchemaViolation(f"unknown verb {val['verb']!r}") from None
        magnitude = val.get("magnitude", 0.0)
        if not isinstance(magnitude, (int, float)) or isinstance(magnitude, bool):
            raise SchemaViolation(f"magnitude for label {label} must be a number")
        entries[label] = RobotCommand(verb, float(magnitude))
    return MappingTable(entries)


def dump_mapping(table: MappingTable) -> str:
    """Serialize a table back to the JSON schema accepted by load_mapping."""
    doc = {
        "default": "stop",
        "entries": {
            str(label): {"verb": cmd.verb.value, "magnitude": cmd.magnitude}
            for label, cmd in sorted(table.entries.items())
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def map_gesture(table: MappingTable, c: Classification) -> RobotCommand:
    """Total mapping: Unknown -> Stop, mapped label -> entry, unmapped -> NoOp."""
    if c.label is None:
        return STOP_COMMAND
    return table.lookup(c.label)
