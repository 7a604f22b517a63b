"""Deterministic kinematic robot in a walled 2-D occupancy grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .command_map import RobotCommand, Verb
from .errors import InvalidState, MalformedHeader

GRID_SIZE = 64
VIEW_SIZE = 9
TWO_PI = 2 * math.pi


class Cell(Enum):
    FREE = 0
    OBSTACLE = 1
    ROBOT_HERE = 2


class Outcome(Enum):
    OK = "ok"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class World:
    grid: np.ndarray  # (rows, cols) uint8, 1 = obstacle
    cell_size: float = 0.5

    def __post_init__(self):
        g = np.ascontiguousarray(np.asarray(self.grid, dtype=np.uint8))
        if g.ndim != 2:
            raise ValueError("grid must be 2-D")
        if not np.all(g <= 1):
            raise ValueError("grid cells must be 0 or 1")
        border = np.concatenate([g[0], g[-1], g[:, 0], g[:, -1]])
        if not np.all(border == 1):
            raise ValueError("border cells must all be obstacles")
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return int(math.floor(y / self.cell_size)), int(math.floor(x / self.cell_size))

    def is_obstacle(self, x: float, y: float) -> bool:
        r, c = self.cell_of(x, y)
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            return True
        return bool(self.grid[r, c])


def empty_arena(size: int = GRID_SIZE, cell_size: float = 0.5) -> World:
    """A walled arena with a free interior."""
    grid = np.zeros((size, size), dtype=np.uint8)
    grid[0, :] = grid[-1, :] = grid[:, 0] = grid[:, -1] = 1
    return World(grid, cell_size)


def load_world(path: str | Path, cell_size: float = 0.5) -> World:
    """Parse a text grid: one line per row, '#' obstacle, '.' free."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln]
    if not lines:
        raise MalformedHeader("empty world file")
    width = len(lines[0])
    rows = []
    for ln in lines:
        if len(ln) != width:
            raise MalformedHeader("ragged world rows")
        if set(ln) - {"#", "."}:
            raise MalformedHeader(f"bad world characters in {ln!r}")
        rows.append([1 if ch == "#" else 0 for ch in ln])
    return World(np.array(rows, dtype=np.uint8), cell_size)


def dump_world(world: World) -> str:
    return "\n".join("".join("#" if c else "." for c in row) for row in world.grid) + "\n"


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    theta: float = 0.0
    grip: bool = False
    tick: int = 0


def _normalize_angle(theta: float) -> float:
    theta = math.fmod(theta, TWO_PI)
    if theta < 0:
        theta += TWO_PI
    return theta if theta < TWO_PI else 0.0


def validate_state(world: World, state: RobotState):
    if not (0.0 <= state.theta < TWO_PI):
        raise InvalidState(f"theta {state.theta} not normalized")
    if world.is_obstacle(state.x, state.y):
        raise InvalidState(f"position ({state.x}, {state.y}) is not on a free cell")


def center_of_cell(world: World, row: int, col: int) -> tuple[float, float]:
    return ((col + 0.5) * world.cell_size, (row + 0.5) * world.cell_size)


def _segment_blocked(world: World, x0: float, y0: float, x1: float, y1: float) -> bool:
    """Sample the straight segment at steps <= cell_size / 4."""
    dist = math.hypot(x1 - x0, y1 - y0)
    n = max(1, math.ceil(dist / (world.cell_size / 4)))
    for i in range(1, n + 1):
        t = i / n
        if world.is_obstacle(x0 + t * (x1 - x0), y0 + t * (y1 - y0)):
            return True
    return False


def apply_command(
    world: World, state: RobotState, cmd: RobotCommand
) -> tuple[RobotState, Outcome]:
    """Execute one command; moves that would cross an obstacle are rejected
    whole (pose unchanged, Blocked).  The tick counter always advances."""
    validate_state(world, state)
    tick = state.tick + 1
    verb = cmd.verb
    if verb in (Verb.STOP, Verb.NOOP):
        return replace(state, tick=tick), Outcome.OK
    if verb is Verb.GRIP_TOGGLE:
        return replace(state, grip=not state.grip, tick=tick), Outcome.OK
    if verb is Verb.TURN_LEFT:
        return replace(state, theta=_normalize_angle(state.theta + cmd.magnitude), tick=tick), Outcome.OK
    if verb is Verb.TURN_RIGHT:
        return replace(state, theta=_normalize_angle(state.theta - cmd.magnitude), tick=tick), Outcome.OK
    # Forward / Backward
    sign = 1.0 if verb is Verb.FORWARD else -1.0
    nx = state.x + sign * cmd.magnitude * math.cos(state.theta)
    ny = state.y + sign * cmd.magnitude * math.sin(state.theta)
    if _segment_blocked(world, state.x, state.y, nx, ny):
        return replace(state, tick=tick), Outcome.BLOCKED
    return replace(state, x=nx, y=ny, tick=tick), Outcome.OK


def render_view(world: World, state: RobotState) -> np.ndarray:
    """9x9 window of cells centered on the robot; out-of-bounds renders as
    obstacle, center cell is the robot marker."""
    validate_state(world, state)
    r0, c0 = world.cell_of(state.x, state.y)
    half = VIEW_SIZE // 2
    view = np.full((VIEW_SIZE, VIEW_SIZE), Cell.OBSTACLE.value, dtype=np.uint8)
    for dr in range(-half, half + 1):
        for dc in range(-half, half + 1):
            r, c = r0 + dr, c0 + dc
            if 0 <= r < world.rows and 0 <= c < world.cols:
                view[dr + half, dc + half] = world.grid[r, c]
    view[half, half] = Cell.ROBOT_HERE.value
    return view
