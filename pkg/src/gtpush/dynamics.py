"""Event-driven simulators for the three pattern dynamics and for reference
marginal processes.

Continuous-time dynamics use per-particle exponential candidate clocks
(regenerated after every event, so independent Poisson candidate streams are
exact); a candidate ring that is blocked is discarded.  Push and drag cascades
resolve recursively downward within a single timestamp.  Discrete time updates
rows strictly top to bottom with the old row above blocking and the new row
above pushing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .kernels import SparseGenerator, StepKernel
from .patterns import (
    Pattern,
    STANDARD,
    SYMPLECTIC,
    coords_of,
    is_valid,
    rates_of,
)


@dataclass(frozen=True)
class MoveEvent:
    time: float | int
    row: int
    index: int
    displacement: int
    cause: str  # "self" | "push"


@dataclass
class Trajectory:
    initial: object  # Pattern or chamber tuple
    events: list[MoveEvent] = field(default_factory=list)
    final: object = None

    def to_json_lines(self) -> str:
        return "\n".join(
            json.dumps(
                {"t": e.time, "row": e.row, "i": e.index, "d": e.displacement,
                 "cause": e.cause}
            )
            for e in self.events
        )

    def replay(self, validate: bool = False):
        """Re-apply the events to the initial state; optionally check cone
        membership after every timestamp (cascades share a timestamp)."""
        if isinstance(self.initial, Pattern):
            rows = [list(r) for r in self.initial.rows]
            kind = self.initial.kind
            last_t = None
            for e in self.events:
                if validate and last_t is not None and e.time != last_t:
                    if not is_valid(Pattern(tuple(tuple(r) for r in rows), kind)):
                        raise AssertionError(f"invalid state before t={e.time}")
                rows[e.row - 1][e.index - 1] += e.displacement
                last_t = e.time
            state = Pattern(tuple(tuple(r) for r in rows), kind)
            if validate and not is_valid(state):
                raise AssertionError("invalid final state")
            return state
        state = list(self.initial)
        for e in self.events:
            state[e.index - 1] += e.displacement
        return tuple(state)


def _ring_times(rate: float, t_end: float, rng) -> list[float]:
    if rate <= 0.0:
        return []
    out = []
    t = rng.exponential(1.0 / rate)
    while t < t_end:
        out.append(t)
        t += rng.exponential(1.0 / rate)
    return out


# ---------------------------------------------------------------------------
# rightward (continuous-time) dynamics

def _apply_right_jump(rows, k, j, t, events, cause):
    p = rows[k - 1][j - 1]
    rows[k - 1][j - 1] = p + 1
    events.append(MoveEvent(t, k, j, 1, cause))
    # the jump squeezes the next-row particle sitting at the same spot
    if k < len(rows) and rows[k][j] == p:
        _apply_right_jump(rows, k + 1, j + 1, t, events, "push")


def poisson_from_rings(n: int, rings: dict, init: Pattern, t_end: float) -> Trajectory:
    """Run the rightward dynamics off explicit candidate ring times.

    rings maps (row, index) (1-based) to sorted candidate times; a ring is
    discarded when the particle is blocked by the row above.
    """
    rows = [list(r) for r in init.rows]
    events: list[MoveEvent] = []
    agenda = sorted(
        (t, k, j) for (k, j), times in rings.items() for t in times if t < t_end
    )
    for t, k, j in agenda:
        if j < k and rows[k - 1][j - 1] == rows[k - 2][j - 1]:
            continue  # blocked
        _apply_right_jump(rows, k, j, t, events, "self")
    return Trajectory(init, events, Pattern(tuple(tuple(r) for r in rows), init.kind))


def simulate_poisson(n: int, q, init: Pattern, t_end: float, rng) -> Trajectory:
    """Rightward dynamics: row-k particles ring at the k-th rate, blocked by
    the particle above-left, pushing the particle below-right."""
    qs = rates_of(q, n)
    if init.kind != STANDARD or init.nrows != n or not is_valid(init):
        raise ValueError("init must be a valid standard pattern of matching size")
    rings = {}
    for k in range(1, n + 1):
        rate = float(qs[k - 1])
        for j in range(1, k + 1):
            rings[(k, j)] = _ring_times(rate, t_end, rng)
    return poisson_from_rings(n, rings, init, t_end)


# ---------------------------------------------------------------------------
# discrete-time geometric dynamics

def geometric_step(rows, xi):
    """One synchronous update given the jump draws xi[row][index].

    Returns (new_rows, moves) where moves are (row, index, displacement,
    cause) with 1-based indices.  The old row above blocks, the freshly
    updated row above pushes before the jump.
    """
    new_rows: list[list[int]] = []
    moves = []
    for r0, row in enumerate(rows):
        new_row = []
        for j0, pos in enumerate(row):
            inter = pos
            cause = "self"
            if r0 > 0 and j0 > 0 and new_rows[r0 - 1][j0 - 1] > inter:
                inter = new_rows[r0 - 1][j0 - 1]
                cause = "push"
            nxt = inter + int(xi[r0][j0])
            if r0 > 0 and j0 < len(rows[r0 - 1]):
                nxt = min(nxt, rows[r0 - 1][j0])
            new_row.append(nxt)
            if nxt != pos:
                moves.append((r0 + 1, j0 + 1, nxt - pos, cause))
        new_rows.append(new_row)
    return new_rows, moves


def simulate_geometric(n: int, q, init: Pattern, steps: int, rng) -> Trajectory:
    """Discrete dynamics with geometric jumps, P(jump = j) = (1-q) q^j."""
    qs = rates_of(q, n, open_unit=True)
    if init.kind != STANDARD or init.nrows != n or not is_valid(init):
        raise ValueError("init must be a valid standard pattern of matching size")
    rows = [list(r) for r in init.rows]
    events: list[MoveEvent] = []
    ps = [float(1 - v) for v in qs]
    for step in range(1, steps + 1):
        xi = [rng.geometric(ps[r0], size=r0 + 1) - 1 for r0 in range(n)]
        rows, moves = geometric_step(rows, xi)
        events.extend(MoveEvent(step, r, j, d, c) for r, j, d, c in moves)
    return Trajectory(init, events, Pattern(tuple(tuple(r) for r in rows), STANDARD))


# ---------------------------------------------------------------------------
# wall (symplectic) dynamics

def _wall_blocked(rows, r, j, d) -> bool:
    pos = rows[r - 1][j - 1]
    if d == 1:
        if r == 1:
            return False
        above = rows[r - 2]
        if r % 2 == 0:
            # same-length odd row above: cap at its next particle
            return j < len(rows[r - 1]) and pos == above[j]
        # one-shorter even row above: cap at its same-index particle
        return j <= len(above) and pos == above[j - 1]
    if r % 2 == 1:
        if j == 1:
            return pos == 0  # the wall
        return pos == rows[r - 2][j - 2]
    return pos == rows[r - 2][j - 1]


def _wall_cascade_target(rows, r, j, d, pre):
    if r == len(rows):
        return None
    below = rows[r]
    if d == 1:
        tgt = j if r % 2 == 1 else j + 1
        if tgt <= len(below) and below[tgt - 1] == pre:
            return tgt
    else:
        tgt = j - 1 if r % 2 == 1 else j
        if tgt >= 1 and below[tgt - 1] == pre:
            return tgt
    return None


def _apply_wall_jump(rows, r, j, d, t, events, cause):
    pre = rows[r - 1][j - 1]
    rows[r - 1][j - 1] = pre + d
    events.append(MoveEvent(t, r, j, d, cause))
    tgt = _wall_cascade_target(rows, r, j, d, pre)
    if tgt is not None:
        _apply_wall_jump(rows, r + 1, tgt, d, t, events, "push")


def wall_from_rings(n: int, rings: dict, init: Pattern, t_end: float) -> Trajectory:
    """Run the wall dynamics off explicit rings keyed (row, index, direction)."""
    rows = [list(r) for r in init.rows]
    events: list[MoveEvent] = []
    agenda = sorted(
        (t, k, j, d) for (k, j, d), times in rings.items() for t in times if t < t_end
    )
    for t, k, j, d in agenda:
        if _wall_blocked(rows, k, j, d):
            continue
        _apply_wall_jump(rows, k, j, d, t, events, "self")
    return Trajectory(init, events, Pattern(tuple(tuple(r) for r in rows), init.kind))


def simulate_wall(n: int, q, init: Pattern, t_end: float, rng) -> Trajectory:
    """Two-sided dynamics behind a wall: odd rows jump right at their rate and
    left at its inverse, even rows with the rates reversed; left jumps of the
    leftmost odd-row particles are suppressed at the origin."""
    k_top = (n + 1) // 2
    qs = rates_of(q, k_top, open_unit=True)
    if init.kind != SYMPLECTIC or init.nrows != n or not is_valid(init):
        raise ValueError("init must be a valid symplectic pattern of matching size")
    rings = {}
    for r in range(1, n + 1):
        k = (r + 1) // 2
        right = float(qs[k - 1]) if r % 2 == 1 else float(1 / qs[k - 1])
        left = float(1 / qs[k - 1]) if r % 2 == 1 else float(qs[k - 1])
        for j in range(1, (r + 1) // 2 + 1):
            rings[(r, j, 1)] = _ring_times(right, t_end, rng)
            rings[(r, j, -1)] = _ring_times(left, t_end, rng)
    return wall_from_rings(n, rings, init, t_end)


# ---------------------------------------------------------------------------
# reference chains driven directly by a generator or kernel

def _coordinate_events(time, old, new, events):
    for i, (a, b) in enumerate(zip(old, new)):
        if a != b:
            events.append(MoveEvent(time, 0, i + 1, b - a, "self"))


def simulate_reference(op, init, horizon, rng) -> Trajectory:
    """Simulate the chain of a SparseGenerator (continuous time, exponential
    holding) or StepKernel (horizon = number of steps) from init."""
    s = coords_of(init)
    if s not in op.state_set:
        raise ValueError(f"initial state {s} not in the operator's space")
    events: list[MoveEvent] = []
    if isinstance(op, SparseGenerator):
        t = 0.0
        while True:
            row = op.row(s)
            total = -float(row.get(s, Fraction(0)))
            if total <= 0.0:
                break
            t += rng.exponential(1.0 / total)
            if t >= horizon:
                break
            u = rng.random() * total
            acc = 0.0
            chosen = None
            for tgt, rate in sorted((k, v) for k, v in row.items() if k != s):
                acc += float(rate)
                if u <= acc:
                    chosen = tgt
                    break
            if chosen is None:
                raise RuntimeError("trajectory escaped the truncation; enlarge bound")
            _coordinate_events(t, s, chosen, events)
            s = chosen
    elif isinstance(op, StepKernel):
        for step in range(1, int(horizon) + 1):
            u = rng.random()
            acc = 0.0
            chosen = None
            for tgt, pr in sorted(op.row(s).items()):
                acc += float(pr)
                if u <= acc:
                    chosen = tgt
                    break
            if chosen is None:
                raise RuntimeError("trajectory escaped the truncation; enlarge bound")
            _coordinate_events(step, s, chosen, events)
            s = chosen
    else:
        raise TypeError(f"cannot simulate a {type(op).__name__}")
    return Trajectory(coords_of(init), events, s)


def zero_pattern(n: int, kind: str = STANDARD) -> Pattern:
    """The all-zero pattern of height n."""
    if kind == STANDARD:
        return Pattern(tuple((0,) * j for j in range(1, n + 1)), kind)
    return Pattern(tuple((0,) * ((j + 1) // 2) for j in range(1, n + 1)), kind)
