"""Pathwise functionals of the driving noise and the checks coupling them to
edge processes of the pattern dynamics.

A noise panel is materialised once and drives both sides of an identity, so
equality claims are checked exactly, path by path.  The wall-sup functional is
deterministic in its panel but only matches its conditioned-walk reference in
distribution.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .patterns import rates_of


@dataclass(frozen=True)
class PoissonPanel:
    """Jump times of independent counting processes, one tuple per component."""

    times: tuple[tuple[float, ...], ...]
    t_end: float

    def to_json_dict(self):
        return {"kind": "poisson", "t_end": self.t_end,
                "times": [list(ts) for ts in self.times]}


@dataclass(frozen=True)
class GeometricPanel:
    """Nonnegative integer field eta[k][t-1], jump draws for site (t, k+1)."""

    eta: tuple[tuple[int, ...], ...]

    def to_json_dict(self):
        return {"kind": "geometric", "eta": [list(row) for row in self.eta]}


@dataclass(frozen=True)
class WallPanel:
    """Signed jumps ((time, +-1), ...) of the interleaved walk components."""

    jumps: tuple[tuple[tuple[float, int], ...], ...]
    t_end: float

    def to_json_dict(self):
        return {"kind": "wall", "t_end": self.t_end,
                "jumps": [[[t, s] for t, s in comp] for comp in self.jumps]}


def panel_from_json(payload) -> object:
    if isinstance(payload, str):
        payload = json.loads(payload)
    kind = payload["kind"]
    if kind == "poisson":
        return PoissonPanel(tuple(tuple(ts) for ts in payload["times"]), payload["t_end"])
    if kind == "geometric":
        return GeometricPanel(tuple(tuple(int(v) for v in row) for row in payload["eta"]))
    if kind == "wall":
        return WallPanel(
            tuple(tuple((t, int(s)) for t, s in comp) for comp in payload["jumps"]),
            payload["t_end"],
        )
    raise ValueError(f"unknown panel kind {kind!r}")


def poisson_panel(n: int, q, t_end: float, rng) -> PoissonPanel:
    qs = rates_of(q, n)
    times = tuple(
        tuple(dynamics._ring_times(float(v), t_end, rng)) for v in qs
    )
    return PoissonPanel(times, t_end)


def geometric_panel(n: int, q, t_max: int, rng) -> GeometricPanel:
    qs = rates_of(q, n, open_unit=True)
    eta = tuple(
        tuple(int(v) for v in rng.geometric(float(1 - qs[k]), size=t_max) - 1)
        for k in range(n)
    )
    return GeometricPanel(eta)


def wall_panel(k: int, q, t_end: float, rng) -> WallPanel:
    """Interleaved components (Z_1, Z~_1, ..., Z_k, Z~_k): Z_i steps +1 at rate
    1/q_i and -1 at rate q_i; Z~_i is distributed as -Z_i."""
    qs = rates_of(q, k, open_unit=True)
    comps = []
    for i in range(k):
        up, down = float(1 / qs[i]), float(qs[i])
        for a, b in ((up, down), (down, up)):
            plus = [(t, 1) for t in dynamics._ring_times(a, t_end, rng)]
            minus = [(t, -1) for t in dynamics._ring_times(b, t_end, rng)]
            comps.append(tuple(sorted(plus + minus)))
    return WallPanel(tuple(comps), t_end)


class _StepPath:
    """Right-continuous integer step function of time."""

    def __init__(self, jumps):
        # jumps: iterable of (time, increment), time-sorted
        self.times = [0.0]
        self.values = [0]
        for t, d in jumps:
            if t == self.times[-1]:
                self.values[-1] += d
            else:
                self.times.append(t)
                self.values.append(self.values[-1] + d)

    def value(self, t: float) -> int:
        return self.values[bisect_right(self.times, t) - 1]


# ---------------------------------------------------------------------------
# left edge of the rightward dynamics

def left_edge_from_walk(panel: PoissonPanel, t_grid) -> list[list[int]]:
    """Rows of the reflection recursion along t_grid, starting from zero.

    Row 1 is the first counting process; row k+1 adds the running infimum of
    (row k minus the (k+1)-th process) to that process.
    """
    grid = list(t_grid)
    if any(grid[i] > grid[i + 1] for i in range(len(grid) - 1)):
        raise ValueError("t_grid must be sorted")
    n = len(panel.times)
    z_paths = [_StepPath((t, 1) for t in ts) for ts in panel.times]
    event_times = sorted({t for ts in panel.times for t in ts})
    rows = [z_paths[0]]
    for k in range(1, n):
        prev, z = rows[k - 1], z_paths[k]
        inf_jumps = []
        running = prev.value(0.0) - z.value(0.0)  # = 0 at the origin
        level = running
        for t in event_times:
            diff = prev.value(t) - z.value(t)
            if diff < running:
                inf_jumps.append((t, diff - level))
                level = diff
                running = diff
        inf_path = _StepPath(inf_jumps)
        combined = _StepPath([])
        combined.times = event_times[:] if event_times else [0.0]
        if not combined.times or combined.times[0] != 0.0:
            combined.times = [0.0] + combined.times
        combined.values = [z.value(t) + inf_path.value(t) for t in combined.times]
        rows.append(combined)
    return [[path.value(t) for t in grid] for path in rows]


def left_edge_matches_dynamics(panel: PoissonPanel, n: int, q, rng=None) -> bool:
    """Exact pathwise equality between the constructed left edge and the left
    edge of the full simulated pattern driven by the same panel."""
    qs = rates_of(q, n)
    rng = rng if rng is not None else np.random.default_rng(0)
    t_end = panel.t_end
    rings = {}
    for k in range(1, n + 1):
        rings[(k, 1)] = list(panel.times[k - 1])
        for j in range(2, k + 1):
            rings[(k, j)] = dynamics._ring_times(float(qs[k - 1]), t_end, rng)
    traj = dynamics.poisson_from_rings(n, rings, dynamics.zero_pattern(n), t_end)
    edge_jumps = {k: [] for k in range(1, n + 1)}
    for e in traj.events:
        if e.index == 1:
            edge_jumps[e.row].append((e.time, e.displacement))
    simulated = [_StepPath(edge_jumps[k]) for k in range(1, n + 1)]
    checkpoints = sorted({t for ts in panel.times for t in ts} | {t_end})
    constructed = left_edge_from_walk(panel, checkpoints)
    for k in range(n):
        if any(simulated[k].value(t) != constructed[k][i] for i, t in enumerate(checkpoints)):
            return False
    return True


# ---------------------------------------------------------------------------
# last passage times

def lpp_G(panel: GeometricPanel, n: int, t_max: int | None = None) -> list[list[int]]:
    """Last passage times G[k-1][t-1] into (t, k) by the corner recursion."""
    eta = panel.eta
    if t_max is None:
        t_max = len(eta[0]) if eta else 0
    g = [[0] * (t_max + 1) for _ in range(n + 1)]
    for k in range(1, n + 1):
        for t in range(1, t_max + 1):
            g[k][t] = max(g[k - 1][t], g[k][t - 1]) + eta[k - 1][t - 1]
    return [row[1:] for row in g[1:]]


def right_edge_equals_lpp(
    panel: GeometricPanel, n: int, q, t_max: int | None = None, rng=None
) -> bool:
    """True iff the simulated right edge equals the last passage times at
    every step, when the diagonal particles consume the panel draws."""
    qs = rates_of(q, n, open_unit=True)
    if t_max is None:
        t_max = len(panel.eta[0])
    rng = rng if rng is not None else np.random.default_rng(0)
    g = lpp_G(panel, n, t_max)
    rows = [[0] * j for j in range(1, n + 1)]
    ps = [float(1 - v) for v in qs]
    for t in range(1, t_max + 1):
        xi = []
        for r0 in range(n):
            draws = [int(v) for v in rng.geometric(ps[r0], size=r0 + 1) - 1]
            draws[r0] = panel.eta[r0][t - 1]
            xi.append(draws)
        rows, _ = dynamics.geometric_step(rows, xi)
        if any(rows[k][k] != g[k][t - 1] for k in range(n)):
            return False
    return True


# ---------------------------------------------------------------------------
# wall functional

def wall_sup_functional(panel: WallPanel, t: float) -> int:
    """Maximal interleaved increment sum over ordered split times up to t,
    evaluated exactly by dynamic programming over the panel's event times."""
    comps = [_StepPath(jumps) for jumps in panel.jumps]
    m = len(comps)
    candidates = sorted({0.0} | {tt for jumps in panel.jumps for tt, _ in jumps if tt <= t})
    best = None
    for i, comp in enumerate(comps):
        running = -(10 ** 18)
        stage = []
        for u in candidates:
            inner = -comp.value(u) if i == 0 else best[len(stage)] + comps[i - 1].value(u) - comp.value(u)
            running = max(running, inner)
            stage.append(running)
        best = stage
    return comps[m - 1].value(t) + best[-1]


def wall_sup_samples(k: int, q, t: float, trials: int, seed: int) -> list[int]:
    """Independent draws of the wall functional from freshly sampled panels."""
    out = []
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        panel = wall_panel(k, q, t, rng)
        out.append(wall_sup_functional(panel, t))
    return out
