"""Generators and transition kernels as explicit sparse maps over truncated cones.

Every object lives on a finite box {0 <= coordinate <= bound}; entries whose
target falls outside the box are dropped, and exact assertions downstream are
made only at interior states (all coordinates <= bound-1).  Values are exact
rationals throughout.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product

from . import schur
from .patterns import coords_of, interlace_nest, interlace_shift, is_ordered, rates_of

POISSON = "poisson"
GEOMETRIC = "geometric"
WALL_ODD_EVEN = "wall-odd-even"
WALL_EVEN_ODD = "wall-even-odd"

VARIANTS = (POISSON, GEOMETRIC, WALL_ODD_EVEN, WALL_EVEN_ODD)


def chamber_states(n: int, bound: int) -> list[tuple[int, ...]]:
    """Nondecreasing integer vectors of length n with entries in [0, bound]."""
    return list(combinations_with_replacement(range(bound + 1), n))


def nested_pairs(n: int, bound: int) -> list[tuple[tuple, tuple]]:
    """Pairs (x, y), y one longer, x nested in y, on the box."""
    out = []
    for y in chamber_states(n + 1, bound):
        for x in product(*(range(y[i], y[i + 1] + 1) for i in range(n))):
            out.append((x, y))
    return out


def shifted_pairs(n: int, bound: int) -> list[tuple[tuple, tuple]]:
    """Pairs (x, y) of equal length with x shifted-interlaced below y, wall at 0."""
    out = []
    for y in chamber_states(n, bound):
        lows = [0 if i == 0 else y[i - 1] for i in range(n)]
        for x in product(*(range(lo, hi + 1) for lo, hi in zip(lows, y))):
            out.append((x, y))
    return out


def _bump(v: tuple, i: int, d: int) -> tuple:
    return v[:i] + (v[i] + d,) + v[i + 1:]


def _flat(state):
    if state and isinstance(state[0], tuple):
        return [c for part in state for c in part]
    return list(state)


def _fmt_state(state):
    if state and isinstance(state[0], tuple):
        return [list(part) for part in state]
    return list(state)


class _SparseOperator:
    """Common storage: row-major sparse map state -> {state: Fraction}."""

    value_key = "value"

    def __init__(self, states, rows, bound: int, label: str = ""):
        self.states = list(states)
        self.state_set = frozenset(self.states)
        self.rows = rows
        self.bound = bound
        self.label = label

    def row(self, s) -> dict:
        return self.rows.get(s, {})

    def value(self, s, t) -> Fraction:
        return self.rows.get(s, {}).get(t, Fraction(0))

    def is_interior(self, s) -> bool:
        return all(c <= self.bound - 1 for c in _flat(s))

    def interior_states(self):
        return [s for s in self.states if self.is_interior(s)]

    def to_json_dict(self) -> dict:
        entries = [
            {"from": _fmt_state(s), "to": _fmt_state(t), self.value_key: str(v)}
            for s in self.states
            for t, v in sorted(self.rows.get(s, {}).items())
        ]
        return {"label": self.label, "bound": self.bound, "entries": entries}


class SparseGenerator(_SparseOperator):
    """Truncated Q-matrix: nonnegative off-diagonals, nonpositive diagonal."""

    value_key = "rate"

    def rate(self, s, t) -> Fraction:
        return self.value(s, t)


class StepKernel(_SparseOperator):
    """Truncated one-step transition kernel: entries are probabilities."""

    value_key = "prob"

    def prob(self, s, t) -> Fraction:
        return self.value(s, t)


# ---------------------------------------------------------------------------
# marginal generators / kernels

def q_charlier(n: int, q, bound: int) -> SparseGenerator:
    """Generator of n ordered walkers conditioned to stay ordered.

    Off-diagonal rate to x+e_i is the ratio of Schur values; the diagonal is
    -(sum of rates), which the harmonicity identity makes exact at every
    chamber point.
    """
    qs = rates_of(q, n)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    total = sum(qs)
    rows = {}
    states = chamber_states(n, bound)
    for x in states:
        row = {x: -total}
        sx = schur.schur(x, qs)
        for i in range(n):
            if (i == n - 1 or x[i] < x[i + 1]) and x[i] + 1 <= bound:
                xt = _bump(x, i, 1)
                row[xt] = schur.schur(xt, qs) / sx
        rows[x] = row
    return SparseGenerator(states, rows, bound, f"charlier n={n}")


def kernel_geometric(n: int, q, bound: int) -> StepKernel:
    """One-step kernel of ordered walkers with geometric jumps, conditioned
    to stay shifted-interlaced; rows sum to 1 over the untruncated targets."""
    qs = rates_of(q, n, open_unit=True)
    a = Fraction(1)
    for v in qs:
        a *= 1 - v
    rows = {}
    states = chamber_states(n, bound)
    for x in states:
        sx = schur.schur(x, qs)
        row = {}
        highs = [x[i + 1] if i + 1 < n else bound for i in range(n)]
        for xt in product(*(range(lo, hi + 1) for lo, hi in zip(x, highs))):
            row[xt] = a * schur.schur(xt, qs) / sx
        rows[x] = row
    return StepKernel(states, rows, bound, f"geometric n={n}")


def q_symplectic(n: int, q, bound: int) -> SparseGenerator:
    """Generator of the row-n marginal of the wall dynamics: nearest-neighbour
    moves with symplectic-Schur ratio rates and the parity-dependent diagonal."""
    k = (n + 1) // 2
    qs = rates_of(q, k)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    states = chamber_states(k, bound)
    rows = {}
    for x in states:
        sx = schur.sp_schur(n, x, qs)
        if n % 2 == 1:
            diag = sum(v + 1 / v for v in qs[: k - 1]) + qs[k - 1]
            if x[0] > 0:
                diag += 1 / qs[k - 1]
        else:
            diag = sum(v + 1 / v for v in qs)
        row = {x: -diag}
        for i in range(k):
            if (i == k - 1 or x[i] < x[i + 1]) and x[i] + 1 <= bound:
                xt = _bump(x, i, 1)
                row[xt] = schur.sp_schur(n, xt, qs) / sx
            lower = 0 if i == 0 else x[i - 1]
            if x[i] - 1 >= lower:
                xt = _bump(x, i, -1)
                row[xt] = schur.sp_schur(n, xt, qs) / sx
        rows[x] = row
    return SparseGenerator(states, rows, bound, f"symplectic n={n}")


# ---------------------------------------------------------------------------
# two-row coupling generators / kernels

def coupling_generator_poisson(n: int, q_ext, bound: int) -> SparseGenerator:
    """Joint generator of consecutive rows (X, Y) for the rightward dynamics:
    free X jumps, X jumps that push Y, and free Y jumps at the extra rate."""
    qs = rates_of(q_ext, n + 1)
    qx, qy = qs[:n], qs[n]
    states = nested_pairs(n, bound)
    rows = {}
    for x, y in states:
        diag = sum(qs) + qy * sum(1 for i in range(n) if y[i] < x[i])
        row = {(x, y): -diag}
        sx = schur.schur(x, qx)
        for i in range(n):
            if (i == n - 1 or x[i] < x[i + 1]) and x[i] + 1 <= bound:
                xt = _bump(x, i, 1)
                rate = schur.schur(xt, qx) / sx
                if x[i] < y[i + 1]:
                    row[(xt, y)] = rate
                else:  # x_i = y_{i+1}: the jump drags Y's next particle along
                    row[(xt, _bump(y, i + 1, 1))] = rate
        for j in range(n + 1):
            if y[j] + 1 > bound:
                continue
            if j == n or y[j] < x[j]:
                row[(x, _bump(y, j, 1))] = qy
        rows[(x, y)] = row
    return SparseGenerator(states, rows, bound, f"coupling-poisson n={n}")


def blocking_factor(u: int, v: int, q) -> Fraction:
    """Probability factor for the driven particle ending at v under a cap at u."""
    q = Fraction(q)
    if v < u:
        return 1 - q
    if v == u:
        return Fraction(1)
    return Fraction(0)


def pushing_factor(u: int, v: int, q) -> Fraction:
    """Rate-normalising power q^{-max(u,v)} for a particle pushed to max(u,v)."""
    q = Fraction(q)
    return q ** (-v) if u <= v else q ** (-u)


def _geometric_pair_step(yt, xt, x, y, qy: Fraction) -> Fraction:
    """Conditional probability of Y-step y -> yt given X went x -> xt."""
    n = len(x)
    val = qy ** (yt[0] - y[0]) * blocking_factor(x[0], yt[0], qy)
    for j in range(1, n):
        val *= qy ** yt[j] * blocking_factor(x[j], yt[j], qy) * pushing_factor(xt[j - 1], y[j], qy)
    val *= qy ** yt[n] * (1 - qy) * pushing_factor(xt[n - 1], y[n], qy)
    return val


def coupling_kernel_geometric(n: int, q_ext, bound: int) -> StepKernel:
    """One-step kernel of the paired geometric recursion (X pushes, old X blocks)."""
    qs = rates_of(q_ext, n + 1, open_unit=True)
    qx, qy = qs[:n], qs[n]
    ax = Fraction(1)
    for v in qx:
        ax *= 1 - v
    states = nested_pairs(n, bound)
    rows = {}
    for x, y in states:
        sx = schur.schur(x, qx)
        row = {}
        xhighs = [x[i + 1] if i + 1 < n else bound for i in range(n)]
        for xt in product(*(range(lo, hi + 1) for lo, hi in zip(x, xhighs))):
            px = ax * schur.schur(xt, qx) / sx
            ranges = []
            for j in range(n + 1):
                lo = y[j] if j == 0 else max(y[j], xt[j - 1])
                hi = min(y[j + 1], x[j]) if j < n else bound
                if lo > hi:
                    ranges = None
                    break
                ranges.append(range(lo, hi + 1))
            if ranges is None:
                continue
            for yt in product(*ranges):
                row[(xt, yt)] = _geometric_pair_step(yt, xt, x, y, qy) * px
        rows[(x, y)] = row
    return StepKernel(states, rows, bound, f"coupling-geometric n={n}")


def coupling_generator_wall_odd_even(n: int, q, bound: int) -> SparseGenerator:
    """Joint generator for an odd row X over the next (same-length) even row Y:
    X moves at symplectic ratio rates, dragging or pushing Y at coincidences;
    Y moves freely at the reversed rates."""
    qs = rates_of(q, n)
    qn = qs[n - 1]
    states = shifted_pairs(n, bound)
    rows = {}
    for x, y in states:
        sx = schur.sp_schur(2 * n - 1, x, qs)
        diag = sum(v + 1 / v for v in qs[: n - 1]) + qn + 1 / qn
        if x[0] > 0:
            diag += 1 / qn
        for i in range(n - 1):
            if y[i] < x[i + 1]:
                diag += 1 / qn
            if y[i] > x[i]:
                diag += qn
        if y[n - 1] > x[n - 1]:
            diag += qn
        row = {(x, y): -diag}
        for i in range(n):
            # X moves right: pushes Y_i when they coincide
            if (i == n - 1 or x[i] < x[i + 1]) and x[i] + 1 <= bound:
                xt = _bump(x, i, 1)
                rate = schur.sp_schur(2 * n - 1, xt, qs) / sx
                if x[i] == y[i]:
                    row[(xt, _bump(y, i, 1))] = rate
                else:
                    row[(xt, y)] = rate
            # X moves left: drags Y_{i-1} when they coincide
            lower = 0 if i == 0 else x[i - 1]
            if x[i] - 1 >= lower:
                xt = _bump(x, i, -1)
                rate = schur.sp_schur(2 * n - 1, xt, qs) / sx
                if i >= 1 and x[i] == y[i - 1]:
                    row[(xt, _bump(y, i - 1, -1))] = rate
                else:
                    row[(xt, y)] = rate
        for j in range(n):
            # free Y moves; the even row has reversed rates
            if (j == n - 1 or y[j] < x[j + 1]) and y[j] + 1 <= bound:
                row[(x, _bump(y, j, 1))] = 1 / qn
            if y[j] > x[j]:
                row[(x, _bump(y, j, -1))] = qn
        rows[(x, y)] = row
    return SparseGenerator(states, rows, bound, f"coupling-wall-odd-even n={n}")


def coupling_generator_wall_even_odd(n: int, q_ext, bound: int) -> SparseGenerator:
    """Joint generator for an even row X over the next (one-longer) odd row Y;
    the leftmost Y particle has its left jump suppressed at the wall."""
    qs = rates_of(q_ext, n + 1)
    qx, qy = qs[:n], qs[n]
    states = nested_pairs(n, bound)
    rows = {}
    for x, y in states:
        sx = schur.sp_schur(2 * n, x, qx)
        diag = sum(v + 1 / v for v in qx) + qy
        if y[0] > 0:
            diag += 1 / qy
        for i in range(n):
            if y[i] < x[i]:
                diag += qy
            if y[i + 1] > x[i]:
                diag += 1 / qy
        row = {(x, y): -diag}
        for i in range(n):
            # X right: pushes Y_{i+1} at coincidence
            if (i == n - 1 or x[i] < x[i + 1]) and x[i] + 1 <= bound:
                xt = _bump(x, i, 1)
                rate = schur.sp_schur(2 * n, xt, qx) / sx
                if x[i] == y[i + 1]:
                    row[(xt, _bump(y, i + 1, 1))] = rate
                else:
                    row[(xt, y)] = rate
            # X left: drags Y_i at coincidence
            lower = 0 if i == 0 else x[i - 1]
            if x[i] - 1 >= lower:
                xt = _bump(x, i, -1)
                rate = schur.sp_schur(2 * n, xt, qx) / sx
                if x[i] == y[i]:
                    row[(xt, _bump(y, i, -1))] = rate
                else:
                    row[(xt, y)] = rate
        for j in range(n + 1):
            if (j == n or y[j] < x[j]) and y[j] + 1 <= bound:
                row[(x, _bump(y, j, 1))] = qy
            low = 1 if j == 0 else x[j - 1] + 1
            if y[j] >= low:
                row[(x, _bump(y, j, -1))] = 1 / qy
        rows[(x, y)] = row
    return SparseGenerator(states, rows, bound, f"coupling-wall-even-odd n={n}")


# ---------------------------------------------------------------------------
# the coupling weight m and the kernel it induces

def m_weight(x, y, variant: str, q_ext) -> Fraction:
    """Exact conditional weight of the upper row x given the lower row y.

    Zero whenever the interlacing between x and y fails; for fixed y the
    weights over all admissible x sum to 1.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    x = coords_of(x)
    y = coords_of(y)
    qs = rates_of(q_ext)
    return _m_weight(x, y, variant, qs)


@lru_cache(maxsize=None)
def _m_weight(x, y, variant, qs) -> Fraction:
    if variant in (POISSON, GEOMETRIC):
        n = len(x)
        if len(y) != n + 1 or len(qs) != n + 1:
            raise ValueError("poisson/geometric weight needs |y| = |x|+1 = |q|")
        if not (is_ordered(x) and is_ordered(y) and interlace_nest(x, y)):
            return Fraction(0)
        return qs[n] ** (sum(y) - sum(x)) * schur.schur(x, qs[:n]) / schur.schur(y, qs)
    if variant == WALL_ODD_EVEN:
        n = len(x)
        if len(y) != n or len(qs) != n:
            raise ValueError("wall-odd-even weight needs |y| = |x| = |q|")
        if not (is_ordered(x) and x[0] >= 0 and is_ordered(y) and interlace_shift(x, y)):
            return Fraction(0)
        return (
            qs[n - 1] ** (sum(x) - sum(y))
            * schur.sp_schur(2 * n - 1, x, qs)
            / schur.sp_schur(2 * n, y, qs)
        )
    n = len(x)
    if len(y) != n + 1 or len(qs) != n + 1:
        raise ValueError("wall-even-odd weight needs |y| = |x|+1 = |q|")
    if not (is_ordered(x) and x[0] >= 0 and is_ordered(y) and interlace_nest(x, y)):
        return Fraction(0)
    return (
        qs[n] ** (sum(y) - sum(x))
        * schur.sp_schur(2 * n, x, qs[:n])
        / schur.sp_schur(2 * n + 1, y, qs)
    )


def _m_support(y, variant):
    """All upper rows interlacing with y (a finite set, bounded by y itself)."""
    y = coords_of(y)
    if variant == WALL_ODD_EVEN:
        lows = [0 if i == 0 else y[i - 1] for i in range(len(y))]
        return [x for x in product(*(range(lo, hi + 1) for lo, hi in zip(lows, y)))]
    return [x for x in product(*(range(y[i], y[i + 1] + 1) for i in range(len(y) - 1)))]


def lambda_kernel(y, variant: str, q_ext) -> list[tuple[tuple, Fraction]]:
    """Distribution over paired states ((x, y), weight); masses sum to 1.

    The support is finite by interlacing, so no truncation bound is needed.
    """
    y = coords_of(y)
    qs = rates_of(q_ext)
    return [((x, y), _m_weight(x, y, variant, qs)) for x in _m_support(y, variant)]


class LambdaKernel:
    """Markov kernel y -> (x, y) given by the coupling weight of a variant."""

    def __init__(self, variant: str, q_ext):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.variant = variant
        self.qs = rates_of(q_ext)

    def weight(self, x, y) -> Fraction:
        return _m_weight(coords_of(x), coords_of(y), self.variant, self.qs)

    def support(self, y) -> list[tuple[tuple, Fraction]]:
        return lambda_kernel(y, self.variant, self.qs)
