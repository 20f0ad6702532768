"""Cone geometry for integer Gelfand-Tsetlin patterns, standard and symplectic.

States are nondecreasing integer vectors (Weyl chamber points); a pattern
stacks such rows tied together by interlacing constraints.  All weights and
probabilities are exact ``fractions.Fraction``; randomness enters only at the
final draw inside :func:`sample_pattern`.
"""
from __future__ import annotations

import re

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

STANDARD = "standard"
SYMPLECTIC = "symplectic"


_RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?")


def frac(value) -> Fraction:
    """Exact rational from int, 'p/q' string or Fraction.  Float values and
    decimal notation are refused: exactness is part of the contract."""
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}; pass an exact rational (int, 'p/q' string or Fraction)"
        )
    if isinstance(value, str) and not _RATIONAL_RE.fullmatch(value.strip()):
        raise ValueError(f"not a p/q rational: {value!r}")
    return Fraction(value)


def coords_of(x) -> tuple[int, ...]:
    """Plain integer tuple behind a ChamberPoint or any int sequence."""
    if isinstance(x, ChamberPoint):
        return x.coords
    return tuple(int(c) for c in x)


def is_ordered(z) -> bool:
    return all(z[i] <= z[i + 1] for i in range(len(z) - 1))


def rates_of(q, expect: int | None = None, open_unit: bool = False) -> tuple[Fraction, ...]:
    """Normalise a rate argument (RateVector or sequence) to positive Fractions."""
    qs = q.q if isinstance(q, RateVector) else tuple(frac(v) for v in q)
    if expect is not None and len(qs) != expect:
        raise ValueError(f"expected {expect} rates, got {len(qs)}")
    if any(v <= 0 for v in qs):
        raise ValueError("rates must be positive")
    if open_unit and any(v >= 1 for v in qs):
        raise ValueError("rates must lie in the open interval (0,1)")
    return qs


@dataclass(frozen=True)
class ChamberPoint:
    """Ordered integer vector; with ``wall`` set, the leftmost entry is >= 0."""

    coords: tuple[int, ...]
    wall: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if not is_ordered(self.coords):
            raise ValueError(f"coordinates must be nondecreasing: {self.coords}")
        if self.wall and self.coords and self.coords[0] < 0:
            raise ValueError(f"wall chamber requires nonnegative entries: {self.coords}")

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


@dataclass(frozen=True)
class RateVector:
    """Vector of exact positive jump rates; geometric parameters carry open_unit."""

    q: tuple[Fraction, ...]
    open_unit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(frac(v) for v in self.q))
        if any(v <= 0 for v in self.q):
            raise ValueError("rates must be positive")
        if self.open_unit and any(v >= 1 for v in self.q):
            raise ValueError("rates must lie in (0,1)")

    @classmethod
    def parse(cls, text: str, open_unit: bool = False) -> "RateVector":
        """Parse a comma-separated list of 'p/q' strings."""
        return cls(tuple(frac(part.strip()) for part in text.split(",")), open_unit)

    def __len__(self):
        return len(self.q)

    def __iter__(self):
        return iter(self.q)


def row_length(j: int, kind: str) -> int:
    """Entries in row j (1-based): j for standard patterns, ceil(j/2) symplectic."""
    return j if kind == STANDARD else (j + 1) // 2


@dataclass(frozen=True)
class Pattern:
    """Rows of a (symplectic) Gelfand-Tsetlin configuration, top row first.

    Row lengths are validated here; interlacing is the business of
    :func:`is_valid`, so deliberately broken configurations can be built for
    testing.
    """

    rows: tuple[tuple[int, ...], ...]
    kind: str = STANDARD

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if self.kind not in (STANDARD, SYMPLECTIC):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        for j, row in enumerate(rows, start=1):
            want = row_length(j, self.kind)
            if len(row) != want:
                raise ValueError(
                    f"{self.kind} row {j} must have {want} entries, got {len(row)}"
                )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def bottom_row(self) -> tuple[int, ...]:
        return self.rows[-1]


# ---------------------------------------------------------------------------
# interlacing predicates

def interlace_shift(x, xp) -> bool:
    """x1 <= x'1 <= x2 <= ... <= x'_{n-1} <= xn <= x'n for equal lengths."""
    a, b = coords_of(x), coords_of(xp)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    for i in range(len(a)):
        if not a[i] <= b[i]:
            return False
        if i + 1 < len(a) and not b[i] <= a[i + 1]:
            return False
    return True


def interlace_nest(x, y) -> bool:
    """y_i <= x_i <= y_{i+1} where y is one entry longer than x."""
    a, b = coords_of(x), coords_of(y)
    if len(b) != len(a) + 1:
        raise ValueError(f"length mismatch: expected {len(a) + 1}, got {len(b)}")
    return all(b[i] <= a[i] <= b[i + 1] for i in range(len(a)))


def is_valid(p: Pattern) -> bool:
    """All row-pair interlacings (plus nonnegativity for symplectic) hold."""
    rows = p.rows
    for row in rows:
        if not is_ordered(row):
            return False
        if p.kind == SYMPLECTIC and row and row[0] < 0:
            return False
    for j in range(1, len(rows)):
        upper, lower = rows[j - 1], rows[j]
        if p.kind == STANDARD:
            if not interlace_nest(upper, lower):
                return False
        else:
            # row pair (2i-1, 2i) shares a length and interlaces shifted;
            # pair (2i, 2i+1) nests.
            if len(upper) == len(lower):
                if not interlace_shift(upper, lower):
                    return False
            else:
                if not interlace_nest(upper, lower):
                    return False
    return True


# ---------------------------------------------------------------------------
# interlacing-bounded candidate enumeration

def nest_candidates(z):
    """All z' one entry shorter with z' nested below z (z'_i in [z_i, z_{i+1}])."""
    z = coords_of(z)
    if len(z) == 1:
        yield ()
        return
    for c in product(*(range(z[i], z[i + 1] + 1) for i in range(len(z) - 1))):
        yield c


def shift_candidates_below(z):
    """Same-length z' with z' shifted-interlaced below z and z'_1 >= 0."""
    z = coords_of(z)
    lows = [0 if i == 0 else z[i - 1] for i in range(len(z))]
    for c in product(*(range(lo, hi + 1) for lo, hi in zip(lows, z))):
        yield c


def shift_candidates_above(x, cap: int):
    """Same-length x' with x shifted-interlaced below x', coordinates <= cap."""
    x = coords_of(x)
    n = len(x)
    highs = [x[i + 1] if i + 1 < n else cap for i in range(n)]
    for c in product(*(range(lo, hi + 1) for lo, hi in zip(x, highs))):
        yield c


def _upper_row_candidates(row, kind, j):
    """Candidates for row j-1 given row j (1-based row index)."""
    if kind == STANDARD or j % 2 == 1:
        return nest_candidates(row)
    return shift_candidates_below(row)


def enumerate_patterns(z, kind: str = STANDARD, nrows: int | None = None) -> list[Pattern]:
    """Exhaustive list of patterns with bottom row z.  Desk scale only.

    For symplectic patterns the height is ambiguous given the bottom row
    (rows 2k-1 and 2k share a length), so ``nrows`` must be supplied.
    """
    z = coords_of(z)
    if kind == STANDARD:
        if nrows is None:
            nrows = len(z)
        if nrows != len(z):
            raise ValueError("standard pattern height must equal the bottom row length")
        if not is_ordered(z):
            raise ValueError(f"bottom row must be nondecreasing: {z}")
    else:
        if nrows is None:
            raise ValueError("symplectic enumeration needs nrows (2k-1 or 2k)")
        if len(z) != row_length(nrows, SYMPLECTIC):
            raise ValueError(f"bottom row of height-{nrows} pattern needs "
                             f"{row_length(nrows, SYMPLECTIC)} entries")
        if not is_ordered(z) or (z and z[0] < 0):
            raise ValueError(f"bottom row must be in the nonnegative chamber: {z}")

    out: list[Pattern] = []

    def descend(stack):
        j = nrows - len(stack) + 1  # 1-based index of stack[-1]
        if j == 1:
            out.append(Pattern(tuple(reversed(stack)), kind))
            return
        for above in _upper_row_candidates(stack[-1], kind, j):
            descend(stack + [above])

    descend([z])
    return out


def weight(p: Pattern, q) -> Fraction:
    """Geometric pattern weight: the product of per-row rate powers."""
    n = p.nrows
    expect = n if p.kind == STANDARD else (n + 1) // 2
    qs = rates_of(q, expect)
    sums = [0] + [sum(row) for row in p.rows]
    w = Fraction(1)
    if p.kind == STANDARD:
        for i in range(1, n + 1):
            w *= qs[i - 1] ** (sums[i] - sums[i - 1])
        return w
    for j in range(1, n + 1):
        i = (j + 1) // 2
        if j % 2 == 1:
            w *= qs[i - 1] ** (sums[j] - sums[j - 1])
        else:
            w *= qs[i - 1] ** (sums[j - 1] - sums[j])
    return w


def sample_pattern(z, q, kind: str = STANDARD, rng=None, nrows: int | None = None) -> Pattern:
    """Draw a pattern with bottom row z from its geometric-weight distribution.

    Sampling is top-row-last: row j-1 is drawn given row j with probability
    proportional to the branching weight, all conditional weights exact
    rationals; ``rng.random()`` is consulted once per row.
    """
    from . import schur  # deferred: schur builds on this module's geometry

    z = coords_of(z)
    if rng is None:
        raise ValueError("sample_pattern needs an explicit rng")
    if kind == STANDARD:
        nrows = len(z) if nrows is None else nrows
        qs = rates_of(q, len(z))
        if not is_ordered(z):
            raise ValueError(f"invalid bottom row {z}")
    else:
        if nrows is None:
            raise ValueError("symplectic sampling needs nrows (2k-1 or 2k)")
        qs = rates_of(q, (nrows + 1) // 2)
        if not is_ordered(z) or (z and z[0] < 0):
            raise ValueError(f"invalid bottom row {z}")

    rows = [z]
    cur = z
    for j in range(nrows, 1, -1):
        if kind == STANDARD:
            m = j  # row j uses the first j rates
            cands = [
                (za, qs[m - 1] ** (sum(cur) - sum(za)) * schur.schur(za, qs[: m - 1]))
                for za in nest_candidates(cur)
            ]
        elif j % 2 == 0:
            m = j // 2
            cands = [
                (za, qs[m - 1] ** (sum(za) - sum(cur)) * schur.sp_schur(j - 1, za, qs[:m]))
                for za in shift_candidates_below(cur)
            ]
        else:
            m = j // 2  # row j = 2m+1 sits above row 2m with m entries
            cands = [
                (za, qs[m] ** (sum(cur) - sum(za)) * schur.sp_schur(j - 1, za, qs[:m]))
                for za in nest_candidates(cur)
            ]
        total = sum(w for _, w in cands)
        target = Fraction(rng.random()) * total
        acc = Fraction(0)
        chosen = cands[-1][0]
        for za, w in cands:
            acc += w
            if acc >= target:
                chosen = za
                break
        rows.append(chosen)
        cur = chosen
    return Pattern(tuple(reversed(rows)), kind)
