"""Exact verification of kernel intertwinings, conservativeness, and the
uniformized semigroup consequence.

Generator checks compare Q_Y(y, y') m(x', y') against sum_x m(x, y) A((x,y),(x',y'))
entry by entry in exact rational arithmetic; sources are restricted to interior
states so truncation can never manufacture a spurious violation (all jumps have
range one).  The kernel (discrete-step) check is exact for every in-box pair
because both sides are finite rational sums.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import LambdaKernel, SparseGenerator, StepKernel, _fmt_state


@dataclass
class VerificationReport:
    case: str
    states_checked: int = 0
    violations: list = field(default_factory=list)
    max_discrepancy: Fraction = Fraction(0)
    status: str = "pass"

    def record(self, left_state, right_state, lhs: Fraction, rhs: Fraction):
        self.violations.append((left_state, right_state, lhs, rhs))
        gap = abs(lhs - rhs)
        if gap > self.max_discrepancy:
            self.max_discrepancy = gap
        self.status = "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return {
            "case": self.case,
            "states_checked": self.states_checked,
            "violations": [
                {
                    "left": _fmt_state(a),
                    "right": _fmt_state(b),
                    "lhs": str(l),
                    "rhs": str(r),
                }
                for a, b, l, r in self.violations
            ],
            "max_discrepancy": str(self.max_discrepancy),
            "status": self.status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _compare_rows(report, y, lhs: dict, rhs: dict):
    for key in sorted(set(lhs) | set(rhs)):
        lv = lhs.get(key, Fraction(0))
        rv = rhs.get(key, Fraction(0))
        report.states_checked += 1
        if lv != rv:
            report.record(y, key, lv, rv)


def verify_generator_intertwining(
    q_y: SparseGenerator, lam: LambdaKernel, gen: SparseGenerator, case: str = ""
) -> VerificationReport:
    """Check Q_Y Lambda = Lambda A entrywise over interior source states."""
    report = VerificationReport(case or f"{q_y.label} ~ {gen.label}")
    for y in q_y.states:
        if not q_y.is_interior(y):
            continue
        support = lam.support(y)
        lhs: dict = {}
        for y2, rate in q_y.row(y).items():
            for (x2, _), mass in lam.support(y2):
                if mass:
                    key = (x2, y2)
                    lhs[key] = lhs.get(key, Fraction(0)) + rate * mass
        rhs: dict = {}
        for (x, _), mass in support:
            if not mass:
                continue
            for target, rate in gen.row((x, y)).items():
                rhs[target] = rhs.get(target, Fraction(0)) + mass * rate
        _compare_rows(report, y, lhs, rhs)
    return report


def verify_kernel_intertwining(
    p_y: StepKernel, lam: LambdaKernel, q_step: StepKernel, case: str = ""
) -> VerificationReport:
    """Check m(x',y') p_Y(y,y') = sum_x m(x,y) q((x,y),(x',y')) for all in-box
    sources and targets; each instance is a finite exact computation."""
    report = VerificationReport(case or f"{p_y.label} ~ {q_step.label}")
    for y in p_y.states:
        lhs: dict = {}
        for y2, prob in p_y.row(y).items():
            for (x2, _), mass in lam.support(y2):
                if mass:
                    key = (x2, y2)
                    lhs[key] = lhs.get(key, Fraction(0)) + prob * mass
        rhs: dict = {}
        for (x, _), mass in lam.support(y):
            if not mass:
                continue
            for target, prob in q_step.row((x, y)).items():
                rhs[target] = rhs.get(target, Fraction(0)) + mass * prob
        _compare_rows(report, y, lhs, rhs)
    return report


def verify_conservative(gen: SparseGenerator, case: str = "") -> VerificationReport:
    """Interior rows must sum to exactly zero."""
    report = VerificationReport(case or f"conservative {gen.label}")
    for s in gen.states:
        if not gen.is_interior(s):
            continue
        report.states_checked += 1
        total = sum(gen.row(s).values())
        if total != 0:
            report.record(s, s, total, Fraction(0))
    return report


@dataclass
class DenseKernel:
    """Dense time-t transition kernel on an explicitly listed state space."""

    states: list
    matrix: np.ndarray
    t: float

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.states)}

    def prob(self, s, s2) -> float:
        return float(self.matrix[self.index[s], self.index[s2]])

    def row(self, s) -> np.ndarray:
        return self.matrix[self.index[s]]


def semigroup(gen: SparseGenerator, t, tol: float) -> DenseKernel:
    """Time-t kernel of the truncated generator via uniformization.

    The Poissonized power series of the jump kernel is truncated once the
    remaining Poisson tail drops below tol.  Rows of the result are
    sub-stochastic near the box edge (mass killed at escape), and row sums at
    interior states are within the escape probability of 1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    tf = float(t)
    if tf < 0:
        raise ValueError("t must be nonnegative")
    states = gen.states
    idx = {s: i for i, s in enumerate(states)}
    m = len(states)
    mat = np.zeros((m, m))
    theta = 0.0
    for s in states:
        row = gen.row(s)
        theta = max(theta, -float(row.get(s, Fraction(0))))
        for t2, v in row.items():
            mat[idx[s], idx[t2]] = float(v)
    if theta == 0.0 or tf == 0.0:
        return DenseKernel(states, np.eye(m), tf)
    jump = np.eye(m) + mat / theta
    lam = theta * tf
    out = np.zeros((m, m))
    power = np.eye(m)
    w = math.exp(-lam)
    covered = w
    out += w * power
    k = 0
    max_terms = int(lam + 20 * math.sqrt(lam + 1) + 60)
    while 1.0 - covered > tol:
        k += 1
        if k > max_terms:
            raise RuntimeError("uniformization failed to converge; lower tol or bound")
        power = power @ jump
        w *= lam / k
        covered += w
        out += w * power
    return DenseKernel(states, out, tf)


def semigroup_intertwining_gap(
    q_y: SparseGenerator,
    gen: SparseGenerator,
    lam: LambdaKernel,
    t,
    tol: float,
    sources=None,
) -> float:
    """Max |p_t(y,.)Lambda - Lambda q_t(.,.)| over the given source states.

    Sources default to the deep interior (coordinates <= bound/4) where the
    probability of reaching the truncation edge by time t is negligible.
    """
    p_t = semigroup(q_y, t, tol)
    q_t = semigroup(gen, t, tol)
    if sources is None:
        cut = q_y.bound // 4
        sources = [y for y in q_y.states if all(c <= cut for c in y)]
    pair_idx = q_t.index
    gap = 0.0
    for y in sources:
        lhs = np.zeros(len(gen.states))
        for y2, p in zip(p_t.states, p_t.row(y)):
            if p == 0.0:
                continue
            for (x2, _), mass in lam.support(y2):
                lhs[pair_idx[(x2, y2)]] += p * float(mass)
        rhs = np.zeros(len(gen.states))
        for (x, _), mass in lam.support(y):
            if mass:
                rhs += float(mass) * q_t.row((x, y))
        gap = max(gap, float(np.max(np.abs(lhs - rhs))))
    return gap
