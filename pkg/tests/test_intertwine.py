import copy
import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from gtpush import kernels
from gtpush.cli import build_intertwining_case, run_intertwine_case
from gtpush.intertwine import (
    semigroup,
    semigroup_intertwining_gap,
    verify_conservative,
    verify_generator_intertwining,
    verify_kernel_intertwining,
)

Q2 = (F(1, 2), F(1, 3))
Q3 = (F(1, 2), F(1, 3), F(1, 5))


def test_poisson_intertwining_passes():
    rep = run_intertwine_case("poisson", 1, Q2, 6)
    assert rep.passed and not rep.violations
    assert rep.states_checked > 0


def test_poisson_intertwining_detects_perturbation():
    q_y, gen, lam, _ = build_intertwining_case("poisson", 1, Q2, 6)
    broken = copy.deepcopy(gen)
    src = ((1,), (0, 2))
    tgt = ((2,), (0, 2))
    broken.rows[src][tgt] = broken.rows[src][tgt] + 1
    rep = verify_generator_intertwining(q_y, lam, broken)
    assert not rep.passed
    assert any(right == tgt for _, right, _, _ in rep.violations)
    assert rep.max_discrepancy > 0


def test_wall_odd_even_intertwining_passes():
    rep = run_intertwine_case("wall-odd-even", 1, (F(1, 2),), 6)
    assert rep.passed


def test_wall_even_odd_intertwining_passes():
    rep = run_intertwine_case("wall-even-odd", 1, Q2, 6)
    assert rep.passed


def test_kernel_intertwining_passes_small():
    rep = run_intertwine_case("geometric", 1, Q2, 6)
    assert rep.passed and not rep.violations


def test_kernel_intertwining_detects_broken_factor():
    p_y, step, lam, _ = build_intertwining_case("geometric", 1, Q2, 6)
    broken = copy.deepcopy(step)
    src = ((0,), (0, 0))
    tgt = ((1,), (0, 2))
    broken.rows[src][tgt] = broken.rows[src][tgt] * F(2)
    rep = verify_kernel_intertwining(p_y, lam, broken)
    assert not rep.passed


def test_intertwinings_one_level_deeper():
    # climb the row-by-row induction a step beyond the smallest cases
    q4 = Q3 + (F(1, 7),)
    assert run_intertwine_case("poisson", 3, q4, 5).passed
    assert run_intertwine_case("wall-even-odd", 2, q4, 5).passed
    assert run_intertwine_case("wall-odd-even", 3, q4, 4).passed


def test_verify_conservative_symplectic_family():
    for n in (1, 2, 3, 4):
        k = (n + 1) // 2
        rep = verify_conservative(kernels.q_symplectic(n, Q2[:k], 6))
        assert rep.passed, f"n={n}"


def test_verify_conservative_flags_missing_entry():
    gen = kernels.q_symplectic(2, (F(1, 2),), 6)
    broken = copy.deepcopy(gen)
    del broken.rows[(2,)][(3,)]
    rep = verify_conservative(broken)
    assert not rep.passed
    assert rep.violations[0][0] == (2,)


def test_report_json_round_trip():
    rep = run_intertwine_case("poisson", 1, Q2, 5)
    doc = json.loads(rep.to_json())
    assert doc["status"] == "pass"
    assert doc["violations"] == []
    assert doc["states_checked"] == rep.states_checked


def test_semigroup_identity_at_time_zero():
    gen = kernels.q_charlier(2, Q2, 5)
    p0 = semigroup(gen, 0, 1e-12)
    assert np.allclose(p0.matrix, np.eye(len(gen.states)))


def test_semigroup_single_walker_poisson_law():
    gen = kernels.q_charlier(1, (F(1, 2),), 40)
    p = semigroup(gen, 2, 1e-14)
    for k in range(12):
        assert p.prob((0,), (k,)) == pytest.approx(
            math.exp(-1.0) * 1.0 ** k / math.factorial(k), abs=1e-12
        )


def test_semigroup_rejects_bad_tolerance():
    gen = kernels.q_charlier(1, (F(1, 2),), 5)
    with pytest.raises(ValueError):
        semigroup(gen, 1, 0.0)
    with pytest.raises(ValueError):
        semigroup(gen, -1, 1e-8)


def test_semigroup_chapman_kolmogorov():
    tol = 1e-12
    gen = kernels.q_charlier(2, Q2, 10)
    ps = semigroup(gen, F(1, 4), tol)
    pt = semigroup(gen, F(3, 4), tol)
    pst = semigroup(gen, 1, tol)
    assert np.max(np.abs(ps.matrix @ pt.matrix - pst.matrix)) < 10 * tol


def test_semigroup_interior_rows_nearly_stochastic():
    gen = kernels.q_charlier(2, Q2, 12)
    p = semigroup(gen, F(1, 2), 1e-12)
    assert abs(p.row((0, 0)).sum() - 1.0) < 1e-10


def test_semigroup_intertwining_gap_small_case():
    q_y, gen, lam, _ = build_intertwining_case("poisson", 1, Q2, 8)
    gap = semigroup_intertwining_gap(q_y, gen, lam, F(1, 4), 1e-10)
    assert gap < 1e-8


def test_semigroup_intertwining_extends_to_wall_cases():
    # every exactly-intertwined generator pair stays intertwined after
    # uniformization; the conditioned wall chains drift away from the origin,
    # so the box must outrun the drift over the horizon
    for case, q in [("wall-odd-even", (F(1, 2),)), ("wall-even-odd", Q2)]:
        q_y, gen, lam, _ = build_intertwining_case(case, 1, q, 16)
        gap = semigroup_intertwining_gap(q_y, gen, lam, F(1, 2), 1e-12)
        assert gap < 1e-8, case
