from fractions import Fraction as F

import numpy as np
import pytest

from gtpush import intertwine, kernels
from gtpush.couplings import (
    GeometricPanel,
    PoissonPanel,
    WallPanel,
    geometric_panel,
    left_edge_from_walk,
    left_edge_matches_dynamics,
    lpp_G,
    panel_from_json,
    poisson_panel,
    right_edge_equals_lpp,
    wall_panel,
    wall_sup_functional,
    wall_sup_samples,
)
from gtpush.harness import Pmf, chi_square_gof, trial_rng

from _oracles import lpp_brute, wall_sup_brute

Q3 = (F(1, 2), F(1, 3), F(1, 5))


def test_left_edge_all_zero_panel():
    panel = PoissonPanel(((), (), ()), 1.0)
    rows = left_edge_from_walk(panel, [0.0, 0.5, 1.0])
    assert rows == [[0, 0, 0]] * 3


def test_left_edge_hand_trace():
    panel = PoissonPanel(((0.5,), (0.3,)), 1.0)
    rows = left_edge_from_walk(panel, [0.0, 0.4, 0.6, 1.0])
    assert rows[0] == [0, 0, 1, 1]
    # the lower particle is stuck behind the upper one throughout
    assert rows[1] == [0, 0, 0, 0]


def test_left_edge_requires_sorted_grid():
    panel = PoissonPanel(((0.5,),), 1.0)
    with pytest.raises(ValueError):
        left_edge_from_walk(panel, [0.5, 0.1])


def test_left_edge_matches_full_dynamics():
    for trial in range(150):
        panel = poisson_panel(3, Q3, 2.0, trial_rng(100, trial))
        assert left_edge_matches_dynamics(panel, 3, Q3, trial_rng(101, trial))


def test_lpp_zero_panel():
    panel = GeometricPanel(((0, 0), (0, 0)))
    assert lpp_G(panel, 2) == [[0, 0], [0, 0]]


def test_lpp_hand_example():
    panel = GeometricPanel(((1, 2), (3, 4)))
    g = lpp_G(panel, 2)
    assert g[0] == [1, 3]
    assert g[1][1] == 8


def test_lpp_matches_path_enumeration():
    rng = np.random.default_rng(12)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        t = int(rng.integers(1, 5))
        eta = tuple(tuple(int(v) for v in rng.integers(0, 6, size=t)) for _ in range(n))
        g = lpp_G(GeometricPanel(eta), n, t)
        for k in range(1, n + 1):
            for tt in range(1, t + 1):
                assert g[k - 1][tt - 1] == lpp_brute(eta, k, tt)


def test_right_edge_single_entry_panel():
    panel = GeometricPanel(((0,), (5,)))
    # wait: eta rows must have t_max entries each; single step, eta_2(1)=5
    g = lpp_G(panel, 2, 1)
    assert g[1][0] == 5
    assert right_edge_equals_lpp(panel, 2, (F(1, 2), F(1, 3)), 1)


def test_right_edge_matches_lpp_many_panels():
    for trial in range(150):
        panel = geometric_panel(3, Q3, 10, trial_rng(200, trial))
        assert right_edge_equals_lpp(panel, 3, Q3, 10, trial_rng(201, trial))


def test_wall_sup_zero_panel():
    panel = WallPanel(((), ()), 1.0)
    assert wall_sup_functional(panel, 1.0) == 0


def test_wall_sup_hand_trace():
    panel = WallPanel((((0.3, 1),), ()), 1.0)
    assert wall_sup_functional(panel, 1.0) == 1
    # a negative excursion of the second component can only be avoided
    panel = WallPanel((((0.3, 1),), ((0.5, -1),)), 1.0)
    assert wall_sup_functional(panel, 1.0) == 1


def test_wall_sup_matches_brute_force():
    rng = np.random.default_rng(99)
    for _ in range(60):
        k = int(rng.integers(1, 3))
        panel = wall_panel(k, tuple(F(1, 2) for _ in range(k)), 1.5, rng)
        for t in (0.4, 0.9, 1.5):
            assert wall_sup_functional(panel, t) == wall_sup_brute(panel, t)


def test_wall_sup_constant_between_events_and_monotone_in_jumps():
    rng = np.random.default_rng(13)
    for _ in range(30):
        panel = wall_panel(2, (F(1, 2), F(1, 3)), 2.0, rng)
        times = sorted(tt for comp in panel.jumps for tt, _ in comp)
        # constant on the open interval between consecutive events
        for a, b in zip(times, times[1:]):
            if b - a > 1e-9:
                mid1, mid2 = a + (b - a) / 3, a + 2 * (b - a) / 3
                assert wall_sup_functional(panel, mid1) == wall_sup_functional(panel, mid2)
        # inserting a positive jump into any component cannot decrease it
        base = wall_sup_functional(panel, 2.0)
        for comp_idx in range(4):
            jumps = [list(c) for c in panel.jumps]
            jumps[comp_idx] = sorted(jumps[comp_idx] + [(1.9, 1)])
            bumped = WallPanel(tuple(tuple(c) for c in jumps), panel.t_end)
            assert wall_sup_functional(bumped, 2.0) >= base


def test_wall_sup_distribution_matches_conditioned_walk():
    samples = wall_sup_samples(1, (F(1, 2),), 1.0, 30_000, 31)
    gen = kernels.q_symplectic(2, (F(1, 2),), 30)
    ref = Pmf.from_dense_row(intertwine.semigroup(gen, 1.0, 1e-14), (0,))
    ref1 = Pmf(tuple(s[0] for s in ref.support), ref.probs)
    assert chi_square_gof(samples, ref1) > 0.01


def test_panel_json_round_trip():
    rng = np.random.default_rng(14)
    pp = poisson_panel(2, (F(1, 2), F(1, 3)), 1.0, rng)
    gp = geometric_panel(2, (F(1, 2), F(1, 3)), 4, rng)
    wp = wall_panel(1, (F(1, 2),), 1.0, rng)
    import json

    for panel in (pp, gp, wp):
        again = panel_from_json(json.dumps(panel.to_json_dict()))
        assert again == panel
