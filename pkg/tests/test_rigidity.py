"""Threshold algebra, the decay dichotomy ODE, ordering, and the full scenario.

Frozen closed forms used as oracles:
  * threshold(3/2, 2): f(p) = 8/7, exponents (10/3, 2), contradiction possible.
  * contradiction_possible is algebraically equivalent to alpha > 4/(5-p).
  * dichotomy constant 8 pi eps/(2+2eps) equals pi exactly at eps = 1/3.
  * linear-branch crossing time (m/(2 eps)) log((4pi - Fd)/(4pi - F0)).
  * ordering proportionality dG/dt = (G-F)/(p-1), audited constant 1/(3-p)^2.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pinchlab as pl

FOUR_PI = 4.0 * math.pi


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def test_threshold_explicit_example():
    rep = pl.threshold(1.5, 2.0)
    assert rep.f_p == pytest.approx(8.0 / 7.0, abs=1e-15)
    assert rep.lhs_exponent == pytest.approx(10.0 / 3.0, abs=1e-14)
    assert rep.rhs_exponent == 2.0
    assert rep.contradiction_possible


def test_threshold_subcritical_growth():
    rep = pl.threshold(1.5, 1.1)
    assert not rep.contradiction_possible
    assert rep.rhs_exponent > rep.lhs_exponent


def test_threshold_unsolvable_exterior_problem():
    # alpha <= p - 1: no decaying potential at all; encoded as rhs = +inf.
    rep = pl.threshold(1.8, 0.5)
    assert math.isinf(rep.rhs_exponent)
    assert not rep.contradiction_possible


def test_threshold_alpha_validation():
    with pytest.raises(pl.DomainError):
        pl.threshold(1.5, 0.0)
    with pytest.raises(pl.DomainError):
        pl.threshold(1.5, 2.5)


def test_pinching_threshold_endpoint():
    assert abs(pl.pinching_threshold(2.0) - 4.0 / 3.0) < 1e-12
    with pytest.raises(pl.DomainError):
        pl.pinching_threshold(1.0)
    with pytest.raises(pl.DomainError):
        pl.pinching_threshold(2.1)


def test_pinching_threshold_monotone():
    ps = np.linspace(1.01, 2.0, 50)
    vals = [pl.pinching_threshold(p) for p in ps]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[0] > 1.0  # tends to 1 from above as p -> 1


def test_threshold_equivalence_ten_thousand_pairs():
    # The exponent comparison must reproduce alpha > 4/(5-p) exactly.
    rng = np.random.default_rng(20260819)
    ps = 1.0 + 0.001 + rng.random(10_000) * 0.998
    alphas = 0.001 + rng.random(10_000) * 1.999
    mismatches = sum(
        pl.threshold(p, a).contradiction_possible != (a > 4.0 / (5.0 - p))
        for p, a in zip(ps, alphas)
    )
    assert mismatches == 0


@settings(max_examples=200, deadline=None)
@given(
    p=st.floats(min_value=1.001, max_value=1.999),
    alpha=st.floats(min_value=0.001, max_value=2.0),
)
def test_threshold_equivalence_property(p, alpha):
    rep = pl.threshold(p, alpha)
    boundary = 4.0 / (5.0 - p)
    if abs(alpha - boundary) > 1e-9:  # stay off the float knife edge
        assert rep.contradiction_possible == (alpha > boundary)


def test_select_p_examples():
    assert pl.select_p(2.0, 0.5).value == 1.5
    assert abs(pl.select_p(1.2, 0.1).value - 1.6) < 1e-12
    with pytest.raises(pl.DomainError, match="alpha > 1"):
        pl.select_p(1.0, 0.5)
    with pytest.raises(pl.DomainError):
        pl.select_p(2.0, 0.0)
    with pytest.raises(pl.DomainError):
        pl.select_p(2.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    alpha=st.floats(min_value=1.01, max_value=2.0),
    margin=st.floats(min_value=0.01, max_value=0.99),
)
def test_select_p_is_always_admissible(alpha, margin):
    p = pl.select_p(alpha, margin)
    assert 1.0 < p.value < 2.0
    assert pl.threshold(p, min(alpha, 2.0)).contradiction_possible


# ---------------------------------------------------------------------------
# decay dichotomy
# ---------------------------------------------------------------------------


def test_dichotomy_constant_is_pi_at_extremal_eps():
    traj = pl.decay_dichotomy(1.5, 1.0 / 3.0, 2.0 * math.pi)
    assert abs(traj.dichotomy_constant - math.pi) < 1e-12


def test_dichotomy_crossing_matches_closed_form():
    eps, f0 = 0.1, 3.9 * math.pi
    traj = pl.decay_dichotomy(1.5, eps, f0, horizon=40.0)
    assert traj.branch == "decay"
    m = 1.5
    fd = traj.dichotomy_constant
    closed = (m / (2.0 * eps)) * math.log((FOUR_PI - fd) / (FOUR_PI - f0))
    assert traj.crossing_time is not None
    assert abs(traj.crossing_time - closed) < 1e-6
    assert abs(traj.crossing_time_linear - closed) < 1e-15


def test_dichotomy_starts_below_constant():
    traj = pl.decay_dichotomy(1.5, 1.0 / 3.0, math.pi / 2.0)
    assert traj.branch == "decay"
    assert traj.T0 == 0.0
    assert traj.crossing_time == 0.0
    assert traj.crossing_time_linear == 0.0


def test_dichotomy_stuck_within_short_horizon():
    # Tiny eps: the linear branch is slow, the crossing lies far beyond the
    # horizon; the trajectory must say so instead of extrapolating.
    traj = pl.decay_dichotomy(1.5, 0.01, 3.9 * math.pi, horizon=20.0)
    assert traj.branch == "stuck"
    assert traj.crossing_time is None
    assert traj.crossing_time_linear > 20.0


def test_dichotomy_envelope_bound():
    traj = pl.decay_dichotomy(1.5, 0.2, 3.5 * math.pi, horizon=30.0)
    assert np.all(np.diff(traj.envelope) <= 0.0)
    m = 1.5
    tail = traj.times >= traj.T0
    bound = traj.K * np.exp(-2.0 * traj.times[tail] / m)
    assert np.all(traj.envelope[tail] <= bound * (1.0 + 1e-9))


def test_dichotomy_input_validation():
    with pytest.raises(pl.DomainError, match="Willmore"):
        pl.decay_dichotomy(1.5, 0.1, FOUR_PI)
    with pytest.raises(pl.DomainError):
        pl.decay_dichotomy(1.5, 0.1, 0.0)
    with pytest.raises(pl.DomainError):
        pl.decay_dichotomy(1.5, 0.5, math.pi)  # eps beyond 1/3
    with pytest.raises(pl.DomainError):
        pl.decay_dichotomy(1.5, 0.1, math.pi, horizon=0.0)


# ---------------------------------------------------------------------------
# ordering of G below F
# ---------------------------------------------------------------------------


def test_ordering_power_warp(solved):
    pot = solved("power_warp", 1.5)
    rep = pl.ordering_check(pot, np.linspace(0.5, 6.0, 16))
    assert rep.ordering_ok
    assert all(0.0 <= g <= f for f, g in zip(rep.F_values, rep.G_values))
    assert abs(rep.proportionality_constant - 4.0 / 9.0) < 1e-6
    assert rep.proportionality_expected == 4.0 / 9.0
    assert rep.proportionality_max_dev < 1e-6
    assert rep.tail_F > rep.tail_G > 0.0


def test_ordering_flat_degenerate(solved):
    # G == F identically: every proportionality sample is skipped and the
    # fitted constant is NaN by construction, but the ordering still holds.
    rep = pl.ordering_check(solved("flat", 1.5), [0.5, 1.0, 2.0])
    assert rep.ordering_ok
    assert math.isnan(rep.proportionality_constant)
    assert rep.proportionality_max_dev == 0.0


def test_ordering_level_validation(solved):
    pot = solved("flat", 1.5)
    with pytest.raises(pl.DomainError):
        pl.ordering_check(pot, [])
    with pytest.raises(pl.DomainError):
        pl.ordering_check(pot, [pot.t_max + 1.0])


# ---------------------------------------------------------------------------
# the contradiction scenario
# ---------------------------------------------------------------------------

GATE_LABELS = {"initial-willmore-deficit", "pinching", "superquadratic-growth"}


@pytest.fixture(scope="module")
def scenario_reports():
    return {
        name: pl.run_contradiction_scenario(model, 1.5)
        for name, model in pl.potential_library().items()
    }


def test_scenario_always_names_a_hypothesis(scenario_reports):
    for name, report in scenario_reports.items():
        assert report.failed_hypothesis in GATE_LABELS, name
        for v in report.verdicts:
            assert v.status in ("pass", "fail", "not-applicable")
            assert v.reason


def test_scenario_flat_fails_willmore_gate(scenario_reports):
    report = scenario_reports["flat"]
    assert report.failed_hypothesis == "initial-willmore-deficit"
    assert report.verdict("initial-willmore-gate").status == "fail"
    # flat has genuinely nonnegative (zero) Ricci: pinching gate passes
    assert report.verdict("ricci-pinching-gate").status == "pass"
    assert report.constants["eps_used"] == pytest.approx(1.0 / 3.0)


def test_scenario_cone_and_power_warp_fail_pinching(scenario_reports):
    for name in ("cone_0.8", "power_warp_1.5"):
        report = scenario_reports[name]
        assert report.failed_hypothesis == "pinching", name
        assert report.verdict("ricci-pinching-gate").status == "fail"
        assert report.verdict("initial-willmore-gate").status == "pass"


def test_scenario_no_numerical_contradiction(scenario_reports):
    # The theorem is consistent: the volume bounds can never actually cross.
    for name, report in scenario_reports.items():
        v = report.verdict("volume-growth-consistency")
        assert v.status == "pass", (name, v.reason)
        assert report.constants["slab_lower_bound"] <= report.constants["slab_upper_bound"] * (
            1.0 + 1e-9
        )


def test_scenario_capacity_and_holder_always_verify(scenario_reports):
    for name, report in scenario_reports.items():
        assert report.verdict("capacity-law").status == "pass", name
        assert report.verdict("holder-chain").status == "pass", name
        assert report.constants["capacity_law_deviation"] <= 1e-6


def test_scenario_decay_diagnostics_conditional(scenario_reports):
    # With a failed gate the decay rate is reported, not enforced.
    for name in ("flat", "cone_0.8", "power_warp_1.5"):
        v = scenario_reports[name].verdict("pinched-decay-rate")
        assert v.status == "not-applicable", name
    slope_pw = scenario_reports["power_warp_1.5"].constants["decay_slope_measured"]
    assert abs(slope_pw - (-0.5)) < 0.02
    slope_flat = scenario_reports["flat"].constants["decay_slope_measured"]
    assert abs(slope_flat) < 0.02


def test_scenario_eps_floor(scenario_reports):
    # The cone's measured margin is exactly 0; the scenario substitutes the
    # documented hypothetical floor instead of a degenerate eps.
    assert scenario_reports["cone_0.8"].constants["eps_used"] == pytest.approx(1e-3)


def test_scenario_rows_follow_schema(scenario_reports):
    for report in scenario_reports.values():
        assert report.columns == pl.ROW_COLUMNS
        assert len(report.rows) == 64
        for row in (report.rows[0], report.rows[-1]):
            assert set(row) == set(pl.ROW_COLUMNS)


def test_scenario_boundary_cone_run():
    report = pl.run_contradiction_scenario(pl.cone_model(0.8), 1.5, {"r0": 1e-4})
    assert report.failed_hypothesis == "pinching"
    assert report.verdict("volume-growth-consistency").status == "pass"


def test_scenario_option_validation():
    with pytest.raises(pl.DomainError, match="unknown scenario options"):
        pl.run_contradiction_scenario(pl.flat_model(), 1.5, {"bogus": 1})


def test_scenario_stage_labels_errors():
    with pytest.raises(pl.DomainError, match="stage 'solve'"):
        pl.run_contradiction_scenario(pl.cone_model(0.8), 1.5, {"r0": 1e-5})
