"""Target-ratio solver: worst-case charge totals, thresholds, per-slot targets."""

import math

import numpy as np
import pytest

from conftest import decreasing_prices, spec_of
from evcharge.core import ValidationError, validate_spec
from evcharge.online import make_policy
from evcharge.ratio import (
    AdaptiveRatioContext,
    DegenerateAtPiOne,
    NoBracket,
    max_total_charge,
    max_total_charge_from,
    pi_star_upper_bound,
    solve_alpha_star,
    solve_pi_star,
    solve_pi_t,
)
from evcharge.adversary import worst_case_no_limit


class TestMaxTotalCharge:
    def test_unit_target_above_band(self):
        spec = spec_of(1, 5, 20, 5)
        hand = 5 + 5 * math.log(19 / 15)
        assert max_total_charge(spec, 1.0) == pytest.approx(hand, rel=1e-12)

    def test_mid_target(self):
        spec = spec_of(1, 5, 20, 5)
        hand = (20 * 5 - 5 * 5 * 2) / 15 + 5 * 2 * math.log(19 / 15)
        assert max_total_charge(spec, 2.0) == pytest.approx(hand, rel=1e-12)
        assert max_total_charge(spec, 2.0) == pytest.approx(5.697221113975637)

    def test_zero_when_trigger_below_floor(self):
        spec = spec_of(1, 5, 5, 1)
        assert max_total_charge(spec, 5.0) == 0.0
        assert max_total_charge(spec, 7.0) == 0.0

    def test_rejects_target_below_one(self):
        with pytest.raises(ValidationError):
            max_total_charge(spec_of(), 0.9)

    def test_divergence_at_unit_target_inside_band(self):
        with pytest.raises(DegenerateAtPiOne):
            max_total_charge(spec_of(1, 5, 5, 1), 1.0)
        # harmless once the dissatisfaction price clears the band
        assert max_total_charge(spec_of(1, 5, 20, 1), 1.0) > 1.0

    def test_strictly_decreasing_in_target(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p_min = rng.uniform(0.5, 2.0)
            p_max = p_min * rng.uniform(1.5, 6.0)
            alpha = rng.uniform(p_min * 1.2, p_max * 3)
            spec = validate_spec(p_min, p_max, alpha, 2)
            lo = 1.0 + 1e-6 if alpha > p_max else 1.0 + 1e-3
            grid = np.linspace(lo, alpha / p_min * 0.999, 100)
            vals = [max_total_charge(spec, float(pi)) for pi in grid]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_branch_continuity(self):
        # formula switches at trigger = p_max and trigger = p_min
        spec = spec_of(1, 5, 8, 3)
        for boundary in (8 / 5, 8 / 1):
            left = max_total_charge(spec, boundary * (1 - 1e-9))
            right = max_total_charge(spec, boundary * (1 + 1e-9))
            assert left == pytest.approx(right, abs=1e-8)

    def test_matches_simulated_run(self):
        # formula vs actually stepping the policy down its worst-case path
        for p_min, p_max, alpha, c, pi in [
            (1, 5, 5, 1, 1.3),
            (1, 5, 20, 5, 2.0),
            (0.8, 3.0, 2.5, 2, 1.2),
        ]:
            spec = validate_spec(p_min, p_max, alpha, c)
            trace = worst_case_no_limit(spec, pi, 100_000)
            runner = make_policy("fixed", spec, pi=pi)
            total = math.fsum(runner.step(p).charge for p in trace.prices)
            assert total == pytest.approx(max_total_charge(spec, pi), abs=1e-3)


class TestSolveAlphaStar:
    def test_band_one_to_five(self):
        spec = spec_of(1, 5, 20, 1)
        alpha_star = solve_alpha_star(spec)

        def g(a):
            return (a / 5) * math.log((a - 1) / (a - 5)) - 1

        # hand bracket: the defining function changes sign inside (15.5, 15.55)
        assert g(15.5) > 0 > g(15.55)
        assert 15.5 < alpha_star < 15.55
        assert abs(g(alpha_star)) <= 1e-10

    def test_no_bracket_for_flat_band(self):
        with pytest.raises(NoBracket):
            solve_alpha_star(spec_of(3, 3, 10, 1))

    def test_narrow_band_root_hugs_ceiling(self):
        # as the band narrows the log term must blow up to hit 1, which
        # pins the root just above p_max; for any larger dissatisfaction
        # price the closed-form regime is already in force
        alpha_star = solve_alpha_star(spec_of(1, 1.01, 2, 1))
        assert 1.01 < alpha_star < 1.05
        sol = solve_pi_star(spec_of(1, 1.01, 2, 1))
        assert sol.branch == "closed_form"
        assert 1.0 < sol.pi_star <= 1.01


class TestSolvePiStar:
    def test_root_branch(self):
        spec = spec_of(1, 5, 5, 1)
        sol = solve_pi_star(spec)
        assert sol.branch == "root"
        assert sol.pi_star == pytest.approx(1.893, abs=1e-3)
        assert sol.upper_bound == pytest.approx(math.sqrt(5))
        # defining equation, checked independently of the solver
        lhs = sol.pi_star * math.log((5 - 1) / (5 - 5 / sol.pi_star))
        assert lhs == pytest.approx(1.0, abs=1e-10)
        assert abs(max_total_charge(spec, sol.pi_star) - 1.0) <= 1e-9

    def test_closed_form_branch(self):
        spec = spec_of(1, 5, 1e6, 1)
        sol = solve_pi_star(spec)
        assert sol.branch == "closed_form"
        assert abs(sol.pi_star - 5.0) <= 1e-3
        assert abs(max_total_charge(spec, sol.pi_star) - 1.0) <= 1e-9

    def test_alpha_at_floor_degenerates(self):
        sol = solve_pi_star(spec_of(1, 5, 1, 1))
        assert sol.branch == "degenerate"
        assert sol.pi_star == 1.0

    def test_flat_band_degenerates(self):
        sol = solve_pi_star(spec_of(3, 3, 10, 1))
        assert sol.branch == "degenerate"
        assert sol.pi_star == 1.0

    def test_capacity_invariance(self):
        for alpha in (2.0, 5.0, 30.0):
            a = solve_pi_star(spec_of(1, 5, alpha, 1)).pi_star
            b = solve_pi_star(spec_of(1, 5, alpha, 7)).pi_star
            assert abs(a - b) <= 1e-12

    def test_branch_selection_matches_threshold(self):
        spec0 = spec_of(1, 5, 20, 1)
        alpha_star = solve_alpha_star(spec0)
        for k in range(2, 101):
            spec = spec_of(1, 5, float(k), 1)
            sol = solve_pi_star(spec)
            if k > alpha_star:
                assert sol.branch == "closed_form"
                assert sol.pi_star < k / 5
            else:
                assert sol.branch == "root"
            assert sol.pi_star <= pi_star_upper_bound(spec) + 1e-9


class TestUpperBound:
    def test_sqrt_branch(self):
        assert pi_star_upper_bound(spec_of(1, 5, 4, 1)) == pytest.approx(2.0)

    def test_theta_branch(self):
        assert pi_star_upper_bound(spec_of(1, 5, 100, 1)) == pytest.approx(5.0)

    def test_crossover(self):
        assert pi_star_upper_bound(spec_of(1, 5, 25, 1)) == pytest.approx(5.0)


class TestSolvePiT:
    def test_opportunistic_floor_start(self):
        # dissatisfaction price at the cap, first price at the floor:
        # the target collapses to 1 and the full battery charges at once
        spec = spec_of(1, 5, 5, 1)
        ctx = AdaptiveRatioContext(0.0, 5.0)
        pi_1 = solve_pi_t(ctx, spec, 1.0)
        assert pi_1 == 1.0
        v = (5.0 - 1.0 * 1.0 * pi_1) / (5.0 - 1.0)
        assert v == 1.0

    def test_worst_case_start_recovers_fixed_target(self):
        for spec in (spec_of(1, 5, 5, 1), spec_of(1, 5, 20, 1)):
            sol = solve_pi_star(spec)
            start = min(spec.alpha / sol.pi_star, spec.p_max)
            ctx = AdaptiveRatioContext(0.0, spec.alpha * spec.capacity_f)
            assert solve_pi_t(ctx, spec, start) == pytest.approx(sol.pi_star, abs=1e-6)

    def test_requires_price_below_alpha(self):
        spec = spec_of(1, 5, 3, 1)
        with pytest.raises(ValidationError):
            solve_pi_t(AdaptiveRatioContext(0.0, 3.0), spec, 3.0)

    def test_non_increasing_when_each_step_can_act(self):
        # along falling prices, each recomputed target stays at or below the
        # last one as long as the first price is at or below the trigger
        rng = np.random.default_rng(11)
        spec = spec_of(1, 5, 5, 2)
        sol = solve_pi_star(spec)
        start = spec.alpha / sol.pi_star
        for _ in range(200):
            T = int(rng.integers(2, 40))
            prices = decreasing_prices(rng, spec.p_min, start, T)
            charged, eta = 0.0, spec.alpha * spec.capacity_f
            prev = math.inf
            for p in prices:
                pi_t = solve_pi_t(AdaptiveRatioContext(charged, eta), spec, p)
                assert pi_t <= prev + 1e-9
                assert pi_t <= sol.pi_star + 1e-9
                prev = pi_t
                v = max(0.0, eta - p * spec.capacity_f * pi_t) / (spec.alpha - p)
                eta -= (spec.alpha - p) * v
                charged += v

    def test_target_can_rise_after_idle_solve(self):
        # a first price just under alpha solves to a small target that the
        # policy cannot act on (nothing worth charging yet); the next lower
        # price then re-solves near the worst-case target instead
        spec = spec_of(1.133665, 8.867559, 2.267329, 24)
        sol = solve_pi_star(spec)
        eta0 = spec.alpha * spec.capacity_f
        ctx = AdaptiveRatioContext(0.0, eta0)
        pi_1 = solve_pi_t(ctx, spec, 2.207759)
        assert eta0 - 2.207759 * spec.capacity_f * pi_1 < 0  # cannot act
        pi_2 = solve_pi_t(ctx, spec, 1.763360)
        assert pi_2 > pi_1
        assert pi_2 <= sol.pi_star + 1e-9


class TestMaxTotalChargeFrom:
    def test_fresh_context_matches_global_formula(self):
        spec = spec_of(1, 5, 5, 2)
        ctx = AdaptiveRatioContext(0.0, spec.alpha * spec.capacity_f)
        for pi in (1.2, 1.5, 1.8928, 2.2):
            start = min(spec.alpha / pi, spec.p_max)
            assert max_total_charge_from(ctx, spec, pi, start) == pytest.approx(
                max_total_charge(spec, pi), rel=1e-9
            )

    def test_solved_target_fills_exactly(self):
        spec = spec_of(1, 5, 5, 2)
        ctx = AdaptiveRatioContext(0.3, 7.5)
        pi_t = solve_pi_t(ctx, spec, 2.0)
        cap = spec.capacity_f
        assert max_total_charge_from(ctx, spec, pi_t, 2.0) == pytest.approx(cap, rel=1e-9)
        assert max_total_charge_from(ctx, spec, pi_t + 0.1, 2.0) < cap
