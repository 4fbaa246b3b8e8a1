"""Tests for the circle power maps and the two-hole grid."""

from dataclasses import replace

import numpy as np
import pytest

from drht.analytic_examples import (
    contract_corners,
    hole_threshold,
    loop_contracts,
    power_map_homotopy,
    power_map_on_cycle,
    ring_contraction,
    split_witness,
    step_count,
    tight_loop_sets,
    two_hole_distance,
    two_hole_instance,
    two_hole_sweep,
    verify_analytic,
)
from drht.distance import verify_distance_certificate
from drht.lipschitz_maps import lipschitz_constant


class TestPowerMaps:
    @pytest.mark.parametrize("r, expected", [("1/2", 9), (2, 3), ("1/5", 21), (3, 1)])
    def test_step_count(self, r, expected):
        assert step_count(r) == expected

    def test_step_count_rejects_zero(self):
        with pytest.raises(ValueError):
            step_count(0)

    @pytest.mark.parametrize("n, k, r, samples", [(1, 2, "1/2", 60), (2, 3, "1/5", 120), (3, 1, 1, 45)])
    def test_straight_line_homotopy_passes(self, n, k, r, samples):
        homotopy = power_map_homotopy(n, k, r, samples)
        assert homotopy.frames.shape == (step_count(r) + 1, samples)
        report = verify_analytic(homotopy)
        assert report.passed, report.violations
        assert report.s == max(n, k)
        assert report.max_step <= report.r * (1 + 1e-6)

    def test_equal_exponents_give_constant_frames(self):
        homotopy = power_map_homotopy(2, 2, "1/2", 30)
        assert np.allclose(homotopy.frames, homotopy.frames[0])
        assert verify_analytic(homotopy).max_step == pytest.approx(0.0)

    def test_endpoints_are_the_power_maps(self):
        homotopy = power_map_homotopy(1, 3, 1, 12)
        z = homotopy.samples
        assert np.allclose(homotopy.frames[0], z)
        assert np.allclose(homotopy.frames[-1], z**3)

    def test_tampered_frame_is_caught(self):
        homotopy = power_map_homotopy(1, 2, "1/2", 60)
        frames = homotopy.frames.copy()
        frames[3, 0] += 1
        report = verify_analytic(replace(homotopy, frames=frames))
        assert not report.passed
        assert any(v.startswith("step 2->3") for v in report.violations)

    @pytest.mark.parametrize("overshoot, passed", [(5e-10, True), (1e-7, False)])
    def test_step_bound_is_tolerance_compared(self, overshoot, passed):
        homotopy = power_map_homotopy(2, 2, "1/2", 30)
        frames = homotopy.frames.copy()
        frames[1, 0] += 0.5 * (1 + 1e-6) + overshoot
        report = verify_analytic(replace(homotopy, frames=frames), s=100)
        assert report.passed is passed

    def test_scale_below_exponent_fails(self):
        report = verify_analytic(power_map_homotopy(1, 2, "1/2", 60), s=1)
        assert not report.passed
        assert report.max_lipschitz_ratio > 1

    def test_bad_exponent(self):
        with pytest.raises(ValueError, match="exponents must be positive"):
            power_map_homotopy(0, 2, 1)

    def test_discrete_power_map_is_lipschitz(self):
        squaring = power_map_on_cycle(2, 24)
        assert squaring.values[:4] == (0, 2, 4, 6)
        assert lipschitz_constant(squaring) <= 2 * (1 + 1e-4)


@pytest.fixture(scope="module")
def two_holes():
    return two_hole_instance()


@pytest.fixture(scope="module")
def staircase(two_holes):
    return {r: two_hole_distance(two_holes, r) for r in (1, 2, 3)}


class TestTwoHoleGrid:
    def test_instance_shape(self, two_holes):
        assert two_holes.space.size == 15 * 10 - 4 - 12
        assert two_holes.domain.size == 9
        assert [len(ring) for ring in two_holes.rings] == [12, 18]
        assert [two_holes.side(0), two_holes.side(1)] == [4, 6]
        assert lipschitz_constant(two_holes.f) == 1
        assert lipschitz_constant(two_holes.g) == 1

    def test_loop_corners_are_a_side_apart(self, two_holes):
        for hole in range(2):
            a, b, c = two_holes.loops[hole]
            side = two_holes.side(hole)
            assert two_holes.space.dist[a][b] == two_holes.space.dist[b][c] == two_holes.space.dist[a][c] == side

    def test_ring_must_split_in_three(self):
        with pytest.raises(ValueError, match="multiple of three"):
            two_hole_instance(hole0=(3, 3, 3, 3))

    def test_overlapping_holes_are_rejected(self):
        with pytest.raises(ValueError):
            two_hole_instance(hole0=(3, 3, 4, 4), hole1=(4, 4, 6, 5))

    def test_tight_loop_sets(self, two_holes):
        assert tight_loop_sets(two_holes, 0) == [frozenset({j, 3 + j, 6 + j}) for j in range(3)]
        assert len(tight_loop_sets(two_holes, 1)) == 27


class TestLoops:
    def test_ring_walk_needs_half_a_side(self, two_holes):
        assert ring_contraction(two_holes, 1, (0, 1, 2), 2) is None
        walked = ring_contraction(two_holes, 1, (0, 1, 2), 3)
        assert walked is not None
        assert walked.length == 2
        assert set(walked.end.values) == {two_holes.loops[1][1]}

    def test_corner_pair_contracts_at_unit_steps(self, two_holes):
        verdict = contract_corners(two_holes, 1, (0, 2), 1)
        assert verdict.found
        assert verdict.homotopy.length == 6

    @pytest.mark.parametrize("hole, r, expected", [(0, 1, False), (0, 2, True), (1, 2, False), (1, 3, True)])
    def test_loop_contracts(self, two_holes, hole, r, expected):
        assert loop_contracts(two_holes, hole, r) is expected

    def test_measured_thresholds(self, two_holes):
        thresholds = [hole_threshold(two_holes, hole) for hole in range(2)]
        assert thresholds == [2, 3]
        assert thresholds[0] < thresholds[1]


class TestTwoHoleStaircase:
    @pytest.mark.parametrize("r, value, stuck", [(1, 2, 2), (2, 1, 1), (3, 0, 0)])
    def test_distance_per_regime(self, staircase, r, value, stuck):
        row = staircase[r]
        assert row.distance.status == "finite"
        assert row.distance.value == value
        assert row.stuck_loops == stuck
        assert row.undecided_loops == 0

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_certificate_verifies(self, two_holes, staircase, r):
        ok, problems = verify_distance_certificate(staircase[r].distance, two_holes.f, two_holes.g)
        assert ok, problems

    def test_split_witness_on_a_tight_loop_set_fails_while_stuck(self, two_holes):
        column = sorted(tight_loop_sets(two_holes, 0)[0])
        assert split_witness(two_holes, column, 1) is None
        assert split_witness(two_holes, column, 2) is not None

    @pytest.mark.slow
    def test_sweep_steps_down_at_the_thresholds(self, two_holes):
        thresholds = [hole_threshold(two_holes, hole) for hole in range(2)]
        rows = two_hole_sweep(two_holes, [1, 2, 3, 4])
        assert [row.distance.value for row in rows] == [2, 1, 0, 0]
        for row in rows:
            assert row.distance.value == sum(t > row.r for t in thresholds)
