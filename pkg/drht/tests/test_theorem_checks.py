"""Tests for the randomized law suite."""

import random

import pytest

from drht.distance import homotopic_distance
from drht.homotopy_search import find_homotopy
from drht.lipschitz_maps import LipschitzMap, ScaleParams, compose, constant, identity, lipschitz_constant
from drht.metric_space import check_metric_axioms, cycle, interval
from drht.theorem_checks import (
    LAWS,
    LawReport,
    LawStats,
    cycle_space,
    find_homotopy_inverse,
    generate_instance,
    holed_pair,
    homotopy_equivalence,
    random_lipschitz_map,
    random_space,
    random_walk,
    run_suite,
    run_trial,
    scaled_copy,
    whisker,
    winding_map,
)


@pytest.mark.parametrize("law_id", sorted(LAWS))
def test_law_holds_on_a_few_instances(law_id):
    report = run_suite([law_id], trials=3, seed=7)
    (stats,) = report.stats
    assert stats.tried == 3
    assert stats.failed == 0, stats.counterexamples


def test_registry_covers_every_statement():
    assert len(LAWS) == 21
    assert all(law.statement for law in LAWS.values())


def test_trials_are_reproducible():
    first = run_trial("symmetry", seed=3, trial=5)
    second = run_trial("symmetry", seed=3, trial=5)
    assert first == second


def test_worker_count_does_not_change_results():
    laws = ["zero-iff-homotopic", "monotone-in-r", "constant-paths"]
    serial = run_suite(laws, trials=4, seed=11, workers=1)
    parallel = run_suite(laws, trials=4, seed=11, workers=2)
    assert serial.rows() == parallel.rows()


def test_first_trial_offsets_the_instances():
    whole = run_suite(["symmetry"], trials=4, seed=2)
    tail = run_suite(["symmetry"], trials=2, seed=2, first_trial=2)
    assert whole.stats[0].tried == 4 and tail.stats[0].tried == 2


def test_unknown_law_is_rejected():
    with pytest.raises(ValueError, match="unknown law ids"):
        run_suite(["no-such-law"], trials=1)


class TestInstanceHelpers:
    def test_random_space_size(self):
        space = random_space(random.Random(0), 2, 4, "p")
        assert 2 <= space.size <= 4
        assert all(label.startswith("p") for label in space.point_ids)

    def test_scaled_copy_preserves_ratios(self):
        rng = random.Random(1)
        space = random_space(rng, 3, 3, "p")
        copy, position = scaled_copy(rng, space, 2, "q")
        for i in range(space.size):
            for j in range(space.size):
                assert copy.dist[position[i]][position[j]] == 2 * space.dist[i][j]

    def test_random_lipschitz_map_respects_scale(self):
        rng = random.Random(2)
        X, Y = random_space(rng, 2, 3, "x"), random_space(rng, 2, 3, "y")
        for _ in range(5):
            assert lipschitz_constant(random_lipschitz_map(rng, X, Y, 1)) <= 1

    def test_random_walk_stays_homotopic(self, segment):
        rng = random.Random(3)
        params = ScaleParams(1, 1)
        f = identity(segment)
        g = random_walk(rng, f, params, 4)
        assert find_homotopy(f, g, params).found

    def test_left_inverse_of_doubling(self):
        doubling = LipschitzMap(interval(1), interval(2), (0, 2))
        beta = find_homotopy_inverse(doubling, ScaleParams(1, 1))
        assert beta is not None
        assert lipschitz_constant(beta) * 2 <= 1
        assert find_homotopy(compose(beta, doubling), identity(interval(1)), ScaleParams(1, 1)).found

    def test_constant_map_has_no_left_inverse(self, segment):
        assert find_homotopy_inverse(constant(segment, segment, 0), ScaleParams(1, 1)) is None

    def test_identity_is_its_own_inverse(self):
        square = cycle(4)
        assert find_homotopy_inverse(identity(square), ScaleParams(1, 1)) == identity(square)

    def test_isometry_gets_its_inverse(self):
        space = cycle(5)
        rotation = LipschitzMap(space, space, (2, 3, 4, 0, 1))
        beta = find_homotopy_inverse(rotation, ScaleParams(1, 1))
        assert compose(beta, rotation) == identity(space)

    def test_generated_instances_are_reproducible(self):
        first, second = generate_instance(5), generate_instance(5)
        assert first == second
        assert first.X.size <= 5 and first.Y.size <= 6
        check_metric_axioms(first.Y)
        assert lipschitz_constant(first.f) == first.lipschitz["f"]
        assert generate_instance(5, x_cap=2, y_cap=2).X.size <= 2


class TestReportThresholds:
    def _report(self, passed, nontrivial, distances=True, **thresholds):
        stats = LawStats("symmetry", tried=40, passed=passed, nontrivial=nontrivial, compares_distances=distances)
        return LawReport(0, 40, [stats], **thresholds)

    def test_exercised_needs_the_minimum_number_of_passes(self):
        assert self._report(19, 10, min_passes=20).unexercised == ["symmetry"]
        assert not self._report(19, 10, min_passes=20).ok
        assert self._report(20, 10, min_passes=20).ok

    def test_default_minimum_is_twenty(self):
        assert not self._report(19, 10).ok
        assert self._report(20, 10).rows()[0]["exercised"] is True

    def test_distance_laws_need_nontrivial_instances(self):
        report = self._report(30, 2, min_passes=20, min_nontrivial=5)
        assert report.starved == ["symmetry"]
        assert not report.ok

    def test_other_laws_are_never_starved(self):
        report = self._report(30, 0, distances=False, min_passes=20, min_nontrivial=5)
        assert report.starved == [] and report.ok
        assert report.rows()[0]["nontrivial"] == ""


class TestHoledFamily:
    @pytest.fixture
    def pentagon(self):
        return cycle_space(random.Random(0), 5, "p")

    def test_unperturbed_cycle_is_geodesic(self, pentagon):
        assert pentagon.dist == cycle(5).dist

    def test_perturbed_cycle_is_at_least_the_hop_count(self):
        space = cycle_space(random.Random(4), 6, "p", perturb=True)
        check_metric_axioms(space)
        hops = cycle(6)
        assert all(space.dist[i][j] >= hops.dist[i][j] for i in range(6) for j in range(6))

    def test_cycle_space_needs_three_points(self):
        with pytest.raises(ValueError):
            cycle_space(random.Random(0), 2, "p")

    @pytest.mark.parametrize(
        "partner, expected",
        [("constant", 1), ("reflected", 1), ("rotated", 0)],
    )
    def test_winding_map_distances(self, pentagon, partner, expected):
        f = winding_map(pentagon, pentagon, 0, 1)
        if partner == "constant":
            g = constant(pentagon, pentagon, 2)
        else:
            g = winding_map(pentagon, pentagon, 3, -1 if partner == "reflected" else 1)
        result = homotopic_distance(f, g, ScaleParams(1, 1))
        assert result.status == "finite" and result.value == expected

    def test_winding_onto_a_smaller_cycle_is_one_lipschitz(self):
        rng = random.Random(1)
        hexagon, pentagon = cycle_space(rng, 6, "x"), cycle_space(rng, 5, "y")
        f = winding_map(hexagon, pentagon, 0, 1)
        assert f.values == (0, 1, 2, 3, 4, 4)
        assert lipschitz_constant(f) == 1

    def test_holed_pairs_have_finite_distance(self):
        for seed in range(6):
            X, Y, f, g, r = holed_pair(random.Random(seed))
            assert X.size in (5, 6) and 5 <= Y.size <= X.size and r == 1
            assert max(lipschitz_constant(f), lipschitz_constant(g)) <= 1
            result = homotopic_distance(f, g, ScaleParams(1, r))
            assert result.status == "finite" and result.value <= 1

    def test_suite_reports_nontrivial_instances(self):
        report = run_suite(["symmetry"], trials=16, seed=0, min_passes=1, min_nontrivial=1)
        (stats,) = report.stats
        assert stats.compares_distances
        assert stats.nontrivial >= 1
        assert report.starved == []
        assert report.rows()[0]["nontrivial"] == stats.nontrivial


class TestHomotopyEquivalences:
    def test_whisker_retracts_onto_the_space(self, segment):
        bigger, inclusion, retraction = whisker(random.Random(0), segment, 1, "s")
        check_metric_axioms(bigger)
        assert bigger.size == segment.size + 1
        assert compose(retraction, inclusion) == identity(segment)
        assert lipschitz_constant(retraction) <= 1

    def test_equivalence_on_a_cycle_is_not_an_isometry(self):
        pentagon = cycle_space(random.Random(0), 5, "p")
        alpha, beta = homotopy_equivalence(random.Random(1), pentagon, 1, "q")
        assert alpha.codomain.size == 6
        assert compose(beta, alpha) == identity(pentagon)
        assert find_homotopy(compose(alpha, beta), identity(alpha.codomain), ScaleParams(1, 1)).found

    def test_small_spaces_take_the_inverse_from_the_search(self):
        space = random_space(random.Random(2), 3, 3, "p")
        r = max(space.distinct_distances())
        pair = homotopy_equivalence(random.Random(3), space, r, "q")
        assert pair is not None
        alpha, beta = pair
        assert lipschitz_constant(beta) * lipschitz_constant(alpha) <= 1

    def test_distance_survives_the_equivalence(self):
        pentagon = cycle_space(random.Random(0), 5, "p")
        f, g = winding_map(pentagon, pentagon, 0, 1), constant(pentagon, pentagon, 0)
        alpha, _ = homotopy_equivalence(random.Random(5), pentagon, 1, "y")
        _, beta = homotopy_equivalence(random.Random(6), pentagon, 1, "x")
        params = ScaleParams(1, 1)
        moved = homotopic_distance(compose(alpha, compose(f, beta)), compose(alpha, compose(g, beta)), params)
        assert homotopic_distance(f, g, params).value == moved.value == 1


@pytest.mark.slow
def test_full_suite():
    report = run_suite(trials=200, seed=0, workers=4, min_passes=20, min_nontrivial=10)
    assert report.ok, report.rows()
    assert report.starved == []
