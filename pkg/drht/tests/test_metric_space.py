"""Tests for metric space construction, generators and r-connectivity."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from drht.metric_space import (
    FiniteMetricSpace,
    MetricAxiomError,
    PointSubset,
    build_space,
    check_metric_axioms,
    cycle,
    disjoint_union,
    generate,
    grid,
    interval,
    is_r_connected,
    is_r_path,
    metric_closure,
    product,
    product_l1,
    product_max,
    r_components,
    shortest_r_path,
    subspace,
    two_hole_grid,
)


class TestBuildSpace:
    """Every metric axiom is enforced with a message naming the points."""

    def test_accepts_scalar_literals(self):
        space = build_space(["a", "b"], [["0", "1/2"], ["0.5", 0]])
        assert space.d(0, 1) == Fraction(1, 2)
        assert space.index_of("b") == 1

    def test_rejects_asymmetry(self):
        with pytest.raises(MetricAxiomError, match="asymmetric"):
            build_space(["a", "b"], [[0, 1], [2, 0]])

    def test_rejects_triangle_violation(self):
        with pytest.raises(MetricAxiomError, match="triangle") as excinfo:
            build_space(["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
        assert "d(a,c)" in str(excinfo.value)

    def test_rejects_zero_distance_between_distinct_points(self):
        with pytest.raises(MetricAxiomError, match="non-positive"):
            build_space(["a", "b"], [[0, 0], [0, 0]])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(MetricAxiomError, match="not zero"):
            build_space(["a", "b"], [[1, 1], [1, 0]])

    def test_rejects_duplicate_labels(self):
        with pytest.raises(MetricAxiomError, match="duplicate"):
            build_space(["a", "a"], [[0, 1], [1, 0]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(MetricAxiomError, match="2x2"):
            build_space(["a", "b"], [[0, 1]])

    def test_rejects_empty_space(self):
        with pytest.raises(MetricAxiomError):
            build_space([], [])

    def test_unknown_label(self):
        with pytest.raises(ValueError, match="unknown point"):
            interval(2).index_of("7")


class TestGenerators:
    def test_interval(self):
        space = interval(3)
        assert space.size == 4
        assert space.d(0, 3) == 3
        assert space.diameter == 3

    def test_geodesic_cycle(self):
        space = cycle(6)
        assert space.d(0, 3) == 3
        assert space.d(0, 5) == 1

    def test_chord_cycle_is_rationalized(self):
        space = cycle(4, "chord")
        assert space.d(0, 2) == 2
        assert space.d(0, 1) == Fraction(1414214, 10**6)

    def test_unknown_cycle_mode(self):
        with pytest.raises(ValueError):
            cycle(4, "spiral")

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_cycle_needs_three_points(self, n):
        with pytest.raises(ValueError, match="at least three"):
            cycle(n)

    def test_chord_alias_matches_rationalized_mode(self):
        assert cycle(5, "chord") == cycle(5, "chord-rationalized")

    def test_grid_is_taxicab(self):
        space = grid(3, 2)
        assert space.d(space.index_of("0,0"), space.index_of("2,1")) == 3
        assert space.coords[0] == (0, 0)

    def test_scaled_grid(self):
        space = grid(2, 1, unit="1/2")
        assert space.d(0, 1) == Fraction(1, 2)

    def test_hole_forces_a_detour(self):
        space = two_hole_grid(5, 5, [(2, 2, 2, 2)])
        assert space.size == 24
        assert space.d(space.index_of("1,2"), space.index_of("3,2")) == 4

    def test_holes_must_not_touch(self):
        with pytest.raises(ValueError, match="touch"):
            two_hole_grid(7, 5, [(1, 1, 2, 1), (3, 1, 3, 1)])

    def test_holes_must_sit_inside(self):
        with pytest.raises(ValueError, match="strictly inside"):
            two_hole_grid(5, 5, [(0, 1, 1, 1)])

    def test_generate_dispatch(self):
        assert generate("interval", m=2) == interval(2)
        with pytest.raises(ValueError, match="unknown generator"):
            generate("torus")

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=3, max_value=12))
    def test_generated_cycles_are_metric(self, n):
        check_metric_axioms(cycle(n))
        check_metric_axioms(cycle(n, "chord-rationalized"))


class TestProductsAndSubspaces:
    def test_l1_and_max_products(self):
        a = interval(1)
        l1, sup = product_l1(a, a), product_max(a, a)
        corner = l1.index_of("(1,1)")
        assert l1.d(0, corner) == 2
        assert sup.d(0, corner) == 1
        assert l1.factors == (a, a)

    def test_product_indexing(self):
        square = product(interval(1), interval(2))
        assert square.point_ids[1 * 3 + 2] == "(1,2)"

    def test_unknown_product_metric(self):
        with pytest.raises(ValueError):
            product(interval(1), interval(1), "l2")

    def test_subspace_keeps_distances(self):
        sub = subspace(interval(4), [4, 0, 2])
        assert sub.point_ids == ("0", "2", "4")
        assert sub.d(0, 2) == 4

    def test_point_subset_is_sorted_and_nonempty(self):
        assert PointSubset(interval(3), (3, 1, 1)).indices == (1, 3)
        with pytest.raises(ValueError):
            PointSubset(interval(3), ())
        with pytest.raises(ValueError):
            PointSubset(interval(3), (4,))

    def test_disjoint_union(self):
        union = disjoint_union(interval(1), interval(1), 5)
        assert union.size == 4
        assert union.d(0, 3) == 5
        assert union.point_ids[0] == "a:0"

    def test_equality_ignores_provenance(self):
        square = product_l1(interval(1), interval(1))
        rebuilt = FiniteMetricSpace(square.point_ids, square.dist)
        assert rebuilt == square


class TestConnectivity:
    def test_components(self):
        sub = subspace(interval(3), [0, 1, 3])
        assert r_components(sub, 1) == [[0, 1], [2]]
        assert is_r_connected(sub, 2)[0]

    def test_shortest_r_path(self):
        assert shortest_r_path(interval(4), 0, 4, 2) == [0, 2, 4]
        assert shortest_r_path(subspace(interval(3), [0, 3]), 0, 1, 1) is None

    def test_is_r_path(self):
        assert is_r_path(interval(4), [0, 1, 3], 2)
        assert not is_r_path(interval(4), [0, 3], 2)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=5).flatmap(
        lambda n: st.lists(
            st.fractions(min_value=Fraction(1, 4), max_value=4), min_size=n * n, max_size=n * n
        ).map(lambda flat: (n, flat))
    )
)
def test_metric_closure_always_yields_a_metric(data):
    n, flat = data
    weights = [[flat[i * n + j] if i < j else flat[j * n + i] for j in range(n)] for i in range(n)]
    space = metric_closure([str(i) for i in range(n)], weights)
    check_metric_axioms(space)
    for i in range(n):
        for j in range(n):
            if i != j:
                assert space.d(i, j) <= weights[i][j]
