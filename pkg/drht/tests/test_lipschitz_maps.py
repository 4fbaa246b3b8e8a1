"""Tests for Lipschitz maps, composition and the canonical maps."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from drht.lipschitz_maps import (
    LipschitzMap,
    MapError,
    ScaleParams,
    axis_inclusion,
    canonical,
    compose,
    constant,
    identity,
    inclusion,
    is_s_lipschitz,
    lipschitz_constant,
    lipschitz_witness,
    map_from_labels,
    projection,
    restrict,
)
from drht.metric_space import interval, product


class TestLipschitzMap:
    def test_values_must_fit_codomain(self):
        with pytest.raises(MapError, match="outside"):
            LipschitzMap(interval(1), interval(1), (0, 2))

    def test_values_must_cover_domain(self):
        with pytest.raises(MapError, match="2 values"):
            LipschitzMap(interval(2), interval(1), (0, 1))

    def test_map_from_labels(self):
        f = map_from_labels(interval(1), interval(2), {"0": "2", "1": "1"})
        assert f.values == (2, 1)
        assert f.label_mapping() == {"0": "2", "1": "1"}

    def test_map_from_labels_needs_every_point(self):
        with pytest.raises(MapError, match="undefined"):
            map_from_labels(interval(1), interval(2), {"0": "2"})

    def test_map_from_labels_rejects_unknown_image(self):
        with pytest.raises(MapError):
            map_from_labels(interval(1), interval(2), {"0": "2", "1": "9"})


class TestLipschitzConstant:
    """Exact maximum ratio with the pair attaining it."""

    def test_doubling_map(self):
        f = LipschitzMap(interval(2), interval(4), (0, 2, 4))
        assert lipschitz_constant(f) == 2
        assert lipschitz_witness(f) == (2, (0, 1))

    def test_single_point_domain(self):
        f = constant(interval(0), interval(3), 2)
        assert lipschitz_witness(f) == (0, None)

    def test_fractional_constant(self):
        f = LipschitzMap(interval(2), interval(2), (0, 0, 1))
        assert lipschitz_constant(f) == 1
        g = LipschitzMap(interval(2), interval(1), (0, 0, 1))
        assert lipschitz_constant(restrict(g, [0, 2])) == Fraction(1, 2)

    def test_is_s_lipschitz(self):
        f = LipschitzMap(interval(2), interval(4), (0, 2, 4))
        assert is_s_lipschitz(f, 2)
        assert not is_s_lipschitz(f, "3/2")


class TestComposition:
    def test_compose(self):
        f = LipschitzMap(interval(1), interval(2), (0, 2))
        h = LipschitzMap(interval(2), interval(1), (0, 0, 1))
        assert compose(h, f).values == (0, 1)

    def test_compose_checks_spaces(self):
        f = identity(interval(1))
        with pytest.raises(MapError):
            compose(identity(interval(2)), f)

    def test_restrict_uses_induced_subspace(self):
        f = LipschitzMap(interval(3), interval(3), (3, 2, 1, 0))
        sub = restrict(f, [2, 0])
        assert sub.domain.point_ids == ("0", "2")
        assert sub.values == (3, 1)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_composition_multiplies_constants(self, seed):
        rng = random.Random(seed)
        x, y, z = interval(rng.randint(1, 4)), interval(rng.randint(1, 4)), interval(rng.randint(1, 4))
        f = LipschitzMap(x, y, tuple(rng.randrange(y.size) for _ in range(x.size)))
        h = LipschitzMap(y, z, tuple(rng.randrange(z.size) for _ in range(y.size)))
        assert lipschitz_constant(compose(h, f)) <= lipschitz_constant(h) * lipschitz_constant(f)
        assert lipschitz_constant(restrict(f, [0])) <= lipschitz_constant(f)


class TestCanonicalMaps:
    def test_identity_and_constant(self):
        space = interval(2)
        assert identity(space).values == (0, 1, 2)
        assert constant(space, space, 1).values == (1, 1, 1)

    def test_projections(self):
        square = product(interval(1), interval(1))
        assert projection(square, 1).values == (0, 0, 1, 1)
        assert projection(square, 2).values == (0, 1, 0, 1)
        assert lipschitz_constant(projection(square, 1)) == 1

    def test_projection_needs_a_product(self):
        with pytest.raises(MapError):
            projection(interval(3), 1)

    def test_axis_inclusions(self):
        space = interval(2)
        assert axis_inclusion(space, 0, 1).values == (0, 3, 6)
        assert axis_inclusion(space, 0, 2).values == (0, 1, 2)
        assert lipschitz_constant(axis_inclusion(space, 1, 1, "max")) == 1

    def test_inclusion(self):
        f = inclusion(interval(3), [1, 3])
        assert f.codomain == interval(3)
        assert f.values == (1, 3)

    def test_canonical_dispatch(self):
        space = interval(1)
        assert canonical("identity", space) == identity(space)
        assert canonical("projection2", space).values == (0, 1, 0, 1)
        with pytest.raises(ValueError):
            canonical("reflection", space)


class TestScaleParams:
    def test_parses_literals(self):
        params = ScaleParams("1/2", 2)
        assert params.s == Fraction(1, 2)
        assert params.with_r(3).r == 3

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ScaleParams(-1, 1)
