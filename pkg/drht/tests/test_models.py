"""Tests for the file models and run configuration."""

import json
from fractions import Fraction

import pytest
from pydantic import ValidationError

from drht.distance import homotopic_distance, verify_distance_certificate
from drht.homotopy_search import find_homotopy, verify_homotopy
from drht.invariants import tc_space, verify_motion_plan
from drht.lipschitz_maps import ScaleParams, constant, identity
from drht.metric_space import MetricAxiomError, build_space, interval
from drht.models.files import (
    DistanceCertificateFile,
    HomotopyFile,
    MapFile,
    MotionPlanFile,
    SpaceFile,
)
from drht.models.run_config import RunConfig


class TestSpaceFile:
    def test_scalars_are_normalized(self):
        model = SpaceFile(points=["a", "b"], metric=[[0, "0.5"], ["2/4", "0"]])
        assert model.metric == [["0", "1/2"], ["1/2", "0"]]
        assert model.to_space().diameter == Fraction(1, 2)

    def test_malformed_scalar(self):
        with pytest.raises(ValidationError):
            SpaceFile(points=["a", "b"], metric=[[0, "1e3"], ["1e3", 0]])

    def test_metric_axioms_checked_on_conversion(self):
        model = SpaceFile(points=["a", "b"], metric=[[0, 1], [2, 0]])
        with pytest.raises(MetricAxiomError):
            model.to_space()

    def test_space_round_trip(self, hexagon):
        assert SpaceFile.from_space(hexagon).to_space().dist == hexagon.dist

    def test_metric_key_is_read(self):
        model = SpaceFile.model_validate({"points": ["a", "b"], "metric": [[0, 1], [1, 0]]})
        assert model.to_space().d(0, 1) == 1

    def test_dist_key_is_read_as_synonym(self):
        model = SpaceFile.model_validate({"points": ["a", "b"], "dist": [[0, 1], [1, 0]]})
        assert model.metric == [["0", "1"], ["1", "0"]]

    def test_written_files_use_metric_key(self, segment):
        data = json.loads(SpaceFile.from_space(segment).model_dump_json())
        assert "metric" in data and "dist" not in data


class TestCertificateFiles:
    def test_homotopy_file_still_verifies(self, segment):
        f, g = identity(segment), constant(segment, segment, 0)
        verdict = find_homotopy(f, g, ScaleParams(1, 1))
        loaded = HomotopyFile.model_validate_json(HomotopyFile.from_homotopy(verdict.homotopy).model_dump_json())
        assert loaded.s == "1" and loaded.r == "1"
        assert verify_homotopy(loaded.to_homotopy(), f, g) == (True, [])

    def test_homotopy_file_needs_frames(self, segment):
        space = SpaceFile.from_space(segment)
        with pytest.raises(ValidationError):
            HomotopyFile(s=1, r=1, domain=space, codomain=space, frames=[])

    def test_map_file_uses_labels(self, hexagon_maps):
        _, g = hexagon_maps
        model = MapFile.from_map(g)
        assert set(model.values.values()) == {"0"}
        assert model.to_map() == g

    def test_distance_certificate_round_trip(self, hexagon_maps):
        f, g = hexagon_maps
        result = homotopic_distance(f, g, ScaleParams(1, 1))
        data = DistanceCertificateFile.from_result(result, f, g).model_dump_json()
        loaded, f2, g2 = DistanceCertificateFile.model_validate_json(data).to_result()
        assert loaded.value == 1
        assert verify_distance_certificate(loaded, f2, g2) == (True, [])

    def test_infinite_certificate_names_the_point(self):
        far = build_space(["a", "b"], [[0, 5], [5, 0]])
        point = interval(0)
        f, g = constant(point, far, 0), constant(point, far, 1)
        model = DistanceCertificateFile.from_result(homotopic_distance(f, g, ScaleParams(0, 1)), f, g)
        assert model.status == "infinite"
        assert model.bad_point == "0"

    def test_motion_plan_file(self):
        space = interval(1)
        result = tc_space(space, 1)
        model = MotionPlanFile.from_plans(space, 1, "l1", list(result.plans))
        assert model.plans[0].pairs[1] == ("0", "1")
        loaded_space, plans = MotionPlanFile.model_validate_json(model.model_dump_json()).to_plans()
        assert all(verify_motion_plan(plan, loaded_space, 1)[0] for plan in plans)


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.s is None and config.step() is None
        assert config.budget >= 1
        assert config.product_metric in ("l1", "max")

    def test_scales_are_normalized(self):
        config = RunConfig(s="0.5", r="2", r_list=["1/2", "1", "1.5"])
        assert config.s == "1/2"
        assert str(config.step()) == "2"
        assert [str(r) for r in config.steps()] == ["1/2", "1", "3/2"]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"s": "-1"},
            {"r": "1/0"},
            {"r_list": ["2", "1"]},
            {"r_list": ["1", "1"]},
            {"budget": 0},
            {"trials": 0},
            {"workers": 0},
            {"product_metric": "l2"},
            {"output_format": "xml"},
        ],
    )
    def test_invalid_values(self, kwargs):
        with pytest.raises(ValidationError):
            RunConfig(**kwargs)
