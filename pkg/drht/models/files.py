"""
Pydantic models for drht's JSON files.

Every scalar is written as a "p/q" string (plain digits for integers) and
every point is referred to by its label, so files are exact and readable.
Each model converts to and from the corresponding core object.
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator

from ..distance import DistanceResult
from ..homotopy_search import Homotopy
from ..invariants import MotionPlan
from ..lipschitz_maps import LipschitzMap, ScaleParams, map_from_labels
from ..metric_space import FiniteMetricSpace, build_space, subspace
from ..scalar import format_scalar, parse_scalar

ScalarText = Union[str, int]
Status = Literal["finite", "infinite", "bounded"]


def _normalize(value: ScalarText) -> str:
    return format_scalar(parse_scalar(value))


class SpaceFile(BaseModel):
    """A finite metric space: labels plus a full distance matrix under "metric"."""

    model_config = ConfigDict(populate_by_name=True)

    points: List[str] = Field(..., description="Point labels in index order")
    metric: List[List[ScalarText]] = Field(
        ...,
        validation_alias=AliasChoices("metric", "dist"),
        description="Distance matrix of scalar literals; \"dist\" is read as a synonym",
    )

    @field_validator("metric")
    @classmethod
    def normalize_scalars(cls, rows):
        return [[_normalize(v) for v in row] for row in rows]

    def to_space(self) -> FiniteMetricSpace:
        return build_space(self.points, self.metric)

    @classmethod
    def from_space(cls, space: FiniteMetricSpace) -> "SpaceFile":
        return cls(
            points=list(space.point_ids),
            metric=[[format_scalar(v) for v in row] for row in space.dist],
        )


class MapFile(BaseModel):
    """A map between two spaces, given label to label."""

    domain: SpaceFile
    codomain: SpaceFile
    values: Dict[str, str] = Field(..., description="Image label of every domain label")

    def to_map(self) -> LipschitzMap:
        return map_from_labels(self.domain.to_space(), self.codomain.to_space(), self.values)

    @classmethod
    def from_map(cls, f: LipschitzMap) -> "MapFile":
        return cls(
            domain=SpaceFile.from_space(f.domain),
            codomain=SpaceFile.from_space(f.codomain),
            values=f.label_mapping(),
        )


class HomotopyFile(BaseModel):
    """Frames of an (s, r)-homotopy, each a label to label mapping."""

    kind: Literal["homotopy"] = "homotopy"
    s: ScalarText
    r: ScalarText
    domain: SpaceFile
    codomain: SpaceFile
    frames: List[Dict[str, str]] = Field(..., min_length=1)

    @field_validator("s", "r")
    @classmethod
    def normalize_scale(cls, value):
        return _normalize(value)

    def to_homotopy(self) -> Homotopy:
        domain, codomain = self.domain.to_space(), self.codomain.to_space()
        frames = tuple(map_from_labels(domain, codomain, frame) for frame in self.frames)
        return Homotopy(frames, ScaleParams(self.s, self.r))

    @classmethod
    def from_homotopy(cls, homotopy: Homotopy) -> "HomotopyFile":
        return cls(
            s=format_scalar(homotopy.params.s),
            r=format_scalar(homotopy.params.r),
            domain=SpaceFile.from_space(homotopy.domain),
            codomain=SpaceFile.from_space(homotopy.codomain),
            frames=[frame.label_mapping() for frame in homotopy.frames],
        )


class DistanceCertificateFile(BaseModel):
    """D_r(f, g) with the cover and per-piece witnesses that prove it."""

    kind: Literal["distance"] = "distance"
    status: Status
    s: ScalarText
    r: ScalarText
    value: Optional[int] = None
    lower: Optional[int] = None
    upper: Optional[int] = None
    f: MapFile
    g: MapFile
    cover: List[List[str]] = Field(default_factory=list, description="Labels of each good subset")
    witnesses: List[List[Dict[str, str]]] = Field(
        default_factory=list, description="Frames of the witness on each good subset"
    )
    bad_point: Optional[str] = None
    reason: str = ""

    @field_validator("s", "r")
    @classmethod
    def normalize_scale(cls, value):
        return _normalize(value)

    @classmethod
    def from_result(cls, result: DistanceResult, f: LipschitzMap, g: LipschitzMap) -> "DistanceCertificateFile":
        labels = f.domain.point_ids
        return cls(
            status=result.status,
            s=format_scalar(result.params.s),
            r=format_scalar(result.params.r),
            value=result.value,
            lower=result.lower,
            upper=result.upper,
            f=MapFile.from_map(f),
            g=MapFile.from_map(g),
            cover=[[labels[i] for i in subset] for subset in result.cover],
            witnesses=[[frame.label_mapping() for frame in w.frames] for w in result.witnesses],
            bad_point=None if result.bad_point is None else labels[result.bad_point],
            reason=result.reason,
        )

    def to_result(self) -> tuple[DistanceResult, LipschitzMap, LipschitzMap]:
        f, g = self.f.to_map(), self.g.to_map()
        params = ScaleParams(self.s, self.r)
        cover = tuple(tuple(sorted(f.domain.index_of(p) for p in subset)) for subset in self.cover)
        witnesses = []
        for subset, frames in zip(cover, self.witnesses):
            piece = subspace(f.domain, subset)
            maps = tuple(map_from_labels(piece, f.codomain, frame) for frame in frames)
            witnesses.append(Homotopy(maps, params))
        result = DistanceResult(
            self.status,
            params,
            value=self.value,
            lower=self.lower,
            upper=self.upper,
            cover=cover,
            witnesses=tuple(witnesses),
            bad_point=None if self.bad_point is None else f.domain.index_of(self.bad_point),
            reason=self.reason,
        )
        return result, f, g


class PlanEntry(BaseModel):
    pairs: List[Tuple[str, str]] = Field(..., description="Label pairs (x, y) in this cover element")
    paths: List[List[str]] = Field(..., description="r-path from x to y for each pair")


class MotionPlanFile(BaseModel):
    """Motion plans covering X x X, one entry per cover element."""

    kind: Literal["motion_plan"] = "motion_plan"
    r: ScalarText
    product_metric: Literal["l1", "max"] = "l1"
    space: SpaceFile
    plans: List[PlanEntry]

    @field_validator("r")
    @classmethod
    def normalize_r(cls, value):
        return _normalize(value)

    @classmethod
    def from_plans(
        cls, space: FiniteMetricSpace, r, product_metric: str, plans: List[MotionPlan]
    ) -> "MotionPlanFile":
        n = space.size
        labels = space.point_ids
        entries = [
            PlanEntry(
                pairs=[(labels[k // n], labels[k % n]) for k in plan.subset],
                paths=[[labels[p] for p in path] for path in plan.paths],
            )
            for plan in plans
        ]
        return cls(r=_normalize(r), product_metric=product_metric, space=SpaceFile.from_space(space), plans=entries)

    def to_plans(self) -> tuple[FiniteMetricSpace, List[MotionPlan]]:
        space = self.space.to_space()
        n = space.size
        plans = []
        for entry in self.plans:
            subset = []
            for first, second in entry.pairs:
                subset.append(space.index_of(first) * n + space.index_of(second))
            paths = tuple(tuple(space.index_of(p) for p in path) for path in entry.paths)
            plans.append(MotionPlan(tuple(subset), paths))
        return space, plans

