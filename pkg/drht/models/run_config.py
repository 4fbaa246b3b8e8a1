"""
Validated run configuration shared by every CLI subcommand.

Defaults come from `drht.config` (environment / .env); command-line flags
override them and the whole object is validated before any computation.
"""

from typing import List, Literal, Optional
from fractions import Fraction

from pydantic import BaseModel, Field, field_validator

from ..config import (
    DEFAULT_BUDGET,
    DEFAULT_EXHAUSTIVE_LIMIT,
    DEFAULT_MIN_NONTRIVIAL,
    DEFAULT_MIN_PASSES,
    DEFAULT_PRODUCT_METRIC,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
)
from ..scalar import format_scalar, parse_scalar

ProductMetric = Literal["l1", "max"]
OutputFormat = Literal["json", "csv"]


def _non_negative(value) -> str:
    parsed = parse_scalar(value)
    if parsed < 0:
        raise ValueError(f"scale parameters must be non-negative, got {value}")
    return format_scalar(parsed)


class RunConfig(BaseModel):
    """Knobs for one drht invocation."""

    s: Optional[str] = Field(None, description="Lipschitz scale; defaults to max(Lip f, Lip g)")
    r: Optional[str] = Field(None, description="Step size")
    r_list: List[str] = Field(default_factory=list, description="Ascending step sizes for sweeps")
    budget: int = Field(default=DEFAULT_BUDGET, ge=1, description="Search states per homotopy query")
    product_metric: ProductMetric = Field(default=DEFAULT_PRODUCT_METRIC, description="Metric on X x X")
    seed: int = Field(default=DEFAULT_SEED, description="Seed for the law suite")
    trials: int = Field(default=DEFAULT_TRIALS, ge=1, description="Instances per law")
    workers: int = Field(default=DEFAULT_WORKERS, ge=1, description="Worker processes")
    min_passes: int = Field(default=DEFAULT_MIN_PASSES, ge=0, description="Passing trials before a law counts as exercised")
    min_nontrivial: int = Field(
        default=DEFAULT_MIN_NONTRIVIAL, ge=0, description="Trials with 0 < D_r < infinity each distance law must see"
    )
    exhaustive_limit: int = Field(default=DEFAULT_EXHAUSTIVE_LIMIT, ge=0)
    output_format: OutputFormat = Field(default="json")

    @field_validator("s", "r")
    @classmethod
    def validate_scale(cls, value):
        return None if value is None else _non_negative(value)

    @field_validator("r_list")
    @classmethod
    def validate_r_list(cls, values):
        parsed = [parse_scalar(v) for v in values]
        if any(v < 0 for v in parsed):
            raise ValueError("r values must be non-negative")
        if any(b <= a for a, b in zip(parsed, parsed[1:])):
            raise ValueError("r values must be strictly increasing")
        return [format_scalar(v) for v in parsed]

    def scale(self) -> Optional[Fraction]:
        return None if self.s is None else parse_scalar(self.s)

    def step(self) -> Optional[Fraction]:
        return None if self.r is None else parse_scalar(self.r)

    def steps(self) -> List[Fraction]:
        return [parse_scalar(v) for v in self.r_list]
