"""
Lipschitz maps between finite metric spaces, and the canonical maps used by
the category invariants (identity, constants, projections, axis inclusions).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .metric_space import FiniteMetricSpace, PointSubset, product, subspace
from .scalar import parse_scalar

logger = logging.getLogger(__name__)


class MapError(ValueError):
    """Raised for maps whose value array does not fit their spaces."""


class PreconditionError(ValueError):
    """Raised when an operation's stated hypothesis does not hold."""


@dataclass(frozen=True)
class ScaleParams:
    """Lipschitz scale s and step size r of a homotopy, both non-negative."""

    s: Fraction
    r: Fraction

    def __post_init__(self):
        s, r = parse_scalar(self.s), parse_scalar(self.r)
        if s < 0 or r < 0:
            raise ValueError(f"scale parameters must be non-negative, got s={s}, r={r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "r", r)

    def with_r(self, r) -> "ScaleParams":
        return ScaleParams(self.s, r)

    def with_s(self, s) -> "ScaleParams":
        return ScaleParams(s, self.r)


@dataclass(frozen=True)
class LipschitzMap:
    """
    A map given by the image index of every domain point.

    Attributes
    ----------
    domain : FiniteMetricSpace
    codomain : FiniteMetricSpace
    values : tuple[int, ...]
        values[i] is the codomain index of the image of domain point i.
    """

    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if len(values) != self.domain.size:
            raise MapError(f"map has {len(values)} values for a domain of {self.domain.size} points")
        for i, v in enumerate(values):
            if not 0 <= v < self.codomain.size:
                raise MapError(
                    f"image of {self.domain.point_ids[i]} is index {v}, outside a codomain of {self.codomain.size} points"
                )
        object.__setattr__(self, "values", values)

    def __call__(self, i: int) -> int:
        return self.values[i]

    def label_mapping(self) -> dict[str, str]:
        return {
            self.domain.point_ids[i]: self.codomain.point_ids[v]
            for i, v in enumerate(self.values)
        }


def map_from_labels(
    domain: FiniteMetricSpace, codomain: FiniteMetricSpace, mapping: Mapping[str, str]
) -> LipschitzMap:
    """Build a map from a label -> label dictionary covering the whole domain."""
    missing = [p for p in domain.point_ids if p not in mapping]
    if missing:
        raise MapError(f"map is undefined on {missing}")
    try:
        values = [codomain.index_of(mapping[p]) for p in domain.point_ids]
    except ValueError as e:
        raise MapError(str(e)) from e
    return LipschitzMap(domain, codomain, tuple(values))


def lipschitz_witness(f: LipschitzMap) -> tuple[Fraction, Optional[tuple[int, int]]]:
    """Exact Lipschitz constant and the first pair attaining it (None if |X| = 1)."""
    best, pair = Fraction(0), None
    dx, dy, values = f.domain.dist, f.codomain.dist, f.values
    n = f.domain.size
    for i in range(n):
        for j in range(i + 1, n):
            ratio = dy[values[i]][values[j]] / dx[i][j]
            if pair is None or ratio > best:
                best, pair = ratio, (i, j)
    return best, pair


def lipschitz_constant(f: LipschitzMap) -> Fraction:
    return lipschitz_witness(f)[0]


def is_s_lipschitz(f: LipschitzMap, s) -> bool:
    return lipschitz_constant(f) <= parse_scalar(s)


def compose(h: LipschitzMap, f: LipschitzMap) -> LipschitzMap:
    """h after f."""
    if f.codomain != h.domain:
        raise MapError("cannot compose: codomain of the inner map differs from the domain of the outer map")
    return LipschitzMap(f.domain, h.codomain, tuple(h.values[v] for v in f.values))


def restrict(f: LipschitzMap, indices: Iterable[int]) -> LipschitzMap:
    """Restriction of f to the induced subspace on `indices`."""
    chosen = PointSubset(f.domain, tuple(indices)).indices
    return LipschitzMap(subspace(f.domain, chosen), f.codomain, tuple(f.values[i] for i in chosen))


def identity(space: FiniteMetricSpace) -> LipschitzMap:
    return LipschitzMap(space, space, tuple(range(space.size)))


def constant(domain: FiniteMetricSpace, codomain: FiniteMetricSpace, y0: int) -> LipschitzMap:
    return LipschitzMap(domain, codomain, (y0,) * domain.size)


def inclusion(space: FiniteMetricSpace, indices: Sequence[int]) -> LipschitzMap:
    """Inclusion of the induced subspace on `indices` into `space`."""
    return restrict(identity(space), indices)


def projection(square: FiniteMetricSpace, which: int) -> LipschitzMap:
    """Projection of X x X onto its first (which=1) or second (which=2) factor."""
    if len(square.factors) != 2:
        raise MapError("projection needs a space built by product()")
    a, b = square.factors
    if which == 1:
        values = tuple(k // b.size for k in range(square.size))
        return LipschitzMap(square, a, values)
    if which == 2:
        values = tuple(k % b.size for k in range(square.size))
        return LipschitzMap(square, b, values)
    raise MapError(f"projection index must be 1 or 2, got {which}")


def axis_inclusion(
    space: FiniteMetricSpace, x0: int, which: int, metric: str = "l1",
    square: Optional[FiniteMetricSpace] = None,
) -> LipschitzMap:
    """x -> (x, x0) for which=1, x -> (x0, x) for which=2."""
    square = square if square is not None else product(space, space, metric)
    n = space.size
    if which == 1:
        values = tuple(x * n + x0 for x in range(n))
    elif which == 2:
        values = tuple(x0 * n + x for x in range(n))
    else:
        raise MapError(f"axis index must be 1 or 2, got {which}")
    return LipschitzMap(space, square, values)


CANONICAL_MAPS = ("identity", "constant", "projection1", "projection2", "axis1", "axis2")


def canonical(kind: str, space: FiniteMetricSpace, x0: int = 0, metric: str = "l1") -> LipschitzMap:
    """
    Named canonical map on `space`.

    "identity" and "constant" act on `space` itself; projections act on
    space x space; axis inclusions land in space x space at base point x0.
    """
    if kind == "identity":
        return identity(space)
    if kind == "constant":
        return constant(space, space, x0)
    if kind in ("projection1", "projection2"):
        return projection(product(space, space, metric), int(kind[-1]))
    if kind in ("axis1", "axis2"):
        return axis_inclusion(space, x0, int(kind[-1]), metric)
    raise ValueError(f"unknown canonical map {kind!r}; choose from {CANONICAL_MAPS}")
