"""
Finite metric spaces.

A space is an ordered tuple of point labels plus a symmetric matrix of exact
rational distances. Points are addressed by index everywhere in drht; labels
only matter at the file and CLI boundary.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import networkx as nx

from .scalar import common_denominator, parse_scalar, rationalize

logger = logging.getLogger(__name__)

PRODUCT_METRICS = ("l1", "max")


class MetricAxiomError(ValueError):
    """Raised when a distance matrix violates a metric axiom or is malformed."""


@dataclass(frozen=True)
class FiniteMetricSpace:
    """
    Finite metric space with exact rational distances.

    Attributes
    ----------
    point_ids : tuple[str, ...]
        Distinct point labels; the position of a label is its index.
    dist : tuple[tuple[Fraction, ...], ...]
        Symmetric distance matrix, zero exactly on the diagonal.
    factors : tuple[FiniteMetricSpace, ...]
        The two factors when the space was built as a product, else empty.
    coords : tuple[tuple[int, int], ...] | None
        Grid coordinates for generated grid spaces.

    Instances built directly are trusted; use `build_space` for unchecked
    input.
    """

    point_ids: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    factors: tuple["FiniteMetricSpace", ...] = field(default=(), compare=False, repr=False)
    coords: Optional[tuple[tuple[int, int], ...]] = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.point_ids)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.point_ids)}

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown point label {label!r}") from None

    @cached_property
    def diameter(self) -> Fraction:
        return max((max(row) for row in self.dist), default=Fraction(0))

    @cached_property
    def scaled(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        """Common denominator L and the integer matrix L * dist."""
        denom = common_denominator(v for row in self.dist for v in row)
        return denom, tuple(tuple(int(v * denom) for v in row) for row in self.dist)

    def distinct_distances(self) -> list[Fraction]:
        return sorted({v for row in self.dist for v in row if v > 0})

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.size}, diameter={self.diameter})"


def build_space(labels: Sequence[str], matrix: Sequence[Sequence]) -> FiniteMetricSpace:
    """
    Build a space from labels and a distance matrix, checking every axiom.

    Matrix entries may be ints, Fractions or scalar literals ("3/2", "0.5").

    Raises:
        MetricAxiomError: shape problems, duplicate labels, or an axiom
            violation; the message names the offending points.
    """
    labels = tuple(str(label) for label in labels)
    n = len(labels)
    if n == 0:
        raise MetricAxiomError("a metric space needs at least one point")
    if len(set(labels)) != n:
        seen = set()
        dupes = sorted({x for x in labels if x in seen or seen.add(x)})
        raise MetricAxiomError(f"duplicate point labels: {dupes}")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise MetricAxiomError(f"distance matrix must be {n}x{n}")

    dist = tuple(tuple(parse_scalar(v) for v in row) for row in matrix)
    space = FiniteMetricSpace(labels, dist)
    check_metric_axioms(space)
    return space


def check_metric_axioms(space: FiniteMetricSpace) -> None:
    """Exhaustively verify the metric axioms, raising on the first violation."""
    labels, dist, n = space.point_ids, space.dist, space.size
    for i in range(n):
        if dist[i][i] != 0:
            raise MetricAxiomError(f"d({labels[i]},{labels[i]}) = {dist[i][i]} is not zero")
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i]:
                raise MetricAxiomError(
                    f"asymmetric distance between {labels[i]} and {labels[j]}: "
                    f"{dist[i][j]} vs {dist[j][i]}"
                )
            if dist[i][j] <= 0:
                raise MetricAxiomError(
                    f"distinct points {labels[i]} and {labels[j]} at non-positive distance {dist[i][j]}"
                )

    # Integer arithmetic keeps the cubic scan affordable on larger spaces.
    _, scaled = space.scaled
    for k in range(n):
        row_k = scaled[k]
        for i in range(n):
            dik = scaled[i][k]
            row_i = scaled[i]
            for j in range(n):
                if row_i[j] > dik + row_k[j]:
                    raise MetricAxiomError(
                        f"triangle inequality fails: d({labels[i]},{labels[j]}) = {dist[i][j]} > "
                        f"d({labels[i]},{labels[k]}) + d({labels[k]},{labels[j]}) = {dist[i][k] + dist[k][j]}"
                    )


def metric_closure(labels: Sequence[str], weights: Sequence[Sequence]) -> FiniteMetricSpace:
    """Shortest-path closure of a complete positive weight matrix."""
    n = len(labels)
    dist = [[Fraction(weights[i][j]) if i != j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = dist[i][k] + dist[k][j]
                if via < dist[i][j]:
                    dist[i][j] = via
    return build_space(labels, dist)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def interval(m: int) -> FiniteMetricSpace:
    """The integer interval [0, m] with |i - j|."""
    if m < 0:
        raise ValueError(f"interval length must be non-negative, got {m}")
    points = range(m + 1)
    return build_space([str(i) for i in points], [[abs(i - j) for j in points] for i in points])


CHORD_MODES = ("chord-rationalized", "chord")


def cycle(n: int, mode: str = "geodesic") -> FiniteMetricSpace:
    """
    n evenly spaced points on a circle.

    mode "geodesic" uses the hop count min(|i-j|, n-|i-j|); mode
    "chord-rationalized" (alias "chord") uses the Euclidean chord length of
    the unit circle rounded to a denominator of 10**6.
    """
    if n < 3:
        raise ValueError(f"cycle needs at least three points, got {n}")
    if mode == "geodesic":
        matrix = [[min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]
    elif mode in CHORD_MODES:
        matrix = [
            [rationalize(2 * math.sin(math.pi * abs(i - j) / n)) for j in range(n)]
            for i in range(n)
        ]
    else:
        raise ValueError(f"unknown cycle mode {mode!r}; use 'geodesic' or 'chord-rationalized'")
    return build_space([str(i) for i in range(n)], matrix)


def _grid_space(graph: nx.Graph, unit: Fraction) -> FiniteMetricSpace:
    if not nx.is_connected(graph):
        raise ValueError("grid with holes is disconnected; holes must leave a corridor")
    nodes = sorted(graph.nodes)
    lengths = dict(nx.all_pairs_shortest_path_length(graph))
    matrix = [[unit * lengths[a][b] for b in nodes] for a in nodes]
    space = build_space([f"{x},{y}" for x, y in nodes], matrix)
    return FiniteMetricSpace(space.point_ids, space.dist, coords=tuple(nodes))


def grid(width: int, height: int, unit=1) -> FiniteMetricSpace:
    """width x height lattice with the taxicab metric scaled by `unit`."""
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be positive, got {width}x{height}")
    return _grid_space(nx.grid_2d_graph(width, height), parse_scalar(unit))


def two_hole_grid(
    width: int,
    height: int,
    holes: Iterable[tuple[int, int, int, int]],
    unit=1,
) -> FiniteMetricSpace:
    """
    Grid with rectangular holes removed, metric = shortest 4-neighbour path.

    Each hole is (x0, y0, x1, y1), inclusive corners. Holes must sit strictly
    inside the grid and be separated by at least one lattice row or column.
    """
    holes = [tuple(int(v) for v in hole) for hole in holes]
    graph = nx.grid_2d_graph(width, height)
    for x0, y0, x1, y1 in holes:
        if not (1 <= x0 <= x1 <= width - 2 and 1 <= y0 <= y1 <= height - 2):
            raise ValueError(f"hole {(x0, y0, x1, y1)} must lie strictly inside the {width}x{height} grid")
    for a in range(len(holes)):
        for b in range(a + 1, len(holes)):
            ax0, ay0, ax1, ay1 = holes[a]
            bx0, by0, bx1, by1 = holes[b]
            if ax0 <= bx1 + 1 and bx0 <= ax1 + 1 and ay0 <= by1 + 1 and by0 <= ay1 + 1:
                raise ValueError(f"holes {holes[a]} and {holes[b]} touch or overlap")
    for x0, y0, x1, y1 in holes:
        graph.remove_nodes_from((x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1))
    logger.debug(f"two_hole_grid {width}x{height} with {len(holes)} holes: {graph.number_of_nodes()} points")
    return _grid_space(graph, parse_scalar(unit))


GENERATORS = {
    "interval": interval,
    "cycle": cycle,
    "grid": grid,
    "two_hole_grid": two_hole_grid,
}


def generate(kind: str, **params) -> FiniteMetricSpace:
    """Dispatch to a named generator."""
    try:
        generator = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}") from None
    return generator(**params)


# ---------------------------------------------------------------------------
# Products, subspaces, unions
# ---------------------------------------------------------------------------


def product(a: FiniteMetricSpace, b: FiniteMetricSpace, metric: str = "l1") -> FiniteMetricSpace:
    """
    Cartesian product; point (i, j) sits at index i * |b| + j.

    metric "l1" sums the factor distances, "max" takes the larger one.
    """
    if metric not in PRODUCT_METRICS:
        raise ValueError(f"unknown product metric {metric!r}; use one of {PRODUCT_METRICS}")
    combine = (lambda u, v: u + v) if metric == "l1" else max
    pairs = [(i, j) for i in range(a.size) for j in range(b.size)]
    labels = tuple(f"({a.point_ids[i]},{b.point_ids[j]})" for i, j in pairs)
    dist = tuple(
        tuple(combine(a.dist[i][k], b.dist[j][l]) for k, l in pairs)
        for i, j in pairs
    )
    return FiniteMetricSpace(labels, dist, factors=(a, b))


def product_l1(a: FiniteMetricSpace, b: FiniteMetricSpace) -> FiniteMetricSpace:
    return product(a, b, "l1")


def product_max(a: FiniteMetricSpace, b: FiniteMetricSpace) -> FiniteMetricSpace:
    return product(a, b, "max")


@dataclass(frozen=True)
class PointSubset:
    """Sorted, duplicate-free set of point indices of `space`."""

    space: FiniteMetricSpace
    indices: tuple[int, ...]

    def __post_init__(self):
        indices = tuple(sorted(set(self.indices)))
        if not indices:
            raise ValueError("a point subset must be non-empty")
        if indices[0] < 0 or indices[-1] >= self.space.size:
            raise ValueError(f"subset indices out of range for a space of size {self.space.size}")
        object.__setattr__(self, "indices", indices)

    def labels(self) -> list[str]:
        return [self.space.point_ids[i] for i in self.indices]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def subspace(space: FiniteMetricSpace, indices: Iterable[int]) -> FiniteMetricSpace:
    """Induced subspace; distances are restricted, never recomputed."""
    chosen = PointSubset(space, tuple(indices)).indices
    coords = tuple(space.coords[i] for i in chosen) if space.coords else None
    return FiniteMetricSpace(
        tuple(space.point_ids[i] for i in chosen),
        tuple(tuple(space.dist[i][j] for j in chosen) for i in chosen),
        coords=coords,
    )


def disjoint_union(
    a: FiniteMetricSpace, b: FiniteMetricSpace, separation: Fraction
) -> FiniteMetricSpace:
    """
    Union of two spaces with every cross distance equal to `separation`.

    The separation must be at least half of each diameter for the triangle
    inequality to hold; `build_space` checks it.
    """
    labels = [f"a:{p}" for p in a.point_ids] + [f"b:{p}" for p in b.point_ids]
    sep = parse_scalar(separation)
    rows = [list(row) + [sep] * b.size for row in a.dist]
    rows += [[sep] * a.size + list(row) for row in b.dist]
    return build_space(labels, rows)


# ---------------------------------------------------------------------------
# r-connectivity
# ---------------------------------------------------------------------------


def r_graph(space: FiniteMetricSpace, r: Fraction) -> nx.Graph:
    """Graph on the points with an edge whenever d <= r."""
    graph = nx.Graph()
    graph.add_nodes_from(range(space.size))
    graph.add_edges_from(
        (i, j)
        for i in range(space.size)
        for j in range(i + 1, space.size)
        if space.dist[i][j] <= r
    )
    return graph


def r_components(space: FiniteMetricSpace, r: Fraction) -> list[list[int]]:
    """r-components, each sorted, ordered by their smallest point."""
    components = [sorted(c) for c in nx.connected_components(r_graph(space, r))]
    return sorted(components)


def is_r_connected(space: FiniteMetricSpace, r: Fraction) -> tuple[bool, list[list[int]]]:
    components = r_components(space, r)
    return len(components) == 1, components


def shortest_r_path(space: FiniteMetricSpace, x: int, y: int, r: Fraction) -> Optional[list[int]]:
    """Fewest-hop r-path from x to y, or None if they lie in different r-components."""
    try:
        return nx.shortest_path(r_graph(space, r), x, y)
    except nx.NetworkXNoPath:
        return None


def is_r_path(space: FiniteMetricSpace, points: Sequence[int], r: Fraction) -> bool:
    return all(space.dist[a][b] <= r for a, b in zip(points, points[1:]))
