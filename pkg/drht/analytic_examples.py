"""
Worked examples: power maps on the circle and a grid with two holes.

The circle example is evaluated in floating point with numpy and checked
against its Lipschitz bounds with a relative slack; the two-hole grid runs
entirely on the exact core.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_BUDGET
from .distance import DistanceResult, PairDecider, cover_lower_bound
from .homotopy_search import (
    Homotopy,
    HomotopyVerdict,
    concatenate,
    find_homotopy,
    path_homotopy,
    reverse,
    verify_homotopy,
)
from .lipschitz_maps import LipschitzMap, ScaleParams, constant, restrict
from .metric_space import (
    FiniteMetricSpace,
    build_space,
    cycle,
    product,
    shortest_r_path,
    subspace,
    two_hole_grid,
)
from .scalar import DEFAULT_TOLERANCE, LIPSCHITZ_SLACK, ApproxFloat, parse_scalar

logger = logging.getLogger(__name__)

CIRCLE_SAMPLES = 120
LOOP_CORNERS = 3


# ---------------------------------------------------------------------------
# Power maps z -> z^n on the unit circle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerMapHomotopy:
    """
    Straight-line homotopy from z -> z^n to z -> z^k sampled at N points.

    Attributes
    ----------
    n, k : int
    r : Fraction
    samples : np.ndarray
        The N sample points exp(2 pi i j / N).
    frames : np.ndarray
        Complex array of shape (m + 1, N); row j is F_j at the samples.
    """

    n: int
    k: int
    r: Fraction
    samples: np.ndarray
    frames: np.ndarray

    @property
    def m(self) -> int:
        return self.frames.shape[0] - 1


@dataclass(frozen=True)
class AnalyticReport:
    passed: bool
    s: float
    r: float
    max_lipschitz_ratio: float
    max_step: float
    violations: list[str]


def step_count(r) -> int:
    """m = 2 * floor(2 / r) + 1; odd, so no frame passes through the origin."""
    r = parse_scalar(r)
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    return 2 * math.floor(Fraction(2) / r) + 1


def power_map_homotopy(n: int, k: int, r, samples: int = CIRCLE_SAMPLES) -> PowerMapHomotopy:
    """F_j(z) = (m - j)/m z^n + j/m z^k at N evenly spaced samples."""
    if n < 1 or k < 1:
        raise ValueError(f"exponents must be positive, got n={n}, k={k}")
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    r = parse_scalar(r)
    m = step_count(r)
    z = np.exp(2j * np.pi * np.arange(samples) / samples)
    t = (np.arange(m + 1) / m)[:, None]
    frames = (1 - t) * z**n + t * z**k
    if np.any(np.abs(frames) <= DEFAULT_TOLERANCE):
        j, i = np.argwhere(np.abs(frames) <= DEFAULT_TOLERANCE)[0]
        raise ValueError(f"frame {j} reaches the origin at sample {i}")
    logger.debug(f"power map homotopy n={n} k={k} r={r}: m={m}, {samples} samples")
    return PowerMapHomotopy(n, k, r, z, frames)


def verify_analytic(
    homotopy: PowerMapHomotopy,
    s: Optional[float] = None,
    r: Optional[float] = None,
    slack: float = LIPSCHITZ_SLACK,
    tolerance: float = DEFAULT_TOLERANCE,
) -> AnalyticReport:
    """
    Check every frame is s-Lipschitz for the chord metric and every time
    step moves each sample by at most r, both up to a relative slack. The
    final comparisons are made on `ApproxFloat`, so a bound missed by no more
    than `tolerance` still holds.

    s defaults to max(n, k) and r to the homotopy's own r.
    """
    s = float(max(homotopy.n, homotopy.k) if s is None else s)
    r = float(homotopy.r if r is None else r)
    z, frames = homotopy.samples, homotopy.frames
    chord = np.abs(z[:, None] - z[None, :])
    off_diagonal = ~np.eye(len(z), dtype=bool)
    stretch = ApproxFloat(s * (1 + slack), tolerance)
    step_bound = ApproxFloat(r * (1 + slack), tolerance)
    violations = []

    max_ratio = 0.0
    for j, frame in enumerate(frames):
        spread = np.abs(frame[:, None] - frame[None, :])
        if off_diagonal.any():
            max_ratio = max(max_ratio, float(np.max(spread[off_diagonal] / chord[off_diagonal])))
        a, b = np.unravel_index(np.argmax(spread - stretch.value * chord), spread.shape)
        if ApproxFloat(float(spread[a, b]), tolerance) > stretch * float(chord[a, b]):
            violations.append(f"frame {j} stretches samples {a} and {b} beyond s = {s}")

    gaps = np.abs(np.diff(frames, axis=0))
    max_step = float(gaps.max()) if gaps.size else 0.0
    # numpy narrows the candidates, the tolerance decides
    for j, i in np.argwhere(gaps > step_bound.value):
        if ApproxFloat(float(gaps[j, i]), tolerance) > step_bound:
            violations.append(f"step {j}->{j + 1} moves sample {i} by {gaps[j, i]:.9f} > r = {r}")

    return AnalyticReport(not violations, s, r, max_ratio, max_step, violations)


def power_map_on_cycle(n: int, samples: int) -> LipschitzMap:
    """z -> z^n on the chord-metric cycle of N points, as index map j -> n j mod N."""
    if n < 1:
        raise ValueError(f"exponent must be positive, got {n}")
    circle = cycle(samples, "chord-rationalized")
    return LipschitzMap(circle, circle, tuple(n * j % samples for j in range(samples)))


# ---------------------------------------------------------------------------
# Grid with two holes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoHoleInstance:
    """
    Two tight loops around the holes of a grid, crossed into a torus.

    Each hole is wrapped by the ring of grid points around it; its loop is
    three ring points a third of the ring apart, seen as a map from the
    uniform three-point space K_k with distance t_k (a third of the ring).
    The domain is K_0 x K_1 with the max metric, point (i, j) at index
    3 * i + j; f follows the first loop and g the second.

    Attributes
    ----------
    space : FiniteMetricSpace
        The grid with both holes removed.
    domain : FiniteMetricSpace
        K_0 x K_1.
    f, g : LipschitzMap
        (i, j) -> loop_0[i] and (i, j) -> loop_1[j]; both 1-Lipschitz.
    factors : tuple[FiniteMetricSpace, FiniteMetricSpace]
        K_0 and K_1.
    rings : tuple[tuple[int, ...], ...]
        Ring points around each hole in cyclic order.
    loops : tuple[tuple[int, ...], ...]
        The three loop corners around each hole, as indices in `space`.
    """

    space: FiniteMetricSpace
    domain: FiniteMetricSpace
    f: LipschitzMap
    g: LipschitzMap
    factors: tuple[FiniteMetricSpace, FiniteMetricSpace]
    rings: tuple[tuple[int, ...], ...]
    loops: tuple[tuple[int, ...], ...]

    def side(self, hole: int) -> int:
        """Ring steps between consecutive corners of a loop."""
        return len(self.rings[hole]) // LOOP_CORNERS

    def loop_map(self, hole: int) -> LipschitzMap:
        return LipschitzMap(self.factors[hole], self.space, self.loops[hole])


@dataclass(frozen=True)
class TwoHoleRow:
    r: Fraction
    distance: DistanceResult
    stuck_loops: int
    undecided_loops: int


def _ring(space: FiniteMetricSpace, hole: Sequence[int]) -> tuple[int, ...]:
    x0, y0, x1, y1 = hole
    cells = [(x, y0 - 1) for x in range(x0 - 1, x1 + 2)]
    cells += [(x1 + 1, y) for y in range(y0, y1 + 2)]
    cells += [(x, y1 + 1) for x in range(x1, x0 - 2, -1)]
    cells += [(x0 - 1, y) for y in range(y1, y0 - 1, -1)]
    return tuple(space.index_of(f"{x},{y}") for x, y in cells)


def _uniform_triangle(labels: Sequence[str], side: Fraction) -> FiniteMetricSpace:
    return build_space(labels, [[0 if i == j else side for j in range(LOOP_CORNERS)] for i in range(LOOP_CORNERS)])


def two_hole_instance(
    width: int = 15,
    height: int = 10,
    hole0: Sequence[int] = (3, 3, 4, 4),
    hole1: Sequence[int] = (9, 3, 12, 5),
    unit=1,
) -> TwoHoleInstance:
    """
    Build the grid, the loop around each hole and the torus domain.

    Holes are (x0, y0, x1, y1) rectangles. A w x h hole has a ring of
    2 (w + h) + 4 points, which must be a multiple of three. A loop is stuck
    while r stays below half its side; the smaller hole should come first.
    """
    space = two_hole_grid(width, height, [hole0, hole1], unit)
    unit = parse_scalar(unit)
    rings = (_ring(space, hole0), _ring(space, hole1))
    for hole, ring in zip((hole0, hole1), rings):
        if len(ring) % LOOP_CORNERS:
            raise ValueError(f"ring around hole {tuple(hole)} has {len(ring)} points, not a multiple of three")
    loops = tuple(tuple(ring[c * (len(ring) // LOOP_CORNERS)] for c in range(LOOP_CORNERS)) for ring in rings)
    labels = [[f"{name}{c}" for c in range(LOOP_CORNERS)] for name in ("a", "b")]
    factors = tuple(
        _uniform_triangle(labels[hole], unit * (len(ring) // LOOP_CORNERS)) for hole, ring in enumerate(rings)
    )
    domain = product(factors[0], factors[1], "max")
    f = LipschitzMap(domain, space, tuple(loops[0][k // LOOP_CORNERS] for k in range(domain.size)))
    g = LipschitzMap(domain, space, tuple(loops[1][k % LOOP_CORNERS] for k in range(domain.size)))
    logger.debug(f"two-hole instance: {space.size} grid points, loop sides {[len(r) // LOOP_CORNERS for r in rings]}")
    return TwoHoleInstance(space, domain, f, g, factors, rings, loops)


def _coordinate(point: int, hole: int) -> int:
    return divmod(point, LOOP_CORNERS)[hole]


def ring_contraction(instance: TwoHoleInstance, hole: int, corners: Sequence[int], r) -> Optional[Homotopy]:
    """
    Walk the chosen loop corners along the ring onto the middle one.

    Every corner takes the shorter arc and moves as many ring steps per
    frame as r allows. Returns None unless the result is a valid
    (1, r)-homotopy, which for the whole loop means r of at least half a side.
    """
    r = parse_scalar(r)
    ring, side = instance.rings[hole], instance.side(hole)
    size = len(ring)
    unit = instance.space.dist[ring[0]][ring[1]]
    per_frame = math.floor(r / unit)
    target = corners[len(corners) // 2]
    offsets = []
    for c in corners:
        delta = (target - c) * side % size
        offsets.append(delta - size if 2 * delta > size else delta)
    longest = max(abs(d) for d in offsets)
    if longest and not per_frame:
        return None
    frames = []
    for k in range(-(-longest // per_frame) + 1 if longest else 1):
        moved = min(k * per_frame, longest)
        row = []
        for c, delta in zip(corners, offsets):
            step = min(moved, abs(delta))
            row.append(ring[(c * side + (step if delta >= 0 else -step)) % size])
        frames.append(row)

    start = restrict(instance.loop_map(hole), corners)
    end = constant(start.domain, instance.space, instance.loops[hole][target])
    homotopy = Homotopy(
        tuple(LipschitzMap(start.domain, instance.space, tuple(row)) for row in frames), ScaleParams(1, r)
    )
    ok, _ = verify_homotopy(homotopy, start, end)
    return homotopy if ok else None


def contract_corners(
    instance: TwoHoleInstance, hole: int, corners: Sequence[int], r, budget: int = DEFAULT_BUDGET
) -> HomotopyVerdict:
    """(1, r)-homotopy from part of a loop to the constant at its middle corner."""
    corners = tuple(sorted(corners))
    walked = ring_contraction(instance, hole, corners, r)
    if walked is not None:
        return HomotopyVerdict("found", walked, states_visited=0)
    start = restrict(instance.loop_map(hole), corners)
    end = constant(start.domain, instance.space, instance.loops[hole][corners[len(corners) // 2]])
    return find_homotopy(start, end, ScaleParams(1, r), budget)


def loop_contracts(instance: TwoHoleInstance, hole: int, r, budget: int = DEFAULT_BUDGET) -> Optional[bool]:
    """Whether the loop around `hole` is (1, r)-null-homotopic; None if the budget ran out."""
    verdict = contract_corners(instance, hole, range(LOOP_CORNERS), r, budget)
    if verdict.status == "budget_exceeded":
        return None
    return verdict.found


def hole_threshold(
    instance: TwoHoleInstance, hole: int, r_candidates: Optional[Sequence] = None, budget: int = DEFAULT_BUDGET
) -> Optional[Fraction]:
    """Least candidate r (default: every grid distance) at which the loop contracts."""
    candidates = r_candidates or instance.space.distinct_distances()
    for r in sorted(parse_scalar(c) for c in candidates):
        if loop_contracts(instance, hole, r, budget):
            return r
    return None


def _lift(instance: TwoHoleInstance, hole: int, homotopy: Homotopy, corners, subset, r) -> Homotopy:
    sub = subspace(instance.domain, subset)
    position = [corners.index(_coordinate(u, hole)) for u in subset]
    frames = tuple(
        LipschitzMap(sub, instance.space, tuple(frame.values[p] for p in position)) for frame in homotopy.frames
    )
    return Homotopy(frames, ScaleParams(1, r))


def split_witness(
    instance: TwoHoleInstance, subset: Sequence[int], r, budget: int = DEFAULT_BUDGET
) -> Optional[Homotopy]:
    """
    f ~ g on `subset` through constants: contract the part of each loop the
    subset projects onto, then join the two constants by an r-path.
    """
    r = parse_scalar(r)
    subset = tuple(sorted(subset))
    halves = []
    for hole in range(2):
        corners = tuple(sorted({_coordinate(u, hole) for u in subset}))
        verdict = contract_corners(instance, hole, corners, r, budget)
        if not verdict.found:
            return None
        halves.append(_lift(instance, hole, verdict.homotopy, corners, subset, r))
    y0, y1 = halves[0].end.values[0], halves[1].end.values[0]
    path = shortest_r_path(instance.space, y0, y1, r)
    if path is None:
        return None
    bridge = path_homotopy(halves[0].domain, instance.space, path, r)
    joined = concatenate(concatenate(halves[0], bridge), reverse(halves[1]))
    return Homotopy(joined.frames, ScaleParams(1, r))


def _cover(free: Sequence[bool]) -> list[tuple[int, ...]]:
    if all(free):
        return [tuple(range(LOOP_CORNERS**2))]
    if free[0] or free[1]:
        # the free loop's factor goes whole, the stuck one is split into an arc and a point
        whole = 0 if free[0] else 1
        return [
            tuple(sorted(k for k in range(LOOP_CORNERS**2) if _coordinate(k, 1 - whole) in part))
            for part in ((0, 1), (2,))
        ]
    # three squares of corner pairs: every row and column meets two of them
    pairs = ((0, 1), (1, 2), (0, 2))
    return [tuple(LOOP_CORNERS * i + j for i in pair for j in pair) for pair in pairs]


def tight_loop_sets(instance: TwoHoleInstance, hole: int) -> list[frozenset]:
    """
    Subsets on which the map following `hole` is exactly its loop: one
    point per corner, pairwise at distance t_hole.
    """
    side = instance.factors[hole].dist[0][1]
    found = set()
    for others in itertools.product(range(LOOP_CORNERS), repeat=LOOP_CORNERS):
        points = [LOOP_CORNERS * c + o if hole == 0 else LOOP_CORNERS * o + c for c, o in enumerate(others)]
        if all(instance.domain.dist[p][q] == side for p, q in itertools.combinations(points, 2)):
            found.add(frozenset(points))
    return sorted(found, key=sorted)


def two_hole_distance(instance: TwoHoleInstance, r, budget: int = DEFAULT_BUDGET) -> TwoHoleRow:
    """
    D_r(f, g) at s = 1 with a certificate on both sides.

    The cover witnesses come from `split_witness`. The lower bound comes
    from the tight loop sets of every stuck loop, each shown bad by an
    exhausted search: no good set may contain one.
    """
    r = parse_scalar(r)
    params = ScaleParams(1, r)
    contracts = [loop_contracts(instance, hole, r, budget) for hole in range(2)]
    free = [c is True for c in contracts]

    cover = _cover(free)
    witnesses = []
    for subset in cover:
        witness = split_witness(instance, subset, r, budget)
        if witness is None:
            raise RuntimeError(f"no split witness on {list(subset)} at r={r}")
        witnesses.append(witness)

    decider = PairDecider(instance.f, instance.g, params, budget)
    bad = [
        key
        for hole in range(2) if contracts[hole] is False
        for key in tight_loop_sets(instance, hole)
        if decider.decide(key).status == "bad"
    ]
    lower, upper = cover_lower_bound(instance.domain.size, bad), len(cover) - 1
    if lower == upper:
        distance = DistanceResult("finite", params, value=upper, cover=tuple(cover), witnesses=tuple(witnesses))
    else:
        distance = DistanceResult(
            "bounded", params, lower=lower, upper=upper, cover=tuple(cover), witnesses=tuple(witnesses),
            reason="a loop search ran out of budget",
        )
    logger.info(f"r={r}: D={distance.display()}, loops stuck={contracts.count(False)}, {len(bad)} bad loop sets")
    return TwoHoleRow(r, distance, contracts.count(False), contracts.count(None))


def two_hole_sweep(
    instance: TwoHoleInstance,
    r_values: Sequence,
    budget: int = DEFAULT_BUDGET,
) -> list[TwoHoleRow]:
    """D_r(f, g) at s = 1 for each r, with the number of loops still caught on a hole."""
    rows = [two_hole_distance(instance, r, budget) for r in r_values]
    finite = [row for row in rows if row.distance.status == "finite"]
    for before, after in zip(finite, finite[1:]):
        if before.r < after.r and after.distance.value > before.distance.value:
            raise RuntimeError(
                f"distance increased from {before.distance.value} at r={before.r} "
                f"to {after.distance.value} at r={after.r}"
            )
    return rows
