"""
Discrete (s, r)-homotopies: verification, bounded search, and the algebra of
homotopies (reverse, concatenate, compose, interleave).

A homotopy is a finite sequence of s-Lipschitz frames X -> Y where each
point moves by at most r between consecutive frames. Searching for one is a
shortest-path problem in the implicit "frame graph" whose vertices are the
s-Lipschitz maps and whose edges join maps at pointwise distance <= r.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Optional, Sequence

import networkx as nx

from .config import DEFAULT_BUDGET
from .lipschitz_maps import (
    LipschitzMap,
    MapError,
    PreconditionError,
    ScaleParams,
    compose,
    lipschitz_constant,
    lipschitz_witness,
    restrict,
)
from .metric_space import FiniteMetricSpace, PointSubset, subspace
from .scalar import common_denominator

logger = logging.getLogger(__name__)

SearchStatus = Literal["found", "not_homotopic", "budget_exceeded"]


@dataclass(frozen=True)
class Homotopy:
    """Frames F_0 .. F_m together with the (s, r) they are claimed to satisfy."""

    frames: tuple[LipschitzMap, ...]
    params: ScaleParams

    def __post_init__(self):
        if not self.frames:
            raise PreconditionError("a homotopy needs at least one frame")

    @property
    def length(self) -> int:
        return len(self.frames) - 1

    @property
    def domain(self) -> FiniteMetricSpace:
        return self.frames[0].domain

    @property
    def codomain(self) -> FiniteMetricSpace:
        return self.frames[0].codomain

    @property
    def start(self) -> LipschitzMap:
        return self.frames[0]

    @property
    def end(self) -> LipschitzMap:
        return self.frames[-1]

    def trajectory(self, i: int) -> list[int]:
        """Codomain path traced by domain point i."""
        return [frame.values[i] for frame in self.frames]


@dataclass(frozen=True)
class HomotopyVerdict:
    """
    Outcome of a homotopy search.

    Attributes
    ----------
    status : {"found", "not_homotopic", "budget_exceeded"}
    homotopy : Homotopy | None
        Shortest homotopy when found.
    states_visited : int
        Frames discovered by the search.
    reachable_size : int | None
        Size of the exhausted component when not homotopic.
    """

    status: SearchStatus
    homotopy: Optional[Homotopy] = None
    states_visited: int = 0
    reachable_size: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.status == "found"


def _as_frames(
    domain: FiniteMetricSpace, codomain: FiniteMetricSpace, rows: Sequence[Sequence[int]]
) -> tuple[LipschitzMap, ...]:
    return tuple(LipschitzMap(domain, codomain, tuple(row)) for row in rows)


def verify_homotopy(
    homotopy: Homotopy, f: LipschitzMap, g: LipschitzMap, params: Optional[ScaleParams] = None
) -> tuple[bool, list[str]]:
    """
    Check that `homotopy` is an (s, r)-homotopy from f to g.

    Returns (valid, violations); each violation names the frame or step and
    the points involved. Shape mismatches raise instead of being reported.
    """
    params = params or homotopy.params
    if f.domain != g.domain or f.codomain != g.codomain:
        raise PreconditionError("endpoint maps must share domain and codomain")
    for t, frame in enumerate(homotopy.frames):
        if frame.domain != f.domain or frame.codomain != f.codomain:
            raise PreconditionError(f"frame {t} has a different domain or codomain than the endpoint maps")

    labels = f.domain.point_ids
    dy = f.codomain.dist
    violations = []
    for t, frame in enumerate(homotopy.frames):
        lip, pair = lipschitz_witness(frame)
        if lip > params.s:
            a, b = pair
            violations.append(
                f"frame {t} is not {params.s}-Lipschitz: ratio {lip} at ({labels[a]}, {labels[b]})"
            )
    for t in range(homotopy.length):
        before, after = homotopy.frames[t].values, homotopy.frames[t + 1].values
        for i in range(f.domain.size):
            gap = dy[before[i]][after[i]]
            if gap > params.r:
                violations.append(f"step {t}->{t + 1} moves {labels[i]} by {gap} > r = {params.r}")
    if homotopy.start.values != f.values:
        violations.append("first frame differs from the start map")
    if homotopy.end.values != g.values:
        violations.append("last frame differs from the end map")
    return not violations, violations


class FrameGraph:
    """
    Implicit graph of s-Lipschitz maps with edges of pointwise gap <= r.

    All distances are scaled to integers by a common denominator. A frame is
    a tuple of codomain indices, one per domain point.
    """

    def __init__(self, dy, tether, r_scaled: int):
        self._dy = dy
        self._tether = tether
        self._r = r_scaled
        ny = len(dy)
        self._diam = max((max(row) for row in dy), default=0)
        self._balls = tuple(
            tuple(y2 for y2 in range(ny) if dy[y][y2] <= r_scaled) for y in range(ny)
        )
        self._everything = tuple(range(ny))
        # Only pairs whose tether is below the codomain diameter constrain anything.
        self._partners = tuple(
            tuple(j for j in range(i) if tether[i][j] < self._diam) for i in range(len(tether))
        )

    @classmethod
    def for_spaces(cls, domain: FiniteMetricSpace, codomain: FiniteMetricSpace, params: ScaleParams):
        s, r = params.s, params.r
        tethers = [s * domain.dist[i][j] for i in range(domain.size) for j in range(domain.size)]
        ydenom, _ = codomain.scaled
        denom = common_denominator(tethers + [r, Fraction(1, ydenom)])
        dy = tuple(tuple(int(v * denom) for v in row) for row in codomain.dist)
        tether = tuple(
            tuple(int(s * domain.dist[i][j] * denom) for j in range(domain.size))
            for i in range(domain.size)
        )
        return cls(dy, tether, int(r * denom))

    @property
    def size(self) -> int:
        return len(self._tether)

    def restricted(self, block: Sequence[int]) -> "FrameGraph":
        tether = tuple(tuple(self._tether[i][j] for j in block) for i in block)
        return FrameGraph(self._dy, tether, self._r)

    def blocks(self) -> list[list[int]]:
        """Groups of domain points coupled by binding tethers."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.size))
        graph.add_edges_from((i, j) for i in range(self.size) for j in self._partners[i])
        return sorted(sorted(c) for c in nx.connected_components(graph))

    def is_frame(self, values: Sequence[int]) -> bool:
        dy, tether = self._dy, self._tether
        return all(
            dy[values[i]][values[j]] <= tether[i][j]
            for i in range(len(values))
            for j in self._partners[i]
        )

    def _assignments(self, candidates) -> Iterator[tuple[int, ...]]:
        n = self.size
        chosen = [0] * n
        dy, tether, partners = self._dy, self._tether, self._partners

        def backtrack(i):
            if i == n:
                yield tuple(chosen)
                return
            bound = tether[i]
            for c in candidates(i):
                row = dy[c]
                if all(row[chosen[j]] <= bound[j] for j in partners[i]):
                    chosen[i] = c
                    yield from backtrack(i + 1)

        return backtrack(0)

    def neighbors(self, values: Sequence[int]) -> Iterator[tuple[int, ...]]:
        """Frames within r of `values` pointwise, in lexicographic order."""
        balls = self._balls
        return self._assignments(lambda i: balls[values[i]])

    def all_frames(self) -> Iterator[tuple[int, ...]]:
        everything = self._everything
        return self._assignments(lambda i: everything)


def _walk(parents: dict, node) -> list:
    path = []
    while node is not None:
        path.append(node)
        node = parents[node][0]
    return path


def _bidirectional_search(graph: FrameGraph, start: tuple, goal: tuple, budget: int):
    """
    Level-synchronous bidirectional BFS, expanding the smaller frontier.

    Returns (status, path, visited, reachable). A finished level keeps the
    meeting point with the smallest total length, so paths are shortest.
    """
    if start == goal:
        return "found", [start], 1, None
    parents = ({start: (None, 0)}, {goal: (None, 0)})
    frontiers = ([start], [goal])
    visited = 2
    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        own, other = parents[side], parents[1 - side]
        best, best_len = None, None
        expansion = []
        for node in frontiers[side]:
            depth = own[node][1] + 1
            for nb in graph.neighbors(node):
                if nb in own:
                    continue
                own[nb] = (node, depth)
                visited += 1
                if visited > budget:
                    return "budget_exceeded", None, visited, None
                expansion.append(nb)
                if nb in other:
                    total = depth + other[nb][1]
                    if best is None or total < best_len:
                        best, best_len = nb, total
        if best is not None:
            path = _walk(parents[0], best)[::-1] + _walk(parents[1], best)[1:]
            return "found", path, visited, None
        frontiers[side][:] = expansion
    exhausted = 0 if not frontiers[0] else 1
    return "not_homotopic", None, visited, len(parents[exhausted])


def check_endpoints(f: LipschitzMap, g: LipschitzMap, params: ScaleParams) -> None:
    """Raise PreconditionError unless f, g share spaces and are both s-Lipschitz."""
    if f.domain != g.domain or f.codomain != g.codomain:
        logger.error("endpoint maps do not share domain and codomain")
        raise PreconditionError("maps must share domain and codomain")
    for name, m in (("f", f), ("g", g)):
        lip = lipschitz_constant(m)
        if lip > params.s:
            logger.error(f"{name} has Lipschitz constant {lip} above s = {params.s}")
            raise PreconditionError(f"{name} has Lipschitz constant {lip} > s = {params.s}")


def find_homotopy(
    f: LipschitzMap, g: LipschitzMap, params: ScaleParams, budget: int = DEFAULT_BUDGET
) -> HomotopyVerdict:
    """
    Search for a shortest (s, r)-homotopy from f to g.

    Domain points split into blocks that no binding tether connects; each
    block is searched on its own and the per-block paths are padded to a
    common length. `not_homotopic` is only reported after a whole reachable
    component was exhausted.

    Raises:
        PreconditionError: mismatched spaces or an endpoint that is not
            s-Lipschitz.
    """
    check_endpoints(f, g, params)
    if f.values == g.values:
        return HomotopyVerdict("found", Homotopy((f,), params), states_visited=1)

    graph = FrameGraph.for_spaces(f.domain, f.codomain, params)
    blocks = sorted(graph.blocks(), key=lambda b: (len(b), b))
    visited_total = 0
    paths = []
    for block in blocks:
        start = tuple(f.values[i] for i in block)
        goal = tuple(g.values[i] for i in block)
        sub = graph if len(block) == graph.size else graph.restricted(block)
        status, path, visited, reachable = _bidirectional_search(sub, start, goal, budget - visited_total)
        visited_total += visited
        if status != "found":
            logger.debug(f"block {block}: {status} after {visited_total} states (s={params.s}, r={params.r})")
            return HomotopyVerdict(status, states_visited=visited_total, reachable_size=reachable)
        paths.append((block, path))

    m = max(len(path) for _, path in paths) - 1
    rows = [[0] * f.domain.size for _ in range(m + 1)]
    for block, path in paths:
        for t in range(m + 1):
            frame = path[min(t, len(path) - 1)]
            for pos, i in enumerate(block):
                rows[t][i] = frame[pos]
    homotopy = Homotopy(_as_frames(f.domain, f.codomain, rows), params)
    logger.debug(f"found homotopy of length {m} over {len(blocks)} blocks, {visited_total} states")
    return HomotopyVerdict("found", homotopy, states_visited=visited_total)


def oracle_homotopy(f: LipschitzMap, g: LipschitzMap, params: ScaleParams) -> HomotopyVerdict:
    """Brute force: materialise every s-Lipschitz frame and run networkx BFS."""
    check_endpoints(f, g, params)
    graph = FrameGraph.for_spaces(f.domain, f.codomain, params)
    frames = list(graph.all_frames())
    dy, r = graph._dy, graph._r
    explicit = nx.Graph()
    explicit.add_nodes_from(frames)
    for a in range(len(frames)):
        for b in range(a + 1, len(frames)):
            if all(dy[u][v] <= r for u, v in zip(frames[a], frames[b])):
                explicit.add_edge(frames[a], frames[b])
    try:
        path = nx.shortest_path(explicit, f.values, g.values)
    except nx.NetworkXNoPath:
        reachable = len(nx.node_connected_component(explicit, f.values))
        return HomotopyVerdict("not_homotopic", states_visited=len(frames), reachable_size=reachable)
    return HomotopyVerdict(
        "found", Homotopy(_as_frames(f.domain, f.codomain, path), params), states_visited=len(frames)
    )


# ---------------------------------------------------------------------------
# Homotopy algebra
# ---------------------------------------------------------------------------


def reverse(homotopy: Homotopy) -> Homotopy:
    return Homotopy(homotopy.frames[::-1], homotopy.params)


def extend(homotopy: Homotopy, m: int) -> Homotopy:
    """Pad with copies of the last frame up to length m."""
    if m < homotopy.length:
        raise ValueError(f"cannot shorten a homotopy of length {homotopy.length} to {m}")
    padding = (homotopy.end,) * (m - homotopy.length)
    return Homotopy(homotopy.frames + padding, homotopy.params)


def concatenate(first: Homotopy, second: Homotopy) -> Homotopy:
    """f ~ g followed by g ~ h; the result carries the larger s and r."""
    if first.domain != second.domain:
        raise MapError("concatenated homotopies must share their domain")
    if first.codomain != second.codomain:
        raise MapError("concatenated homotopies must share their codomain")
    if first.end.values != second.start.values:
        raise PreconditionError("second homotopy must start where the first one ends")
    params = ScaleParams(max(first.params.s, second.params.s), max(first.params.r, second.params.r))
    return Homotopy(first.frames + second.frames[1:], params)


def restrict_homotopy(homotopy: Homotopy, indices: Sequence[int]) -> Homotopy:
    """Restriction of every frame to the induced subspace on `indices`."""
    chosen = PointSubset(homotopy.domain, tuple(indices)).indices
    return Homotopy(tuple(restrict(frame, chosen) for frame in homotopy.frames), homotopy.params)


def compose_homotopy_left(
    h: LipschitzMap, homotopy: Homotopy, params: Optional[ScaleParams] = None
) -> Homotopy:
    """h after every frame; a Lipschitz-k map scales both s and r by k."""
    if params is None:
        k = lipschitz_constant(h)
        params = ScaleParams(homotopy.params.s * k, homotopy.params.r * k)
    return Homotopy(tuple(compose(h, frame) for frame in homotopy.frames), params)


def compose_homotopy_right(
    homotopy: Homotopy, f: LipschitzMap, params: Optional[ScaleParams] = None
) -> Homotopy:
    """Every frame after f; r is unchanged, s scales by Lip(f)."""
    if params is None:
        params = ScaleParams(homotopy.params.s * lipschitz_constant(f), homotopy.params.r)
    return Homotopy(tuple(compose(frame, f) for frame in homotopy.frames), params)


def interleave_homotopy(
    outer: Homotopy, inner: Homotopy, params: Optional[ScaleParams] = None
) -> Homotopy:
    """
    K_j = outer_j after inner_j, after padding both to the same length.

    With outer an (s1, r)-homotopy and inner an (s2, r)-homotopy, K is an
    (s1 * s2, (s1 + 1) * r)-homotopy between the composites of the ends.
    """
    m = max(outer.length, inner.length)
    outer, inner = extend(outer, m), extend(inner, m)
    if params is None:
        s1 = outer.params.s
        r = max(outer.params.r, inner.params.r)
        params = ScaleParams(s1 * inner.params.s, (s1 + 1) * r)
    frames = tuple(compose(o, i) for o, i in zip(outer.frames, inner.frames))
    return Homotopy(frames, params)


def path_homotopy(
    domain: FiniteMetricSpace, codomain: FiniteMetricSpace, path: Sequence[int], r
) -> Homotopy:
    """Constant frames following a codomain r-path; every frame is 0-Lipschitz."""
    if not path:
        raise ValueError("path must contain at least one point")
    rows = [[y] * domain.size for y in path]
    return Homotopy(_as_frames(domain, codomain, rows), ScaleParams(0, r))
