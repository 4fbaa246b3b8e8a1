"""
Discrete category invariants at scale r.

cat_r(X) is the least k such that X is covered by k + 1 subsets each
r-contractible in X; cat_r(f) covers the domain of f by subsets on which f
is homotopic to a constant; TC_r(X) covers X x X by subsets admitting
r-path-valued motion plans. All three reduce to `cover_distance` with a
different subset decider.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Sequence

from .config import DEFAULT_BUDGET, DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_PRODUCT_METRIC
from .distance import (
    DistanceResult,
    SubsetDecider,
    SubsetDecision,
    cover_distance,
    homotopic_distance,
)
from .homotopy_search import (
    Homotopy,
    HomotopyVerdict,
    concatenate,
    extend,
    find_homotopy,
    path_homotopy,
    verify_homotopy,
)
from .lipschitz_maps import (
    LipschitzMap,
    PreconditionError,
    ScaleParams,
    axis_inclusion,
    constant,
    identity,
    lipschitz_constant,
    projection,
    restrict,
)
from .metric_space import FiniteMetricSpace, is_r_connected, is_r_path, product, shortest_r_path
from .scalar import parse_scalar

logger = logging.getLogger(__name__)

Method = Literal["by-definition", "via-distance"]


@dataclass(frozen=True)
class MotionPlan:
    """
    r-paths for the pairs of one cover element of X x X.

    Attributes
    ----------
    subset : tuple[int, ...]
        Indices into X x X; index k stands for the pair (k // |X|, k % |X|).
    paths : tuple[tuple[int, ...], ...]
        paths[i] runs from the first to the second point of subset[i]; all
        paths share one horizon.
    """

    subset: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]

    @property
    def horizon(self) -> int:
        return len(self.paths[0]) - 1 if self.paths else 0


@dataclass(frozen=True)
class InvariantResult:
    """A category-type invariant with its certificate."""

    result: DistanceResult
    method: Method
    plans: tuple[MotionPlan, ...] = ()

    @property
    def status(self) -> str:
        return self.result.status

    @property
    def value(self) -> Optional[int]:
        return self.result.value

    def display(self) -> str:
        return self.result.display()


def r_path(space: FiniteMetricSpace, x: int, y: int, r) -> Optional[list[int]]:
    """Shortest r-path from x to y in `space`, or None."""
    return shortest_r_path(space, x, y, r)


class ConstantTargetDecider(SubsetDecider):
    """
    U is good when f restricted to U is (s, r)-homotopic to a constant map.

    One search against c_{f(min U)} settles the question: any homotopy to
    some c_y can be continued along the trajectory of min U back to
    f(min U). Stored witnesses always end at that canonical constant.
    """

    def __init__(self, f: LipschitzMap, params: ScaleParams, budget: int = DEFAULT_BUDGET):
        super().__init__(f.domain.size, budget)
        self.f, self.params = f, params

    def target(self, indices: Sequence[int]) -> LipschitzMap:
        f_u = restrict(self.f, indices)
        return constant(f_u.domain, f_u.codomain, self.f.values[min(indices)])

    def _search(self, indices: tuple[int, ...]) -> SubsetDecision:
        f_u = restrict(self.f, indices)
        if len(indices) == 1:
            return SubsetDecision("good", Homotopy((f_u,), self.params))
        verdict = find_homotopy(f_u, self.target(indices), self.params, self.budget)
        if verdict.found:
            return SubsetDecision("good", verdict.homotopy)
        return SubsetDecision("bad" if verdict.status == "not_homotopic" else "unknown")

    def _restrict(self, witness: Homotopy, superset: frozenset, subset: frozenset) -> Homotopy:
        restricted = super()._restrict(witness, superset, subset)
        back = restricted.trajectory(0)[::-1]
        retarget = path_homotopy(restricted.domain, restricted.codomain, back, self.params.r)
        return Homotopy(concatenate(restricted, retarget).frames, self.params)


def _constant_cover(f: LipschitzMap, params: ScaleParams, budget: int, exhaustive_limit: int) -> DistanceResult:
    decider = ConstantTargetDecider(f, params, budget)
    return cover_distance(f.domain, decider, params, exhaustive_limit)


def cat_space(
    space: FiniteMetricSpace,
    r,
    budget: int = DEFAULT_BUDGET,
    method: Method = "by-definition",
    base_point: int = 0,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> InvariantResult:
    """
    cat_r(X), by covering with r-contractible subsets or as D_r(id, c_x0).

    Raises:
        PreconditionError: the via-distance method on a space that is not
            r-connected.
    """
    params = ScaleParams(1, r)
    if method == "by-definition":
        return InvariantResult(_constant_cover(identity(space), params, budget, exhaustive_limit), method)
    if method == "via-distance":
        connected, components = is_r_connected(space, params.r)
        if not connected:
            logger.error(f"space splits into {len(components)} r-components at r={params.r}")
            raise PreconditionError(f"space is not {params.r}-connected ({len(components)} r-components)")
        result = homotopic_distance(
            identity(space), constant(space, space, base_point), params, budget, exhaustive_limit
        )
        return InvariantResult(result, method)
    raise ValueError(f"unknown method {method!r}")


def cat_map(
    f: LipschitzMap,
    r,
    s=None,
    budget: int = DEFAULT_BUDGET,
    method: Method = "by-definition",
    base_point: int = 0,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> InvariantResult:
    """
    cat_r(f) at scale s (default Lip(f)).

    The via-distance method computes D_r(f, c_y) with y = f(base_point) and
    needs an r-connected codomain.
    """
    params = ScaleParams(lipschitz_constant(f) if s is None else s, r)
    if method == "by-definition":
        return InvariantResult(_constant_cover(f, params, budget, exhaustive_limit), method)
    if method == "via-distance":
        connected, components = is_r_connected(f.codomain, params.r)
        if not connected:
            logger.error(f"codomain splits into {len(components)} r-components at r={params.r}")
            raise PreconditionError(f"codomain is not {params.r}-connected")
        target = constant(f.domain, f.codomain, f.values[base_point])
        return InvariantResult(homotopic_distance(f, target, params, budget, exhaustive_limit), method)
    raise ValueError(f"unknown method {method!r}")


def is_r_contractible(space: FiniteMetricSpace, r, budget: int = DEFAULT_BUDGET) -> HomotopyVerdict:
    """Search for a (1, r)-homotopy from id_X to the constant map at point 0."""
    params = ScaleParams(1, r)
    connected, components = is_r_connected(space, params.r)
    if not connected:
        logger.info(f"not r-contractible: {len(components)} r-components at r={params.r}")
        return HomotopyVerdict("not_homotopic")
    return find_homotopy(identity(space), constant(space, space, 0), params, budget)


# ---------------------------------------------------------------------------
# Topological complexity
# ---------------------------------------------------------------------------


def _plans_from_witnesses(result: DistanceResult) -> tuple[MotionPlan, ...]:
    if not result.witnesses:
        return ()
    horizon = max(w.length for w in result.witnesses)
    plans = []
    for subset, witness in zip(result.cover, result.witnesses):
        witness = extend(witness, horizon)
        paths = tuple(tuple(witness.trajectory(i)) for i in range(len(subset)))
        plans.append(MotionPlan(tuple(subset), paths))
    return tuple(plans)


def verify_motion_plan(
    plan: MotionPlan,
    space: FiniteMetricSpace,
    r,
    product_metric: str = DEFAULT_PRODUCT_METRIC,
    square: Optional[FiniteMetricSpace] = None,
) -> tuple[bool, list[str]]:
    """
    Check endpoints, r-steps, and 1-Lipschitz dependence on the pair.

    Paths are compared in the uniform metric max_j d(a_j, b_j) against the
    product distance of their pairs.
    """
    params = ScaleParams(0, r)
    square = square if square is not None else product(space, space, product_metric)
    n, labels = space.size, square.point_ids
    violations = []
    if len(plan.paths) != len(plan.subset):
        return False, [f"{len(plan.paths)} paths for {len(plan.subset)} pairs"]
    if len({len(p) for p in plan.paths}) > 1:
        violations.append("paths do not share a common horizon")
    for k, path in zip(plan.subset, plan.paths):
        x, y = divmod(k, n)
        if path[0] != x or path[-1] != y:
            violations.append(f"path for {labels[k]} does not run from its first to its second point")
        if not is_r_path(space, path, params.r):
            violations.append(f"path for {labels[k]} has a step longer than r = {params.r}")
    for a in range(len(plan.subset)):
        for b in range(a + 1, len(plan.subset)):
            pa, pb = plan.paths[a], plan.paths[b]
            uniform = max(space.dist[u][v] for u, v in zip(pa, pb))
            bound = square.dist[plan.subset[a]][plan.subset[b]]
            if uniform > bound:
                violations.append(
                    f"paths for {labels[plan.subset[a]]} and {labels[plan.subset[b]]} are {uniform} apart, "
                    f"more than their distance {bound}"
                )
    return not violations, violations


def _check_plans(plans, space, r, product_metric, square) -> None:
    for plan in plans:
        ok, problems = verify_motion_plan(plan, space, r, product_metric, square)
        if not ok:
            logger.error(f"motion plan failed verification: {problems}")
            raise RuntimeError(f"motion plan failed verification: {problems[0]}")


def tc_space(
    space: FiniteMetricSpace,
    r,
    product_metric: str = DEFAULT_PRODUCT_METRIC,
    budget: int = DEFAULT_BUDGET,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> InvariantResult:
    """TC_r(X) as D_r(p1, p2) on X x X, with witnesses turned into motion plans."""
    square = product(space, space, product_metric)
    params = ScaleParams(1, r)
    result = homotopic_distance(projection(square, 1), projection(square, 2), params, budget, exhaustive_limit)
    plans = _plans_from_witnesses(result)
    _check_plans(plans, space, params.r, product_metric, square)
    return InvariantResult(result, "via-distance", plans)


@dataclass(frozen=True)
class SectionSearch:
    """Outcome of a motion plan search over one subset of X x X."""

    status: Literal["found", "none", "budget_exceeded"]
    plan: Optional[MotionPlan] = None
    states_visited: int = 0


def find_motion_plan(
    space: FiniteMetricSpace,
    subset: Sequence[int],
    r,
    square: FiniteMetricSpace,
    budget: int = DEFAULT_BUDGET,
) -> SectionSearch:
    """
    Motion plan for the pairs in `subset`, built from uniform-length r-paths.

    A state holds the current point of every path. Each time step extends
    the paths pair by pair, backtracking over the r-ball of the current
    point and keeping each new point within the product distance of the
    points already placed, so the plan depends 1-Lipschitz on the pair. The
    horizon grows one step at a time; once a step adds no new state the
    subset has no plan.
    """
    n = space.size
    r = parse_scalar(r)
    subset = tuple(subset)
    pairs = [divmod(k, n) for k in subset]
    start, goal = tuple(x for x, _ in pairs), tuple(y for _, y in pairs)
    bound = [[square.dist[a][b] for b in subset] for a in subset]
    ball = [[j for j in range(n) if space.dist[i][j] <= r] for i in range(n)]

    def successors(state: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        chosen: list[int] = []

        def place(i: int) -> Iterator[tuple[int, ...]]:
            if i == len(state):
                yield tuple(chosen)
                return
            for p in ball[state[i]]:
                if all(space.dist[p][chosen[j]] <= bound[i][j] for j in range(i)):
                    chosen.append(p)
                    yield from place(i + 1)
                    chosen.pop()

        yield from place(0)

    parent: dict[tuple[int, ...], Optional[tuple[int, ...]]] = {start: None}
    frontier = [start]
    while goal not in parent:
        if not frontier:
            return SectionSearch("none", states_visited=len(parent))
        next_frontier = []
        for state in frontier:
            for nxt in successors(state):
                if nxt not in parent:
                    parent[nxt] = state
                    next_frontier.append(nxt)
            if len(parent) > budget:
                return SectionSearch("budget_exceeded", states_visited=len(parent))
        frontier = next_frontier

    states = [goal]
    while parent[states[-1]] is not None:
        states.append(parent[states[-1]])
    states.reverse()
    paths = tuple(tuple(state[i] for state in states) for i in range(len(subset)))
    return SectionSearch("found", MotionPlan(subset, paths), len(parent))


def plan_homotopy(plan: MotionPlan, square: FiniteMetricSpace, r) -> Homotopy:
    """The (1, r)-homotopy from p1|U to p2|U whose frame t sends each pair to its path's point at time t."""
    p1_u = restrict(projection(square, 1), plan.subset)
    frames = tuple(
        LipschitzMap(p1_u.domain, p1_u.codomain, tuple(path[t] for path in plan.paths))
        for t in range(plan.horizon + 1)
    )
    return Homotopy(frames, ScaleParams(1, r))


def _check_sections(plans, square, params: ScaleParams) -> None:
    p1, p2 = projection(square, 1), projection(square, 2)
    for plan in plans:
        ok, problems = verify_homotopy(
            plan_homotopy(plan, square, params.r), restrict(p1, plan.subset), restrict(p2, plan.subset), params
        )
        if not ok:
            logger.error(f"section homotopy failed verification: {problems}")
            raise RuntimeError(f"section homotopy failed verification: {problems[0]}")


class SectionDecider(SubsetDecider):
    """A subset of X x X is good when `find_motion_plan` finds a plan for it."""

    def __init__(self, space, square, params, product_metric, budget):
        super().__init__(square.size, budget)
        self.space, self.square, self.params, self.product_metric = space, square, params, product_metric

    def _search(self, indices):
        found = find_motion_plan(self.space, indices, self.params.r, self.square, self.budget)
        if found.status == "none":
            return SubsetDecision("bad")
        if found.status == "budget_exceeded":
            logger.info(f"budget exhausted planning {list(indices)} after {found.states_visited} states")
            return SubsetDecision("unknown")
        _check_plans([found.plan], self.space, self.params.r, self.product_metric, self.square)
        return SubsetDecision("good", plan_homotopy(found.plan, self.square, self.params.r))


def tc_by_sections(
    space: FiniteMetricSpace,
    r,
    product_metric: str = DEFAULT_PRODUCT_METRIC,
    budget: int = DEFAULT_BUDGET,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> InvariantResult:
    """
    TC_r(X) from covers of X x X by subsets carrying motion plans.

    Plans are searched directly rather than through D_r(p1, p2); every plan
    in the final cover is checked both as a motion plan and, turned into a
    homotopy, against p1 and p2 restricted to its subset.
    """
    square = product(space, space, product_metric)
    params = ScaleParams(1, r)
    decider = SectionDecider(space, square, params, product_metric, budget)
    result = cover_distance(square, decider, params, exhaustive_limit)
    plans = _plans_from_witnesses(result)
    _check_plans(plans, space, params.r, product_metric, square)
    _check_sections(plans, square, params)
    return InvariantResult(result, "by-definition", plans)


def category_chain(
    space: FiniteMetricSpace,
    r,
    base_point: int = 0,
    product_metric: str = DEFAULT_PRODUCT_METRIC,
    budget: int = DEFAULT_BUDGET,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> dict[str, DistanceResult]:
    """
    Every term that should equal cat_r(X) on an r-connected space.

    Keys: "cat", "id_vs_constant", "axis1_vs_constant", "axis2_vs_constant",
    "axis1_vs_axis2".
    """
    params = ScaleParams(1, r)
    square = product(space, space, product_metric)
    axis1 = axis_inclusion(space, base_point, 1, square=square)
    axis2 = axis_inclusion(space, base_point, 2, square=square)
    corner = constant(space, square, base_point * space.size + base_point)

    def distance(f, g):
        return homotopic_distance(f, g, params, budget, exhaustive_limit)

    return {
        "cat": cat_space(space, r, budget, "by-definition", base_point, exhaustive_limit).result,
        "id_vs_constant": distance(identity(space), constant(space, space, base_point)),
        "axis1_vs_constant": distance(axis1, corner),
        "axis2_vs_constant": distance(axis2, corner),
        "axis1_vs_axis2": distance(axis1, axis2),
    }


def verify_constant_cover(result: DistanceResult, f: LipschitzMap) -> tuple[bool, list[str]]:
    """Check a by-definition cat certificate: each piece contracts to c_{f(min U)}."""
    violations = []
    for subset, witness in zip(result.cover, result.witnesses):
        f_u = restrict(f, subset)
        target = constant(f_u.domain, f_u.codomain, f.values[min(subset)])
        ok, problems = verify_homotopy(witness, f_u, target, result.params)
        if not ok:
            violations.extend(f"on {list(subset)}: {p}" for p in problems)
    return not violations, violations
