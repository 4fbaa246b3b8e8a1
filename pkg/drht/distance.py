"""
Discrete homotopic distance D_r(f, g).

D_r(f, g) is the least k such that the domain is covered by k + 1 "good"
subsets, i.e. subsets on which the restrictions of f and g are
(s, r)-homotopic; it is infinite when some singleton is not good. Good
subsets are closed under taking subsets, which the subset cache exploits:
a restricted witness proves every subset of a good set good.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Literal, Optional, Sequence

import networkx as nx

from .config import DEFAULT_BUDGET, DEFAULT_EXHAUSTIVE_LIMIT
from .homotopy_search import (
    FrameGraph,
    Homotopy,
    check_endpoints,
    extend,
    find_homotopy,
    oracle_homotopy,
    path_homotopy,
    restrict_homotopy,
    verify_homotopy,
)
from .lipschitz_maps import LipschitzMap, ScaleParams, restrict
from .metric_space import FiniteMetricSpace, shortest_r_path
from .scalar import parse_scalar

logger = logging.getLogger(__name__)

DecisionStatus = Literal["good", "bad", "unknown"]
DistanceStatus = Literal["finite", "infinite", "bounded"]


@dataclass(frozen=True)
class SubsetDecision:
    status: DecisionStatus
    witness: Optional[Homotopy] = None

    @property
    def good(self) -> bool:
        return self.status == "good"


@dataclass(frozen=True)
class DistanceResult:
    """
    Value of D_r together with the evidence for it.

    Attributes
    ----------
    status : {"finite", "infinite", "bounded"}
    params : ScaleParams
    value : int | None
        D_r when finite.
    lower, upper : int | None
        Bounds when some subset decision ran out of budget.
    cover : tuple[tuple[int, ...], ...]
        Good subsets (domain indices) covering the domain.
    witnesses : tuple[Homotopy, ...]
        One witness per cover element, defined on the induced subspace.
    bad_point : int | None
        Singleton that is not good when infinite.
    reason : str
    """

    status: DistanceStatus
    params: ScaleParams
    value: Optional[int] = None
    lower: Optional[int] = None
    upper: Optional[int] = None
    cover: tuple[tuple[int, ...], ...] = ()
    witnesses: tuple[Homotopy, ...] = ()
    bad_point: Optional[int] = None
    reason: str = ""

    def bounds(self) -> tuple[float, float]:
        """(lower, upper) with infinity as math.inf, for law comparisons."""
        if self.status == "finite":
            return self.value, self.value
        if self.status == "infinite":
            return math.inf, math.inf
        return self.lower, self.upper

    def display(self) -> str:
        if self.status == "finite":
            return str(self.value)
        if self.status == "infinite":
            return "inf"
        return f"[{self.lower},{self.upper}]"


class SubsetDecider:
    """
    Memoized good/bad/unknown decisions for subsets of one domain.

    Good sets are stored with their witness and answer every subset query by
    restriction; bad sets (decided by an exhausted search) answer every
    superset query. Subclasses implement `_search` and may override
    `_restrict` when restricting a witness needs more than dropping points.
    """

    def __init__(self, size: int, budget: int = DEFAULT_BUDGET):
        self.size = size
        self.budget = budget
        self.searches = 0
        self.cache_hits = 0
        self._good: dict[frozenset, Homotopy] = {}
        self._bad: list[frozenset] = []
        self._unknown: set[frozenset] = set()

    def _search(self, indices: tuple[int, ...]) -> SubsetDecision:
        raise NotImplementedError

    def _restrict(self, witness: Homotopy, superset: frozenset, subset: frozenset) -> Homotopy:
        order = sorted(superset)
        return restrict_homotopy(witness, [order.index(i) for i in sorted(subset)])

    def decide(self, subset: Iterable[int]) -> SubsetDecision:
        key = frozenset(subset)
        if not key:
            raise ValueError("cannot decide the empty subset")
        if key in self._good:
            self.cache_hits += 1
            return SubsetDecision("good", self._good[key])
        for superset, witness in self._good.items():
            if key < superset:
                self.cache_hits += 1
                restricted = self._restrict(witness, superset, key)
                self._good[key] = restricted
                return SubsetDecision("good", restricted)
        for bad in self._bad:
            if bad <= key:
                self.cache_hits += 1
                return SubsetDecision("bad")
        if key in self._unknown:
            return SubsetDecision("unknown")

        self.searches += 1
        decision = self._search(tuple(sorted(key)))
        if decision.status == "good":
            self._good[key] = decision.witness
        elif decision.status == "bad":
            self._bad.append(key)
        else:
            self._unknown.add(key)
        return decision

    def known_good(self) -> dict[frozenset, Homotopy]:
        return dict(self._good)


class PairDecider(SubsetDecider):
    """Good subsets for a pair of maps f, g at fixed (s, r)."""

    def __init__(self, f: LipschitzMap, g: LipschitzMap, params: ScaleParams, budget: int = DEFAULT_BUDGET):
        super().__init__(f.domain.size, budget)
        self.f, self.g, self.params = f, g, params
        graph = FrameGraph.for_spaces(f.domain, f.codomain, params)
        self._blocks = [frozenset(b) for b in graph.blocks()]

    def inherit(self, previous: "PairDecider") -> None:
        """Reuse witnesses found at a smaller r; they remain valid at ours."""
        for key, witness in previous.known_good().items():
            self._good.setdefault(key, Homotopy(witness.frames, self.params))

    def decide(self, subset: Iterable[int]) -> SubsetDecision:
        key = frozenset(subset)
        parts = [key & block for block in self._blocks if key & block]
        if len(parts) <= 1:
            return super().decide(key)
        # Uncoupled blocks are decided separately and glued back together.
        decisions = [super(PairDecider, self).decide(part) for part in parts]
        for status in ("bad", "unknown"):
            if any(d.status == status for d in decisions):
                return SubsetDecision(status)
        return SubsetDecision("good", self._glue(key, parts, [d.witness for d in decisions]))

    def _glue(self, key: frozenset, parts, witnesses) -> Homotopy:
        order = sorted(key)
        position = {i: p for p, i in enumerate(order)}
        m = max(w.length for w in witnesses)
        rows = [[0] * len(order) for _ in range(m + 1)]
        for part, witness in zip(parts, witnesses):
            witness = extend(witness, m)
            for pos_in_part, i in enumerate(sorted(part)):
                for t in range(m + 1):
                    rows[t][position[i]] = witness.frames[t].values[pos_in_part]
        f_u = restrict(self.f, order)
        frames = tuple(LipschitzMap(f_u.domain, f_u.codomain, tuple(row)) for row in rows)
        return Homotopy(frames, self.params)

    def _search(self, indices: tuple[int, ...]) -> SubsetDecision:
        f_u, g_u = restrict(self.f, indices), restrict(self.g, indices)
        if len(indices) == 1:
            path = shortest_r_path(self.f.codomain, f_u.values[0], g_u.values[0], self.params.r)
            if path is None:
                return SubsetDecision("bad")
            witness = path_homotopy(f_u.domain, f_u.codomain, path, self.params.r)
            return SubsetDecision("good", Homotopy(witness.frames, self.params))
        verdict = find_homotopy(f_u, g_u, self.params, self.budget)
        if verdict.found:
            return SubsetDecision("good", verdict.homotopy)
        if verdict.status == "not_homotopic":
            return SubsetDecision("bad")
        logger.info(f"budget exhausted deciding subset {list(indices)} after {verdict.states_visited} states")
        return SubsetDecision("unknown")


def is_good_subset(
    subset: Sequence[int],
    f: LipschitzMap,
    g: LipschitzMap,
    params: ScaleParams,
    budget: int = DEFAULT_BUDGET,
    decider: Optional[PairDecider] = None,
) -> SubsetDecision:
    """Decide whether f and g restricted to `subset` are (s, r)-homotopic."""
    check_endpoints(f, g, params)
    decider = decider or PairDecider(f, g, params, budget)
    return decider.decide(subset)


def minimum_cover(universe_size: int, family: Iterable[frozenset]) -> list[frozenset]:
    """
    Exact minimum set cover by branch and bound.

    The greedy cover gives the first upper bound; a branch is cut when the
    uncovered count divided by the largest set size cannot beat it. Larger
    sets are tried first, ties broken lexicographically.
    """
    sets = sorted(set(family), key=lambda s: (-len(s), sorted(s)))
    full = (1 << universe_size) - 1
    masks = [sum(1 << i for i in s) for s in sets]
    union = 0
    for mask in masks:
        union |= mask
    if union != full:
        raise ValueError("family does not cover the universe")

    covered, greedy = 0, []
    while covered != full:
        k = max(range(len(masks)), key=lambda k: ((masks[k] & ~covered).bit_count(), -k))
        greedy.append(k)
        covered |= masks[k]
    best = list(greedy)
    largest = max(m.bit_count() for m in masks)
    containing = [[k for k, mask in enumerate(masks) if mask >> i & 1] for i in range(universe_size)]

    def search(covered: int, chosen: list[int]):
        nonlocal best
        if covered == full:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        remaining = (full & ~covered).bit_count()
        if len(chosen) + -(-remaining // largest) >= len(best):
            return
        pivot = min(
            (i for i in range(universe_size) if not covered >> i & 1),
            key=lambda i: (len(containing[i]), i),
        )
        for k in containing[pivot]:
            chosen.append(k)
            search(covered | masks[k], chosen)
            chosen.pop()

    search(0, [])
    return [sets[k] for k in sorted(best)]


def cover_lower_bound(universe_size: int, bad_sets: Iterable[frozenset]) -> int:
    """
    Least cover size minus one allowed by a family of known bad subsets.

    Every good set avoids containing a bad one, so the maximal sets that
    avoid them form a family at least as rich as the good sets and its
    minimum cover can only be smaller.

    Raises:
        ValueError: a singleton is itself bad, so no cover exists.
    """
    bad = [sum(1 << i for i in s) for s in bad_sets]
    free = {mask for mask in range(1, 1 << universe_size) if not any(b & mask == b for b in bad)}
    maximal = [
        frozenset(i for i in range(universe_size) if mask >> i & 1)
        for mask in free
        if not any(mask | 1 << i in free for i in range(universe_size) if not mask >> i & 1)
    ]
    return len(minimum_cover(universe_size, maximal)) - 1


def _maximal_exhaustive(size: int, decide: Callable) -> tuple[list[frozenset], bool]:
    good: set[frozenset] = set()
    truncated = False

    def grow(current: tuple[int, ...], start: int):
        nonlocal truncated
        for x in range(start, size):
            candidate = current + (x,)
            decision = decide(candidate)
            if decision.good:
                good.add(frozenset(candidate))
                grow(candidate, x + 1)
            elif decision.status == "unknown":
                truncated = True

    grow((), 0)
    maximal = [
        s for s in good
        if not any(s | {x} in good for x in range(size) if x not in s)
    ]
    return maximal, truncated


def _maximal_seeded(space: FiniteMetricSpace, decide: Callable) -> tuple[list[frozenset], bool]:
    found: list[frozenset] = []
    truncated = False
    for seed in range(space.size):
        members = [seed]
        others = sorted((x for x in range(space.size) if x != seed), key=lambda x: (space.dist[seed][x], x))
        for x in others:
            decision = decide(members + [x])
            if decision.good:
                members.append(x)
            elif decision.status == "unknown":
                truncated = True
        key = frozenset(members)
        if key not in found:
            found.append(key)
    return found, truncated


def _conflict_clique(size: int, decide: Callable) -> int:
    """Largest set of points that are pairwise never good together."""
    conflicts = nx.Graph()
    conflicts.add_nodes_from(range(size))
    conflicts.add_edges_from(
        (i, j) for i, j in itertools.combinations(range(size), 2) if decide((i, j)).status == "bad"
    )
    clique, _ = nx.max_weight_clique(conflicts, weight=None)
    return len(clique)


def cover_distance(
    space: FiniteMetricSpace,
    decider: SubsetDecider,
    params: ScaleParams,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    describe_bad: Callable[[int], str] = lambda x: "singleton is not good",
) -> DistanceResult:
    """
    Minimal cover of `space` by subsets the decider calls good, minus one.

    Shared by D_r and by the category invariants, which only differ in how
    a subset is judged.
    """
    size = space.size
    for x in range(size):
        if decider.decide((x,)).status == "bad":
            reason = describe_bad(x)
            logger.info(f"D_r is infinite: {reason}")
            return DistanceResult("infinite", params, bad_point=x, reason=reason)

    everything = tuple(range(size))
    whole = decider.decide(everything)
    if whole.good:
        return DistanceResult("finite", params, value=0, cover=(everything,), witnesses=(whole.witness,))

    exact = size <= exhaustive_limit
    if exact:
        family, truncated = _maximal_exhaustive(size, decider.decide)
    else:
        family, truncated = _maximal_seeded(space, decider.decide)
    family = family + [frozenset((x,)) for x in range(size)]
    cover = minimum_cover(size, family)
    upper = len(cover) - 1

    if exact and not truncated:
        lower = upper
    else:
        lower = 0 if whole.status == "unknown" else 1
        if not truncated:
            lower = max(lower, _conflict_clique(size, decider.decide) - 1)

    cover_sets = tuple(tuple(sorted(s)) for s in cover)
    witnesses = tuple(decider.decide(s).witness for s in cover_sets)
    logger.debug(
        f"cover of {size} points: {len(cover)} sets, bounds [{lower},{upper}], "
        f"{decider.searches} searches, {decider.cache_hits} cache hits"
    )
    if lower == upper:
        return DistanceResult("finite", params, value=upper, cover=cover_sets, witnesses=witnesses)
    return DistanceResult(
        "bounded", params, lower=lower, upper=upper, cover=cover_sets, witnesses=witnesses,
        reason="search budget or seeded cover left the value undetermined",
    )


def homotopic_distance(
    f: LipschitzMap,
    g: LipschitzMap,
    params: ScaleParams,
    budget: int = DEFAULT_BUDGET,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    decider: Optional[PairDecider] = None,
) -> DistanceResult:
    """
    D_r(f, g) at the given (s, r) with a certificate.

    Raises:
        PreconditionError: mismatched spaces, or s below Lip(f) or Lip(g).
    """
    check_endpoints(f, g, params)
    decider = decider or PairDecider(f, g, params, budget)
    labels, ylabels = f.domain.point_ids, f.codomain.point_ids

    def describe_bad(x: int) -> str:
        return f"no r-path from {ylabels[f.values[x]]} to {ylabels[g.values[x]]} (point {labels[x]})"

    return cover_distance(f.domain, decider, params, exhaustive_limit, describe_bad)


@dataclass(frozen=True)
class SweepRow:
    r: Fraction
    result: DistanceResult


def dr_sweep(
    f: LipschitzMap,
    g: LipschitzMap,
    s,
    r_values: Sequence,
    budget: int = DEFAULT_BUDGET,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> list[SweepRow]:
    """
    D_r(f, g) for every r in ascending `r_values`.

    Good subsets found at one r are reused at the next, since a homotopy
    with smaller steps is also one with larger steps.
    """
    rs = [parse_scalar(r) for r in r_values]
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError(f"r values must be strictly increasing, got {[str(r) for r in rs]}")
    s = parse_scalar(s)
    rows, previous = [], None
    for r in rs:
        params = ScaleParams(s, r)
        decider = PairDecider(f, g, params, budget)
        if previous is not None:
            decider.inherit(previous)
        result = homotopic_distance(f, g, params, budget, exhaustive_limit, decider)
        logger.info(f"r={r}: D_r = {result.display()}")
        rows.append(SweepRow(r, result))
        previous = decider

    values = [row.result.value for row in rows]
    if all(row.result.status == "finite" for row in rows):
        for (r1, v1), (r2, v2) in zip(zip(rs, values), zip(rs[1:], values[1:])):
            if v2 > v1:
                raise RuntimeError(f"distance increased from {v1} at r={r1} to {v2} at r={r2}")
    return rows


def oracle_distance(f: LipschitzMap, g: LipschitzMap, params: ScaleParams) -> Optional[int]:
    """Brute-force D_r via explicit frame graphs; None stands for infinity."""
    check_endpoints(f, g, params)
    size = f.domain.size
    good = []
    for k in range(1, size + 1):
        for subset in itertools.combinations(range(size), k):
            if oracle_homotopy(restrict(f, subset), restrict(g, subset), params).found:
                good.append(frozenset(subset))
    if any(frozenset((x,)) not in good for x in range(size)):
        return None
    everything = frozenset(range(size))
    for k in range(1, size + 1):
        for combo in itertools.combinations(good, k):
            if frozenset().union(*combo) == everything:
                return k - 1
    return None


def verify_distance_certificate(
    result: DistanceResult, f: LipschitzMap, g: LipschitzMap
) -> tuple[bool, list[str]]:
    """Re-check a DistanceResult against the maps it claims to describe."""
    violations = []
    params = result.params
    if result.status == "infinite":
        x = result.bad_point
        if x is None or not 0 <= x < f.domain.size:
            return False, ["infinite result without a valid bad point"]
        if shortest_r_path(f.codomain, f.values[x], g.values[x], params.r) is not None:
            violations.append(f"point {f.domain.point_ids[x]} is joined by an r-path after all")
        return not violations, violations

    expected = result.value if result.status == "finite" else result.upper
    if len(result.cover) != expected + 1:
        violations.append(f"cover has {len(result.cover)} sets for a claimed value {expected}")
    covered = set().union(*map(set, result.cover)) if result.cover else set()
    missing = [f.domain.point_ids[x] for x in range(f.domain.size) if x not in covered]
    if missing:
        violations.append(f"cover misses {missing}")
    if len(result.witnesses) != len(result.cover):
        violations.append("cover and witness counts differ")
    for subset, witness in zip(result.cover, result.witnesses):
        ok, problems = verify_homotopy(witness, restrict(f, subset), restrict(g, subset), params)
        if not ok:
            violations.extend(f"on {list(subset)}: {p}" for p in problems)
    return not violations, violations
