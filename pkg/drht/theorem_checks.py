"""
Executable law suite.

Every law draws seeded random instances (small metric spaces and maps),
evaluates both sides, and records pass / fail / skip. An instance whose
hypotheses do not hold is skipped. Laws about D_r draw half their map pairs
from a holed family (winding maps around cycles of five or more points at a
step below the fill threshold) so that 0 < D_r < infinity actually occurs.

A law with fewer than `min_passes` passes is unexercised, and a distance law
with fewer than `min_nontrivial` nontrivial passes is starved. Both fail the
suite just like a counterexample does.

Instances are reproducible from (law id, seed, trial), so a failure can be
replayed with `drht laws --only ID --seed S --trials 1 --first-trial T`.
"""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal, Optional

from .config import (
    DEFAULT_BUDGET,
    DEFAULT_MIN_NONTRIVIAL,
    DEFAULT_MIN_PASSES,
    DEFAULT_PRODUCT_METRIC,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
)
from .distance import DistanceResult, homotopic_distance
from .homotopy_search import (
    FrameGraph,
    compose_homotopy_left,
    compose_homotopy_right,
    concatenate,
    find_homotopy,
    path_homotopy,
    verify_homotopy,
)
from .invariants import cat_map, cat_space, category_chain, tc_by_sections, tc_space
from .lipschitz_maps import (
    LipschitzMap,
    ScaleParams,
    compose,
    constant,
    identity,
    lipschitz_constant,
)
from .metric_space import (
    FiniteMetricSpace,
    build_space,
    is_r_connected,
    metric_closure,
    shortest_r_path,
)
from .scalar import format_scalar

logger = logging.getLogger(__name__)

OutcomeStatus = Literal["pass", "fail", "skip"]

_WEIGHTS = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))
# share of distance-law trials drawn from the holed family
HOLED_SHARE = 0.5
# largest |space| ** |bigger| searched exhaustively for an inverse
INVERSE_SEARCH_LIMIT = 5000


@dataclass(frozen=True)
class LawOutcome:
    status: OutcomeStatus
    detail: dict = field(default_factory=dict)
    # some compared distance was finite and positive
    nontrivial: bool = False


@dataclass(frozen=True)
class Law:
    law_id: str
    statement: str
    check: Callable[[random.Random, int], LawOutcome]
    compares_distances: bool = False


LAWS: dict[str, Law] = {}


def law(law_id: str, statement: str, distances: bool = False):
    """Register a law; `distances` marks laws whose sides are D_r values of generated map pairs."""

    def register(check):
        LAWS[law_id] = Law(law_id, statement, check, distances)
        return check

    return register


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------


def random_space(rng: random.Random, low: int, high: int, prefix: str) -> FiniteMetricSpace:
    """Random rational metric: random pair weights closed under shortest paths."""
    n = rng.randint(low, high)
    weights = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        weights[i][j] = weights[j][i] = rng.choice(_WEIGHTS)
    return metric_closure([f"{prefix}{i}" for i in range(n)], weights)


def scaled_copy(
    rng: random.Random, space: FiniteMetricSpace, factor: Fraction, prefix: str
) -> tuple[FiniteMetricSpace, list[int]]:
    """A relabelled, permuted copy with distances times `factor`; also old -> new index."""
    order = list(range(space.size))
    rng.shuffle(order)
    copy = FiniteMetricSpace(
        tuple(f"{prefix}{space.point_ids[i]}" for i in order),
        tuple(tuple(space.dist[i][j] * factor for j in order) for i in order),
    )
    position = [0] * space.size
    for new, old in enumerate(order):
        position[old] = new
    return copy, position


def random_map(rng: random.Random, domain: FiniteMetricSpace, codomain: FiniteMetricSpace) -> LipschitzMap:
    return LipschitzMap(domain, codomain, tuple(rng.randrange(codomain.size) for _ in range(domain.size)))


def random_lipschitz_map(
    rng: random.Random, domain: FiniteMetricSpace, codomain: FiniteMetricSpace, s
) -> LipschitzMap:
    """Uniform choice among all s-Lipschitz maps (constants always qualify)."""
    graph = FrameGraph.for_spaces(domain, codomain, ScaleParams(s, codomain.diameter))
    return LipschitzMap(domain, codomain, rng.choice(list(graph.all_frames())))


def random_walk(rng: random.Random, f: LipschitzMap, params: ScaleParams, steps: int) -> LipschitzMap:
    """End of a random path in the frame graph, hence (s, r)-homotopic to f."""
    graph = FrameGraph.for_spaces(f.domain, f.codomain, params)
    current = f.values
    for _ in range(steps):
        current = rng.choice(list(graph.neighbors(current)))
    return LipschitzMap(f.domain, f.codomain, current)


def random_r(rng: random.Random, space: FiniteMetricSpace) -> Fraction:
    return rng.choice(space.distinct_distances() or [Fraction(1)])


def scale_of(*maps: LipschitzMap) -> Fraction:
    return max(lipschitz_constant(m) for m in maps)


def find_homotopy_inverse(
    alpha: LipschitzMap, params: ScaleParams, budget: int = DEFAULT_BUDGET
) -> Optional[LipschitzMap]:
    """
    Brute-force beta with Lip(beta) <= 1 / Lip(alpha) and beta . alpha
    (1, r)-homotopic to the identity, or None.

    Exact left inverses are tried before merely homotopic ones, so an
    isometry gets its inverse back. Only params.r is used.
    """
    lip = lipschitz_constant(alpha)
    if lip == 0:
        return None
    source, target = alpha.domain, alpha.codomain
    ident = identity(source)
    admissible = [
        beta
        for beta in (
            LipschitzMap(target, source, values)
            for values in itertools.product(range(source.size), repeat=target.size)
        )
        if lipschitz_constant(beta) * lip <= 1
    ]
    for beta in admissible:
        if compose(beta, alpha).values == ident.values:
            return beta
    step = ScaleParams(1, params.r)
    for beta in admissible:
        if find_homotopy(compose(beta, alpha), ident, step, budget).found:
            return beta
    return None


def cycle_space(rng: random.Random, n: int, prefix: str, perturb: bool = False) -> FiniteMetricSpace:
    """
    n points around a circle, each joined to its two neighbours.

    Unperturbed edges have length 1, giving the geodesic cycle; perturbed
    ones are drawn from {1, 3/2}, so every distance is at least the hop count
    and maps that are 1-Lipschitz on the geodesic cycle stay 1-Lipschitz.
    """
    if n < 3:
        raise ValueError(f"a cycle needs at least three points, got {n}")
    lengths = [rng.choice((Fraction(1), Fraction(3, 2))) if perturb else Fraction(1) for _ in range(n)]
    far = sum(lengths)
    weights = [[far] * n for _ in range(n)]
    for i, length in enumerate(lengths):
        j = (i + 1) % n
        weights[i][j] = weights[j][i] = length
    return metric_closure([f"{prefix}{i}" for i in range(n)], weights)


def winding_map(domain: FiniteMetricSpace, codomain: FiniteMetricSpace, offset: int, direction: int) -> LipschitzMap:
    """Go once around the codomain cycle; the last domain points wait at the final codomain point."""
    m = codomain.size
    return LipschitzMap(
        domain, codomain, tuple((offset + direction * min(j, m - 1)) % m for j in range(domain.size))
    )


def holed_pair(rng: random.Random) -> tuple[FiniteMetricSpace, FiniteMetricSpace, LipschitzMap, LipschitzMap, Fraction]:
    """
    Two maps from a (maybe perturbed) cycle onto a cycle of at least five
    points, at r = 1 where the codomain's hole is still open.

    One map winds around the hole; the other is a constant, the reflected
    winding or a rotated copy, so D_r is 1, 1 or 0 respectively.
    """
    n = rng.choice((5, 6))
    m = rng.randint(5, n)
    X = cycle_space(rng, n, "x", perturb=rng.random() < 0.5)
    Y = cycle_space(rng, m, "y")
    direction = rng.choice((1, -1))
    f = winding_map(X, Y, rng.randrange(m), direction)
    partner = rng.choice(("constant", "constant", "reflected", "rotated"))
    if partner == "constant":
        g = constant(X, Y, rng.randrange(m))
    else:
        g = winding_map(X, Y, rng.randrange(m), -direction if partner == "reflected" else direction)
    if rng.random() < 0.5:
        f, g = g, f
    return X, Y, f, g, Fraction(1)


def map_pair(
    rng: random.Random, x_high: int = 4, y_high: int = 5
) -> tuple[FiniteMetricSpace, FiniteMetricSpace, LipschitzMap, LipschitzMap, Fraction]:
    """X, Y, f, g and a step r: from the holed family or fully random."""
    if rng.random() < HOLED_SHARE:
        return holed_pair(rng)
    X, Y = random_space(rng, 2, x_high, "x"), random_space(rng, 2, y_high, "y")
    f, g = random_map(rng, X, Y), random_map(rng, X, Y)
    return X, Y, f, g, random_r(rng, Y)


def whisker(
    rng: random.Random, space: FiniteMetricSpace, length, prefix: str
) -> tuple[FiniteMetricSpace, LipschitzMap, LipschitzMap]:
    """
    `space` with one extra point hung at `length` from a random anchor,
    together with the inclusion into it and the retraction that folds the
    extra point back onto the anchor.
    """
    length = Fraction(length)
    if length <= 0:
        raise ValueError(f"whisker length must be positive, got {length}")
    n = space.size
    anchor = rng.randrange(n)
    reach = [length + space.dist[anchor][j] for j in range(n)]
    rows = [list(row) + [reach[i]] for i, row in enumerate(space.dist)]
    rows.append(reach + [Fraction(0)])
    bigger = build_space([f"{prefix}{p}" for p in space.point_ids] + [f"{prefix}w"], rows)
    inclusion = LipschitzMap(space, bigger, tuple(range(n)))
    retraction = LipschitzMap(bigger, space, tuple(range(n)) + (anchor,))
    return bigger, inclusion, retraction


def homotopy_equivalence(
    rng: random.Random, space: FiniteMetricSpace, r, prefix: str, budget: int = DEFAULT_BUDGET
) -> Optional[tuple[LipschitzMap, LipschitzMap]]:
    """
    (alpha, beta) between `space` and a whiskered copy, both 1-Lipschitz and
    inverse to each other up to (1, r)-homotopy; None if that check fails.

    alpha is the inclusion. When the spaces are small beta comes from the
    brute-force inverse search, otherwise it is the retraction.
    """
    r = Fraction(r)
    bigger, alpha, beta = whisker(rng, space, rng.choice((r, r / 2)), prefix)
    if space.size**bigger.size <= INVERSE_SEARCH_LIMIT:
        beta = find_homotopy_inverse(alpha, ScaleParams(1, r), budget) or beta
    step = ScaleParams(1, r)
    there = find_homotopy(compose(beta, alpha), identity(space), step, budget)
    back = find_homotopy(compose(alpha, beta), identity(bigger), step, budget)
    if not (there.found and back.found):
        return None
    return alpha, beta


@dataclass(frozen=True)
class Instance:
    """Random spaces X, Y with two maps X -> Y and their Lipschitz constants."""

    X: FiniteMetricSpace
    Y: FiniteMetricSpace
    f: LipschitzMap
    g: LipschitzMap
    lipschitz: dict


def generate_instance(seed: int, x_cap: int = 5, y_cap: int = 6) -> Instance:
    """Deterministic random instance with |X| <= x_cap and |Y| <= y_cap."""
    if x_cap < 1 or y_cap < 1:
        raise ValueError(f"size caps must be positive, got {x_cap} and {y_cap}")
    rng = random.Random(f"instance:{seed}")
    X, Y = random_space(rng, 1, x_cap, "x"), random_space(rng, 1, y_cap, "y")
    f, g = random_map(rng, X, Y), random_map(rng, X, Y)
    return Instance(X, Y, f, g, {"f": lipschitz_constant(f), "g": lipschitz_constant(g)})


def _describe(**maps: LipschitzMap) -> dict:
    return {name: m.label_mapping() for name, m in maps.items()}


# ---------------------------------------------------------------------------
# Comparing distances
# ---------------------------------------------------------------------------


def _at_most(lhs: DistanceResult, rhs: DistanceResult) -> Optional[bool]:
    """True / False when lhs <= rhs is decided by the bounds, None otherwise."""
    lhs_low, lhs_high = lhs.bounds()
    rhs_low, rhs_high = rhs.bounds()
    if lhs_high <= rhs_low:
        return True
    if lhs_low > rhs_high:
        return False
    return None


def _equal(lhs: DistanceResult, rhs: DistanceResult) -> Optional[bool]:
    if lhs.status == "bounded" or rhs.status == "bounded":
        return None
    return lhs.bounds() == rhs.bounds()


def _nontrivial(*results: DistanceResult) -> bool:
    """Some result is a known finite, positive D_r."""
    return any(r.status == "finite" and r.value > 0 for r in results)


def _judge(verdict: Optional[bool], lhs: DistanceResult, rhs: DistanceResult, **context) -> LawOutcome:
    detail = {"lhs": lhs.display(), "rhs": rhs.display(), **context}
    if verdict is None:
        return LawOutcome("skip", {**detail, "reason": "undetermined bounds"})
    return LawOutcome("pass" if verdict else "fail", detail, _nontrivial(lhs, rhs))


def _distance(f, g, s, r, budget) -> DistanceResult:
    return homotopic_distance(f, g, ScaleParams(s, r), budget)


def _skip(reason: str) -> LawOutcome:
    return LawOutcome("skip", {"reason": reason})


# ---------------------------------------------------------------------------
# Laws
# ---------------------------------------------------------------------------


@law("zero-iff-homotopic", "D_r(f, g) = 0 exactly when f and g are (s, r)-homotopic", distances=True)
def _zero_iff_homotopic(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    s = scale_of(f, g)
    d = _distance(f, g, s, r, budget)
    verdict = find_homotopy(f, g, ScaleParams(s, r), budget)
    if d.status == "bounded" or verdict.status == "budget_exceeded":
        return _skip("budget")
    ok = (d.status == "finite" and d.value == 0) == verdict.found
    return LawOutcome("pass" if ok else "fail", {"distance": d.display(), "search": verdict.status}, _nontrivial(d))


@law("symmetry", "D_r(f, g) = D_r(g, f)", distances=True)
def _symmetry(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    s = scale_of(f, g)
    lhs, rhs = _distance(f, g, s, r, budget), _distance(g, f, s, r, budget)
    return _judge(_equal(lhs, rhs), lhs, rhs, maps=_describe(f=f, g=g))


@law("homotopy-invariance", "D_r(f, g) = D_r(f', g') when f ~ f' and g ~ g'", distances=True)
def _homotopy_invariance(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    params = ScaleParams(scale_of(f, g), r)
    f2, g2 = random_walk(rng, f, params, 2), random_walk(rng, g, params, 2)
    lhs = _distance(f, g, params.s, params.r, budget)
    rhs = _distance(f2, g2, params.s, params.r, budget)
    return _judge(_equal(lhs, rhs), lhs, rhs)


@law("concatenation", "concatenating f ~ g and g ~ h gives f ~ h")
def _concatenation(rng, budget):
    X, Y = random_space(rng, 2, 4, "x"), random_space(rng, 2, 5, "y")
    f = random_map(rng, X, Y)
    params = ScaleParams(lipschitz_constant(f), random_r(rng, Y))
    g = random_walk(rng, f, params, 2)
    h = random_walk(rng, g, params, 2)
    first, second = find_homotopy(f, g, params, budget), find_homotopy(g, h, params, budget)
    if not (first.found and second.found):
        return _skip("budget")
    ok, problems = verify_homotopy(concatenate(first.homotopy, second.homotopy), f, h, params)
    return LawOutcome("pass" if ok else "fail", {"violations": problems})


@law("constant-paths", "an r-path from x to y gives c_x ~ c_y at any s")
def _constant_paths(rng, budget):
    X, Y = random_space(rng, 1, 4, "x"), random_space(rng, 2, 5, "y")
    r = random_r(rng, Y)
    x, y = rng.randrange(Y.size), rng.randrange(Y.size)
    path = shortest_r_path(Y, x, y, r)
    if path is None:
        return _skip("no r-path")
    H = path_homotopy(X, Y, path, r)
    ok, problems = verify_homotopy(H, constant(X, Y, x), constant(X, Y, y), ScaleParams(0, r))
    return LawOutcome("pass" if ok else "fail", {"violations": problems})


@law("monotone-in-r", "D_r2(f, g) <= D_r1(f, g) when r1 <= r2", distances=True)
def _monotone_in_r(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    s = scale_of(f, g)
    r1, r2 = sorted((r, random_r(rng, Y)))
    lhs, rhs = _distance(f, g, s, r2, budget), _distance(f, g, s, r1, budget)
    return _judge(_at_most(lhs, rhs), lhs, rhs, r1=format_scalar(r1), r2=format_scalar(r2))


@law("post-composition-witness", "k . F is an (s1 s2, s2 r)-homotopy from k f to k g")
def _post_composition(rng, budget):
    X, Y, W = random_space(rng, 2, 4, "x"), random_space(rng, 2, 5, "y"), random_space(rng, 2, 4, "w")
    f = random_map(rng, X, Y)
    params = ScaleParams(lipschitz_constant(f), random_r(rng, Y))
    g = random_walk(rng, f, params, 2)
    found = find_homotopy(f, g, params, budget)
    if not found.found:
        return _skip("budget")
    k = random_map(rng, Y, W)
    s2 = lipschitz_constant(k)
    scaled = ScaleParams(params.s * s2, params.r * s2)
    ok, problems = verify_homotopy(compose_homotopy_left(k, found.homotopy, scaled), compose(k, f), compose(k, g))
    return LawOutcome("pass" if ok else "fail", {"violations": problems})


@law("pre-composition-witness", "G . h is an (s1 s2, r)-homotopy from f h to g h")
def _pre_composition(rng, budget):
    X, Y, Z = random_space(rng, 2, 4, "x"), random_space(rng, 2, 5, "y"), random_space(rng, 2, 3, "z")
    f = random_map(rng, X, Y)
    params = ScaleParams(lipschitz_constant(f), random_r(rng, Y))
    g = random_walk(rng, f, params, 2)
    found = find_homotopy(f, g, params, budget)
    if not found.found:
        return _skip("budget")
    h = random_map(rng, Z, X)
    scaled = ScaleParams(params.s * lipschitz_constant(h), params.r)
    ok, problems = verify_homotopy(compose_homotopy_right(found.homotopy, h, scaled), compose(f, h), compose(g, h))
    return LawOutcome("pass" if ok else "fail", {"violations": problems})


@law("post-composition-bound", "D_{s2 r}(k f, k g) at s1 s2 <= D_r(f, g) at s1 for s2-Lipschitz k", distances=True)
def _post_composition_distance(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    W = random_space(rng, 2, 4, "w")
    k = random_map(rng, Y, W)
    s1, s2 = scale_of(f, g), lipschitz_constant(k)
    lhs = _distance(compose(k, f), compose(k, g), s1 * s2, s2 * r, budget)
    rhs = _distance(f, g, s1, r, budget)
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law("map-cat-below-domain", "cat_r(f) <= cat_r(X) for 1-Lipschitz f on an r-connected X", distances=True)
def _map_category_below_domain(rng, budget):
    if rng.random() < HOLED_SHARE:
        n = rng.choice((5, 6))
        X, Y, r = cycle_space(rng, n, "x"), cycle_space(rng, rng.randint(5, n), "y"), Fraction(1)
    else:
        X, Y = random_space(rng, 2, 4, "x"), random_space(rng, 2, 5, "y")
        r = random_r(rng, X)
    if not is_r_connected(X, r)[0]:
        return _skip("domain not r-connected")
    f = random_lipschitz_map(rng, X, Y, 1)
    lhs = cat_map(f, r, s=lipschitz_constant(f), budget=budget).result
    rhs = cat_space(X, r, budget).result
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law("pre-composition-bound", "D_r(f h, g h) at s1 s2 <= D_r(f, g) at s1 for s2-Lipschitz h", distances=True)
def _pre_composition_distance(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    Z = random_space(rng, 2, 4, "z")
    h = random_map(rng, Z, X)
    s1, s2 = scale_of(f, g), lipschitz_constant(h)
    lhs = _distance(compose(f, h), compose(g, h), s1 * s2, r, budget)
    rhs = _distance(f, g, s1, r, budget)
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law("cat-below-tc", "cat_r(X) <= TC_r(X) on an r-connected X")
def _category_below_complexity(rng, budget):
    X = random_space(rng, 2, 3, "x")
    r = random_r(rng, X)
    if not is_r_connected(X, r)[0]:
        return _skip("space not r-connected")
    lhs = cat_space(X, r, budget).result
    rhs = tc_space(X, r, DEFAULT_PRODUCT_METRIC, budget).result
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law("map-cat-below-codomain", "cat_r(f) <= cat_r(Y) on an r-connected codomain", distances=True)
def _map_category_below_codomain(rng, budget):
    X, Y, f, _, r = map_pair(rng, 4, 4)
    if not is_r_connected(Y, r)[0]:
        return _skip("codomain not r-connected")
    lhs = cat_map(f, r, budget=budget).result
    rhs = cat_space(Y, r, budget).result
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law(
    "distance-below-categories",
    "D_r(f, g) <= (cat_r(f) + 1)(cat_r(g) + 1) - 1 on an r-connected codomain",
    distances=True,
)
def _distance_below_categories(rng, budget):
    X, Y, f, g, r = map_pair(rng)
    if not is_r_connected(Y, r)[0]:
        return _skip("codomain not r-connected")
    s = scale_of(f, g)
    lhs = _distance(f, g, s, r, budget)
    cat_f, cat_g = cat_map(f, r, s, budget).result, cat_map(g, r, s, budget).result
    if "bounded" in (cat_f.status, cat_g.status, lhs.status):
        return _skip("undetermined bounds")
    bound = (cat_f.value + 1) * (cat_g.value + 1) - 1
    ok = lhs.value <= bound
    return LawOutcome("pass" if ok else "fail", {"lhs": lhs.display(), "rhs": str(bound)}, _nontrivial(lhs, cat_f, cat_g))


def _interleaving_instance(rng, budget, unit_scale: bool):
    # h, h' are the generated pair, so the right-hand side can sit on a hole
    Z, X, h, h2, r = map_pair(rng, 3, 4)
    Y = random_space(rng, 2, 4, "y")
    f = random_lipschitz_map(rng, X, Y, 1) if unit_scale else random_map(rng, X, Y)
    s1 = Fraction(1) if unit_scale else lipschitz_constant(f)
    g = random_walk(rng, f, ScaleParams(s1, r), 2)
    return f, g, h, h2, s1, scale_of(h, h2), r


@law("interleaving-bound", "D_{(s1+1) r}(f h, g h') at s1 s2 <= D_r(h, h') at s2 when f ~ g", distances=True)
def _interleaving(rng, budget):
    f, g, h, h2, s1, s2, r = _interleaving_instance(rng, budget, unit_scale=False)
    lhs = _distance(compose(f, h), compose(g, h2), s1 * s2, (s1 + 1) * r, budget)
    rhs = _distance(h, h2, s2, r, budget)
    return _judge(_at_most(lhs, rhs), lhs, rhs)


@law(
    "interleaving-unit-scale",
    "D_r(f h, g h') at s2 <= D_r(h, h') at s2 when f ~ g at scale s1 <= 1",
    distances=True,
)
def _interleaving_unit_scale(rng, budget):
    f, g, h, h2, s1, s2, r = _interleaving_instance(rng, budget, unit_scale=True)
    lhs = _distance(compose(f, h), compose(g, h2), s2, r, budget)
    rhs = _distance(h, h2, s2, r, budget)
    return _judge(_at_most(lhs, rhs), lhs, rhs)


def _inverse_pair(rng, space: FiniteMetricSpace, r, budget, prefix: str):
    """
    (alpha, beta) with alpha: space -> copy and beta . alpha ~ id at (1, r).

    Mostly scaled permuted copies; sometimes a random alpha with a
    brute-forced beta.
    """
    if rng.random() < 0.25:
        target = random_space(rng, 2, 4, prefix)
        alpha = random_map(rng, space, target)
        beta = find_homotopy_inverse(alpha, ScaleParams(1, r), budget)
        if beta is not None:
            return alpha, beta
    factor = rng.choice((Fraction(1, 2), Fraction(1), Fraction(2)))
    copy, position = scaled_copy(rng, space, factor, prefix)
    alpha = LipschitzMap(space, copy, tuple(position))
    inverse = [0] * space.size
    for old, new in enumerate(position):
        inverse[new] = old
    return alpha, LipschitzMap(copy, space, tuple(inverse))


@law(
    "left-inverse-invariance",
    "D_r(f, g) at s1 = D_{s2 r}(a f, a g) at s1 s2 when a has a 1/s2-Lipschitz left homotopy inverse",
    distances=True,
)
def _post_composition_invariance(rng, budget):
    X, Y, f, g, r = map_pair(rng, 3, 4)
    s1 = scale_of(f, g)
    alpha, _ = _inverse_pair(rng, Y, r, budget, "y'")
    s2 = lipschitz_constant(alpha)
    if s2 == 0:
        return _skip("constant alpha")
    lhs = _distance(f, g, s1, r, budget)
    rhs = _distance(compose(alpha, f), compose(alpha, g), s1 * s2, s2 * r, budget)
    return _judge(_equal(lhs, rhs), lhs, rhs)


@law(
    "right-inverse-invariance",
    "D_r(f, g) at s1 = D_r(f b, g b) at s1 s2 when b has a 1/s2-Lipschitz right homotopy inverse",
    distances=True,
)
def _pre_composition_invariance(rng, budget):
    X, Y, f, g, r = map_pair(rng, 4, 4)
    s1 = scale_of(f, g)
    # alpha plays eta here: beta . eta ~ id_X at the tightened step r / max(1, s1)
    eta, beta = _inverse_pair(rng, X, r / max(Fraction(1), s1), budget, "x'")
    s2 = lipschitz_constant(beta)
    if s2 == 0 or lipschitz_constant(eta) * s2 > 1:
        return _skip("no admissible inverse")
    lhs = _distance(f, g, s1, r, budget)
    rhs = _distance(compose(f, beta), compose(g, beta), s1 * s2, r, budget)
    return _judge(_equal(lhs, rhs), lhs, rhs)


@law(
    "equivalence-invariance",
    "D_r is unchanged by 1-Lipschitz homotopy equivalences on both sides",
    distances=True,
)
def _equivalence_invariance(rng, budget):
    X, Y, f, g, r = map_pair(rng, 4, 4)
    s1 = scale_of(f, g)
    codomain_side = homotopy_equivalence(rng, Y, r, "y'", budget)
    # a domain step of r / max(1, s1) moves images by at most r
    domain_side = homotopy_equivalence(rng, X, r / max(Fraction(1), s1), "x'", budget)
    if codomain_side is None or domain_side is None:
        return _skip("no (1, r)-equivalence")
    alpha, _ = codomain_side
    _, beta = domain_side
    params = ScaleParams(s1, r)
    f2 = random_walk(rng, compose(alpha, compose(f, beta)), params, 2)
    g2 = random_walk(rng, compose(alpha, compose(g, beta)), params, 2)
    lhs = _distance(f, g, s1, r, budget)
    rhs = _distance(f2, g2, s1, r, budget)
    return _judge(_equal(lhs, rhs), lhs, rhs, sizes=[X.size, Y.size, beta.domain.size, alpha.codomain.size])


@law("category-chain", "cat_r(X) = D_r(id, c) = D_r(i1, c) = D_r(i2, c) = D_r(i1, i2) on an r-connected X")
def _category_chain(rng, budget):
    X = random_space(rng, 2, 4, "x")
    r = random_r(rng, X)
    if not is_r_connected(X, r)[0]:
        return _skip("space not r-connected")
    terms = category_chain(X, r, budget=budget)
    if any(t.status == "bounded" for t in terms.values()):
        return _skip("undetermined bounds")
    values = {name: t.display() for name, t in terms.items()}
    return LawOutcome("pass" if len(set(values.values())) == 1 else "fail", {"terms": values})


@law("tc-by-sections", "TC_r(X) from motion plans equals D_r(p1, p2)")
def _complexity_by_sections(rng, budget):
    X = random_space(rng, 2, 3, "x")
    r = random_r(rng, X)
    lhs = tc_by_sections(X, r, DEFAULT_PRODUCT_METRIC, budget).result
    rhs = tc_space(X, r, DEFAULT_PRODUCT_METRIC, budget).result
    return _judge(_equal(lhs, rhs), lhs, rhs)


# ---------------------------------------------------------------------------
# Running the suite
# ---------------------------------------------------------------------------


@dataclass
class LawStats:
    law_id: str
    tried: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    # passing trials on which some compared D_r was finite and positive
    nontrivial: int = 0
    compares_distances: bool = False
    counterexamples: list[dict] = field(default_factory=list)


@dataclass
class LawReport:
    """
    Per-law tallies of one suite run.

    A law is exercised once it has `min_passes` passing trials. A law that
    compares distances is starved when fewer than `min_nontrivial` of its
    passes saw 0 < D_r < infinity. Either condition fails the run.
    """

    seed: int
    trials: int
    stats: list[LawStats]
    min_passes: int = DEFAULT_MIN_PASSES
    min_nontrivial: int = DEFAULT_MIN_NONTRIVIAL

    def exercised(self, stats: LawStats) -> bool:
        return stats.passed >= max(1, self.min_passes)

    @property
    def unexercised(self) -> list[str]:
        return [s.law_id for s in self.stats if not self.exercised(s)]

    @property
    def starved(self) -> list[str]:
        return [s.law_id for s in self.stats if s.compares_distances and s.nontrivial < self.min_nontrivial]

    @property
    def ok(self) -> bool:
        return not self.unexercised and not self.starved and all(s.failed == 0 for s in self.stats)

    def rows(self) -> list[dict]:
        return [
            {
                "law": s.law_id,
                "tried": s.tried,
                "passed": s.passed,
                "failed": s.failed,
                "skipped": s.skipped,
                "nontrivial": s.nontrivial if s.compares_distances else "",
                "exercised": self.exercised(s),
            }
            for s in self.stats
        ]


def instance_rng(law_id: str, seed: int, trial: int) -> random.Random:
    return random.Random(f"{law_id}:{seed}:{trial}")


def run_trial(law_id: str, seed: int, trial: int, budget: int = DEFAULT_BUDGET) -> LawOutcome:
    """Evaluate one seeded instance of one law."""
    return LAWS[law_id].check(instance_rng(law_id, seed, trial), budget)


def _run_task(task) -> LawOutcome:
    return run_trial(*task)


def run_suite(
    law_ids: Optional[Iterable[str]] = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    budget: int = DEFAULT_BUDGET,
    workers: int = DEFAULT_WORKERS,
    first_trial: int = 0,
    min_passes: int = DEFAULT_MIN_PASSES,
    min_nontrivial: int = DEFAULT_MIN_NONTRIVIAL,
) -> LawReport:
    """
    Run `trials` instances of each law; results do not depend on `workers`.

    Raises:
        ValueError: unknown law id.
    """
    law_ids = list(law_ids) if law_ids else list(LAWS)
    unknown = [i for i in law_ids if i not in LAWS]
    if unknown:
        raise ValueError(f"unknown law ids {unknown}; choose from {sorted(LAWS)}")

    tasks = [(law_id, seed, t, budget) for law_id in law_ids for t in range(first_trial, first_trial + trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_run_task(task) for task in tasks]

    stats = {law_id: LawStats(law_id, compares_distances=LAWS[law_id].compares_distances) for law_id in law_ids}
    for (law_id, _, trial, _), outcome in zip(tasks, outcomes):
        entry = stats[law_id]
        entry.tried += 1
        if outcome.status == "pass":
            entry.passed += 1
            entry.nontrivial += outcome.nontrivial
        elif outcome.status == "skip":
            entry.skipped += 1
        else:
            entry.failed += 1
            entry.counterexamples.append({"law": law_id, "seed": seed, "trial": trial, **outcome.detail})
            logger.warning(f"{law_id} failed on seed {seed} trial {trial}: {outcome.detail}")
    report = LawReport(seed, trials, [stats[i] for i in law_ids], min_passes, min_nontrivial)
    for law_id in report.unexercised:
        logger.warning(f"{law_id} passed fewer than {max(1, min_passes)} of {trials} trials")
    for law_id in report.starved:
        logger.warning(f"{law_id} saw fewer than {min_nontrivial} instances with 0 < D_r < infinity")
    return report
