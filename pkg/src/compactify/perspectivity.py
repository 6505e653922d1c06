"""Smallness of translates for the visual compactification of CAT(0) models.

Entourages are taken from the basis ``w_{r,ε}``: a set is small when the
geodesic retractions of its points to the closed ball of radius ``r`` are
pairwise closer than ``ε``.  A set of diameter ``d`` whose distance from the
basepoint is at least ``d*r/ε`` is always small, which turns a finite
enumeration of translates into a certificate.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import PreconditionError
from .graph_core import ActionModel, Word, _TreeIndex, decode_lattice, encode_lattice, word_str
from .verdict import FAIL, PASS, UNKNOWN, Verdict

TOL = 1e-9

Point = Hashable


@dataclass(frozen=True)
class ProjectionModel:
    kind: str
    basepoint: Point
    project: Callable[[Point, float], Point]
    dist: Callable[[Point, Point], float]
    # vertex id -> model point, for models that host a graph
    embed: Callable[[int], Point] = lambda v: v
    certified: bool = True


def _euclid(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _retract(p, r: float):
    n = math.hypot(p[0], p[1])
    if n <= r:
        return (float(p[0]), float(p[1]))
    return (p[0] * r / n, p[1] * r / n)


def euclidean_plane() -> ProjectionModel:
    return ProjectionModel("euclidean-plane", (0.0, 0.0), _retract, _euclid)


def grid_embedding() -> ProjectionModel:
    """``grid2d`` vertices sitting at their integer coordinates in the plane."""
    return ProjectionModel("grid-embedding", (0.0, 0.0), _retract, _euclid, lambda v: decode_lattice(v, 2))


def tree_metric(degree: int) -> ProjectionModel:
    """Vertices of the ``degree``-regular tree with the path metric; retraction truncates the root path."""
    idx = _TreeIndex(degree)

    def dist(u: int, v: int) -> float:
        pu, pv = idx.path(u), idx.path(v)
        common = 0
        for a, b in zip(pu, pv):
            if a != b:
                break
            common += 1
        return float(len(pu) + len(pv) - 2 * common)

    def project(v: int, r: float) -> int:
        return idx.from_path(idx.path(v)[: int(math.floor(r))])

    return ProjectionModel("tree-metric", 0, project, dist)


def model_for(name: str, degree: int = 4) -> ProjectionModel:
    if name in ("euclidean", "euclidean-plane", "plane"):
        return euclidean_plane()
    if name in ("grid", "grid-embedding"):
        return grid_embedding()
    if name in ("tree", "tree-metric"):
        return tree_metric(degree)
    raise PreconditionError(f"unknown projection model {name!r}")


def _positive(**values: float) -> None:
    for k, v in values.items():
        if not v > 0:
            raise PreconditionError(f"{k} must be positive, got {v}")


def is_small(points: Iterable[Point], model: ProjectionModel, r: float, eps: float) -> bool:
    """Every pair of retractions to radius ``r`` is strictly closer than ``eps``."""
    _positive(r=r, epsilon=eps)
    proj = [model.project(p, r) for p in points]
    return all(model.dist(a, b) < eps for a, b in itertools.combinations(proj, 2))


def cat0_threshold(d: float, r: float, eps: float) -> float:
    _positive(d=d, r=r, epsilon=eps)
    return d * r / eps


def euclidean_lemma_check(samples: int = 1000, tolerance: float = TOL, seed: int = 0) -> Verdict:
    """Random planar pairs at distance ``>= d*r/ε`` from the origin project within ``ε``."""
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    rng = random.Random(seed)
    worst = 0.0
    for i in range(samples):
        d = rng.uniform(0.01, 10.0)
        r = rng.uniform(0.1, 50.0)
        eps = rng.uniform(0.01, 5.0)
        t = d * r / eps
        # every fourth sample sits exactly on the threshold
        rho = t if i % 4 == 0 else t * rng.uniform(1.0, 3.0)
        theta = rng.uniform(0, 2 * math.pi)
        p = (rho * math.cos(theta), rho * math.sin(theta))
        q = None
        while q is None:
            s = rng.uniform(0, d)
            phi = rng.uniform(0, 2 * math.pi)
            cand = (p[0] + s * math.cos(phi), p[1] + s * math.sin(phi))
            if math.hypot(*cand) >= t:
                q = cand
        gap = _euclid(_retract(p, r), _retract(q, r))
        worst = max(worst, gap / eps)
        if gap > eps + tolerance:
            return Verdict(FAIL, "cat0-lemma", {"p": p, "q": q, "d": d, "r": r, "epsilon": eps, "projected": gap})
    return Verdict(PASS, "cat0-lemma", {"samples": samples, "worst_ratio": round(worst, 12)})


@dataclass(frozen=True)
class Violator:
    word: Word
    translate: tuple[Point, ...]
    base_distance: float

    def to_json(self) -> dict:
        return {"g": word_str(self.word), "gK": [list(p) if isinstance(p, tuple) else p for p in self.translate], "base_distance": self.base_distance}


def _violators(action: ActionModel, K: Sequence[int], model: ProjectionModel, r: float, eps: float, bound: int):
    found: dict[tuple, Violator] = {}
    far = math.inf
    elements = action.orbit(bound, reference=K)
    for g, image in elements:
        pts = tuple(model.embed(v) for v in image)
        dist = min(model.dist(model.basepoint, p) for p in pts)
        if not is_small(pts, model, r, eps):
            key = tuple(sorted(pts))
            found.setdefault(key, Violator(g, key, dist))
        if len(g) == bound:
            far = min(far, dist)
    return found, far, len(elements)


def perspectivity_scan(
    action: ActionModel,
    K: Iterable[int],
    model: ProjectionModel,
    r: float,
    eps: float,
    bound: int,
    bound2: int | None = None,
) -> tuple[list[Violator], Verdict]:
    """Translates ``gK`` that are not ``w_{r,ε}``-small, enumerated to word length ``bound`` and ``bound2``.

    ``finite`` needs the same list at both bounds and the threshold
    certificate: every violator is closer than ``diam(K)*r/ε`` and the outermost
    enumerated ring already lies beyond that distance.
    """
    _positive(r=r, epsilon=eps)
    K = sorted(K)
    if not K:
        raise PreconditionError("K must be non-empty")
    bound2 = bound2 if bound2 is not None else bound + max(2, bound // 5)
    pts = [model.embed(v) for v in K]
    diam = max((model.dist(a, b) for a, b in itertools.combinations(pts, 2)), default=0.0)
    first, _, _ = _violators(action, K, model, r, eps, bound)
    second, far, count = _violators(action, K, model, r, eps, bound2)
    viol = sorted(second.values(), key=lambda v: (v.base_distance, v.translate))
    threshold = cat0_threshold(diam, r, eps) if diam > 0 else 0.0
    stable = set(first) == set(second)
    within = all(v.base_distance < threshold + TOL for v in viol)
    detail = {
        "violators": [v.to_json() for v in viol],
        "count": len(viol),
        "threshold": threshold,
        "diameter": diam,
        "stable": stable,
        "within_threshold": within,
        "outer_ring_distance": far,
        "bounds": [bound, bound2],
        "enumerated": count,
        "certified": model.certified,
    }
    if stable and within and far >= threshold and model.certified:
        return viol, Verdict(PASS, "finite", detail)
    return viol, Verdict(UNKNOWN, "inconclusive", detail)


def encode_points(coords: Iterable[Sequence[int]]) -> list[int]:
    return [encode_lattice(c) for c in coords]
