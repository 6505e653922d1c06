import itertools
import math

import pytest

from compactify.errors import PreconditionError
from compactify.graph_core import ball, build_builtin, free_action, lattice_action
from compactify.perspectivity import (
    cat0_threshold,
    encode_points,
    euclidean_lemma_check,
    euclidean_plane,
    grid_embedding,
    is_small,
    model_for,
    perspectivity_scan,
    tree_metric,
)


def test_is_small_is_strict():
    m = euclidean_plane()
    assert is_small([(0, 0), (0.5, 0)], m, 1, 1)
    assert not is_small([(0, 0), (1, 0)], m, 2, 1)
    # retraction to radius 1 shrinks a far pair below epsilon
    assert is_small([(100, 0), (100, 1)], m, 1, 0.5)
    with pytest.raises(PreconditionError):
        is_small([(0, 0)], m, 0, 1)


def test_threshold():
    assert cat0_threshold(2, 10, 1) == 20
    with pytest.raises(PreconditionError):
        cat0_threshold(1, 1, -1)


def test_euclidean_lemma():
    v = euclidean_lemma_check(2000, seed=7)
    assert v.passed and v.detail["worst_ratio"] <= 1 + 1e-9


def test_tree_metric_against_ball_distances():
    g = build_builtin("tree", [3])
    t = ball(g, 3)
    m = tree_metric(3)
    for v in t.vertices:
        assert m.dist(0, v) == t.distance[v]
    for u, v in itertools.combinations(t.vertices[:12], 2):
        assert m.dist(u, v) == m.dist(v, u)
        proj = m.project(v, 1)
        assert m.dist(0, proj) == min(1, t.distance[v])


def brute_violators(K, r, eps, R):
    """Grid translates gK not small, enumerated over a coordinate box."""
    out = set()
    for x in range(-R, R + 1):
        for y in range(-R, R + 1):
            pts = [(a + x, b + y) for a, b in K]
            proj = []
            for p in pts:
                n = math.hypot(*p)
                proj.append(p if n <= r else (p[0] * r / n, p[1] * r / n))
            if any(math.dist(p, q) >= eps for p, q in itertools.combinations(proj, 2)):
                out.add(tuple(sorted(pts)))
    return out


def test_grid_scan_matches_coordinate_oracle():
    K = [(0, 0), (2, 0)]
    viol, v = perspectivity_scan(lattice_action(2), encode_points(K), grid_embedding(), 3, 1, 14, 16)
    assert v.status == "pass" and v.check == "finite"
    got = {tuple(sorted(map(tuple, x.translate))) for x in viol}
    assert got == brute_violators(K, 3, 1, 12)
    assert all(x.base_distance < v.detail["threshold"] for x in viol)


def test_grid_scan_large_epsilon_has_no_violators():
    viol, v = perspectivity_scan(lattice_action(2), encode_points([(0, 0), (3, 0)]), grid_embedding(), 10, 25, 6)
    assert viol == [] and v.passed


def test_scan_too_short_is_inconclusive():
    _, v = perspectivity_scan(lattice_action(2), encode_points([(0, 0), (3, 0)]), grid_embedding(), 10, 1, 8, 10)
    assert v.status == "unknown" and v.check == "inconclusive"


def test_tree_scan():
    viol, v = perspectivity_scan(free_action(2, [0, 1]), [0, 1], tree_metric(4), 3, 1, 6, 8)
    assert v.passed
    assert len(viol) == v.detail["count"] > 0


def test_model_for():
    assert model_for("grid").kind == "grid-embedding"
    with pytest.raises(PreconditionError):
        model_for("hyperbolic")
