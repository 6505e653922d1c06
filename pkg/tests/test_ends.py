from collections import deque

import pytest

from compactify.ends import (
    bonding,
    commutation_check,
    complement_components,
    ends_classification,
    ends_system,
    stage_boundary_map,
    universal_quotient,
)
from compactify.errors import InvalidTarget, PreconditionError
from compactify.graph_core import ball, build_builtin, encode_lattice, translation_action
from compactify.setexpr import Cofinite, ComponentCone, Coset, Finite, Translate, Union


def grid_oracle(K, R):
    """Unbounded components of ball(R) minus K in Z^2, by plain coordinate BFS."""
    inside = {(x, y) for x in range(-R, R + 1) for y in range(-R, R + 1) if abs(x) + abs(y) <= R} - set(K)
    seen, count = set(), 0
    for start in inside:
        if start in seen:
            continue
        comp, queue = {start}, deque([start])
        seen.add(start)
        while queue:
            x, y = queue.popleft()
            for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if n in inside and n not in seen:
                    seen.add(n)
                    comp.add(n)
                    queue.append(n)
        if any(abs(x) + abs(y) == R for x, y in comp):
            count += 1
    return count


@pytest.mark.parametrize(
    "K,R",
    [
        ([(0, 0)], 3),
        ([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)], 4),
        ([(1, 0), (-1, 0), (0, 1), (0, -1)], 3),  # encloses the origin
        ([(x, 0) for x in range(-3, 4)], 4),  # cuts the ball in two
    ],
)
def test_grid_components_match_coordinate_oracle(K, R):
    g = build_builtin("grid2d")
    stage = complement_components(g, [encode_lattice(p) for p in K], R)
    assert len(stage.unbounded_ids) == grid_oracle(K, R)


def test_enclosed_origin_is_bounded_component():
    g = build_builtin("grid2d")
    K = [encode_lattice(p) for p in [(1, 0), (-1, 0), (0, 1), (0, -1)]]
    stage = complement_components(g, K, 3)
    bounded = [c for c in stage.components if not c.touches_sphere]
    assert [c.members for c in bounded] == [(encode_lattice((0, 0)),)]


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_tree_stage_counts(r):
    g = build_builtin("tree", [4])
    K = ball(g, r - 1).vertices
    assert len(complement_components(g, K, r).unbounded_ids) == 4 * 3 ** (r - 1)


@pytest.mark.parametrize(
    "name,params,kind,count",
    [("line", [], "stabilized", 2), ("ladder", [], "stabilized", 2), ("grid2d", [], "stabilized", 1), ("tree", [3], "growing", None)],
)
def test_classification(name, params, kind, count):
    c = ends_classification(build_builtin(name, params), 6)
    assert c.kind == kind
    if count is not None:
        assert c.count == count


def test_classification_tree_counts_grow():
    c = ends_classification(build_builtin("tree", [4]), 6)
    assert list(c.counts) == [4, 12, 36, 108, 324]


def test_k_outside_ball_rejected():
    with pytest.raises(PreconditionError):
        complement_components(build_builtin("line"), [5], 3)


def test_bonding_is_inclusion_and_composites_agree():
    g = build_builtin("tree", [3])
    Ks = [ball(g, r).vertices for r in range(3)]
    system = ends_system(g, Ks, 4)
    for j in range(len(Ks)):
        for i in range(j + 1):
            comp = system.composite(i, j)
            for U, V in comp.items():
                assert set(system.stages[j].component(U).members) <= set(system.stages[i].component(V).members)
    # each coarse component has degree - 1 children in the tree
    b = system.bondings[1]
    assert sorted(list(b.values()).count(v) for v in set(b.values())) == [2] * 6


def test_stage_boundary_map_on_line():
    g = build_builtin("line")
    stage = complement_components(g, [0], 3)
    owner = {stage.owner[-1]: "left", stage.owner[1]: "right"}
    names = lambda s: {owner[c] for c in s}
    assert names(stage_boundary_map(Finite([1, 2, 3]), stage, g)) == set()
    assert names(stage_boundary_map(Cofinite([]), stage, g)) == {"left", "right"}
    assert names(stage_boundary_map(ComponentCone([0], 5), stage, g)) == {"right"}
    assert names(stage_boundary_map(Coset(3, 1, upper=0), stage, g)) == {"left"}
    act = translation_action(1, [0])
    # a translated right ray is still a right ray
    assert names(stage_boundary_map(Translate(-20, ComponentCone([0], 5)), stage, g, act)) == {"right"}
    assert names(stage_boundary_map(Translate(7, ComponentCone([0], -1)), stage, g, act)) == {"left"}
    assert names(stage_boundary_map(Union((Finite([4]), Coset(2, 0, lower=3))), stage, g)) == {"right"}


def test_quotient_validates_partition():
    g = build_builtin("line")
    stage = complement_components(g, [0], 3)
    a, b = stage.unbounded_ids
    q = universal_quotient(stage, {"x": [a], "y": [b]})
    assert q.surjective and set(q.mapping.values()) == {"x", "y"}
    with pytest.raises(InvalidTarget):
        universal_quotient(stage, {"x": [a]})
    with pytest.raises(InvalidTarget):
        universal_quotient(stage, {"x": [a, b], "y": [a]})


def test_commutation_on_tree():
    g = build_builtin("tree", [3])
    coarse = complement_components(g, ball(g, 0).vertices, 3)
    fine = complement_components(g, ball(g, 1).vertices, 3)
    b = bonding(fine, coarse)
    saturated = {f"P{V}": [U for U in fine.unbounded_ids if b[U] == V] for V in coarse.unbounded_ids}
    assert commutation_check(fine, coarse, saturated).passed
    first = fine.unbounded_ids[0]
    unsaturated = {"one": [first], "rest": [U for U in fine.unbounded_ids if U != first]}
    v = commutation_check(fine, coarse, unsaturated)
    assert v.status == "fail" and v.detail["unsaturated_fibres"]
