import random

import pytest

from compactify.errors import PreconditionError
from compactify.graph_core import build_builtin
from compactify.periodic import PeriodicSet
from compactify.setexpr import EMPTY, EVERYTHING, Cofinite, ComponentCone, Coset, Finite, Translate, union
from compactify.spaces import integers_space, ladder_space, line_space
from compactify.sum_of_spaces import (
    AffineMap,
    closure,
    coarser,
    compactness_check,
    ends_stage_map,
    eval_map,
    hausdorff_check,
    is_dense,
    load_map,
    maps_equal,
    one_point_map,
    pullback,
    pushforward,
    region_map,
    table_map,
    verify_admissible,
)
from compactify.transfer import group_corpus, residue_map, two_ends_map


def test_integer_space_semantics():
    Z = integers_space()
    assert Z.denote(Translate(3, Coset(1, 0, lower=0))) == PeriodicSet.progression(1, 0, lower=3)
    assert Z.is_finite(Finite([1, 2])) and not Z.is_finite(Coset(2, 1))
    assert Z.covers(union(Coset(2, 0), Coset(2, 1)))
    assert Z.normalize(union(Coset(4, 0), Coset(4, 2))) == Coset(2, 0)
    assert Z.elements(2) == [0, 1, -1, 2, -2]


def test_line_space_rejects_stray_vertices():
    X = line_space(3)
    with pytest.raises(PreconditionError):
        X.denote(Finite([1]))
    assert X.denote(EVERYTHING) == PeriodicSet.progression(3, 0)
    assert X.denote(Translate(1, Finite([0]))) == PeriodicSet.finite([3])


def test_ladder_cones():
    X = ladder_space()
    right = X.denote(ComponentCone([0, 1], 2))
    assert right.infinite_right() and not right.infinite_left()


def test_region_map_is_admissible_and_dense():
    f = two_ends_map()
    assert verify_admissible(f, budget=200).passed
    assert is_dense(f)
    assert eval_map(f, Coset(3, 1, upper=-4)) == {"left"}
    assert eval_map(f, Finite([0])) == frozenset()


def test_table_map_admissibility_failure_is_reported():
    Z = integers_space()
    bad = table_map(Z, ["p"], [(Coset(2, 0), ["p"]), (Coset(2, 1), []), (union(Coset(2, 0), Coset(2, 1)), [])])
    v = verify_admissible(bad)
    assert v.status == "fail" and v.detail["law"] == "union"


def test_budget_precondition():
    with pytest.raises(PreconditionError):
        verify_admissible(two_ends_map(), budget=1)


def test_closure_is_extensive_and_idempotent():
    f = two_ends_map()
    rng = random.Random(3)
    for _ in range(40):
        A = union(*rng.sample(group_corpus(), 2))
        B, pts = closure(f, A, ["left"] if rng.random() < 0.5 else [])
        assert eval_map(f, A) <= pts
        assert closure(f, B, pts) == (B, pts)


def test_compactness_and_hausdorff():
    f = two_ends_map()
    assert compactness_check(f, [Coset(2, 0), Coset(1, 0, lower=0)]).passed
    with pytest.raises(PreconditionError):
        compactness_check(f, [Finite([1])])
    assert hausdorff_check(f).passed
    assert hausdorff_check(residue_map()).passed


def test_hausdorff_flags_compact_sets_with_boundary():
    Z = integers_space()
    bad = table_map(Z, ["p", "q"], [(Finite([0]), ["p"])])
    assert hausdorff_check(bad).status == "fail"


def test_coarser_and_equality():
    f = one_point_map(integers_space(), group_corpus())
    ends = two_ends_map()
    assert maps_equal(ends, two_ends_map()).passed
    collapsed = pushforward(ends, AffineMap(integers_space(), integers_space()), {"left": "inf", "right": "inf"}, group_corpus())
    assert maps_equal(collapsed, f).passed
    assert coarser(f, collapsed).passed


def test_pullback_along_even_inclusion_is_subspace_restriction():
    X2, Z = line_space(2), line_space()
    f = region_map(Z, {"left": Coset(1, 0, upper=-1), "right": Coset(1, 0, lower=1)})
    incl = AffineMap(X2, Z)
    pb = pullback(f, incl, {"l": "left", "r": "right"}, [Coset(2, 0, lower=0), Coset(4, 2), Finite([2])])
    assert verify_admissible(pb).passed
    assert eval_map(pb, Coset(2, 0, lower=0)) == {"r"}
    assert eval_map(pb, Coset(4, 2)) == {"l", "r"}
    assert eval_map(pb, Finite([2])) == frozenset()


def test_ends_stage_map_on_grid_and_line():
    line = build_builtin("line")
    f = ends_stage_map(line, [0], 3, labels=None)
    assert len(f.codomain) == 2
    assert eval_map(f, EVERYTHING) == frozenset(f.codomain)
    grid = build_builtin("grid2d")
    g = ends_stage_map(grid, [0], 3)
    assert len(g.codomain) == 1 and eval_map(g, Cofinite([])) == frozenset(g.codomain)


def test_load_map(tmp_path):
    spec = {"codomain": ["p"], "table": [{"gen": {"type": "coset", "modulus": 2, "residue": 0}, "value": ["p"], "name": "evens"}]}
    f = load_map(spec, integers_space())
    assert f.table[0].name == "evens"
    assert eval_map(f, EMPTY) == frozenset()
