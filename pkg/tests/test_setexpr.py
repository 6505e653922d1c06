from hypothesis import given, settings, strategies as st

from compactify.setexpr import (
    EMPTY,
    Cofinite,
    ComponentCone,
    Coset,
    Finite,
    Translate,
    Union,
    from_json,
    leaves,
    normalize,
    union,
)
from compactify.spaces import integers_space

small = st.sets(st.integers(-6, 6), max_size=4)
leaf = st.one_of(
    st.just(EMPTY),
    small.map(Finite),
    small.map(Cofinite),
    st.builds(lambda m, r, lo: Coset(m, r % m, lower=lo), st.integers(1, 4), st.integers(0, 3), st.one_of(st.none(), st.integers(-5, 5))),
    st.builds(lambda v: ComponentCone([0], v), st.sampled_from([-2, 3])),
)
exprs = st.recursive(
    leaf,
    lambda inner: st.one_of(
        st.lists(inner, min_size=2, max_size=3).map(lambda ps: Union(tuple(ps))),
        st.builds(Translate, st.integers(-3, 3), inner),
    ),
    max_leaves=6,
)


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_normalize_idempotent(e):
    assert normalize(normalize(e)) == normalize(e)


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_json_roundtrip(e):
    assert from_json(e.to_json()) == e


@settings(max_examples=150, deadline=None)
@given(exprs)
def test_normalize_preserves_denotation(e):
    Z = integers_space()
    assert Z.denote(normalize(e)) == Z.denote(e)


def test_union_flattens_and_drops_empties():
    u = union(Finite([1]), EMPTY, union(Finite([2]), Coset(2, 0)))
    assert leaves(u) == [Finite([1]), Finite([2]), Coset(2, 0)]
    assert union() == EMPTY
    assert union(EMPTY, Finite([3])) == Finite([3])


def test_normalize_merges_finite_into_cofinite():
    assert normalize(Union((Finite([1, 2]), Cofinite([2, 5])))) == Cofinite([5])
    assert normalize(Union((Finite([]), EMPTY))) == EMPTY
