"""Moving boundary maps between a group and a space it acts on.

For a cocompact action with fundamental domain ``K``::

    Π_K(S) = {g : gK ∩ S ≠ ∅}        (closed sets of X -> closed sets of G)
    Λ_K(F) = FK                      (closed sets of G -> closed sets of X)

A boundary map ``∂`` on ``G`` transfers to ``S ↦ ∂(Π_K(S))`` on ``X`` and a
map ``f`` on ``X`` to ``F ↦ f(Λ_K(F))`` on ``G``.  Both set maps are computed
exactly for Z acting by translation on an integer space; other actions raise
:class:`UnsupportedExpression`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConsistencyError, InconclusiveError, PreconditionError, UnsupportedExpression
from .graph_core import ActionModel, Word, z_k
from .periodic import PeriodicSet
from .setexpr import EVERYTHING, Coset, Finite, SetExpr, Cofinite, union
from .spaces import IntegerSpace, integers_space
from .sum_of_spaces import BoundaryMap, eval_map, maps_equal, one_point_map, region_map, verify_admissible
from .verdict import FAIL, PASS, Verdict


def _orbit(action: ActionModel, X) -> tuple[int, tuple[int, ...]]:
    if not isinstance(X, IntegerSpace) or not action.translation_step:
        raise UnsupportedExpression(f"symbolic transfer needs Z translating an integer space, got {action.label}")
    return action.translation_step, tuple(sorted(action.fundamental_domain))


def pi_K(S: SetExpr, action: ActionModel, X: IntegerSpace, G: IntegerSpace | None = None) -> SetExpr:
    """``{g : gK ∩ S ≠ ∅}`` as an expression over ``G``."""
    G = G or integers_space()
    step, K = _orbit(action, X)
    s = X.denote(S)
    out = PeriodicSet.empty()
    for k in K:
        out |= s.preimage(step, k, 1)
    return G.to_expr(out)


def lambda_K(F: SetExpr, action: ActionModel, X: IntegerSpace, G: IntegerSpace | None = None) -> SetExpr:
    """``FK`` as an expression over ``X``."""
    G = G or integers_space()
    step, K = _orbit(action, X)
    f = G.denote(F)
    out = PeriodicSet.empty()
    for k in K:
        out |= f.image(step, k, 1)
    return X.to_expr(out & X.universe)


def _checked(f: BoundaryMap) -> BoundaryMap:
    if f.table:
        v = verify_admissible(f)
        if not v.passed:
            raise ConsistencyError(f"transfer broke admissibility: {v.detail}")
    return f


def transfer_G_to_X(
    d: BoundaryMap,
    action: ActionModel,
    X: IntegerSpace,
    generators: Iterable[SetExpr] = (),
) -> BoundaryMap:
    """``∂_{Π_K} = ∂ ∘ Π_K``."""

    def rule(S: SetExpr):
        return eval_map(d, pi_K(S, action, X, d.space))

    f = BoundaryMap(X, d.codomain, (), rule, d.left_action, f"{d.label}_Π")
    return _checked(f.with_table(generators))


def transfer_X_to_G(
    f: BoundaryMap,
    action: ActionModel,
    G: IntegerSpace | None = None,
    generators: Iterable[SetExpr] = (),
) -> BoundaryMap:
    """``f_{Λ_K} = f ∘ Λ_K``."""
    G = G or integers_space()

    def rule(F: SetExpr):
        return eval_map(f, lambda_K(F, action, f.space, G))

    d = BoundaryMap(G, f.codomain, (), rule, f.left_action, f"{f.label}_Λ")
    return _checked(d.with_table(generators))


def roundtrip_map(d: BoundaryMap, action: ActionModel, X: IntegerSpace, generators: Iterable[SetExpr] = ()) -> BoundaryMap:
    """``(∂_{Π_K})_{Λ_K}`` with its table on ``generators`` (default: those of ``d``)."""
    gens = list(generators) or d.generators
    there = transfer_G_to_X(d, action, X)
    return transfer_X_to_G(there, action, d.space, gens)


@dataclass(frozen=True)
class RoundTrip:
    F: SetExpr
    lhs: frozenset[str]
    rhs: frozenset[str]
    direct: frozenset[str]
    z_k: tuple[int, ...]

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "F": repr(self.F),
            "lhs": sorted(self.lhs),
            "rhs": sorted(self.rhs),
            "direct": sorted(self.direct),
            "Z_K": list(self.z_k),
            "equal": self.equal,
            "recovers": self.lhs == self.direct,
        }


def roundtrip_check(d: BoundaryMap, F: SetExpr, action: ActionModel, X: IntegerSpace) -> RoundTrip:
    """Compare ``(∂_{Π_K})_{Λ_K}(F)`` with ``⋃_{z ∈ Z_K} ∂(Fz)``, ``Z_K`` by enumeration."""
    G = d.space
    there = transfer_G_to_X(d, action, X)
    back = transfer_X_to_G(there, action, G)
    lhs = eval_map(back, F)
    zs = tuple(sorted(action.exponent(w) for w in z_k(action)))
    rhs = frozenset().union(*(eval_map(d, G.right_translate(F, z)) for z in zs))
    return RoundTrip(F, lhs, rhs, eval_map(d, F), zs)


# -- invariance -----------------------------------------------------------


def _word(d: BoundaryMap, g) -> Word:
    if isinstance(g, tuple):
        return g
    name = next(iter(d.left_action), "a")
    return ((name, 1 if g > 0 else -1),) * abs(g)


def _length(g) -> int:
    return abs(g) if isinstance(g, int) else len(g)


def quasi_perspectivity_check(d: BoundaryMap, bound: int = 4, generators: Sequence[SetExpr] | None = None) -> Verdict:
    """Right invariance ``∂(Fg) = ∂(F)`` and left equivariance ``∂(gF) = ψ(g, ∂F)``."""
    G = d.space
    gens = list(generators) if generators is not None else d.generators
    elements = [g for g in G.elements(bound) if _length(g)]
    for F in gens:
        base = eval_map(d, F)
        for g in elements:
            right = eval_map(d, G.right_translate(F, g))
            if right != base:
                return Verdict(
                    FAIL,
                    "quasi-perspectivity",
                    {"side": "right", "F": repr(F), "g": g, "value_Fg": right, "value_F": base},
                )
            left = eval_map(d, G.translate(F, g))
            expected = d.psi(_word(d, g), base)
            if left != expected:
                return Verdict(
                    FAIL,
                    "quasi-perspectivity",
                    {"side": "left", "F": repr(F), "g": g, "value_gF": left, "psi_value": expected},
                )
    return Verdict(PASS, "quasi-perspectivity", {"generators": len(gens), "elements": len(elements)})


def k_independence_check(
    d: BoundaryMap,
    K: Iterable[int],
    K2: Iterable[int],
    action: ActionModel,
    X: IntegerSpace,
    generators: Sequence[SetExpr],
    bound: int = 4,
) -> Verdict:
    qp = quasi_perspectivity_check(d, bound)
    if not qp.passed:
        raise PreconditionError(f"refused: {d.label} is not quasi-perspective ({qp.detail})")
    f1 = transfer_G_to_X(d, action.with_domain(K), X, generators)
    f2 = transfer_G_to_X(d, action.with_domain(K2), X, generators)
    v = maps_equal(f1, f2)
    return Verdict(v.status, "K-independence", {"K": sorted(K), "K2": sorted(K2), **v.detail})


def perspectivize(d: BoundaryMap, bound: int = 8, generators: Sequence[SetExpr] | None = None) -> BoundaryMap:
    """``F ↦ ⋃_g ∂(Fg)`` over the right orbit; Y is finite so no closure is needed.

    The orbit of values must stop growing in the first half of the
    enumeration, otherwise the bound is judged too small.
    """
    G = d.space
    elements = G.elements(bound)

    def rule(F: SetExpr):
        acc: frozenset[str] = frozenset()
        last = 0
        for g in elements:
            new = acc | eval_map(d, G.right_translate(F, g))
            if new != acc:
                acc, last = new, _length(g)
        if 2 * last > bound:
            raise InconclusiveError(f"values over the orbit of {F!r} still grow at length {last} (bound {bound})")
        return acc

    gens = list(generators) if generators is not None else d.generators
    return BoundaryMap(G, d.codomain, (), rule, d.left_action, f"{d.label}~").with_table(gens)


def galois_check(action: ActionModel, X: IntegerSpace, group_sets: Iterable[SetExpr], space_sets: Iterable[SetExpr], G: IntegerSpace | None = None) -> Verdict:
    """``Π_K Λ_K ⊇ id`` and ``Λ_K Π_K ⊇ id`` on the given sets."""
    G = G or integers_space()
    for F in group_sets:
        if not G.subset(F, pi_K(lambda_K(F, action, X, G), action, X, G)):
            return Verdict(FAIL, "galois", {"side": "ΠΛ", "set": repr(F)})
    for S in space_sets:
        if not X.subset(S, lambda_K(pi_K(S, action, X, G), action, X, G)):
            return Verdict(FAIL, "galois", {"side": "ΛΠ", "set": repr(S)})
    return Verdict(PASS, "galois", {})


# -- standard boundaries of Z -----------------------------------------------


def group_corpus() -> list[SetExpr]:
    """Generators used for Z-boundaries: finite sets, rays, cosets and mixtures."""
    return [
        Finite([0]),
        Finite([-2, 5]),
        Coset(1, 0, lower=0),
        Coset(1, 0, upper=0),
        Coset(2, 0),
        Coset(2, 1),
        Coset(3, 0),
        Coset(3, 1),
        Coset(3, 2),
        Coset(3, 0, lower=0),
        Coset(3, 1, upper=-4),
        Coset(4, 3, lower=2),
        union(Finite([1]), Coset(5, 2, upper=0)),
        Cofinite([0, 1]),
        EVERYTHING,
    ]


def space_corpus(X: IntegerSpace) -> list[SetExpr]:
    s = X.step
    return [
        Finite([0]),
        Finite([0, 3 * s]),
        Coset(s, 0, lower=10 * s),
        Coset(s, 0, upper=-s),
        Coset(2 * s, 0),
        Coset(3 * s, s, lower=0),
        EVERYTHING,
    ]


def two_ends_map(space: IntegerSpace | None = None, generators: Iterable[SetExpr] | None = None) -> BoundaryMap:
    space = space or integers_space()
    regions = {"left": Coset(1, 0, upper=-1), "right": Coset(1, 0, lower=1)}
    gens = group_corpus() if generators is None and space.name == "Z" else list(generators or ())
    return region_map(space, regions, gens, {"a": {"left": "left", "right": "right"}}, "ends")


def residue_map(m: int = 3, generators: Iterable[SetExpr] | None = None) -> BoundaryMap:
    """Z with ``m`` added points; ``x_i`` attracts the coset ``i + mZ`` and Z rotates them."""
    G = integers_space()
    regions = {f"x{i}": Coset(m, i) for i in range(m)}
    psi = {"a": {f"x{i}": f"x{(i + 1) % m}" for i in range(m)}}
    gens = group_corpus() if generators is None else list(generators)
    return region_map(G, regions, gens, psi, f"{m}-point")


def one_point_group_map(generators: Iterable[SetExpr] | None = None) -> BoundaryMap:
    gens = group_corpus() if generators is None else list(generators)
    return one_point_map(integers_space(), gens)
