"""Discrete spaces that set expressions are interpreted in.

``IntegerSpace`` covers spaces whose vertex ids form an ultimately periodic set
of integers on which Z acts by a fixed shift (the line, scaled lines, the
ladder, and Z itself).  There every expression denotes a
:class:`~compactify.periodic.PeriodicSet` and all questions are decided exactly.

``GraphSpace`` covers the other builtins (grids, trees).  Only structural
questions are answered there: finiteness and whether a union covers ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ends import (
    _component_region,
    _refine_radius,
    complement_components,
    push_translate,
)
from .errors import PreconditionError, UnsupportedExpression
from .graph_core import ActionModel, Graph, Word, ball, build_builtin, translation_action
from .periodic import PeriodicSet
from .setexpr import (
    EMPTY,
    EVERYTHING,
    Cofinite,
    ComponentCone,
    Coset,
    Empty,
    Finite,
    GeneratorRef,
    SetExpr,
    Translate,
    Union,
    leaves,
    normalize,
    union,
)


def _as_int(element, action: ActionModel | None = None) -> int:
    if isinstance(element, int):
        return element
    return sum(e for _, e in element)


@dataclass(frozen=True, eq=False)
class IntegerSpace:
    name: str
    universe: PeriodicSet
    step: int = 1
    graph: Graph | None = None
    names: dict[str, SetExpr] = field(default_factory=dict)
    _memo: dict = field(default_factory=dict, repr=False)

    # -- interpretation ---------------------------------------------------

    def denote(self, expr: SetExpr) -> PeriodicSet:
        try:
            return self._memo[expr]
        except (KeyError, TypeError):
            pass
        out = self._denote(expr)
        try:
            if len(self._memo) > 50_000:
                self._memo.clear()
            self._memo[expr] = out
        except TypeError:
            pass
        return out

    def _denote(self, expr: SetExpr) -> PeriodicSet:
        if isinstance(expr, Empty):
            return PeriodicSet.empty()
        if isinstance(expr, Finite):
            stray = [v for v in expr.vertices if v not in self.universe]
            if stray:
                raise PreconditionError(f"vertices {stray} are not in {self.name}")
            return PeriodicSet.finite(expr.vertices)
        if isinstance(expr, Cofinite):
            return self.universe - PeriodicSet.finite(expr.excluded)
        if isinstance(expr, Coset):
            return self.universe & PeriodicSet.progression(expr.modulus, expr.residue, expr.lower, expr.upper)
        if isinstance(expr, Union):
            out = PeriodicSet.empty()
            for p in expr.parts:
                out |= self.denote(p)
            return out
        if isinstance(expr, Translate):
            return self.denote(expr.expr).translate(self.step * _as_int(expr.element))
        if isinstance(expr, GeneratorRef):
            if expr.name not in self.names:
                raise UnsupportedExpression(f"unresolved generator reference {expr.name!r}")
            return self.denote(self.names[expr.name])
        if isinstance(expr, ComponentCone):
            return self._cone(expr)
        if hasattr(expr, "denote_in"):
            return expr.denote_in(self)
        raise UnsupportedExpression(f"{self.name} cannot interpret {expr!r}")

    def _cone(self, cone: ComponentCone) -> PeriodicSet:
        if self.graph is None:
            raise UnsupportedExpression(f"{self.name} has no graph structure for cones")
        if cone.component in cone.K:
            raise PreconditionError(f"cone vertex {cone.component} lies in its own K")
        g = self.graph
        R = _refine_radius(g, set(cone.K) | {cone.component}, 2)
        trunc = ball(g, R)
        stage = complement_components(g, cone.K, R, trunc)
        comp = stage.component(stage.owner[cone.component])
        return _component_region(g, trunc, comp)

    def to_expr(self, ps: PeriodicSet) -> SetExpr:
        """Canonical expression for a set of this space (the normal form)."""
        if not ps.issubset(self.universe):
            raise PreconditionError(f"set is not contained in {self.name}")
        rest = self.universe - ps
        if rest.is_finite():
            return Cofinite(rest.members())
        if ps.is_finite():
            return Finite(ps.members()) if not ps.is_empty() else EMPTY
        p, n = ps.period, ps.cutoff
        two_sided = ps.pos == ps.neg and ps.core == frozenset(
            x for x in range(-n, n + 1) if x % p in ps.pos
        )
        if two_sided:
            return union(*(Coset(p, r) for r in sorted(ps.pos)))
        parts: list[SetExpr] = []
        if ps.core:
            parts.append(Finite(ps.core))
        parts.extend(Coset(p, r, lower=n + 1) for r in sorted(ps.pos))
        parts.extend(Coset(p, r, upper=-n - 1) for r in sorted(ps.neg))
        return union(*parts)

    def normalize(self, expr: SetExpr) -> SetExpr:
        return self.to_expr(self.denote(expr))

    # -- decisions --------------------------------------------------------

    def is_finite(self, expr: SetExpr) -> bool:
        return self.denote(expr).is_finite()

    def is_empty(self, expr: SetExpr) -> bool:
        return self.denote(expr).is_empty()

    def equals(self, a: SetExpr, b: SetExpr) -> bool:
        return self.denote(a) == self.denote(b)

    def covers(self, expr: SetExpr) -> bool:
        return self.denote(expr) == self.universe

    def contains(self, expr: SetExpr, v: int) -> bool:
        return v in self.denote(expr)

    def subset(self, a: SetExpr, b: SetExpr) -> bool:
        return self.denote(a).issubset(self.denote(b))

    def universe_expr(self) -> SetExpr:
        return EVERYTHING

    def translate(self, expr: SetExpr, g) -> SetExpr:
        return Translate(_as_int(g), expr)

    right_translate = translate  # Z is abelian

    def elements(self, bound: int) -> list[int]:
        return sorted(range(-bound, bound + 1), key=lambda z: (abs(z), -z))

    def sample_finite(self) -> list[SetExpr]:
        base = min((x for x in self.universe.window(0, 64)), default=0)
        return [Finite([base]), Finite([base, base + self.step])]

    def describe(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class GraphSpace:
    graph: Graph
    action: ActionModel | None = None
    names: dict[str, SetExpr] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.graph.label

    def _resolve(self, expr: SetExpr) -> SetExpr:
        if isinstance(expr, GeneratorRef):
            if expr.name not in self.names:
                raise UnsupportedExpression(f"unresolved generator reference {expr.name!r}")
            return self._resolve(self.names[expr.name])
        if isinstance(expr, Union):
            return Union(tuple(self._resolve(p) for p in expr.parts))
        if isinstance(expr, Translate):
            if self.action is None:
                raise UnsupportedExpression("translation needs an action")
            el = expr.element if isinstance(expr.element, tuple) else self.action.power(expr.element)
            return push_translate(self._resolve(expr.expr), lambda v: self.action.act(el, v))
        if isinstance(expr, Coset):
            raise UnsupportedExpression(f"coset expressions need an integer space, not {self.name}")
        return expr

    def _cone_unbounded(self, cone: ComponentCone) -> bool:
        R = _refine_radius(self.graph, set(cone.K) | {cone.component}, 2)
        st = complement_components(self.graph, cone.K, R)
        return st.owner[cone.component] in st.unbounded_ids

    def is_finite(self, expr: SetExpr) -> bool:
        expr = self._resolve(expr)
        for leaf in leaves(expr):
            if isinstance(leaf, (Empty, Finite)):
                continue
            if isinstance(leaf, Cofinite):
                if self.graph.is_explicit and not self.graph.stubs:
                    continue
                return False
            if isinstance(leaf, ComponentCone):
                if self._cone_unbounded(leaf):
                    return False
                continue
            raise UnsupportedExpression(f"cannot decide finiteness of {leaf!r}")
        return True

    def is_empty(self, expr: SetExpr) -> bool:
        expr = self._resolve(expr)
        return all(isinstance(x, Empty) or (isinstance(x, Finite) and not x.vertices) for x in leaves(expr))

    def covers(self, expr: SetExpr) -> bool:
        """Whether ``expr`` is all of ``X``; decided on a refined stage."""
        parts = leaves(self._resolve(expr))
        K: set[int] = set()
        for p in parts:
            if isinstance(p, Finite):
                K |= set(p.vertices)
            elif isinstance(p, Cofinite):
                K |= set(p.excluded)
            elif isinstance(p, ComponentCone):
                K |= set(p.K) | {p.component}
            elif not isinstance(p, Empty):
                raise UnsupportedExpression(f"cannot decide cover by {p!r}")
        if not any(isinstance(p, (Cofinite, ComponentCone)) for p in parts):
            return False
        R = _refine_radius(self.graph, K | {self.graph.basepoint}, 2)
        trunc = ball(self.graph, R)
        fine = complement_components(self.graph, K, R, trunc)
        cones = [
            (p, complement_components(self.graph, p.K, R, trunc)) for p in parts if isinstance(p, ComponentCone)
        ]

        def member(v: int) -> bool:
            for p in parts:
                if isinstance(p, Finite) and v in p.vertices:
                    return True
                if isinstance(p, Cofinite) and v not in p.excluded:
                    return True
            for p, st in cones:
                if v not in p.K and st.owner.get(v) == st.owner[p.component]:
                    return True
            return False

        if not all(member(v) for v in trunc.vertices):
            return False
        for W in fine.unbounded_ids:
            if any(isinstance(p, Cofinite) for p in parts):
                continue
            if not any(st.owner[W] == st.owner[p.component] for p, st in cones):
                return False
        return True

    def equals(self, a: SetExpr, b: SetExpr) -> bool:
        if normalize(a) == normalize(b):
            return True
        raise UnsupportedExpression(f"extensional equality is not decidable on {self.name}")

    def universe_expr(self) -> SetExpr:
        return EVERYTHING

    def normalize(self, expr: SetExpr) -> SetExpr:
        return normalize(expr)

    def translate(self, expr: SetExpr, g: Word) -> SetExpr:
        return Translate(g, expr)

    def elements(self, bound: int) -> list[Word]:
        if self.action is None:
            return [()]
        return self.action.elements(bound, reference={self.graph.basepoint} | set(self.action.fundamental_domain))

    def sample_finite(self) -> list[SetExpr]:
        b = self.graph.basepoint
        return [Finite([b]), Finite(ball(self.graph, 1).vertices)]

    def describe(self) -> str:
        return self.name


# -- standard spaces ------------------------------------------------------


def integers_space(names: Mapping[str, SetExpr] | None = None) -> IntegerSpace:
    """Z as a group, with its Cayley graph the line."""
    return IntegerSpace("Z", PeriodicSet.integers(), 1, build_builtin("line"), dict(names or {}))


def line_space(step: int = 1) -> IntegerSpace:
    g = build_builtin("line", [step])
    return IntegerSpace(g.label, PeriodicSet.progression(step, 0), step, g)


def ladder_space() -> IntegerSpace:
    return IntegerSpace("ladder", PeriodicSet.integers(), 2, build_builtin("ladder"))


def space_for(graph: Graph, action: ActionModel | None = None):
    if graph.kind == "line":
        return IntegerSpace(graph.label, PeriodicSet.progression(graph.params[0], 0), graph.params[0], graph)
    if graph.kind == "ladder":
        return IntegerSpace("ladder", PeriodicSet.integers(), 2, graph)
    return GraphSpace(graph, action)


def standard_action(space: IntegerSpace, K: Iterable[int], bound: int = 4) -> ActionModel:
    return translation_action(space.step, K, bound)
