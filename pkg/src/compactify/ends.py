"""Finite stages of the end space of a locally finite graph.

A stage is the set of unbounded components of ``X - K`` for a finite ``K``,
computed inside a ball truncation.  A component is unbounded exactly when it
is infinite; inside the truncation that is read off as "touches the boundary
sphere", which is sound as long as ``K`` sits strictly inside the ball.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import ConsistencyError, InvalidTarget, PreconditionError, UnsupportedExpression
from .graph_core import ActionModel, Graph, Truncation, ball
from .periodic import PeriodicSet
from .setexpr import (
    Cofinite,
    ComponentCone,
    Coset,
    Empty,
    Finite,
    GeneratorRef,
    SetExpr,
    Translate,
    Union,
)
from .verdict import FAIL, PASS, Verdict


@dataclass(frozen=True)
class Component:
    id: int
    members: tuple[int, ...]
    touches_sphere: bool


@dataclass(frozen=True)
class EndsStage:
    K: frozenset[int]
    radius: int
    components: tuple[Component, ...]
    unbounded_ids: tuple[int, ...]
    owner: Mapping[int, int] = field(compare=False, repr=False)

    def component(self, cid: int) -> Component:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_json(self) -> dict:
        return {
            "stage_radius": self.radius,
            "K": sorted(self.K),
            "component_count": len(self.unbounded_ids),
            "unbounded_ids": list(self.unbounded_ids),
            "bounded_ids": [c.id for c in self.components if c.id not in self.unbounded_ids],
        }


def complement_components(graph: Graph, K: Iterable[int], radius: int, trunc: Truncation | None = None) -> EndsStage:
    K = frozenset(K)
    if radius < 1:
        raise PreconditionError("radius must be >= 1")
    trunc = trunc if trunc is not None and trunc.radius == radius else ball(graph, radius)
    outside = [v for v in K if v not in trunc or trunc.distance[v] > radius - 1]
    if outside:
        raise PreconditionError(f"K must lie in ball(radius - 1); offending vertices {sorted(outside)}")
    inside = set(trunc.vertices) - K
    owner: dict[int, int] = {}
    comps = []
    for v in trunc.vertices:
        if v not in inside or v in owner:
            continue
        members = [v]
        owner[v] = v
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for w in graph.neighbors(x):
                if w in inside and w not in owner:
                    owner[w] = v
                    members.append(w)
                    queue.append(w)
        members.sort(key=lambda u: (trunc.distance[u], u))
        if graph.is_explicit:
            unbounded = any(m in graph.stubs for m in members)
        else:
            unbounded = any(m in trunc.sphere for m in members)
        comps.append(Component(v, tuple(members), unbounded))
    unbounded_ids = tuple(c.id for c in comps if c.touches_sphere)
    return EndsStage(K, radius, tuple(comps), unbounded_ids, owner)


def bonding(fine: EndsStage, coarse: EndsStage) -> dict[int, int]:
    """Map each unbounded component of ``X - K2`` to the one of ``X - K1`` containing it."""
    if not coarse.K <= fine.K:
        raise PreconditionError("bonding needs K1 ⊆ K2 (coarse.K ⊆ fine.K)")
    if fine.radius != coarse.radius:
        raise PreconditionError("both stages must use the same truncation radius")
    out = {}
    for cid in fine.unbounded_ids:
        targets = {coarse.owner.get(m) for m in fine.component(cid).members}
        if len(targets) != 1 or None in targets:
            raise ConsistencyError(f"component {cid} is not contained in a single coarse component")
        (t,) = targets
        if t not in coarse.unbounded_ids:
            raise ConsistencyError(f"unbounded component {cid} lands in bounded component {t}")
        out[cid] = t
    return out


@dataclass(frozen=True)
class EndsSystem:
    stages: tuple[EndsStage, ...]
    bondings: tuple[dict[int, int], ...]

    def composite(self, i: int, j: int) -> dict[int, int]:
        """Bonding from stage ``j`` down to stage ``i`` (``i <= j``) by composing steps."""
        m = {c: c for c in self.stages[j].unbounded_ids}
        for k in range(j - 1, i - 1, -1):
            m = {c: self.bondings[k][t] for c, t in m.items()}
        return m

    def to_json(self) -> dict:
        return {
            "stages": [s.to_json() for s in self.stages],
            "bonding": [{str(k): v for k, v in b.items()} for b in self.bondings],
        }

    def to_dot(self, name: str = "ends") -> str:
        lines = [f"digraph {name} {{", "  rankdir=TB;"]
        for i, st in enumerate(self.stages):
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append(f'    label="K={_short(st.K)}";')
            for cid in st.unbounded_ids:
                lines.append(f'    s{i}_{cid} [label="{cid}"];')
            lines.append("  }")
        for i, b in enumerate(self.bondings):
            for src, dst in sorted(b.items()):
                lines.append(f"  s{i + 1}_{src} -> s{i}_{dst};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _short(K: frozenset[int]) -> str:
    vs = sorted(K)
    return "{" + ",".join(map(str, vs)) + "}" if len(vs) <= 6 else f"{len(vs)} vertices"


def ends_system(graph: Graph, Ks: list[Iterable[int]], radius: int) -> EndsSystem:
    trunc = ball(graph, radius)
    stages = tuple(complement_components(graph, K, radius, trunc) for K in Ks)
    bonds = tuple(bonding(stages[i + 1], stages[i]) for i in range(len(stages) - 1))
    return EndsSystem(stages, bonds)


@dataclass(frozen=True)
class EndsClassification:
    kind: str  # "stabilized" or "growing"
    count: int | None
    counts: tuple[int, ...]
    bijective_last: bool
    system: EndsSystem = field(repr=False, compare=False)

    def __str__(self) -> str:
        if self.kind == "stabilized":
            return str(self.count)
        return "growing " + ", ".join(map(str, self.counts))

    def to_json(self) -> dict:
        return {
            "classification": str(self),
            "kind": self.kind,
            "count": self.count,
            "counts": list(self.counts),
            "bijective_last": self.bijective_last,
        }


def ends_classification(graph: Graph, max_radius: int) -> EndsClassification:
    """Unbounded-component counts for ``K = ball(r - 1)``, ``r = 1 .. max_radius - 1``.

    Stage ``r`` removes every vertex at distance ``< r``.  The count is called
    stabilised when the last two stages agree and their bonding is a bijection;
    this is a two-stage certificate, not a proof.
    """
    if max_radius < 3:
        raise PreconditionError("max_radius must be >= 3")
    trunc = ball(graph, max_radius)
    Ks = [[v for v in trunc.vertices if trunc.distance[v] <= r - 1] for r in range(1, max_radius)]
    system = ends_system(graph, Ks, max_radius)
    counts = tuple(len(s.unbounded_ids) for s in system.stages)
    last = system.bondings[-1]
    bij = len(set(last.values())) == len(last) == len(system.stages[-2].unbounded_ids)
    if counts[-1] == counts[-2] and bij:
        return EndsClassification("stabilized", counts[-1], counts, True, system)
    return EndsClassification("growing", None, counts, bij, system)


# -- the stage boundary map f_K -------------------------------------------


def _line_like_tail(graph: Graph, trunc: Truncation, side: int) -> PeriodicSet:
    """Vertices of a line or ladder outside ``trunc`` on one side (ids of that sign)."""
    if graph.kind == "line":
        universe = PeriodicSet.progression(graph.params[0], 0)
    elif graph.kind == "ladder":
        universe = PeriodicSet.integers()
    else:
        raise UnsupportedExpression(f"coset expressions need a line-like graph, not {graph.label}")
    half = PeriodicSet.progression(1, 0, lower=1) if side > 0 else PeriodicSet.progression(1, 0, upper=-1)
    return (universe & half) - PeriodicSet.finite(trunc.vertices)


def _component_region(graph: Graph, trunc: Truncation, comp: Component) -> PeriodicSet:
    region = PeriodicSet.finite(comp.members)
    if comp.touches_sphere:
        for side in (1, -1):
            if any(m in trunc.sphere and (m > 0) == (side > 0) and m != 0 for m in comp.members):
                region |= _line_like_tail(graph, trunc, side)
    return region


def _refine_radius(graph: Graph, vertices: Iterable[int], floor: int) -> int:
    probe = ball(graph, floor)
    vs = list(vertices)
    r = floor
    while any(v not in probe for v in vs):
        r += 2
        probe = ball(graph, r)
    far = max((probe.distance[v] for v in vs), default=0)
    return max(floor, far + 2)


def cone_meets(graph: Graph, stage: EndsStage, cone: ComponentCone) -> frozenset[int]:
    """Unbounded components ``U`` of ``stage`` with ``U ∩ cone`` infinite."""
    Kc = frozenset(cone.K)
    if cone.component in Kc:
        raise PreconditionError(f"cone vertex {cone.component} lies in its own K")
    R = _refine_radius(graph, stage.K | Kc | {cone.component}, stage.radius)
    trunc = ball(graph, R)
    fine = complement_components(graph, stage.K | Kc, R, trunc)
    base = complement_components(graph, stage.K, R, trunc)
    cones = complement_components(graph, Kc, R, trunc)
    target = cones.owner[cone.component]
    hit = set()
    for U in stage.unbounded_ids:
        big = base.owner[U]
        for W in fine.unbounded_ids:
            if base.owner[W] == big and cones.owner[W] == target:
                hit.add(U)
                break
    return frozenset(hit)


def push_translate(expr: SetExpr, vertex_map: Callable[[int], int]) -> SetExpr:
    """Apply a vertex bijection to a set expression, eliminating the translation."""
    if isinstance(expr, Empty):
        return expr
    if isinstance(expr, Finite):
        return Finite(vertex_map(v) for v in expr.vertices)
    if isinstance(expr, Cofinite):
        return Cofinite(vertex_map(v) for v in expr.excluded)
    if isinstance(expr, ComponentCone):
        return ComponentCone((vertex_map(v) for v in expr.K), vertex_map(expr.component))
    if isinstance(expr, Union):
        return Union(tuple(push_translate(p, vertex_map) for p in expr.parts))
    raise UnsupportedExpression(f"cannot translate {expr!r} by a vertex map")


def stage_boundary_map(
    F: SetExpr,
    stage: EndsStage,
    graph: Graph,
    action: ActionModel | None = None,
    names: Mapping[str, SetExpr] | None = None,
) -> frozenset[int]:
    """``{U : U ∩ F infinite}``, decided on the structure of ``F``."""
    if isinstance(F, (Empty, Finite)):
        return frozenset()
    if isinstance(F, Cofinite):
        return frozenset(stage.unbounded_ids)
    if isinstance(F, Union):
        out: frozenset[int] = frozenset()
        for p in F.parts:
            out |= stage_boundary_map(p, stage, graph, action, names)
        return out
    if isinstance(F, ComponentCone):
        return cone_meets(graph, stage, F)
    if isinstance(F, GeneratorRef):
        if not names or F.name not in names:
            raise UnsupportedExpression(f"unresolved generator reference {F.name!r}")
        return stage_boundary_map(names[F.name], stage, graph, action, names)
    if isinstance(F, Translate):
        if action is None:
            raise UnsupportedExpression("translation needs an action")
        el = F.element if isinstance(F.element, tuple) else action.power(F.element)
        inner = F.expr
        if isinstance(inner, GeneratorRef) and names and inner.name in names:
            inner = names[inner.name]
        return stage_boundary_map(
            push_translate(inner, lambda v: action.act(el, v)), stage, graph, action, names
        )
    if isinstance(F, Coset):
        trunc = ball(graph, stage.radius)
        cos = PeriodicSet.progression(F.modulus, F.residue, F.lower, F.upper)
        hit = set()
        for U in stage.unbounded_ids:
            if _component_region(graph, trunc, stage.component(U)).meets_infinitely(cos):
                hit.add(U)
        return frozenset(hit)
    raise UnsupportedExpression(f"unsupported expression {F!r}")


# -- universal quotient zeta_K --------------------------------------------


@dataclass(frozen=True)
class Quotient:
    mapping: dict[int, str]
    labels: tuple[str, ...]
    surjective: bool

    def to_json(self) -> dict:
        return {"map": {str(k): v for k, v in self.mapping.items()}, "surjective": self.surjective}


def universal_quotient(stage: EndsStage, partition: Mapping[str, Iterable[int]]) -> Quotient:
    """The map sending each unbounded component to the label of its block."""
    mapping: dict[int, str] = {}
    for label, block in partition.items():
        for cid in block:
            if cid not in stage.unbounded_ids:
                raise InvalidTarget(f"{cid} is not an unbounded component of the stage")
            if cid in mapping:
                raise InvalidTarget(f"component {cid} appears in two blocks")
            mapping[cid] = label
    missing = [c for c in stage.unbounded_ids if c not in mapping]
    if missing:
        raise InvalidTarget(f"partition misses components {missing}")
    labels = tuple(partition)
    return Quotient(mapping, labels, set(mapping.values()) == set(labels))


def commutation_check(
    fine: EndsStage,
    coarse: EndsStage,
    fine_partition: Mapping[str, Iterable[int]],
    coarse_partition: Mapping[str, Iterable[int]] | None = None,
    label_map: Mapping[str, str] | None = None,
) -> Verdict:
    """Commuting square ``zeta_1 ∘ bonding = eta ∘ zeta_2`` between two stages.

    Without a coarse partition one is induced through the bonding map; that
    succeeds exactly when every bonding fibre lies in a single block.
    """
    b = bonding(fine, coarse)
    z2 = universal_quotient(fine, fine_partition)
    if coarse_partition is None:
        induced: dict[int, set[str]] = {}
        for U, V in b.items():
            induced.setdefault(V, set()).add(z2.mapping[U])
        split = {V: sorted(ls) for V, ls in induced.items() if len(ls) > 1}
        if split:
            return Verdict(FAIL, "commutation", {"unsaturated_fibres": split})
        blocks: dict[str, list[int]] = {}
        for V in coarse.unbounded_ids:
            (label,) = induced[V]
            blocks.setdefault(label, []).append(V)
        z1 = universal_quotient(coarse, blocks)
        return Verdict(PASS, "commutation", {"induced": z1.mapping, "surjective": z1.surjective})
    z1 = universal_quotient(coarse, coarse_partition)
    eta = dict(label_map) if label_map is not None else {lab: lab for lab in z2.labels}
    bad = [
        {"component": U, "via_bonding": z1.mapping[b[U]], "via_quotient": eta.get(z2.mapping[U])}
        for U in fine.unbounded_ids
        if z1.mapping[b[U]] != eta.get(z2.mapping[U])
    ]
    if bad:
        return Verdict(FAIL, "commutation", {"mismatches": bad})
    return Verdict(PASS, "commutation", {"surjective": z1.surjective and z2.surjective})
