"""Symbolic closed subsets of a discrete space.

Every subset of a discrete space is closed and compact means finite, so a set
expression only has to say *which* vertices it contains.  The variants are
deliberately limited to ones whose infinitude and images can be decided
exactly; see :mod:`compactify.spaces` for the decision procedures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Union as _U

Element = _U[int, tuple]


class SetExpr:
    __slots__ = ()

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return union(self, other)

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Empty(SetExpr):
    def to_json(self):
        return {"type": "empty"}

    def __repr__(self):
        return "∅"


@dataclass(frozen=True)
class Finite(SetExpr):
    vertices: tuple[int, ...]

    def __init__(self, vertices: Iterable[int]):
        object.__setattr__(self, "vertices", tuple(sorted(set(int(v) for v in vertices))))

    def to_json(self):
        return {"type": "finite", "vertices": list(self.vertices)}

    def __repr__(self):
        return "{" + ",".join(map(str, self.vertices)) + "}"


@dataclass(frozen=True)
class Cofinite(SetExpr):
    excluded: tuple[int, ...]

    def __init__(self, excluded: Iterable[int] = ()):
        object.__setattr__(self, "excluded", tuple(sorted(set(int(v) for v in excluded))))

    def to_json(self):
        return {"type": "cofinite", "excluded": list(self.excluded)}

    def __repr__(self):
        return "X" if not self.excluded else "X∖{" + ",".join(map(str, self.excluded)) + "}"


@dataclass(frozen=True)
class ComponentCone(SetExpr):
    """The connected component of ``X - K`` containing the vertex ``component``."""

    K: tuple[int, ...]
    component: int

    def __init__(self, K: Iterable[int], component: int):
        object.__setattr__(self, "K", tuple(sorted(set(int(v) for v in K))))
        object.__setattr__(self, "component", int(component))

    def to_json(self):
        return {"type": "cone", "K": list(self.K), "component": self.component}

    def __repr__(self):
        return f"Cone(K={list(self.K)}, ∋{self.component})"


@dataclass(frozen=True)
class Coset(SetExpr):
    """``{x : x = residue mod modulus}`` optionally cut to ``lower <= x`` / ``x <= upper``.

    Only meaningful on integer-id spaces.  The one-sided forms are what the
    normal form of an ultimately periodic set is written in.
    """

    modulus: int
    residue: int
    lower: int | None = None
    upper: int | None = None

    def __init__(self, modulus: int, residue: int, lower: int | None = None, upper: int | None = None):
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "residue", int(residue) % int(modulus))
        object.__setattr__(self, "lower", None if lower is None else int(lower))
        object.__setattr__(self, "upper", None if upper is None else int(upper))

    def to_json(self):
        out = {"type": "coset", "modulus": self.modulus, "residue": self.residue}
        if self.lower is not None:
            out["lower"] = self.lower
        if self.upper is not None:
            out["upper"] = self.upper
        return out

    def __repr__(self):
        s = f"{self.residue}+{self.modulus}ℤ" if self.modulus > 1 else "ℤ"
        if self.lower is not None:
            s += f"∩[{self.lower},∞)"
        if self.upper is not None:
            s += f"∩(-∞,{self.upper}]"
        return s


@dataclass(frozen=True)
class Translate(SetExpr):
    element: Element
    expr: SetExpr

    def to_json(self):
        el = self.element if isinstance(self.element, int) else [list(x) for x in self.element]
        return {"type": "translate", "element": el, "expr": self.expr.to_json()}

    def __repr__(self):
        return f"{self.element}·{self.expr!r}"


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple[SetExpr, ...]

    def to_json(self):
        return {"type": "union", "parts": [p.to_json() for p in self.parts]}

    def __repr__(self):
        return " ∪ ".join(map(repr, self.parts))


@dataclass(frozen=True)
class GeneratorRef(SetExpr):
    name: str

    def to_json(self):
        return {"type": "ref", "name": self.name}

    def __repr__(self):
        return f"@{self.name}"


EMPTY = Empty()
EVERYTHING = Cofinite(())


def union(*parts: SetExpr) -> SetExpr:
    """Flattened union; no simplification beyond dropping empties."""
    flat: list[SetExpr] = []
    for p in parts:
        if isinstance(p, Union):
            flat.extend(p.parts)
        elif not isinstance(p, Empty):
            flat.append(p)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    return Union(tuple(flat))


def normalize(expr: SetExpr) -> SetExpr:
    """Space-independent normal form: flatten unions, merge finite and cofinite parts, sort.

    Idempotent.  Translates and references are normalised inside but kept.
    """
    if isinstance(expr, Translate):
        return Translate(expr.element, normalize(expr.expr))
    if not isinstance(expr, Union):
        if isinstance(expr, Finite) and not expr.vertices:
            return EMPTY
        return expr
    parts = [normalize(p) for p in expr.parts]
    flat: list[SetExpr] = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, Union) else [p])
    finite: set[int] = set()
    cofinite: set[int] | None = None
    rest: set[SetExpr] = set()
    for p in flat:
        if isinstance(p, Empty):
            continue
        if isinstance(p, Finite):
            finite |= set(p.vertices)
        elif isinstance(p, Cofinite):
            cofinite = set(p.excluded) if cofinite is None else cofinite & set(p.excluded)
        else:
            rest.add(p)
    out: list[SetExpr] = []
    if cofinite is not None:
        out.append(Cofinite(cofinite - finite))
    elif finite:
        out.append(Finite(finite))
    out.extend(sorted(rest, key=repr))
    if not out:
        return EMPTY
    if len(out) == 1:
        return out[0]
    return Union(tuple(out))


def leaves(expr: SetExpr) -> list[SetExpr]:
    if isinstance(expr, Union):
        out = []
        for p in expr.parts:
            out.extend(leaves(p))
        return out
    return [expr]


def from_json(obj: dict[str, Any]) -> SetExpr:
    t = obj["type"]
    if t == "empty":
        return EMPTY
    if t == "finite":
        return Finite(obj["vertices"])
    if t == "cofinite":
        return Cofinite(obj.get("excluded", []))
    if t == "cone":
        return ComponentCone(obj["K"], obj["component"])
    if t == "coset":
        return Coset(obj["modulus"], obj["residue"], obj.get("lower"), obj.get("upper"))
    if t == "translate":
        el = obj["element"]
        el = el if isinstance(el, int) else tuple((str(n), int(e)) for n, e in el)
        return Translate(el, from_json(obj["expr"]))
    if t == "union":
        return Union(tuple(from_json(p) for p in obj["parts"]))
    if t == "ref":
        return GeneratorRef(obj["name"])
    raise ValueError(f"unknown set expression type {t!r}")
