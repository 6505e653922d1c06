"""Locally finite graphs with a basepoint, ball truncations and group actions.

Vertices are integer ids.  Builtins fix a canonical coordinate encoding:

* ``line``   -- ``z`` (or ``step*z`` for the scaled line ``line(step)``)
* ``ladder`` -- ``2*z + rail`` with ``rail`` in ``{0, 1}``
* ``grid2d`` / ``cayley(n)`` -- Cantor pairing of zig-zag coordinates
* ``tree(d)`` -- level-order index in the ``d``-regular tree
* ``free(r)`` -- ``tree(2r)`` read as the Cayley graph of the free group
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import CompactifyError, PreconditionError
from .verdict import FAIL, PASS, Verdict

BUILTINS = ("line", "ladder", "grid2d", "tree", "cayley", "free")


@dataclass(frozen=True, eq=False)
class Graph:
    label: str
    basepoint: int
    neighbors: Callable[[int], tuple[int, ...]]
    kind: str = "explicit"
    params: tuple[int, ...] = ()
    # explicit graphs only: declared vertex set and vertices with an undeclared neighbour
    vertices: frozenset[int] | None = None
    stubs: frozenset[int] = frozenset()

    @property
    def is_explicit(self) -> bool:
        return self.vertices is not None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))


@dataclass(frozen=True)
class Truncation:
    radius: int
    vertices: tuple[int, ...]
    sphere: frozenset[int]
    distance: dict[int, int] = field(compare=False, repr=False)

    def __contains__(self, v: int) -> bool:
        return v in self.distance


# -- coordinate encodings -------------------------------------------------


def zigzag(x: int) -> int:
    return 2 * x if x >= 0 else -2 * x - 1


def unzigzag(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def encode_lattice(coords: Sequence[int]) -> int:
    """Encode a point of Z^n; n = 1 is the identity so ``cayley(1)`` is the line."""
    if len(coords) == 1:
        return coords[0]
    code = zigzag(coords[-1])
    for x in reversed(coords[:-1]):
        code = cantor_pair(zigzag(x), code)
    return code


def decode_lattice(code: int, n: int) -> tuple[int, ...]:
    if n == 1:
        return (code,)
    out = []
    for _ in range(n - 1):
        a, code = cantor_unpair(code)
        out.append(unzigzag(a))
    out.append(unzigzag(code))
    return tuple(out)


class _TreeIndex:
    """Level-order indexing of the ``d``-regular tree rooted at 0."""

    def __init__(self, d: int):
        self.d = d

    def level_size(self, h: int) -> int:
        if h == 0:
            return 1
        return self.d * (self.d - 1) ** (h - 1)

    def offset(self, h: int) -> int:
        return sum(self.level_size(i) for i in range(h))

    def locate(self, v: int) -> tuple[int, int]:
        h, off = 0, 0
        while True:
            size = self.level_size(h)
            if size == 0:
                raise ValueError(f"vertex {v} outside tree({self.d})")
            if v < off + size:
                return h, v - off
            off += size
            h += 1

    def vid(self, h: int, p: int) -> int:
        return self.offset(h) + p

    def children(self, v: int) -> list[int]:
        h, p = self.locate(v)
        if h == 0:
            return [self.vid(1, c) for c in range(self.d)]
        k = self.d - 1
        return [self.vid(h + 1, p * k + c) for c in range(k)]

    def parent(self, v: int) -> int | None:
        h, p = self.locate(v)
        if h == 0:
            return None
        if h == 1:
            return 0
        return self.vid(h - 1, p // (self.d - 1))

    def neighbors(self, v: int) -> tuple[int, ...]:
        if v < 0:
            raise ValueError(f"vertex {v} outside tree({self.d})")
        par = self.parent(v)
        kids = self.children(v)
        return tuple(([par] if par is not None else []) + kids)

    def path(self, v: int) -> tuple[int, ...]:
        """Child indices from the root down to ``v``."""
        h, p = self.locate(v)
        if h == 0:
            return ()
        k = self.d - 1
        digits = []
        for _ in range(h - 1):
            digits.append(p % k)
            p //= k
        digits.append(p)
        return tuple(reversed(digits))

    def from_path(self, path: Sequence[int]) -> int:
        if not path:
            return 0
        p = path[0]
        for c in path[1:]:
            p = p * (self.d - 1) + c
        return self.vid(len(path), p)


# -- builtins -------------------------------------------------------------


def build_builtin(name: str, params: Sequence[int] = ()) -> Graph:
    params = tuple(int(p) for p in params)
    if name == "line":
        step = params[0] if params else 1
        if step < 1:
            raise PreconditionError("line step must be >= 1")
        return Graph(
            label="line" if step == 1 else f"line({step})",
            basepoint=0,
            neighbors=lambda v: (v - step, v + step),
            kind="line",
            params=(step,),
        )
    if name == "ladder":
        def ladder_nb(v: int) -> tuple[int, ...]:
            z, s = divmod(v, 2)
            return (2 * (z - 1) + s, 2 * z + (1 - s), 2 * (z + 1) + s)

        return Graph("ladder", 0, ladder_nb, kind="ladder")
    if name in ("grid2d", "cayley"):
        n = 2 if name == "grid2d" else (params[0] if params else 1)
        if n < 1:
            raise PreconditionError("cayley rank must be >= 1")
        if n == 1:
            return Graph("cayley(1)", 0, lambda v: (v - 1, v + 1), kind="line", params=(1,))

        def lattice_nb(v: int) -> tuple[int, ...]:
            c = decode_lattice(v, n)
            out = []
            for i in range(n):
                for dx in (-1, 1):
                    d = list(c)
                    d[i] += dx
                    out.append(encode_lattice(d))
            return tuple(out)

        label = "grid2d" if name == "grid2d" else f"cayley({n})"
        return Graph(label, encode_lattice((0,) * n), lattice_nb, kind="lattice", params=(n,))
    if name in ("tree", "free"):
        if not params:
            raise PreconditionError(f"{name} needs a parameter")
        d = params[0] * 2 if name == "free" else params[0]
        if d < 1:
            raise PreconditionError("degree parameter must be >= 1")
        idx = _TreeIndex(d)
        label = f"tree({d})" if name == "tree" else f"free({params[0]})"
        return Graph(label, 0, idx.neighbors, kind="tree", params=(d,))
    raise CompactifyError(f"unknown builtin {name!r}; expected one of {BUILTINS}")


def build_explicit(vertices: Iterable[int], edges: Iterable[Sequence[int]], label: str = "explicit") -> Graph:
    """Finite graph from a vertex list and an edge list.

    An edge to an undeclared vertex marks its declared end as a stub: the
    graph continues beyond the listed vertices there.
    """
    verts = sorted(set(int(v) for v in vertices))
    if not verts:
        raise PreconditionError("explicit graph needs at least one vertex")
    vset = frozenset(verts)
    adj: dict[int, set[int]] = {v: set() for v in verts}
    stubs = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u in vset and v in vset:
            adj[u].add(v)
            adj[v].add(u)
        elif u in vset:
            stubs.add(u)
        elif v in vset:
            stubs.add(v)
        else:
            raise PreconditionError(f"edge {[u, v]} touches no declared vertex")
    table = {v: tuple(sorted(ns)) for v, ns in adj.items()}
    return Graph(label, verts[0], table.__getitem__, kind="explicit", vertices=vset, stubs=frozenset(stubs))


def load_graph(spec: dict | str | Path) -> Graph:
    """Graph from a JSON spec dict or file path."""
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text())
    if "builtin" in spec:
        return build_builtin(spec["builtin"], spec.get("params", []))
    if "explicit" in spec:
        ex = spec["explicit"]
        return build_explicit(ex["vertices"], ex["edges"], ex.get("label", "explicit"))
    raise CompactifyError("graph spec needs a 'builtin' or 'explicit' key")


# -- truncations ----------------------------------------------------------


def ball(graph: Graph, radius: int, center: int | None = None) -> Truncation:
    """Closed ball around the basepoint, in canonical order (level by level, ids ascending)."""
    if radius < 0:
        raise PreconditionError("radius must be >= 0")
    start = graph.basepoint if center is None else center
    dist = {start: 0}
    order = [start]
    level = [start]
    for r in range(1, radius + 1):
        nxt = set()
        for u in level:
            for w in graph.neighbors(u):
                if graph.is_explicit and w not in graph.vertices:
                    continue
                if w not in dist:
                    nxt.add(w)
        level = sorted(nxt)
        for w in level:
            dist[w] = r
        order.extend(level)
        if not level:
            break
    sphere = frozenset(v for v, d in dist.items() if d == radius)
    return Truncation(radius, tuple(order), sphere, dist)


def graph_distance(graph: Graph, u: int, v: int, limit: int = 10_000) -> int:
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if dist[x] >= limit:
            break
        for w in graph.neighbors(x):
            if graph.is_explicit and w not in graph.vertices:
                continue
            if w not in dist:
                dist[w] = dist[x] + 1
                if w == v:
                    return dist[w]
                queue.append(w)
    raise CompactifyError(f"no path from {u} to {v} within {limit} steps")


def diameter(graph: Graph, vertices: Iterable[int]) -> int:
    vs = sorted(set(vertices))
    return max((graph_distance(graph, a, b) for i, a in enumerate(vs) for b in vs[i + 1:]), default=0)


def is_connected(graph: Graph, trunc: Truncation) -> bool:
    """Connectivity of the truncation's induced subgraph."""
    vs = set(trunc.vertices)
    seen = {trunc.vertices[0]}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for w in graph.neighbors(x):
            if w in vs and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen == vs


# -- group actions --------------------------------------------------------

Letter = tuple[str, int]
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class Generator:
    name: str
    forward: Callable[[int], int]
    inverse: Callable[[int], int]


@dataclass(frozen=True, eq=False)
class ActionModel:
    """A group given by generators acting on graph vertices, with fundamental domain ``K``.

    ``translation_step`` is set when the group is Z acting by ``v -> v + step*g``
    on integer ids; the symbolic transfer code relies on it.
    """

    generators: tuple[Generator, ...]
    fundamental_domain: frozenset[int]
    word_length_bound: int = 4
    translation_step: int | None = None
    label: str = "action"

    def with_domain(self, K: Iterable[int]) -> "ActionModel":
        return ActionModel(
            self.generators, frozenset(K), self.word_length_bound, self.translation_step, self.label
        )

    def _gen(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def act(self, word: Word, v: int) -> int:
        for name, e in reversed(word):
            g = self._gen(name)
            v = g.forward(v) if e > 0 else g.inverse(v)
        return v

    def act_set(self, word: Word, vs: Iterable[int]) -> frozenset[int]:
        return frozenset(self.act(word, v) for v in vs)

    def orbit(self, bound: int | None = None, reference: Iterable[int] | None = None) -> list[tuple[Word, tuple[int, ...]]]:
        """``(word, image of reference)`` for word length <= bound, one word per distinct image."""
        bound = self.word_length_bound if bound is None else bound
        ref = tuple(sorted(self.fundamental_domain if reference is None else reference))
        letters = [(g, (g.name, e)) for g in self.generators for e in (1, -1)]
        seen = {ref}
        out: list[tuple[Word, tuple[int, ...]]] = [((), ref)]
        frontier = list(out)
        for _ in range(bound):
            nxt = []
            for w, sig in frontier:
                for gen, letter in letters:
                    if w and w[0] == (letter[0], -letter[1]):
                        continue
                    move = gen.forward if letter[1] > 0 else gen.inverse
                    nsig = tuple(move(v) for v in sig)
                    if nsig not in seen:
                        seen.add(nsig)
                        nxt.append(((letter,) + w, nsig))
            out.extend(nxt)
            frontier = nxt
        return out

    def elements(self, bound: int | None = None, reference: Iterable[int] | None = None) -> list[Word]:
        """Group elements of word length <= bound, one word per distinct action on ``reference``."""
        return [w for w, _ in self.orbit(bound, reference)]

    def exponent(self, word: Word) -> int:
        """Exponent sum; the integer a word represents when the group is Z."""
        return sum(e for _, e in word)

    def power(self, n: int) -> Word:
        name = self.generators[0].name
        return tuple((name, 1 if n > 0 else -1) for _ in range(abs(n)))


def word_str(word: Word) -> str:
    if not word:
        return "e"
    return "".join(n if e > 0 else n + "^-1" for n, e in word)


def translation_action(step: int = 1, K: Iterable[int] = (0,), bound: int = 4) -> ActionModel:
    return ActionModel(
        (Generator("a", lambda v: v + step, lambda v: v - step),),
        frozenset(K),
        bound,
        translation_step=step,
        label=f"Z by +{step}",
    )


def lattice_action(n: int = 2, K: Iterable[int] | None = None, bound: int = 4) -> ActionModel:
    """Z^n acting on ``cayley(n)`` (``grid2d`` when n = 2) by coordinate translations."""
    names = "abcdefgh"

    def shift(i: int, dx: int) -> Callable[[int], int]:
        def f(v: int) -> int:
            c = list(decode_lattice(v, n))
            c[i] += dx
            return encode_lattice(c)

        return f

    gens = tuple(Generator(names[i], shift(i, 1), shift(i, -1)) for i in range(n))
    K = (encode_lattice((0,) * n),) if K is None else K
    return ActionModel(gens, frozenset(K), bound, label=f"Z^{n}")


def free_action(r: int, K: Iterable[int] = (0,), bound: int = 4) -> ActionModel:
    """Free group of rank r acting on ``free(r)`` by left multiplication."""
    d = 2 * r
    idx = _TreeIndex(d)

    def inv(letter: int) -> int:
        return letter ^ 1

    def to_word(v: int) -> list[int]:
        path = idx.path(v)
        if not path:
            return []
        word = [path[0]]
        for c in path[1:]:
            allowed = [x for x in range(d) if x != inv(word[-1])]
            word.append(allowed[c])
        return word

    def from_word(word: list[int]) -> int:
        if not word:
            return 0
        path = [word[0]]
        for prev, x in zip(word, word[1:]):
            allowed = [y for y in range(d) if y != inv(prev)]
            path.append(allowed.index(x))
        return idx.from_path(path)

    def left_mult(letter: int) -> Callable[[int], int]:
        def f(v: int) -> int:
            w = to_word(v)
            if w and w[0] == inv(letter):
                return from_word(w[1:])
            return from_word([letter] + w)

        return f

    names = "abcdefgh"
    gens = tuple(Generator(names[i], left_mult(2 * i), left_mult(2 * i + 1)) for i in range(r))
    return ActionModel(gens, frozenset(K), bound, label=f"F_{r}")


def permutation_action(tables: dict[str, dict[int, int]], K: Iterable[int], bound: int = 4) -> ActionModel:
    """Action from per-generator permutation tables on a declared truncation."""
    gens = []
    for name, table in tables.items():
        fwd = {int(k): int(v) for k, v in table.items()}
        back = {v: k for k, v in fwd.items()}
        gens.append(Generator(name, fwd.__getitem__, back.__getitem__))
    return ActionModel(tuple(gens), frozenset(K), bound, label="table")


def load_action(spec: dict | str | Path) -> ActionModel:
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text())
    K = [int(v) for v in spec.get("fundamental_domain", [0])]
    bound = int(spec.get("word_length_bound", 4))
    kind = spec.get("builtin")
    if kind == "translation":
        return translation_action(int(spec.get("step", 1)), K, bound)
    if kind == "lattice":
        return lattice_action(int(spec.get("rank", 2)), K, bound)
    if kind == "free":
        return free_action(int(spec.get("rank", 1)), K, bound)
    if "generators" in spec:
        return permutation_action(spec["generators"], K, bound)
    raise CompactifyError("action spec needs 'builtin' or 'generators'")


def _safe(f: Callable[[int], int], v: int) -> int | None:
    try:
        return f(v)
    except (KeyError, ValueError):
        return None


def verify_action(graph: Graph, action: ActionModel, trunc: Truncation) -> Verdict:
    """Check adjacency preservation, cocompactness cover and proper discontinuity on ``trunc``."""
    inner = [v for v in trunc.vertices if trunc.distance[v] < trunc.radius] or list(trunc.vertices)
    structural: list[dict] = []
    for g in action.generators:
        images = {}
        for v in trunc.vertices:
            fv = _safe(g.forward, v)
            if fv is None or _safe(g.inverse, fv) != v:
                structural.append({"generator": g.name, "vertex": v, "problem": "not invertible"})
                continue
            images.setdefault(fv, []).append(v)
        for fv, pre in images.items():
            if len(pre) > 1:
                structural.append({"generator": g.name, "vertices": pre, "problem": "not injective"})
        for u in inner:
            fu = _safe(g.forward, u)
            if fu is None:
                continue
            image_nb = set(graph.neighbors(fu))
            for w in graph.neighbors(u):
                if w not in trunc:
                    continue
                fw = _safe(g.forward, w)
                if fw is not None and fw not in image_nb:
                    structural.append(
                        {"generator": g.name, "edge": [u, w], "problem": "adjacency not preserved"}
                    )
    if structural:
        return Verdict(FAIL, "verify_action", {"structural": structural[:20]})

    K = action.fundamental_domain
    elements = action.elements()
    covered: set[int] = set()
    for w in elements:
        covered |= action.act_set(w, K)
    uncovered = sorted(set(trunc.vertices) - covered)

    tset = set(trunc.vertices)
    counts = []
    for b in (action.word_length_bound, action.word_length_bound + 1):
        counts.append(sum(1 for w in action.elements(b) if action.act_set(w, K) & tset))
    detail = {
        "structural": [],
        "uncovered": uncovered,
        "meeting_counts": counts,
        "connected": is_connected(graph, trunc),
    }
    ok = not uncovered and counts[0] == counts[1] and detail["connected"]
    return Verdict(PASS if ok else FAIL, "verify_action", detail)


def z_k(action: ActionModel, K: Iterable[int] | None = None, bound: int | None = None) -> list[Word]:
    """Elements ``z`` with ``zK`` meeting ``K``; ``bound`` defaults to ``diam(K) + 1`` word length."""
    K = frozenset(action.fundamental_domain if K is None else K)
    if bound is None:
        bound = (max(K) - min(K)) // action.translation_step + 1 if action.translation_step else action.word_length_bound
    return [w for w in action.elements(bound, reference=K) if action.act_set(w, K) & K]
