"""The Prüfer group Z[1/n]/Z with the boundaries ``f_k`` into ``k`` points.

Elements are ``a/n^i mod 1`` in reduced form.  ``A_{j,k}`` is zero together
with every element whose exponent ``i`` is ``j mod k``; ``A^m_{j,k}`` keeps only
the non-zero ones with ``i >= k*m + j``.  Sets are finite edits of finite
unions of translated ``A^m`` pieces, which makes membership, infinitude and
``f_k`` exact.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import CompactifyError, PreconditionError, UnsupportedExpression
from .setexpr import Empty, SetExpr, Union, leaves
from .sum_of_spaces import BoundaryMap, verify_admissible
from .verdict import FAIL, PASS, Verdict

MAX_EXPONENT = 64


@dataclass(frozen=True, order=True)
class PrueferElement:
    a: int
    i: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError("base must be >= 2")
        ok = (self.a == 0 and self.i == 0) or (self.i >= 1 and 0 < self.a < self.n**self.i and self.a % self.n)
        if not ok:
            raise PreconditionError(f"{self.a}/{self.n}^{self.i} is not in reduced form; use reduce()")

    @property
    def is_zero(self) -> bool:
        return self.a == 0

    def __add__(self, other: "PrueferElement") -> "PrueferElement":
        return add(self, other)

    def __neg__(self) -> "PrueferElement":
        return reduce(-self.a, self.i, self.n)

    def __sub__(self, other: "PrueferElement") -> "PrueferElement":
        return add(self, -other)

    def to_json(self) -> list[int]:
        return [self.a, self.i]

    def __repr__(self):
        return "0" if self.is_zero else f"{self.a}/{self.n}^{self.i}"


def reduce(a: int, i: int, n: int) -> PrueferElement:
    if i < 0 or n < 2:
        raise PreconditionError("need i >= 0 and n >= 2")
    if i > MAX_EXPONENT:
        raise PreconditionError(f"exponent {i} exceeds the supported bound {MAX_EXPONENT}")
    a %= n**i
    while i > 0 and a % n == 0:
        a //= n
        i -= 1
    if a == 0:
        i = 0
    return PrueferElement(a, i, n)


def zero(n: int) -> PrueferElement:
    return PrueferElement(0, 0, n)


def add(x: PrueferElement, y: PrueferElement) -> PrueferElement:
    if x.n != y.n:
        raise PreconditionError(f"base mismatch: {x.n} vs {y.n}")
    i = max(x.i, y.i)
    return reduce(x.a * x.n ** (i - x.i) + y.a * y.n ** (i - y.i), i, x.n)


def elements_upto(n: int, bound: int) -> Iterator[PrueferElement]:
    """Every element with exponent <= bound, by exponent then numerator."""
    yield zero(n)
    for i in range(1, bound + 1):
        for a in range(1, n**i):
            if a % n:
                yield PrueferElement(a, i, n)


def member_A(j: int, k: int, e: PrueferElement) -> bool:
    if not 0 <= j < k:
        raise PreconditionError(f"need 0 <= j < k, got j={j}, k={k}")
    return e.is_zero or e.i % k == j


def member_Am(j: int, k: int, m: int, e: PrueferElement) -> bool:
    return not e.is_zero and e.i % k == j and e.i >= k * m + j


# -- set expressions --------------------------------------------------------


@dataclass(frozen=True, order=True)
class Cone:
    """``a + A^m_{j,k}``."""

    j: int
    k: int
    m: int
    a: PrueferElement

    def __post_init__(self):
        if not 0 <= self.j < self.k or self.m < 0:
            raise PreconditionError(f"bad cone parameters j={self.j}, k={self.k}, m={self.m}")

    @property
    def start(self) -> int:
        return self.k * self.m + self.j

    def contains(self, e: PrueferElement) -> bool:
        return member_Am(self.j, self.k, self.m, e - self.a)

    def settled(self) -> bool:
        # a + A^m = A^m once every member has a larger exponent than a
        return self.a.is_zero or self.start > self.a.i

    def to_json(self) -> dict:
        return {"j": self.j, "k": self.k, "m": self.m, "a": self.a.to_json()}

    def __repr__(self):
        body = f"A^{self.m}_{{{self.j},{self.k}}}"
        return body if self.a.is_zero else f"{self.a!r}+{body}"


@dataclass(frozen=True)
class PrueferSetExpr(SetExpr):
    n: int
    included: frozenset[PrueferElement] = frozenset()
    excluded: frozenset[PrueferElement] = frozenset()
    cones: frozenset[Cone] = frozenset()

    def contains(self, e: PrueferElement) -> bool:
        if e in self.included:
            return True
        if e in self.excluded:
            return False
        return any(c.contains(e) for c in self.cones)

    def is_finite(self) -> bool:
        return not self.cones

    def translate(self, g: PrueferElement) -> "PrueferSetExpr":
        return PrueferSetExpr(
            self.n,
            frozenset(x + g for x in self.included),
            frozenset(x + g for x in self.excluded),
            frozenset(Cone(c.j, c.k, c.m, c.a + g) for c in self.cones),
        )

    def moduli(self) -> list[int]:
        return sorted({c.k for c in self.cones})

    def to_json(self) -> dict:
        return {
            "type": "pruefer",
            "n": self.n,
            "included": [e.to_json() for e in sorted(self.included)],
            "excluded": [e.to_json() for e in sorted(self.excluded)],
            "cones": [c.to_json() for c in sorted(self.cones)],
        }

    def __repr__(self):
        parts = [repr(c) for c in sorted(self.cones)]
        if self.included:
            parts.append("{" + ",".join(map(repr, sorted(self.included))) + "}")
        s = " ∪ ".join(parts) or "∅"
        if self.excluded:
            s = f"({s})∖{{" + ",".join(map(repr, sorted(self.excluded))) + "}"
        return s


def element_from_json(obj: Sequence[int], n: int) -> PrueferElement:
    return reduce(int(obj[0]), int(obj[1]), n)


def pset_from_json(obj: dict) -> PrueferSetExpr:
    n = int(obj["n"])
    return PrueferSetExpr(
        n,
        frozenset(element_from_json(e, n) for e in obj.get("included", [])),
        frozenset(element_from_json(e, n) for e in obj.get("excluded", [])),
        frozenset(Cone(c["j"], c["k"], c.get("m", 0), element_from_json(c.get("a", [0, 0]), n)) for c in obj.get("cones", [])),
    )


def finite_set(n: int, elems: Iterable[PrueferElement]) -> PrueferSetExpr:
    return PrueferSetExpr(n, frozenset(elems))


def cone_set(n: int, j: int, k: int, m: int = 0, a: PrueferElement | None = None) -> PrueferSetExpr:
    return PrueferSetExpr(n, cones=frozenset({Cone(j, k, m, a or zero(n))}))


def A_set(n: int, j: int, k: int) -> PrueferSetExpr:
    """``A_{j,k}`` itself, zero included."""
    return PrueferSetExpr(n, frozenset({zero(n)}), cones=frozenset({Cone(j, k, 0, zero(n))}))


def whole_group(n: int) -> PrueferSetExpr:
    return PrueferSetExpr(n, frozenset({zero(n)}), cones=frozenset({Cone(0, 1, 0, zero(n))}))


def merge(parts: Iterable[PrueferSetExpr]) -> PrueferSetExpr:
    """One expression for the union of ``parts``."""
    parts = list(parts)
    if not parts:
        raise PreconditionError("nothing to merge")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise PreconditionError("base mismatch in union")
    included = frozenset().union(*(p.included for p in parts))
    cones = frozenset().union(*(p.cones for p in parts))
    candidates = frozenset().union(*(p.excluded for p in parts))
    excluded = frozenset(x for x in candidates if not any(p.contains(x) for p in parts))
    return PrueferSetExpr(n, included, excluded, cones)


def _piece_out(c: Cone) -> tuple[Cone, set[PrueferElement]]:
    """Raise ``m`` until the translate is absorbed; return the new cone and the finite part shed."""
    if c.settled():
        return Cone(c.j, c.k, c.m, zero(c.a.n)), set()
    m2 = c.m
    while c.k * m2 + c.j <= c.a.i:
        m2 += 1
    shed: set[PrueferElement] = set()
    top = c.k * m2 + c.j
    for e in elements_upto(c.a.n, top - 1):
        if member_Am(c.j, c.k, c.m, e):
            shed.add(e + c.a)
    return Cone(c.j, c.k, m2, zero(c.a.n)), shed


def normalize(F: PrueferSetExpr, modulus: int | None = None) -> PrueferSetExpr:
    """Untranslated cones rewritten at one common modulus; idempotent.

    The modulus defaults to the lcm of the cone moduli.
    """
    n = F.n
    included = set(F.included)
    cones: list[Cone] = []
    for c in F.cones:
        c2, shed = _piece_out(c)
        included |= {e for e in shed if e not in F.excluded}
        cones.append(c2)
    L = modulus or (math.lcm(*[c.k for c in cones]) if cones else 1)
    start: dict[int, int] = {}
    for c in cones:
        if L % c.k:
            raise PreconditionError(f"modulus {L} is not a multiple of {c.k}")
        for r in range(c.j, L, c.k):
            # exponent 0 holds no non-zero element, so residue 0 starts at L
            m = max(0 if r else 1, -(-(c.start - r) // L))
            start[r] = min(start.get(r, m), m)
    # absorb whole exponent layers sitting just below a cone
    for r, m in list(start.items()):
        while m > (0 if r else 1):
            i = L * (m - 1) + r
            if n**i > 100_000:
                break
            layer = {PrueferElement(a, i, n) for a in range(1, n**i) if a % n}
            if not layer <= included or layer & F.excluded:
                break
            included -= layer
            m -= 1
        start[r] = m
    trial = PrueferSetExpr(n, cones=frozenset(Cone(r, L, m, zero(n)) for r, m in start.items()))
    excluded = frozenset(x for x in F.excluded if x not in included and trial.contains(x))
    included = frozenset(x for x in included if not trial.contains(x))
    return PrueferSetExpr(n, included, excluded, trial.cones)


def equal_sets(F: PrueferSetExpr, G: PrueferSetExpr) -> bool:
    L = math.lcm(*(F.moduli() + G.moduli() or [1]))
    return normalize(F, L) == normalize(G, L)


def covers(F: PrueferSetExpr) -> bool:
    """Whether ``F`` is the whole group."""
    N = normalize(F)
    n = F.n
    if not N.contains(zero(n)) or N.excluded:
        return False
    if not N.cones:
        return False
    L = next(iter(N.cones)).k
    starts = {c.j: c.start for c in N.cones}
    if set(starts) != set(range(L)):
        return False
    # low exponents below a cone start must be supplied by the finite part
    for r, s in starts.items():
        for i in range(r, s, L):
            if i == 0:
                continue
            if any(PrueferElement(a, i, n) not in N.included for a in range(1, n**i) if a % n):
                return False
    return True


def f_k(F: PrueferSetExpr, k: int) -> frozenset[int]:
    """Indices ``j`` with ``F ∩ A_{j,k}`` infinite.

    A piece ``a + A^m_{j',k'}`` agrees with ``A_{j',k'}`` up to a finite set, so
    it meets ``A_{j,k}`` infinitely iff some exponent is ``j' mod k'`` and
    ``j mod k`` at once.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    out = set()
    for c in F.cones:
        g = math.gcd(k, c.k)
        out |= {j for j in range(k) if (j - c.j) % g == 0}
    return frozenset(out)


def _floor(F: PrueferSetExpr) -> int:
    data = [c.start for c in F.cones] + [c.a.i for c in F.cones] + [e.i for e in F.included | F.excluded]
    return max(data + [0]) + 1


def f_k_slice(F: PrueferSetExpr, k: int, max_elements: int = 1 << 17) -> frozenset[int]:
    """Brute-force oracle for ``f_k``: classes hit in a full period of exponents past every finite datum."""
    window = math.lcm(k, *F.moduli()) if F.cones else 1
    lo = _floor(F)
    hi = lo + window - 1
    if F.n**hi > max_elements:
        raise PreconditionError(f"slice of exponent {hi} is too large to enumerate")
    out = set()
    for e in elements_upto(F.n, hi):
        if e.i >= lo and F.contains(e):
            out.add(e.i % k)
    return frozenset(out)


def labels(k: int) -> tuple[str, ...]:
    return tuple(f"y{j}" for j in range(k))


# -- checks -----------------------------------------------------------------


def partition_check(k: int, n: int = 2, bound: int = 10) -> Verdict:
    """Every element of exponent <= bound lies in exactly one ``A_{j,k}``; zero lies in all."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    checked = 0
    for i in range(bound + 1):
        for a in range(n**i):
            e = reduce(a, i, n)
            hits = [j for j in range(k) if member_A(j, k, e)]
            checked += 1
            want = k if e.is_zero else 1
            if len(hits) != want:
                return Verdict(FAIL, "partition", {"element": repr(e), "classes": hits})
    return Verdict(PASS, "partition", {"k": k, "n": n, "bound": bound, "checked": checked})


def translation_lemma_check(a: PrueferElement, j: int, k: int, m: int, extra: int = 3) -> Verdict:
    """``a + A^m_{j,k} = A^m_{j,k}`` on every element of exponent <= ``km + j + extra``, and structurally."""
    if not 0 <= j < k:
        raise PreconditionError(f"need 0 <= j < k, got j={j}, k={k}")
    top = k * m + j
    if not a.is_zero and a.i > top:
        raise PreconditionError(f"lemma does not apply: exponent of {a!r} exceeds km+j={top}")
    bound = top + extra
    if bound > MAX_EXPONENT:
        raise PreconditionError(f"slice exponent {bound} exceeds {MAX_EXPONENT}")
    detail = {"a": repr(a), "j": j, "k": k, "m": m, "slice": bound}
    # the slice {x/n^bound} is a finite subgroup, so translation permutes it and
    # one inclusion already gives equality
    N = a.n**bound
    expo = _slice_exponents(a.n, bound)
    shift = a.a * a.n ** (bound - a.i)

    def inside(x: int) -> bool:
        e = expo[x]
        return x != 0 and e % k == j and e >= top

    for x in range(N):
        if inside(x) and not inside((x + shift) % N):
            b = reduce(x, bound, a.n)
            return Verdict(FAIL, "translation-lemma", {**detail, "b": repr(b), "a+b": repr(a + b)})
    structural = Cone(j, k, m, a).settled()
    if not structural:
        raise CompactifyError(f"slice agrees but {a!r}+A^{m}_{{{j},{k}}} is not absorbed structurally")
    return Verdict(PASS, "translation-lemma", detail)


_EXPONENTS: dict[tuple[int, int], list[int]] = {}


def _slice_exponents(n: int, bound: int) -> list[int]:
    """Exponent of ``x/n^bound`` in reduced form, for every ``x`` below ``n^bound``."""
    key = (n, bound)
    if key not in _EXPONENTS:
        out = [0] * n**bound
        for x in range(1, n**bound):
            v, y = 0, x
            while y % n == 0:
                y //= n
                v += 1
            out[x] = bound - v
        _EXPONENTS[key] = out
    return _EXPONENTS[key]


def lemma_triples(lemma_bound: int, moduli: Sequence[int], extra: int = 3) -> list[tuple[int, int, int]]:
    """``(j, k, m)`` whose slice ``km + j + extra`` stays within ``lemma_bound``."""
    return [
        (j, k, m)
        for k in moduli
        for j in range(k)
        for m in range(lemma_bound + 1)
        if k * m + j + extra <= lemma_bound
    ]


def lemma_sweep(n: int, lemma_bound: int = 8, moduli: Sequence[int] = (1, 2, 3, 4, 6)) -> tuple[list[dict], Verdict]:
    """The lemma on every triple and every ``a`` its hypothesis ``km + j >= i(a)`` admits."""
    failures, checked, strict = [], 0, 0
    for j, k, m in lemma_triples(lemma_bound, moduli):
        for a in elements_upto(n, k * m + j):
            checked += 1
            v = translation_lemma_check(a, j, k, m)
            if not v.passed:
                failures.append(v.detail)
                strict += a.i < k * m + j
    detail = {
        "checked": checked,
        "failures": len(failures),
        "strict_failures": strict,
        "boundary_failures": len(failures) - strict,
        "first_failure": failures[0] if failures else None,
    }
    return failures, Verdict(FAIL if failures else PASS, "translation-lemma", detail)


def action_invariance_check(a: PrueferElement, F: PrueferSetExpr, k: int) -> Verdict:
    """``f_k(a + F) = f_k(F)``, with a witness of large exponent for every boundary point."""
    moved = F.translate(a)
    before, after = f_k(F, k), f_k(moved, k)
    if before != after:
        return Verdict(FAIL, "action-invariance", {"a": repr(a), "F": repr(F), "f(F)": sorted(before), "f(a+F)": sorted(after)})
    witnesses = {}
    for j in sorted(after):
        w = _witness(moved, j, k)
        if w is None or not moved.contains(w) or not member_A(j, k, w):
            return Verdict(FAIL, "action-invariance", {"a": repr(a), "F": repr(F), "missing_witness": j})
        witnesses[f"y{j}"] = repr(w)
    return Verdict(PASS, "action-invariance", {"a": repr(a), "F": repr(F), "value": sorted(after), "witnesses": witnesses})


def _witness(F: PrueferSetExpr, j: int, k: int) -> PrueferElement | None:
    """A member of ``F ∩ A_{j,k}`` beyond every finite datum of ``F``."""
    floor = _floor(F)
    for c in F.cones:
        L = math.lcm(k, c.k)
        for i in range(floor, floor + L):
            if i % k == j and i % c.k == c.j and i <= MAX_EXPONENT:
                return PrueferElement(1, i, F.n) + c.a
    return None


def bonding_map(k1: int, k2: int) -> dict[int, int]:
    if k2 < 1 or k1 % k2:
        raise PreconditionError(f"{k2} does not divide {k1}")
    return {j: j % k2 for j in range(k1)}


def bonding_continuity_check(k1: int, k2: int, corpus: Sequence[PrueferSetExpr], n: int = 2, bound: int = 8) -> Verdict:
    """``A_{j,k1} ⊆ A_{j mod k2, k2}`` on a slice, and ``π(f_{k1}(F)) ⊆ f_{k2}(F)`` on the corpus."""
    pi = bonding_map(k1, k2)
    for e in elements_upto(n, bound):
        for j in range(k1):
            if member_A(j, k1, e) and not member_A(pi[j], k2, e):
                return Verdict(FAIL, "bonding", {"inclusion": [j, k1, pi[j], k2], "element": repr(e)})
    for F in corpus:
        top, low = f_k(F, k1), f_k(F, k2)
        if not {pi[j] for j in top} <= low:
            return Verdict(FAIL, "bonding", {"F": repr(F), f"f_{k1}": sorted(top), f"f_{k2}": sorted(low)})
    return Verdict(PASS, "bonding", {"k1": k1, "k2": k2, "pi": pi, "corpus": len(corpus)})


def hausdorff_witnesses(k: int, n: int = 2) -> tuple[list[dict], Verdict]:
    """``B_i = ⋃_{i' ≠ i} A_{i',k}`` separates ``y_i`` from ``y_j``."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    B = {i: merge([A_set(n, t, k) for t in range(k) if t != i]) for i in range(k) if k > 1}
    rows = []
    for i, j in itertools.combinations(range(k), 2):
        bi, bj = B[i], B[j]
        row = {
            "pair": [f"y{i}", f"y{j}"],
            "B_i": repr(bi),
            "B_j": repr(bj),
            "f(B_i)": [f"y{t}" for t in sorted(f_k(bi, k))],
            "f(B_j)": [f"y{t}" for t in sorted(f_k(bj, k))],
            "cover": covers(merge([bi, bj])),
        }
        ok = row["cover"] and f_k(bi, k) == frozenset(range(k)) - {i} and f_k(bj, k) == frozenset(range(k)) - {j}
        rows.append(row)
        if not ok:
            return rows, Verdict(FAIL, "hausdorff-witnesses", {"row": row})
    return rows, Verdict(PASS, "hausdorff-witnesses", {"pairs": len(rows)})


# -- as a boundary map --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrueferSpace:
    n: int
    sample_bound: int = 2

    def _flat(self, expr: SetExpr) -> PrueferSetExpr:
        if isinstance(expr, PrueferSetExpr):
            return expr
        if isinstance(expr, Empty):
            return PrueferSetExpr(self.n)
        if isinstance(expr, Union):
            return merge([self._flat(p) for p in leaves(expr)])
        raise UnsupportedExpression(f"not a Prüfer set: {expr!r}")

    def is_finite(self, expr: SetExpr) -> bool:
        return self._flat(expr).is_finite()

    def is_empty(self, expr: SetExpr) -> bool:
        F = self._flat(expr)
        return F.is_finite() and not (F.included - F.excluded)

    def normalize(self, expr: SetExpr) -> SetExpr:
        return normalize(self._flat(expr))

    def covers(self, expr: SetExpr) -> bool:
        return covers(self._flat(expr))

    def equals(self, a: SetExpr, b: SetExpr) -> bool:
        return equal_sets(self._flat(a), self._flat(b))

    def universe_expr(self) -> SetExpr:
        return whole_group(self.n)

    def translate(self, expr: SetExpr, g: PrueferElement) -> SetExpr:
        return self._flat(expr).translate(g)

    right_translate = translate

    def elements(self, bound: int) -> list[PrueferElement]:
        return list(elements_upto(self.n, min(bound, self.sample_bound)))

    def sample_finite(self) -> list[SetExpr]:
        return [finite_set(self.n, [zero(self.n)]), finite_set(self.n, [reduce(1, 1, self.n)])]

    def describe(self) -> str:
        return f"Z[1/{self.n}]/Z"


def f_k_map(k: int, n: int = 2, generators: Iterable[SetExpr] = ()) -> BoundaryMap:
    space = PrueferSpace(n)

    def rule(A: SetExpr):
        return frozenset(f"y{j}" for j in f_k(space._flat(A), k))

    return BoundaryMap(space, labels(k), (), rule, {}, f"f_{k}").with_table(generators)


def random_element(rng: random.Random, n: int, max_exp: int = 3) -> PrueferElement:
    i = rng.randint(0, max_exp)
    return reduce(rng.randrange(n**i) if i else 0, i, n)


def random_set(rng: random.Random, n: int, infinite: bool = True, moduli: Sequence[int] = (1, 2, 3, 4, 6)) -> PrueferSetExpr:
    cones = set()
    if infinite:
        for _ in range(rng.randint(1, 3)):
            k = rng.choice(list(moduli))
            cones.add(Cone(rng.randrange(k), k, rng.randint(0, 2), random_element(rng, n)))
    inc = {random_element(rng, n) for _ in range(rng.randint(0, 3))}
    exc = {random_element(rng, n) for _ in range(rng.randint(0, 2))} - inc
    if not infinite and not inc:
        inc = {random_element(rng, n)}
    return PrueferSetExpr(n, frozenset(inc), frozenset(exc), frozenset(cones))


def corpus(n: int, size: int = 20, seed: int = 0, infinite: bool = True) -> list[PrueferSetExpr]:
    rng = random.Random(seed)
    return [random_set(rng, n, infinite) for _ in range(size)]


def admissibility(k: int, n: int, sets: Sequence[PrueferSetExpr], seed: int = 0) -> Verdict:
    return verify_admissible(f_k_map(k, n, sets), seed=seed)
