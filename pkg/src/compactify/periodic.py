"""Ultimately periodic subsets of the integers.

A set ``S`` is stored as an explicit core inside ``[-cutoff, cutoff]`` plus two
residue patterns modulo ``period``: one for ``x > cutoff`` and one for
``x < -cutoff``.  The class is closed under the boolean operations, translation
and the affine-floor maps ``x -> (a*x + b) // c``, and every instance is kept in
a canonical (minimal period, minimal cutoff) form, so ``==`` is set equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class PeriodicSet:
    period: int
    cutoff: int
    core: frozenset[int]
    pos: frozenset[int]
    neg: frozenset[int]

    # -- constructors -----------------------------------------------------

    @classmethod
    def make(
        cls,
        period: int,
        cutoff: int,
        core: Iterable[int] = (),
        pos: Iterable[int] = (),
        neg: Iterable[int] = (),
    ) -> "PeriodicSet":
        if period < 1 or cutoff < 0:
            raise ValueError("period must be >= 1 and cutoff >= 0")
        core = frozenset(x for x in core if -cutoff <= x <= cutoff)
        pos = frozenset(r % period for r in pos)
        neg = frozenset(r % period for r in neg)
        return _canonical(period, cutoff, core, pos, neg)

    @classmethod
    def empty(cls) -> "PeriodicSet":
        return cls(1, 0, frozenset(), frozenset(), frozenset())

    @classmethod
    def integers(cls) -> "PeriodicSet":
        return cls(1, 0, frozenset({0}), frozenset({0}), frozenset({0}))

    @classmethod
    def finite(cls, xs: Iterable[int]) -> "PeriodicSet":
        xs = frozenset(xs)
        n = max((abs(x) for x in xs), default=0)
        return cls.make(1, n, xs)

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "PeriodicSet":
        return cls.finite(excluded).complement()

    @classmethod
    def progression(
        cls,
        modulus: int,
        residue: int,
        lower: int | None = None,
        upper: int | None = None,
    ) -> "PeriodicSet":
        """``{x : x = residue mod modulus, lower <= x <= upper}``; bounds optional."""
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        lo = -(10**18) if lower is None else lower
        hi = 10**18 if upper is None else upper
        n = max(abs(lower) if lower is not None else 0, abs(upper) if upper is not None else 0)
        return cls.from_predicate(
            lambda x: lo <= x <= hi and (x - residue) % modulus == 0, modulus, n
        )

    @classmethod
    def from_predicate(
        cls, pred: Callable[[int], bool], period: int, cutoff: int
    ) -> "PeriodicSet":
        """Build from a predicate that is ``period``-periodic outside ``[-cutoff, cutoff]``.

        The caller guarantees the periodicity; nothing beyond one period on each
        side is sampled.
        """
        core = [x for x in range(-cutoff, cutoff + 1) if pred(x)]
        pos = [x % period for x in range(cutoff + 1, cutoff + 1 + period) if pred(x)]
        neg = [x % period for x in range(-cutoff - period, -cutoff) if pred(x)]
        return cls.make(period, cutoff, core, pos, neg)

    # -- queries ----------------------------------------------------------

    def __contains__(self, x: int) -> bool:
        if x > self.cutoff:
            return x % self.period in self.pos
        if x < -self.cutoff:
            return x % self.period in self.neg
        return x in self.core

    def is_finite(self) -> bool:
        return not self.pos and not self.neg

    def is_empty(self) -> bool:
        return self.is_finite() and not self.core

    def infinite_right(self) -> bool:
        return bool(self.pos)

    def infinite_left(self) -> bool:
        return bool(self.neg)

    def members(self) -> list[int]:
        if not self.is_finite():
            raise ValueError("set is infinite")
        return sorted(self.core)

    def window(self, lo: int, hi: int) -> Iterator[int]:
        return (x for x in range(lo, hi + 1) if x in self)

    def meets_infinitely(self, other: "PeriodicSet") -> bool:
        p = _lcm(self.period, other.period)
        n = max(self.cutoff, other.cutoff) + 1
        return any(x in self and x in other for x in range(n, n + p)) or any(
            x in self and x in other for x in range(-n - p + 1, -n + 1)
        )

    def issubset(self, other: "PeriodicSet") -> bool:
        return (self - other).is_empty()

    # -- boolean algebra --------------------------------------------------

    def _combine(self, other: "PeriodicSet", op: Callable[[bool, bool], bool]) -> "PeriodicSet":
        p = _lcm(self.period, other.period)
        n = max(self.cutoff, other.cutoff)
        return PeriodicSet.from_predicate(lambda x: op(x in self, x in other), p, n)

    def __or__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "PeriodicSet":
        return PeriodicSet.from_predicate(lambda x: x not in self, self.period, self.cutoff)

    # -- maps -------------------------------------------------------------

    def translate(self, t: int) -> "PeriodicSet":
        return PeriodicSet.from_predicate(
            lambda x: (x - t) in self, self.period, self.cutoff + abs(t)
        )

    def preimage(self, a: int, b: int = 0, c: int = 1) -> "PeriodicSet":
        """``{x : (a*x + b) // c in self}`` for ``a != 0``, ``c >= 1``."""
        _check_affine(a, c)
        period = c * self.period
        cutoff = (c * (self.cutoff + 1) + abs(b)) + period + 1
        return PeriodicSet.from_predicate(lambda x: (a * x + b) // c in self, period, cutoff)

    def image(self, a: int, b: int = 0, c: int = 1) -> "PeriodicSet":
        """``{(a*x + b) // c : x in self}`` for ``a != 0``, ``c >= 1``."""
        _check_affine(a, c)
        span = _lcm(self.period, c)
        period = abs(a) * span // c
        cutoff = (abs(a) * (self.cutoff + span + 1) + abs(b)) // c + period + 1

        def pred(y: int) -> bool:
            # x with c*y <= a*x + b < c*y + c
            lo_num, hi_num = c * y - b, c * y + c - 1 - b
            if a < 0:
                lo_num, hi_num = -hi_num, -lo_num
            aa = abs(a)
            x_lo = -((-lo_num) // aa)
            x_hi = hi_num // aa
            for x in range(x_lo, x_hi + 1):
                xx = x if a > 0 else -x
                if xx in self:
                    return True
            return False

        return PeriodicSet.from_predicate(pred, period, cutoff)

    def __repr__(self) -> str:
        parts = []
        if self.core:
            parts.append("{" + ",".join(map(str, sorted(self.core))) + "}")
        if self.pos:
            parts.append(f"x>{self.cutoff}: x%{self.period} in {sorted(self.pos)}")
        if self.neg:
            parts.append(f"x<{-self.cutoff}: x%{self.period} in {sorted(self.neg)}")
        return "PeriodicSet(" + (" | ".join(parts) or "empty") + ")"


def _check_affine(a: int, c: int) -> None:
    if a == 0 or c < 1:
        raise ValueError("affine map needs a != 0 and c >= 1")


def _minimal_period(pattern: frozenset[int], period: int) -> int:
    for d in range(1, period + 1):
        if period % d:
            continue
        if all(((r + d) % period in pattern) == (r in pattern) for r in range(period)):
            return d
    return period


def _canonical(
    period: int,
    cutoff: int,
    core: frozenset[int],
    pos: frozenset[int],
    neg: frozenset[int],
) -> PeriodicSet:
    p = _lcm(_minimal_period(pos, period), _minimal_period(neg, period))
    pos = frozenset(r % p for r in pos)
    neg = frozenset(r % p for r in neg)
    n = cutoff
    core = set(core)
    while n > 0 and ((n in core) == (n % p in pos)) and ((-n in core) == (-n % p in neg)):
        core.discard(n)
        core.discard(-n)
        n -= 1
    return PeriodicSet(p, n, frozenset(core), pos, neg)
