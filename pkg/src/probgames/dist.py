"""Exact probability mass functions over values.

Probabilities are `fractions.Fraction` throughout; nothing in the
semantics ever rounds. Zero-mass entries are pruned on construction so
the support is always semantically meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .values import Type, Value, sort_key

ZERO = Fraction(0)
ONE = Fraction(1)


class Dist:
    """Sparse map from values to positive rational probabilities."""

    __slots__ = ("_entries", "carrier")

    def __init__(self, entries: Dict[Value, Fraction], carrier: Type):
        self._entries = {v: p for v, p in entries.items() if p != 0}
        self.carrier = carrier

    def prob(self, v: Value) -> Fraction:
        return self._entries.get(v, ZERO)

    def mass(self) -> Fraction:
        return sum(self._entries.values(), ZERO)

    def support(self) -> List[Value]:
        return sorted(self._entries, key=sort_key)

    def items_sorted(self) -> List[Tuple[Value, Fraction]]:
        return [(v, self._entries[v]) for v in self.support()]

    def restrict(self, keep: Callable[[Value], bool]) -> "Dist":
        """Sub-distribution on the values satisfying ``keep`` (no renormalizing)."""
        return Dist({v: p for v, p in self._entries.items() if keep(v)}, self.carrier)

    def map_values(self, fn: Callable[[Value], Value], carrier: Type) -> "Dist":
        out: Dict[Value, Fraction] = {}
        for v, p in self._entries.items():
            w = fn(v)
            out[w] = out.get(w, ZERO) + p
        return Dist(out, carrier)

    def render(self) -> str:
        lines = [f"{v}: {p.numerator}/{p.denominator}" for v, p in self.items_sorted()]
        return "\n".join(lines)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self.items_sorted())

    def __repr__(self):
        return f"Dist({dict(self.items_sorted())!r})"


def mass(d: Dist) -> Fraction:
    return d.mass()


@dataclass(frozen=True)
class DistCompare:
    equal: bool
    witness: Optional[Value] = None
    left: Fraction = ZERO
    right: Fraction = ZERO


def dist_equal(d1: Dist, d2: Dist) -> DistCompare:
    """Extensional equality; on failure reports the least differing value."""
    if d1.carrier != d2.carrier:
        raise ValueError(f"carrier types differ: {d1.carrier} vs {d2.carrier}")
    diverging = [v for v in set(d1._entries) | set(d2._entries) if d1.prob(v) != d2.prob(v)]
    if not diverging:
        return DistCompare(True)
    w = min(diverging, key=sort_key)
    return DistCompare(False, w, d1.prob(w), d2.prob(w))


def stat_distance(d1: Dist, d2: Dist) -> Fraction:
    """Total variation distance (1/2) * sum |d1 - d2|, exact."""
    if d1.carrier != d2.carrier:
        raise ValueError(f"carrier types differ: {d1.carrier} vs {d2.carrier}")
    total = ZERO
    for v in set(d1._entries) | set(d2._entries):
        total += abs(d1.prob(v) - d2.prob(v))
    return total / 2


def from_pairs(pairs: Iterable[Tuple[Value, Fraction]], carrier: Type) -> Dist:
    out: Dict[Value, Fraction] = {}
    for v, p in pairs:
        out[v] = out.get(v, ZERO) + p
    return Dist(out, carrier)


def point(v: Value, carrier: Type) -> Dist:
    return Dist({v: ONE}, carrier)
