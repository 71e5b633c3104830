"""Finite values and their types.

Every datum a game can compute with lives here: distribution outcomes,
oracle states and AST literals share one immutable representation, so
equality is structural everywhere. That structural equality is what
discharges the decidable-equality side condition that returning a value
into a probabilistic computation requires.

Bit vectors store their most significant bit first; rendering and the
tape semantics both rely on that order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple, Union

from .errors import LimitExceeded

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TUnit:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class TBool:
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class TBitVec:
    width: int

    def __str__(self):
        return f"bv {self.width}"


@dataclass(frozen=True)
class TNat:
    """Naturals 0 .. bound-1. The bound keeps every type finite."""

    bound: int

    def __str__(self):
        return f"nat {self.bound}"


@dataclass(frozen=True)
class TPair:
    fst: "Type"
    snd: "Type"

    def __str__(self):
        return f"({self.fst} * {self.snd})"


@dataclass(frozen=True)
class TList:
    elem: "Type"

    def __str__(self):
        return f"list ({self.elem})"


@dataclass(frozen=True)
class TSum:
    left: "Type"
    right: "Type"

    def __str__(self):
        return f"({self.left} + {self.right})"


Type = Union[TUnit, TBool, TBitVec, TNat, TPair, TList, TSum]

UNIT_T = TUnit()
BOOL_T = TBool()


# ---------------------------------------------------------------------------
# Values


class Value:
    """Marker base class; concrete values are the frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class VUnit(Value):
    def __str__(self):
        return "()"


@dataclass(frozen=True)
class VBool(Value):
    flag: bool

    def __str__(self):
        return "true" if self.flag else "false"


@dataclass(frozen=True)
class VBitVec(Value):
    bits: Tuple[bool, ...]  # index 0 is the most significant bit

    @property
    def width(self) -> int:
        return len(self.bits)

    def as_int(self) -> int:
        n = 0
        for b in self.bits:
            n = (n << 1) | int(b)
        return n

    def __str__(self):
        return "0b" + "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class VNat(Value):
    n: int

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value

    def __str__(self):
        return f"({self.fst}, {self.snd})"


@dataclass(frozen=True)
class VList(Value):
    items: Tuple[Value, ...]

    def __str__(self):
        return "[" + ", ".join(str(v) for v in self.items) + "]"


@dataclass(frozen=True)
class VSum(Value):
    is_left: bool
    value: Value

    def __str__(self):
        return f"{'inl' if self.is_left else 'inr'} {self.value}"


UNIT = VUnit()
TRUE = VBool(True)
FALSE = VBool(False)
NIL = VList(())


def bitvec(n: int, width: int) -> VBitVec:
    """The width-bit vector whose unsigned value is n (MSB first)."""
    if n < 0 or n >= (1 << width):
        raise ValueError(f"{n} does not fit in {width} bits")
    return VBitVec(tuple(bool((n >> (width - 1 - i)) & 1) for i in range(width)))


def boolean(b: bool) -> VBool:
    return TRUE if b else FALSE


# ---------------------------------------------------------------------------
# Canonical order, conformance, enumeration


def sort_key(v: Value):
    """Total order key; values of one type always yield comparable keys."""
    if isinstance(v, VUnit):
        return (0,)
    if isinstance(v, VBool):
        return (1, int(v.flag))
    if isinstance(v, VBitVec):
        return (2, len(v.bits), v.as_int())
    if isinstance(v, VNat):
        return (3, v.n)
    if isinstance(v, VPair):
        return (4, sort_key(v.fst), sort_key(v.snd))
    if isinstance(v, VList):
        return (5, len(v.items), tuple(sort_key(x) for x in v.items))
    if isinstance(v, VSum):
        return (6, 0 if v.is_left else 1, sort_key(v.value))
    raise TypeError(f"not a value: {v!r}")


def conforms(v: Value, ty: Type) -> bool:
    """Does the value inhabit the type? Used for runtime state checks."""
    if isinstance(ty, TUnit):
        return isinstance(v, VUnit)
    if isinstance(ty, TBool):
        return isinstance(v, VBool)
    if isinstance(ty, TBitVec):
        return isinstance(v, VBitVec) and v.width == ty.width
    if isinstance(ty, TNat):
        return isinstance(v, VNat) and 0 <= v.n < ty.bound
    if isinstance(ty, TPair):
        return isinstance(v, VPair) and conforms(v.fst, ty.fst) and conforms(v.snd, ty.snd)
    if isinstance(ty, TList):
        return isinstance(v, VList) and all(conforms(x, ty.elem) for x in v.items)
    if isinstance(ty, TSum):
        return isinstance(v, VSum) and conforms(v.value, ty.left if v.is_left else ty.right)
    raise TypeError(f"not a type: {ty!r}")


def enumerate_type(ty: Type, limit: int = 1 << 20) -> Iterator[Value]:
    """All inhabitants in canonical order. Lists are rejected (unbounded)."""
    if isinstance(ty, TUnit):
        yield UNIT
    elif isinstance(ty, TBool):
        yield FALSE
        yield TRUE
    elif isinstance(ty, TBitVec):
        if (1 << ty.width) > limit:
            raise LimitExceeded(f"2^{ty.width} values exceed enumeration limit")
        for n in range(1 << ty.width):
            yield bitvec(n, ty.width)
    elif isinstance(ty, TNat):
        if ty.bound > limit:
            raise LimitExceeded(f"{ty.bound} values exceed enumeration limit")
        for n in range(ty.bound):
            yield VNat(n)
    elif isinstance(ty, TPair):
        for a in enumerate_type(ty.fst, limit):
            for b in enumerate_type(ty.snd, limit):
                yield VPair(a, b)
    elif isinstance(ty, TSum):
        for a in enumerate_type(ty.left, limit):
            yield VSum(True, a)
        for b in enumerate_type(ty.right, limit):
            yield VSum(False, b)
    else:
        raise LimitExceeded(f"cannot enumerate {ty}")


def type_size_bits(ty: Type) -> int:
    """Rough bit size of a type's values; the cost model's notion of width."""
    if isinstance(ty, (TUnit, TBool)):
        return 1
    if isinstance(ty, TBitVec):
        return max(1, ty.width)
    if isinstance(ty, TNat):
        return max(1, (ty.bound - 1).bit_length())
    if isinstance(ty, TPair):
        return type_size_bits(ty.fst) + type_size_bits(ty.snd)
    if isinstance(ty, TList):
        return type_size_bits(ty.elem)  # per-element; lists have no static length
    if isinstance(ty, TSum):
        return 1 + max(type_size_bits(ty.left), type_size_bits(ty.right))
    raise TypeError(f"not a type: {ty!r}")
