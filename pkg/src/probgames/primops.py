"""The fixed primitive set for pure expressions.

One table drives everything: the typechecker reads the signature rule,
the evaluator reads the interpreter, and the cost model reads the cost
column. Adding a primitive means adding one entry here.

Cost conventions (documented in the README): xor and eqb on width-w data
cost w; pairing and projections cost 1; a conditional costs its guard
plus the more expensive branch; list probes cost one key comparison;
variables and literals are free.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

from .config import Limits
from .errors import LimitExceeded
from .values import (
    BOOL_T,
    TBitVec,
    TBool,
    TList,
    TNat,
    TPair,
    Type,
    VBitVec,
    VBool,
    VList,
    VNat,
    VPair,
    Value,
    boolean,
    type_size_bits,
)


class SignatureError(Exception):
    """Raised by a type rule; the typechecker attaches the AST path."""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        self.message = message
        super().__init__(message)


def _want(cond: bool, kind: str, message: str) -> None:
    if not cond:
        raise SignatureError(kind, message)


@dataclass(frozen=True)
class PrimOp:
    name: str
    arity: int
    signature: Callable[[Tuple[Type, ...], Limits], Type]
    evaluate: Callable[[Tuple[Value, ...], Limits], Value]
    cost: Callable[[Tuple[Type, ...]], int]


def _sig_xor(ts, limits):
    a, b = ts
    _want(isinstance(a, TBitVec) and isinstance(b, TBitVec), "TypeMismatch",
          f"xor expects bit vectors, got {a} and {b}")
    _want(a.width == b.width, "WidthMismatch", f"xor widths differ: {a.width} vs {b.width}")
    return a


def _sig_eqb(ts, limits):
    a, b = ts
    if isinstance(a, TBitVec) and isinstance(b, TBitVec) and a.width != b.width:
        raise SignatureError("WidthMismatch", f"eqb widths differ: {a.width} vs {b.width}")
    _want(a == b, "TypeMismatch", f"eqb expects equal types, got {a} and {b}")
    return BOOL_T


def _sig_not(ts, limits):
    _want(isinstance(ts[0], TBool), "TypeMismatch", f"not expects bool, got {ts[0]}")
    return BOOL_T


def _sig_pair(ts, limits):
    return TPair(ts[0], ts[1])


def _sig_fst(ts, limits):
    _want(isinstance(ts[0], TPair), "TypeMismatch", f"fst expects a pair, got {ts[0]}")
    return ts[0].fst


def _sig_snd(ts, limits):
    _want(isinstance(ts[0], TPair), "TypeMismatch", f"snd expects a pair, got {ts[0]}")
    return ts[0].snd


def _sig_if(ts, limits):
    c, t, e = ts
    _want(isinstance(c, TBool), "TypeMismatch", f"if guard must be bool, got {c}")
    _want(t == e, "TypeMismatch", f"if branches differ: {t} vs {e}")
    return t


def _sig_cons(ts, limits):
    x, l = ts
    _want(isinstance(l, TList), "TypeMismatch", f"cons expects a list, got {l}")
    _want(l.elem == x, "TypeMismatch", f"cons element {x} does not match list ({l.elem})")
    return l


def _sig_append(ts, limits):
    a, b = ts
    _want(isinstance(a, TList) and isinstance(b, TList), "TypeMismatch",
          f"append expects lists, got {a} and {b}")
    _want(a == b, "TypeMismatch", f"append element types differ: {a} vs {b}")
    return a


def _assoc_types(l: Type) -> Tuple[Type, Type]:
    _want(isinstance(l, TList) and isinstance(l.elem, TPair), "TypeMismatch",
          f"expected a list of pairs, got {l}")
    return l.elem.fst, l.elem.snd


def _sig_mem(ts, limits):
    l, k = ts
    kt, _ = _assoc_types(l)
    _want(kt == k, "TypeMismatch", f"mem key {k} does not match list keys {kt}")
    return BOOL_T


def _sig_lookup(ts, limits):
    l, k, d = ts
    kt, vt = _assoc_types(l)
    _want(kt == k, "TypeMismatch", f"lookup key {k} does not match list keys {kt}")
    _want(vt == d, "TypeMismatch", f"lookup default {d} does not match list values {vt}")
    return vt


def _sig_add(ts, limits):
    a, b = ts
    _want(isinstance(a, TNat) and isinstance(b, TNat), "TypeMismatch",
          f"add expects nats, got {a} and {b}")
    bound = a.bound + b.bound - 1
    if bound > limits.max_nat:
        raise SignatureError("WidthMismatch", f"nat bound {bound} exceeds cap {limits.max_nat}")
    return TNat(bound)


def _sig_lt(ts, limits):
    a, b = ts
    _want(isinstance(a, TNat) and isinstance(b, TNat), "TypeMismatch",
          f"lt expects nats, got {a} and {b}")
    return BOOL_T


def _sig_tonat(ts, limits):
    a = ts[0]
    _want(isinstance(a, TBitVec), "TypeMismatch", f"tonat expects a bit vector, got {a}")
    return TNat(1 << a.width)


def _ev_xor(vs, limits):
    a, b = vs
    return VBitVec(tuple(x != y for x, y in zip(a.bits, b.bits)))


def _ev_eqb(vs, limits):
    return boolean(vs[0] == vs[1])


def _ev_not(vs, limits):
    return boolean(not vs[0].flag)


def _ev_pair(vs, limits):
    return VPair(vs[0], vs[1])


def _ev_cons(vs, limits):
    x, l = vs
    if len(l.items) + 1 > limits.max_list_len:
        raise LimitExceeded(f"list would exceed cap {limits.max_list_len}")
    return VList((x,) + l.items)


def _ev_append(vs, limits):
    a, b = vs
    if len(a.items) + len(b.items) > limits.max_list_len:
        raise LimitExceeded(f"list would exceed cap {limits.max_list_len}")
    return VList(a.items + b.items)


def _ev_mem(vs, limits):
    l, k = vs
    return boolean(any(p.fst == k for p in l.items))


def _ev_lookup(vs, limits):
    l, k, d = vs
    for p in l.items:
        if p.fst == k:
            return p.snd
    return d


def _ev_add(vs, limits):
    return VNat(vs[0].n + vs[1].n)


def _ev_lt(vs, limits):
    return boolean(vs[0].n < vs[1].n)


def _ev_tonat(vs, limits):
    return VNat(vs[0].as_int())


def _cost_width(ts):
    return type_size_bits(ts[0])


def _cost_probe(ts):
    # one key comparison per probe; list length is not statically known
    return type_size_bits(ts[1])


PRIMS = {
    p.name: p
    for p in [
        PrimOp("xor", 2, _sig_xor, _ev_xor, _cost_width),
        PrimOp("eqb", 2, _sig_eqb, _ev_eqb, _cost_width),
        PrimOp("not", 1, _sig_not, _ev_not, lambda ts: 1),
        PrimOp("pair", 2, _sig_pair, _ev_pair, lambda ts: 1),
        PrimOp("fst", 1, _sig_fst, lambda vs, _l: vs[0].fst, lambda ts: 1),
        PrimOp("snd", 1, _sig_snd, lambda vs, _l: vs[0].snd, lambda ts: 1),
        # 'if' cost is guard + max(branches); handled specially by cost_prim
        PrimOp("if", 3, _sig_if, lambda vs, _l: vs[1] if vs[0].flag else vs[2], lambda ts: 0),
        PrimOp("cons", 2, _sig_cons, _ev_cons, lambda ts: 1),
        PrimOp("append", 2, _sig_append, _ev_append, lambda ts: 1),
        PrimOp("mem", 2, _sig_mem, _ev_mem, _cost_probe),
        PrimOp("lookup", 3, _sig_lookup, _ev_lookup, _cost_probe),
        PrimOp("add", 2, _sig_add, _ev_add, _cost_width),
        PrimOp("lt", 2, _sig_lt, _ev_lt, _cost_width),
        PrimOp("tonat", 1, _sig_tonat, _ev_tonat, _cost_width),
    ]
}
