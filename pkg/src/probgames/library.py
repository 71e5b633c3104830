"""Reusable program pieces: the random-function oracle, samplers, and
list combinators, plus the exact collision-bound checkers the case study
leans on.

The random function keeps an insertion-ordered association list. Its
body always draws one fresh sample and then selects between the stored
answer and the fresh one, because the game language has no effectful
conditional; the selection makes the distribution identical to the
lazy-sampling description (on a repeat query the fresh draw is ignored,
so it marginalizes away).
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, log2
from typing import List, Sequence, Tuple

from .config import DEFAULT_LIMITS, Limits
from .dist import Dist
from .errors import DenominatorTooLarge, NotWellFormed
from .semantics import check_well_formed, evaluate
from .syntax import App, Bind, GameExpr, Lit, OracleDef, Repeat, Ret, Rnd, app, lit, shift, var
from .typecheck import typecheck
from .values import (
    BOOL_T,
    FALSE,
    NIL,
    TBitVec,
    TBool,
    TList,
    TNat,
    TPair,
    Type,
    VList,
    VNat,
    Value,
    boolean,
)


def random_func(output_sampler: GameExpr, in_type: Type, name: str = "randomFunc") -> OracleDef:
    """Oracle memoizing a fresh sample per distinct input.

    On query d: if d was seen before, answer the stored value with the
    state unchanged; otherwise sample, record (d, sample) at the end of
    the association list, and answer the sample.
    """
    wf = check_well_formed(output_sampler)
    if not wf.ok:
        raise NotWellFormed(f"output sampler: {wf.reason}")
    out_type = typecheck(output_sampler).ty
    state_t = TList(TPair(in_type, out_type))
    # body binders: 1 = state, 0 = input; after the sampler bind, 0 = fresh sample
    seen = app("mem", var(2), var(1))
    stored = app("lookup", var(2), var(1), var(0))
    nil_lit = lit(NIL, state_t)
    entry = app("pair", var(1), var(0))
    grown = app("append", var(2), app("cons", entry, nil_lit))
    body = Bind(
        shift(output_sampler, 2),
        Ret(app("pair",
                app("if", seen, stored, var(0)),
                app("if", seen, var(2), grown))),
    )
    return OracleDef(name, state_t, in_type, out_type, body, NIL)


def rnd_nat(bound: int, limits: Limits = DEFAULT_LIMITS) -> GameExpr:
    """Uniform natural in 0..bound-1 via rejection over ceil(log2 bound) bits."""
    if bound < 1 or bound > limits.max_nat:
        raise ValueError(f"bound {bound} outside 1..{limits.max_nat}")
    if bound == 1:
        return Ret(lit(VNat(0), TNat(1)))
    k = ceil(log2(bound))
    decode = Ret(app("tonat", var(0)))
    if bound == (1 << k):
        return Bind(Rnd(k), decode)  # power of two: no rejection needed
    bound_lit = lit(VNat(bound), TNat(bound + 1))
    accept = app("lt", app("tonat", var(0)), bound_lit)
    return Bind(Repeat(Rnd(k), accept), decode)


def bernoulli(p: Fraction, limits: Limits = DEFAULT_LIMITS) -> GameExpr:
    """Game returning true with probability exactly p (dyadic p only)."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0:
        return Ret(lit(FALSE, BOOL_T))
    if p == 1:
        return Ret(lit(boolean(True), BOOL_T))
    den = p.denominator
    if den & (den - 1) != 0 or den > (1 << limits.max_width):
        raise DenominatorTooLarge(f"denominator {den} is not a power of two within 2^{limits.max_width}")
    k = den.bit_length() - 1
    threshold = lit(VNat(p.numerator), TNat(p.numerator + 1))
    return Bind(Rnd(k), Ret(app("lt", app("tonat", var(0)), threshold)))


def comp_map(body: GameExpr, elem_type: Type, xs: Sequence[Value]) -> GameExpr:
    """Sample ``body`` (one binder: the list element) once per element and
    collect the results in order."""
    out_type = typecheck(body, (elem_type,)).ty
    n = len(xs)
    # y_i <-$ body[x_i];  ... ; ret [y_0 .. y_{n-1}]
    acc: GameExpr = Ret(_list_expr([var(n - 1 - i) for i in range(n)], out_type))
    for i in reversed(range(n)):
        from .syntax import instantiate

        inst = instantiate(body, (Lit(xs[i], elem_type),))
        acc = Bind(shift(inst, i), acc)
    return acc


def comp_fold(body: GameExpr, acc_type: Type, elem_type: Type,
              init: Value, xs: Sequence[Value]) -> GameExpr:
    """Monadic fold: body has binders (1: accumulator, 0: element)."""
    from .syntax import instantiate

    ty = typecheck(body, (elem_type, acc_type)).ty
    if ty != acc_type:
        raise ValueError(f"fold body returns {ty}, accumulator is {acc_type}")
    game: GameExpr = Ret(Lit(init, acc_type))
    for x in xs:
        step = instantiate(shift(body, 1, 2), (Lit(x, elem_type), var(0)))
        game = Bind(game, step)
    return game


def _list_expr(items: List, elem_type: Type):
    out = Lit(NIL, TList(elem_type))
    for e in reversed(items):
        out = app("cons", e, out)
    return out


# ---------------------------------------------------------------------------
# Collision bounds ("a fresh uniform value rarely lands in a short list")


def fresh_collides_with_list(width: int, entries: Sequence[Value]) -> Tuple[Fraction, Fraction, bool]:
    """Exact probability that a fresh uniform width-bit value equals some
    list entry, with the q/2^width bound. Returns (exact, bound, holds)."""
    q = len(entries)
    distinct = len(set(entries))
    exact = Fraction(distinct, 1 << width)
    bound = Fraction(q, 1 << width)
    return exact, bound, exact <= bound


def random_list_hits_value(width: int, q: int) -> Tuple[Fraction, Fraction, bool]:
    """Exact probability that q fresh uniform width-bit draws contain a
    fixed value, with the q/2^width union bound."""
    miss = Fraction((1 << width) - 1, 1 << width)
    exact = 1 - miss**q
    bound = Fraction(q, 1 << width)
    return exact, bound, exact <= bound
