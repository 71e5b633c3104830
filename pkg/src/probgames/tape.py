"""Small-step bit-tape semantics, exhaustive tape enumeration, and the
entropy-driven sampler.

A program runs against a finite tape of bits. ``rnd n`` consumes exactly
n bits (most significant first); a bind reduces its left component and
then substitutes the produced value; a repeat runs its body for one full
pass per step and retries on predicate failure, reading further along
the tape. Running out of bits is an outcome, not an error.

``run_all_tapes`` weighs each of the 2^n tapes at 2^-n. It enumerates
lazily over shared prefixes (grouping tapes by the prefix a run actually
consumes), which is observationally identical to naive enumeration; the
test suite cross-checks the two on small instances.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .config import DEFAULT_LIMITS, Budget, Limits
from .dist import Dist, stat_distance
from .errors import EntropyExhausted, LimitExceeded
from .semantics import eval_prim, evaluate, require_well_formed
from .syntax import Bind, GameExpr, Lit, Repeat, Ret, Rnd, Var, free_indices, instantiate
from .typecheck import typecheck
from .values import VBitVec, Value

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Tape:
    bits: Tuple[bool, ...]
    cursor: int = 0

    def remaining(self) -> int:
        return len(self.bits) - self.cursor

    def take(self, n: int) -> Optional[Tuple[Tuple[bool, ...], "Tape"]]:
        if self.remaining() < n:
            return None
        chunk = self.bits[self.cursor:self.cursor + n]
        return chunk, Tape(self.bits, self.cursor + n)


@dataclass(frozen=True)
class Continue:
    expr: GameExpr
    tape: Tape


@dataclass(frozen=True)
class Done:
    value: Value
    tape: Tape


@dataclass(frozen=True)
class OutOfBits:
    pass


StepResult = Union[Continue, Done, OutOfBits]

OUT_OF_BITS = OutOfBits()


def step(expr: GameExpr, tape: Tape, limits: Limits = DEFAULT_LIMITS) -> StepResult:
    """One deterministic step. The expression must be closed."""
    if isinstance(expr, Ret):
        return Done(eval_prim(expr.expr, (), limits), tape)
    if isinstance(expr, Rnd):
        got = tape.take(expr.width)
        if got is None:
            return OUT_OF_BITS
        chunk, tape2 = got
        return Done(VBitVec(chunk), tape2)
    if isinstance(expr, Bind):
        inner = step(expr.left, tape, limits)
        if isinstance(inner, Done):
            lit_t = typecheck(expr.left, limits=limits).ty
            return Continue(instantiate(expr.body, (Lit(inner.value, lit_t),)), inner.tape)
        if isinstance(inner, Continue):
            return Continue(Bind(inner.expr, expr.body), inner.tape)
        return inner
    if isinstance(expr, Repeat):
        # one full pass of the body, then check the predicate
        start = tape.cursor
        outcome, tape2 = run_to_completion(expr.body, tape, limits)
        if isinstance(outcome, OutOfBits):
            return OUT_OF_BITS
        if eval_prim(expr.pred, (outcome.value,), limits).flag:
            return Done(outcome.value, tape2)
        if tape2.cursor == start:
            # the pass consumed nothing and failed: it would fail forever
            return OUT_OF_BITS
        return Continue(expr, tape2)
    raise TypeError(f"not a game expression: {expr!r}")


def run_to_completion(expr: GameExpr, tape: Tape,
                      limits: Limits = DEFAULT_LIMITS) -> Tuple[Union[Done, OutOfBits], Tape]:
    cur: GameExpr = expr
    cur_tape = tape
    while True:
        res = step(cur, cur_tape, limits)
        if isinstance(res, Done):
            return res, res.tape
        if isinstance(res, OutOfBits):
            return res, cur_tape
        cur = res.expr
        cur_tape = res.tape


@dataclass(frozen=True)
class TapeEnumeration:
    dist: Dist
    failure: Fraction

    def total(self) -> Fraction:
        return self.dist.mass() + self.failure


class _TapeEnumerator:
    """Distribution over (value, bits consumed) for length-k tapes.

    Sharing: a run that consumes u bits stands for 2^(k-u) whole tapes,
    so results are weighted by the probability of the consumed prefix
    only. Memoized on (subterm, live environment slice, k).
    """

    def __init__(self, budget: Budget, limits: Limits):
        self.budget = budget
        self.limits = limits
        self.memo: Dict[tuple, Tuple[Dict[Tuple[Value, int], Fraction], Fraction]] = {}
        self.fv: Dict[int, tuple] = {}

    def _env_key(self, node, env):
        key = id(node)
        fv = self.fv.get(key)
        if fv is None:
            fv = tuple(sorted(free_indices(node)))
            self.fv[key] = fv
        return tuple(env[i] for i in fv if i < len(env))

    def run(self, node: GameExpr, env, k: int):
        key = (id(node), self._env_key(node, env), k)
        got = self.memo.get(key)
        if got is not None:
            return got
        out = self._run(node, env, k)
        self.memo[key] = out
        return out

    def _run(self, node: GameExpr, env, k: int):
        self.budget.charge()
        if isinstance(node, Ret):
            return {(eval_prim(node.expr, env, self.limits), 0): ONE}, ZERO
        if isinstance(node, Rnd):
            n = node.width
            if n > k:
                return {}, ONE
            self.budget.charge(1 << n)
            p = Fraction(1, 1 << n)
            out = {}
            for i in range(1 << n):
                bits = tuple(bool((i >> (n - 1 - j)) & 1) for j in range(n))
                out[(VBitVec(bits), n)] = p
            return out, ZERO
        if isinstance(node, Bind):
            first, fail = self.run(node.left, env, k)
            out: Dict[Tuple[Value, int], Fraction] = {}
            for (v, used), p in first.items():
                rest, rfail = self.run(node.body, (v,) + env, k - used)
                fail += p * rfail
                self.budget.charge(len(rest))
                for (w, used2), q in rest.items():
                    key = (w, used + used2)
                    prev = out.get(key)
                    pq = p * q
                    out[key] = pq if prev is None else prev + pq
            return out, fail
        if isinstance(node, Repeat):
            body, fail = self.run(node.body, env, k)
            out: Dict[Tuple[Value, int], Fraction] = {}
            for (v, used), p in body.items():
                if eval_prim(node.pred, (v,) + env, self.limits).flag:
                    key = (v, used)
                    prev = out.get(key)
                    out[key] = p if prev is None else prev + p
                elif used == 0:
                    fail += p  # a zero-bit failing pass retries identically forever
                else:
                    rest, rfail = self.run(node, env, k - used)
                    fail += p * rfail
                    self.budget.charge(len(rest))
                    for (w, used2), q in rest.items():
                        key = (w, used + used2)
                        prev = out.get(key)
                        pq = p * q
                        out[key] = pq if prev is None else prev + pq
            return out, fail
        raise TypeError(f"not a game expression: {node!r}")


def run_all_tapes(expr: GameExpr, n: int, *, budget: Optional[Budget] = None,
                  limits: Limits = DEFAULT_LIMITS) -> TapeEnumeration:
    """Weigh each of the 2^n tapes at 2^-n and collect outcomes."""
    if n < 0 or n > limits.max_tape:
        raise LimitExceeded(f"tape length {n} outside 0..{limits.max_tape}")
    typed = typecheck(expr, limits=limits)
    enum = _TapeEnumerator(budget or Budget(), limits)
    weighted, failure = enum.run(expr, (), n)
    marginal: Dict[Value, Fraction] = {}
    for (v, _used), p in weighted.items():
        marginal[v] = marginal.get(v, ZERO) + p
    return TapeEnumeration(Dist(marginal, typed.ty), failure)


def deterministic_bits(expr: GameExpr) -> int:
    """Total bits consumed by a Repeat-free game (every rnd runs exactly once)."""
    if isinstance(expr, Ret):
        return 0
    if isinstance(expr, Rnd):
        return expr.width
    if isinstance(expr, Bind):
        return deterministic_bits(expr.left) + deterministic_bits(expr.body)
    if isinstance(expr, Repeat):
        raise ValueError("deterministic_bits is only defined for Repeat-free games")
    raise TypeError(f"not a game expression: {expr!r}")


def adequacy_distance(enum: TapeEnumeration, denot: Dist) -> Fraction:
    """Distance between a tape enumeration and the denotation, counting the
    failure mass as an extra outcome the denotation never produces."""
    return stat_distance(enum.dist, denot) + enum.failure / 2


def adequacy_report(expr: GameExpr, max_n: int, *, budget: Optional[Budget] = None,
                    limits: Limits = DEFAULT_LIMITS) -> List[Tuple[int, Fraction]]:
    """(n, distance([expr]_n, denotation)) for n = 0..max_n."""
    require_well_formed(expr, limits=limits)
    denot = evaluate(expr, limits=limits)
    out = []
    for n in range(max_n + 1):
        enum = run_all_tapes(expr, n, budget=budget, limits=limits)
        out.append((n, adequacy_distance(enum, denot)))
    return out


# ---------------------------------------------------------------------------
# Entropy sources and the sampler


class BitSource:
    """Pull-based stream of bits."""

    def next_bit(self) -> bool:  # pragma: no cover - interface only
        raise NotImplementedError

    def take(self, n: int) -> Tuple[bool, ...]:
        return tuple(self.next_bit() for _ in range(n))


class SeededSource(BitSource):
    """Deterministic generator: splitmix64 over a 64-bit seed, emitting each
    output word most significant bit first. Documented in the README."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK
        self._buf: List[bool] = []

    def _next_word(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def next_bit(self) -> bool:
        if not self._buf:
            w = self._next_word()
            self._buf = [bool((w >> (63 - i)) & 1) for i in range(64)]
        return self._buf.pop(0)


class OsSource(BitSource):
    """Operating system entropy."""

    def __init__(self):
        self._buf: List[bool] = []

    def next_bit(self) -> bool:
        if not self._buf:
            byte = os.urandom(1)[0]
            self._buf = [bool((byte >> (7 - i)) & 1) for i in range(8)]
        return self._buf.pop(0)


class ListSource(BitSource):
    """Finite, explicit bit list; raises EntropyExhausted when drained."""

    def __init__(self, bits: Iterable[bool]):
        self._bits = list(bits)
        self._pos = 0

    def next_bit(self) -> bool:
        if self._pos >= len(self._bits):
            raise EntropyExhausted("bit source is exhausted")
        b = self._bits[self._pos]
        self._pos += 1
        return b


def sample(expr: GameExpr, source: BitSource, retry_chunk: int = 64,
           limits: Limits = DEFAULT_LIMITS) -> Value:
    """Run under the tape semantics, pulling ``retry_chunk`` fresh bits and
    re-running from scratch whenever the tape proves too short."""
    if retry_chunk < 1:
        raise ValueError("retry_chunk must be positive")
    bits: Tuple[bool, ...] = ()
    while True:
        outcome, _tape = run_to_completion(expr, Tape(bits), limits)
        if isinstance(outcome, Done):
            return outcome.value
        bits = bits + source.take(retry_chunk)
