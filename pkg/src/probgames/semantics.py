"""Exact distribution semantics.

``evaluate`` folds a game into its probability mass function:

  - a returned expression is a point mass,
  - a bind marginalizes with the law of total probability over the
    support of its first component,
  - ``rnd n`` is uniform over the 2^n bit vectors,
  - ``repeat`` is the renormalized restriction of its body to the
    predicate (raising if the predicate has zero mass).

``evaluate_oc`` threads an oracle state through a computation with
oracle access, producing a distribution over (result, final state).

All enumeration is exact and memoized per call: a subterm's result is
keyed on the slice of the environment it actually mentions, which is
what keeps long games with dead intermediate values tractable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from .config import DEFAULT_LIMITS, Budget, Limits
from .dist import Dist
from .errors import NotWellFormed, StateTypeMismatch, ZeroMassPredicate
from .primops import PRIMS
from .syntax import (
    App,
    Bind,
    BindOC,
    GameExpr,
    Lit,
    OracleDef,
    OracleExpr,
    Query,
    Repeat,
    Ret,
    RetComp,
    Rnd,
    Run,
    Var,
    free_indices,
    is_game,
)
from .typecheck import typecheck, typecheck_oracle_def
from .values import TPair, Type, VPair, Value, bitvec, conforms

ValEnv = Tuple[Value, ...]
Weighted = Dict[Value, Fraction]

ONE = Fraction(1)


def eval_prim(expr, env: ValEnv, limits: Limits = DEFAULT_LIMITS) -> Value:
    """Evaluate a pure expression under a value environment."""
    if isinstance(expr, Var):
        return env[expr.index]
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, App):
        if expr.op == "if":  # lazy in the untaken branch
            guard = eval_prim(expr.args[0], env, limits)
            taken = expr.args[1] if guard.flag else expr.args[2]
            return eval_prim(taken, env, limits)
        vals = tuple(eval_prim(a, env, limits) for a in expr.args)
        return PRIMS[expr.op].evaluate(vals, limits)
    raise TypeError(f"not a pure expression: {expr!r}")


class _Evaluator:
    """One evaluation call: shared budget, memo tables, free-var cache."""

    def __init__(self, budget: Budget, limits: Limits):
        self.budget = budget
        self.limits = limits
        self.fv: Dict[int, tuple] = {}
        self.memo: Dict[tuple, Weighted] = {}
        self.memo_oc: Dict[tuple, Weighted] = {}

    def _free(self, node) -> tuple:
        key = id(node)
        got = self.fv.get(key)
        if got is None:
            got = tuple(sorted(free_indices(node)))
            self.fv[key] = got
        return got

    def _env_key(self, node, env: ValEnv) -> tuple:
        return tuple(env[i] for i in self._free(node) if i < len(env))

    # -- plain games --------------------------------------------------------

    def game(self, node, env: ValEnv) -> Weighted:
        key = (id(node), self._env_key(node, env))
        got = self.memo.get(key)
        if got is not None:
            return got
        out = self._game(node, env)
        self.memo[key] = out
        return out

    def _game(self, node, env: ValEnv) -> Weighted:
        if isinstance(node, Ret):
            self.budget.charge()
            return {eval_prim(node.expr, env, self.limits): ONE}
        if isinstance(node, Rnd):
            n = node.width
            self.budget.charge(1 << n)
            p = Fraction(1, 1 << n)
            return {bitvec(i, n): p for i in range(1 << n)}
        if isinstance(node, Bind):
            left = self.game(node.left, env)
            out: Weighted = {}
            for v, p in left.items():
                inner = self.game(node.body, (v,) + env)
                self.budget.charge(len(inner))
                for w, q in inner.items():
                    pq = p * q
                    prev = out.get(w)
                    out[w] = pq if prev is None else prev + pq
            return out
        if isinstance(node, Repeat):
            body = self.game(node.body, env)
            total = Fraction(0)
            kept = {}
            for v, p in body.items():
                if eval_prim(node.pred, (v,) + env, self.limits).flag:
                    kept[v] = p
                    total += p
            if total == 0:
                raise ZeroMassPredicate("repeat predicate has zero probability")
            return {v: p / total for v, p in kept.items()}
        raise TypeError(f"not a game expression: {node!r}")

    # -- oracle games -------------------------------------------------------

    def oc(self, node, env: ValEnv, state: Value, handler) -> Weighted:
        key = (id(node), self._env_key(node, env), state, id(handler))
        got = self.memo_oc.get(key)
        if got is not None:
            return got
        out = self._oc(node, env, state, handler)
        self.memo_oc[key] = out
        return out

    def _oc(self, node, env: ValEnv, state: Value, handler) -> Weighted:
        if isinstance(node, Query):
            a = eval_prim(node.arg, env, self.limits)
            d = handler(state, a)
            self.budget.charge(len(d))
            return d
        if isinstance(node, RetComp):
            inner = self.game(node.comp, env)
            return {VPair(v, state): p for v, p in inner.items()}
        if isinstance(node, BindOC):
            left = self.oc(node.left, env, state, handler)
            out: Weighted = {}
            for pair, p in left.items():
                inner = self.oc(node.body, (pair.fst,) + env, pair.snd, handler)
                self.budget.charge(len(inner))
                for w, q in inner.items():
                    pq = p * q
                    prev = out.get(w)
                    out[w] = pq if prev is None else prev + pq
            return out
        if isinstance(node, Run):
            outer = handler
            wrapper = node.wrapper
            captured_env = env

            def wrapped(joint: Value, a: Value) -> Weighted:
                d = self.oc(wrapper, (a, joint.fst) + captured_env, joint.snd, outer)
                # entries are ((answer, wstate'), outer_state'); regroup so the
                # inner computation sees (answer, (wstate', outer_state'))
                return {VPair(e.fst.fst, VPair(e.fst.snd, e.snd)): p for e, p in d.items()}

            init = eval_prim(node.init, env, self.limits)
            d0 = self.oc(node.inner, env, VPair(init, state), wrapped)
            out: Weighted = {}
            for e, p in d0.items():
                # (inner result, (wstate', outer')) -> ((inner result, wstate'), outer')
                w = VPair(VPair(e.fst, e.snd.fst), e.snd.snd)
                prev = out.get(w)
                out[w] = p if prev is None else prev + p
            return out
        raise TypeError(f"not an oracle expression: {node!r}")


def evaluate(expr: GameExpr, *, budget: Optional[Budget] = None,
             limits: Limits = DEFAULT_LIMITS) -> Dist:
    """Exact PMF of a closed game."""
    typed = typecheck(expr, limits=limits)
    ev = _Evaluator(budget or Budget(), limits)
    return Dist(ev.game(expr, ()), typed.ty)


def oracle_handler(oracle: OracleDef, ev: _Evaluator) -> Callable[[Value, Value], Weighted]:
    def call(state: Value, a: Value) -> Weighted:
        return ev.game(oracle.body, (a, state))

    return call


def evaluate_oc(expr: OracleExpr, oracle: OracleDef, state: Value, *,
                budget: Optional[Budget] = None, limits: Limits = DEFAULT_LIMITS) -> Dist:
    """Exact PMF over (result, final oracle state) pairs."""
    typed_def = typecheck_oracle_def(oracle, limits=limits)
    typed = typecheck(expr, iface=(oracle.in_type, oracle.out_type), limits=limits)
    if not conforms(state, oracle.state_type):
        raise StateTypeMismatch(f"state {state} does not have type {oracle.state_type}")
    ev = _Evaluator(budget or Budget(), limits)
    entries = ev.oc(expr, (), state, oracle_handler(oracle, ev))
    return Dist(entries, TPair(typed.ty, oracle.state_type))


@dataclass(frozen=True)
class WellFormedness:
    ok: bool
    reason: str = ""


def check_well_formed(expr: GameExpr, *, budget: Optional[Budget] = None,
                      limits: Limits = DEFAULT_LIMITS) -> WellFormedness:
    """A game is well-formed iff its exact denotation has total mass 1.

    With exact rationals the only failure mode is a reachable Repeat whose
    predicate has zero mass (conditioning would divide by zero); budget
    overruns propagate as BudgetExceeded rather than producing a verdict.
    """
    typecheck(expr, limits=limits)
    try:
        d = evaluate(expr, budget=budget, limits=limits)
    except ZeroMassPredicate as e:
        return WellFormedness(False, str(e))
    assert d.mass() == 1, "internal invariant: total mass must be 1"
    return WellFormedness(True)


def require_well_formed(expr: GameExpr, *, budget: Optional[Budget] = None,
                        limits: Limits = DEFAULT_LIMITS) -> None:
    wf = check_well_formed(expr, budget=budget, limits=limits)
    if not wf.ok:
        raise NotWellFormed(wf.reason)
