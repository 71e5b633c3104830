"""Compile oracle computations against a concrete oracle into plain games.

The denotation of a computation with oracle access is a state-indexed
distribution; when the oracle is known we can realize that denotation
syntactically by splicing the oracle body in at every query and
threading the state through explicit pairs. The inliner below does
exactly that, giving a game over (result, final state).

Evaluating the inlined game agrees with ``evaluate_oc`` on the nose;
the test suite enforces that on generated instances. Everything here is
de Bruijn bookkeeping: handlers capture the depth they were created at
and shift their bodies to the splice site.
"""
from __future__ import annotations

from .syntax import (
    Bind,
    BindOC,
    GameExpr,
    OracleDef,
    OracleExpr,
    Query,
    Ret,
    RetComp,
    Run,
    app,
    instantiate,
    replace_index,
    shift,
    var,
)


class InlineHandler:
    """Produces the game for one oracle call at a given binder depth."""

    def call(self, state_expr, input_expr, depth: int) -> GameExpr:  # pragma: no cover
        raise NotImplementedError


class DefHandler(InlineHandler):
    """Oracle given by a definition body (binders 1: state, 0: input).

    Free indices >= 2 in the body refer to the frame that was current at
    ``created_depth``; they are lifted to the splice depth.
    """

    def __init__(self, body: GameExpr, created_depth: int = 0):
        self.body = body
        self.created_depth = created_depth

    def call(self, state_expr, input_expr, depth: int) -> GameExpr:
        body = shift(self.body, depth - self.created_depth, 2)
        return instantiate(body, (input_expr, state_expr))


class _WrapperHandler(InlineHandler):
    """Oracle given by a run-wrapper: an oracle computation that answers the
    inner program by querying the outer oracle. Its state is the pair
    (wrapper state, outer state)."""

    def __init__(self, wrapper: OracleExpr, outer: InlineHandler, created_depth: int):
        self.wrapper = wrapper
        self.outer = outer
        self.created_depth = created_depth

    def call(self, state_expr, input_expr, depth: int) -> GameExpr:
        body = shift(self.wrapper, depth - self.created_depth, 2)
        oc = instantiate(body, (input_expr, app("fst", state_expr)))
        g = inline_oc(oc, self.outer, app("snd", state_expr), depth)
        # g yields ((answer, wstate'), outer'); the combined oracle must
        # yield (answer, (wstate', outer'))
        reshape = Ret(app("pair",
                          app("fst", app("fst", var(0))),
                          app("pair", app("snd", app("fst", var(0))), app("snd", var(0)))))
        return Bind(g, reshape)


def inline_oc(oc: OracleExpr, handler: InlineHandler, state_expr, depth: int = 0) -> GameExpr:
    """Game over (result, final state) for ``oc`` run against ``handler``.

    ``oc`` and ``state_expr`` live in the frame current at ``depth``.
    """
    if isinstance(oc, Query):
        return handler.call(state_expr, oc.arg, depth)
    if isinstance(oc, RetComp):
        return Bind(oc.comp, Ret(app("pair", var(0), shift(state_expr, 1))))
    if isinstance(oc, BindOC):
        first = inline_oc(oc.left, handler, state_expr, depth)
        # under the new binder the pair is Var(0); the old binder becomes
        # fst(pair) and outer references keep their indices (one binder
        # consumed, one introduced)
        body = replace_index(oc.body, 0, app("fst", var(0)))
        rest = inline_oc(body, handler, app("snd", var(0)), depth + 1)
        return Bind(first, rest)
    if isinstance(oc, Run):
        wrapped = _WrapperHandler(oc.wrapper, handler, depth)
        g = inline_oc(oc.inner, wrapped, app("pair", oc.init, state_expr), depth)
        # g yields (inner result, (wstate', outer')); a run produces
        # ((inner result, wstate'), outer')
        reshape = Ret(app("pair",
                          app("pair", app("fst", var(0)), app("fst", app("snd", var(0)))),
                          app("snd", app("snd", var(0)))))
        return Bind(g, reshape)
    raise TypeError(f"not an oracle expression: {oc!r}")


def inline_with_oracle(oc: OracleExpr, oracle: OracleDef, state_expr,
                       depth: int = 0, oracle_depth: int = 0) -> GameExpr:
    """Inline against an oracle definition; ``oracle_depth`` is the binder
    depth the oracle body's free variables were written against."""
    return inline_oc(oc, DefHandler(oracle.body, oracle_depth), state_expr, depth)


def call_oracle(oracle: OracleDef, state_expr, input_expr,
                depth: int = 0, oracle_depth: int = 0) -> GameExpr:
    """One direct oracle call as a game over (output, new state)."""
    return DefHandler(oracle.body, oracle_depth).call(state_expr, input_expr, depth)
