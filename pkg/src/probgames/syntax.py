"""Deep ASTs for pure expressions, probabilistic games and oracle games.

Binders use de Bruijn indices: ``Var(0)`` is the innermost enclosing
binder. Binders are introduced by ``Bind`` bodies (one), ``Repeat``
predicates (one), run-wrapper bodies (two: index 1 the wrapper state,
index 0 the query input) and oracle bodies (same two-binder convention).

Pure expressions never bind, so de Bruijn bookkeeping only happens at
game constructors. Shifting and instantiation below are the standard
operations; everything else in the engine is written against them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

from .values import Type, Value

# ---------------------------------------------------------------------------
# Pure (deterministic) expressions


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lit:
    value: Value
    ty: Type


@dataclass(frozen=True)
class App:
    op: str
    args: Tuple["PrimExpr", ...]


PrimExpr = Union[Var, Lit, App]


# ---------------------------------------------------------------------------
# Probabilistic games


@dataclass(frozen=True)
class Ret:
    expr: PrimExpr


@dataclass(frozen=True)
class Bind:
    left: "GameExpr"
    body: "GameExpr"  # one binder: Var(0) is left's result


@dataclass(frozen=True)
class Rnd:
    width: int


@dataclass(frozen=True)
class Repeat:
    body: "GameExpr"
    pred: PrimExpr  # one binder: Var(0) is the candidate value


GameExpr = Union[Ret, Bind, Rnd, Repeat]


# ---------------------------------------------------------------------------
# Games with oracle access


@dataclass(frozen=True)
class Query:
    arg: PrimExpr


@dataclass(frozen=True)
class RetComp:
    comp: GameExpr


@dataclass(frozen=True)
class BindOC:
    left: "OracleExpr"
    body: "OracleExpr"  # one binder


@dataclass(frozen=True)
class Run:
    """Run ``inner`` against a wrapper oracle that may query the outer oracle.

    ``wrapper`` has two binders (1: wrapper state, 0: query input) and must
    produce a pair (answer, new wrapper state). ``state_type``/``in_type``
    declare the wrapper's state and input types; the inner computation's
    oracle interface is (in_type, answer type of wrapper).
    """

    inner: "OracleExpr"
    wrapper: "OracleExpr"
    state_type: Type
    in_type: Type
    init: PrimExpr


OracleExpr = Union[Query, RetComp, BindOC, Run]


@dataclass(frozen=True)
class OracleDef:
    """A stateful oracle: body is a game with two binders (1: state, 0: input)
    returning a pair (output, new state)."""

    name: str
    state_type: Type
    in_type: Type
    out_type: Type
    body: GameExpr
    init: Value


AnyExpr = Union[PrimExpr, GameExpr, OracleExpr]


# ---------------------------------------------------------------------------
# Builders (terse constructors used all over the engine and tests)


def var(i: int) -> Var:
    return Var(i)


def lit(v: Value, ty: Type) -> Lit:
    return Lit(v, ty)


def app(op: str, *args: PrimExpr) -> App:
    return App(op, tuple(args))


# ---------------------------------------------------------------------------
# Structure helpers


def binder_arity(node: AnyExpr, field: str) -> int:
    """How many binders the given child field introduces."""
    if isinstance(node, Bind) and field == "body":
        return 1
    if isinstance(node, Repeat) and field == "pred":
        return 1
    if isinstance(node, BindOC) and field == "body":
        return 1
    if isinstance(node, Run) and field == "wrapper":
        return 2
    return 0


def _map_children(node: AnyExpr, fn: Callable[[AnyExpr, int], AnyExpr]) -> AnyExpr:
    """Rebuild a node with fn applied to each child; fn gets the binder count."""
    if isinstance(node, Var) or isinstance(node, Lit) or isinstance(node, Rnd):
        return node
    if isinstance(node, App):
        return App(node.op, tuple(fn(a, 0) for a in node.args))
    if isinstance(node, Ret):
        return Ret(fn(node.expr, 0))
    if isinstance(node, Bind):
        return Bind(fn(node.left, 0), fn(node.body, 1))
    if isinstance(node, Repeat):
        return Repeat(fn(node.body, 0), fn(node.pred, 1))
    if isinstance(node, Query):
        return Query(fn(node.arg, 0))
    if isinstance(node, RetComp):
        return RetComp(fn(node.comp, 0))
    if isinstance(node, BindOC):
        return BindOC(fn(node.left, 0), fn(node.body, 1))
    if isinstance(node, Run):
        return Run(fn(node.inner, 0), fn(node.wrapper, 2), node.state_type, node.in_type, fn(node.init, 0))
    raise TypeError(f"not an expression: {node!r}")


def shift(node: AnyExpr, amount: int, cutoff: int = 0) -> AnyExpr:
    """Add ``amount`` to every free Var index >= cutoff."""
    if amount == 0:
        return node
    if isinstance(node, Var):
        if node.index >= cutoff:
            new = node.index + amount
            if new < 0:
                raise ValueError("shift would create a negative index")
            return Var(new)
        return node
    return _map_children(node, lambda child, nb: shift(child, amount, cutoff + nb))


def subst_frame(node: AnyExpr, base: int, repls: Tuple[PrimExpr, ...], depth: int = 0) -> AnyExpr:
    """Substitute away the index block [base, base+len(repls)).

    Var(base + i) becomes repls[i] (written against the frame below the
    consumed block, shifted under binders); indices above the block drop
    by len(repls); indices below ``base`` are untouched.
    """
    k = len(repls)
    if k == 0:
        return node
    if isinstance(node, Var):
        i = node.index
        if i < depth + base:
            return node
        if i < depth + base + k:
            return shift(repls[i - depth - base], depth)
        return Var(i - k)
    return _map_children(node, lambda child, nb: subst_frame(child, base, repls, depth + nb))


def instantiate(node: AnyExpr, repls: Tuple[PrimExpr, ...], depth: int = 0) -> AnyExpr:
    """Simultaneous beta: consume the ``len(repls)`` innermost binders.

    repls[0] replaces index 0, matching the two-binder body convention
    (instantiate(body, (input_expr, state_expr))).
    """
    return subst_frame(node, 0, repls, depth)


def replace_index(node: AnyExpr, index: int, repl: PrimExpr, depth: int = 0) -> AnyExpr:
    """Replace Var(index) by ``repl`` without renumbering anything else.

    Used when a consumed binder is immediately replaced by a fresh one, so
    the surrounding indices keep their meaning.
    """
    if isinstance(node, Var):
        if node.index == depth + index:
            return shift(repl, depth)
        return node
    return _map_children(node, lambda child, nb: replace_index(child, index, repl, depth + nb))


def free_indices(node: AnyExpr, depth: int = 0, acc=None) -> set:
    """Free de Bruijn indices, normalized to the node's own frame."""
    if acc is None:
        acc = set()
    if isinstance(node, Var):
        if node.index >= depth:
            acc.add(node.index - depth)
        return acc
    if isinstance(node, (Lit, Rnd)):
        return acc
    if isinstance(node, App):
        for a in node.args:
            free_indices(a, depth, acc)
        return acc
    if isinstance(node, Ret):
        return free_indices(node.expr, depth, acc)
    if isinstance(node, Bind):
        free_indices(node.left, depth, acc)
        return free_indices(node.body, depth + 1, acc)
    if isinstance(node, Repeat):
        free_indices(node.body, depth, acc)
        return free_indices(node.pred, depth + 1, acc)
    if isinstance(node, Query):
        return free_indices(node.arg, depth, acc)
    if isinstance(node, RetComp):
        return free_indices(node.comp, depth, acc)
    if isinstance(node, BindOC):
        free_indices(node.left, depth, acc)
        return free_indices(node.body, depth + 1, acc)
    if isinstance(node, Run):
        free_indices(node.inner, depth, acc)
        free_indices(node.wrapper, depth + 2, acc)
        return free_indices(node.init, depth, acc)
    raise TypeError(f"not an expression: {node!r}")


def free_of(expr: AnyExpr, index: int) -> bool:
    """True iff Var(index) does not occur free in expr."""
    return index not in free_indices(expr)


# ---------------------------------------------------------------------------
# Subterm paths (game-level children only; used by the rewrite engine)

_GAME_CHILDREN = {
    Bind: ("left", "body"),
    Repeat: ("body",),
    RetComp: ("comp",),
    BindOC: ("left", "body"),
    Run: ("inner", "wrapper"),
}


def game_children(node: AnyExpr):
    """(index, child, binders) triples for the game-shaped children."""
    fields = _GAME_CHILDREN.get(type(node), ())
    out = []
    for i, f in enumerate(fields):
        out.append((i, getattr(node, f), binder_arity(node, f)))
    return out


def subterm_at(node: AnyExpr, path: Tuple[int, ...]) -> AnyExpr:
    cur = node
    for step in path:
        fields = _GAME_CHILDREN.get(type(cur), ())
        if step >= len(fields):
            raise IndexError(f"no child {step} under {type(cur).__name__}")
        cur = getattr(cur, fields[step])
    return cur


def replace_at(node: AnyExpr, path: Tuple[int, ...], new: AnyExpr) -> AnyExpr:
    if not path:
        return new
    fields = _GAME_CHILDREN.get(type(node), ())
    step = path[0]
    if step >= len(fields):
        raise IndexError(f"no child {step} under {type(node).__name__}")
    child = getattr(node, fields[step])
    rebuilt = replace_at(child, path[1:], new)
    kwargs = {f: getattr(node, f) for f in node.__dataclass_fields__}
    kwargs[fields[step]] = rebuilt
    return type(node)(**kwargs)


def binders_above(node: AnyExpr, path: Tuple[int, ...]) -> int:
    """Binders introduced between the root and the subterm at path."""
    cur = node
    total = 0
    for step in path:
        fields = _GAME_CHILDREN.get(type(cur), ())
        total += binder_arity(cur, fields[step])
        cur = getattr(cur, fields[step])
    return total


def is_game(node: AnyExpr) -> bool:
    return isinstance(node, (Ret, Bind, Rnd, Repeat))


def is_oracle_expr(node: AnyExpr) -> bool:
    return isinstance(node, (Query, RetComp, BindOC, Run))
