"""Typechecking for pure expressions, games, and oracle games.

Every subterm of a checked AST gets a type annotation, addressed by its
structural path (child indices over *all* children, pure subterms
included). Binder environments are tuples with index 0 innermost,
mirroring the runtime value environments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .config import DEFAULT_LIMITS, Limits
from .errors import TypeCheckError, TypeIssue
from .primops import PRIMS, SignatureError
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
    is_game,
    is_oracle_expr,
)
from .values import TBitVec, TBool, TList, TNat, TPair, TSum, Type, conforms

TypeEnv = Tuple[Type, ...]
Iface = Tuple[Type, Type]  # (query input type, query answer type)


@dataclass
class Typed:
    """A typechecked AST: result type plus per-path annotations."""

    expr: object
    ty: Type
    env: TypeEnv
    iface: Optional[Iface] = None
    types: Dict[Tuple[int, ...], Type] = field(default_factory=dict)

    def type_at(self, path: Tuple[int, ...]) -> Type:
        return self.types[path]


def _fail(kind: str, path: Tuple[int, ...], msg: str):
    raise TypeCheckError([TypeIssue(kind, path, msg)])


def validate_type(ty: Type, limits: Limits, path: Tuple[int, ...] = ()) -> None:
    """Reject types outside the finiteness caps."""
    if isinstance(ty, TBitVec):
        if not (1 <= ty.width <= limits.max_width):
            _fail("WidthMismatch", path, f"bit width {ty.width} outside 1..{limits.max_width}")
    elif isinstance(ty, TNat):
        if not (1 <= ty.bound <= limits.max_nat):
            _fail("WidthMismatch", path, f"nat bound {ty.bound} outside 1..{limits.max_nat}")
    elif isinstance(ty, TPair):
        validate_type(ty.fst, limits, path)
        validate_type(ty.snd, limits, path)
    elif isinstance(ty, TList):
        validate_type(ty.elem, limits, path)
    elif isinstance(ty, TSum):
        validate_type(ty.left, limits, path)
        validate_type(ty.right, limits, path)


def check_prim(expr, env: TypeEnv, limits: Limits = DEFAULT_LIMITS,
               path: Tuple[int, ...] = (), out: Optional[dict] = None) -> Type:
    if out is None:
        out = {}
    if isinstance(expr, Var):
        if expr.index < 0 or expr.index >= len(env):
            _fail("UnboundVariable", path, f"variable {expr.index} not bound (env has {len(env)})")
        ty = env[expr.index]
    elif isinstance(expr, Lit):
        validate_type(expr.ty, limits, path)
        if not conforms(expr.value, expr.ty):
            _fail("TypeMismatch", path, f"literal {expr.value} does not have type {expr.ty}")
        ty = expr.ty
    elif isinstance(expr, App):
        op = PRIMS.get(expr.op)
        if op is None:
            _fail("TypeMismatch", path, f"unknown primitive '{expr.op}'")
        if len(expr.args) != op.arity:
            _fail("TypeMismatch", path, f"{expr.op} expects {op.arity} arguments, got {len(expr.args)}")
        arg_types = tuple(
            check_prim(a, env, limits, path + (i,), out) for i, a in enumerate(expr.args)
        )
        try:
            ty = op.signature(arg_types, limits)
        except SignatureError as e:
            _fail(e.kind, path, e.message)
    else:
        _fail("TypeMismatch", path, f"not a pure expression: {expr!r}")
    out[path] = ty
    return ty


def _check_game(expr, env: TypeEnv, limits: Limits, path, out) -> Type:
    if isinstance(expr, Ret):
        ty = check_prim(expr.expr, env, limits, path + (0,), out)
    elif isinstance(expr, Rnd):
        if not (1 <= expr.width <= limits.max_width):
            _fail("WidthMismatch", path, f"rnd width {expr.width} outside 1..{limits.max_width}")
        ty = TBitVec(expr.width)
    elif isinstance(expr, Bind):
        left = _check_game(expr.left, env, limits, path + (0,), out)
        ty = _check_game(expr.body, (left,) + env, limits, path + (1,), out)
    elif isinstance(expr, Repeat):
        body = _check_game(expr.body, env, limits, path + (0,), out)
        pred = check_prim(expr.pred, (body,) + env, limits, path + (1,), out)
        if not isinstance(pred, TBool):
            _fail("TypeMismatch", path + (1,), f"repeat predicate must be bool, got {pred}")
        ty = body
    else:
        _fail("TypeMismatch", path, f"not a game expression: {expr!r}")
    out[path] = ty
    return ty


def _check_oc(expr, env: TypeEnv, iface: Iface, limits: Limits, path, out) -> Type:
    in_t, out_t = iface
    if isinstance(expr, Query):
        arg = check_prim(expr.arg, env, limits, path + (0,), out)
        if arg != in_t:
            _fail("TypeMismatch", path, f"query input has type {arg}, oracle takes {in_t}")
        ty = out_t
    elif isinstance(expr, RetComp):
        ty = _check_game(expr.comp, env, limits, path + (0,), out)
    elif isinstance(expr, BindOC):
        left = _check_oc(expr.left, env, iface, limits, path + (0,), out)
        ty = _check_oc(expr.body, (left,) + env, iface, limits, path + (1,), out)
    elif isinstance(expr, Run):
        validate_type(expr.state_type, limits, path)
        validate_type(expr.in_type, limits, path)
        init_t = check_prim(expr.init, env, limits, path + (2,), out)
        if init_t != expr.state_type:
            _fail("TypeMismatch", path + (2,),
                  f"run initial state has type {init_t}, declared {expr.state_type}")
        wrapper_env = (expr.in_type, expr.state_type) + env
        wrapper_t = _check_oc(expr.wrapper, wrapper_env, iface, limits, path + (1,), out)
        if not isinstance(wrapper_t, TPair) or wrapper_t.snd != expr.state_type:
            _fail("TypeMismatch", path + (1,),
                  f"run wrapper must return (answer * {expr.state_type}), got {wrapper_t}")
        answer_t = wrapper_t.fst
        inner_t = _check_oc(expr.inner, env, (expr.in_type, answer_t), limits, path + (0,), out)
        ty = TPair(inner_t, expr.state_type)
    else:
        _fail("TypeMismatch", path, f"not an oracle expression: {expr!r}")
    out[path] = ty
    return ty


def typecheck(expr, env: TypeEnv = (), iface: Optional[Iface] = None,
              limits: Limits = DEFAULT_LIMITS) -> Typed:
    """Typecheck a game or oracle game; oracle games need their interface."""
    out: Dict[Tuple[int, ...], Type] = {}
    for t in env:
        validate_type(t, limits)
    if iface is not None:
        validate_type(iface[0], limits)
        validate_type(iface[1], limits)
    if is_game(expr):
        ty = _check_game(expr, env, limits, (), out)
    elif is_oracle_expr(expr):
        if iface is None:
            _fail("TypeMismatch", (), "oracle expression needs an oracle interface")
        ty = _check_oc(expr, env, iface, limits, (), out)
    else:
        ty = check_prim(expr, env, limits, (), out)
    return Typed(expr, ty, env, iface, out)


def typecheck_oracle_def(d: OracleDef, env: TypeEnv = (), limits: Limits = DEFAULT_LIMITS) -> Typed:
    """Check an oracle definition: body must give (out_type * state_type)."""
    for t in (d.state_type, d.in_type, d.out_type):
        validate_type(t, limits)
    body_env = (d.in_type, d.state_type) + env
    typed = typecheck(d.body, body_env, limits=limits)
    want = TPair(d.out_type, d.state_type)
    if typed.ty != want:
        _fail("TypeMismatch", (), f"oracle {d.name} body has type {typed.ty}, expected {want}")
    if not conforms(d.init, d.state_type):
        _fail("TypeMismatch", (), f"oracle {d.name} initial state does not fit {d.state_type}")
    return typed
