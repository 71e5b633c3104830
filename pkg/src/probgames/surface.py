"""Textual surface syntax: parsing `.game` files and canonical printing.

The grammar is ASCII-only. One bind arrow `<-$` covers probabilistic
sequencing in both plain games and oracle computations; `x <- e` is a
pure let (sugar for binding a returned expression). Comments run from
`--` to end of line. Non-ASCII bytes outside comments are lexer errors.

A file is a sequence of items:

    param NAME := INT                      -- compile-time constant
    def NAME(p: T, ...) := EXPR            -- game definition
    def NAME(...) with oracle (A => B) := EXPR   -- oracle computation
    oracle NAME(extra..., s: TS, x: TA) init VAL := EXPR

References resolve to earlier definitions only and are inlined at parse
time (arguments substituted), so recursion cannot be expressed. The form
`run E with O(args) from S` builds a wrapper run when O is an oracle
computation, and fully inlines the interaction when O names an oracle
definition.

Nat literals are written bare (`3` has type `nat 4`); any other literal
type is pinned with an annotation group such as `(nil : list (bv 2))`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .config import DEFAULT_LIMITS, Limits
from .errors import ParseFailure, TypeCheckError
from .inline import inline_with_oracle
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
    app,
    instantiate,
    is_game,
    shift,
    subst_frame,
    var,
)
from .typecheck import typecheck, typecheck_oracle_def
from .values import (
    BOOL_T,
    FALSE,
    NIL,
    TRUE,
    TBitVec,
    TBool,
    TList,
    TNat,
    TPair,
    TSum,
    TUnit,
    Type,
    UNIT,
    VBitVec,
    VBool,
    VList,
    VNat,
    VPair,
    VSum,
    VUnit,
    Value,
    conforms,
)

KEYWORDS = {
    "def", "oracle", "param", "with", "from", "init", "run", "query", "ret",
    "rnd", "repeat", "fun", "if", "then", "else", "true", "false", "nil",
    "inl", "inr", "list", "bv", "nat", "unit", "bool",
}


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    col: int
    severity: str
    message: str

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


class _LexError(Exception):
    def __init__(self, line, col, message):
        self.line, self.col, self.message = line, col, message


_SYMBOLS = [
    (":=", "DEFINE"), ("<-$", "SAMPLE"), ("<-", "LET"), ("=>", "DARROW"),
    ("(", "LPAREN"), (")", "RPAREN"), ("[", "LBRACKET"), ("]", "RBRACKET"),
    (",", "COMMA"), (";", "SEMI"), (":", "COLON"), ("*", "STAR"), ("+", "PLUS"),
]


def _lex(text: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ord(c) > 127:
            raise _LexError(line, col, f"non-ASCII character {c!r} outside a comment")
        matched = False
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token(kind, sym, line, col))
                i += len(sym)
                col += len(sym)
                matched = True
                break
        if matched:
            continue
        if text.startswith("0b", i):
            j = i + 2
            while j < n and text[j] in "01":
                j += 1
            if j == i + 2:
                raise _LexError(line, col, "bit literal needs at least one digit")
            toks.append(Token("BITS", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise _LexError(line, col, f"unexpected character {c!r}")
    toks.append(Token("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parsed definitions


@dataclass
class GameDefn:
    name: str
    params: List[Tuple[str, Type]]
    kind: str  # "game" | "oc"
    iface: Optional[Tuple[Type, Type]]
    body: Union[GameExpr, OracleExpr]
    result: Type


@dataclass
class OracleDefn:
    name: str
    extra_params: List[Tuple[str, Type]]
    state_type: Type
    in_type: Type
    out_type: Type
    body: GameExpr
    init: Value

    def instantiate(self, args: Tuple = ()) -> OracleDef:
        body = self.body
        if args:
            body = subst_frame(body, 2, tuple(reversed(args)))
        return OracleDef(self.name, self.state_type, self.in_type, self.out_type, body, self.init)


@dataclass
class SourceFile:
    path: str
    params: Dict[str, int] = field(default_factory=dict)
    defs: Dict[str, Union[GameDefn, OracleDefn]] = field(default_factory=dict)

    def game(self, name: str) -> GameExpr:
        d = self.defs.get(name)
        if not isinstance(d, GameDefn) or d.kind != "game":
            raise KeyError(f"no game definition named '{name}'")
        if d.params:
            raise KeyError(f"game '{name}' takes parameters")
        return d.body

    def oracle_comp(self, name: str) -> Tuple[OracleExpr, Tuple[Type, Type]]:
        d = self.defs.get(name)
        if not isinstance(d, GameDefn) or d.kind != "oc":
            raise KeyError(f"no oracle computation named '{name}'")
        return d.body, d.iface

    def oracle(self, name: str) -> OracleDef:
        d = self.defs.get(name)
        if not isinstance(d, OracleDefn):
            raise KeyError(f"no oracle named '{name}'")
        if d.extra_params:
            raise KeyError(f"oracle '{name}' takes parameters")
        return d.instantiate()


class _ParseError(Exception):
    def __init__(self, tok: Token, message: str):
        self.tok = tok
        self.message = message


@dataclass
class _Tagged:
    kind: str  # "game" | "oc"
    ast: Union[GameExpr, OracleExpr]


def _coerce_oc(t: _Tagged) -> OracleExpr:
    if t.kind == "oc":
        return t.ast
    return RetComp(t.ast)


class _Parser:
    def __init__(self, toks: List[Token], path: str, params: Dict[str, int],
                 limits: Limits):
        self.toks = toks
        self.pos = 0
        self.path = path
        self.params = params
        self.limits = limits
        self.defs: Dict[str, Union[GameDefn, OracleDefn]] = {}

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str = "") -> Token:
        t = self.peek()
        if t.kind != kind:
            raise _ParseError(t, f"expected {what or kind}, found {t.text or 'end of file'!r}")
        return self.next()

    def at_ident(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and t.text == word

    def eat_ident(self, word: str) -> bool:
        if self.at_ident(word):
            self.next()
            return True
        return False

    def expect_ident(self, word: str):
        t = self.peek()
        if not self.at_ident(word):
            raise _ParseError(t, f"expected '{word}', found {t.text or 'end of file'!r}")
        self.next()

    # -- types

    def parse_int_or_param(self) -> int:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return int(t.text)
        if t.kind == "IDENT" and t.text in self.params:
            self.next()
            return self.params[t.text]
        raise _ParseError(t, f"expected a number or declared parameter, found {t.text!r}")

    def parse_type(self) -> Type:
        t = self.peek()
        if t.kind == "IDENT":
            if t.text == "unit":
                self.next()
                return TUnit()
            if t.text == "bool":
                self.next()
                return TBool()
            if t.text == "bv":
                self.next()
                return TBitVec(self.parse_int_or_param())
            if t.text == "nat":
                self.next()
                return TNat(self.parse_int_or_param())
            if t.text == "list":
                self.next()
                self.expect("LPAREN", "'(' after list")
                elem = self.parse_type()
                self.expect("RPAREN")
                return TList(elem)
        if t.kind == "LPAREN":
            self.next()
            left = self.parse_type()
            op = self.peek()
            if op.kind == "STAR":
                self.next()
                right = self.parse_type()
                self.expect("RPAREN")
                return TPair(left, right)
            if op.kind == "PLUS":
                self.next()
                right = self.parse_type()
                self.expect("RPAREN")
                return TSum(left, right)
            self.expect("RPAREN")
            return left
        raise _ParseError(t, f"expected a type, found {t.text!r}")

    # -- literal values (inside annotation groups)

    def parse_value(self) -> Value:
        t = self.peek()
        if t.kind == "IDENT":
            if t.text == "true":
                self.next()
                return TRUE
            if t.text == "false":
                self.next()
                return FALSE
            if t.text == "nil":
                self.next()
                return NIL
            if t.text in ("inl", "inr"):
                self.next()
                return VSum(t.text == "inl", self.parse_value())
        if t.kind == "BITS":
            self.next()
            return VBitVec(tuple(c == "1" for c in t.text[2:]))
        if t.kind == "INT":
            self.next()
            return VNat(int(t.text))
        if t.kind == "LBRACKET":
            self.next()
            items = []
            if self.peek().kind != "RBRACKET":
                items.append(self.parse_value())
                while self.peek().kind == "COMMA":
                    self.next()
                    items.append(self.parse_value())
            self.expect("RBRACKET")
            return VList(tuple(items))
        if t.kind == "LPAREN":
            self.next()
            if self.peek().kind == "RPAREN":
                self.next()
                return UNIT
            first = self.parse_value()
            self.expect("COMMA", "',' in pair value")
            second = self.parse_value()
            self.expect("RPAREN")
            return VPair(first, second)
        raise _ParseError(t, f"expected a literal value, found {t.text!r}")

    # -- pure expressions

    def parse_prim(self, scope: List[str]):
        t = self.peek()
        if t.kind == "IDENT" and t.text == "if":
            self.next()
            guard = self.parse_prim(scope)
            self.expect_ident("then")
            then = self.parse_prim(scope)
            self.expect_ident("else")
            other = self.parse_prim(scope)
            return App("if", (guard, then, other))
        return self.parse_app(scope)

    def parse_app(self, scope: List[str]):
        t = self.peek()
        if t.kind == "IDENT" and t.text in PRIMS and t.text != "if":
            op = PRIMS[t.text]
            self.next()
            if self.peek().kind == "LPAREN":
                # call style: op(a, b); a single parenthesized group that is
                # not comma-split at top level is one ml-style argument
                save = self.pos
                self.next()
                args = [self.parse_prim(scope)]
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.parse_prim(scope))
                if self.peek().kind == "RPAREN" and len(args) in (op.arity, 1):
                    self.next()
                    if len(args) == op.arity:
                        return App(op.name, tuple(args))
                    if op.arity == 1:
                        return App(op.name, tuple(args))
                    # one parenthesized arg for a multi-arg op: ml style
                    rest = [self.parse_atom(scope) for _ in range(op.arity - 1)]
                    return App(op.name, tuple(args + rest))
                self.pos = save
            args = [self.parse_atom(scope) for _ in range(op.arity)]
            return App(op.name, tuple(args))
        return self.parse_atom(scope)

    def parse_atom(self, scope: List[str]):
        t = self.peek()
        if t.kind == "IDENT":
            if t.text == "true":
                self.next()
                return Lit(TRUE, BOOL_T)
            if t.text == "false":
                self.next()
                return Lit(FALSE, BOOL_T)
            if t.text in PRIMS or t.text == "if":
                return self.parse_app(scope)
            if t.text in KEYWORDS:
                raise _ParseError(t, f"unexpected keyword '{t.text}' in expression")
            self.next()
            if t.text in scope:
                return Var(scope[::-1].index(t.text))
            raise _ParseError(t, f"unbound name '{t.text}'")
        if t.kind == "BITS":
            self.next()
            bits = tuple(c == "1" for c in t.text[2:])
            return Lit(VBitVec(bits), TBitVec(len(bits)))
        if t.kind == "INT":
            self.next()
            n = int(t.text)
            return Lit(VNat(n), TNat(n + 1))
        if t.kind == "LPAREN":
            self.next()
            if self.peek().kind == "RPAREN":
                self.next()
                return Lit(UNIT, TUnit())
            save = self.pos
            try:
                inner = self.parse_prim(scope)
            except _ParseError:
                inner = None
                self.pos = save
            if inner is not None and self.peek().kind == "RPAREN":
                self.next()
                return inner
            if inner is not None and self.peek().kind == "COMMA":
                self.next()
                second = self.parse_prim(scope)
                self.expect("RPAREN")
                return App("pair", (inner, second))
            if inner is not None and self.peek().kind == "COLON":
                # re-parse the group as an annotated literal
                self.pos = save
            value = self.parse_value()
            self.expect("COLON", "':' in annotated literal")
            ty = self.parse_type()
            self.expect("RPAREN")
            return Lit(value, ty)
        raise _ParseError(t, f"expected an expression, found {t.text or 'end of file'!r}")

    # -- games / oracle computations

    def parse_seq(self, scope: List[str]) -> _Tagged:
        t = self.peek()
        if (t.kind == "IDENT" and t.text not in KEYWORDS
                and self.peek(1).kind in ("SAMPLE", "LET")):
            name = t.text
            if name in PRIMS:
                raise _ParseError(t, f"'{name}' is a primitive name and cannot be bound")
            self.next()
            arrow = self.next()
            if arrow.kind == "SAMPLE":
                head = self.parse_simple(scope)
            else:
                head = _Tagged("game", Ret(self.parse_prim(scope)))
            self.expect("SEMI", "';' after binding")
            rest = self.parse_seq(scope + [name])
            if head.kind == "oc" or rest.kind == "oc":
                return _Tagged("oc", BindOC(_coerce_oc(head), _coerce_oc(rest)))
            return _Tagged("game", Bind(head.ast, rest.ast))
        return self.parse_simple(scope)

    def parse_simple(self, scope: List[str]) -> _Tagged:
        t = self.peek()
        if t.kind == "LPAREN":
            self.next()
            inner = self.parse_seq(scope)
            self.expect("RPAREN")
            return inner
        if t.kind != "IDENT":
            raise _ParseError(t, f"expected a computation, found {t.text or 'end of file'!r}")
        if t.text == "ret":
            self.next()
            return _Tagged("game", Ret(self.parse_prim(scope)))
        if t.text == "rnd":
            self.next()
            return _Tagged("game", Rnd(self.parse_int_or_param()))
        if t.text == "repeat":
            self.next()
            self.expect("LPAREN", "'(' around repeat body")
            body = self.parse_seq(scope)
            self.expect("RPAREN")
            if body.kind != "game":
                raise _ParseError(t, "repeat body must be oracle-free")
            self.expect("LPAREN", "'(' around repeat predicate")
            self.expect_ident("fun")
            nametok = self.expect("IDENT", "binder name")
            self.expect("DARROW", "'=>'")
            pred = self.parse_prim(scope + [nametok.text])
            self.expect("RPAREN")
            return _Tagged("game", Repeat(body.ast, pred))
        if t.text == "query":
            self.next()
            return _Tagged("oc", Query(self.parse_prim(scope)))
        if t.text == "run":
            return self.parse_run(scope)
        if t.text in KEYWORDS:
            raise _ParseError(t, f"unexpected keyword '{t.text}'")
        # definition reference
        name = t.text
        self.next()
        args: List = []
        if self.peek().kind == "LPAREN":
            self.next()
            if self.peek().kind != "RPAREN":
                args.append(self.parse_prim(scope))
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.parse_prim(scope))
            self.expect("RPAREN")
        d = self.defs.get(name)
        if d is None:
            raise _ParseError(t, f"unknown definition '{name}' (forward references are not allowed)")
        if isinstance(d, OracleDefn):
            raise _ParseError(t, f"'{name}' is an oracle; use it in a 'run ... with {name} from ...'")
        if len(args) != len(d.params):
            raise _ParseError(t, f"'{name}' takes {len(d.params)} arguments, got {len(args)}")
        body = instantiate(d.body, tuple(reversed(args))) if args else d.body
        return _Tagged(d.kind, body)

    def parse_run(self, scope: List[str]) -> _Tagged:
        start = self.peek()
        self.expect_ident("run")
        inner = self.parse_simple(scope)
        self.expect_ident("with")
        t = self.peek()
        if t.kind == "LPAREN":
            # anonymous wrapper: (fun (s : T, x : T') => EXPR)
            self.next()
            self.expect_ident("fun")
            self.expect("LPAREN", "'(' around wrapper parameters")
            sname = self.expect("IDENT", "state binder").text
            self.expect("COLON")
            stype = self.parse_type()
            self.expect("COMMA")
            xname = self.expect("IDENT", "input binder").text
            self.expect("COLON")
            xtype = self.parse_type()
            self.expect("RPAREN")
            self.expect("DARROW", "'=>'")
            wrapper = self.parse_seq(scope + [sname, xname])
            self.expect("RPAREN")
            self.expect_ident("from")
            init = self.parse_prim(scope)
            return _Tagged("oc", Run(_coerce_oc(inner), _coerce_oc(wrapper), stype, xtype, init))
        nametok = self.expect("IDENT", "oracle or wrapper name")
        name = nametok.text
        args: List = []
        if self.peek().kind == "LPAREN":
            self.next()
            if self.peek().kind != "RPAREN":
                args.append(self.parse_prim(scope))
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.parse_prim(scope))
            self.expect("RPAREN")
        self.expect_ident("from")
        init = self.parse_prim(scope)
        d = self.defs.get(name)
        if d is None:
            raise _ParseError(nametok, f"unknown definition '{name}'")
        if isinstance(d, OracleDefn):
            if len(args) != len(d.extra_params):
                raise _ParseError(nametok,
                                  f"oracle '{name}' takes {len(d.extra_params)} arguments, got {len(args)}")
            odef = d.instantiate(tuple(args))
            game = inline_with_oracle(_coerce_oc(inner), odef, init)
            return _Tagged("game", game)
        if d.kind != "oc" or len(d.params) < 2:
            raise _ParseError(nametok,
                              f"'{name}' cannot serve as a run wrapper (needs state and input parameters)")
        extra = d.params[:-2]
        if len(args) != len(extra):
            raise _ParseError(nametok, f"wrapper '{name}' takes {len(extra)} arguments, got {len(args)}")
        wrapper_body = subst_frame(d.body, 2, tuple(reversed(args))) if args else d.body
        stype = d.params[-2][1]
        xtype = d.params[-1][1]
        return _Tagged("oc", Run(_coerce_oc(inner), wrapper_body, stype, xtype, init))

    # -- items

    def parse_file(self) -> Tuple[SourceFile, List[Diagnostic]]:
        sf = SourceFile(self.path, dict(self.params))
        diags: List[Diagnostic] = []
        while self.peek().kind != "EOF":
            start = self.peek()
            try:
                self.parse_item(sf)
            except _ParseError as e:
                diags.append(Diagnostic(self.path, e.tok.line, e.tok.col, "error", e.message))
                self.sync()
            except TypeCheckError as e:
                for issue in e.issues:
                    diags.append(Diagnostic(self.path, start.line, start.col, "error", str(issue)))
                self.sync()
        return sf, diags

    def sync(self):
        while self.peek().kind != "EOF":
            t = self.peek()
            if t.kind == "IDENT" and t.text in ("def", "oracle", "param"):
                return
            self.next()

    def parse_params(self) -> List[Tuple[str, Type]]:
        params: List[Tuple[str, Type]] = []
        if self.peek().kind != "LPAREN":
            return params
        self.next()
        if self.peek().kind != "RPAREN":
            while True:
                nametok = self.expect("IDENT", "parameter name")
                if nametok.text in KEYWORDS or nametok.text in PRIMS:
                    raise _ParseError(nametok, f"'{nametok.text}' cannot be a parameter name")
                self.expect("COLON", "':' after parameter name")
                ty = self.parse_type()
                params.append((nametok.text, ty))
                if self.peek().kind != "COMMA":
                    break
                self.next()
        self.expect("RPAREN")
        return params

    def parse_item(self, sf: SourceFile):
        t = self.peek()
        if self.eat_ident("param"):
            nametok = self.expect("IDENT", "parameter name")
            self.expect("DEFINE", "':='")
            val = self.expect("INT", "integer")
            if nametok.text not in self.params:
                self.params[nametok.text] = int(val.text)
            sf.params[nametok.text] = self.params[nametok.text]
            return
        if self.eat_ident("def"):
            nametok = self.expect("IDENT", "definition name")
            name = nametok.text
            if name in self.defs:
                raise _ParseError(nametok, f"duplicate definition '{name}'")
            if name in KEYWORDS or name in PRIMS:
                raise _ParseError(nametok, f"'{name}' cannot be a definition name")
            params = self.parse_params()
            iface = None
            if self.eat_ident("with"):
                self.expect_ident("oracle")
                self.expect("LPAREN", "'('")
                in_t = self.parse_type()
                self.expect("DARROW", "'=>'")
                out_t = self.parse_type()
                self.expect("RPAREN")
                iface = (in_t, out_t)
            self.expect("DEFINE", "':='")
            body = self.parse_seq([p for p, _ in params])
            if body.kind == "oc" and iface is None:
                raise _ParseError(nametok,
                                  f"'{name}' queries an oracle; declare 'with oracle (A => B)'")
            env = tuple(ty for _, ty in reversed(params))
            if iface is not None:
                ast = _coerce_oc(body)
                typed = typecheck(ast, env, iface, self.limits)
                self.defs[name] = GameDefn(name, params, "oc", iface, ast, typed.ty)
            else:
                typed = typecheck(body.ast, env, limits=self.limits)
                self.defs[name] = GameDefn(name, params, "game", None, body.ast, typed.ty)
            sf.defs[name] = self.defs[name]
            return
        if self.eat_ident("oracle"):
            nametok = self.expect("IDENT", "oracle name")
            name = nametok.text
            if name in self.defs:
                raise _ParseError(nametok, f"duplicate definition '{name}'")
            params = self.parse_params()
            if len(params) < 2:
                raise _ParseError(nametok, "an oracle needs at least (state, input) parameters")
            self.expect_ident("init")
            init_value = self.parse_value()
            self.expect("DEFINE", "':='")
            body = self.parse_seq([p for p, _ in params])
            if body.kind != "game":
                raise _ParseError(nametok, "oracle bodies cannot query other oracles")
            extra = params[:-2]
            state_name, state_type = params[-2]
            in_name, in_type = params[-1]
            env = (in_type, state_type) + tuple(ty for _, ty in reversed(extra))
            typed = typecheck(body.ast, env, limits=self.limits)
            if not isinstance(typed.ty, TPair) or typed.ty.snd != state_type:
                raise _ParseError(nametok,
                                  f"oracle '{name}' body must return (output * {state_type}), got {typed.ty}")
            if not conforms(init_value, state_type):
                raise _ParseError(nametok, f"initial state does not have type {state_type}")
            d = OracleDefn(name, extra, state_type, in_type, typed.ty.fst, body.ast, init_value)
            self.defs[name] = d
            sf.defs[name] = d
            return
        raise _ParseError(t, f"expected 'def', 'oracle' or 'param', found {t.text!r}")


def parse(text: str, path: str = "<game>", params: Optional[Dict[str, int]] = None,
          limits: Limits = DEFAULT_LIMITS) -> Tuple[Optional[SourceFile], List[Diagnostic]]:
    """Parse a source file; returns (SourceFile, []) or (None, diagnostics)."""
    try:
        toks = _lex(text)
    except _LexError as e:
        return None, [Diagnostic(path, e.line, e.col, "error", e.message)]
    parser = _Parser(toks, path, dict(params or {}), limits)
    sf, diags = parser.parse_file()
    if diags:
        return None, diags
    return sf, []


def parse_or_raise(text: str, path: str = "<game>", params: Optional[Dict[str, int]] = None,
                   limits: Limits = DEFAULT_LIMITS) -> SourceFile:
    sf, diags = parse(text, path, params, limits)
    if sf is None:
        raise ParseFailure(diags)
    return sf


def parse_game_expr(text: str, limits: Limits = DEFAULT_LIMITS) -> GameExpr:
    """Parse a single closed game expression (testing/CLI convenience)."""
    sf = parse_or_raise(f"def __expr__ := {text}", limits=limits)
    return sf.game("__expr__")


# ---------------------------------------------------------------------------
# Canonical printing


def _render_value(v: Value) -> str:
    if isinstance(v, VList):
        if not v.items:
            return "nil"
        return "[" + ", ".join(_render_value(x) for x in v.items) + "]"
    if isinstance(v, VPair):
        return f"({_render_value(v.fst)}, {_render_value(v.snd)})"
    if isinstance(v, VSum):
        return f"{'inl' if v.is_left else 'inr'} {_render_value(v.value)}"
    return str(v)


def render_type(ty: Type) -> str:
    if isinstance(ty, TPair):
        return f"({render_type(ty.fst)} * {render_type(ty.snd)})"
    if isinstance(ty, TSum):
        return f"({render_type(ty.left)} + {render_type(ty.right)})"
    if isinstance(ty, TList):
        return f"list ({render_type(ty.elem)})"
    return str(ty)


def _print_lit(e: Lit) -> str:
    v, ty = e.value, e.ty
    if isinstance(v, VBool) or isinstance(v, VUnit):
        return str(v)
    if isinstance(v, VBitVec) and ty == TBitVec(v.width) and v.width > 0:
        return str(v)
    if isinstance(v, VNat) and ty == TNat(v.n + 1):
        return str(v)
    return f"({_render_value(v)} : {render_type(ty)})"


def print_prim(e, names: Tuple[str, ...] = ()) -> str:
    """Canonical text of a pure expression; ``names`` maps binder indices."""
    if isinstance(e, Var):
        if e.index < len(names):
            return names[e.index]
        return f"_free{e.index - len(names)}"
    if isinstance(e, Lit):
        return _print_lit(e)
    if isinstance(e, App):
        if e.op == "if":
            c, t, o = (print_prim(a, names) for a in e.args)
            return f"if {c} then {t} else {o}"
        if e.op == "pair":
            return f"({print_prim(e.args[0], names)}, {print_prim(e.args[1], names)})"
        return e.op + "".join(" " + _atom(a, names) for a in e.args)
    raise TypeError(f"not a pure expression: {e!r}")


def _atom(e, names) -> str:
    s = print_prim(e, names)
    if isinstance(e, (Var, Lit)) or (isinstance(e, App) and e.op == "pair"):
        return s
    return f"({s})"


def _fresh(names: Tuple[str, ...]) -> str:
    return f"x{len(names)}"


def _print_seq(e, names: Tuple[str, ...]) -> str:
    """Body of a bind chain (game or oracle computation)."""
    if isinstance(e, Bind):
        x = _fresh(names)
        if isinstance(e.left, Ret):
            head = f"{x} <- {print_prim(e.left.expr, names)}"
        else:
            head = f"{x} <-$ {_print_simple(e.left, names)}"
        return f"{head}; {_print_seq(e.body, (x,) + names)}"
    if isinstance(e, BindOC):
        x = _fresh(names)
        left = e.left
        if isinstance(left, RetComp) and isinstance(left.comp, Ret):
            head = f"{x} <- {print_prim(left.comp.expr, names)}"
        else:
            head = f"{x} <-$ {_print_simple(left, names)}"
        return f"{head}; {_print_seq(e.body, (x,) + names)}"
    return _print_simple(e, names)


def _print_simple(e, names: Tuple[str, ...]) -> str:
    if isinstance(e, Ret):
        return f"ret {_atom(e.expr, names)}"
    if isinstance(e, Rnd):
        return f"rnd {e.width}"
    if isinstance(e, Repeat):
        x = _fresh(names)
        return (f"repeat ({_print_seq(e.body, names)}) "
                f"(fun {x} => {print_prim(e.pred, (x,) + names)})")
    if isinstance(e, Bind):
        return f"({_print_seq(e, names)})"
    if isinstance(e, Query):
        return f"query {_atom(e.arg, names)}"
    if isinstance(e, RetComp):
        if isinstance(e.comp, Bind):
            return f"({_print_seq(e.comp, names)})"
        return _print_simple(e.comp, names)
    if isinstance(e, BindOC):
        return f"({_print_seq(e, names)})"
    if isinstance(e, Run):
        s = _fresh(names)
        x = f"x{len(names) + 1}"
        wrapper = _print_seq(e.wrapper, (x, s) + names)
        return (f"run ({_print_seq(e.inner, names)}) "
                f"with (fun ({s} : {render_type(e.state_type)}, {x} : {render_type(e.in_type)}) "
                f"=> {wrapper}) from {_atom(e.init, names)}")
    raise TypeError(f"cannot print {e!r}")


def print_game(e: GameExpr, names: Tuple[str, ...] = ()) -> str:
    """Canonical text; parse of the result reproduces ``e`` structurally."""
    return _print_seq(e, names)


def print_oracle_expr(e: OracleExpr, names: Tuple[str, ...] = ()) -> str:
    return _print_seq(e, names)


def parse_oc_expr(text: str, iface: Tuple[Type, Type],
                  limits: Limits = DEFAULT_LIMITS) -> OracleExpr:
    """Parse a closed oracle computation with the given interface."""
    decl = f"def __expr__ with oracle ({render_type(iface[0])} => {render_type(iface[1])}) := {text}"
    sf = parse_or_raise(decl, limits=limits)
    body, _ = sf.oracle_comp("__expr__")
    return body
