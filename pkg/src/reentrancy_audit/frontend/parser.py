"""Recursive-descent parser for the Solidity subset.

The subset covers what small payment contracts of the 0.4/0.5 era use:
contracts with state variables (elementary types and ``mapping(address =>
T)``), constructors (both spellings), a fallback, ``require``, ``if/else``,
``=``/``+=``/``-=`` assignments, events, ``transfer``/``send``/``call.value``
and high-level calls through contract handles.  Anything else is rejected
with :class:`UnsupportedConstruct` rather than being silently skipped.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .. import nodes as n
from ..errors import ParseError, UnsupportedConstruct, UnsupportedVersion
from .lexer import Token, tokenize

SUPPORTED_LOW = (0, 4, 22)
SUPPORTED_HIGH = (0, 6, 0)  # exclusive

ELEMENTARY = {"bool", "address", "string", "uint"} | {f"uint{b}" for b in range(8, 257, 8)}
VISIBILITIES = {"public", "external", "private", "internal"}
UNITS = {"wei": 1, "szabo": 10**12, "finney": 10**15, "ether": 10**18}
BUILTIN_MEMBERS = {
    "msg": {"sender", "value"},
    "tx": {"origin"},
    "block": {"number"},
}
UNSUPPORTED_KEYWORDS = {
    "for", "while", "do", "assembly", "throw", "delete", "var", "new",
    "break", "continue", "unchecked", "try_catch", "modifier", "struct",
    "enum", "using", "library", "interface", "abstract",
}
UNSUPPORTED_CALLS = {
    "keccak256", "sha256", "sha3", "ripemd160", "selfdestruct", "suicide",
    "revert", "assert", "ecrecover", "blockhash", "gasleft", "addmod",
    "mulmod",
}
UNSUPPORTED_BASES = {"abi", "super", "type", "now"}

# binary operator precedence, loosest first
PRECEDENCE = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]


@dataclass
class _CallOptions:
    """``x.f.value(v).gas(g)`` awaiting its argument list."""

    member: n.Member
    value: Optional[n.Expr]
    gas: Optional[n.Expr]
    pos: n.Pos


# --------------------------------------------------------------------------
# version handling

_VERSION_RE = re.compile(r"(\^|~|>=|<=|>|<|=)?\s*v?(\d+)\.(\d+)(?:\.(\d+))?")


def _enc(major: int, minor: int, patch: int) -> int:
    return major * 1_000_000 + minor * 1_000 + patch


def version_range(pragma: str) -> tuple[int, int]:
    """Inclusive encoded bounds of a ``pragma solidity`` constraint."""
    lo, hi = 0, _enc(999, 999, 999)
    found = False
    for m in _VERSION_RE.finditer(pragma):
        found = True
        op = m.group(1) or "="
        major, minor = int(m.group(2)), int(m.group(3))
        patch = int(m.group(4) or 0)
        v = _enc(major, minor, patch)
        if op == "^":
            top = _enc(0, minor + 1, 0) if major == 0 else _enc(major + 1, 0, 0)
            lo, hi = max(lo, v), min(hi, top - 1)
        elif op == "~":
            lo, hi = max(lo, v), min(hi, _enc(major, minor + 1, 0) - 1)
        elif op == ">=":
            lo = max(lo, v)
        elif op == ">":
            lo = max(lo, v + 1)
        elif op == "<=":
            hi = min(hi, v)
        elif op == "<":
            hi = min(hi, v - 1)
        else:
            lo, hi = max(lo, v), min(hi, v)
    if not found:
        raise UnsupportedVersion(pragma)
    return lo, hi


def check_version(pragma: str) -> None:
    lo, hi = version_range(pragma)
    if max(lo, _enc(*SUPPORTED_LOW)) > min(hi, _enc(*SUPPORTED_HIGH) - 1):
        raise UnsupportedVersion(pragma)


# --------------------------------------------------------------------------


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    # token plumbing
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("identifier")
        return self.advance()

    def error(self, expected: str):
        tok = self.tok
        raise ParseError(tok.line, tok.col, expected, tok.text or "EOF")

    def unsupported(self, construct: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise UnsupportedConstruct(construct, (tok.line, tok.col))

    @staticmethod
    def pos(tok: Token) -> n.Pos:
        return (tok.line, tok.col)

    # ------------------------------------------------------------------
    # top level

    def parse_unit(self) -> n.SourceUnit:
        start = self.tok
        pragma = None
        imports: list[str] = []
        contracts: list[n.ContractDef] = []
        while self.tok.kind != "eof":
            if self.at("pragma"):
                tok = self.advance()
                if self.at("experimental") or self.at("abicoder"):
                    self.unsupported(f"pragma {self.tok.text}")
                self.expect("solidity")
                parts = []
                while not self.at(";"):
                    if self.tok.kind == "eof":
                        self.error("';'")
                    parts.append(self.advance().text)
                self.expect(";")
                text = _join_version(parts)
                if pragma is not None:
                    self.unsupported("multiple version pragmas", tok)
                check_version(text)
                pragma = text
            elif self.at("import"):
                self.advance()
                if self.tok.kind != "string":
                    self.unsupported("import form")
                imports.append(_unquote(self.advance().text))
                self.expect(";")
            elif self.at("contract"):
                contracts.append(self.parse_contract())
            elif self.tok.text in UNSUPPORTED_KEYWORDS:
                self.unsupported(self.tok.text)
            else:
                self.error("'contract'")
        if pragma is None:
            raise ParseError(start.line, start.col, "'pragma solidity'", start.text or "EOF")
        names = [c.name for c in contracts]
        for c in contracts:
            if names.count(c.name) > 1:
                raise UnsupportedConstruct(f"duplicate contract {c.name}", c.pos)
        return n.SourceUnit(pragma, contracts, imports, pos=self.pos(start))

    def parse_contract(self) -> n.ContractDef:
        start = self.expect("contract")
        name = self.ident().text
        if self.at("is"):
            self.unsupported("inheritance")
        self.expect("{")
        contract = n.ContractDef(name, pos=self.pos(start))
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("'}'")
            if self.at("function") or self.at("constructor"):
                fn = self.parse_function(name)
                if fn.is_constructor:
                    if contract.constructor is not None:
                        raise UnsupportedConstruct("second constructor", fn.pos)
                    contract.constructor = fn
                elif fn.is_fallback:
                    if contract.fallback is not None:
                        raise UnsupportedConstruct("second fallback", fn.pos)
                    contract.fallback = fn
                else:
                    if contract.function(fn.name) is not None:
                        raise UnsupportedConstruct(f"function overloading ({fn.name})", fn.pos)
                    contract.functions.append(fn)
            elif self.at("event"):
                contract.events.append(self.parse_event())
            elif self.tok.text in UNSUPPORTED_KEYWORDS:
                self.unsupported(self.tok.text)
            else:
                var = self.parse_state_var()
                if contract.state_var(var.name) is not None:
                    raise UnsupportedConstruct(f"duplicate state variable {var.name}", var.pos)
                contract.state_vars.append(var)
        _resolve_contract(contract)
        return contract

    def parse_event(self) -> n.EventDecl:
        start = self.expect("event")
        name = self.ident().text
        self.expect("(")
        params = []
        while not self.at(")"):
            tok = self.tok
            ty = self.parse_type()
            self.accept("indexed")
            pname = self.ident().text if self.tok.kind == "ident" else ""
            params.append(n.Param(pname, ty, pos=self.pos(tok)))
            if not self.accept(","):
                break
        self.expect(")")
        if self.at("anonymous"):
            self.advance()
        self.expect(";")
        return n.EventDecl(name, params, pos=self.pos(start))

    def parse_state_var(self) -> n.StateVarDecl:
        start = self.tok
        ty = self.parse_type()
        visibility = "internal"
        while self.tok.text in VISIBILITIES | {"constant", "immutable"}:
            word = self.advance()
            if word.text in ("constant", "immutable"):
                self.unsupported(f"{word.text} state variable", word)
            if word.text == "external":
                self.unsupported("external state variable", word)
            visibility = word.text
        name = self.ident().text
        init = None
        if self.accept("="):
            init = self.parse_expr()
        self.expect(";")
        return n.StateVarDecl(name, ty, visibility, init, pos=self.pos(start))

    # ------------------------------------------------------------------
    # types

    def at_type_start(self) -> bool:
        t = self.tok
        if t.kind != "ident":
            return False
        if t.text in ELEMENTARY or t.text == "mapping":
            return True
        if t.text.startswith(("int", "bytes", "fixed", "ufixed")) and _is_int_type(t.text):
            self.unsupported(f"type {t.text}")
        return False

    def parse_type(self) -> n.SolType:
        tok = self.tok
        if self.at("mapping"):
            self.advance()
            self.expect("(")
            key = self.parse_type()
            if key.kind != "address":
                self.unsupported(f"mapping key type {key}", tok)
            self.expect("=>")
            value = self.parse_type()
            if value.kind in ("mapping", "string"):
                self.unsupported(f"mapping value type {value}", tok)
            self.expect(")")
            return n.mapping_of(value)
        word = self.ident()
        if word.text in ("uint",) or (word.text.startswith("uint") and _is_int_type(word.text)):
            return n.UINT
        if word.text == "bool":
            return n.BOOL
        if word.text == "string":
            return n.STRING
        if word.text == "address":
            if self.accept("payable"):
                return n.ADDRESS_PAYABLE
            return n.ADDRESS
        if word.text in ("int", "bytes", "byte", "var", "fixed", "ufixed") or _is_int_type(word.text):
            self.unsupported(f"type {word.text}", word)
        if word.text in UNSUPPORTED_KEYWORDS or word.text in VISIBILITIES:
            self.unsupported(word.text, word)
        return n.contract_type(word.text)

    # ------------------------------------------------------------------
    # functions

    def parse_function(self, contract_name: str) -> n.FunctionDef:
        start = self.tok
        is_ctor = legacy = False
        name = None
        if self.accept("constructor"):
            is_ctor = True
        else:
            self.expect("function")
            if self.tok.kind == "ident":
                name = self.advance().text
                if name == contract_name:
                    is_ctor = legacy = True
        params = self.parse_params(allow_untyped=True)
        visibility = None
        payable = False
        mutability = None
        returns: list[n.Param] = []
        while not self.at("{"):
            word = self.tok
            if word.text in VISIBILITIES:
                if visibility is not None:
                    self.unsupported("repeated visibility")
                visibility = self.advance().text
            elif word.text == "payable":
                self.advance()
                payable = True
            elif word.text in ("view", "pure", "constant"):
                self.advance()
                mutability = "view" if word.text == "constant" else word.text
            elif word.text == "returns":
                self.advance()
                returns = self.parse_params(allow_untyped=False)
            elif word.kind == "ident":
                self.unsupported(f"modifier invocation ({word.text})")
            elif word.text == ";":
                self.unsupported("function without body")
            else:
                self.error("'{'")
        if name is None and not is_ctor and params:
            raise UnsupportedConstruct("fallback with parameters", self.pos(start))
        if is_ctor:
            name = None
        body = self.parse_block()
        return n.FunctionDef(
            name, params, visibility, payable, mutability, returns, body,
            is_constructor=is_ctor, legacy_constructor=legacy, pos=self.pos(start),
        )

    def parse_params(self, allow_untyped: bool) -> list[n.Param]:
        self.expect("(")
        params = []
        while not self.at(")"):
            tok = self.tok
            nxt = self.peek()
            if (
                allow_untyped
                and tok.kind == "ident"
                and nxt.text in (",", ")")
                and tok.text not in ELEMENTARY
                and not _is_int_type(tok.text)
            ):
                # legacy untyped parameter, e.g. ``function send(receiver)``
                self.advance()
                params.append(n.Param(tok.text, None, pos=self.pos(tok)))
            else:
                ty = self.parse_type()
                if self.tok.text in ("memory", "storage", "calldata"):
                    self.advance()
                pname = ""
                if self.tok.kind == "ident":
                    pname = self.advance().text
                params.append(n.Param(pname, ty, pos=self.pos(tok)))
            if not self.accept(","):
                break
        self.expect(")")
        return params

    # ------------------------------------------------------------------
    # statements

    def parse_block(self) -> list[n.Stmt]:
        self.expect("{")
        body = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("'}'")
            body.append(self.parse_statement())
        return body

    def parse_branch(self) -> list[n.Stmt]:
        if self.at("{"):
            return self.parse_block()
        return [self.parse_statement()]

    def parse_statement(self) -> n.Stmt:
        tok = self.tok
        p = self.pos(tok)
        text = tok.text
        if tok.kind == "op":
            if text == "{":
                self.unsupported("nested block")
            if text == ";":
                self.unsupported("empty statement")
        if tok.kind == "ident":
            if text in UNSUPPORTED_KEYWORDS:
                self.unsupported(text)
            if text == "if":
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                self.expect(")")
                then = self.parse_branch()
                orelse = None
                if self.accept("else"):
                    orelse = self.parse_branch()
                return n.If(cond, then, orelse, pos=p)
            if text == "return":
                self.advance()
                expr = None if self.at(";") else self.parse_expr()
                self.expect(";")
                return n.Return(expr, pos=p)
            if text == "emit":
                self.advance()
                name = self.ident().text
                args = self.parse_args()
                self.expect(";")
                return n.Emit(name, args, explicit=True, pos=p)
            if text == "require" and self.peek().text == "(":
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                message = None
                if self.accept(","):
                    message = self.parse_expr()
                self.expect(")")
                self.expect(";")
                return n.Require(cond, message, pos=p)
            if text == "mapping":
                return self.parse_var_decl()
            if self.at_type_start():
                if self.peek().text != "(":
                    return self.parse_var_decl()
            elif self.peek().kind == "ident":
                # contract-typed local, e.g. ``Token t = Token(a);``
                return self.parse_var_decl()
        expr = self.parse_expr()
        if self.tok.text in ("=", "+=", "-="):
            op = self.advance().text
            if not isinstance(expr, (n.Identifier, n.Index, n.Member)):
                self.unsupported("assignment target", tok)
            value = self.parse_expr()
            self.expect(";")
            return n.Assign(expr, op, value, pos=p)
        if self.tok.text in ("*=", "/=", "++", "--", "?"):
            self.unsupported(f"operator {self.tok.text}")
        self.expect(";")
        return n.ExprStmt(expr, pos=p)

    def parse_var_decl(self) -> n.VarDecl:
        tok = self.tok
        ty = self.parse_type()
        if ty.kind == "mapping":
            self.unsupported("local mapping", tok)
        if self.tok.text in ("memory", "storage", "calldata"):
            self.advance()
        name = self.ident().text
        init = None
        if self.accept("="):
            init = self.parse_expr()
        self.expect(";")
        return n.VarDecl(ty, name, init, pos=self.pos(tok))

    # ------------------------------------------------------------------
    # expressions

    def parse_expr(self, level: int = 0) -> n.Expr:
        if level == len(PRECEDENCE):
            return self.parse_unary()
        lhs = self.parse_expr(level + 1)
        ops = PRECEDENCE[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op_tok = self.advance()
            rhs = self.parse_expr(level + 1)
            lhs = n.Binary(op_tok.text, lhs, rhs, pos=_pos_of(lhs, op_tok))
        if self.tok.text in ("?", "**", "&", "|", "^", "<<", ">>"):
            self.unsupported(f"operator {self.tok.text}")
        return lhs

    def parse_unary(self) -> n.Expr:
        tok = self.tok
        if tok.kind == "op" and tok.text == "!":
            self.advance()
            return n.Unary("!", self.parse_unary(), pos=self.pos(tok))
        if tok.kind == "op" and tok.text in ("-", "~", "++", "--"):
            self.unsupported(f"unary operator {tok.text}")
        return self.parse_postfix()

    def parse_args(self) -> list[n.Expr]:
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.parse_expr())
            if not self.accept(","):
                break
        self.expect(")")
        return args

    def parse_postfix(self) -> n.Expr:
        expr = self.parse_primary()
        while True:
            tok = self.tok
            if tok.kind != "op":
                break
            if tok.text == ".":
                self.advance()
                field_tok = self.ident()
                fname = field_tok.text
                if fname in ("value", "gas") and self.at("(") and isinstance(expr, (n.Member, _CallOptions)):
                    arg = self.parse_single_arg()
                    if isinstance(expr, n.Member):
                        expr = _CallOptions(expr, None, None, expr.pos)
                    if (expr.value if fname == "value" else expr.gas) is not None:
                        self.unsupported(f"repeated .{fname}()", field_tok)
                    if fname == "value":
                        expr.value = arg
                    else:
                        expr.gas = arg
                    continue
                if isinstance(expr, _CallOptions):
                    self.error("'('")
                expr = self._member(expr, fname, field_tok)
            elif tok.text == "[":
                if isinstance(expr, _CallOptions):
                    self.error("'('")
                self.advance()
                key = self.parse_expr()
                self.expect("]")
                expr = n.Index(expr, key, pos=expr.pos)
            elif tok.text == "(":
                expr = self._call(expr, tok)
            else:
                break
        if isinstance(expr, _CallOptions):
            self.error("'('")
        return expr

    def parse_single_arg(self) -> n.Expr:
        tok = self.tok
        args = self.parse_args()
        if len(args) != 1:
            raise ParseError(tok.line, tok.col, "exactly one argument", str(len(args)))
        return args[0]

    def _member(self, base: n.Expr, fname: str, tok: Token) -> n.Expr:
        if isinstance(base, n.Identifier) and base.name in BUILTIN_MEMBERS:
            if fname not in BUILTIN_MEMBERS[base.name]:
                self.unsupported(f"{base.name}.{fname}", tok)
            return n.Builtin(f"{base.name}.{fname}", pos=base.pos)
        if (
            fname == "balance"
            and isinstance(base, n.Conversion)
            and base.type_name == "address"
            and isinstance(base.expr, n.Builtin)
            and base.expr.name == "this"
        ):
            return n.Builtin("address(this).balance", pos=base.pos)
        return n.Member(base, fname, pos=base.pos)

    def _call(self, callee, tok: Token) -> n.Expr:
        if isinstance(callee, _CallOptions):
            args = self.parse_args()
            m = callee.member
            if m.field == "call":
                return n.ExternalCall(m.base, n.CallKind.CALL_VALUE, callee.value, callee.gas, args, pos=m.pos)
            return n.ContractCall(m.base, m.field, args, callee.value, callee.gas, pos=m.pos)
        if isinstance(callee, n.Member):
            if callee.field in ("transfer", "send"):
                arg = self.parse_single_arg()
                kind = n.CallKind.TRANSFER if callee.field == "transfer" else n.CallKind.SEND
                return n.ExternalCall(callee.base, kind, arg, None, [], pos=callee.pos)
            args = self.parse_args()
            if callee.field == "call":
                return n.ExternalCall(callee.base, n.CallKind.CALL_VALUE, None, None, args, pos=callee.pos)
            if callee.field in ("delegatecall", "staticcall", "callcode"):
                self.unsupported(callee.field, tok)
            if isinstance(callee.base, n.Builtin):
                self.unsupported(f"{callee.base.name}.{callee.field}()", tok)
            return n.ContractCall(callee.base, callee.field, args, None, None, pos=callee.pos)
        if isinstance(callee, n.Identifier):
            name = callee.name
            if name in UNSUPPORTED_CALLS:
                self.unsupported(f"{name}()", tok)
            args = self.parse_args()
            if name in ELEMENTARY or name == "payable":
                if len(args) != 1:
                    raise ParseError(tok.line, tok.col, "one conversion argument", str(len(args)))
                tname = "uint256" if name.startswith("uint") else name
                return n.Conversion(tname, args[0], pos=callee.pos)
            return n.InternalCall(name, args, pos=callee.pos)
        self.error("callable expression")

    def parse_primary(self) -> n.Expr:
        tok = self.tok
        p = self.pos(tok)
        if tok.kind == "number":
            self.advance()
            return self._number(tok)
        if tok.kind == "string":
            self.advance()
            return n.Literal(_unquote(tok.text), "string", pos=p)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            if self.at(")"):
                self.unsupported("tuple expression")
            expr = self.parse_expr()
            if self.at(","):
                self.unsupported("tuple expression")
            self.expect(")")
            return expr
        if tok.kind == "ident":
            self.advance()
            if tok.text in ("true", "false"):
                return n.Literal(tok.text == "true", "bool", pos=p)
            if tok.text == "this":
                return n.Builtin("this", pos=p)
            if tok.text in UNSUPPORTED_BASES or tok.text in UNSUPPORTED_KEYWORDS:
                self.unsupported(tok.text, tok)
            if tok.text == "address" and self.at("payable"):
                self.unsupported("address payable conversion", tok)
            if tok.text in ELEMENTARY and not self.at("("):
                self.error("'('")
            return n.Identifier(tok.text, pos=p)
        self.error("expression")

    def _number(self, tok: Token) -> n.Literal:
        text = tok.text
        p = self.pos(tok)
        if text.lower().startswith("0x"):
            if len(text) == 42:
                return n.Literal(text.lower(), "address", pos=p)
            return n.Literal(int(text, 16), "uint", pos=p)
        value = Fraction(text)
        if self.tok.kind == "ident" and self.tok.text in UNITS:
            value *= UNITS[self.advance().text]
        elif self.tok.kind == "ident" and self.tok.text in (
            "seconds", "minutes", "hours", "days", "weeks", "years"
        ):
            self.unsupported(f"time unit {self.tok.text}")
        if value.denominator != 1:
            raise ParseError(tok.line, tok.col, "integer literal", text)
        return n.Literal(int(value), "uint", pos=p)


# --------------------------------------------------------------------------
# post-processing


def _resolve_contract(contract: n.ContractDef) -> None:
    """Classify calls to undeclared names and number statements.

    A bare statement call to a name that is not a function of the contract
    is an event (pre-0.4.21 style omits ``emit``); inside expressions a
    one-argument call to an undeclared name is a contract cast.
    """
    declared = {fn.name for fn in contract.functions}
    for fn in contract.all_functions():
        fn.body = [_resolve_stmt(s, declared) for s in fn.body]
        number_statements(fn.body)
    for var in contract.state_vars:
        if var.init is not None:
            var.init = _resolve_expr(var.init, declared)


def _resolve_stmt(stmt: n.Stmt, declared: set) -> n.Stmt:
    if isinstance(stmt, n.ExprStmt) and isinstance(stmt.expr, n.InternalCall):
        call = stmt.expr
        if call.name not in declared:
            args = [_resolve_expr(a, declared) for a in call.args]
            return n.Emit(call.name, args, explicit=False, pos=stmt.pos)
    if isinstance(stmt, n.If):
        stmt.then = [_resolve_stmt(s, declared) for s in stmt.then]
        if stmt.orelse is not None:
            stmt.orelse = [_resolve_stmt(s, declared) for s in stmt.orelse]
    for f in dataclasses.fields(stmt):
        value = getattr(stmt, f.name)
        if f.name in ("then", "orelse"):
            continue
        if isinstance(value, list):
            setattr(stmt, f.name, [_resolve_expr(v, declared) for v in value])
        elif _is_expr(value):
            setattr(stmt, f.name, _resolve_expr(value, declared))
    return stmt


def _is_expr(value) -> bool:
    return isinstance(value, (
        n.Literal, n.Identifier, n.Member, n.Index, n.Binary, n.Unary,
        n.ExternalCall, n.ContractCall, n.InternalCall, n.Conversion, n.Builtin,
    ))


def _resolve_expr(expr: n.Expr, declared: set) -> n.Expr:
    for f in dataclasses.fields(expr):
        value = getattr(expr, f.name)
        if isinstance(value, list):
            setattr(expr, f.name, [_resolve_expr(v, declared) if _is_expr(v) else v for v in value])
        elif _is_expr(value):
            setattr(expr, f.name, _resolve_expr(value, declared))
    if isinstance(expr, n.InternalCall) and expr.name not in declared and len(expr.args) == 1:
        return n.Conversion(expr.name, expr.args[0], pos=expr.pos)
    return expr


def number_statements(body: list[n.Stmt]) -> None:
    for i, stmt in enumerate(n.iter_statements(body)):
        stmt.index = i


def _pos_of(expr, tok: Token) -> n.Pos:
    return getattr(expr, "pos", (tok.line, tok.col))


def _is_int_type(word: str) -> bool:
    return re.fullmatch(r"u?int\d*|bytes\d*|u?fixed[\dx]*", word) is not None


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def _join_version(parts: list[str]) -> str:
    out = ""
    for part in parts:
        if out and (part[0].isdigit() and out[-1] not in "0123456789." and out[-1] not in "^~<>="):
            out += " "
        elif out and part[0] in "^~<>=" and out[-1].isdigit():
            out += " "
        out += part
    return out


def parse(source: str) -> n.SourceUnit:
    """Parse subset source text into a :class:`SourceUnit`."""
    return Parser(source).parse_unit()
