"""Typed syntax tree for the supported Solidity subset.

Every node carries a ``pos`` (line, column) that is excluded from equality,
so two trees compare equal when they are structurally identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

Pos = tuple[int, int]
NOPOS: Pos = (0, 0)


def _pos() -> Pos:
    return field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class SolType:
    """A subset type: uint256, bool, address [payable], string,
    mapping(address => T), or a contract handle."""

    kind: str
    payable: bool = False
    value: Optional["SolType"] = None  # mapping value type
    name: Optional[str] = None  # contract name for handles

    def __str__(self) -> str:
        if self.kind == "mapping":
            return f"mapping(address => {self.value})"
        if self.kind == "address" and self.payable:
            return "address payable"
        if self.kind == "contract":
            return self.name
        return self.kind

    @property
    def abi_name(self) -> str:
        # ABI has no payable addresses and represents handles as address
        if self.kind == "contract":
            return "address"
        return "address" if self.kind == "address" else str(self)


UINT = SolType("uint256")
BOOL = SolType("bool")
ADDRESS = SolType("address")
ADDRESS_PAYABLE = SolType("address", payable=True)
STRING = SolType("string")


def mapping_of(value: SolType) -> SolType:
    return SolType("mapping", value=value)


def contract_type(name: str) -> SolType:
    return SolType("contract", name=name)


# --------------------------------------------------------------------------
# expressions


class CallKind(str, Enum):
    TRANSFER = "Transfer"
    SEND = "Send"
    CALL_VALUE = "CallValue"


@dataclass
class Literal:
    value: Union[int, bool, str]
    kind: str  # uint | bool | address | string
    pos: Pos = _pos()


@dataclass
class Identifier:
    name: str
    pos: Pos = _pos()


@dataclass
class Member:
    base: "Expr"
    field: str
    pos: Pos = _pos()


@dataclass
class Index:
    base: "Expr"
    key: "Expr"
    pos: Pos = _pos()


@dataclass
class Binary:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    pos: Pos = _pos()


@dataclass
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass
class ExternalCall:
    """An ether-moving call: ``x.transfer(v)``, ``x.send(v)`` or
    ``x.call.value(v)[.gas(g)](payload)``."""

    callee: "Expr"
    kind: CallKind
    value: Optional["Expr"]
    gas: Optional["Expr"] = None
    payload: list["Expr"] = field(default_factory=list)
    pos: Pos = _pos()


@dataclass
class ContractCall:
    """High-level call through a contract handle, ``h.f.value(v)(args)``."""

    target: "Expr"
    function: str
    args: list["Expr"] = field(default_factory=list)
    value: Optional["Expr"] = None
    gas: Optional["Expr"] = None
    pos: Pos = _pos()


@dataclass
class InternalCall:
    name: str
    args: list["Expr"] = field(default_factory=list)
    pos: Pos = _pos()


@dataclass
class Conversion:
    """``address(x)``, ``uint256(x)`` or a contract cast ``Token(x)``."""

    type_name: str
    expr: "Expr"
    pos: Pos = _pos()


BUILTINS = (
    "msg.sender",
    "msg.value",
    "tx.origin",
    "block.number",
    "address(this).balance",
    "this",
)


@dataclass
class Builtin:
    name: str
    pos: Pos = _pos()


Expr = Union[
    Literal, Identifier, Member, Index, Binary, Unary, ExternalCall,
    ContractCall, InternalCall, Conversion, Builtin,
]


# --------------------------------------------------------------------------
# statements


@dataclass
class VarDecl:
    type: SolType
    name: str
    init: Optional[Expr] = None
    index: int = 0
    pos: Pos = _pos()


@dataclass
class Assign:
    target: Expr
    op: str  # = += -=
    expr: Expr
    index: int = 0
    pos: Pos = _pos()


@dataclass
class Require:
    cond: Expr
    message: Optional[Expr] = None
    index: int = 0
    pos: Pos = _pos()


@dataclass
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: Optional[list["Stmt"]] = None
    index: int = 0
    pos: Pos = _pos()


@dataclass
class ExprStmt:
    expr: Expr
    index: int = 0
    pos: Pos = _pos()


@dataclass
class Emit:
    event: str
    args: list[Expr] = field(default_factory=list)
    explicit: bool = False  # written with the ``emit`` keyword
    index: int = 0
    pos: Pos = _pos()


@dataclass
class Return:
    expr: Optional[Expr] = None
    index: int = 0
    pos: Pos = _pos()


Stmt = Union[VarDecl, Assign, Require, If, ExprStmt, Emit, Return]


# --------------------------------------------------------------------------
# declarations


@dataclass
class Param:
    name: str
    type: Optional[SolType]  # None for untyped legacy parameters
    pos: Pos = _pos()


@dataclass
class StateVarDecl:
    name: str
    type: SolType
    visibility: str = "internal"
    init: Optional[Expr] = None
    pos: Pos = _pos()


@dataclass
class EventDecl:
    name: str
    params: list[Param] = field(default_factory=list)
    pos: Pos = _pos()


@dataclass
class FunctionDef:
    name: Optional[str]
    params: list[Param] = field(default_factory=list)
    visibility: Optional[str] = None  # None when the source omits it
    payable: bool = False
    mutability: Optional[str] = None  # view | pure
    returns: list[Param] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)
    is_constructor: bool = False
    legacy_constructor: bool = False
    pos: Pos = _pos()

    @property
    def is_fallback(self) -> bool:
        return self.name is None and not self.is_constructor

    @property
    def effective_visibility(self) -> str:
        return self.visibility or "public"

    @property
    def is_public(self) -> bool:
        return self.effective_visibility in ("public", "external")

    @property
    def display_name(self) -> str:
        if self.is_constructor:
            return "constructor"
        return self.name if self.name is not None else "fallback"


@dataclass
class ContractDef:
    name: str
    state_vars: list[StateVarDecl] = field(default_factory=list)
    functions: list[FunctionDef] = field(default_factory=list)
    constructor: Optional[FunctionDef] = None
    fallback: Optional[FunctionDef] = None
    events: list[EventDecl] = field(default_factory=list)
    pos: Pos = _pos()

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def state_var(self, name: str) -> Optional[StateVarDecl]:
        for var in self.state_vars:
            if var.name == name:
                return var
        return None

    def all_functions(self) -> Iterator[FunctionDef]:
        if self.constructor is not None:
            yield self.constructor
        yield from self.functions
        if self.fallback is not None:
            yield self.fallback


@dataclass
class SourceUnit:
    pragma: str
    contracts: list[ContractDef] = field(default_factory=list)
    imports: list[str] = field(default_factory=list)
    pos: Pos = _pos()

    def contract(self, name: str) -> Optional[ContractDef]:
        for c in self.contracts:
            if c.name == name:
                return c
        return None


# --------------------------------------------------------------------------
# traversal helpers


def iter_statements(body: list[Stmt]) -> Iterator[Stmt]:
    """Pre-order walk over a statement list, descending into if/else."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from iter_statements(stmt.then)
            if stmt.orelse is not None:
                yield from iter_statements(stmt.orelse)


def stmt_expressions(stmt: Stmt) -> list[Expr]:
    """Expressions owned directly by a statement (not by nested blocks)."""
    if isinstance(stmt, VarDecl):
        return [stmt.init] if stmt.init is not None else []
    if isinstance(stmt, Assign):
        return [stmt.target, stmt.expr]
    if isinstance(stmt, Require):
        return [stmt.cond] + ([stmt.message] if stmt.message is not None else [])
    if isinstance(stmt, If):
        return [stmt.cond]
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    if isinstance(stmt, Emit):
        return list(stmt.args)
    if isinstance(stmt, Return):
        return [stmt.expr] if stmt.expr is not None else []
    raise TypeError(stmt)


def children(expr: Expr) -> list[Expr]:
    if isinstance(expr, (Member,)):
        return [expr.base]
    if isinstance(expr, Index):
        return [expr.base, expr.key]
    if isinstance(expr, Binary):
        return [expr.lhs, expr.rhs]
    if isinstance(expr, Unary):
        return [expr.operand]
    if isinstance(expr, ExternalCall):
        out = [expr.callee]
        out += [e for e in (expr.value, expr.gas) if e is not None]
        return out + list(expr.payload)
    if isinstance(expr, ContractCall):
        out = [expr.target] + list(expr.args)
        return out + [e for e in (expr.value, expr.gas) if e is not None]
    if isinstance(expr, InternalCall):
        return list(expr.args)
    if isinstance(expr, Conversion):
        return [expr.expr]
    return []


def walk_expr(expr: Expr) -> Iterator[Expr]:
    yield expr
    for child in children(expr):
        yield from walk_expr(child)
