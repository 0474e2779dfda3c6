"""Static reentrancy candidate detection.

A function is a candidate when an ether-moving external call is followed by
a persistent state write.  Ordering uses the pre-order statement index of a
function body, so the check is branch-insensitive: a write anywhere later in
the source counts, even in a sibling branch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from . import nodes as n


class Pattern(str, Enum):
    SINGLE_FUNCTION = "SingleFunction"
    CROSS_FUNCTION = "CrossFunction"


STIPEND = 2300


@dataclass(frozen=True)
class GasForwarded:
    mode: str  # Stipend2300 | Custom | AllRemaining
    amount: Optional[int] = None

    def __str__(self) -> str:
        if self.mode == "Custom":
            return f"Custom({self.amount if self.amount is not None else '?'})"
        return self.mode


STIPEND_2300 = GasForwarded("Stipend2300", STIPEND)
ALL_REMAINING = GasForwarded("AllRemaining")


@dataclass
class ExternalCallSite:
    contract: str
    function: str
    stmt_index: int
    kind: n.CallKind
    gas_forwarded: GasForwarded
    pos: n.Pos = (0, 0)


@dataclass
class StateWriteSite:
    contract: str
    function: str
    stmt_index: int
    target_var: str


@dataclass
class VulnCandidate:
    contract: str
    function: str
    call_site: ExternalCallSite
    writes_after: list[StateWriteSite]
    pattern: Pattern
    cross_peers: list[str] = field(default_factory=list)
    shared_vars: list[str] = field(default_factory=list)
    param_types: list[str] = field(default_factory=list)
    is_constructor: bool = False
    is_public: bool = True

    @property
    def attackable(self) -> bool:
        # constructors run once at deployment; fallbacks are not callable by name
        return self.is_public and not self.is_constructor and self.function != "fallback"

    @property
    def signature(self) -> str:
        return f"{self.contract}.{self.function}({','.join(self.param_types)})"

    def to_dict(self) -> dict:
        return {
            "contract": self.contract,
            "function": self.function,
            "pattern": self.pattern.value,
            "callSite": {
                "stmtIndex": self.call_site.stmt_index,
                "kind": self.call_site.kind.value,
                "gasForwarded": str(self.call_site.gas_forwarded),
                "line": self.call_site.pos[0],
            },
            "writesAfter": [
                {"stmtIndex": w.stmt_index, "var": w.target_var} for w in self.writes_after
            ],
            "crossPeers": list(self.cross_peers),
            "sharedVars": list(self.shared_vars),
            "attackable": self.attackable,
        }


# --------------------------------------------------------------------------
# name resolution helpers


def local_names(fn: n.FunctionDef) -> set[str]:
    names = {p.name for p in fn.params} | {p.name for p in fn.returns}
    for stmt in n.iter_statements(fn.body):
        if isinstance(stmt, n.VarDecl):
            names.add(stmt.name)
    return names


def _state_names(contract: n.ContractDef, fn: n.FunctionDef) -> set[str]:
    return {v.name for v in contract.state_vars} - local_names(fn)


def lvalue_root(expr: n.Expr) -> Optional[str]:
    while isinstance(expr, (n.Index, n.Member)):
        expr = expr.base
    return expr.name if isinstance(expr, n.Identifier) else None


def _expr_reads(expr: n.Expr, state: set[str]) -> set[str]:
    return {
        e.name for e in n.walk_expr(expr)
        if isinstance(e, n.Identifier) and e.name in state
    }


def statement_reads(stmt: n.Stmt, state: set[str]) -> set[str]:
    if isinstance(stmt, n.Assign):
        reads = _expr_reads(stmt.expr, state)
        if stmt.op != "=":
            return reads | _expr_reads(stmt.target, state)
        # the written root is not read by ``=``; index keys are
        target = stmt.target
        while isinstance(target, (n.Index, n.Member)):
            if isinstance(target, n.Index):
                reads |= _expr_reads(target.key, state)
            target = target.base
        return reads
    reads: set[str] = set()
    for expr in n.stmt_expressions(stmt):
        reads |= _expr_reads(expr, state)
    return reads


def state_writes(contract: n.ContractDef, fn: n.FunctionDef) -> list[StateWriteSite]:
    state = _state_names(contract, fn)
    out = []
    for stmt in n.iter_statements(fn.body):
        if isinstance(stmt, n.Assign):
            root = lvalue_root(stmt.target)
            if root in state:
                out.append(StateWriteSite(contract.name, fn.display_name, stmt.index, root))
    return out


def modifies_state(contract: n.ContractDef, fn: n.FunctionDef) -> bool:
    if state_writes(contract, fn):
        return True
    for stmt in n.iter_statements(fn.body):
        if isinstance(stmt, n.Emit):
            return True
        for expr in n.stmt_expressions(stmt):
            for e in n.walk_expr(expr):
                if isinstance(e, (n.ExternalCall, n.ContractCall)):
                    return True
    return False


def classify_gas(call: n.ExternalCall) -> GasForwarded:
    if call.kind in (n.CallKind.TRANSFER, n.CallKind.SEND):
        return STIPEND_2300
    if call.gas is not None:
        amount = call.gas.value if isinstance(call.gas, n.Literal) else None
        return GasForwarded("Custom", amount)
    return ALL_REMAINING


def param_types(fn: n.FunctionDef) -> list[str]:
    return [p.type.abi_name if p.type else "uint256" for p in fn.params]


# --------------------------------------------------------------------------
# operations


def _function_calls(contract: n.ContractDef, fn: n.FunctionDef) -> list[ExternalCallSite]:
    sites = []
    for stmt in n.iter_statements(fn.body):
        for expr in n.stmt_expressions(stmt):
            for e in n.walk_expr(expr):
                if isinstance(e, n.ExternalCall):
                    sites.append(ExternalCallSite(
                        contract.name, fn.display_name, stmt.index, e.kind,
                        classify_gas(e), e.pos,
                    ))
    return sites


def find_external_calls(unit: n.SourceUnit) -> list[ExternalCallSite]:
    """One site per ``transfer``/``send``/``call.value`` node, in source order."""
    sites = []
    for contract in unit.contracts:
        for fn in contract.all_functions():
            sites.extend(_function_calls(contract, fn))
    return sites


def find_candidates(unit: n.SourceUnit) -> list[VulnCandidate]:
    candidates = []
    for contract in unit.contracts:
        writers = {
            fn.display_name: {w.target_var for w in state_writes(contract, fn)}
            for fn in contract.all_functions()
            if fn.is_public and not fn.is_constructor
        }
        for fn in contract.all_functions():
            writes = state_writes(contract, fn)
            state = _state_names(contract, fn)
            stmts = list(n.iter_statements(fn.body))
            common = dict(
                param_types=param_types(fn),
                is_constructor=fn.is_constructor,
                is_public=fn.is_public,
            )
            for site in _function_calls(contract, fn):
                after = [w for w in writes if w.stmt_index > site.stmt_index]
                if not after:
                    continue
                candidates.append(VulnCandidate(
                    contract.name, fn.display_name, site, after,
                    Pattern.SINGLE_FUNCTION, **common,
                ))
                # cross-function: state read up to the call, pending a write
                # after it, and writable through another public entry point
                read_before: set[str] = set()
                for stmt in stmts:
                    if stmt.index <= site.stmt_index:
                        read_before |= statement_reads(stmt, state)
                pending = {w.target_var for w in after}
                peers, shared = [], set()
                for peer, written in writers.items():
                    if peer == fn.display_name:
                        continue
                    common_vars = read_before & pending & written
                    if common_vars:
                        peers.append(peer)
                        shared |= common_vars
                if peers:
                    candidates.append(VulnCandidate(
                        contract.name, fn.display_name, site, after,
                        Pattern.CROSS_FUNCTION, sorted(peers), sorted(shared), **common,
                    ))
    return candidates


def emit_signatures(candidates: list[VulnCandidate]) -> str:
    """Deduplicated ``Contract.function(types)`` lines, sorted, LF-terminated."""
    lines = sorted({c.signature for c in candidates}, key=lambda s: (s.split(".", 1)[0], s))
    return "".join(line + "\n" for line in lines)
