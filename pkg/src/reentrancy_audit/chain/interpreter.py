"""Tree-walking interpreter over contract ASTs with EVM-style call frames.

Each message call runs in its own frame with a gas meter and a world
snapshot; a failing frame is rolled back without touching its caller.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from .. import nodes as n
from .gas import DEFAULT_GAS, MAX_DEPTH, PAPER, GasMeter, GasTable, OutOfGas
from .state import ZERO_ADDRESS, Snapshot, WorldState, to_address

UINT_MAX = (1 << 256) - 1


class Status(str, Enum):
    SUCCESS = "Success"
    REVERTED = "Reverted"
    OUT_OF_GAS = "OutOfGas"


# failure reasons reported by the dispatcher
NO_MATCHING_FUNCTION = "NoMatchingFunctionAndNoFallback"
NON_PAYABLE = "NonPayableReceivedValue"
DEPTH_EXCEEDED = "DepthExceeded"
INSUFFICIENT_BALANCE = "InsufficientBalance"
BAD_ARGUMENTS = "BadArguments"


@dataclass
class TraceEvent:
    seq: int
    kind: str  # enter | exit | call | write | move | emit
    depth: int
    address: str
    function: Optional[str] = None
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "seq": self.seq,
            "kind": self.kind,
            "depth": self.depth,
            "address": self.address,
            "function": self.function,
        }
        for key in sorted(self.data):
            out[key] = self.data[key]
        return out

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), default=str)


@dataclass
class ExecutionResult:
    status: Status
    reason: Optional[str] = None
    gas_used: int = 0
    return_value: Any = None
    trace: list[TraceEvent] = field(default_factory=list)
    address: Optional[str] = None  # set for deployments

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


@dataclass
class CallFrame:
    caller: str
    callee: str
    value: int
    gas: GasMeter
    depth: int
    origin: str
    contract: n.ContractDef
    snapshot: Optional[Snapshot] = None


class _Revert(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def default_value(ty: Optional[n.SolType]):
    if ty is None or ty.kind == "uint256":
        return 0
    if ty.kind == "bool":
        return False
    if ty.kind == "string":
        return ""
    return ZERO_ADDRESS


def _check_uint(value: int) -> int:
    if value < 0:
        raise _Revert("arithmetic underflow")
    if value > UINT_MAX:
        raise _Revert("arithmetic overflow")
    return value


def _as_address(value) -> str:
    if isinstance(value, str) and value.startswith("0x"):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return to_address(value)
    raise _Revert(f"not an address: {value!r}")


class Interpreter:
    def __init__(self, world: WorldState, origin: str, gas_table: GasTable = DEFAULT_GAS):
        self.world = world
        self.origin = origin
        self.gas = gas_table
        self.trace: list[TraceEvent] = []
        self._state_vars: dict[int, dict[str, n.StateVarDecl]] = {}

    # ------------------------------------------------------------------
    # tracing

    def _emit(self, event_kind: str, depth: int, address: str, function=None, **data) -> None:
        self.trace.append(TraceEvent(len(self.trace), event_kind, depth, address, function, data))

    def _vars(self, contract: n.ContractDef) -> dict[str, n.StateVarDecl]:
        key = id(contract)
        if key not in self._state_vars:
            self._state_vars[key] = {v.name: v for v in contract.state_vars}
        return self._state_vars[key]

    # ------------------------------------------------------------------
    # message calls

    def message_call(
        self, caller: str, to: str, value: int, gas: int,
        function: Optional[str], args: list, depth: int,
    ) -> tuple[Status, Optional[str], int, Any]:
        """Run a call in a fresh frame; returns (status, reason, gas_left, result)."""
        if depth > MAX_DEPTH:
            self._emit("reject", depth, to, function, status=Status.REVERTED.value,
                       reason=DEPTH_EXCEEDED, gasUsed=0)
            return Status.REVERTED, DEPTH_EXCEEDED, gas, None
        world = self.world
        snap = world.snapshot()
        meter = GasMeter(gas)
        fn_name = function
        entered = False
        status, reason, result = Status.SUCCESS, None, None
        try:
            if world.balance(caller) < value:
                raise _Revert(INSUFFICIENT_BALANCE)
            world.move_value(caller, to, value)
            if value:
                self._emit("move", depth, to, None, sender=caller, recipient=to, value=value)
            code = world.ensure_account(to).code
            if code is None:
                world.commit(snap)
                return Status.SUCCESS, None, gas, None
            fn = self._dispatch(code, function, value, args)
            fn_name = fn.display_name
            frame = CallFrame(caller, to, value, meter, depth, self.origin, code, snap)
            self._emit("enter", depth, to, fn_name, caller=caller, value=value, gas=gas)
            entered = True
            result = self.run_function(frame, fn, args)
        except _Revert as exc:
            status, reason = Status.REVERTED, exc.reason
        except OutOfGas:
            status, reason = Status.OUT_OF_GAS, "out of gas"
            meter.remaining = 0
        if status is Status.SUCCESS:
            world.commit(snap)
        else:
            world.revert_to(snap)
        # a call rejected before any code ran has no frame to close
        self._emit("exit" if entered else "reject", depth, to, fn_name,
                   status=status.value, reason=reason, gasUsed=meter.used)
        return status, reason, meter.remaining, result

    def _dispatch(self, code: n.ContractDef, function: Optional[str], value: int, args: list) -> n.FunctionDef:
        fn = code.function(function) if function is not None else None
        if fn is not None and not fn.is_public:
            fn = None
        if fn is None:
            fn = code.fallback
            if fn is None:
                raise _Revert(NO_MATCHING_FUNCTION)
            args.clear()
        if value > 0 and not fn.payable:
            raise _Revert(NON_PAYABLE)
        if len(args) != len(fn.params):
            raise _Revert(BAD_ARGUMENTS)
        return fn

    def create(
        self, deployer: str, address: str, contract: n.ContractDef,
        args: list, value: int, gas: int,
    ) -> tuple[Status, Optional[str], int]:
        world = self.world
        snap = world.snapshot()
        meter = GasMeter(gas)
        status, reason = Status.SUCCESS, None
        self._emit("enter", 0, address, "constructor", caller=deployer, value=value, gas=gas)
        try:
            world.create_account(address, code=contract)
            world.move_value(deployer, address, value)
            if value:
                self._emit("move", 0, address, None, sender=deployer, recipient=address, value=value)
            frame = CallFrame(deployer, address, value, meter, 0, self.origin, contract, snap)
            for var in contract.state_vars:
                if var.init is not None:
                    self._store(frame, var.name, self.eval(frame, {}, var.init))
            ctor = contract.constructor
            if value > 0 and (ctor is None or not ctor.payable):
                raise _Revert(NON_PAYABLE)
            if ctor is not None:
                if len(args) != len(ctor.params):
                    raise _Revert(BAD_ARGUMENTS)
                self.run_function(frame, ctor, args)
            elif args:
                raise _Revert(BAD_ARGUMENTS)
        except _Revert as exc:
            status, reason = Status.REVERTED, exc.reason
        except OutOfGas:
            status, reason = Status.OUT_OF_GAS, "out of gas"
            meter.remaining = 0
        if status is Status.SUCCESS:
            world.commit(snap)
        else:
            world.revert_to(snap)
        self._emit("exit", 0, address, "constructor", status=status.value, reason=reason, gasUsed=meter.used)
        return status, reason, meter.remaining

    # ------------------------------------------------------------------
    # statements

    def run_function(self, frame: CallFrame, fn: n.FunctionDef, args: list):
        scope = {p.name: v for p, v in zip(fn.params, args)}
        for r in fn.returns:
            if r.name:
                scope[r.name] = default_value(r.type)
        try:
            self.exec_block(frame, scope, fn.body)
        except _Return as ret:
            return ret.value
        if fn.returns and fn.returns[0].name:
            return scope[fn.returns[0].name]
        return None

    def exec_block(self, frame: CallFrame, scope: dict, body: list[n.Stmt]) -> None:
        for stmt in body:
            self.exec_stmt(frame, scope, stmt)

    def exec_stmt(self, frame: CallFrame, scope: dict, stmt: n.Stmt) -> None:
        frame.gas.charge(self.gas.statement)
        if isinstance(stmt, n.VarDecl):
            scope[stmt.name] = (
                self.eval(frame, scope, stmt.init) if stmt.init is not None
                else default_value(stmt.type)
            )
        elif isinstance(stmt, n.Assign):
            self._assign(frame, scope, stmt)
        elif isinstance(stmt, n.Require):
            if not self.eval(frame, scope, stmt.cond):
                message = "require failed"
                if stmt.message is not None:
                    text = self.eval(frame, scope, stmt.message)
                    message = text if text else message
                raise _Revert(message)
        elif isinstance(stmt, n.If):
            if self.eval(frame, scope, stmt.cond):
                self.exec_block(frame, scope, stmt.then)
            elif stmt.orelse is not None:
                self.exec_block(frame, scope, stmt.orelse)
        elif isinstance(stmt, n.ExprStmt):
            self.eval(frame, scope, stmt.expr)
        elif isinstance(stmt, n.Emit):
            args = [self.eval(frame, scope, a) for a in stmt.args]
            self._emit("emit", frame.depth, frame.callee, None, event=stmt.event, args=args)
        elif isinstance(stmt, n.Return):
            raise _Return(self.eval(frame, scope, stmt.expr) if stmt.expr is not None else None)
        else:
            raise TypeError(stmt)

    def _assign(self, frame: CallFrame, scope: dict, stmt: n.Assign) -> None:
        value = self.eval(frame, scope, stmt.expr)
        if stmt.op != "=":
            current = self.eval(frame, scope, stmt.target)
            value = _check_uint(current + value if stmt.op == "+=" else current - value)
        target = stmt.target
        if isinstance(target, n.Identifier):
            if target.name in scope:
                scope[target.name] = value
                return
            if target.name in self._vars(frame.contract):
                self._store(frame, target.name, value)
                return
            raise _Revert(f"unresolved identifier {target.name}")
        if isinstance(target, n.Index) and isinstance(target.base, n.Identifier):
            var = self._vars(frame.contract).get(target.base.name)
            if var is not None and var.type.kind == "mapping" and target.base.name not in scope:
                key = _as_address(self.eval(frame, scope, target.key))
                self._store(frame, (var.name, key), value)
                return
        raise _Revert("unsupported assignment target")

    def _store(self, frame: CallFrame, key, value) -> None:
        frame.gas.charge(self.gas.sstore)
        self.world.storage_set(frame.callee, key, value)
        var, index = (key, None) if isinstance(key, str) else key
        self._emit("write", frame.depth, frame.callee, None, var=var, key=index, value=value)

    def _load(self, frame: CallFrame, key, ty: n.SolType):
        frame.gas.charge(self.gas.sload)
        return self.world.storage_get(frame.callee, key, default_value(ty))

    # ------------------------------------------------------------------
    # expressions

    def eval(self, frame: CallFrame, scope: dict, expr: n.Expr):
        if isinstance(expr, n.Literal):
            return expr.value
        if isinstance(expr, n.Identifier):
            if expr.name in scope:
                return scope[expr.name]
            var = self._vars(frame.contract).get(expr.name)
            if var is None:
                raise _Revert(f"unresolved identifier {expr.name}")
            if var.type.kind == "mapping":
                raise _Revert(f"mapping {expr.name} used as a value")
            return self._load(frame, var.name, var.type)
        if isinstance(expr, n.Builtin):
            return self._builtin(frame, expr.name)
        if isinstance(expr, n.Index):
            if isinstance(expr.base, n.Identifier) and expr.base.name not in scope:
                var = self._vars(frame.contract).get(expr.base.name)
                if var is not None and var.type.kind == "mapping":
                    key = _as_address(self.eval(frame, scope, expr.key))
                    return self._load(frame, (var.name, key), var.type.value)
            raise _Revert("unsupported index expression")
        if isinstance(expr, n.Member):
            if expr.field == "balance":
                address = _as_address(self.eval(frame, scope, expr.base))
                frame.gas.charge(self.gas.sload)
                return self.world.balance(address)
            raise _Revert(f"unsupported member .{expr.field}")
        if isinstance(expr, n.Binary):
            return self._binary(frame, scope, expr)
        if isinstance(expr, n.Unary):
            return not self.eval(frame, scope, expr.operand)
        if isinstance(expr, n.ExternalCall):
            return self._external_call(frame, scope, expr)
        if isinstance(expr, n.ContractCall):
            return self._contract_call(frame, scope, expr)
        if isinstance(expr, n.InternalCall):
            fn = frame.contract.function(expr.name)
            if fn is None:
                raise _Revert(f"unknown function {expr.name}")
            args = [self.eval(frame, scope, a) for a in expr.args]
            if len(args) != len(fn.params):
                raise _Revert(BAD_ARGUMENTS)
            return self.run_function(frame, fn, args)
        if isinstance(expr, n.Conversion):
            value = self.eval(frame, scope, expr.expr)
            if expr.type_name == "uint256":
                return _check_uint(int(value))
            if expr.type_name == "bool":
                return bool(value)
            if expr.type_name == "string":
                return str(value)
            return _as_address(value)  # address, payable, or a contract cast
        raise TypeError(expr)

    def _builtin(self, frame: CallFrame, name: str):
        if name == "msg.sender":
            return frame.caller
        if name == "msg.value":
            return frame.value
        if name == "tx.origin":
            return frame.origin
        if name == "block.number":
            return self.world.block_number
        if name == "this":
            return frame.callee
        if name == "address(this).balance":
            frame.gas.charge(self.gas.sload)
            return self.world.balance(frame.callee)
        raise _Revert(f"unknown builtin {name}")

    def _binary(self, frame: CallFrame, scope: dict, expr: n.Binary):
        op = expr.op
        lhs = self.eval(frame, scope, expr.lhs)
        if op == "&&":
            return bool(lhs) and bool(self.eval(frame, scope, expr.rhs))
        if op == "||":
            return bool(lhs) or bool(self.eval(frame, scope, expr.rhs))
        rhs = self.eval(frame, scope, expr.rhs)
        if op == "==":
            return lhs == rhs
        if op == "!=":
            return lhs != rhs
        if op == "<":
            return lhs < rhs
        if op == "<=":
            return lhs <= rhs
        if op == ">":
            return lhs > rhs
        if op == ">=":
            return lhs >= rhs
        if op == "+":
            return _check_uint(lhs + rhs)
        if op == "-":
            return _check_uint(lhs - rhs)
        if op == "*":
            return _check_uint(lhs * rhs)
        if op in ("/", "%"):
            if rhs == 0:
                raise _Revert("division by zero")
            return lhs // rhs if op == "/" else lhs % rhs
        raise _Revert(f"unsupported operator {op}")

    # ------------------------------------------------------------------
    # calls out of the current frame

    def _forwarded(self, frame: CallFrame, gas_arg: Optional[int]) -> int:
        remaining = frame.gas.remaining
        if gas_arg is not None:
            return min(gas_arg, remaining)
        return max(0, remaining - self.gas.call_retention)

    def _external_call(self, frame: CallFrame, scope: dict, call: n.ExternalCall):
        target = _as_address(self.eval(frame, scope, call.callee))
        value = self.eval(frame, scope, call.value) if call.value is not None else 0
        gas_arg = self.eval(frame, scope, call.gas) if call.gas is not None else None
        for arg in call.payload:
            self.eval(frame, scope, arg)
        frame.gas.charge(self.gas.call_base)
        if value:
            frame.gas.charge(self.gas.value_transfer)
        stipend_only = call.kind is not n.CallKind.CALL_VALUE and self.world.gas_model != PAPER
        if stipend_only:
            child_gas, deducted = self.gas.stipend, 0
        else:
            child_gas = self._forwarded(frame, gas_arg)
            deducted = child_gas
        frame.gas.remaining -= deducted
        self._emit("call", frame.depth, frame.callee, None, kind=call.kind.value,
                   to=target, value=value, gas=child_gas)
        if self.world.balance(frame.callee) < value:
            status, reason, gas_left = Status.REVERTED, INSUFFICIENT_BALANCE, child_gas
        else:
            status, reason, gas_left, _ = self.message_call(
                frame.callee, target, value, child_gas, None, [], frame.depth + 1,
            )
        frame.gas.remaining += gas_left if deducted else 0
        ok = status is Status.SUCCESS
        if call.kind is n.CallKind.TRANSFER:
            if not ok:
                raise _Revert(f"transfer failed: {reason}")
            return None
        return ok

    def _contract_call(self, frame: CallFrame, scope: dict, call: n.ContractCall):
        target = _as_address(self.eval(frame, scope, call.target))
        args = [self.eval(frame, scope, a) for a in call.args]
        value = self.eval(frame, scope, call.value) if call.value is not None else 0
        gas_arg = self.eval(frame, scope, call.gas) if call.gas is not None else None
        frame.gas.charge(self.gas.call_base)
        if value:
            frame.gas.charge(self.gas.value_transfer)
        acct = self.world.accounts.get(target)
        if acct is None or acct.code is None:
            raise _Revert(f"call to non-contract {target}")
        if self.world.balance(frame.callee) < value:
            raise _Revert(INSUFFICIENT_BALANCE)
        child_gas = self._forwarded(frame, gas_arg)
        frame.gas.remaining -= child_gas
        self._emit("call", frame.depth, frame.callee, call.function, kind="ContractCall",
                   to=target, value=value, gas=child_gas)
        status, reason, gas_left, result = self.message_call(
            frame.callee, target, value, child_gas, call.function, args, frame.depth + 1,
        )
        frame.gas.remaining += gas_left
        if status is not Status.SUCCESS:
            raise _Revert(f"{call.function}() failed: {reason}")
        return result
