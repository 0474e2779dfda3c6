"""Deterministic in-process chain: accounts, deployment, transactions.

Each transaction is mined into its own block, so ``block.number`` advances
by exactly one per transaction.  There is no gas price: gas limits bound
execution but never cost ether, which keeps the sum of balances constant.
"""
from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, TypeVar

from .. import nodes as n
from ..errors import UnknownContract
from .gas import DEFAULT_GAS, FAITHFUL, GAS_MODELS, MAX_DEPTH, PAPER, GasTable
from .genesis import GenesisConfig, genesis
from .interpreter import (
    DEPTH_EXCEEDED, INSUFFICIENT_BALANCE, NO_MATCHING_FUNCTION, NON_PAYABLE,
    CallFrame, ExecutionResult, Interpreter, Status, TraceEvent,
)
from .state import (
    ZERO_ADDRESS, Account, ChainError, DuplicateAllocAddress, GasLimitExceeded,
    InsufficientFunds, Snapshot, StaleToken, UnknownAccount, WorldState,
    derive_address, to_address,
)

DEFAULT_TX_GAS = 10_000_000

T = TypeVar("T")

# every solidity frame costs roughly a dozen python frames
_RECURSION_LIMIT = 40 * MAX_DEPTH + 1000
_STACK_SIZE = 512 * 1024 * 1024


# raised once at import; the limit is process-wide
if sys.getrecursionlimit() < _RECURSION_LIMIT:
    sys.setrecursionlimit(_RECURSION_LIMIT)


def _run_deep(fn: Callable[[], T]) -> T:
    """Run ``fn`` on a thread with a stack large enough for 1024 nested frames."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc

    old = threading.stack_size()
    threading.stack_size(_STACK_SIZE)
    try:
        worker = threading.Thread(target=target)
        worker.start()
    finally:
        threading.stack_size(old)
    worker.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


@dataclass
class Transaction:
    sender: str
    to: str
    value: int = 0
    gas_limit: int = DEFAULT_TX_GAS
    function: Optional[str] = None  # None means a plain value transfer
    args: list = field(default_factory=list)


def _validate(world: WorldState, sender: str, value: int, gas_limit: int) -> None:
    if sender not in world:
        raise UnknownAccount(sender)
    if gas_limit > world.gas_limit:
        raise GasLimitExceeded(f"{gas_limit} exceeds block gas limit {world.gas_limit}")
    if value < 0:
        raise ValueError("negative value")
    if world.balance(sender) < value:
        raise InsufficientFunds(f"{sender} holds {world.balance(sender)}, needs {value}")


def deploy(
    world: WorldState,
    deployer: str,
    unit: n.SourceUnit,
    contract: str,
    ctor_args: Optional[list] = None,
    value: int = 0,
    gas_limit: int = DEFAULT_TX_GAS,
    gas_table: GasTable = DEFAULT_GAS,
) -> tuple[str, ExecutionResult]:
    """Create a contract account and run its constructor.

    The address is derived from the deployer and its nonce; the nonce
    advances even when the constructor reverts, in which case no account is
    left behind.
    """
    cdef = unit.contract(contract)
    if cdef is None:
        raise UnknownContract(contract)
    _validate(world, deployer, value, gas_limit)
    address = derive_address(deployer, world.account(deployer).nonce)
    world.increment_nonce(deployer)
    world.block_number += 1
    interp = Interpreter(world, deployer, gas_table)
    status, reason, gas_left = _run_deep(
        lambda: interp.create(deployer, address, cdef, list(ctor_args or []), value, gas_limit)
    )
    result = ExecutionResult(status, reason, gas_limit - gas_left, None, interp.trace, address)
    world.receipts.append(result)
    return address, result


def send_transaction(world: WorldState, tx: Transaction, gas_table: GasTable = DEFAULT_GAS) -> ExecutionResult:
    """Execute one transaction atomically and mine it."""
    _validate(world, tx.sender, tx.value, tx.gas_limit)
    world.increment_nonce(tx.sender)
    world.block_number += 1
    interp = Interpreter(world, tx.sender, gas_table)
    world.ensure_account(tx.to)
    status, reason, gas_left, ret = _run_deep(
        lambda: interp.message_call(tx.sender, tx.to, tx.value, tx.gas_limit, tx.function, list(tx.args), 0)
    )
    result = ExecutionResult(status, reason, tx.gas_limit - gas_left, ret, interp.trace)
    world.receipts.append(result)
    return result


def snapshot(world: WorldState) -> Snapshot:
    return world.snapshot()


def revert_to(world: WorldState, token: Snapshot) -> None:
    world.revert_to(token)


def export_trace(trace: list[TraceEvent]) -> str:
    """Line-oriented trace log: one JSON object per event, stable key order."""
    return "".join(event.to_line() + "\n" for event in trace)


__all__ = [
    "Account", "CallFrame", "ChainError", "DEFAULT_GAS", "DEFAULT_TX_GAS",
    "DEPTH_EXCEEDED", "DuplicateAllocAddress", "ExecutionResult", "FAITHFUL",
    "GAS_MODELS", "GasLimitExceeded", "GasTable", "GenesisConfig",
    "INSUFFICIENT_BALANCE", "InsufficientFunds", "Interpreter", "MAX_DEPTH",
    "NO_MATCHING_FUNCTION", "NON_PAYABLE", "PAPER", "Snapshot", "StaleToken",
    "Status", "TraceEvent", "Transaction", "UnknownAccount", "WorldState",
    "ZERO_ADDRESS", "deploy", "derive_address", "export_trace", "genesis",
    "revert_to", "send_transaction", "snapshot", "to_address",
]
