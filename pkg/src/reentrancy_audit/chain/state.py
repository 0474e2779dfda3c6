"""World state with journaled snapshots.

Every mutation goes through a method that records an undo entry, so a
snapshot is just a position in the journal.  Snapshots nest and must be
released in stack order.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import AuditError
from .. import nodes as n

ZERO_ADDRESS = "0x" + "00" * 20
_MISSING = object()


class ChainError(AuditError):
    pass


class InsufficientFunds(ChainError):
    pass


class UnknownAccount(ChainError):
    pass


class DuplicateAllocAddress(ChainError):
    pass


class StaleToken(ChainError):
    pass


class GasLimitExceeded(ChainError):
    pass


def to_address(value) -> str:
    """Normalize an address given as hex text or integer to ``0x``+40 hex."""
    if isinstance(value, int):
        if value < 0 or value >= 1 << 160:
            raise ValueError(f"address out of range: {value}")
        return "0x" + format(value, "040x")
    text = str(value).strip().lower()
    if not text.startswith("0x"):
        text = "0x" + text
    if len(text) != 42 or any(c not in "0123456789abcdef" for c in text[2:]):
        raise ValueError(f"not an address: {value!r}")
    return text


def derive_address(deployer: str, nonce: int) -> str:
    """Contract address from (deployer, nonce); sha3-256 stands in for the
    RLP/keccak derivation, which only needs to be deterministic here."""
    digest = hashlib.sha3_256(f"{deployer}:{nonce}".encode()).digest()
    return "0x" + digest[-20:].hex()


@dataclass
class Account:
    balance: int = 0
    nonce: int = 0
    code: Optional[n.ContractDef] = None
    storage: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Snapshot:
    id: int
    journal_len: int
    block_number: int = 0
    receipts_len: int = 0


class WorldState:
    def __init__(self, chain_id: int = 1, gas_limit: int = 0xFFFFFFFF, gas_model: str = "faithful"):
        self.accounts: dict[str, Account] = {}
        self.block_number = 0
        self.chain_id = chain_id
        self.gas_limit = gas_limit
        self.gas_model = gas_model
        self.receipts: list = []
        self._journal: list[tuple] = []
        self._snapshots: list[Snapshot] = []
        self._next_snapshot = 0

    # ------------------------------------------------------------------
    # reads

    def __contains__(self, address: str) -> bool:
        return address in self.accounts

    def account(self, address: str) -> Account:
        try:
            return self.accounts[address]
        except KeyError:
            raise UnknownAccount(address) from None

    def balance(self, address: str) -> int:
        acct = self.accounts.get(address)
        return acct.balance if acct is not None else 0

    def storage_get(self, address: str, key, default=0):
        return self.account(address).storage.get(key, default)

    def total_supply(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    # ------------------------------------------------------------------
    # journaled writes

    def _record(self, entry: tuple) -> None:
        if self._snapshots:
            self._journal.append(entry)

    def create_account(self, address: str, balance: int = 0, code=None) -> Account:
        if address in self.accounts:
            raise ChainError(f"account exists: {address}")
        acct = Account(balance=balance, code=code)
        self.accounts[address] = acct
        self._record(("create", address))
        return acct

    def ensure_account(self, address: str) -> Account:
        if address not in self.accounts:
            return self.create_account(address)
        return self.accounts[address]

    def set_balance(self, address: str, value: int) -> None:
        if value < 0:
            raise ChainError("negative balance")
        acct = self.account(address)
        self._record(("balance", address, acct.balance))
        acct.balance = value

    def move_value(self, sender: str, recipient: str, value: int) -> None:
        if value == 0:
            return
        if self.balance(sender) < value:
            raise InsufficientFunds(f"{sender} holds {self.balance(sender)}, needs {value}")
        self.ensure_account(recipient)
        self.set_balance(sender, self.balance(sender) - value)
        self.set_balance(recipient, self.balance(recipient) + value)

    def storage_set(self, address: str, key, value: Any) -> None:
        acct = self.account(address)
        if acct.code is None:
            raise ChainError(f"storage write to account without code: {address}")
        self._record(("storage", address, key, acct.storage.get(key, _MISSING)))
        acct.storage[key] = value

    def increment_nonce(self, address: str) -> None:
        acct = self.account(address)
        self._record(("nonce", address, acct.nonce))
        acct.nonce += 1

    # ------------------------------------------------------------------
    # snapshots

    def snapshot(self) -> Snapshot:
        token = Snapshot(self._next_snapshot, len(self._journal), self.block_number, len(self.receipts))
        self._next_snapshot += 1
        self._snapshots.append(token)
        return token

    def _pop(self, token: Snapshot) -> None:
        if not self._snapshots or self._snapshots[-1] != token:
            raise StaleToken(f"snapshot {token.id} is not the innermost open snapshot")
        self._snapshots.pop()

    def revert_to(self, token: Snapshot) -> None:
        self._pop(token)
        while len(self._journal) > token.journal_len:
            entry = self._journal.pop()
            kind = entry[0]
            if kind == "create":
                del self.accounts[entry[1]]
            elif kind == "balance":
                self.accounts[entry[1]].balance = entry[2]
            elif kind == "nonce":
                self.accounts[entry[1]].nonce = entry[2]
            elif kind == "storage":
                _, address, key, old = entry
                if old is _MISSING:
                    del self.accounts[address].storage[key]
                else:
                    self.accounts[address].storage[key] = old
        self.block_number = token.block_number
        del self.receipts[token.receipts_len:]
        if not self._snapshots:
            self._journal.clear()

    def commit(self, token: Snapshot) -> None:
        self._pop(token)
        if not self._snapshots:
            self._journal.clear()

    # ------------------------------------------------------------------

    def clone(self) -> "WorldState":
        """Independent copy; contract code is shared (it is never mutated)."""
        other = WorldState(self.chain_id, self.gas_limit, self.gas_model)
        other.block_number = self.block_number
        other.receipts = list(self.receipts)
        other.accounts = {
            addr: Account(a.balance, a.nonce, a.code, dict(a.storage))
            for addr, a in self.accounts.items()
        }
        return other

    def adopt(self, other: "WorldState") -> None:
        """Take over the accounts and chain position of ``other``."""
        if self._snapshots:
            raise ChainError("cannot adopt another state while snapshots are open")
        self.accounts = other.accounts
        self.block_number = other.block_number
        self.receipts = other.receipts

    def fingerprint(self) -> tuple:
        """Canonical, comparable view of balances, nonces, code and storage."""
        return tuple(
            (addr, a.balance, a.nonce, a.code.name if a.code else None,
             tuple(sorted(a.storage.items(), key=repr)))
            for addr, a in sorted(self.accounts.items())
        ) + (("block", self.block_number),)
