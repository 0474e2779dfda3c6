"""ABI extraction in the solc 0.4/0.5 JSON layout."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .. import nodes as n
from ..errors import UnknownContract


@dataclass
class AbiParam:
    name: str
    type: str

    def to_dict(self) -> dict:
        return {"name": self.name, "type": self.type}


@dataclass
class AbiEntry:
    type: str  # function | fallback | constructor
    name: Optional[str] = None
    inputs: list[AbiParam] = field(default_factory=list)
    outputs: list[AbiParam] = field(default_factory=list)
    payable: bool = False
    state_mutability: str = "nonpayable"

    @property
    def constant(self) -> bool:
        return self.state_mutability in ("view", "pure")

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(p.type for p in self.inputs)})"

    def to_dict(self) -> dict:
        if self.type == "fallback":
            return {
                "payable": self.payable,
                "stateMutability": self.state_mutability,
                "type": "fallback",
            }
        if self.type == "constructor":
            return {
                "inputs": [p.to_dict() for p in self.inputs],
                "payable": self.payable,
                "stateMutability": self.state_mutability,
                "type": "constructor",
            }
        return {
            "constant": self.constant,
            "inputs": [p.to_dict() for p in self.inputs],
            "name": self.name,
            "outputs": [p.to_dict() for p in self.outputs],
            "payable": self.payable,
            "stateMutability": self.state_mutability,
            "type": "function",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AbiEntry":
        return cls(
            type=d["type"],
            name=d.get("name"),
            inputs=[AbiParam(p["name"], p["type"]) for p in d.get("inputs", [])],
            outputs=[AbiParam(p["name"], p["type"]) for p in d.get("outputs", [])],
            payable=d.get("payable", False),
            state_mutability=d.get("stateMutability", "nonpayable"),
        )


@dataclass
class AbiSpec:
    contract: str
    entries: list[AbiEntry] = field(default_factory=list)

    def function(self, name: str) -> Optional[AbiEntry]:
        for e in self.entries:
            if e.type == "function" and e.name == name:
                return e
        return None

    @property
    def fallback(self) -> Optional[AbiEntry]:
        for e in self.entries:
            if e.type == "fallback":
                return e
        return None

    @property
    def constructor(self) -> Optional[AbiEntry]:
        for e in self.entries:
            if e.type == "constructor":
                return e
        return None

    def to_list(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    def to_json(self, indent: Optional[int] = 4) -> str:
        return json.dumps(self.to_list(), indent=indent)

    @classmethod
    def from_json(cls, contract: str, text: str) -> "AbiSpec":
        return cls(contract, [AbiEntry.from_dict(d) for d in json.loads(text)])


def _abi_params(params: list[n.Param]) -> list[AbiParam]:
    # untyped legacy parameters are reported as uint256, solc's old default
    return [AbiParam(p.name, p.type.abi_name if p.type else "uint256") for p in params]


def _mutability(contract: n.ContractDef, fn: n.FunctionDef) -> str:
    from ..analysis import modifies_state

    if fn.payable:
        return "payable"
    if fn.mutability:
        return fn.mutability
    return "nonpayable" if modifies_state(contract, fn) else "view"


def extract_abi(unit: n.SourceUnit, contract: str) -> AbiSpec:
    """One entry per public/external function, plus constructor and fallback
    entries when the contract declares them."""
    cdef = unit.contract(contract)
    if cdef is None:
        raise UnknownContract(contract)
    spec = AbiSpec(contract)
    if cdef.constructor is not None:
        ctor = cdef.constructor
        spec.entries.append(AbiEntry(
            "constructor", inputs=_abi_params(ctor.params), payable=ctor.payable,
            state_mutability="payable" if ctor.payable else "nonpayable",
        ))
    for fn in cdef.functions:
        if not fn.is_public:
            continue
        spec.entries.append(AbiEntry(
            "function", fn.name, _abi_params(fn.params), _abi_params(fn.returns),
            fn.payable, _mutability(cdef, fn),
        ))
    if cdef.fallback is not None:
        fb = cdef.fallback
        spec.entries.append(AbiEntry(
            "fallback", payable=fb.payable,
            state_mutability="payable" if fb.payable else "nonpayable",
        ))
    return spec
