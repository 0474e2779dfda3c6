import json

import pytest

from reentrancy_audit import nodes as n
from reentrancy_audit.errors import ParseError, UnsupportedConstruct, UnsupportedVersion
from reentrancy_audit.frontend import AbiSpec, check_version, extract_abi, parse, render

from conftest import source

FAIRDARE_ABI = [
    {
        "constant": False,
        "inputs": [],
        "name": "withdraw",
        "outputs": [],
        "payable": False,
        "stateMutability": "nonpayable",
        "type": "function",
    },
    {"payable": True, "stateMutability": "payable", "type": "fallback"},
]


def test_sender_receiver_structure():
    unit = parse(source("sender_receiver"))
    assert [c.name for c in unit.contracts] == ["Sender", "Receiver"]
    sender, receiver = unit.contracts
    assert [v.name for v in sender.state_vars] == ["amount", "sender", "reciever"]
    assert sender.state_var("sender").type == n.ADDRESS_PAYABLE
    assert sender.constructor.payable
    send = sender.function("send")
    assert send.params == [n.Param("receiver", None)]
    assert send.visibility is None and send.effective_visibility == "public"
    (stmt,) = send.body
    call = stmt.expr
    assert isinstance(call, n.ExternalCall) and call.kind is n.CallKind.CALL_VALUE
    assert call.gas == n.Literal(20317, "uint")
    assert receiver.fallback.payable
    (bump,) = receiver.fallback.body
    assert isinstance(bump, n.Assign) and bump.op == "+="
    assert bump.expr == n.Builtin("msg.value")


def test_fairdare_withdraw_statements():
    unit = parse(source("FairDare"))
    fn = unit.contract("FairDare").function("withdraw")
    kinds = [type(s).__name__ for s in n.iter_statements(fn.body)]
    assert kinds == ["Require", "VarDecl", "If", "VarDecl", "If", "ExprStmt", "Assign"]
    assert [s.index for s in n.iter_statements(fn.body)] == list(range(7))
    transfer = next(s for s in n.iter_statements(fn.body) if isinstance(s, n.ExprStmt)).expr
    assert transfer.kind is n.CallKind.TRANSFER
    assert transfer.callee == n.Builtin("msg.sender")


def test_fairdare_abi_matches_solc_layout():
    abi = extract_abi(parse(source("FairDare")), "FairDare")
    assert abi.to_list() == FAIRDARE_ABI
    # key order is part of the layout
    assert list(abi.to_list()[0]) == sorted(FAIRDARE_ABI[0])
    assert AbiSpec.from_json("FairDare", abi.to_json()).to_list() == FAIRDARE_ABI


def test_token_abi_lists_both_functions():
    abi = extract_abi(parse(source("token")), "Token")
    assert [e.signature for e in abi.entries] == ["transfer(address,uint256)", "withdraw()"]
    assert all(e.state_mutability == "nonpayable" for e in abi.entries)


def test_abi_view_and_constructor():
    unit = parse(source("DeFi"))
    abi = extract_abi(unit, "DeFi")
    assert abi.function("balanceOf").to_dict()["constant"] is True
    abi = extract_abi(parse(source("sender_receiver")), "Sender")
    assert abi.entries[0].to_dict() == {
        "inputs": [], "payable": True, "stateMutability": "payable", "type": "constructor",
    }
    assert abi.function("send").inputs[0].type == "uint256"


@pytest.mark.parametrize("name", [
    "sender_receiver", "bank", "bank_fixed", "token",
    "dao_token", "dao_token_fixed", "DeFi", "Globalcryptox", "FairDare", "Moneybox",
    "AIRToken", "QuizBLZ",
])
def test_fixture_round_trip(name):
    unit = parse(source(name))
    text = render(unit)
    assert parse(text) == unit
    assert render(parse(text)) == text


def test_positions_do_not_affect_equality():
    a = parse("pragma solidity ^0.5.0; contract A { uint x; function f() public { x = 1; } }")
    b = parse("pragma solidity ^0.5.0;\n\ncontract A {\n  uint x;\n\n  function f() public {\n    x = 1;\n  }\n}")
    assert a == b
    assert a.contracts[0].pos != b.contracts[0].pos


def test_legacy_event_call_and_emit():
    unit = parse(source("bank"))
    fn = unit.contracts[0].function("transferBalance")
    emits = [s for s in fn.body if isinstance(s, n.Emit)]
    assert len(emits) == 1 and emits[0].event == "LogTransactions" and not emits[0].explicit


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("pragma solidity ^0.5.0;\ncontract A {\n  uint x\n}")
    assert info.value.line == 4 and info.value.column == 1


@pytest.mark.parametrize("snippet, construct", [
    ("contract A is B {}", "inheritance"),
    ("library L {}", "library"),
    ("contract A { function f() public { for (;;) {} } }", "for"),
    ("contract A { modifier m() { _; } }", "modifier"),
    ("contract A { function f() public { selfdestruct(msg.sender); } }", "selfdestruct"),
])
def test_unsupported_constructs(snippet, construct):
    with pytest.raises(UnsupportedConstruct) as info:
        parse("pragma solidity ^0.5.0;\n" + snippet)
    assert construct in info.value.construct


def test_unsupported_fixture_reports_library():
    with pytest.raises(UnsupportedConstruct) as info:
        parse(source("Globalcryptox_full"))
    assert info.value.construct == "library"


@pytest.mark.parametrize("pragma, ok", [
    ("^0.4.22", True), ("^0.5.12", True), (">=0.4.22 <0.6.0", True), ("0.4.25", True),
    ("^0.6.0", False), (">=0.7.0", False), ("0.4.11", False), ("^0.8.0", False),
])
def test_version_window(pragma, ok):
    if ok:
        check_version(pragma)
    else:
        with pytest.raises(UnsupportedVersion):
            check_version(pragma)


def test_missing_pragma_is_rejected():
    with pytest.raises(ParseError):
        parse("contract A {}")


def test_render_canonical_text():
    text = render(parse(source("FairDare")))
    assert "function() external payable {" in text
    assert "msg.sender.transfer(amountToWithdraw);" in text
    assert json.dumps(text)  # plain text, no stray objects
