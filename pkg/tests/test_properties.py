"""Generated-case properties of the frontend and the chain simulator."""
import copy

from hypothesis import given, settings
from hypothesis import strategies as st

from reentrancy_audit import chain
from reentrancy_audit.chain import GenesisConfig, Transaction, deploy, genesis, send_transaction
from reentrancy_audit.frontend import parse, render

CASES = settings(max_examples=200, deadline=None)

# --------------------------------------------------------------------------
# parse/render round trip over generated programs

ATOMS = [
    "a", "b", "flag", "owner", "m[msg.sender]", "m[owner]", "msg.sender", "msg.value",
    "block.number", "address(this).balance", "tx.origin", "true", "false", "1 ether",
    "0x" + "ab" * 20, "uint256(a)", "address(owner)",
]
OPS = ["+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "&&", "||"]


def expressions():
    atoms = st.one_of(st.sampled_from(ATOMS), st.integers(0, 10**30).map(str))
    return st.recursive(atoms, lambda inner: st.one_of(
        st.tuples(inner, st.sampled_from(OPS), inner).map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
        inner.map(lambda e: f"({e})"),
        inner.map(lambda e: f"!({e})"),
    ), max_leaves=8)


EXPR = expressions()


def statements(depth=2):
    e = EXPR
    simple = st.one_of(
        st.tuples(st.sampled_from(["a", "b", "m[msg.sender]"]), st.sampled_from(["=", "+=", "-="]), e)
        .map(lambda t: f"{t[0]} {t[1]} {t[2]};"),
        e.map(lambda x: f"uint256 tmp = {x};"),
        e.map(lambda x: f"require({x});"),
        st.tuples(e, st.text("abc xyz", max_size=6)).map(lambda t: f'require({t[0]}, "{t[1]}");'),
        e.map(lambda x: f"msg.sender.transfer({x});"),
        e.map(lambda x: f"owner.send({x});"),
        e.map(lambda x: f'require(msg.sender.call.value({x})(""));'),
        st.tuples(e, e).map(lambda t: f'msg.sender.call.value({t[0]}).gas({t[1]})("");'),
        e.map(lambda x: f"emit Moved(msg.sender, {x});"),
        e.map(lambda x: f"Moved(owner, {x});"),
    )
    if depth == 0:
        return simple
    block = st.lists(statements(depth - 1), max_size=3).map(" ".join)
    return st.one_of(
        simple,
        st.tuples(e, block).map(lambda t: f"if ({t[0]}) {{ {t[1]} }}"),
        st.tuples(e, block, block).map(lambda t: f"if ({t[0]}) {{ {t[1]} }} else {{ {t[2]} }}"),
    )


STMTS = statements()

HEADERS = [
    "function f() public", "function g(uint256 x, address payable y) external payable",
    "function h(bool z) internal", "function() external payable", "constructor() public payable",
    "function k() public view returns (uint256)",
]


@st.composite
def programs(draw):
    pragma = draw(st.sampled_from(["^0.5.0", ">=0.4.22 <0.6.0", "^0.4.24", "0.5.12"]))
    funcs = []
    for header in draw(st.lists(st.sampled_from(HEADERS), min_size=1, max_size=4, unique=True)):
        body = " ".join(draw(st.lists(STMTS, max_size=4)))
        if "returns" in header:
            body += " return a;"
        funcs.append(f"{header} {{ {body} }}")
    return f"""pragma solidity {pragma};
contract P {{
    uint256 a; uint256 public b = 3; bool flag; address payable owner;
    mapping (address => uint256) m;
    event Moved(address who, uint256 amount);
    {" ".join(funcs)}
}}"""


@CASES
@given(programs())
def test_parse_render_round_trip(src):
    unit = parse(src)
    text = render(unit)
    assert parse(text) == unit
    assert render(parse(text)) == text


# --------------------------------------------------------------------------
# snapshots against a copy-on-write reference model

ADDRS = [chain.to_address(i + 1) for i in range(8)]
OPS_CHAIN = st.one_of(
    st.tuples(st.just("move"), st.sampled_from(ADDRS), st.sampled_from(ADDRS), st.integers(0, 150)),
    st.tuples(st.just("store"), st.sampled_from(ADDRS[:3]), st.sampled_from(["x", "y"]), st.integers(0, 9)),
    st.tuples(st.just("nonce"), st.sampled_from(ADDRS)),
    st.tuples(st.just("create"), st.sampled_from(ADDRS)),
    st.tuples(st.just("snapshot")),
    st.tuples(st.just("revert")),
    st.tuples(st.just("commit")),
)


def model_of(world):
    return {
        a: (acct.balance, acct.nonce, dict(acct.storage)) for a, acct in world.accounts.items()
    }


def apply(world, model, op):
    """Apply ``op`` to both; the model is a plain dict mutated in place."""
    kind = op[0]
    if kind == "move":
        _, src, dst, value = op
        if src not in model or model[src][0] < value:
            return
        world.move_value(src, dst, value)
        if value:
            model.setdefault(dst, (0, 0, {}))
            b, nn, s = model[src]
            model[src] = (b - value, nn, s)
            b, nn, s = model[dst]
            model[dst] = (b + value, nn, s)
    elif kind == "store":
        _, addr, key, value = op
        world.storage_set(addr, key, value)
        b, nn, s = model[addr]
        model[addr] = (b, nn, {**s, key: value})
    elif kind == "nonce":
        if op[1] in model:
            world.increment_nonce(op[1])
            b, nn, s = model[op[1]]
            model[op[1]] = (b, nn + 1, s)
    elif kind == "create":
        if op[1] not in model:
            world.create_account(op[1])
            model[op[1]] = (0, 0, {})


@CASES
@given(st.lists(st.integers(0, 500), min_size=3, max_size=8), st.lists(OPS_CHAIN, max_size=40))
def test_revert_matches_copy_oracle(balances, ops):
    world = genesis(GenesisConfig(alloc=list(zip(ADDRS, balances))))
    for addr in ADDRS[:3]:
        if addr in world:
            world.accounts[addr].code = object()  # storage needs code
    model = model_of(world)
    stack = []
    for op in ops:
        if op[0] == "snapshot":
            stack.append((world.snapshot(), copy.deepcopy(model)))
        elif op[0] == "revert" and stack:
            token, saved = stack.pop()
            world.revert_to(token)
            model = saved
        elif op[0] == "commit" and stack:
            world.commit(stack.pop()[0])
        elif op[0] == "store" and op[1] not in model:
            continue
        elif op[0] not in ("snapshot", "revert", "commit"):
            apply(world, model, op)
        assert model_of(world) == model
    while stack:
        token, saved = stack.pop()
        world.revert_to(token)
        assert model_of(world) == saved


# --------------------------------------------------------------------------
# ether conservation over random transactions

BANKISH = """pragma solidity ^0.5.0;
contract Vault {
    mapping (address => uint) owed;
    uint public total;
    function deposit() public payable { owed[msg.sender] += msg.value; total += msg.value; }
    function withdraw() public {
        uint amount = owed[msg.sender];
        require(msg.sender.call.value(amount)(""));
        owed[msg.sender] = 0;
        total -= amount;
    }
    function pay(address payable to, uint v) public { to.transfer(v); }
    function tryPay(address payable to, uint v) public returns (bool) { return to.send(v); }
    function () external payable { total += msg.value; }
}
"""
USERS = [chain.to_address(0x100 + i) for i in range(4)]
TX = st.tuples(
    st.sampled_from(USERS),
    st.integers(0, 4),  # index into USERS + [vault]
    st.sampled_from([None, "deposit", "withdraw", "pay", "tryPay", "missing"]),
    st.integers(0, 3000),
    st.integers(20_000, 300_000),
)


@CASES
@given(st.sampled_from(chain.GAS_MODELS), st.lists(TX, max_size=12))
def test_ether_is_conserved(gas_model, txs):
    world = genesis(GenesisConfig(alloc=[(u, 10_000) for u in USERS]), gas_model)
    vault, _ = deploy(world, USERS[0], parse(BANKISH), "Vault")
    total = world.total_supply()
    targets = USERS + [vault]
    for sender, to, fn, value, gas in txs:
        args = {"pay": [targets[value % 5], value // 3], "tryPay": [targets[value % 5], value // 2]}.get(fn, [])
        value = min(value, world.balance(sender))
        send_transaction(world, Transaction(sender, targets[to], value, gas, fn, args))
        assert world.total_supply() == total
    assert all(world.balance(a) >= 0 for a in world.accounts)


# --------------------------------------------------------------------------
# msg.sender / tx.origin along call chains

RELAY = """pragma solidity ^0.5.0;
contract Relay {
    address public lastSender;
    address public lastOrigin;
    Relay public next;
    bool public lowLevel;
    function link(address payable to, bool raw) public { next = Relay(to); lowLevel = raw; }
    function ping() public payable { note(); }
    function () external payable { note(); }
    function note() internal {
        lastSender = msg.sender;
        lastOrigin = tx.origin;
        if (address(next) != address(0)) {
            if (lowLevel) {
                require(address(next).call.value(0)(""));
            } else {
                next.ping();
            }
        }
    }
}
"""


@CASES
@given(st.lists(st.booleans(), min_size=1, max_size=6), st.sampled_from(USERS), st.booleans())
def test_sender_and_origin_along_chains(hops, origin, enter_by_fallback):
    world = genesis(GenesisConfig(alloc=[(u, 10**9) for u in USERS]))
    unit = parse(RELAY)
    relays = [deploy(world, USERS[0], unit, "Relay")[0] for _ in hops]
    for here, there, raw in zip(relays, relays[1:], hops):
        assert send_transaction(world, Transaction(USERS[0], here, 0, function="link", args=[there, raw])).success
    fn = None if enter_by_fallback else "ping"
    assert send_transaction(world, Transaction(origin, relays[0], 0, function=fn)).success
    expected_sender = origin
    for relay in relays:
        assert world.storage_get(relay, "lastSender") == expected_sender
        assert world.storage_get(relay, "lastOrigin") == origin
        expected_sender = relay
