"""
The 2300-gas stipend
====================

``transfer`` and ``send`` hand the recipient a 2300-gas stipend, less than
one storage write costs, so a recipient's fallback cannot update its own
state.  The ``paper`` gas model drops that limit and forwards everything,
which is what makes transfer-based contracts re-enterable in that setting.
"""

from reentrancy_audit import chain
from reentrancy_audit.frontend import parse

SOURCE = """pragma solidity ^0.5.0;
contract Counter {
    uint public received;
    function () external payable { received += msg.value; }
}
contract Payer {
    Counter public c;
    constructor(address payable a) public payable { c = Counter(a); }
    function viaTransfer(uint v) public { address(c).transfer(v); }
    function viaCall(uint v) public { require(address(c).call.value(v)("")); }
}
"""
ALICE = "0x" + "11" * 20

for model in chain.GAS_MODELS:
    world = chain.genesis(chain.GenesisConfig(alloc=[(ALICE, 10**18)]), model)
    unit = parse(SOURCE)
    counter, _ = chain.deploy(world, ALICE, unit, "Counter")
    payer, _ = chain.deploy(world, ALICE, unit, "Payer", [counter], 100)
    for fn in ("viaTransfer", "viaCall"):
        result = chain.send_transaction(world, chain.Transaction(ALICE, payer, 0, function=fn, args=[10]))
        print(f"{model:8s} {fn:12s} {result.status.value:9s} counter holds {world.balance(counter)}")

# the trace of the last transaction, one JSON object per event
print(chain.export_trace(result.trace))
