"""
Parsing contracts and extracting their ABI
==========================================

The frontend turns source in the supported Solidity subset into a typed
syntax tree, prints it back canonically, and derives the JSON ABI that a
compiler would emit for the public surface.
"""

from reentrancy_audit import fixtures
from reentrancy_audit import nodes as n
from reentrancy_audit.frontend import extract_abi, parse, render

# a sender/receiver pair: the receiver's fallback books every payment
unit = parse(fixtures.read("sender_receiver"))
for contract in unit.contracts:
    print(contract.name, [fn.display_name for fn in contract.all_functions()])

# statements are numbered in source order inside each function
fairdare = parse(fixtures.read("FairDare"))
withdraw = fairdare.contract("FairDare").function("withdraw")
for stmt in n.iter_statements(withdraw.body):
    print(stmt.index, type(stmt).__name__)

# printing is canonical, and reparsing gives back the same tree
text = render(fairdare)
print(text)
assert parse(text) == fairdare

# the ABI lists the public function and the payable fallback
print(extract_abi(fairdare, "FairDare").to_json())
