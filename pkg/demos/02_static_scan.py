"""
Finding reentrancy candidates statically
========================================

A function is a candidate when it writes contract state after an
ether-moving call.  When the variables it is about to update can also be
written through another public function, it is reported a second time as a
cross-function candidate.
"""

from reentrancy_audit import fixtures
from reentrancy_audit.analysis import emit_signatures, find_candidates, find_external_calls
from reentrancy_audit.frontend import parse

# every external call, with the gas it forwards
for name in ("sender_receiver", "FairDare", "token"):
    for site in find_external_calls(parse(fixtures.read(name))):
        print(f"{site.contract}.{site.function}: {site.kind.value} at statement "
              f"{site.stmt_index}, gas {site.gas_forwarded}")

# the vulnerable bank is flagged, its reordered twin is not
print(emit_signatures(find_candidates(parse(fixtures.read("bank")))), end="")
print(find_candidates(parse(fixtures.read("bank_fixed"))))

# the token is exposed through withdraw and, across functions, through transfer
for cand in find_candidates(parse(fixtures.read("token"))):
    print(cand.signature, cand.pattern.value, cand.cross_peers)

# the scan corpus yields one signature per contract
units = [parse(p.read_text()) for p in fixtures.corpus_paths()]
print(emit_signatures([c for u in units for c in find_candidates(u)]), end="")
