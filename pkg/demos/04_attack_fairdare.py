"""
Confirming a candidate with a synthesized attacker
==================================================

The attacker deposits a little ether, calls the flagged function, and calls
it again from its fallback every time the victim pays out.  The verdict
compares what it walked away with against what an honest run of the same
plan would have earned.
"""

from reentrancy_audit import chain, fixtures
from reentrancy_audit.analysis import find_candidates
from reentrancy_audit.frontend import extract_abi, parse
from reentrancy_audit.orchestrator import attack_world, make_plan, run_attack
from reentrancy_audit.synth import render_attacker, synthesize_attacker

victim = parse(fixtures.read("FairDare"))
candidate = find_candidates(victim)[0]
seed = 7_100_000_000_000_000  # the victim's bankroll, 0.0071 ether

plan = make_plan(victim, candidate, max_reentry=64, funding="auto", seed=seed)
print(plan)
print(render_attacker(synthesize_attacker(extract_abi(victim, "FairDare"), plan)))

for model in chain.GAS_MODELS:
    report = run_attack(attack_world(model), victim, candidate, plan, seed)
    print(model, report.to_dict())

# with nothing deposited, the victim owes nothing and never calls back
broke = make_plan(victim, candidate, funding=0, seed=seed)
print(run_attack(attack_world(chain.PAPER), victim, candidate, broke, seed).to_dict())
