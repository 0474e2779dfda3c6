import json

import pytest

from reentrancy_audit import chain
from reentrancy_audit.analysis import Pattern, find_candidates
from reentrancy_audit.fixtures import corpus_paths, path
from reentrancy_audit.frontend import parse
from reentrancy_audit.orchestrator import (
    ANALYSIS_FAILED, CONFIRMED, NOT_ATTACKABLE, NOT_CONFIRMED, PipelineOptions, analyze_pipeline,
    attack_world, make_plan, reentry_depth, run_attack,
)

from conftest import source


def attack(name, gas_model, seed=1000, funding="auto", max_reentry=64, pattern=Pattern.SINGLE_FUNCTION):
    unit = parse(source(name))
    cand = next(c for c in find_candidates(unit) if c.pattern is pattern)
    plan = make_plan(unit, cand, max_reentry, funding, seed)
    return run_attack(attack_world(gas_model), unit, cand, plan, seed)


def test_fairdare_drained_under_paper_gas():
    report = attack("FairDare", chain.PAPER)
    assert report.verdict == CONFIRMED
    assert report.victim_final_balance == 0
    assert report.ether_extracted == 1000 and report.entitled == 0
    assert report.max_reentry_depth == 11 and report.conservation_ok


def test_fairdare_refuted_under_faithful_gas():
    report = attack("FairDare", chain.FAITHFUL)
    assert report.verdict == NOT_CONFIRMED
    assert report.max_reentry_depth == 1 and report.out_of_gas_frames >= 1
    assert report.ether_extracted == 0 and report.victim_final_balance == 1000


@pytest.mark.parametrize("gas_model", chain.GAS_MODELS)
def test_dao_token_confirmed_either_way(gas_model):
    for pattern in Pattern:
        report = attack("dao_token", gas_model, pattern=pattern)
        assert report.verdict == CONFIRMED and report.static_pattern is pattern
        assert report.ether_extracted > report.entitled


def test_entitled_reflects_legitimate_payout():
    # an honest withdraw of the deposit gains nothing, so entitled is 0
    report = attack("dao_token", chain.FAITHFUL, max_reentry=0)
    assert report.verdict == NOT_CONFIRMED
    assert report.max_reentry_depth == 1 and report.ether_extracted == report.entitled == 0


def test_constructor_candidate_not_attackable():
    report = attack("Globalcryptox", chain.PAPER)
    assert report.verdict == NOT_ATTACKABLE and report.reason == "constructor"


def test_gas_capped_victim_needs_smaller_bound():
    report = attack("Moneybox", chain.FAITHFUL)
    assert report.verdict == CONFIRMED
    assert report.reentry_bound < 64 and report.max_reentry_depth >= 2


def test_reentry_depth_counts_overlap_only():
    ev = lambda seq, kind, fn: chain.TraceEvent(seq, kind, 0, "0xv", fn)
    sequential = [ev(0, "enter", "w"), ev(1, "exit", "w"), ev(2, "enter", "w"), ev(3, "exit", "w")]
    nested = [ev(0, "enter", "w"), ev(1, "enter", "w"), ev(2, "exit", "w"), ev(3, "exit", "w")]
    assert reentry_depth(sequential, "0xv", "w") == 1
    assert reentry_depth(nested, "0xv", "w") == 2
    assert reentry_depth(nested, "0xother", "w") == 0


def test_confirmed_trace_has_nested_frames():
    report = attack("DeFi", chain.FAITHFUL)
    assert report.verdict == CONFIRMED
    victim_events = [e for e in report.trace if e.function == "withdraw" and e.kind in ("enter", "exit")]
    assert [e.kind for e in victim_events[:2]] == ["enter", "enter"]


def test_empty_pipeline():
    report = analyze_pipeline([])
    assert report.summary == {"confirmed": 0, "potential": 0, "safe": 0, "failed": 0}
    assert report.exit_code() == 0


def test_cei_pair():
    report = analyze_pipeline([path("bank.sol"), path("bank_fixed.sol")],
                              PipelineOptions(gas_model=chain.PAPER))
    vulnerable, fixed = sorted(report.files, key=lambda f: "fixed" in f.path)
    assert len(vulnerable.attacks) == 1
    assert vulnerable.attacks[0].verdict in (CONFIRMED, NOT_CONFIRMED)
    assert fixed.candidates == [] and fixed.attacks == []


def test_unparseable_file_does_not_abort_batch():
    files = [path("Globalcryptox_full.sol"), path("FairDare.sol")]
    report = analyze_pipeline(files, PipelineOptions(gas_model=chain.PAPER))
    failed = [f for f in report.files if f.failed]
    assert len(failed) == 1 and "library" in failed[0].error
    assert report.summary["failed"] == 1 and report.summary["confirmed"] == 1
    assert report.exit_code() == 1


def test_all_failed_exit_code(tmp_path):
    bad = tmp_path / "bad.sol"
    bad.write_text("contract {")
    assert analyze_pipeline([bad]).exit_code() == 3


def test_static_only_mode():
    report = analyze_pipeline(corpus_paths(), PipelineOptions(static_only=True))
    assert report.attacks == [] and len(report.candidates) == 11
    assert report.summary["potential"] == 6


@pytest.mark.parametrize("gas_model", chain.GAS_MODELS)
def test_corpus_invariants(gas_model):
    report = analyze_pipeline(corpus_paths(), PipelineOptions(gas_model=gas_model))
    flagged = {(c.contract, c.function, c.pattern) for c in report.candidates}
    for a in report.attacks:
        assert (a.contract, a.function, a.static_pattern) in flagged
        assert a.conservation_ok
        if a.verdict == CONFIRMED:
            assert a.max_reentry_depth >= 2 and a.ether_extracted > a.entitled
        assert (a.verdict == NOT_ATTACKABLE) == (a.function == "constructor")
        assert a.verdict != ANALYSIS_FAILED


def test_fresh_world_isolation():
    options = PipelineOptions(gas_model=chain.PAPER)
    batch = analyze_pipeline(corpus_paths(), options)
    for f in batch.files:
        alone = analyze_pipeline([f.path], options)
        assert alone.files[0].to_dict() == f.to_dict()


def test_parallel_matches_serial():
    serial = analyze_pipeline(corpus_paths(), PipelineOptions(gas_model=chain.PAPER))
    parallel = analyze_pipeline(list(reversed(corpus_paths())), PipelineOptions(gas_model=chain.PAPER, jobs=3))
    assert parallel.to_json() == serial.to_json()


def test_report_json_round_trips(tmp_path):
    options = PipelineOptions(gas_model=chain.PAPER, trace_dir=str(tmp_path))
    report = analyze_pipeline([path("FairDare.sol")], options)
    data = json.loads(report.to_json())
    assert list(data) == ["gasModel", "staticOnly", "summary", "files"]
    attack_dict = data["files"][0]["attacks"][0]
    trace = tmp_path / attack_dict["trace"].split("/")[-1]
    lines = trace.read_text().splitlines()
    assert lines and all(json.loads(line)["seq"] == i for i, line in enumerate(lines))
