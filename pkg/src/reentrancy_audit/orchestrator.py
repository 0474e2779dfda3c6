"""Dynamic confirmation: deploy the victim and a synthesized attacker, fire
the attack, and classify the outcome from balances and the call trace."""
from __future__ import annotations

import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from . import chain
from . import nodes as n
from .analysis import Pattern, VulnCandidate, find_candidates
from .chain import GenesisConfig, Status, TraceEvent, Transaction, WorldState
from .errors import AuditError
from .frontend import extract_abi, parse
from .synth import AttackPlan, attacker_name, default_args, deposit_route, synthesize_attacker

CONFIRMED = "Confirmed"
NOT_CONFIRMED = "NotConfirmed"
NOT_ATTACKABLE = "NotAttackable"
ANALYSIS_FAILED = "AnalysisFailed"

DEPLOYER = "0x" + "d0" * 20
ATTACKER = "0x" + "a0" * 20
ACTOR_BALANCE = 10**24
ENTRY_GAS = 10_000_000
DEFAULT_MAX_REENTRY = 64
DEFAULT_SEED = 1000


def attack_world(gas_model: str = chain.FAITHFUL) -> WorldState:
    """A fresh chain holding just the deployer and attacker accounts."""
    config = GenesisConfig(alloc=[(DEPLOYER, ACTOR_BALANCE), (ATTACKER, ACTOR_BALANCE)])
    return chain.genesis(config, gas_model)


def auto_funding(victim_unit: n.SourceUnit, contract: str, seed: int) -> int:
    """A tenth of the bankroll when the victim accepts deposits, else nothing."""
    abi = extract_abi(victim_unit, contract)
    return seed // 10 if deposit_route(abi) is not None else 0


def make_plan(
    victim_unit: n.SourceUnit,
    candidate: VulnCandidate,
    max_reentry: Optional[int] = DEFAULT_MAX_REENTRY,
    funding: Union[int, str] = "auto",
    seed: int = DEFAULT_SEED,
) -> AttackPlan:
    abi = extract_abi(victim_unit, candidate.contract)
    args = default_args(abi, candidate.function) if candidate.attackable else []
    if funding == "auto":
        funding = auto_funding(victim_unit, candidate.contract, seed)
    return AttackPlan(candidate.contract, candidate.function, args, max_reentry, int(funding))


@dataclass
class AttackReport:
    contract: str
    function: str
    static_pattern: Pattern
    verdict: str
    reason: Optional[str] = None
    max_reentry_depth: int = 0
    ether_extracted: int = 0  # attacker net gain over the run
    entitled: int = 0  # net gain of the same plan with re-entry disabled
    funding: int = 0
    seed: int = 0
    victim_final_balance: Optional[int] = None
    out_of_gas_frames: int = 0
    conservation_ok: bool = True
    reentry_bound: Optional[int] = None  # bound of the reported attempt
    gas_model: str = chain.FAITHFUL
    trace: list[TraceEvent] = field(default_factory=list, repr=False)
    trace_path: Optional[str] = None

    @property
    def key(self) -> tuple:
        return (self.contract, self.function, self.static_pattern.value)

    def to_dict(self) -> dict:
        return {
            "contract": self.contract,
            "function": self.function,
            "staticPattern": self.static_pattern.value,
            "verdict": self.verdict,
            "reason": self.reason,
            "maxReentryDepth": self.max_reentry_depth,
            "etherExtracted": self.ether_extracted,
            "entitled": self.entitled,
            "funding": self.funding,
            "seed": self.seed,
            "victimFinalBalance": self.victim_final_balance,
            "outOfGasFrames": self.out_of_gas_frames,
            "conservationOk": self.conservation_ok,
            "reentryBound": self.reentry_bound,
            "gasModel": self.gas_model,
            "trace": self.trace_path,
        }


def reentry_depth(trace: list[TraceEvent], address: str, function: str) -> int:
    """Largest number of simultaneously open frames of ``function`` at ``address``."""
    open_frames = best = 0
    for ev in trace:
        if ev.address != address or ev.function != function:
            continue
        if ev.kind == "enter":
            open_frames += 1
            best = max(best, open_frames)
        elif ev.kind == "exit":
            open_frames -= 1
    return best


def _failed(candidate: VulnCandidate, reason: str, gas_model: str, **extra) -> AttackReport:
    return AttackReport(
        candidate.contract, candidate.function, candidate.pattern, ANALYSIS_FAILED,
        reason=reason, gas_model=gas_model, **extra,
    )


def _ctor_args(contract: n.ContractDef) -> list:
    if contract.constructor is None:
        return []
    out = []
    for p in contract.constructor.params:
        kind = p.type.kind if p.type is not None else "uint256"
        out.append(False if kind == "bool" else DEPLOYER if kind in ("address", "contract") else 0)
    return out


def _deploy_victim(world: WorldState, unit: n.SourceUnit, name: str, seed: int) -> str:
    cdef = unit.contract(name)
    ctor_payable = cdef.constructor is not None and cdef.constructor.payable
    address, result = chain.deploy(
        world, DEPLOYER, unit, name, _ctor_args(cdef), seed if ctor_payable else 0,
    )
    if not result.success:
        raise AuditError(f"victim deployment failed: {result.reason}")
    if ctor_payable or seed == 0:
        return address
    route = deposit_route(extract_abi(unit, name))
    if route is not None:
        tx = Transaction(DEPLOYER, address, seed, function=route or None)
        if chain.send_transaction(world, tx).success:
            return address
    # no usable deposit path: credit the balance directly, the way a
    # self-destructing contract can push ether into any account
    world.move_value(DEPLOYER, address, seed)
    return address


def _execute(world: WorldState, victim_unit: n.SourceUnit, victim: str, plan: AttackPlan):
    abi = extract_abi(victim_unit, plan.target_contract)
    attacker_unit = synthesize_attacker(abi, plan)
    name = attacker_name(plan)
    attacker, result = chain.deploy(world, ATTACKER, attacker_unit, name, [victim], plan.funding)
    if not result.success:
        raise AuditError(f"attacker deployment failed: {result.reason}")
    # the entry transaction originates at the attacker contract itself so that
    # tx.origin == msg.sender checks in the victim do not stop the attack
    entry = chain.send_transaction(world, Transaction(attacker, attacker, 0, ENTRY_GAS, "attack"))
    sweep = chain.send_transaction(world, Transaction(ATTACKER, attacker, 0, ENTRY_GAS, "transferToOwner"))
    return attacker, entry, sweep


def _side(world: WorldState, attacker: Optional[str] = None) -> int:
    """Ether held by the attacking party: its EOA plus its contract."""
    return world.balance(ATTACKER) + (world.balance(attacker) if attacker else 0)


def _retry_bounds(max_reentry: Optional[int]) -> list[Optional[int]]:
    # a gas-capped victim call can fail deep in the chain and unwind every
    # payout, so a failed attack is retried with a halved bound
    if max_reentry is None:
        return [None]
    bounds = [max_reentry]
    while bounds[-1] > 1:
        bounds.append(bounds[-1] // 2)
    return bounds


def run_attack(
    world: WorldState,
    victim_unit: n.SourceUnit,
    candidate: VulnCandidate,
    plan: AttackPlan,
    seed: int = DEFAULT_SEED,
    trace_dir: Optional[Union[str, Path]] = None,
) -> AttackReport:
    """Attack one candidate in ``world``; never raises for analysis problems.

    ``world`` must hold the ``DEPLOYER`` and ``ATTACKER`` accounts (see
    ``attack_world``).  It ends in the state left by the reported attempt.
    """
    gas_model = world.gas_model
    common = dict(gas_model=gas_model, funding=plan.funding, seed=seed)
    if not candidate.attackable:
        reason = "constructor" if candidate.is_constructor else "not a public function"
        return AttackReport(
            candidate.contract, candidate.function, candidate.pattern, NOT_ATTACKABLE,
            reason=reason, **common,
        )
    try:
        victim = _deploy_victim(world, victim_unit, candidate.contract, seed)
        base = world.clone()

        control = base.clone()
        control_plan = replace(plan, max_reentry=0)
        c_before = _side(control)
        c_attacker, _, _ = _execute(control, victim_unit, victim, control_plan)
        entitled = max(0, _side(control, c_attacker) - c_before)

        before, victim_before = _side(base), base.balance(victim)
        others_before = base.total_supply() - before - victim_before
        for attempt, bound in enumerate(_retry_bounds(plan.max_reentry)):
            sandbox = world if attempt == 0 else base.clone()
            attacker, entry, _ = _execute(sandbox, victim_unit, victim, replace(plan, max_reentry=bound))
            if entry.success:
                break
        if sandbox is not world:
            world.adopt(sandbox)
    except AuditError as exc:
        return _failed(candidate, str(exc), **common)
    except (RecursionError, MemoryError) as exc:
        return _failed(candidate, type(exc).__name__, **common)

    gain = _side(world, attacker) - before
    victim_after = world.balance(victim)
    others_after = world.total_supply() - _side(world, attacker) - victim_after
    # there is no gas price, so the gas sink is zero
    conservation_ok = gain + (victim_after - victim_before) + (others_after - others_before) == 0
    depth = reentry_depth(entry.trace, victim, candidate.function)
    oog = sum(1 for ev in entry.trace if ev.kind == "exit" and ev.data.get("status") == Status.OUT_OF_GAS.value)
    confirmed = depth >= 2 and gain > entitled
    report = AttackReport(
        candidate.contract, candidate.function, candidate.pattern,
        CONFIRMED if confirmed else NOT_CONFIRMED,
        reason=None if entry.success else f"entry transaction {entry.status.value}: {entry.reason}",
        max_reentry_depth=depth, ether_extracted=gain, entitled=entitled,
        victim_final_balance=victim_after, out_of_gas_frames=oog,
        conservation_ok=conservation_ok, reentry_bound=bound, trace=entry.trace, **common,
    )
    if not conservation_ok:
        report.verdict, report.reason = ANALYSIS_FAILED, "value conservation violated"
    if trace_dir is not None:
        report.trace_path = str(write_trace(report, trace_dir))
    return report


def write_trace(report: AttackReport, trace_dir: Union[str, Path]) -> Path:
    directory = Path(trace_dir)
    directory.mkdir(parents=True, exist_ok=True)
    stem = re.sub(r"[^A-Za-z0-9_.-]", "_", f"{report.contract}.{report.function}.{report.static_pattern.value}")
    path = directory / f"{stem}.{report.gas_model}.trace.jsonl"
    path.write_text(chain.export_trace(report.trace))
    return path


# --------------------------------------------------------------------------
# batch pipeline


@dataclass
class PipelineOptions:
    gas_model: str = chain.FAITHFUL
    max_reentry: Optional[int] = DEFAULT_MAX_REENTRY
    seed_victim: int = DEFAULT_SEED
    funding: Union[int, str] = "auto"
    static_only: bool = False
    trace_dir: Optional[str] = None
    jobs: int = 1


@dataclass
class FileReport:
    path: str
    contracts: list[str] = field(default_factory=list)
    candidates: list[VulnCandidate] = field(default_factory=list)
    attacks: list[AttackReport] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "status": ANALYSIS_FAILED if self.failed else "Analyzed",
            "error": self.error,
            "contracts": list(self.contracts),
            "candidates": [c.to_dict() for c in self.candidates],
            "attacks": [a.to_dict() for a in self.attacks],
        }


@dataclass
class PipelineReport:
    files: list[FileReport] = field(default_factory=list)
    gas_model: str = chain.FAITHFUL
    static_only: bool = False

    @property
    def attacks(self) -> list[AttackReport]:
        return [a for f in self.files for a in f.attacks]

    @property
    def candidates(self) -> list[VulnCandidate]:
        return [c for f in self.files for c in f.candidates]

    @property
    def summary(self) -> dict:
        """Counts per (contract, function): confirmed if any attack on it
        succeeded, potential if flagged but not confirmed, safe for contracts
        without candidates, failed for unparseable files and failed attacks."""
        confirmed, flagged, failed = set(), set(), 0
        for f in self.files:
            if f.failed:
                failed += 1
                continue
            for c in f.candidates:
                flagged.add((f.path, c.contract, c.function))
            for a in f.attacks:
                key = (f.path, a.contract, a.function)
                if a.verdict == CONFIRMED:
                    confirmed.add(key)
                elif a.verdict == ANALYSIS_FAILED:
                    failed += 1
        safe = sum(
            1 for f in self.files if not f.failed
            for name in f.contracts if not any(c.contract == name for c in f.candidates)
        )
        return {
            "confirmed": len(confirmed),
            "potential": len(flagged - confirmed),
            "safe": safe,
            "failed": failed,
        }

    def to_dict(self) -> dict:
        return {
            "gasModel": self.gas_model,
            "staticOnly": self.static_only,
            "summary": self.summary,
            "files": [f.to_dict() for f in self.files],
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def exit_code(self) -> int:
        if self.files and all(f.failed for f in self.files):
            return 3
        return 1 if any(a.verdict == CONFIRMED for a in self.attacks) else 0


def analyze_file(path: Union[str, Path], options: PipelineOptions) -> FileReport:
    report = FileReport(str(path))
    try:
        unit = parse(Path(path).read_text())
    except (AuditError, OSError, UnicodeDecodeError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report
    report.contracts = [c.name for c in unit.contracts]
    report.candidates = find_candidates(unit)
    if options.static_only:
        return report
    for cand in report.candidates:
        try:
            plan = make_plan(unit, cand, options.max_reentry, options.funding, options.seed_victim)
        except AuditError as exc:
            report.attacks.append(_failed(cand, str(exc), options.gas_model))
            continue
        world = attack_world(options.gas_model)
        report.attacks.append(run_attack(world, unit, cand, plan, options.seed_victim, options.trace_dir))
    report.attacks.sort(key=lambda a: a.key)
    return report


def analyze_pipeline(sources: list, options: Optional[PipelineOptions] = None) -> PipelineReport:
    """Parse, scan and attack every file; each candidate gets its own world."""
    options = options or PipelineOptions()
    paths = sorted(str(s) for s in sources)
    if options.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=options.jobs) as pool:
            files = list(pool.map(analyze_file, paths, [options] * len(paths)))
    else:
        files = [analyze_file(p, options) for p in paths]
    return PipelineReport(files, options.gas_model, options.static_only)
