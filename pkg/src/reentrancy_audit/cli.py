"""Command-line front end.

Exit codes: 0 no confirmed findings, 1 at least one confirmed finding,
2 usage error, 3 every input failed analysis.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import chain
from .analysis import emit_signatures, find_candidates
from .errors import AuditError
from .frontend import extract_abi, parse
from .orchestrator import (
    DEFAULT_MAX_REENTRY, DEFAULT_SEED, PipelineOptions, PipelineReport, analyze_pipeline, make_plan,
)
from .synth import attacker_name, render_attacker, synthesize_attacker

EXIT_OK, EXIT_CONFIRMED, EXIT_USAGE, EXIT_ALL_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _max_reentry(text: str) -> Optional[int]:
    if text.lower() in ("none", "unbounded"):
        return None
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _funding(text: str):
    if text == "auto":
        return text
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _wei(text: str) -> int:
    value = int(text, 0)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gas-model", choices=chain.GAS_MODELS, default=chain.FAITHFUL)
    common.add_argument("--max-reentry", type=_max_reentry, default=DEFAULT_MAX_REENTRY,
                        help="re-entry bound for synthesized attackers, or 'none'")
    common.add_argument("--seed-victim", type=_wei, default=DEFAULT_SEED, metavar="WEI")
    common.add_argument("--funding", type=_funding, default="auto", metavar="WEI|auto",
                        help="attacker deposit before the attack (auto: a tenth of the seed)")
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--trace-dir", metavar="DIR")
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="reentrancy-audit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="static scan plus dynamic confirmation")
    p.add_argument("files", nargs="+")
    p.add_argument("--emit-attacker", metavar="DIR", help="also write each synthesized attacker")

    p = sub.add_parser("scan", parents=[common], help="static scan only; prints signatures")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("emit-attacker", parents=[common], help="write an attacker contract")
    p.add_argument("file")
    p.add_argument("--function", required=True)
    p.add_argument("--contract")
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("simulate", parents=[common], help="run a transaction script")
    p.add_argument("--genesis", required=True)
    p.add_argument("--script", required=True)
    return parser


def _options(args, static_only: bool) -> PipelineOptions:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return PipelineOptions(
        gas_model=args.gas_model, max_reentry=args.max_reentry, seed_victim=args.seed_victim,
        funding=args.funding, static_only=static_only, trace_dir=args.trace_dir, jobs=args.jobs,
    )


def _check_files(files: Sequence[str]) -> None:
    missing = [f for f in files if not Path(f).is_file()]
    if missing:
        raise UsageError(f"no such file: {', '.join(missing)}")


def _print_report(report: PipelineReport, out) -> None:
    for f in report.files:
        if f.failed:
            print(f"{f.path}: AnalysisFailed: {f.error}", file=out)
            continue
        if not f.candidates:
            print(f"{f.path}: no candidates", file=out)
        for c in f.candidates if report.static_only else []:
            print(f"{f.path}: {c.signature} {c.pattern.value}", file=out)
        for a in f.attacks:
            line = (f"{f.path}: {a.contract}.{a.function} {a.static_pattern.value} {a.verdict}"
                    f" depth={a.max_reentry_depth} extracted={a.ether_extracted} entitled={a.entitled}")
            if a.reason:
                line += f" ({a.reason})"
            print(line, file=out)
    counts = report.summary
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=out)


def cmd_analyze(args, out) -> int:
    _check_files(args.files)
    report = analyze_pipeline(args.files, _options(args, static_only=False))
    if args.emit_attacker:
        for f in report.files:
            if f.failed:
                continue
            unit = parse(Path(f.path).read_text())
            for cand in f.candidates:
                if cand.attackable:
                    _write_attacker(unit, cand.contract, cand.function, args, Path(args.emit_attacker))
    if args.json:
        out.write(report.to_json() + "\n")
    else:
        _print_report(report, out)
    return report.exit_code()


def cmd_scan(args, out) -> int:
    _check_files(args.files)
    report = analyze_pipeline(args.files, _options(args, static_only=True))
    if args.json:
        out.write(report.to_json() + "\n")
    else:
        out.write(emit_signatures(report.candidates))
        for f in report.files:
            if f.failed:
                print(f"{f.path}: AnalysisFailed: {f.error}", file=sys.stderr)
    return EXIT_ALL_FAILED if report.files and all(f.failed for f in report.files) else EXIT_OK


def _write_attacker(unit, contract: str, function: str, args, out_dir: Path) -> Path:
    candidates = [c for c in find_candidates(unit) if c.contract == contract and c.function == function]
    abi = extract_abi(unit, contract)
    if candidates:
        plan = make_plan(unit, candidates[0], args.max_reentry, args.funding, args.seed_victim)
    else:
        # an unflagged function can still be given an attacker for manual review
        from .orchestrator import auto_funding
        from .synth import AttackPlan, default_args

        funding = auto_funding(unit, contract, args.seed_victim) if args.funding == "auto" else args.funding
        plan = AttackPlan(contract, function, default_args(abi, function), args.max_reentry, funding)
    attacker = synthesize_attacker(abi, plan)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{attacker_name(plan)}.sol"
    path.write_text(render_attacker(attacker))
    return path


def cmd_emit_attacker(args, out) -> int:
    _check_files([args.file])
    unit = parse(Path(args.file).read_text())
    contract = args.contract
    if contract is None:
        owners = [c.name for c in unit.contracts if c.function(args.function) is not None]
        if len(owners) != 1:
            raise UsageError(f"cannot tell which contract defines {args.function}; use --contract")
        contract = owners[0]
    path = _write_attacker(unit, contract, args.function, args, Path(args.out))
    if args.json:
        out.write(json.dumps({"attacker": str(path)}) + "\n")
    else:
        print(path, file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# transaction scripts


class Script:
    """Interpreter for the line-oriented simulator script.

    ``deploy ALIAS FROM FILE CONTRACT [value=W] [gas=G] [args=a,b]``
    ``send FROM TO [value=W] [gas=G] [fn=NAME] [args=a,b]``
    ``balance WHO``

    Accounts may be written as addresses or as aliases bound by ``deploy``.
    """

    def __init__(self, world: chain.WorldState, base: Path, out, trace_dir: Optional[str]):
        self.world = world
        self.base = base
        self.out = out
        self.trace_dir = Path(trace_dir) if trace_dir else None
        self.aliases: dict[str, str] = {}
        self.tx_count = 0

    def address(self, token: str) -> str:
        if token in self.aliases:
            return self.aliases[token]
        try:
            return chain.to_address(token)
        except ValueError:
            raise UsageError(f"unknown account {token!r}") from None

    def value(self, token: str):
        if token in ("true", "false"):
            return token == "true"
        if token in self.aliases or (token.startswith("0x") and len(token) == 42):
            return self.address(token)
        try:
            return int(token, 0)
        except ValueError:
            raise UsageError(f"bad argument {token!r}") from None

    def options(self, tokens: list[str]) -> dict:
        opts = {}
        for tok in tokens:
            key, sep, val = tok.partition("=")
            if not sep or key not in ("value", "gas", "fn", "args"):
                raise UsageError(f"bad option {tok!r}")
            opts[key] = val
        return opts

    def _record(self, result: chain.ExecutionResult) -> None:
        self.tx_count += 1
        if self.trace_dir is not None:
            self.trace_dir.mkdir(parents=True, exist_ok=True)
            (self.trace_dir / f"tx{self.tx_count:04d}.trace.jsonl").write_text(chain.export_trace(result.trace))

    def run_line(self, line: str) -> None:
        words = shlex.split(line, comments=True)
        if not words:
            return
        cmd, rest = words[0], words[1:]
        if cmd == "deploy":
            if len(rest) < 4:
                raise UsageError("deploy ALIAS FROM FILE CONTRACT [options]")
            alias, sender, file, contract = rest[:4]
            opts = self.options(rest[4:])
            unit = parse((self.base / file).read_text())
            args = [self.value(a) for a in opts["args"].split(",")] if opts.get("args") else []
            address, result = chain.deploy(
                self.world, self.address(sender), unit, contract, args,
                int(opts.get("value", "0"), 0), int(opts.get("gas", str(chain.DEFAULT_TX_GAS)), 0),
            )
            self._record(result)
            if result.success:
                self.aliases[alias] = address
            print(f"deploy {alias} {address} {result.status.value}"
                  + (f" {result.reason}" if result.reason else ""), file=self.out)
        elif cmd == "send":
            if len(rest) < 2:
                raise UsageError("send FROM TO [options]")
            opts = self.options(rest[2:])
            args = [self.value(a) for a in opts["args"].split(",")] if opts.get("args") else []
            tx = chain.Transaction(
                self.address(rest[0]), self.address(rest[1]), int(opts.get("value", "0"), 0),
                int(opts.get("gas", str(chain.DEFAULT_TX_GAS)), 0), opts.get("fn") or None, args,
            )
            result = chain.send_transaction(self.world, tx)
            self._record(result)
            ret = "" if result.return_value is None else f" -> {result.return_value}"
            print(f"send {result.status.value} gasUsed={result.gas_used}{ret}"
                  + (f" {result.reason}" if result.reason else ""), file=self.out)
        elif cmd == "balance":
            if len(rest) != 1:
                raise UsageError("balance WHO")
            print(f"balance {rest[0]} {self.world.balance(self.address(rest[0]))}", file=self.out)
        else:
            raise UsageError(f"unknown script command {cmd!r}")


def cmd_simulate(args, out) -> int:
    _check_files([args.genesis, args.script])
    world = chain.genesis(chain.GenesisConfig.load(args.genesis), args.gas_model)
    script_path = Path(args.script)
    runner = Script(world, script_path.parent, out, args.trace_dir)
    for number, line in enumerate(script_path.read_text().splitlines(), 1):
        try:
            runner.run_line(line)
        except (UsageError, chain.ChainError, ValueError) as exc:
            raise UsageError(f"{script_path}:{number}: {exc}") from None
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "emit-attacker": cmd_emit_attacker,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
