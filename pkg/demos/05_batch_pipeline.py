"""
Auditing a batch of contracts
=============================

The pipeline parses every file, scans it, and attacks each candidate in a
fresh chain.  A file outside the supported subset is reported as failed
without stopping the rest of the batch.
"""

import json
import tempfile

from reentrancy_audit import chain, fixtures
from reentrancy_audit.orchestrator import PipelineOptions, analyze_pipeline

files = fixtures.corpus_paths() + [fixtures.path("Globalcryptox_full")]

with tempfile.TemporaryDirectory() as traces:
    for model in chain.GAS_MODELS:
        report = analyze_pipeline(files, PipelineOptions(gas_model=model, trace_dir=traces))
        print(model, report.summary, "exit code", report.exit_code())
        for a in report.attacks:
            print(f"  {a.contract}.{a.function} [{a.static_pattern.value}] {a.verdict}"
                  f" depth={a.max_reentry_depth} gain={a.ether_extracted}")

# the machine-readable form has a stable key order
print(json.dumps(report.to_dict()["files"][0], indent=2)[:800])
