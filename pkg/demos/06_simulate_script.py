"""
Replaying a transaction script
==============================

``reentrancy-audit simulate`` starts a chain from a geth-style genesis file
and replays a line-oriented script of ``deploy``, ``send`` and ``balance``
commands.  The same entry point is available from Python.
"""

from pathlib import Path

from reentrancy_audit.cli import main

data = Path(__file__).parent / "data"
print((data / "drain.tx").read_text())
main(["simulate", "--genesis", str(data / "genesis.json"), "--script", str(data / "drain.tx")])
