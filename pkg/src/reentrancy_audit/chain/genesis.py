"""Genesis configuration in the geth ``CustomGenesis.json`` layout."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .state import DuplicateAllocAddress, WorldState, to_address

log = logging.getLogger(__name__)

KNOWN_TOP_LEVEL = {"config", "alloc", "difficulty", "gasLimit", "nonce"}
KNOWN_CONFIG = {"chainID", "chainId", "homesteadBlock", "eip150Block", "eip155Block", "eip158Block"}


def _int(value) -> int:
    if isinstance(value, int):
        return value
    text = str(value).strip()
    return int(text, 16) if text.lower().startswith("0x") else int(text)


@dataclass
class GenesisConfig:
    chain_id: int = 1
    difficulty: int = 0x4000
    gas_limit: int = 0xFFFFFFFF
    alloc: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.gas_limit <= 0:
            raise ValueError("gasLimit must be positive")
        for _, balance in self.alloc:
            if balance < 0:
                raise ValueError("negative allocation")

    @classmethod
    def from_dict(cls, data: dict) -> "GenesisConfig":
        for key in data:
            if key not in KNOWN_TOP_LEVEL:
                log.warning("genesis: ignoring unknown field %r", key)
        config = data.get("config", {})
        for key in config:
            if key not in KNOWN_CONFIG:
                log.warning("genesis: ignoring unknown config field %r", key)
        chain_id = _int(config.get("chainID", config.get("chainId", 1)))
        alloc = []
        for address, entry in data.get("alloc", {}).items():
            balance = entry.get("balance", 0) if isinstance(entry, dict) else entry
            alloc.append((to_address(address), _int(balance)))
        # the top-level "nonce" is accepted and has no effect
        return cls(
            chain_id=chain_id,
            difficulty=_int(data.get("difficulty", 0)),
            gas_limit=_int(data.get("gasLimit", 0xFFFFFFFF)),
            alloc=alloc,
        )

    @classmethod
    def from_json(cls, text: str) -> "GenesisConfig":
        # geth tolerates the trailing comma that appears in hand-written files
        cleaned = re.sub(r",(\s*[}\]])", r"\1", text)
        return cls.from_dict(json.loads(cleaned))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GenesisConfig":
        return cls.from_json(Path(path).read_text())


def genesis(config: GenesisConfig, gas_model: str = "faithful") -> WorldState:
    world = WorldState(config.chain_id, config.gas_limit, gas_model)
    for address, balance in config.alloc:
        if address in world:
            raise DuplicateAllocAddress(address)
        world.create_account(address, balance)
    return world
