from .abi import AbiEntry, AbiSpec, extract_abi
from .parser import check_version, parse
from .printer import render

__all__ = ["AbiEntry", "AbiSpec", "check_version", "extract_abi", "parse", "render"]
