"""Static-plus-dynamic reentrancy auditing for a Solidity subset."""
__version__ = "0.1.0"
