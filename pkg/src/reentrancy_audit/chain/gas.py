from dataclasses import dataclass

FAITHFUL = "faithful"
PAPER = "paper"
GAS_MODELS = (FAITHFUL, PAPER)


@dataclass(frozen=True)
class GasTable:
    """Minimal cost schedule.

    Only the ratios matter: a storage write must cost more than the 2300-gas
    stipend so that ``transfer``/``send`` recipients cannot update storage.
    Account balance lookups are charged as storage reads.
    """

    statement: int = 10
    call_base: int = 700
    sstore: int = 5000
    sload: int = 200
    value_transfer: int = 9000
    stipend: int = 2300
    call_retention: int = 2300


DEFAULT_GAS = GasTable()
MAX_DEPTH = 1024


class OutOfGas(Exception):
    pass


class GasMeter:
    __slots__ = ("limit", "remaining")

    def __init__(self, limit: int):
        self.limit = limit
        self.remaining = limit

    def charge(self, amount: int) -> None:
        if amount > self.remaining:
            self.remaining = 0
            raise OutOfGas()
        self.remaining -= amount

    @property
    def used(self) -> int:
        return self.limit - self.remaining
