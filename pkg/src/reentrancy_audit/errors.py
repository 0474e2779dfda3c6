class AuditError(Exception):
    """Base class for every error raised by this package."""


class FrontendError(AuditError):
    pass


class ParseError(FrontendError):
    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found!r}")


class UnsupportedConstruct(FrontendError):
    def __init__(self, construct: str, position: tuple[int, int]):
        self.construct = construct
        self.position = position
        super().__init__(
            f"{position[0]}:{position[1]}: unsupported construct: {construct}"
        )


class UnsupportedVersion(FrontendError):
    def __init__(self, pragma: str):
        self.pragma = pragma
        super().__init__(f"unsupported compiler version range: {pragma!r}")


class UnknownContract(AuditError):
    pass


class SynthesisError(AuditError):
    pass


class NonAttackableTarget(SynthesisError):
    pass


class ArityMismatch(SynthesisError):
    pass
