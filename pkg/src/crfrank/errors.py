"""Exception hierarchy shared across the package."""


class CrfRankError(Exception):
    """Base class for all crfrank errors."""


class LetorParseError(CrfRankError):
    """Malformed line in a LETOR-format file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DimensionError(CrfRankError):
    """Feature dimensions disagree between inputs."""


class ContractError(CrfRankError):
    """A caller violated a documented precondition."""


class CapacityError(CrfRankError):
    """Requested permutation space exceeds the enumeration cap."""
