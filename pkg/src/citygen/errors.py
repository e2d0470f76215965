"""Exception types shared across pipeline stages."""


class ConfigError(Exception):
    """Invalid configuration (unknown building id, bad parameter, ...)."""


class IllegalPlacementError(ValueError):
    """A building footprint falls outside the allowed rectangle."""


class UnreachableError(RuntimeError):
    """No path exists between the requested endpoints."""


class GateError(RuntimeError):
    """A city edge has no legal cell to host its gate."""


class ExportError(RuntimeError):
    """Talking to the block-placement endpoint failed."""


class DimensionMismatchError(ExportError):
    """The remote build area cannot contain this world."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
