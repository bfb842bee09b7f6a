"""Error types mapped to CLI exit codes (see cli module)."""


class ModemLabError(Exception):
    """Base class for modemlab-specific failures."""


class ConfigError(ModemLabError):
    """Invalid or inconsistent run configuration (exit code 2)."""


class CapacityError(ModemLabError):
    """Requested object exceeds the configured memory cap (exit code 3)."""


class DivergenceError(ModemLabError):
    """Training produced a non-finite loss (exit code 4)."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite loss at training step {step}")
