class VcselCovError(Exception):
    """Base class for package errors."""


class ConfigError(VcselCovError, ValueError):
    """Malformed or out-of-range configuration."""


class GeometryError(VcselCovError, ValueError):
    """Degenerate or infeasible geometry."""


class ContractError(VcselCovError, RuntimeError):
    """An API was called in a state that its contract forbids."""
