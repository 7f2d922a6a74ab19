"""Exception types shared across the package."""


class GridFreqError(Exception):
    """Base class for all package-specific errors."""


class ScenarioError(GridFreqError):
    """Invalid scenario specification or scenario file."""


class ConfigError(GridFreqError):
    """Invalid estimator configuration."""


class DivergenceError(GridFreqError):
    """The estimator state has diverged; further stepping is rejected."""


class AlignmentError(GridFreqError):
    """Estimate and truth series do not overlap after latency shifting."""
