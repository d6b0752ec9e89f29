"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, BlowUpError -> 3,
everything else that escapes -> 1.
"""


class NlsAnsatzError(Exception):
    """Base class for all toolkit errors."""


class PoleProximityError(NlsAnsatzError):
    """A finite-difference stencil would touch a declared singular surface."""


class EmptySampleError(NlsAnsatzError):
    """Every grid point was excluded by the singular-surface guard."""


class DegenerateSampleError(NlsAnsatzError):
    """Fit samples do not span the basis (e.g. all omega values equal)."""


class DomainError(NlsAnsatzError):
    """Evaluation requested outside a handle's valid domain."""


class DomainSplitError(DomainError):
    """A fractional-power base crosses zero inside the requested interval."""

    def __init__(self, message, zeros=()):
        super().__init__(message)
        self.zeros = tuple(zeros)


class BlowUpError(NlsAnsatzError):
    """Numerical integration left the finite range."""

    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class CertificationError(NlsAnsatzError):
    """A closed-form object failed its own residual certificate."""


class ConfigError(NlsAnsatzError):
    """Bad CLI/JSON configuration."""
