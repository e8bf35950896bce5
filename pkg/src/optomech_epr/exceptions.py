"""Exception hierarchy.

Physics errors (instability, resonant operators, non-physical states) derive
from :class:`PhysicsError`; the CLI maps them to exit code 3. Configuration
problems raise :class:`ConfigError` (exit code 2).
"""


class PhysicsError(Exception):
    """Base class for failures that come from the physics, not the input format."""


class UnstableSystemError(PhysicsError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class ResonantOperatorError(PhysicsError):
    """The shifted Lyapunov operator is (numerically) singular."""


class ResonantPoleError(PhysicsError):
    """A shifted resolvent ``r I - A +/- i eps I`` of a reservoir kernel is singular."""

    def __init__(self, message, shift=None):
        super().__init__(message)
        self.shift = shift


class CriterionNotApplicableError(PhysicsError):
    """The Routh-Hurwitz shortcut is only valid for a positive cavity detuning."""


class EigenSolverError(PhysicsError):
    """The dense eigensolver did not converge."""


class NonPhysicalStateError(PhysicsError):
    """A covariance matrix violates the uncertainty principle beyond tolerance."""


class NoFeasiblePointError(PhysicsError):
    """The optimizer never visited a stable, valid parameter point."""


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
