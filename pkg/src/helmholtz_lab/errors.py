"""Shared exception types.

Preconditions carry the name of the violated hypothesis so callers (and the
CLI) can surface exactly which assumption failed rather than a generic message.
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DataError(ValueError):
    """Computed data cannot support the requested reduction (e.g. a log fit
    over non-positive values)."""


class PreconditionError(ValueError):
    """A named hypothesis of a theorem-shaped check does not hold.

    The ``hypothesis`` attribute is a short machine-readable name such as
    ``"q_ordering"`` or ``"initial_data"``.
    """

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        message = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(message)


class IntegrationError(RuntimeError):
    """The ODE integrator or quadrature failed to converge; the message
    carries diagnostics (position, step size, tolerance)."""
