"""Exception types shared across the package."""


class WeaktrajError(Exception):
    """Base class for all package errors."""


class DegenerateTimeError(WeaktrajError):
    """Propagation requested over a non-positive time interval."""


class EmptyStateError(WeaktrajError):
    """A state specification has no components."""


class VanishingOverlapError(WeaktrajError):
    """Post-selection amplitude too small for a meaningful weak value."""


class ProfileError(WeaktrajError):
    """Invalid interaction-profile parameters."""


class FirstOrderGuardError(WeaktrajError):
    """A probe coupling is too strong for the first-order pointer model."""


class ContrastRangeError(WeaktrajError):
    """A contrast outside [-1, 1] was passed to an inversion routine."""


class BranchGuardError(WeaktrajError):
    """A recovered rotation falls outside the unambiguous arccos branch."""


class ScenarioError(WeaktrajError):
    """Scenario file could not be parsed or validated."""
