"""Unit system: SI by default, with a dimensionless mode for property tests."""

from dataclasses import dataclass

HBAR_SI = 1.054571817e-34  # J s (CODATA 2018)
ELECTRON_MASS_SI = 9.1e-31  # kg, the rounded value used throughout the scenarios


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants entering the dynamics.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant (J s in SI mode, 1.0 in dimensionless mode).
    mass : float
        Particle mass (kg in SI mode, 1.0 in dimensionless mode).
    """

    hbar: float
    mass: float

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    @property
    def dimensionless(self) -> bool:
        return self.hbar == 1.0 and self.mass == 1.0

    @classmethod
    def si(cls, mass: float = ELECTRON_MASS_SI) -> "UnitSystem":
        return cls(hbar=HBAR_SI, mass=mass)

    @classmethod
    def natural(cls) -> "UnitSystem":
        """hbar = mass = 1 system used by the dimensionless test scenarios."""
        return cls(hbar=1.0, mass=1.0)
