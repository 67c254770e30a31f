"""Physical constants (CODATA 2018) and the unit systems used throughout."""

from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 2.99792458e8  # m / s


@dataclass(frozen=True)
class UnitSystem:
    name: str
    hbar: float
    k_b: float
    c: float

    def as_dict(self):
        return {"name": self.name, "hbar": self.hbar, "k_b": self.k_b, "c": self.c}


SI = UnitSystem("SI", HBAR, K_B, C_LIGHT)
NATURAL = UnitSystem("natural", 1.0, 1.0, 1.0)
