"""Physical constants, the internal unit system, and unit conversions.

All physics modules compute in Hartree atomic units (hbar = m_e = e = 1,
c = 1/alpha).  Externally visible quantities are emitted both in atomic
units and in the neV/nm system convenient for cold-atom work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Electron mass and elementary charge (SI), used only to tie the atomic
# unit system to the laboratory one.
_ELECTRON_MASS_KG = 9.1093837015e-31
_ELEMENTARY_CHARGE_C = 1.602176634e-19


class UnitError(ValueError):
    """Raised for dimensionally incompatible unit conversions."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants shared by every module.

    ``mg`` is pinned to the printed weight-per-height constant 102.5 neV/m
    rather than recomputed from ``m * g``; the two agree to 0.1%.
    """

    hbar: float = 1.054571817e-34          # J s
    c: float = 299792458.0                 # m/s
    m: float = 1.6735e-27                  # kg, (anti)hydrogen atom mass
    g: float = 9.806                       # m/s^2
    mg: float = 102.5                      # neV/m, pinned
    hartree: float = 4.3597e-18            # J
    bohr: float = 52.917e-12               # m
    fine_structure: float = 7.2973525693e-3

    @property
    def c_au(self) -> float:
        """Speed of light in atomic units (= 1/alpha = 137.036)."""
        return 1.0 / self.fine_structure

    @property
    def mass_au(self) -> float:
        """Atom mass in units of the electron mass."""
        return self.m / _ELECTRON_MASS_KG

    @property
    def hartree_eV(self) -> float:
        return self.hartree / _ELEMENTARY_CHARGE_C

    @property
    def hartree_neV(self) -> float:
        return self.hartree_eV * 1e9

    @property
    def bohr_nm(self) -> float:
        return self.bohr * 1e9

    @property
    def mg_computed_neV_per_m(self) -> float:
        """m*g from the stored mass and g, for cross-checking ``mg``."""
        return self.m * self.g / _ELEMENTARY_CHARGE_C * 1e9

    def energy_au_from_height(self, h_m: float) -> float:
        """Kinetic energy (Hartree) gained in a free fall from height h (m)."""
        if h_m < 0:
            raise ValueError(f"height must be non-negative, got {h_m}")
        return self.mg * h_m / self.hartree_neV


CONSTANTS = PhysicalConstants()


class Unit(Enum):
    """Unit tags used by this artifact; not a general units library."""

    BOHR = "a0"
    NANOMETER = "nm"
    METER = "m"
    HARTREE = "Eh"
    NEV = "neV"
    C3_AU = "Eh*a0^3"
    C3_NEV_NM3 = "neV*nm^3"
    C4_AU = "Eh*a0^4"
    C4_NEV_NM4 = "neV*nm^4"
    C5_AU = "Eh*a0^5"
    C5_NEV_NM5 = "neV*nm^5"


# dimension name and exact factor to the dimension's base unit
# (base units: a0 for length, Eh for energy, Eh*a0^n for C_n).
_BOHR_NM = CONSTANTS.bohr_nm
_EH_NEV = CONSTANTS.hartree_neV

_UNIT_TABLE: dict[Unit, tuple[str, float]] = {
    Unit.BOHR: ("length", 1.0),
    Unit.NANOMETER: ("length", 1.0 / _BOHR_NM),
    Unit.METER: ("length", 1e9 / _BOHR_NM),
    Unit.HARTREE: ("energy", 1.0),
    Unit.NEV: ("energy", 1.0 / _EH_NEV),
    Unit.C3_AU: ("C3", 1.0),
    Unit.C3_NEV_NM3: ("C3", 1.0 / (_EH_NEV * _BOHR_NM**3)),
    Unit.C4_AU: ("C4", 1.0),
    Unit.C4_NEV_NM4: ("C4", 1.0 / (_EH_NEV * _BOHR_NM**4)),
    Unit.C5_AU: ("C5", 1.0),
    Unit.C5_NEV_NM5: ("C5", 1.0 / (_EH_NEV * _BOHR_NM**5)),
}


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: Unit

    def to(self, target: Unit) -> "Quantity":
        return convert(self, target)


def convert(q: Quantity, target: Unit) -> Quantity:
    """Convert ``q`` to ``target``; exact constant products, bijective."""
    dim_src, f_src = _UNIT_TABLE[q.unit]
    dim_dst, f_dst = _UNIT_TABLE[target]
    if dim_src != dim_dst:
        raise UnitError(
            f"cannot convert {q.unit.value} ({dim_src}) to "
            f"{target.value} ({dim_dst})"
        )
    return Quantity(q.value * f_src / f_dst, target)


def energy_from_height(h_m: float) -> Quantity:
    """Free-fall kinetic energy mg*h in neV, using the pinned mg constant."""
    if h_m < 0:
        raise ValueError(f"height must be non-negative, got {h_m}")
    return Quantity(CONSTANTS.mg * h_m, Unit.NEV)


def wavevector_au(energy_au: float, mass_au: float | None = None) -> float:
    """Asymptotic wavevector k = sqrt(2 m E) / hbar in atomic units."""
    if energy_au <= 0:
        raise ValueError(f"energy must be positive, got {energy_au}")
    m = CONSTANTS.mass_au if mass_au is None else mass_au
    return math.sqrt(2.0 * m * energy_au)
