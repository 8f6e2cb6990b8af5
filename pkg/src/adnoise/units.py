"""Physical constants (CODATA 2018) and unit conversions.

Every physics module computes in SI internally; units are converted only
at input/output boundaries.  Kelvin and hertz equivalents are treated as
first-class energy units (E = k_B*T and E = h*nu respectively) because
surface-physics parameter sets freely mix meV, K and THz.
"""

import math
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float                 # J s
    boltzmann: float            # J/K
    elementary_charge: float    # C
    vacuum_permittivity: float  # F/m
    bohr_radius: float          # m
    atomic_mass_unit: float     # kg
    debye: float                # C m


CODATA = PhysicalConstants(
    hbar=1.054571817e-34,
    boltzmann=1.380649e-23,
    elementary_charge=1.602176634e-19,
    vacuum_permittivity=8.8541878128e-12,
    bohr_radius=5.29177210903e-11,
    atomic_mass_unit=1.66053906660e-27,
    debye=3.33564e-30,
)

HBAR = CODATA.hbar
KB = CODATA.boltzmann
E_CHARGE = CODATA.elementary_charge
EPS0 = CODATA.vacuum_permittivity
BOHR = CODATA.bohr_radius
AMU = CODATA.atomic_mass_unit
DEBYE = CODATA.debye
PLANCK = 2.0 * math.pi * HBAR


def _startup_check():
    for name, value in vars(CODATA).items():
        if value <= 0:
            raise ConfigurationError(f"constant {name} must be positive")
    ea0 = E_CHARGE * BOHR / DEBYE
    if abs(ea0 - 2.5417) > 1e-3 * 2.5417:
        raise ConfigurationError(
            f"inconsistent constants: e*a0/debye = {ea0:.6f}, expected ~2.5417")
    if abs(DEBYE - 3.33564e-30) > 1e-6 * DEBYE:
        raise ConfigurationError("debye constant does not match 3.33564e-30 C m")


_startup_check()

# Conversion factors to the SI base of each quantity.  Pure data; the
# alias table maps spelling variants onto canonical tags.
ENERGY_TO_J = {
    "J": 1.0,
    "eV": E_CHARGE,
    "meV": 1e-3 * E_CHARGE,
    "K": KB,
    "Hz": PLANCK,
}

LENGTH_TO_M = {
    "m": 1.0,
    "angstrom": 1e-10,
    "a0": BOHR,
    "um": 1e-6,
}

DIPOLE_TO_CM = {
    "C*m": 1.0,
    "D": DEBYE,
    "e*a0": E_CHARGE * BOHR,
}

_ALIASES = {
    "joule": "J",
    "ev": "eV",
    "mev": "meV",
    "kelvin": "K",
    "hz": "Hz",
    "A": "angstrom",
    "Å": "angstrom",
    "Angstrom": "angstrom",
    "bohr": "a0",
    "μm": "um",
    "micron": "um",
    "Cm": "C*m",
    "debye": "D",
    "Debye": "D",
    "ea0": "e*a0",
    "e a0": "e*a0",
}


def _factor(table, unit, quantity):
    tag = _ALIASES.get(unit, unit)
    try:
        return table[tag]
    except KeyError:
        raise ConfigurationError(
            f"unknown {quantity} unit {unit!r}; known: {sorted(table)}") from None


def convert_energy(value, from_unit, to_unit):
    """Convert between J, eV, meV, kelvin-equivalent and hertz-equivalent."""
    return value * _factor(ENERGY_TO_J, from_unit, "energy") \
        / _factor(ENERGY_TO_J, to_unit, "energy")


def convert_length(value, from_unit, to_unit):
    """Convert between m, angstrom, a0 (Bohr radii) and um."""
    return value * _factor(LENGTH_TO_M, from_unit, "length") \
        / _factor(LENGTH_TO_M, to_unit, "length")


def convert_dipole(value, from_unit, to_unit):
    """Convert between C*m, D (debye) and e*a0 (atomic units)."""
    return value * _factor(DIPOLE_TO_CM, from_unit, "dipole") \
        / _factor(DIPOLE_TO_CM, to_unit, "dipole")
