"""Physical constants (CODATA 2018, SI units).

Every public interface of the package takes SI quantities; internally the
engine works in natural units where hbar = 1 and energies are angular
frequencies in rad/s. The conversion happens once, at the boundary, using
the values collected here. The default table can be overridden through
:class:`PhysicalConstants` for reproducibility experiments, but the values
are immutable for the duration of a run.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI units.

    Attributes
    ----------
    G : float
        Newtonian gravitational constant [m^3 kg^-1 s^-2].
    c : float
        Speed of light in vacuum [m/s] (exact).
    hbar : float
        Reduced Planck constant [J s].
    k_B : float
        Boltzmann constant [J/K] (exact).
    """

    G: float = 6.67430e-11
    c: float = 299792458.0
    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0.0:
                raise ValueError(f"constant {f.name} must be strictly positive, got {value!r}")


CODATA2018 = PhysicalConstants()
