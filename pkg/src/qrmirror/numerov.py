"""Wavefunction-domain reflection oracle: Numerov integration of

    psi''(z) + (p(z)/hbar)^2 psi(z) = 0

with an incoming-wave boundary condition near the surface.  This is an
independent cross-check of the coupled-amplitude solver: same potential
table, entirely different formulation and integrator.

The complex wavefunction is seeded with the toward-surface WKB wave at the
near end (full absorption leaves no outgoing wave there), marched outward
on piecewise-uniform grids whose step doubles as the local de Broglie
wavelength grows, and projected onto the WKB basis at the far end.  Only
|r| is convention-free and compared against the amplitude solver.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import CONSTANTS
from .potential import PotentialTable

_M = CONSTANTS.mass_au
_GL16_X, _GL16_W = leggauss(16)


@dataclass
class NumerovResult:
    r_magnitude: float
    z_start: float
    z_end: float
    n_points: int


def _phase_between(table: PotentialTable, energy_au: float,
                   z1: float, z2: float, mass_au: float) -> float:
    """Integral of p(z) over [z1, z2] by 16-point Gauss-Legendre."""
    half = 0.5 * (z2 - z1)
    mid = 0.5 * (z2 + z1)
    z = mid + half * _GL16_X
    v = table.potential(z)
    p = np.sqrt(2.0 * mass_au * (energy_au - v))
    return float(half * np.sum(_GL16_W * p))


def numerov_reflection(table: PotentialTable, energy_au: float,
                       z_start: float, z_end: float,
                       points_per_wavelength: int = 100,
                       mass_au: float = _M) -> NumerovResult:
    """|r| from Numerov integration between the given WKB-exact endpoints."""
    if energy_au <= 0:
        raise ValueError(f"energy must be positive, got {energy_au}")
    if not table.z_min <= z_start < z_end <= table.z_max:
        raise ValueError("integration window outside the table")

    two_m = 2.0 * mass_au

    def wavevector(z):
        return np.sqrt(two_m * (energy_au - table.potential(z)))

    ppw = float(points_per_wavelength)
    k0 = float(wavevector(z_start))
    h = 2.0 * math.pi / (k0 * ppw)

    # WKB seed for the incoming wave at the two leading points
    k2 = float(wavevector(z_start + h))
    phi12 = _phase_between(table, energy_au, z_start, z_start + h, mass_au)
    psi_prev = (1.0 / math.sqrt(k0)) + 0.0j
    psi_last = (1.0 / math.sqrt(k2)) * cmath.exp(-1j * phi12)
    z_last = z_start + h
    total_points = 2
    psi_tail = None
    z_tail = None

    # piecewise-uniform grid, step doubling when the local wavelength allows;
    # each new segment re-uses two old points a spacing h_new = 2 h_old apart
    # (indices -3 and -1 of the previous chunk).
    while z_last < z_end:
        n_max = int(min(
            max(64, 4 * ppw),
            math.ceil((z_end - z_last) / h) + 1,
        ))
        z_nodes = z_last + h * np.arange(-1, n_max + 1)
        f = 1.0 + (h * h / 12.0) * (wavevector(z_nodes) ** 2)
        psi = np.empty(len(z_nodes), dtype=complex)
        psi[0] = psi_prev
        psi[1] = psi_last
        f_list = f.tolist()
        stop = len(z_nodes) - 1
        for i in range(1, stop):
            psi[i + 1] = ((12.0 - 10.0 * f_list[i]) * psi[i]
                          - f_list[i - 1] * psi[i - 1]) / f_list[i + 1]
        total_points += stop - 1
        z_last = float(z_nodes[-1])
        psi_prev, psi_last = complex(psi[-2]), complex(psi[-1])
        psi_tail = psi
        z_tail = z_nodes
        if z_last >= z_end:
            break
        if (2.0 * math.pi / (float(wavevector(z_last)) * h) >= 2.0 * ppw
                and len(z_nodes) >= 3):
            psi_prev = complex(psi[-3])
            h *= 2.0
    if psi_tail is None:
        raise ValueError("integration window shorter than one step")

    # project the last stretch onto the WKB basis; pick a second matching
    # point a quarter wavelength back so the 2x2 system is well conditioned
    k_end = float(wavevector(z_last))
    quarter = max(1, int(round(0.25 * 2.0 * math.pi / (k_end * h))))
    j2 = len(z_tail) - 1
    j1 = max(0, j2 - quarter)
    za, zb = float(z_tail[j1]), float(z_tail[j2])
    ka, kb = float(wavevector(za)), float(wavevector(zb))
    dphi = _phase_between(table, energy_au, za, zb, mass_au)
    # psi = c+ e^{i phi}/sqrt(k) + c- e^{-i phi}/sqrt(k), phi(za) = 0
    m11 = 1.0 / math.sqrt(ka)
    m12 = 1.0 / math.sqrt(ka)
    m21 = cmath.exp(1j * dphi) / math.sqrt(kb)
    m22 = cmath.exp(-1j * dphi) / math.sqrt(kb)
    det = m11 * m22 - m12 * m21
    psi_a = psi_tail[j1]
    psi_b = psi_tail[j2]
    c_plus = (m22 * psi_a - m12 * psi_b) / det
    c_minus = (-m21 * psi_a + m11 * psi_b) / det
    return NumerovResult(r_magnitude=abs(c_plus / c_minus),
                         z_start=z_start, z_end=z_last,
                         n_points=total_points)
