"""Quantum reflection on a tabulated Casimir-Polder potential.

The vertical Schrodinger equation is rewritten in the basis of WKB waves
exp(+i phi)/sqrt(p) (moving away from the mirror) and exp(-i phi)/sqrt(p)
(falling toward it), with phi' = p/hbar and p = sqrt(2m(E - V)).  The
amplitudes obey coupled first-order equations

    c+' = e^{-2i phi} (p'/2p) c-          c-' = e^{+2i phi} (p'/2p) c+

whose exchange term is what quantum reflection is.  Annihilation on contact
imposes full absorption at the surface, c+(z -> 0) = 0, and the reflection
amplitude is r = c+/c- far from the mirror.  |c-|^2 - |c+|^2 is an exact
invariant of the equations and is used as the primary step-control check.

The WKB waves are exact wherever the badlands function

    Q = hbar^2 [ p''/p - (3/2)(p'/p)^2 ] / (2 p^2)

vanishes; integration starts and stops where |Q| is below a tolerance
(default 1e-8), which for CP potentials happens both near the surface and
far away.  Attractive potentials have no classical turning point, so no
tunneling machinery is needed; the gravity field itself is not part of the
solver potential (E is the fixed incident energy from the free fall).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS
from .potential import PotentialTable

_M = CONSTANTS.mass_au


class SolveError(RuntimeError):
    """Raised when an amplitude integration cannot be completed/accepted."""


def local_momentum(energy_au: float, potential_au, mass_au: float = _M):
    """Semiclassical momentum p = sqrt(2m(E - V)) in atomic units.

    E > 0 and V <= 0 (attractive), so p > sqrt(2mE) everywhere.
    """
    if energy_au <= 0:
        raise ValueError(f"energy must be positive, got {energy_au}")
    v = np.asarray(potential_au, dtype=float)
    if np.any(v > 0):
        raise ValueError("potential must be attractive (V <= 0)")
    p = np.sqrt(2.0 * mass_au * (energy_au - v))
    return p if p.ndim else float(p)


# ---------------------------------------------------------------------------
# badlands function


@dataclass
class BadlandsProfile:
    z: np.ndarray
    q: np.ndarray
    peak_z: float
    peak_q: float
    energy_au: float


def badlands_q(table: PotentialTable, energy_au: float, z_au,
               mass_au: float = _M):
    """Q(z) evaluated from analytic derivatives of the table interpolant."""
    if energy_au <= 0:
        raise ValueError(f"energy must be positive, got {energy_au}")
    z = np.asarray(z_au, dtype=float)
    v, vp, vpp = table.derivatives(z)
    p_sq = 2.0 * mass_au * (energy_au - v)
    p = np.sqrt(p_sq)
    dp = -mass_au * vp / p
    d2p = -mass_au * vpp / p - mass_au**2 * vp * vp / (p * p_sq)
    schwarzian = d2p / p - 1.5 * (dp / p) ** 2
    q = schwarzian / (2.0 * p_sq)
    return q if q.ndim else float(q)


def badlands_profile(table: PotentialTable, energy_au: float,
                     mass_au: float = _M) -> BadlandsProfile:
    """Q sampled on the table grid, with its peak location and height."""
    q = badlands_q(table, energy_au, table.z, mass_au)
    i = int(np.argmax(np.abs(q)))
    return BadlandsProfile(z=table.z.copy(), q=q, peak_z=float(table.z[i]),
                           peak_q=float(q[i]), energy_au=energy_au)


# ---------------------------------------------------------------------------
# amplitude-equation solver


@dataclass(frozen=True)
class SolveOptions:
    edge_tol: float = 1e-8        # |Q| defining the WKB-exact endpoints
    r_tol: float = 1e-4           # r convergence over the last decade of z
    rk_rtol: float = 1e-7
    rk_atol: float = 1e-10
    flux_tol: float = 1e-6        # allowed drift of |c-|^2 - |c+|^2
    phase_step_frac: float = 0.5  # max step as fraction of pi hbar / p
    z_step_frac: float = 0.2      # max step as fraction of z
    z_start: float | None = None  # override the Q-selected start
    z_end_min: float | None = None
    phase_origin: float = 0.0     # phi at z_start; |r| must not depend on it
    max_steps: int = 5_000_000


@dataclass
class ReflectionResult:
    r: complex                    # phase referenced to z0 = z_end
    probability: float            # |r|^2
    loss: float                   # 1 - |r|^2
    energy_au: float
    z_start: float
    z_end: float
    flux_drift: float
    steps: int
    rejected: int

    @property
    def energy_neV(self) -> float:
        return self.energy_au * CONSTANTS.hartree_neV


def _wkb_bounds(table: PotentialTable, energy_au: float, opts: SolveOptions,
                mass_au: float) -> tuple[float, float]:
    """Endpoints where WKB is exact: |Q| below edge_tol on both flanks.

    Uses prefix/suffix running maxima of |Q| so an accidental zero crossing
    inside the badlands cannot be mistaken for the WKB-exact region.
    """
    q = np.abs(badlands_q(table, energy_au, table.z, mass_au))
    i_peak = int(np.argmax(q))
    prefix_ok = np.maximum.accumulate(q) <= opts.edge_tol
    start_candidates = np.nonzero(prefix_ok[: i_peak + 1])[0]
    if start_candidates.size == 0:
        raise SolveError(
            f"no WKB-exact region below the badlands peak: |Q| >= "
            f"{q[0]:.2e} at the near edge of the table (need {opts.edge_tol:g})"
        )
    suffix_ok = (np.maximum.accumulate(q[::-1]) <= opts.edge_tol)[::-1]
    end_candidates = np.nonzero(suffix_ok)[0]
    end_candidates = end_candidates[end_candidates > i_peak]
    if end_candidates.size == 0:
        raise SolveError(
            f"no WKB-exact region beyond the badlands peak: |Q| >= "
            f"{q[-1]:.2e} at the far edge of the table (need {opts.edge_tol:g})"
        )
    return float(table.z[start_candidates[-1]]), float(table.z[end_candidates[0]])


# Cash-Karp embedded 5(4) pair.
_CK_C2, _CK_C3, _CK_C4, _CK_C5, _CK_C6 = 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8
_CK_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
_CK_B5 = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)
_CK_B4 = (2825 / 27648, 0.0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4)
_CK_ERR = tuple(b5 - b4 for b5, b4 in zip(_CK_B5, _CK_B4))

_CHECKPOINT_RATIO = 10.0 ** 0.125


def solve_reflection(table: PotentialTable, energy_au: float,
                     opts: SolveOptions | None = None,
                     mass_au: float = _M) -> ReflectionResult:
    """Integrate the coupled amplitude equations outward and return r.

    Starts from the near-surface WKB-exact point in the absorbing state
    (purely incoming flux, the finite-z form of c+(0) = 0; see the launch
    comment below), advances phi by the same embedded quadrature as the
    amplitudes, and stops once |Q| < edge_tol and r has stopped changing
    (relative change below r_tol across the trailing decade of z).
    """
    opts = opts or SolveOptions()
    if energy_au <= 0:
        raise ValueError(f"energy must be positive, got {energy_au}")
    if table.is_null:
        return ReflectionResult(r=0.0j, probability=0.0, loss=1.0,
                                energy_au=energy_au, z_start=table.z_min,
                                z_end=table.z_max, flux_drift=0.0,
                                steps=0, rejected=0)

    z_start, z_end_min = _wkb_bounds(table, energy_au, opts, mass_au)
    if opts.z_start is not None:
        if not table.z_min <= opts.z_start < table.z_max:
            raise SolveError(f"z_start override {opts.z_start:g} outside table")
        z_start = opts.z_start
    if opts.z_end_min is not None:
        z_end_min = opts.z_end_min
    z_hard_end = table.z_max

    two_m = 2.0 * mass_au
    deriv = table.derivatives_scalar

    def rhs(z: float, cp: complex, cm: complex, phi: float):
        v, vp, _ = deriv(z)
        p = math.sqrt(two_m * (energy_au - v))
        g = -mass_au * vp / (2.0 * p * p)
        e = cmath.exp(-2j * phi)
        return g * e * cm, g * e.conjugate() * cp, p

    # Launch state: the exact absorbing solution where Q = 0 is the primitive
    # incoming WKB wave e^{-i phi}/sqrt(p).  Projected onto the amplitude
    # gauge (psi' = i p (c+ e^{i phi} - c- e^{-i phi})/(hbar sqrt(p))) it is
    # not c+ = 0 but c+ = (i beta/2) e^{-2i phi} c-, with beta = hbar p'/2p^2;
    # c+ -> 0 as z_start -> 0, recovering full absorption at the surface.
    # The residual launch error is O(Q(z_start)) ~ edge_tol.
    phi = opts.phase_origin
    z = z_start
    v0, vp0, _ = deriv(z)
    p0 = math.sqrt(two_m * (energy_au - v0))
    beta0 = -mass_au * vp0 / (2.0 * p0**3)
    cp = 0.5j * beta0 * cmath.exp(-2j * phi)
    cm = 1.0 - 0.5j * beta0

    def max_step(zc: float, pc: float) -> float:
        return min(opts.phase_step_frac * math.pi / pc,
                   opts.z_step_frac * zc,
                   z_hard_end - zc)

    h = 0.01 * max_step(z, p0)
    atol, rtol = opts.rk_atol, opts.rk_rtol
    flux_drift = 0.0
    steps = rejected = 0
    next_checkpoint = z_start * _CHECKPOINT_RATIO
    history: list[tuple[float, complex]] = []
    converged = False

    while True:
        if steps + rejected > opts.max_steps:
            raise SolveError(f"step budget exceeded at z = {z:g}")
        # Cash-Karp stages
        k1 = rhs(z, cp, cm, phi)
        k2 = rhs(z + _CK_C2 * h,
                 cp + h * (_CK_A[0][0] * k1[0]),
                 cm + h * (_CK_A[0][0] * k1[1]),
                 phi + h * (_CK_A[0][0] * k1[2]))
        k3 = rhs(z + _CK_C3 * h,
                 cp + h * (_CK_A[1][0] * k1[0] + _CK_A[1][1] * k2[0]),
                 cm + h * (_CK_A[1][0] * k1[1] + _CK_A[1][1] * k2[1]),
                 phi + h * (_CK_A[1][0] * k1[2] + _CK_A[1][1] * k2[2]))
        k4 = rhs(z + _CK_C4 * h,
                 cp + h * (_CK_A[2][0] * k1[0] + _CK_A[2][1] * k2[0] + _CK_A[2][2] * k3[0]),
                 cm + h * (_CK_A[2][0] * k1[1] + _CK_A[2][1] * k2[1] + _CK_A[2][2] * k3[1]),
                 phi + h * (_CK_A[2][0] * k1[2] + _CK_A[2][1] * k2[2] + _CK_A[2][2] * k3[2]))
        k5 = rhs(z + _CK_C5 * h,
                 cp + h * (_CK_A[3][0] * k1[0] + _CK_A[3][1] * k2[0] + _CK_A[3][2] * k3[0] + _CK_A[3][3] * k4[0]),
                 cm + h * (_CK_A[3][0] * k1[1] + _CK_A[3][1] * k2[1] + _CK_A[3][2] * k3[1] + _CK_A[3][3] * k4[1]),
                 phi + h * (_CK_A[3][0] * k1[2] + _CK_A[3][1] * k2[2] + _CK_A[3][2] * k3[2] + _CK_A[3][3] * k4[2]))
        k6 = rhs(z + _CK_C6 * h,
                 cp + h * (_CK_A[4][0] * k1[0] + _CK_A[4][1] * k2[0] + _CK_A[4][2] * k3[0] + _CK_A[4][3] * k4[0] + _CK_A[4][4] * k5[0]),
                 cm + h * (_CK_A[4][0] * k1[1] + _CK_A[4][1] * k2[1] + _CK_A[4][2] * k3[1] + _CK_A[4][3] * k4[1] + _CK_A[4][4] * k5[1]),
                 phi + h * (_CK_A[4][0] * k1[2] + _CK_A[4][1] * k2[2] + _CK_A[4][2] * k3[2] + _CK_A[4][3] * k4[2] + _CK_A[4][4] * k5[2]))

        ks = (k1, k2, k3, k4, k5, k6)
        new_cp = cp + h * sum(b * k[0] for b, k in zip(_CK_B5, ks))
        new_cm = cm + h * sum(b * k[1] for b, k in zip(_CK_B5, ks))
        new_phi = phi + h * sum(b * k[2] for b, k in zip(_CK_B5, ks))
        err_cp = h * sum(b * k[0] for b, k in zip(_CK_ERR, ks))
        err_cm = h * sum(b * k[1] for b, k in zip(_CK_ERR, ks))
        err_phi = h * sum(b * k[2] for b, k in zip(_CK_ERR, ks))

        err = max(
            abs(err_cp) / (atol + rtol * max(abs(cp), abs(new_cp))),
            abs(err_cm) / (atol + rtol * max(abs(cm), abs(new_cm))),
            abs(err_phi) / (atol + rtol * max(abs(phi), abs(new_phi))),
        )
        if err <= 1.0:
            z += h
            cp, cm, phi = new_cp, new_cm, new_phi
            steps += 1
            flux_drift = max(flux_drift,
                             abs((abs(cm) ** 2 - abs(cp) ** 2) - 1.0))
            # r-convergence bookkeeping on geometric checkpoints
            if z >= next_checkpoint or z >= z_hard_end:
                r_now = cp / cm
                history.append((z, r_now))
                next_checkpoint = z * _CHECKPOINT_RATIO
                if z >= z_end_min:
                    decade = [rv for zv, rv in history if zv <= z / 10.0]
                    recent = [rv for zv, rv in history if zv > z / 10.0]
                    if decade:
                        ref = max(abs(r_now), 1e-12)
                        dev = max(abs(rv - r_now) for rv in (recent + decade[-1:]))
                        if dev <= opts.r_tol * ref:
                            converged = True
                            break
            if z >= z_hard_end:
                break
        else:
            rejected += 1
        factor = 0.9 * err ** -0.2 if err > 0 else 5.0
        h = min(h * min(max(factor, 0.2), 5.0), max_step(z, k1[2]))
        if h <= 0 or z + h == z:
            raise SolveError(f"step size underflow at z = {z:g}")

    if not converged:
        raise SolveError(
            f"r did not converge to {opts.r_tol:g} before the table end "
            f"(z = {z:g}); extend the grid"
        )
    if flux_drift > opts.flux_tol:
        raise SolveError(
            f"flux drift {flux_drift:.2e} exceeds {opts.flux_tol:g}: "
            f"step control failure"
        )
    r = (cp / cm) * cmath.exp(2j * phi)  # phase reference z0 = z_end
    prob = abs(r) ** 2
    return ReflectionResult(r=r, probability=prob, loss=1.0 - prob,
                            energy_au=energy_au, z_start=z_start,
                            z_end=z, flux_drift=flux_drift,
                            steps=steps, rejected=rejected)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepPoint:
    energy_au: float
    height_m: float | None
    result: ReflectionResult | None
    error: str | None = None


def reflection_sweep(table: PotentialTable,
                     energies_au=None, heights_m=None,
                     opts: SolveOptions | None = None,
                     mass_au: float = _M) -> list[SweepPoint]:
    """Solve per energy (or free-fall height), in input order.

    Per-point failures are recorded without aborting the sweep.  Results are
    deterministic functions of (table, energy, opts), independent of the
    order in which points are run.
    """
    if (energies_au is None) == (heights_m is None):
        raise ValueError("give exactly one of energies_au or heights_m")
    if heights_m is not None:
        pairs = [(CONSTANTS.energy_au_from_height(h), h) for h in heights_m]
    else:
        pairs = [(e, None) for e in energies_au]
    points: list[SweepPoint] = []
    for energy, height in pairs:
        try:
            res = solve_reflection(table, energy, opts, mass_au)
            points.append(SweepPoint(energy, height, res))
        except (SolveError, ValueError) as exc:
            points.append(SweepPoint(energy, height, None, error=str(exc)))
    return points
