"""Thermodynamic-limit solution of the collective spin-two-phonon model.

Both phases reduce to 3x3 symmetric eigenvalue problems for the squared
excitation energies. Entries are written with the inverse mass factors
(1 +- coupling/critical ratios) so the expressions stay finite at the
transition point.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalInconsistencyError, PhaseDomainError

__all__ = [
    "critical_coupling",
    "normal_phase_matrix",
    "broken_phase_matrix",
    "MeanFieldSolution",
    "DisplacementParams",
    "MeanFieldObservables",
    "normal_spectrum",
    "broken_spectrum",
    "displacement_params",
    "order_parameters",
    "spectrum_branch",
]

GOLDSTONE_REL_TOL = 1e-9
NEGATIVE_EIG_TOL = 1e-9


def critical_coupling(omega, omega0):
    """Coupling strength at the phase boundary, sqrt(omega * omega0 / 2)."""
    if omega <= 0 or omega0 <= 0:
        raise ValueError("frequencies must be positive")
    return math.sqrt(omega * omega0 / 2.0)


@dataclass
class DisplacementParams:
    """Condensate displacements of the broken phase (extensive in j)."""

    alpha_x: float
    alpha_y: float
    gamma: float
    s: float
    phi: float
    # signed displacement amplitudes in wave-packet units, sqrt(alpha) with
    # the sign of cos(phi) / sin(phi)
    x0_over_q0: float
    y0_over_q0: float
    j: float = 1.0

    @property
    def alpha_x_per_j(self):
        return self.alpha_x / self.j

    @property
    def alpha_y_per_j(self):
        return self.alpha_y / self.j

    @property
    def gamma_per_j(self):
        return self.gamma / self.j


@dataclass
class MeanFieldObservables:
    """Intensive order parameters (per j and per j^2)."""

    mean_phonons_over_j: float
    jz_over_j: float
    coherence_over_j2: float
    x0_over_q0: float
    y0_over_q0: float


@dataclass
class MeanFieldSolution:
    """One point of the thermodynamic-limit phase diagram.

    epsilon holds the three excitation energies sorted ascending; in the
    broken phase epsilon[0] is the exact zero of the free (Goldstone) mode.
    The ground energy is split into the part proportional to j
    (e_ground_per_j) and the j-independent remainder (e_ground_const).
    """

    phase: str
    coupling: float
    s: float
    phi: float
    epsilon: np.ndarray
    e_ground_per_j: float
    e_ground_const: float
    alpha_x: float = 0.0
    alpha_y: float = 0.0
    gamma: float = 0.0
    masses: tuple = (1.0, 1.0)


def normal_phase_matrix(omega, omega0, coupling):
    """Squared-frequency matrix of the undisplaced phase.

    Written with inv_m = 1 -+ coupling * sqrt(2 / (omega0 omega)) in place
    of the diverging masses; hermiticity requires coupling <= critical.
    """
    ratio = coupling * math.sqrt(2.0 / (omega0 * omega))
    inv_mp = 1.0 + ratio
    inv_mm = 1.0 - ratio
    half_sum = (omega**2 + omega0**2) / 2.0
    half_diff = (omega**2 - omega0**2) / 2.0
    c_p = coupling * math.sqrt(omega0 * omega * inv_mp)
    c_m = coupling * math.sqrt(omega0 * omega * inv_mm)
    return np.array(
        [
            [omega**2, -c_p, c_m],
            [-c_p, half_sum * inv_mp, half_diff * math.sqrt(inv_mp * inv_mm)],
            [c_m, half_diff * math.sqrt(inv_mp * inv_mm), half_sum * inv_mm],
        ]
    )


def broken_phase_matrix(omega, omega0, coupling):
    """Squared-frequency matrix of the displaced phase (coupling >= critical)."""
    lam_c = critical_coupling(omega, omega0)
    s = lam_c**2 / coupling**2
    xi2 = omega**2 / 2.0 + omega0**2 / (2.0 * s**2)
    nu = xi2 - omega0**2 / s**2
    mp = 1.0 + s
    mm = 1.0 - s
    lam2 = coupling**2
    return np.array(
        [
            [xi2 * mm, lam2 * math.sqrt(2.0 * mm), nu * math.sqrt(mp * mm)],
            [lam2 * math.sqrt(2.0 * mm), omega**2, -lam2 * math.sqrt(2.0 * mp)],
            [nu * math.sqrt(mp * mm), -lam2 * math.sqrt(2.0 * mp), xi2 * mp],
        ]
    )


def normal_spectrum(params):
    """Excitation energies and ground-energy constants below the transition."""
    lam_c = critical_coupling(params.omega, params.omega0)
    if params.coupling > lam_c:
        raise PhaseDomainError(
            f"normal solution only valid for coupling <= {lam_c:.6g}, "
            f"got {params.coupling:.6g}"
        )
    b = normal_phase_matrix(params.omega, params.omega0, params.coupling)
    eigvals = np.linalg.eigvalsh(b)
    scale = np.max(np.abs(b))
    if eigvals[0] < -NEGATIVE_EIG_TOL * max(scale, 1.0):
        raise NumericalInconsistencyError(
            f"negative squared frequency {eigvals[0]:.3e} in the normal phase"
        )
    epsilon = np.sqrt(np.clip(eigvals, 0.0, None))
    ratio = params.coupling * math.sqrt(2.0 / (params.omega0 * params.omega))
    # ground energy: sum eps/2 - omega0 (j + 1/2) - omega
    e_const = float(epsilon.sum() / 2.0 - params.omega0 / 2.0 - params.omega)
    return MeanFieldSolution(
        phase="normal",
        coupling=params.coupling,
        s=math.nan,
        phi=0.0,
        epsilon=epsilon,
        e_ground_per_j=-params.omega0,
        e_ground_const=e_const,
        masses=(1.0 / (1.0 + ratio), math.inf if ratio >= 1.0 else 1.0 / (1.0 - ratio)),
    )


def displacement_params(params, phi=0.0):
    """Condensate displacements above the transition.

    The angle phi picks the direction of the broken symmetry; the sums
    alpha_x + alpha_y and the spectrum are phi-independent.
    """
    lam_c = critical_coupling(params.omega, params.omega0)
    if params.coupling < lam_c:
        raise PhaseDomainError(
            f"displaced solution only valid for coupling >= {lam_c:.6g}, "
            f"got {params.coupling:.6g}"
        )
    s = lam_c**2 / params.coupling**2
    j = params.j
    amp = (params.coupling / params.omega) * math.sqrt(j * (1.0 - s**2))
    x0 = amp * math.cos(phi)
    y0 = amp * math.sin(phi)
    return DisplacementParams(
        alpha_x=x0**2,
        alpha_y=y0**2,
        gamma=j * (1.0 - s),
        s=s,
        phi=phi,
        x0_over_q0=x0,
        y0_over_q0=y0,
        j=j,
    )


def broken_spectrum(params, phi=0.0):
    """Excitation energies and ground-energy constants above the transition.

    The smallest squared frequency is an exact zero (free mode from the
    broken continuous symmetry); values below the identification threshold
    are reported as exactly 0.
    """
    lam_c = critical_coupling(params.omega, params.omega0)
    if params.coupling < lam_c:
        raise PhaseDomainError(
            f"displaced solution only valid for coupling >= {lam_c:.6g}, "
            f"got {params.coupling:.6g}"
        )
    b = broken_phase_matrix(params.omega, params.omega0, params.coupling)
    eigvals = np.linalg.eigvalsh(b)
    scale = max(np.max(np.abs(b)), 1.0)
    if eigvals[0] < -NEGATIVE_EIG_TOL * scale:
        raise NumericalInconsistencyError(
            f"squared frequency {eigvals[0]:.3e} below the Goldstone tolerance"
        )
    eigvals = np.where(np.abs(eigvals) < GOLDSTONE_REL_TOL * scale, 0.0, eigvals)
    epsilon = np.sqrt(np.clip(eigvals, 0.0, None))
    s = lam_c**2 / params.coupling**2
    disp = displacement_params(params, phi)
    lam = params.coupling
    om, om0 = params.omega, params.omega0
    e_per_j = -(lam**2 / om + om0**2 * om / (4.0 * lam**2))
    e_const = float(
        epsilon[1:].sum() / 2.0
        - om
        - (om0 / (4.0 * s)) * (1.0 + s)
        - (lam**2 / (2.0 * om)) * (1.0 - s)
    )
    return MeanFieldSolution(
        phase="broken",
        coupling=params.coupling,
        s=s,
        phi=phi,
        epsilon=epsilon,
        e_ground_per_j=e_per_j,
        e_ground_const=e_const,
        alpha_x=disp.alpha_x,
        alpha_y=disp.alpha_y,
        gamma=disp.gamma,
        masses=(1.0 + s, 1.0 - s),
    )


def order_parameters(params, phi=0.0):
    """Closed-form intensive order parameters at any coupling.

    Below the critical coupling the phase has no phonons and the collective
    spin points along -z; above it the phonon number and the transverse
    spin coherence grow as 1 - s^2.
    """
    lam_c = critical_coupling(params.omega, params.omega0)
    if params.coupling < lam_c:
        return MeanFieldObservables(
            mean_phonons_over_j=0.0,
            jz_over_j=-1.0,
            coherence_over_j2=0.0,
            x0_over_q0=0.0,
            y0_over_q0=0.0,
        )
    disp = displacement_params(params, phi)
    s = disp.s
    return MeanFieldObservables(
        mean_phonons_over_j=(params.coupling**2 / params.omega**2) * (1.0 - s**2),
        jz_over_j=-s,
        coherence_over_j2=1.0 - s**2,
        x0_over_q0=disp.x0_over_q0,
        y0_over_q0=disp.y0_over_q0,
    )


def _branch_point(params, coupling):
    lam_c = critical_coupling(params.omega, params.omega0)
    p = params.with_coupling(coupling)
    # at the transition both branches agree; report the displaced one, whose
    # matrix stays finite there
    if coupling < lam_c:
        return normal_spectrum(p)
    return broken_spectrum(p)


def spectrum_branch(params, couplings, continuity_tol=1e-3):
    """Excitation spectrum over a coupling grid, switching branch at lam_c.

    When the grid straddles the transition, the one-sided limits of the
    sorted branches are compared at lam_c (1 -+ 1e-6); a mismatch beyond
    continuity_tol * omega raises NumericalInconsistencyError.
    """
    couplings = np.asarray(couplings, dtype=float)
    lam_c = critical_coupling(params.omega, params.omega0)
    if couplings.min() < lam_c < couplings.max():
        below = normal_spectrum(params.with_coupling(lam_c * (1 - 1e-6)))
        above = broken_spectrum(params.with_coupling(lam_c * (1 + 1e-6)))
        jump = np.max(np.abs(below.epsilon - above.epsilon))
        if jump > continuity_tol * params.omega:
            raise NumericalInconsistencyError(
                f"branch mismatch {jump:.3e} at the critical coupling"
            )
    return [_branch_point(params, lam) for lam in couplings]
