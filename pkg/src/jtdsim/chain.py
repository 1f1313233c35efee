"""Equilibrium structure and radial normal modes of a linear ion chain.

Lengths are measured in units of d0 = (q^2 / (M omega_z^2))^(1/3), so the
equilibrium positions depend on the ion number only and the radial mode
structure depends only on the trap aspect ratio omega_z / omega_r.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError, SolverError

__all__ = [
    "ChainConfig",
    "ChainSpectrum",
    "solve_equilibrium",
    "equilibrium_residual",
    "build_k_matrix",
    "radial_spectrum",
    "zigzag_critical_n",
]


@dataclass(frozen=True)
class ChainConfig:
    """Trap and chain parameters.

    Parameters
    ----------
    n_ions : int
        Number of ions, at least 2.
    aspect : float
        Trap aspect ratio omega_z / omega_r, in (0, 1).
    omega_z : float, optional
        Axial frequency in rad/s. Only needed when dimensionful output is
        wanted; the spectrum itself is governed by the aspect ratio alone.
    """

    n_ions: int
    aspect: float
    omega_z: float | None = None

    def __post_init__(self):
        if self.n_ions < 2:
            raise ValueError(f"need at least 2 ions, got {self.n_ions}")
        if not 0.0 < self.aspect < 1.0:
            raise ValueError(f"aspect ratio must lie in (0, 1), got {self.aspect}")
        if self.omega_z is not None and self.omega_z <= 0:
            raise ValueError("omega_z must be positive")


@dataclass
class ChainSpectrum:
    """Radial mode data for one chain configuration.

    Attributes
    ----------
    positions : ndarray, shape (N,)
        Dimensionless equilibrium positions, ascending and centered.
    kappa : ndarray, shape (N,)
        Eigenvalues of the radial coupling matrix, sorted descending.
        kappa[0] = 1 is the center-of-mass mode. Negative values signal a
        zigzag-unstable chain.
    modes : ndarray, shape (N, N)
        Orthonormal mode vectors; column n belongs to kappa[n]. Signs fixed
        so the first nonzero component of each column is positive.
    omega_ratio : ndarray, shape (N,)
        Mode frequencies omega_n / omega_r = sqrt(kappa); NaN where the
        chain is unstable (kappa < 0).
    config : ChainConfig
    """

    positions: np.ndarray
    kappa: np.ndarray
    modes: np.ndarray
    omega_ratio: np.ndarray
    config: ChainConfig = field(repr=False)

    @property
    def n_unstable(self):
        """Number of modes with negative kappa (imaginary frequency)."""
        return int(np.sum(self.kappa < 0))


def equilibrium_residual(positions):
    """Net dimensionless force on each ion: trap pull plus Coulomb pushes."""
    z = np.asarray(positions, dtype=float)
    dz = z[:, None] - z[None, :]
    np.fill_diagonal(dz, np.inf)
    return z - np.sum(np.sign(dz) / dz**2, axis=1)


def solve_equilibrium(n_ions, tol=1e-12, max_iter=100):
    """Solve the force-balance equations for a linear chain.

    Damped Newton iteration on the residual of `equilibrium_residual`,
    started from a uniform grid with spacing 2.018 / N^0.559 (a good fit to
    the inner spacing of long chains).

    Parameters
    ----------
    n_ions : int
        Number of ions (>= 2).
    tol : float
        Maximum allowed residual force per ion.

    Returns
    -------
    ndarray, shape (N,)
        Positions in units of d0, strictly ascending, sum exactly centered.

    Raises
    ------
    SolverError
        If the residual does not drop below `tol` within `max_iter` steps.
    """
    if n_ions < 2:
        raise ValueError(f"need at least 2 ions, got {n_ions}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    idx = np.arange(1, n_ions + 1, dtype=float)
    z = (idx - (n_ions + 1) / 2.0) * (2.018 / n_ions**0.559)
    residual = np.inf
    for _ in range(max_iter):
        force = equilibrium_residual(z)
        residual = np.max(np.abs(force))
        if residual < tol:
            return z - z.mean()
        dz = z[:, None] - z[None, :]
        np.fill_diagonal(dz, np.inf)
        coul = 2.0 / np.abs(dz) ** 3
        jac = -coul
        np.fill_diagonal(jac, 1.0 + coul.sum(axis=1))
        step = np.linalg.solve(jac, force)
        # Backtrack until the step keeps the ordering and shrinks the residual.
        norm0 = np.linalg.norm(force)
        alpha = 1.0
        while alpha > 1e-6:
            trial = z - alpha * step
            if np.all(np.diff(trial) > 0):
                if np.linalg.norm(equilibrium_residual(trial)) < norm0:
                    break
            alpha *= 0.5
        z = z - alpha * step
    raise SolverError(
        f"equilibrium solve for N={n_ions} stalled at residual {residual:.3e}",
        residual=residual,
    )


def build_k_matrix(positions, aspect):
    """Radial coupling matrix of the chain.

    Diagonal entries are 1 - aspect^2 * sum_{j' != j} |z_j - z_j'|^-3 and
    off-diagonal entries +aspect^2 |z_i - z_j|^-3, so the uniform vector is
    always an eigenvector with eigenvalue 1 (center-of-mass mode).

    Raises
    ------
    DegenerateGeometryError
        If positions are not strictly increasing.
    """
    z = np.asarray(positions, dtype=float)
    if z.ndim != 1 or z.size < 2:
        raise ValueError("positions must be a 1D array with at least 2 entries")
    if not 0.0 < aspect < 1.0:
        raise ValueError(f"aspect ratio must lie in (0, 1), got {aspect}")
    if np.any(np.diff(z) <= 0):
        raise DegenerateGeometryError("positions must be strictly increasing")
    dz = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dz, np.inf)
    inv3 = 1.0 / dz**3
    k = aspect**2 * inv3
    np.fill_diagonal(k, 1.0 - aspect**2 * inv3.sum(axis=1))
    return k


def _fix_mode_signs(modes):
    """Make each column's first nonzero component positive."""
    fixed = modes.copy()
    for n in range(fixed.shape[1]):
        col = fixed[:, n]
        nonzero = np.nonzero(np.abs(col) > 1e-12)[0]
        if nonzero.size and col[nonzero[0]] < 0:
            fixed[:, n] = -col
    return fixed


def radial_spectrum(config):
    """Equilibrium positions plus radial eigenmodes for one configuration.

    Negative kappa eigenvalues are kept (flagged through `omega_ratio` NaNs
    and `n_unstable`) because the zigzag detection relies on them.
    """
    positions = solve_equilibrium(config.n_ions)
    k = build_k_matrix(positions, config.aspect)
    eigvals, eigvecs = np.linalg.eigh(k)
    order = np.argsort(eigvals)[::-1]
    kappa = eigvals[order]
    modes = _fix_mode_signs(eigvecs[:, order])
    omega_ratio = np.where(kappa >= 0, np.sqrt(np.clip(kappa, 0, None)), np.nan)
    return ChainSpectrum(
        positions=positions,
        kappa=kappa,
        modes=modes,
        omega_ratio=omega_ratio,
        config=config,
    )


def zigzag_critical_n(aspect, n_max):
    """Smallest ion number at which the chain turns zigzag unstable.

    Scans upward from N=2; returns None when the chain stays linear-stable
    all the way up to `n_max`.
    """
    if not 0.0 < aspect < 1.0:
        raise ValueError(f"aspect ratio must lie in (0, 1), got {aspect}")
    for n in range(2, n_max + 1):
        spectrum = radial_spectrum(ChainConfig(n_ions=n, aspect=aspect))
        if spectrum.kappa[-1] < 0:
            return n
    return None
