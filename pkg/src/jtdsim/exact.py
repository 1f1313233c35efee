"""Sparse Hamiltonian per charge sector, ground states and observables.

The Hamiltonian is built in the chiral-mode basis where it is real
symmetric and block-diagonal in the charge. Couplings that would push an
occupation past n_max are dropped (hard cutoff); `truncation_sweep` is the
guard against relying on an unconverged cutoff.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as sparse_linalg

from .errors import NumericalInconsistencyError, SectorWindowError, SolverError
from .hilbert import BasisState, ChargeSector, enumerate_sector, feasible_two_c

__all__ = [
    "DENSE_LIMIT",
    "GroundStateResult",
    "Observables",
    "TruncationReport",
    "build_hamiltonian",
    "hamiltonian_parts",
    "ground_state",
    "sector_eigenvalues",
    "global_ground",
    "default_two_c_window",
    "observables",
    "truncation_sweep",
    "parity_expectation",
]

DENSE_LIMIT = 2000


@dataclass
class GroundStateResult:
    """Lowest eigenpair of one sector Hamiltonian."""

    two_c: int
    energy: float
    vector: np.ndarray
    n_max: int
    residual: float
    converged: bool = True

    @property
    def charge(self):
        return self.two_c / 2.0


@dataclass
class Observables:
    """Ground-state expectation values entering the phase diagnostics."""

    mean_phonons: float
    jz: float
    spin_coherence: float


@dataclass
class TruncationReport:
    """Ground energies along an n_max ladder plus the convergence verdict."""

    n_max_list: list
    energies: list
    converged: bool
    result: GroundStateResult


def _coupling_entries(params, sector):
    """COO entries of the coupling operator (the lambda=1 off-diagonal part)."""
    j = params.j
    rows, cols, vals = [], [], []
    for col, (two_m, n_r, n_l) in enumerate(sector.states):
        m = two_m / 2.0
        up = np.sqrt(j * (j + 1) - m * (m + 1)) if two_m + 2 <= params.two_j else 0.0
        down = np.sqrt(j * (j + 1) - m * (m - 1)) if two_m - 2 >= -params.two_j else 0.0
        targets = (
            (BasisState(two_m + 2, n_r + 1, n_l), up * np.sqrt(n_r + 1)),
            (BasisState(two_m + 2, n_r, n_l - 1), up * np.sqrt(n_l)),
            (BasisState(two_m - 2, n_r - 1, n_l), down * np.sqrt(n_r)),
            (BasisState(two_m - 2, n_r, n_l + 1), down * np.sqrt(n_l + 1)),
        )
        for target, amp in targets:
            if amp == 0.0:
                continue
            if not (0 <= target.n_r <= params.n_max and 0 <= target.n_l <= params.n_max):
                continue  # hard cutoff at the truncation boundary
            if abs(target.two_m) > params.two_j:
                continue
            row = sector.index.get(target)
            if row is None:
                raise AssertionError(
                    f"charge leak: {sector.states[col]} -> {target} left sector "
                    f"C={sector.charge}"
                )
            rows.append(row)
            cols.append(col)
            vals.append(amp)
    return rows, cols, vals


def hamiltonian_parts(params, sector):
    """Split H = diag + coupling * V, with V independent of the coupling.

    Useful when many couplings are needed on one sector (sweeps, ramps).
    Returns (diagonal energies as a 1D array, V as a CSR matrix).
    """
    if sector.dim == 0:
        raise ValueError(f"sector C={sector.charge} is empty")
    diag = np.array(
        [
            params.omega * (s.n_r + s.n_l) + params.omega0 * (s.two_m / 2.0)
            for s in sector.states
        ]
    )
    rows, cols, vals = _coupling_entries(params, sector)
    scale = 1.0 / np.sqrt(2 * params.j)
    v = sparse.coo_matrix(
        (np.array(vals) * scale, (rows, cols)), shape=(sector.dim, sector.dim)
    ).tocsr()
    return diag, v


def build_hamiltonian(params, sector):
    """Sector Hamiltonian as a real symmetric CSR matrix."""
    diag, v = hamiltonian_parts(params, sector)
    h = params.coupling * v
    h = h + sparse.diags(diag)
    return h.tocsr()


def _fix_sign(vector):
    pivot = np.argmax(np.abs(vector))
    return -vector if vector[pivot] < 0 else vector


def ground_state(params, sector, eig_tol=1e-10, seed=0):
    """Lowest eigenpair of the sector Hamiltonian.

    Dense solve below DENSE_LIMIT, Lanczos (ARPACK) above it with a seeded
    start vector so repeated runs are identical. The residual ||Hv - Ev||
    is always checked against eig_tol.
    """
    h = build_hamiltonian(params, sector)
    dim = sector.dim
    if dim <= DENSE_LIMIT:
        dense = h.toarray()
        eigvals, eigvecs = scipy.linalg.eigh(dense, subset_by_index=[0, 0])
        energy = float(eigvals[0])
        vector = eigvecs[:, 0]
    else:
        v0 = np.random.default_rng(seed).standard_normal(dim)
        v0 /= np.linalg.norm(v0)
        try:
            eigvals, eigvecs = sparse_linalg.eigsh(h, k=1, which="SA", v0=v0)
        except sparse_linalg.ArpackNoConvergence as exc:
            raise SolverError(
                f"Lanczos stagnated on sector C={sector.charge} (dim {dim})",
                residual=None,
            ) from exc
        energy = float(eigvals[0])
        vector = eigvecs[:, 0]
    vector = _fix_sign(vector / np.linalg.norm(vector))
    residual = float(np.linalg.norm(h @ vector - energy * vector))
    if residual > eig_tol:
        raise SolverError(
            f"eigenpair residual {residual:.3e} exceeds tolerance {eig_tol:.1e}",
            residual=residual,
        )
    return GroundStateResult(
        two_c=sector.two_c,
        energy=energy,
        vector=vector,
        n_max=params.n_max,
        residual=residual,
    )


def sector_eigenvalues(params, sector, k=2, seed=0):
    """Lowest k eigenvalues of the sector Hamiltonian, ascending."""
    h = build_hamiltonian(params, sector)
    dim = sector.dim
    k = min(k, dim)
    if dim <= DENSE_LIMIT:
        dense = h.toarray()
        return scipy.linalg.eigh(dense, eigvals_only=True, subset_by_index=[0, k - 1])
    v0 = np.random.default_rng(seed).standard_normal(dim)
    v0 /= np.linalg.norm(v0)
    return np.sort(sparse_linalg.eigsh(h, k=k, which="SA", v0=v0, return_eigenvectors=False))


def default_two_c_window(params):
    """Doubled-charge scan window [j - 2 n_max, j + 2 n_max], clipped to
    the feasible range."""
    lo = params.two_j - 4 * params.n_max
    hi = params.two_j + 4 * params.n_max
    feas = feasible_two_c(params)
    return range(max(lo, feas.start), min(hi, feas.stop - 1) + 1, 2)


def global_ground(params, two_c_window=None, on_edge="warn", eig_tol=1e-10, seed=0):
    """Minimum-energy ground state over a window of charge sectors.

    Parameters
    ----------
    two_c_window : iterable of int, optional
        Doubled charges to scan; defaults to `default_two_c_window`.
    on_edge : {"warn", "raise", "ignore"}
        What to do when the minimum sits on the window edge, which hints the
        window should be enlarged.
    """
    if two_c_window is None:
        two_c_window = default_two_c_window(params)
    two_cs = [tc for tc in two_c_window if enumerate_sector(params, tc / 2.0).dim > 0]
    if not two_cs:
        raise ValueError("charge window contains no non-empty sector")
    best = None
    for tc in two_cs:
        sector = enumerate_sector(params, tc / 2.0)
        result = ground_state(params, sector, eig_tol=eig_tol, seed=seed)
        if best is None or result.energy < best.energy:
            best = result
    if best.two_c in (two_cs[0], two_cs[-1]) and len(two_cs) > 1:
        message = (
            f"global ground state sits on the charge-window edge (C={best.charge}); "
            "consider widening the window"
        )
        if on_edge == "raise":
            raise SectorWindowError(message)
        if on_edge == "warn":
            warnings.warn(message, stacklevel=2)
    return best


def observables(result, params, sector):
    """Phase-transition observables of a sector eigenvector."""
    weights = np.abs(result.vector) ** 2
    totals = np.array([s.n_r + s.n_l for s in sector.states], dtype=float)
    ms = np.array([s.two_m / 2.0 for s in sector.states])
    j = params.j
    return Observables(
        mean_phonons=float(weights @ totals),
        jz=float(weights @ ms),
        spin_coherence=float(j * (j + 1) - weights @ ms**2),
    )


def parity_expectation(vector, sector):
    """<Pi> on a sector vector; exactly +-1 because Pi is constant there."""
    return sector.parity * float(np.vdot(vector, vector).real)


def truncation_sweep(params, n_max_list, charge=None, rel_tol=1e-8, eig_tol=1e-10, seed=0):
    """Ground energy along an increasing n_max ladder.

    With `charge` given, the sweep stays inside that sector; otherwise each
    rung scans the default charge window. Energies must be non-increasing
    (the truncated spaces are nested); a violation beyond solver noise
    raises NumericalInconsistencyError. The returned result belongs to the
    largest n_max; `converged` records whether the last two rungs agree to
    rel_tol in relative terms.
    """
    if list(n_max_list) != sorted(n_max_list) or len(n_max_list) < 2:
        raise ValueError("n_max_list must be increasing with at least two entries")
    energies = []
    result = None
    for n_max in n_max_list:
        p = params.with_n_max(n_max)
        if charge is None:
            result = global_ground(p, on_edge="ignore", eig_tol=eig_tol, seed=seed)
        else:
            result = ground_state(p, enumerate_sector(p, charge), eig_tol=eig_tol, seed=seed)
        energies.append(result.energy)
    for prev, curr in zip(energies, energies[1:]):
        if curr > prev + 10 * eig_tol * max(1.0, abs(prev)):
            raise NumericalInconsistencyError(
                f"ground energy rose from {prev!r} to {curr!r} while n_max grew"
            )
    scale = max(abs(energies[-1]), 1e-300)
    converged = abs(energies[-1] - energies[-2]) < rel_tol * scale
    result.converged = converged
    return TruncationReport(
        n_max_list=list(n_max_list),
        energies=energies,
        converged=converged,
        result=result,
    )
