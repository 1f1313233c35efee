"""Basis enumeration for the collective spin-two-phonon Hilbert space.

States |j,m> x |n_r, n_l> are grouped by the conserved charge
C = n_r - n_l - m. Half-integers are stored doubled (two_m, two_c) so all
bookkeeping stays in exact integer arithmetic.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NormalizationError

__all__ = [
    "ModelParams",
    "BasisState",
    "ChargeSector",
    "enumerate_sector",
    "feasible_two_c",
    "occupation_sum",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the collective spin-phonon model.

    omega, omega0 and coupling are energies in the same (arbitrary) unit.
    two_j is twice the collective spin length (= number of ions), n_max the
    per-chiral-mode Fock cutoff.
    """

    omega: float
    omega0: float
    coupling: float
    two_j: int
    n_max: int

    def __post_init__(self):
        if self.two_j < 1 or int(self.two_j) != self.two_j:
            raise ValueError(f"two_j must be a positive integer, got {self.two_j}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")
        for name in ("omega", "omega0"):
            if not np.isfinite(getattr(self, name)) or getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive and finite")

    @property
    def j(self):
        return self.two_j / 2.0

    @property
    def n_ions(self):
        return self.two_j

    def with_coupling(self, coupling):
        return ModelParams(self.omega, self.omega0, coupling, self.two_j, self.n_max)

    def with_n_max(self, n_max):
        return ModelParams(self.omega, self.omega0, self.coupling, self.two_j, n_max)


class BasisState(NamedTuple):
    """One product state: spin projection (doubled) and chiral occupations."""

    two_m: int
    n_r: int
    n_l: int

    @property
    def m(self):
        return self.two_m / 2.0


@dataclass(frozen=True)
class ChargeSector:
    """All basis states sharing one value of the charge n_r - n_l - m.

    The state list is ordered lexicographically in (m, n_l), which fixes the
    matrix representation of every operator built on the sector.
    """

    two_c: int
    two_j: int
    n_max: int
    states: tuple = field(repr=False)
    index: dict = field(repr=False)

    @property
    def charge(self):
        return self.two_c / 2.0

    @property
    def dim(self):
        return len(self.states)

    @property
    def parity(self):
        """Common value of (-1)^(n_r + n_l + m + j) over the sector."""
        return -1 if (self.two_c - self.two_j) // 2 % 2 else 1


def enumerate_sector(params, charge):
    """Collect the basis states with n_r - n_l - m equal to `charge`.

    An infeasible or incompatible charge (wrong half-integer offset) yields
    an empty sector rather than an error.
    """
    two_c = int(round(2 * charge))
    states = []
    if (two_c - params.two_j) % 2 == 0:
        for two_m in range(-params.two_j, params.two_j + 1, 2):
            for n_l in range(params.n_max + 1):
                two_n_r = two_c + two_m + 2 * n_l
                if two_n_r % 2 == 0 and 0 <= two_n_r // 2 <= params.n_max:
                    states.append(BasisState(two_m, two_n_r // 2, n_l))
    index = {s: i for i, s in enumerate(states)}
    return ChargeSector(
        two_c=two_c,
        two_j=params.two_j,
        n_max=params.n_max,
        states=tuple(states),
        index=index,
    )


def feasible_two_c(params):
    """Doubled charges of all non-empty sectors, ascending."""
    lo = -(params.two_j + 2 * params.n_max)
    hi = params.two_j + 2 * params.n_max
    return range(lo, hi + 1, 2)


def occupation_sum(state, sector):
    """Expectation of the total phonon number n_r + n_l.

    The chiral and Cartesian mode pairs are related by a number-conserving
    basis change, so this equals the Cartesian occupation sum <n_x + n_y>.
    """
    vec = np.asarray(state)
    if vec.shape != (sector.dim,):
        raise ValueError(f"state has shape {vec.shape}, sector dim is {sector.dim}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"state norm is {norm:.12f}, expected 1")
    weights = np.abs(vec) ** 2
    totals = np.array([s.n_r + s.n_l for s in sector.states], dtype=float)
    return float(weights @ totals)
