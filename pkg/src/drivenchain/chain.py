"""Model parameters, lattice matrices, free-mode spectra and the resonance catalog.

Everything downstream (exact solvers, weak-coupling formula, asymptotics,
time-domain oracle) consumes the objects defined here.  All containers are
frozen dataclasses holding read-only numpy arrays, so they can be shared
freely between parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Band edge of the chain: the critical driving frequency separating the
# algebraic/anomalous regimes from the insulating one.  Exact integer in the
# chain's energy units (unit exchange coupling).
OMEGA_C = 8.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of one boundary-driven chain."""

    n: int
    eps: float
    mu0: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"chain length must be an integer >= 2, got {self.n}")
        if not self.eps > 0:
            raise ValueError(f"bath coupling eps must be positive, got {self.eps}")
        if self.omega < 0:
            raise ValueError(f"driving frequency omega must be >= 0, got {self.omega}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class LatticeMatrices:
    """The five n-by-n structure matrices of the covariance equations.

    J: nearest-neighbour hopping (super/sub-diagonal ones).
    R: bath projector, ones at the two corners (1,1) and (n,n).
    P: driving sign matrix, +1 at (1,1), -1 at (n,n).
    O: alternating-sign diagonal (-1)^(k+1).
    S: O @ P, the source of the stationary equation; equals P for odd n
       and R for even n.
    """

    J: np.ndarray
    R: np.ndarray
    P: np.ndarray
    O: np.ndarray
    S: np.ndarray


def build_static_matrices(params: ChainParams) -> LatticeMatrices:
    """Build the J, R, P, O, S matrices for a chain of length params.n."""
    n = params.n
    J = np.zeros((n, n))
    idx = np.arange(n - 1)
    J[idx, idx + 1] = 1.0
    J[idx + 1, idx] = 1.0

    R = np.zeros((n, n))
    R[0, 0] = R[n - 1, n - 1] = 1.0

    P = np.zeros((n, n))
    P[0, 0] = 1.0
    P[n - 1, n - 1] = -1.0

    O = np.diag((-1.0) ** np.arange(n))
    S = O @ P
    return LatticeMatrices(*map(_readonly, (J, R, P, O, S)))


@dataclass(frozen=True)
class ModeSpectrum:
    """Free-mode data of the open chain.

    a[k-1] = pi*k/(n+1) are the mode wavenumbers, energies[p-1] = 4*cos(a_p)
    the single-particle energies.  beta0/beta1 are the unperturbed and the
    first-order (dissipative) eigenvalue pieces of the stationary operator;
    lam = beta0 + beta1.
    """

    a: np.ndarray
    energies: np.ndarray
    beta0: np.ndarray
    beta1: np.ndarray
    lam: np.ndarray


def mode_energies(n: int, eps: float, omega: float) -> ModeSpectrum:
    """Wavenumbers, mode energies and perturbed eigenvalues for n sites."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    k = np.arange(1, n + 1)
    a = np.pi * k / (n + 1)
    energies = 4.0 * np.cos(a)
    beta0 = omega / 2.0 - energies
    beta1 = -8j * eps / (n + 1) * np.sin(a) ** 2
    lam = beta0 + beta1
    return ModeSpectrum(*map(_readonly, (a, energies, beta0, beta1, lam)))


@dataclass(frozen=True)
class ResonanceTable:
    """Positive resonance frequencies omega_{p-m} = eps_p + eps_m.

    Only pairs with p <= m and p + m = n (mod 2) enter; entries are sorted
    by frequency.  width_scale = eps/n sets the scale on which a resonance
    is resolved.
    """

    entries: list[tuple[int, int, float]] = field(repr=False)
    width_scale: float = 0.0

    def frequencies(self) -> np.ndarray:
        return np.array([w for (_, _, w) in self.entries])

    def nearest(self, omega: float) -> tuple[int, int, float]:
        """Entry whose frequency is closest to omega."""
        if not self.entries:
            raise ValueError("empty resonance table")
        return min(self.entries, key=lambda e: abs(e[2] - omega))


def resonance_frequency(n: int, p: int, m: int) -> float:
    """omega_{p-m} = eps_p + eps_m for one mode pair."""
    spec = mode_energies(n, 1.0, 0.0)
    return float(spec.energies[p - 1] + spec.energies[m - 1])


def resonance_frequencies(
    params: ChainParams,
    omega_min: float = 0.0,
    omega_max: float = OMEGA_C,
) -> ResonanceTable:
    """All resonances with omega_{p-m} in (omega_min, omega_max].

    The full table is O(n^2); for large chains restrict the frequency
    window instead of materializing everything.
    """
    n = params.n
    energies = mode_energies(n, params.eps, params.omega).energies
    entries = []
    for p in range(1, n + 1):
        # p <= m and the parity constraint p + m = n (mod 2)
        m_start = p if (2 * p - n) % 2 == 0 else p + 1
        for m in range(m_start, n + 1, 2):
            w = energies[p - 1] + energies[m - 1]
            if omega_min < w <= omega_max:
                entries.append((p, m, float(w)))
    entries.sort(key=lambda e: e[2])
    return ResonanceTable(entries=entries, width_scale=params.eps / n)
