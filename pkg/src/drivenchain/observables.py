"""Mapping from covariance matrices to site-resolved physical amplitudes.

Sign conventions are fixed once here and cross-checked against the
time-domain oracle, which measures currents and densities directly from
the full covariance trajectory:

    <j_k>       = 4 (-1)^(k+1) C_{k,k+1}        (bond k, k = 1..n-1)
    <sigma^z_k> = -i (-1)^k   C_{k,k}           (site k)

At omega = 0 the same formulas apply and reproduce the known d.c. current
4 mu0 / (eps + 1/eps) with no extra convention factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import CovarianceMatrix


@dataclass(frozen=True)
class ObservableProfile:
    """Complex amplitudes of magnetization (n sites) and current (n-1 bonds)."""

    magnetization: np.ndarray
    current: np.ndarray

    @property
    def midpoint_current(self) -> complex:
        """Current on the central bond, the transport order parameter."""
        n = len(self.magnetization)
        mid = (n + 1) // 2  # 1-based bond index
        return complex(self.current[mid - 1])


def current_profile(C: CovarianceMatrix) -> np.ndarray:
    """Bond current amplitudes <j_k> = 4 (-1)^(k+1) C_{k,k+1}."""
    k = np.arange(1, C.n)
    return 4.0 * (-1.0) ** (k + 1) * np.diag(C.data, 1)


def magnetization_profile(C: CovarianceMatrix) -> np.ndarray:
    """Site magnetization amplitudes <sigma^z_k> = -i (-1)^k C_{k,k}."""
    k = np.arange(1, C.n + 1)
    return -1j * (-1.0) ** k * np.diag(C.data)


def profiles(C: CovarianceMatrix) -> ObservableProfile:
    return ObservableProfile(
        magnetization=magnetization_profile(C),
        current=current_profile(C),
    )


def continuity_residual(profile: ObservableProfile, omega: float) -> np.ndarray:
    """|i omega <sigma^z_k> - (<j_{k-1}> - <j_k>)| on interior sites k = 2..n-1.

    Bath injection acts on sites 1 and n, so only interior sites obey the
    bare continuity equation; for exact solver output the residual is an
    identity up to roundoff.
    """
    sz = profile.magnetization
    j = profile.current
    # k = 2..n-1: j_{k-1} has index k-2, j_k has index k-1
    return np.abs(1j * omega * sz[1:-1] - (j[:-1] - j[1:]))
