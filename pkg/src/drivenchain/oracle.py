"""Brute-force time-domain oracle for the oscillating steady state.

Integrates the full 2n x 2n covariance ODE

    dZ/dt = -X^T Z - Z X + Y cos(omega t)

from an arbitrary initial condition until the transient has died out,
then projects the last stretch of the trajectory onto {1, cos, sin} to
recover the complex harmonic amplitude.  Shares no code with the
stationary solvers, which is the point: it validates their sign
conventions and normalization end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .chain import ChainParams, build_static_matrices, mode_energies
from .errors import NotConvergedError
from .exact import CovarianceMatrix

RANDOM_IC_SEED = 20240817  # fixed for reproducibility of random starts


@dataclass(frozen=True)
class DynamicsGenerators:
    """Drift X and source Y of the covariance ODE; both strictly real."""

    X: np.ndarray
    Y: np.ndarray


def build_generators(params: ChainParams) -> DynamicsGenerators:
    mats = build_static_matrices(params)
    n = params.n
    i_sigma_y = np.array([[0.0, 1.0], [-1.0, 0.0]])  # i * sigma^y, real
    # +2 eps on the bath projector: the dissipative part of X must have
    # positive real spectrum so that e^{-X t} damps the transient.
    X = 2.0 * np.kron(i_sigma_y, mats.J) + 2.0 * params.eps * np.kron(np.eye(2), mats.R)
    Y = -4.0 * params.eps * params.mu0 * np.kron(i_sigma_y, mats.P)
    return DynamicsGenerators(X=X, Y=Y)


@dataclass(frozen=True)
class CovarianceTrajectory:
    """Sampled real antisymmetric covariance matrices Z(t)."""

    times: np.ndarray
    Z: np.ndarray  # shape (len(times), 2n, 2n)
    params: ChainParams

    def antisymmetry_defect(self) -> float:
        scale = max(np.abs(self.Z).max(), 1e-300)
        return float(np.abs(self.Z + np.transpose(self.Z, (0, 2, 1))).max() / scale)


def random_antisymmetric(n: int, seed: int = RANDOM_IC_SEED) -> np.ndarray:
    """Reproducible random antisymmetric 2n x 2n initial condition."""
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((2 * n, 2 * n))
    return M - M.T


def relaxation_time(params: ChainParams) -> float:
    """1 / (slowest transient decay rate), from the dissipative mode shifts."""
    spec = mode_energies(params.n, params.eps, params.omega)
    gap = 2.0 * np.abs(spec.beta1.imag).min()
    return 1.0 / gap


def integrate_covariance(
    params: ChainParams,
    t_end: float | None = None,
    tol: float = 1e-10,
    z_init: np.ndarray | None = None,
    settle_periods: int = 10,
    samples_per_period: int = 64,
) -> CovarianceTrajectory:
    """Integrate the covariance ODE and sample the final driving periods.

    t_end defaults to ~25 relaxation times, enough to suppress the
    slowest transient below 1e-10.  The returned trajectory covers the
    last `settle_periods` periods at `samples_per_period` points each.
    """
    gen = build_generators(params)
    n2 = 2 * params.n
    omega = params.omega
    period = 2.0 * np.pi / omega if omega > 0 else 1.0
    window = settle_periods * period
    if t_end is None:
        t_end = max(25.0 * relaxation_time(params), 2.0 * window)
    if t_end <= window:
        raise ValueError(f"t_end={t_end} shorter than the {settle_periods}-period sampling window")

    Xt = gen.X.T
    X = gen.X
    Y = gen.Y

    def rhs(t, y):
        Z = y.reshape(n2, n2)
        dZ = -Xt @ Z - Z @ X + np.cos(omega * t) * Y
        return dZ.ravel()

    z0 = np.zeros((n2, n2)) if z_init is None else np.asarray(z_init, dtype=float)
    t_eval = np.linspace(t_end - window, t_end, settle_periods * samples_per_period + 1)
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        z0.ravel(),
        method="DOP853",
        rtol=tol,
        atol=tol,
        t_eval=t_eval,
    )
    if not sol.success:
        raise NotConvergedError(f"integrator failed: {sol.message} (stiff? try larger eps or smaller n)")
    Z = sol.y.T.reshape(-1, n2, n2)
    return CovarianceTrajectory(times=sol.t, Z=Z, params=params)


def extract_harmonic(traj: CovarianceTrajectory, omega: float | None = None) -> CovarianceMatrix:
    """Project the trajectory onto e^{i omega t} and rebuild C^-.

    Least-squares fit of {1, cos, sin} per matrix entry (no FFT, so an
    incommensurate step grid causes no leakage).  The fitted complex
    amplitude M is split into its two n x n blocks Z0, Z2, which are
    checked for the parity checkerboard structure, and combined into
    C = O (Z0 + i Z2), the branch solved by the stationary solvers.  (The
    opposite branch is the entrywise companion (-1)^(j+k+1) C.)
    """
    params = traj.params
    if omega is None:
        omega = params.omega
    n = params.n
    t = traj.times
    nt = len(t)

    # periodicity check: last period vs the one before
    step = t[1] - t[0]
    period = 2.0 * np.pi / omega if omega > 0 else (t[-1] - t[0])
    k = max(1, int(round(period / step)))
    if nt > k:
        scale = max(np.abs(traj.Z[-1]).max(), 1e-300)
        drift = np.abs(traj.Z[-1] - traj.Z[-1 - k]).max() / scale
        if scale > 1e-8 and drift > 1e-6:
            raise NotConvergedError(
                f"trajectory not periodic yet (consecutive-period drift {drift:.2e}); increase t_end"
            )

    if omega > 0:
        basis = np.column_stack([np.ones(nt), np.cos(omega * t), np.sin(omega * t)])
        coef, *_ = np.linalg.lstsq(basis, traj.Z.reshape(nt, -1), rcond=None)
        Zc = coef[1].reshape(2 * n, 2 * n)
        Zs = coef[2].reshape(2 * n, 2 * n)
        M = Zc - 1j * Zs
    else:
        M = traj.Z.mean(axis=0).astype(complex)

    Z0 = 0.5 * (M[:n, :n] + M[n:, n:])
    Z2 = 0.5 * (M[n:, :n] - M[:n, n:])

    # checkerboard structure: Z0 lives on odd j+k, Z2 on even j+k (1-based)
    jj = np.arange(1, n + 1)
    even = (jj[:, None] + jj[None, :]) % 2 == 0
    scale = max(np.abs(Z0).max(), np.abs(Z2).max(), 1e-300)
    checker = max(np.abs(Z0[even]).max(), np.abs(Z2[~even]).max()) / scale

    O = (-1.0) ** (jj + 1)
    C = O[:, None] * (Z0 + 1j * Z2)
    out = CovarianceMatrix(n=n, data=C, params=params, method="ode")
    # below the integrator noise floor (e.g. mu0 = 0) the relative
    # checkerboard diagnostic is meaningless; the amplitude is just zero
    if scale > 1e-8 and checker > 1e-5:
        raise NotConvergedError(f"checkerboard residual {checker:.2e}; transient not settled")
    return out
