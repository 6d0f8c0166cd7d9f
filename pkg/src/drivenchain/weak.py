"""First-order-in-eps closed form for the oscillating covariance matrix.

The whole matrix is a double sine sum over mode pairs (p, m) restricted to
p + m = n (mod 2):

    C_{j,k} = 32 eps sum_{p,m} sin(a_p) sin(a_m) sin(a_p j) sin(a_m k)
              / [(n+1)^2 (lam_p + lam_m)]

with lam_m = omega/2 - 4 cos(a_m) - 8 i eps sin^2(a_m)/(n+1).  Two
evaluation orders are provided: a fast double discrete sine transform of
the masked kernel for the full matrix, and a compiled O(n^2) double sum
for single elements at chain lengths where the full matrix does not fit
in memory.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.fft import dst

from .chain import ChainParams, mode_energies
from .errors import SizeGuardError
from .exact import CovarianceMatrix

MATRIX_SIZE_CAP = 20_000
ELEMENT_SIZE_CAP = 100_000


def _kernel(params: ChainParams) -> np.ndarray:
    """Masked mode-pair kernel of the double sine sum."""
    n = params.n
    spec = mode_energies(n, params.eps, params.omega)
    sin_a = np.sin(spec.a)
    denom = spec.lam[:, None] + spec.lam[None, :]
    if np.abs(denom).min() == 0.0:
        # cannot happen for eps > 0: |Im(lam_p + lam_m)| >= 16 eps sin^2(a)/(n+1)
        raise ZeroDivisionError("vanishing mode-pair denominator")
    # lam are the negatives of the eigenvalues of the stationary operator
    # (beta_j = 4 cos a_j - omega/2 + dissipative shift), which flips the
    # sign of the source projection: the prefactor is +32 eps.
    K = (32.0 * params.eps / (n + 1) ** 2) * np.outer(sin_a, sin_a) / denom
    p = np.arange(1, n + 1)
    mask = (p[:, None] + p[None, :] - n) % 2 == 0
    K[~mask] = 0.0
    return K


def covariance_matrix_weak(params: ChainParams) -> CovarianceMatrix:
    """Full weak-coupling covariance matrix via a 2D sine transform.

    O(n^2 log n) time, O(n^2) memory; guarded at n = 20000.
    """
    n = params.n
    if n > MATRIX_SIZE_CAP:
        raise SizeGuardError(
            f"covariance_matrix_weak stores an n^2 kernel; refusing n={n} > {MATRIX_SIZE_CAP}"
        )
    K = _kernel(params)
    # DST-I computes 2 * sum_p x_p sin(pi p j / (n+1)); undo the factor 2 per axis
    C = dst(dst(K, type=1, axis=0), type=1, axis=1) / 4.0
    return CovarianceMatrix(n=n, data=C * params.mu0, params=params, method="weak")


@njit(cache=True)
def _element_sum(f: np.ndarray, g: np.ndarray, lre: np.ndarray, lim: np.ndarray, n: int) -> complex:
    re = 0.0
    im = 0.0
    for p in range(n):
        fp = f[p]
        sre = 0.0
        sim = 0.0
        # allowed 1-based m have parity (n - (p+1)) mod 2
        m0 = 0 if (n - p) % 2 == 0 else 1
        for m in range(m0, n, 2):
            dr = lre[p] + lre[m]
            di = lim[p] + lim[m]
            w = g[m] / (dr * dr + di * di)
            sre += fp * w * dr
            sim -= fp * w * di
        re += sre
        im += sim
    return complex(re, im)


def covariance_element_weak(params: ChainParams, j: int, k: int) -> complex:
    """Single weak-coupling matrix element C_{j,k} by the direct double sum.

    O(n^2) per element; usable up to n = 100000 (roughly a minute of
    single-core work at the cap).
    """
    n = params.n
    if not (1 <= j <= n and 1 <= k <= n):
        raise ValueError(f"site indices ({j}, {k}) out of range for n={n}")
    if n > ELEMENT_SIZE_CAP:
        raise SizeGuardError(
            f"covariance_element_weak is O(n^2) per element; refusing n={n} > {ELEMENT_SIZE_CAP}"
        )
    spec = mode_energies(n, params.eps, params.omega)
    sin_a = np.sin(spec.a)
    f = sin_a * np.sin(spec.a * j)
    g = sin_a * np.sin(spec.a * k)
    s = _element_sum(f, g, spec.lam.real.copy(), spec.lam.imag.copy(), n)
    # sign convention as in _kernel
    return complex(s * (32.0 * params.eps * params.mu0 / (n + 1) ** 2))


def midpoint_current_weak(params: ChainParams) -> complex:
    """Weak-coupling current amplitude on the central bond.

    Element fast path for scaling studies at large n; uses the same
    observable convention as `observables.current_profile`.
    """
    mid = (params.n + 1) // 2
    c = covariance_element_weak(params, mid, mid + 1)
    return 4.0 * (-1.0) ** (mid + 1) * c


def resonance_pattern(n: int, p: int, m: int) -> np.ndarray:
    """Two-eigenfunction amplitude pattern of a resolved resonance (p, m).

    |sin(p pi x) sin(m pi y) + sin(m pi x) sin(p pi y)| on the grid
    x = j/(n+1), normalized to unit maximum.
    """
    if not (1 <= p <= n and 1 <= m <= n):
        raise ValueError(f"mode indices ({p}, {m}) out of range for n={n}")
    if (p + m - n) % 2 != 0:
        raise ValueError(f"mode pair ({p}, {m}) violates the parity rule p+m = n mod 2")
    x = np.arange(1, n + 1) / (n + 1)
    sp = np.sin(p * np.pi * x)
    sm = np.sin(m * np.pi * x)
    pat = np.abs(np.outer(sp, sm) + np.outer(sm, sp))
    return pat / pat.max()


def pattern_overlap(
    C: CovarianceMatrix | np.ndarray, pattern: np.ndarray, trim: int = 4
) -> float:
    """Normalized shape overlap between |C| and a resonance pattern.

    Both are mean-removed and unit-normalized; 1 means identical shape.
    `trim` rows/columns are dropped at each edge: the bath source sits at
    the corners and at strong coupling its local intensity exceeds the
    bulk pattern by an order of magnitude without carrying any shape
    information about the resonance.
    """
    data = C.data if isinstance(C, CovarianceMatrix) else np.asarray(C)
    if data.shape != pattern.shape:
        raise ValueError(f"shape mismatch: {data.shape} vs {pattern.shape}")
    if trim < 0 or 2 * trim >= data.shape[0] - 1:
        raise ValueError(f"trim={trim} leaves no interior for n={data.shape[0]}")
    sl = slice(trim, data.shape[0] - trim)
    a = np.abs(data)[sl, sl].ravel()
    b = np.asarray(pattern, dtype=float)[sl, sl].ravel()
    a = a - a.mean()
    b = b - b.mean()
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("overlap undefined for a constant or zero matrix")
    return float(a @ b / (na * nb))
