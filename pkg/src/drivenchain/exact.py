"""Exact (non-perturbative) solvers for the stationary covariance matrix.

The oscillating steady state is fixed by the complex-symmetric Sylvester
equation

    A C + C A = -4 eps S,      A = 2 (J + i eps R) - (omega/2) I.

Two independent routes are provided: a brute-force solve of the flattened
n^2 x n^2 linear system (`solve_dense`, the oracle) and an eigenbasis
solve exploiting the transpose-orthogonality of the eigenvectors of the
complex-symmetric A (`solve_spectral`, the workhorse).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainParams, build_static_matrices
from .errors import DefectiveMatrixError, SingularSystemError, SizeGuardError

DENSE_SIZE_CAP = 64
SPECTRAL_SIZE_CAP = 4096
EIGENBASIS_COND_CAP = 1e8


@dataclass(frozen=True)
class CovarianceMatrix:
    """The n x n complex matrix of oscillating two-point amplitudes.

    Only the minus-branch matrix is stored; the plus branch is determined
    entrywise by C+_{j,k} = (-1)^(j+k+1) C-_{j,k}.
    """

    n: int
    data: np.ndarray
    params: ChainParams
    method: str

    def c_plus(self) -> np.ndarray:
        j = np.arange(1, self.n + 1)
        sign = (-1.0) ** (j[:, None] + j[None, :] + 1)
        return sign * self.data

    def symmetry_defect(self) -> float:
        """max |C_{j,k} - C_{k,j}| / max |C|."""
        scale = np.abs(self.data).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(self.data - self.data.T).max() / scale)

    def mirror_parity_defect(self) -> float:
        """max |C_{n+1-j,n+1-k} - (-1)^n C_{j,k}| / max |C|."""
        scale = np.abs(self.data).max()
        if scale == 0.0:
            return 0.0
        flipped = self.data[::-1, ::-1]
        sign = (-1.0) ** self.n
        return float(np.abs(flipped - sign * self.data).max() / scale)


@dataclass(frozen=True)
class SylvesterSystem:
    """Coefficient matrix and source of the stationary equation."""

    A: np.ndarray
    source: np.ndarray


def build_system(params: ChainParams) -> SylvesterSystem:
    mats = build_static_matrices(params)
    n = params.n
    A = 2.0 * (mats.J + 1j * params.eps * mats.R) - (params.omega / 2.0) * np.eye(n)
    source = -4.0 * params.eps * mats.S
    return SylvesterSystem(A=A, source=source)


def residual_norm(C: CovarianceMatrix | np.ndarray, params: ChainParams) -> float:
    """Relative max-norm residual ||A C + C A + 4 eps S|| / ||4 eps S||."""
    data = C.data if isinstance(C, CovarianceMatrix) else np.asarray(C)
    sys = build_system(params)
    if data.shape != sys.A.shape:
        raise ValueError(f"covariance shape {data.shape} does not match n={params.n}")
    res = sys.A @ data + data @ sys.A - sys.source
    return float(np.abs(res).max() / np.abs(sys.source).max())


def solve_dense(params: ChainParams) -> CovarianceMatrix:
    """Solve the flattened n^2 x n^2 system directly.

    O(n^6) work; guarded at n <= 64.  Exists as the independent oracle for
    `solve_spectral`, not for production use.
    """
    n = params.n
    if n > DENSE_SIZE_CAP:
        raise SizeGuardError(f"solve_dense is O(n^6); refusing n={n} > {DENSE_SIZE_CAP}")
    sys = build_system(params)
    eye = np.eye(n)
    # row-major vec: vec(A C) = (A kron I) vec(C), vec(C A) = (I kron A^T) vec(C);
    # A is symmetric so both factors use A itself.
    op = np.kron(sys.A, eye) + np.kron(eye, sys.A)
    try:
        vec = np.linalg.solve(op, sys.source.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            f"flattened stationary operator singular at omega={params.omega}, "
            f"eps={params.eps}, n={n}"
        ) from exc
    C = vec.reshape(n, n)
    rel = np.abs(op @ vec - sys.source.reshape(-1)).max() / np.abs(sys.source).max()
    if not np.isfinite(rel) or rel > 1e-6:
        raise SingularSystemError(
            f"flattened solve residual {rel:.2e} indicates numerical rank deficiency"
        )
    C = 0.5 * (C + C.T) * params.mu0
    return CovarianceMatrix(n=n, data=C, params=params, method="dense")


def _eigenbasis(A: np.ndarray):
    """Eigen-decomposition A V = V diag(beta) plus the inverse basis W = V^-1.

    For generic parameters the eigenvectors of the complex-symmetric A are
    transpose-orthogonal, but at degenerate eigenvalues (e.g. omega = 0)
    numpy returns an arbitrary basis of the degenerate subspace; using the
    explicit inverse instead of Psi^T keeps the solve valid there too.
    """
    beta, V = np.linalg.eig(A)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > EIGENBASIS_COND_CAP:
        raise DefectiveMatrixError(
            f"eigenvector condition number {cond:.2e} exceeds {EIGENBASIS_COND_CAP:.0e}; "
            "perturb omega by ~1e-12 or fall back to solve_dense"
        )
    W = np.linalg.inv(V)
    return beta, V, W


def solve_spectral(params: ChainParams, refine: int = 2) -> CovarianceMatrix:
    """Eigenbasis solve of the stationary Sylvester equation.

    Expands C in outer products of eigenvectors of A; the coefficient of
    (psi_j, psi_k) is (W source W^T)_{j,k} / (beta_j + beta_k) with
    W = V^-1.  A few rounds of iterative refinement push the residual to
    ~1e-13 even close to resonances, where the small denominators amplify
    eigensolver noise.
    """
    n = params.n
    if n > SPECTRAL_SIZE_CAP:
        raise SizeGuardError(f"solve_spectral is O(n^3); refusing n={n} > {SPECTRAL_SIZE_CAP}")
    sys = build_system(params)
    beta, V, W = _eigenbasis(sys.A)
    denom = beta[:, None] + beta[None, :]

    def solve_rhs(rhs: np.ndarray) -> np.ndarray:
        lam = (W @ rhs @ W.T) / denom
        return V @ lam @ V.T

    C = solve_rhs(sys.source)
    src_scale = np.abs(sys.source).max()
    for _ in range(refine):
        res = sys.A @ C + C @ sys.A - sys.source
        if np.abs(res).max() <= 1e-14 * src_scale:
            break
        C = C - solve_rhs(res)
    C = 0.5 * (C + C.T) * params.mu0
    return CovarianceMatrix(n=n, data=C, params=params, method="spectral")
