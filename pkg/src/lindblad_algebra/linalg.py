"""Dense complex linear algebra underlying the superoperator constructions.

Density matrices are vectorised row-first, so that for any operators ``L``
and ``R``

    vec(L @ rho @ R) == kron(L, R.T) @ vec(rho) == odot(L, R) @ vec(rho)

and the product rule ``odot(A, B) @ odot(C, D) == odot(A @ C, D @ B)`` holds.
Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, ShapeError, SingularMatrixError

#: Relative tolerance for structural checks (Hermiticity, trace, ...).
STRUCTURE_TOL = 1e-10
#: Relative singular value cutoff for pseudo-inverses.
PINV_RTOL = 1e-12
#: Angular distance (rad) to the negative real axis that triggers a branch warning.
BRANCH_ANGLE = 0.1

__all__ = [
    "STRUCTURE_TOL",
    "PINV_RTOL",
    "BRANCH_ANGLE",
    "LogResult",
    "as_matrix",
    "as_square",
    "dag",
    "commutator",
    "anticommutator",
    "hs_inner",
    "hs_norm",
    "is_hermitian",
    "vec",
    "unvec",
    "odot",
    "mat_exp",
    "mat_log",
    "hermitian_eig",
    "pseudo_inverse",
    "su_generators",
]


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite square complex array."""
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def is_hermitian(m: np.ndarray, tol: float = STRUCTURE_TOL) -> bool:
    """True when ``||m - m^dagger||_F <= tol * max(||m||_F, 1)``."""
    m = np.asarray(m)
    return float(np.linalg.norm(m - dag(m))) <= tol * max(float(np.linalg.norm(m)), 1.0)


def vec(m) -> np.ndarray:
    """Row-major vectorisation of a square matrix.

    >>> vec([[0, 1], [2, 3]]).real
    array([0., 1., 2., 3.])
    """
    return as_square(m).reshape(-1).copy()


def unvec(v) -> np.ndarray:
    """Inverse of :func:`vec`; the length of ``v`` must be a perfect square."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    n = math.isqrt(v.size)
    if n == 0 or n * n != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(n, n).copy()


def odot(left, right) -> np.ndarray:
    """Superoperator of ``rho -> left @ rho @ right``, i.e. ``kron(left, right.T)``."""
    left = as_square(left, "left operator")
    right = as_square(right, "right operator")
    if left.shape != right.shape:
        raise DimensionError(
            f"left and right operators differ in dimension: {left.shape} vs {right.shape}"
        )
    return np.kron(left, right.T)


def mat_exp(m) -> np.ndarray:
    """Matrix exponential (Pade scaling and squaring)."""
    return scipy.linalg.expm(as_square(m))


class LogResult(NamedTuple):
    log: np.ndarray
    branch_warning: bool


def mat_log(m, singular_rtol: float = 1e-13) -> LogResult:
    """Principal matrix logarithm with a branch-proximity flag.

    Eigenvalue arguments of the result lie in ``(-pi, pi]``. ``branch_warning``
    is set when any eigenvalue of ``m`` is within ``BRANCH_ANGLE`` radians of
    the negative real axis, where the principal branch is discontinuous.

    Raises:
        SingularMatrixError: if the smallest singular value of ``m`` is below
            ``singular_rtol`` times the largest.
    """
    m = as_square(m)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= singular_rtol * sv[0]:
        raise SingularMatrixError(
            f"matrix is singular to working precision (sigma_min/sigma_max = "
            f"{sv[-1] / sv[0] if sv[0] else 0.0:.3e})"
        )
    eigs = np.linalg.eigvals(m)
    near_cut = bool(np.any(math.pi - np.abs(np.angle(eigs)) < BRANCH_ANGLE))
    # logm picks its Pade parameters with a randomised 1-norm estimator that
    # draws from the global numpy RNG; pin it so results are reproducible
    state = np.random.get_state()
    try:
        np.random.seed(0)
        log = np.asarray(scipy.linalg.logm(m), dtype=np.complex128)
    finally:
        np.random.set_state(state)
    return LogResult(log, near_cut)


def hermitian_eig(m, tol: float = STRUCTURE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues ``w`` and a unitary ``u`` whose columns
    are eigenvectors, so that ``u @ diag(w) @ u^dagger == m``.
    """
    m = as_square(m)
    dev = float(np.linalg.norm(m - dag(m)))
    if dev > tol * float(np.linalg.norm(m)):
        raise ShapeError(f"matrix is not Hermitian (||M - M^dagger|| = {dev:.3e})")
    w, u = np.linalg.eigh(0.5 * (m + dag(m)))
    return w, u


def pseudo_inverse(m, tol: float = PINV_RTOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse; singular values below ``tol * sigma_max`` are dropped."""
    m = as_matrix(m)
    return scipy.linalg.pinv(m, atol=0.0, rtol=tol)


def su_generators(n: int) -> list[np.ndarray]:
    """Generalised Gell-Mann matrices, normalised to ``tr(S_j S_k) = 2 delta_jk``.

    Ordering: symmetric off-diagonal matrices over ``(j, k)``, ``j < k``, in
    lexicographic order, then the antisymmetric ones in the same order, then
    the diagonal ones of increasing size. For ``n = 2`` this is
    ``(sigma_x, sigma_y, sigma_z)``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"SU(N) generators need an integer N >= 2, got {n!r}")
    n = int(n)
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    sym, asym, diag = [], [], []
    for j, k in pairs:
        s = np.zeros((n, n), dtype=np.complex128)
        s[j, k] = s[k, j] = 1.0
        sym.append(s)
        a = np.zeros((n, n), dtype=np.complex128)
        a[j, k] = -1j
        a[k, j] = 1j
        asym.append(a)
    for l in range(1, n):
        d = np.zeros(n, dtype=np.complex128)
        d[:l] = 1.0
        d[l] = -l
        diag.append(math.sqrt(2.0 / (l * (l + 1))) * np.diag(d))
    return sym + asym + diag
