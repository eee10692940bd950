"""Superoperators as vectors: Lindblad-form basis, its dual, and projections.

A superoperator on an ``N``-level system is flattened row-major into a vector
of length ``N**4``. The basis consists of ``Hs(S_i)`` for the ``N**2 - 1``
generators of SU(N), followed by the dissipators with a unit rate matrix at
slot ``(j, k)``, i.e. ``rho -> S_j rho S_k - 1/2 {S_k S_j, rho}``, in row-major
``(j, k)`` order. The recovered ``gamma`` is then exactly the rate matrix of
:func:`~lindblad_algebra.generators.lindblad_superop` over the generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, SingularMatrixError
from .generators import (
    CanonicalForm,
    LindbladSpec,
    _frozen,
    canonicalize,
    dissipator_blocks,
    hamiltonian_superop,
    negative_rates,
)
from .linalg import PINV_RTOL, as_square, dag, mat_log, pseudo_inverse, su_generators

#: Minimum ratio of extreme singular values for the basis to count as independent.
INDEPENDENCE_RTOL = 1e-8

__all__ = [
    "SuperBasis",
    "DualBasis",
    "GeneratorDecomposition",
    "ChannelExtraction",
    "build_basis",
    "build_dual",
    "standard_basis",
    "project_generator",
    "reconstruct",
    "decompose",
    "extract_lindblad_from_channel",
]


@dataclass(frozen=True)
class SuperBasis:
    sysdim: int
    hbar: float
    vectors: np.ndarray
    generators: tuple[np.ndarray, ...]

    @property
    def n_hamiltonian(self) -> int:
        return len(self.generators)

    @property
    def size(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class DualBasis:
    vectors: np.ndarray


def build_basis(n: int, hbar: float = 1.0) -> SuperBasis:
    """Lindblad-form basis of ``(N**2 - 1) * N**2`` flattened superoperators.

    Raises:
        SingularMatrixError: the columns are not numerically independent.
    """
    gens = su_generators(n)
    cols = [hamiltonian_superop(s, hbar).reshape(-1) for s in gens]
    # slot (j, k) carries a unit rate on rho -> S_j rho S_k^dagger - 1/2 {S_k^dagger S_j, rho}
    blocks = dissipator_blocks(gens)
    m = len(gens)
    b = np.column_stack(cols + [blocks.reshape(m * m, -1)[i] for i in range(m * m)])
    sv = np.linalg.svd(b, compute_uv=False)
    if sv[-1] <= INDEPENDENCE_RTOL * sv[0]:
        raise SingularMatrixError(
            f"Lindblad-form basis for N={n} is not linearly independent "
            f"(sigma_min/sigma_max = {sv[-1] / sv[0]:.3e})"
        )
    return SuperBasis(int(n), float(hbar), _frozen(b), tuple(_frozen(s) for s in gens))


def build_dual(basis: SuperBasis, tol: float = PINV_RTOL) -> DualBasis:
    """Bi-orthogonal dual ``G = pinv(B)^dagger`` with ``G^dagger B = I``."""
    pinv = pseudo_inverse(basis.vectors, tol)
    g = dag(pinv)
    if np.linalg.matrix_rank(basis.vectors, tol=tol * np.linalg.norm(basis.vectors, 2)) < basis.size:
        raise SingularMatrixError("basis is rank deficient; no bi-orthogonal dual exists")
    return DualBasis(_frozen(g))


@lru_cache(maxsize=16)
def standard_basis(n: int, hbar: float = 1.0) -> tuple[SuperBasis, DualBasis]:
    """Cached ``(basis, dual)`` pair for an ``n``-level system."""
    basis = build_basis(n, hbar)
    return basis, build_dual(basis)


@dataclass(frozen=True)
class GeneratorDecomposition:
    """Coordinates of a generator in the Lindblad-form basis.

    ``h`` holds the real parts of the Hamiltonian coordinates; the complete
    complex coordinate vector is kept in ``coefficients``.
    """

    sysdim: int
    coefficients: np.ndarray
    h: np.ndarray
    gamma: np.ndarray
    residual_norm: float
    in_span: bool
    hbar: float = 1.0

    def hamiltonian(self, basis: SuperBasis | None = None) -> np.ndarray:
        gens = basis.generators if basis is not None else su_generators(self.sysdim)
        return np.einsum("k,kab->ab", self.h, np.asarray(gens))

    def canonical(self, basis: SuperBasis | None = None) -> CanonicalForm:
        """Canonical form of ``H = sum h_k S_k`` and the Hermitian part of ``gamma``."""
        gens = basis.generators if basis is not None else su_generators(self.sysdim)
        g = 0.5 * (self.gamma + dag(self.gamma))
        spec = LindbladSpec(g, tuple(gens), physical=False)
        return canonicalize(self.hamiltonian(basis), spec, self.hbar)


def _check_superop(g, basis: SuperBasis) -> np.ndarray:
    g = as_square(g, "superoperator")
    side = basis.sysdim**2
    if g.shape != (side, side):
        raise DimensionError(f"superoperator is {g.shape}, basis expects {side}x{side}")
    return g


def project_generator(
    g, basis: SuperBasis, dual: DualBasis, span_tol: float = 1e-10
) -> GeneratorDecomposition:
    """Coordinates ``dual^dagger vec(G)`` and the norm of the out-of-span remainder."""
    g = _check_superop(g, basis)
    flat = g.reshape(-1)
    coeffs = dag(dual.vectors) @ flat
    residual = float(np.linalg.norm(flat - basis.vectors @ coeffs))
    m = basis.n_hamiltonian
    return GeneratorDecomposition(
        sysdim=basis.sysdim,
        coefficients=_frozen(coeffs),
        h=np.real(coeffs[:m]).copy(),
        gamma=_frozen(coeffs[m:].reshape(m, m)),
        residual_norm=residual,
        in_span=residual <= span_tol * max(float(np.linalg.norm(flat)), np.finfo(float).tiny),
        hbar=basis.hbar,
    )


def reconstruct(decomposition: GeneratorDecomposition, basis: SuperBasis) -> np.ndarray:
    if decomposition.sysdim != basis.sysdim or decomposition.coefficients.size != basis.size:
        raise DimensionError("decomposition and basis belong to different dimensions")
    side = basis.sysdim**2
    return (basis.vectors @ decomposition.coefficients).reshape(side, side)


@dataclass(frozen=True)
class Decomposed:
    decomposition: GeneratorDecomposition
    canonical: CanonicalForm


def decompose(g, hbar: float = 1.0) -> Decomposed:
    """Project ``g`` on the cached standard basis and canonicalise the result."""
    g = as_square(g, "superoperator")
    n = int(round(np.sqrt(g.shape[0])))
    if n * n != g.shape[0]:
        raise DimensionError(f"superoperator side {g.shape[0]} is not a perfect square")
    basis, dual = standard_basis(n, float(hbar))
    dec = project_generator(g, basis, dual)
    return Decomposed(dec, dec.canonical(basis))


@dataclass(frozen=True)
class ChannelExtraction:
    decomposition: GeneratorDecomposition
    canonical: CanonicalForm
    generator: np.ndarray
    branch_warning: bool
    divisible_norm: float
    residual_norm: float
    negative_rates: list[float]

    @property
    def has_negative(self) -> bool:
        return bool(self.negative_rates)


def extract_lindblad_from_channel(
    t,
    tol: float = PINV_RTOL,
    hbar: float = 1.0,
    basis: SuperBasis | None = None,
    dual: DualBasis | None = None,
) -> ChannelExtraction:
    """Lindblad form of the principal logarithm of a channel superoperator.

    The logarithm is projected onto the Lindblad-form basis; ``divisible_norm``
    is the norm of the in-span part and ``residual_norm`` of what is left.
    Complete positivity of ``t`` is not checked.

    Raises:
        SingularMatrixError: ``t`` is not invertible.
    """
    t = as_square(t, "channel")
    n = int(round(np.sqrt(t.shape[0])))
    if n * n != t.shape[0]:
        raise DimensionError(f"channel side {t.shape[0]} is not a perfect square")
    if basis is None:
        basis, cached = standard_basis(n, float(hbar))
        if dual is None and tol == PINV_RTOL:
            dual = cached
    if dual is None:
        dual = build_dual(basis, tol)
    g, warn = mat_log(t)
    dec = project_generator(g, basis, dual)
    canon = dec.canonical(basis)
    divisible = float(np.linalg.norm(basis.vectors @ dec.coefficients))
    return ChannelExtraction(
        decomposition=dec,
        canonical=canon,
        generator=g,
        branch_warning=warn,
        divisible_norm=divisible,
        residual_norm=dec.residual_norm,
        negative_rates=negative_rates(canon.rates),
    )
