"""Closed-form commutators of Hamiltonian and dissipative generators.

Each closed form returns :class:`GeneratorTerms`, a Hamiltonian plus signed
single-operator dissipators, so the coherent part of a commutator stays
inspectable. :meth:`GeneratorTerms.superoperator` evaluates it to a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ShapeError
from .generators import (
    CanonicalForm,
    LindbladSpec,
    _check_hbar,
    _frozen,
    hamiltonian_superop,
    lindblad_single_superop,
    negative_rates,
)
from .linalg import as_square, commutator, dag, is_hermitian

__all__ = [
    "GeneratorTerms",
    "NegativeRateReport",
    "commutator_super",
    "hh_commutator_closed",
    "hl_commutator_closed",
    "hl_commutator_gamma_pair",
    "ll_commutator_closed",
    "detect_negative_rates",
]


@dataclass(frozen=True)
class GeneratorTerms:
    """``Hs(hamiltonian) + sum_i c_i L1(op_i)`` with signed real ``c_i``."""

    hamiltonian: np.ndarray
    lindblad_terms: tuple[tuple[float, np.ndarray], ...] = ()
    hbar: float = 1.0

    def __post_init__(self):
        h = as_square(self.hamiltonian, "Hamiltonian")
        if not is_hermitian(h):
            raise ShapeError("GeneratorTerms Hamiltonian is not Hermitian")
        object.__setattr__(self, "hamiltonian", _frozen(h))
        terms = tuple((float(c), _frozen(as_square(op))) for c, op in self.lindblad_terms)
        if any(op.shape != h.shape for _, op in terms):
            raise DimensionError("Lindblad operators and Hamiltonian differ in dimension")
        object.__setattr__(self, "lindblad_terms", terms)
        _check_hbar(self.hbar)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def physical(self) -> bool:
        """False as soon as any non-trivial term carries a negative coefficient."""
        return not any(c < 0 and np.any(op != 0) for c, op in self.lindblad_terms)

    def superoperator(self) -> np.ndarray:
        g = hamiltonian_superop(self.hamiltonian, self.hbar)
        for c, op in self.lindblad_terms:
            g = g + c * lindblad_single_superop(op)
        return g

    def __neg__(self) -> GeneratorTerms:
        return GeneratorTerms(
            -self.hamiltonian, tuple((-c, op) for c, op in self.lindblad_terms), self.hbar
        )


def commutator_super(g1, g2) -> np.ndarray:
    g1 = as_square(g1, "first superoperator")
    g2 = as_square(g2, "second superoperator")
    if g1.shape != g2.shape:
        raise DimensionError(f"superoperators differ in shape: {g1.shape} vs {g2.shape}")
    return g1 @ g2 - g2 @ g1


def _hermitian(m, name: str) -> np.ndarray:
    m = as_square(m, name)
    if not is_hermitian(m):
        raise ShapeError(f"{name} is not Hermitian")
    return m


def hh_commutator_closed(h, g, hbar: float = 1.0) -> GeneratorTerms:
    """``[Hs(H), Hs(G)] = Hs(-(i/hbar) [H, G])``."""
    h = _hermitian(h, "H")
    g = _hermitian(g, "G")
    if h.shape != g.shape:
        raise DimensionError("H and G differ in dimension")
    hbar = _check_hbar(hbar)
    out = (-1j / hbar) * commutator(h, g)
    return GeneratorTerms(0.5 * (out + dag(out)), (), hbar)


def hl_commutator_closed(h, a, hbar: float = 1.0) -> GeneratorTerms:
    """``[Hs(H), L1(A)] = -(1/2hbar) L1(A + i[H,A]) + (1/2hbar) L1(A - i[H,A])``."""
    h = _hermitian(h, "H")
    a = as_square(a, "A")
    if h.shape != a.shape:
        raise DimensionError("H and A differ in dimension")
    hbar = _check_hbar(hbar)
    c = 1j * commutator(h, a)
    zero = np.zeros_like(h)
    return GeneratorTerms(zero, ((-0.5 / hbar, a + c), (0.5 / hbar, a - c)), hbar)


def hl_commutator_gamma_pair(h, a, hbar: float = 1.0) -> LindbladSpec:
    """``[Hs(H), L1(A)]`` as one dissipator with ``gamma = -(i/hbar) [[0, -1], [1, 0]]`` on ``{A, [H, A]}``."""
    h = _hermitian(h, "H")
    a = as_square(a, "A")
    if h.shape != a.shape:
        raise DimensionError("H and A differ in dimension")
    hbar = _check_hbar(hbar)
    gamma = (-1j / hbar) * np.array([[0, -1], [1, 0]])
    return LindbladSpec(gamma, (a, commutator(h, a)), physical=False)


def ll_commutator_closed(a, b, hbar: float = 1.0) -> GeneratorTerms:
    """``[L1(A), L1(B)]`` as six signed dissipators plus a coherent term.

    The coherent part is ``Hs((i hbar / 4) [A^dagger A, B^dagger B])``; it is
    independent of ``hbar`` once evaluated.
    """
    a = as_square(a, "A")
    b = as_square(b, "B")
    if a.shape != b.shape:
        raise DimensionError("A and B differ in dimension")
    hbar = _check_hbar(hbar)
    ada = dag(a) @ a
    bdb = dag(b) @ b
    ba = commutator(b, ada)
    ab = commutator(a, bdb)
    terms = (
        (1.0, a @ b),
        (-1.0, b @ a),
        (0.25, b + ba),
        (-0.25, b - ba),
        (0.25, a - ab),
        (-0.25, a + ab),
    )
    h = 0.25j * hbar * commutator(ada, bdb)
    return GeneratorTerms(0.5 * (h + dag(h)), terms, hbar)


@dataclass(frozen=True)
class NegativeRateReport:
    has_negative: bool
    negative_rates: list[float]
    rates: list[float]


def detect_negative_rates(form: CanonicalForm | GeneratorTerms, tol: float = 1e-10) -> NegativeRateReport:
    """Find negative rates after canonicalisation.

    A :class:`GeneratorTerms` is first evaluated, projected onto the
    Lindblad-form basis and canonicalised, so that sign cancellations between
    its individual terms are resolved before judging. Rates do not depend on
    ``hbar``, so the projection always uses the ``hbar = 1`` basis.
    """
    if isinstance(form, GeneratorTerms):
        from .projection import decompose

        form = decompose(form.superoperator()).canonical
    rates = list(form.rates)
    neg = negative_rates(rates, tol)
    return NegativeRateReport(bool(neg), neg, rates)
