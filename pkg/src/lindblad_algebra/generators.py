"""Superoperators of the Lindblad-Kossakowski master equation.

All generators act on row-major vectorised density matrices (see
:mod:`lindblad_algebra.linalg`). Hamiltonians carry units of energy and are
divided by ``hbar``; Lindblad operators are dimensionless and their rates
carry units of inverse time.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DimensionError, DomainError, ShapeError
from .linalg import (
    STRUCTURE_TOL,
    as_square,
    dag,
    hermitian_eig,
    is_hermitian,
    odot,
)

#: Eigenvalue floor below which a rate matrix counts as not positive semidefinite.
PSD_FLOOR = -1e-10
#: Terms with ``|rate| * ||op||_HS^2`` below this are dropped by :func:`canonicalize`.
DROP_TOL = 1e-12
#: Hilbert-Schmidt norm of canonical Lindblad operators (that of a Pauli matrix).
CANONICAL_OP_NORM = float(np.sqrt(2.0))

__all__ = [
    "PSD_FLOOR",
    "DROP_TOL",
    "CANONICAL_OP_NORM",
    "GammaReport",
    "LindbladSpec",
    "CanonicalForm",
    "LambShiftInput",
    "LambShiftResult",
    "validate_gamma",
    "hamiltonian_superop",
    "lindblad_single_superop",
    "lindblad_superop",
    "dissipator_blocks",
    "remove_trace",
    "canonicalize",
    "lamb_shift",
    "lamb_shift_generator",
    "negative_rates",
    "trace_functional",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _check_hbar(hbar: float) -> float:
    hbar = float(hbar)
    if not hbar > 0.0:
        raise DomainError(f"hbar must be positive, got {hbar}")
    return hbar


def trace_functional(n: int) -> np.ndarray:
    """``vec(I)``; ``vec(I).conj() @ vec(rho) == tr(rho)``."""
    return np.eye(n, dtype=np.complex128).reshape(-1)


@dataclass(frozen=True)
class GammaReport:
    hermitian: bool
    hermiticity_deviation: float
    min_eigenvalue: float
    psd: bool


def validate_gamma(gamma) -> GammaReport:
    """Report Hermiticity and positivity of a Kossakowski (rate) matrix.

    The minimum eigenvalue is that of the Hermitian part of ``gamma``.
    """
    g = as_square(gamma, "gamma")
    dev = float(np.linalg.norm(g - dag(g)))
    herm = dev <= STRUCTURE_TOL * max(float(np.linalg.norm(g)), 1.0)
    w = np.linalg.eigvalsh(0.5 * (g + dag(g)))
    lam = float(w[0])
    return GammaReport(herm, dev, lam, bool(herm and lam >= PSD_FLOOR))


@dataclass(frozen=True)
class LindbladSpec:
    """Rate matrix ``gamma`` together with the ordered operators it couples.

    ``physical`` defaults to whether ``gamma`` is positive semidefinite.
    Passing ``physical=True`` for an indefinite ``gamma`` is an error; algebraic
    intermediates (commutators, BCH terms) use ``physical=False``.
    """

    gamma: np.ndarray
    ops: tuple[np.ndarray, ...]
    physical: bool | None = None

    def __post_init__(self):
        gamma = _frozen(as_square(self.gamma, "gamma"))
        ops = tuple(_frozen(as_square(op, "Lindblad operator")) for op in self.ops)
        if len(ops) != gamma.shape[0]:
            raise DimensionError(
                f"gamma is {gamma.shape[0]}x{gamma.shape[0]} but {len(ops)} operators were given"
            )
        if not ops:
            raise DimensionError("at least one Lindblad operator is required")
        if len({op.shape for op in ops}) != 1:
            raise DimensionError("Lindblad operators differ in dimension")
        report = validate_gamma(gamma)
        if not report.hermitian:
            raise ShapeError(
                f"gamma is not Hermitian (deviation {report.hermiticity_deviation:.3e})"
            )
        if self.physical and not report.psd:
            raise ShapeError(
                f"gamma marked physical has negative eigenvalue {report.min_eigenvalue:.3e}"
            )
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "ops", ops)
        if self.physical is None:
            object.__setattr__(self, "physical", report.psd)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @classmethod
    def diagonal(cls, rates: Sequence[float], ops: Sequence, physical: bool | None = None):
        return cls(np.diag(np.asarray(rates, dtype=np.complex128)), tuple(ops), physical)


@dataclass(frozen=True)
class CanonicalForm:
    """Traceless Hamiltonian plus signed rates on traceless, normalised operators."""

    hamiltonian: np.ndarray
    terms: tuple[tuple[float, np.ndarray], ...] = ()
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "hamiltonian", _frozen(self.hamiltonian))
        terms = tuple((float(rate), _frozen(op)) for rate, op in self.terms)
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def rates(self) -> list[float]:
        return [rate for rate, _ in self.terms]

    @property
    def ops(self) -> list[np.ndarray]:
        return [op for _, op in self.terms]

    def superoperator(self) -> np.ndarray:
        g = hamiltonian_superop(self.hamiltonian, self.hbar)
        for rate, op in self.terms:
            g = g + rate * lindblad_single_superop(op)
        return g


def hamiltonian_superop(h, hbar: float = 1.0) -> np.ndarray:
    """``(-i/hbar) (H odot I - I odot H)``, the generator of ``rho -> -(i/hbar)[H, rho]``."""
    h = as_square(h, "Hamiltonian")
    hbar = _check_hbar(hbar)
    if not is_hermitian(h):
        raise ShapeError("Hamiltonian is not Hermitian")
    eye = np.eye(h.shape[0], dtype=np.complex128)
    return (-1j / hbar) * (odot(h, eye) - odot(eye, h))


def lindblad_single_superop(a) -> np.ndarray:
    """Dissipator ``rho -> A rho A^dagger - 1/2 {A^dagger A, rho}`` as a matrix."""
    a = as_square(a, "Lindblad operator")
    eye = np.eye(a.shape[0], dtype=np.complex128)
    ada = dag(a) @ a
    return odot(a, dag(a)) - 0.5 * odot(eye, ada) - 0.5 * odot(ada, eye)


def dissipator_blocks(ops) -> np.ndarray:
    """All ``D[k, j] = rho -> L_k rho L_j^dagger - 1/2 {L_j^dagger L_k, rho}`` at once.

    Returns an array of shape ``(M, M, N**2, N**2)``.
    """
    ops = np.asarray(ops, dtype=np.complex128)
    m, n, _ = ops.shape
    eye = np.eye(n)
    jump = np.einsum("kab,jcd->kjacbd", ops, ops.conj())
    prod = np.einsum("jba,kbc->kjac", ops.conj(), ops)
    left = np.einsum("kjab,cd->kjacbd", prod, eye)
    right = np.einsum("ab,kjdc->kjacbd", eye, prod)
    return (jump - 0.5 * (left + right)).reshape(m, m, n * n, n * n)


def lindblad_superop(spec: LindbladSpec) -> np.ndarray:
    r"""General dissipator ``sum_{j,k} gamma[k, j] (L_k rho L_j^dagger - 1/2 {L_j^dagger L_k, rho})``."""
    return np.einsum("kj,kjxy->xy", spec.gamma, dissipator_blocks(spec.ops))


def remove_trace(a, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Split ``a`` into a traceless operator and a compensating Hamiltonian.

    Returns ``(a0, h)`` with ``a0 = a - (tr a / N) I`` and
    ``h = (i hbar / 2N) (conj(tr a) a - (tr a) a^dagger)``, so that
    ``L1(a) == L1(a0) + Hs(h)``.
    """
    a = as_square(a, "Lindblad operator")
    hbar = _check_hbar(hbar)
    n = a.shape[0]
    tr = np.trace(a)
    a0 = a - (tr / n) * np.eye(n)
    h = (1j * hbar / (2 * n)) * (np.conj(tr) * a - tr * dag(a))
    return a0, 0.5 * (h + dag(h))


def canonicalize(h, spec: LindbladSpec, hbar: float = 1.0) -> CanonicalForm:
    """Bring ``(H, gamma, ops)`` to canonical form.

    The rate matrix is diagonalised and its eigenvectors mix the operators;
    operator traces are moved into the Hamiltonian; the Hamiltonian is made
    traceless; each operator is rescaled to Hilbert-Schmidt norm ``sqrt(2)``
    with the squared norm folded into its rate. Negligible terms are dropped
    and the remaining ones are sorted by rate. The generator is unchanged.
    """
    h = as_square(h, "Hamiltonian")
    hbar = _check_hbar(hbar)
    n = spec.dim
    if h.shape != (n, n):
        raise DimensionError(f"Hamiltonian is {h.shape}, operators are {n}x{n}")
    if not is_hermitian(h):
        raise ShapeError("Hamiltonian is not Hermitian")
    rates, u = hermitian_eig(spec.gamma)
    ops = np.asarray(spec.ops)
    # A_m = sum_k U[k, m] L_k
    mixed = np.einsum("km,kab->mab", u, ops)
    h = np.array(h, dtype=np.complex128)
    terms = []
    for rate, a in zip(rates, mixed):
        a0, h_shift = remove_trace(a, hbar)
        h = h + rate * h_shift
        norm2 = float(np.vdot(a0, a0).real)
        if abs(rate) * norm2 < DROP_TOL:
            continue
        terms.append((rate * norm2 / CANONICAL_OP_NORM**2, a0 * (CANONICAL_OP_NORM / np.sqrt(norm2))))
    h = h - (np.trace(h) / n) * np.eye(n)
    h = 0.5 * (h + dag(h))
    terms.sort(key=lambda t: t[0])
    return CanonicalForm(h, tuple(terms), hbar)


def negative_rates(rates: Sequence[float], tol: float = 1e-10) -> list[float]:
    """Rates below ``-tol``."""
    return [float(r) for r in rates if r < -tol]


Convention = Literal["paper", "standard_2i"]


@dataclass(frozen=True)
class LambShiftInput:
    """Per-frequency response matrices ``R(w)`` and the operators ``A_k(w)`` they couple.

    Computing ``R`` from bath correlation functions is left to the caller.
    """

    r_per_omega: Mapping
    ops_per_omega: Mapping

    def __post_init__(self):
        if set(self.r_per_omega) != set(self.ops_per_omega):
            raise DimensionError("R and operator maps have different frequency labels")
        dims = set()
        for w in self.r_per_omega:
            r = as_square(self.r_per_omega[w], f"R({w})")
            ops = [as_square(op, f"A({w})") for op in self.ops_per_omega[w]]
            if r.shape[0] != len(ops):
                raise DimensionError(f"R({w}) is {r.shape[0]}x{r.shape[0]} but {len(ops)} operators given")
            dims.update(op.shape for op in ops)
        if len(dims) > 1:
            raise DimensionError("operators differ in dimension across frequencies")

    @property
    def frequencies(self) -> list:
        return list(self.r_per_omega)


@dataclass(frozen=True)
class LambShiftResult:
    gamma_per_omega: dict
    s_per_omega: dict
    hamiltonian: np.ndarray
    convention: str
    hermitian: bool
    hermiticity_deviation: float


def lamb_shift(
    inp: LambShiftInput, convention: Convention = "paper", require_hermitian: bool = False
) -> LambShiftResult:
    """Split each ``R(w)`` into rates and a Lamb-shift Hamiltonian.

    ``gamma(w) = (R + R^dagger) / 2`` and ``H_LS = sum_{w,j,k} S_jk(w) A_j^dagger(w) A_k(w)``.
    With ``convention="paper"``, ``S = (R - R^dagger) / 2``, which is
    anti-Hermitian and in general makes ``H_LS`` anti-Hermitian as well; with
    ``"standard_2i"``, ``S = (R - R^dagger) / 2i`` and ``H_LS`` is Hermitian.
    The result reports which of the two holds; ``require_hermitian`` turns a
    non-Hermitian ``H_LS`` into a :class:`ShapeError`.
    """
    if convention not in ("paper", "standard_2i"):
        raise DomainError(f"unknown Lamb-shift convention {convention!r}")
    denom = 2.0 if convention == "paper" else 2.0j
    gammas, ss = {}, {}
    h_ls = None
    for w in inp.frequencies:
        r = as_square(inp.r_per_omega[w])
        ops = [as_square(op) for op in inp.ops_per_omega[w]]
        gammas[w] = 0.5 * (r + dag(r))
        s = (r - dag(r)) / denom
        ss[w] = s
        for j, aj in enumerate(ops):
            for k, ak in enumerate(ops):
                term = s[j, k] * (dag(aj) @ ak)
                h_ls = term if h_ls is None else h_ls + term
    if h_ls is None:
        raise DimensionError("no frequencies given")
    dev = float(np.linalg.norm(h_ls - dag(h_ls)))
    herm = dev <= STRUCTURE_TOL * max(float(np.linalg.norm(h_ls)), 1.0)
    if require_hermitian and not herm:
        raise ShapeError(f"Lamb-shift Hamiltonian is not Hermitian under the {convention!r} convention (deviation {dev:.3e})")
    return LambShiftResult(gammas, ss, h_ls, convention, herm, dev)


def lamb_shift_generator(h0, inp: LambShiftInput, hbar: float = 1.0) -> np.ndarray:
    """Full generator ``Hs(H0 + H_LS) + sum_w L(gamma(w), A(w))`` (standard convention)."""
    res = lamb_shift(inp, "standard_2i")
    g = hamiltonian_superop(as_square(h0) + res.hamiltonian, hbar)
    for w in inp.frequencies:
        g = g + lindblad_superop(LindbladSpec(res.gamma_per_omega[w], tuple(inp.ops_per_omega[w])))
    return g
