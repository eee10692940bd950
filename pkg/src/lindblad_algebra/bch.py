"""Composition of piecewise-constant evolutions.

Segment lists are ordered earliest first. The propagator of a schedule is the
product with the earliest segment as the rightmost factor::

    exp(t_n G_n) ... exp(t_2 G_2) exp(t_1 G_1)

whereas :func:`bch_sequence` takes generators in *matrix* order, approximating
``log(exp(g_0) exp(g_1) ... exp(g_m))``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import commutator_super
from .errors import DimensionError, DomainError
from .linalg import as_square, mat_exp, mat_log

#: Total norm above which the BCH series is not guaranteed to converge.
BCH_NORM_LIMIT = math.log(2.0)
MAX_ORDER = 4

__all__ = [
    "BCH_NORM_LIMIT",
    "MAX_ORDER",
    "EvolutionSegment",
    "BchResult",
    "CombinedGenerator",
    "ConjugatedGenerator",
    "bch_truncated",
    "bch_sequence",
    "schedule_bch",
    "schedule_propagator",
    "exact_combined_generator",
    "conjugated_generator",
    "trotter_compose",
]


@dataclass(frozen=True)
class EvolutionSegment:
    generator: np.ndarray
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "generator", as_square(self.generator, "segment generator"))
        d = float(self.duration)
        if not d >= 0.0:
            raise DomainError(f"segment duration must be nonnegative, got {self.duration}")
        object.__setattr__(self, "duration", d)

    @property
    def exponent(self) -> np.ndarray:
        return self.duration * self.generator


@dataclass(frozen=True)
class BchResult:
    generator: np.ndarray
    order: int
    norm_warning: bool


def _check_order(order: int) -> int:
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise DomainError(f"BCH order must be an integer in 1..{MAX_ORDER}, got {order!r}")
    return int(order)


def _fold(xs: list[np.ndarray], y: np.ndarray, order: int) -> list[np.ndarray]:
    """BCH(X, Y) for graded ``X = sum_d xs[d-1]``, keeping total degree <= order.

    Uses ``X + Y + [X,Y]/2 + [X,[X,Y]]/12 - [Y,[X,Y]]/12 - [Y,[X,[X,Y]]]/24``.
    """
    c = commutator_super
    out = [x.copy() for x in xs] + [np.zeros_like(y) for _ in range(order - len(xs))]
    out[0] = out[0] + y
    xy = {d: c(x, y) for d, x in enumerate(xs, start=1) if d + 1 <= order}
    for d, v in xy.items():
        out[d] += 0.5 * v
        if d + 2 <= order:
            out[d + 1] -= c(y, v) / 12.0
    for d1, x1 in enumerate(xs, start=1):
        for d2, v in xy.items():
            deg = d1 + d2 + 1
            if deg > order:
                continue
            xxy = c(x1, v)
            out[deg - 1] += xxy / 12.0
            if deg + 1 <= order:
                out[deg] -= c(y, xxy) / 24.0
    return out


def bch_truncated(x, y, order: int = 2) -> BchResult:
    """Truncated BCH series for ``log(exp(X) exp(Y))`` through ``order`` (at most 4)."""
    order = _check_order(order)
    x = as_square(x, "X")
    y = as_square(y, "Y")
    if x.shape != y.shape:
        raise DimensionError(f"X and Y differ in shape: {x.shape} vs {y.shape}")
    z = sum(_fold([x], y, order))
    warn = np.linalg.norm(x, 2) + np.linalg.norm(y, 2) > BCH_NORM_LIMIT
    return BchResult(z, order, bool(warn))


def bch_sequence(gens: Sequence, order: int = 2) -> BchResult:
    """Truncated BCH series for ``log(exp(g_0) exp(g_1) ... )``.

    Generators are folded from the left; after each fold only terms of total
    degree ``<= order`` in the generators are kept.
    """
    order = _check_order(order)
    if len(gens) == 0:
        raise DomainError("bch_sequence needs at least one generator")
    gens = [as_square(g, "generator") for g in gens]
    if len({g.shape for g in gens}) != 1:
        raise DimensionError("generators differ in shape")
    acc = [gens[0]]
    for g in gens[1:]:
        acc = _fold(acc, g, order)
    warn = sum(np.linalg.norm(g, 2) for g in gens) > BCH_NORM_LIMIT
    return BchResult(sum(acc), order, bool(warn))


def schedule_bch(segments: Sequence[EvolutionSegment], order: int = 2) -> BchResult:
    """Truncated BCH generator of an earliest-first schedule (total exponent, not a rate)."""
    return bch_sequence([s.exponent for s in reversed(list(segments))], order)


def schedule_propagator(segments: Sequence[EvolutionSegment]) -> np.ndarray:
    if len(segments) == 0:
        raise DomainError("schedule has no segments")
    p = None
    for s in segments:
        step = mat_exp(s.exponent)
        p = step if p is None else step @ p
    return p


class CombinedGenerator(NamedTuple):
    generator: np.ndarray
    branch_warning: bool


def exact_combined_generator(segments: Sequence[EvolutionSegment]) -> CombinedGenerator:
    """Principal logarithm of the schedule propagator (earliest segment rightmost)."""
    segments = list(segments)
    if len({s.generator.shape for s in segments}) > 1:
        raise DimensionError("segment generators differ in shape")
    log, warn = mat_log(schedule_propagator(segments))
    return CombinedGenerator(log, warn)


class ConjugatedGenerator(NamedTuple):
    exact: np.ndarray
    first_order: np.ndarray


def conjugated_generator(hs, t_omega: float, ls, t: float) -> ConjugatedGenerator:
    """Generator of ``exp(t_omega Hs) exp(T Ls) exp(-t_omega Hs)``.

    ``exact`` is ``T exp(t_omega Hs) Ls exp(-t_omega Hs)``; ``first_order`` is
    ``T (Ls + t_omega [Hs, Ls])``, which differs from it at ``O(t_omega**2)``.
    """
    hs = as_square(hs, "Hs")
    ls = as_square(ls, "Ls")
    if hs.shape != ls.shape:
        raise DimensionError("Hs and Ls differ in shape")
    if not t > 0:
        raise DomainError(f"noise duration must be positive, got {t}")
    exact = t * (mat_exp(t_omega * hs) @ ls @ mat_exp(-t_omega * hs))
    first = t * (ls + t_omega * commutator_super(hs, ls))
    return ConjugatedGenerator(exact, first)


def trotter_compose(x, y, n: int) -> np.ndarray:
    """``(exp(X/n) exp(Y/n))**n``; tends to ``exp(X + Y)`` with error ``O(1/n)``."""
    x = as_square(x, "X")
    y = as_square(y, "Y")
    if x.shape != y.shape:
        raise DimensionError("X and Y differ in shape")
    if int(n) != n or n < 1:
        raise DomainError(f"Trotter step count must be a positive integer, got {n!r}")
    n = int(n)
    step = mat_exp(x / n) @ mat_exp(y / n)
    return np.linalg.matrix_power(step, n)
