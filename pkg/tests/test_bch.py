import numpy as np
import pytest
import scipy.linalg
from conftest import SX, SZ, rand_c

from lindblad_algebra import (
    BCH_NORM_LIMIT,
    DimensionError,
    DomainError,
    EvolutionSegment,
    bch_sequence,
    bch_truncated,
    commutator_super,
    conjugated_generator,
    exact_combined_generator,
    hamiltonian_superop,
    hl_commutator_closed,
    lindblad_single_superop,
    mat_exp,
    schedule_bch,
    schedule_propagator,
    trotter_compose,
)


def small(rng, n, scale):
    m = rand_c(rng, n)
    return scale * m / np.linalg.norm(m, 2)


def slope(xs, ys):
    return np.polyfit(np.log(xs), np.log(ys), 1)[0]


def test_bch_commuting():
    x = np.diag([0.1, -0.2, 0.05]).astype(complex)
    for order in (1, 2, 3, 4):
        assert np.allclose(bch_truncated(x, x @ x, order).generator, x + x @ x, atol=1e-15)
        assert np.allclose(bch_truncated(x, np.zeros_like(x), order).generator, x)


def test_bch_second_order_explicit(rng):
    x, y = small(rng, 3, 0.1), small(rng, 3, 0.1)
    c = x @ y - y @ x
    assert np.allclose(bch_truncated(x, y, 2).generator, x + y + c / 2)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_bch_truncation_slope(rng, order):
    x, y = small(rng, 3, 1.0), small(rng, 3, 1.0)
    scales = np.logspace(-2.5, -1, 4)
    errs = []
    for s in scales:
        exact = scipy.linalg.logm(scipy.linalg.expm(s * x) @ scipy.linalg.expm(s * y))
        errs.append(np.linalg.norm(bch_truncated(s * x, s * y, order).generator - exact))
    assert abs(slope(scales, errs) - (order + 1)) < 0.2


def test_bch_norm_warning(rng):
    x = small(rng, 2, 0.5)
    assert bch_truncated(x, x, 2).norm_warning
    assert not bch_truncated(0.1 * x, 0.1 * x, 2).norm_warning
    assert BCH_NORM_LIMIT == pytest.approx(np.log(2))


def test_bch_errors(rng):
    x = small(rng, 2, 0.1)
    with pytest.raises(DomainError):
        bch_truncated(x, x, 5)
    with pytest.raises(DomainError):
        bch_truncated(x, x, 0)
    with pytest.raises(DimensionError):
        bch_truncated(x, np.eye(3), 2)
    with pytest.raises(DomainError):
        bch_sequence([], 2)


def test_bch_sequence(rng):
    g = small(rng, 3, 0.1)
    assert np.allclose(bch_sequence([g]).generator, g)
    diag = [np.diag(rng.normal(size=3)).astype(complex) * 0.1 for _ in range(4)]
    assert np.allclose(bch_sequence(diag, 3).generator, sum(diag))


def test_bch_sequence_matrix_order(rng):
    gens = [small(rng, 2, 0.01) for _ in range(3)]
    exact = scipy.linalg.logm(mat_exp(gens[0]) @ mat_exp(gens[1]) @ mat_exp(gens[2]))
    wrong = scipy.linalg.logm(mat_exp(gens[2]) @ mat_exp(gens[1]) @ mat_exp(gens[0]))
    approx = bch_sequence(gens, 3).generator
    assert np.linalg.norm(approx - exact) < 1e-8
    assert np.linalg.norm(approx - wrong) > 1e-6


def test_bch_sequence_slope(rng):
    gens = [small(rng, 2, 1.0) for _ in range(3)]
    scales = np.logspace(-2.5, -1, 4)
    errs = []
    for s in scales:
        exact = scipy.linalg.logm(np.linalg.multi_dot([mat_exp(s * g) for g in gens]))
        errs.append(np.linalg.norm(bch_sequence([s * g for g in gens], 2).generator - exact))
    assert abs(slope(scales, errs) - 3) < 0.2


def test_segments():
    with pytest.raises(DomainError):
        EvolutionSegment(np.eye(2), -1.0)
    with pytest.raises(DomainError):
        schedule_propagator([])


def test_exact_combined_generator(rng):
    g = small(rng, 4, 1.0)
    res = exact_combined_generator([EvolutionSegment(g, 0.5)])
    assert np.allclose(res.generator, 0.5 * g)
    assert not res.branch_warning
    d1 = np.diag(rng.normal(size=4)).astype(complex)
    d2 = np.diag(rng.normal(size=4)).astype(complex)
    segs = [EvolutionSegment(0.1 * d1, 0.3), EvolutionSegment(0.1 * d2, 0.7)]
    exact = exact_combined_generator(segs).generator
    assert np.allclose(exact, 0.03 * d1 + 0.07 * d2)
    assert np.linalg.norm(schedule_bch(segs, 2).generator - exact) < 1e-12


def test_schedule_earliest_first(rng):
    g1, g2 = small(rng, 2, 0.5), small(rng, 2, 0.5)
    prop = schedule_propagator([EvolutionSegment(g1, 1.0), EvolutionSegment(g2, 1.0)])
    assert np.allclose(prop, mat_exp(g2) @ mat_exp(g1))


def test_sandwich():
    hs = hamiltonian_superop(SX)
    ls = lindblad_single_superop(SZ)
    t = 0.8
    res = conjugated_generator(hs, 0.0, ls, t)
    assert np.allclose(res.exact, t * ls) and np.allclose(res.first_order, t * ls)
    res = conjugated_generator(hamiltonian_superop(SZ), 0.3, ls, t)
    assert np.allclose(res.exact, t * ls) and np.allclose(res.first_order, t * ls)
    errs = []
    tws = np.array([1e-1, 1e-2, 1e-3])
    for tw in tws:
        res = conjugated_generator(hs, tw, ls, t)
        segs = [EvolutionSegment(-hs, tw), EvolutionSegment(ls, t), EvolutionSegment(hs, tw)]
        assert np.linalg.norm(exact_combined_generator(segs).generator - res.exact) < 1e-10
        errs.append(np.linalg.norm(res.exact - res.first_order))
    assert abs(slope(tws, errs) - 2) < 0.1


def test_first_order_shaped_noise_structure():
    h, a = SX, SZ
    hs, ls = hamiltonian_superop(h), lindblad_single_superop(a)
    tw = 0.05
    first = conjugated_generator(hs, tw, ls, 1.0).first_order
    structured = ls + tw * hl_commutator_closed(h, a).superoperator()
    c = h @ a - a @ h
    literal = (
        lindblad_single_superop(a)
        - tw / 2 * lindblad_single_superop(a + 1j * c)
        + tw / 2 * lindblad_single_superop(a - 1j * c)
    )
    assert np.linalg.norm(first - structured) < 1e-10
    assert np.linalg.norm(first - literal) < 1e-10
    assert np.linalg.norm(commutator_super(hs, ls)) > 1


def test_trotter(rng):
    x = np.diag([0.3, -0.2]).astype(complex)
    y = np.diag([0.1, 0.5]).astype(complex)
    for n in (1, 5):
        assert np.linalg.norm(trotter_compose(x, y, n) - mat_exp(x + y)) < 1e-12
    x, y = small(rng, 3, 1.0), small(rng, 3, 1.0)
    assert np.allclose(trotter_compose(x, y, 1), mat_exp(x) @ mat_exp(y))
    ns = np.array([8, 16, 32, 64, 128, 256])
    errs = [np.linalg.norm(trotter_compose(x, y, n) - mat_exp(x + y)) for n in ns]
    assert abs(slope(ns, errs) + 1) < 0.1
    with pytest.raises(DomainError):
        trotter_compose(x, y, 0)
