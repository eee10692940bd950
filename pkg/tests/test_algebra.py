import numpy as np
import pytest
from conftest import SM, SX, SY, SZ, rand_c, rand_h, rel

from lindblad_algebra import (
    CanonicalForm,
    DimensionError,
    ShapeError,
    commutator_super,
    detect_negative_rates,
    hamiltonian_superop,
    hh_commutator_closed,
    hl_commutator_closed,
    hl_commutator_gamma_pair,
    lindblad_single_superop,
    lindblad_superop,
    ll_commutator_closed,
)

A = np.array([[1, -4], [3, -1]])
B = np.array([[-2, 4], [2, 2]])


def test_commutator_super_trivial(rng):
    g = rand_c(rng, 4)
    assert np.allclose(commutator_super(g, g), 0)
    assert np.allclose(commutator_super(g, np.eye(4)), 0)
    with pytest.raises(DimensionError):
        commutator_super(g, np.eye(9))


def test_hh_commutator():
    assert np.allclose(hh_commutator_closed(SX, SX).superoperator(), 0)
    terms = hh_commutator_closed(SX, SY)
    assert np.allclose(terms.hamiltonian, 2 * SZ)
    assert terms.lindblad_terms == ()
    with pytest.raises(ShapeError):
        hh_commutator_closed(SM, SX)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hh_commutator_random(rng, n):
    h, g = rand_h(rng, n), rand_h(rng, n)
    hbar = 0.6
    want = commutator_super(hamiltonian_superop(h, hbar), hamiltonian_superop(g, hbar))
    assert rel(hh_commutator_closed(h, g, hbar).superoperator(), want) < 1e-10


def test_hl_commuting_case():
    assert np.allclose(hl_commutator_closed(SZ, SZ).superoperator(), 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hl_commutator_random(rng, n):
    h, a = rand_h(rng, n), rand_c(rng, n)
    hbar = 1.7
    want = commutator_super(hamiltonian_superop(h, hbar), lindblad_single_superop(a))
    signed = hl_commutator_closed(h, a, hbar).superoperator()
    pair = lindblad_superop(hl_commutator_gamma_pair(h, a, hbar))
    assert rel(signed, want) < 1e-10
    assert np.linalg.norm(signed - pair) < 1e-12 * max(np.linalg.norm(want), 1)


def test_hl_gamma_pair_is_unphysical(rng):
    spec = hl_commutator_gamma_pair(SX, SZ)
    assert not spec.physical
    assert np.allclose(spec.gamma, -1j * np.array([[0, -1], [1, 0]]))


def test_ll_commutator_same_op(rng):
    a = rand_c(rng, 3)
    assert np.allclose(ll_commutator_closed(a, a).superoperator(), 0, atol=1e-12)


def test_ll_golden_case():
    terms = ll_commutator_closed(A, B)
    g = terms.superoperator()
    assert rel(g, hamiltonian_superop(14 * SY)) < 1e-10
    assert rel(g, commutator_super(lindblad_single_superop(A), lindblad_single_superop(B))) < 1e-10
    assert not terms.physical
    # the individual terms carry negative coefficients but the sum has no rates left
    assert not detect_negative_rates(terms).has_negative


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ll_commutator_random(rng, n):
    a, b = rand_c(rng, n), rand_c(rng, n)
    for hbar in (1.0, 0.3):
        want = commutator_super(lindblad_single_superop(a), lindblad_single_superop(b))
        assert rel(ll_commutator_closed(a, b, hbar).superoperator(), want) < 1e-10


def test_ll_dimension_mismatch():
    with pytest.raises(DimensionError):
        ll_commutator_closed(np.eye(2), np.eye(3))


def test_generator_terms_negation(rng):
    t = hl_commutator_closed(SZ, SM)
    assert np.allclose((-t).superoperator(), -t.superoperator())


def test_detect_negative_rates_canonical():
    ops = (np.sqrt(2) * SM, SZ)
    assert not detect_negative_rates(CanonicalForm(np.zeros((2, 2)), ((1.0, ops[0]), (0.5, ops[1])))).has_negative
    rep = detect_negative_rates(CanonicalForm(np.zeros((2, 2)), ((1.0, ops[0]), (-0.5, ops[1]))))
    assert rep.has_negative and rep.negative_rates == [-0.5]


def test_detect_negative_rates_generic(rng):
    hits = sum(
        detect_negative_rates(ll_commutator_closed(rand_c(rng, 2), rand_c(rng, 2))).has_negative for _ in range(20)
    )
    assert hits >= 19
