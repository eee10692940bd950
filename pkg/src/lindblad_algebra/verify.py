"""Randomised verification suites for the generator algebra.

Every check draws its inputs from a generator seeded by ``(seed, check, dim,
trial)``, so any single instance can be regenerated in isolation and results
do not depend on execution order. Failing instances are serialised so they
can be replayed with :func:`replay`.
"""

from __future__ import annotations

import functools
import zlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import mpmath
import numpy as np

from .algebra import (
    commutator_super,
    detect_negative_rates,
    hh_commutator_closed,
    hl_commutator_gamma_pair,
    hl_commutator_closed,
    ll_commutator_closed,
)
from .bch import (
    EvolutionSegment,
    bch_sequence,
    bch_truncated,
    conjugated_generator,
    exact_combined_generator,
    trotter_compose,
)
from .generators import (
    LindbladSpec,
    canonicalize,
    hamiltonian_superop,
    lindblad_single_superop,
    lindblad_superop,
    remove_trace,
    trace_functional,
)
from .linalg import commutator, dag, mat_exp, odot, su_generators, unvec, vec
from .projection import extract_lindblad_from_channel, project_generator, reconstruct, standard_basis
from .serialization import decode_matrix, encode_matrix

SUITES = ("identities", "bch", "projection")

GOLDEN_A = np.array([[1, -4], [3, -1]], dtype=np.complex128)
GOLDEN_B = np.array([[-2, 4], [2, 2]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])

BCH_SCALES = np.logspace(-3, -1, 5)
SANDWICH_SCALES = np.array([1e-1, 1e-2, 1e-3])
TROTTER_STEPS = np.array([8, 16, 32, 64, 128, 256])
ORACLE_DIGITS = 50


# -- random inputs ---------------------------------------------------------


def rand_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def rand_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rand_complex(rng, n)
    return 0.5 * (a + dag(a))


def rand_psd(rng: np.random.Generator, m: int) -> np.ndarray:
    w = rand_complex(rng, m)
    return w @ dag(w) / m


def rand_generator(rng: np.random.Generator, n: int, hbar: float = 1.0) -> np.ndarray:
    """Random Lindblad generator with a full-rank rate matrix over random operators."""
    ops = [rand_complex(rng, n) for _ in range(n)]
    spec = LindbladSpec(rand_psd(rng, n), tuple(ops))
    return hamiltonian_superop(rand_hermitian(rng, n), hbar) + lindblad_superop(spec)


def rand_canonical_coefficients(rng: np.random.Generator, n: int, max_norm: float = 0.5):
    """Random ``(h, gamma)`` over SU(n) generators, scaled so ``||G||_2 <= max_norm``."""
    m = n * n - 1
    h = rng.normal(size=m)
    gamma = rand_psd(rng, m)
    g = coefficient_generator(h, gamma, n)
    scale = max_norm * rng.uniform(0.2, 1.0) / np.linalg.norm(g, 2)
    return h * scale, gamma * scale


def coefficient_generator(h, gamma, n: int, hbar: float = 1.0) -> np.ndarray:
    gens = su_generators(n)
    ham = np.einsum("k,kab->ab", np.asarray(h, dtype=np.complex128), np.asarray(gens))
    return hamiltonian_superop(ham, hbar) + lindblad_superop(LindbladSpec(gamma, tuple(gens), physical=False))


def _rel(a, b) -> float:
    scale = max(float(np.linalg.norm(b)), float(np.linalg.norm(a)), 1e-300)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) / scale


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)[0])


# -- high-precision oracle -------------------------------------------------


def _mp(m: np.ndarray) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpc(complex(z)) for z in row] for row in m])


@functools.lru_cache(maxsize=256)
def _mp_log_product(key: bytes, shape: tuple, count: int, scale: float) -> np.ndarray:
    # log(exp(s g_0) ... exp(s g_k)) in ORACLE_DIGITS digits, rounded to double
    gens = np.frombuffer(key, dtype=np.complex128).reshape((count,) + shape)
    with mpmath.workdps(ORACLE_DIGITS):
        s = mpmath.mpf(scale)
        p = mpmath.eye(shape[0])
        for g in gens:
            p = p * mpmath.expm(s * _mp(g))
        z = mpmath.logm(p)
        return np.array([[complex(z[i, j]) for j in range(shape[1])] for i in range(shape[0])])


def oracle_log_product(gens: Sequence[np.ndarray], scale: float) -> np.ndarray:
    """``log(prod_i exp(scale * gens[i]))`` computed in extended precision."""
    arr = np.ascontiguousarray(np.asarray(gens, dtype=np.complex128))
    return _mp_log_product(arr.tobytes(), arr.shape[1:], arr.shape[0], float(scale))


# -- check registry --------------------------------------------------------


@dataclass(frozen=True)
class Check:
    """One randomised property.

    ``evaluate`` returns ``(deviation, measured)``. In ``"max"`` mode the check
    passes when every deviation is ``<= tolerance``; in ``"fraction"`` mode the
    deviation is 1 for a hit and the hit fraction must reach ``tolerance``; in
    ``"any"`` mode at least one hit is required.
    """

    name: str
    suite: str
    tolerance: float
    sample: Callable[[np.random.Generator, int], dict]
    evaluate: Callable[[dict], tuple[float, float | None]]
    mode: str = "max"
    max_trials: int | None = None
    dims: tuple[int, ...] | None = None


CHECKS: dict[str, Check] = {}


def _register(*args, **kwargs) -> None:
    chk = Check(*args, **kwargs)
    CHECKS[chk.name] = chk


def _hbar(rng) -> float:
    return float(rng.uniform(0.5, 2.0))


# identities


def _vec_roundtrip(d):
    m = d["M"]
    exact = 0.0 if np.array_equal(unvec(vec(m)), m) else 1.0
    n = m.shape[0]
    tr = abs(np.vdot(vec(np.eye(n)), vec(m)) - np.trace(m))
    return max(exact, float(tr)), None


_register("vec_roundtrip", "identities", 1e-12, lambda r, n: {"M": rand_complex(r, n)}, _vec_roundtrip)


def _odot_action(d):
    l, rr, rho = d["L"], d["R"], d["rho"]
    return _rel(unvec(odot(l, rr) @ vec(rho)), l @ rho @ rr), None


_register(
    "odot_action",
    "identities",
    1e-13,
    lambda r, n: {"L": rand_complex(r, n), "R": rand_complex(r, n), "rho": rand_complex(r, n)},
    _odot_action,
)


def _odot_product(d):
    a, b, c, e = d["A"], d["B"], d["C"], d["D"]
    return _rel(odot(a, b) @ odot(c, e), odot(a @ c, e @ b)), None


_register(
    "odot_product",
    "identities",
    1e-13,
    lambda r, n: {k: rand_complex(r, n) for k in "ABCD"},
    _odot_product,
)


def _hh(d):
    hbar = d["hbar"]
    num = commutator_super(hamiltonian_superop(d["H"], hbar), hamiltonian_superop(d["G"], hbar))
    return _rel(hh_commutator_closed(d["H"], d["G"], hbar).superoperator(), num), None


_register(
    "hh_commutator",
    "identities",
    1e-10,
    lambda r, n: {"H": rand_hermitian(r, n), "G": rand_hermitian(r, n), "hbar": _hbar(r)},
    _hh,
)


def _hl_numeric(d):
    hbar = d["hbar"]
    return commutator_super(hamiltonian_superop(d["H"], hbar), lindblad_single_superop(d["A"]))


def _hl_signed(d):
    return _rel(hl_commutator_closed(d["H"], d["A"], d["hbar"]).superoperator(), _hl_numeric(d)), None


def _hl_pair(d):
    pair = lindblad_superop(hl_commutator_gamma_pair(d["H"], d["A"], d["hbar"]))
    return _rel(pair, _hl_numeric(d)), None


_hl_sample = lambda r, n: {"H": rand_hermitian(r, n), "A": rand_complex(r, n), "hbar": _hbar(r)}
_register("hl_commutator_signed", "identities", 1e-10, _hl_sample, _hl_signed)
_register("hl_commutator_gamma_pair", "identities", 1e-10, _hl_sample, _hl_pair)


def _ll(d):
    num = commutator_super(lindblad_single_superop(d["A"]), lindblad_single_superop(d["B"]))
    return _rel(ll_commutator_closed(d["A"], d["B"], d["hbar"]).superoperator(), num), None


_ab_sample = lambda r, n: {"A": rand_complex(r, n), "B": rand_complex(r, n), "hbar": _hbar(r)}
_register("ll_commutator", "identities", 1e-10, _ab_sample, _ll)


def _ll_antisym(d):
    f = ll_commutator_closed(d["A"], d["B"], d["hbar"]).superoperator()
    b = ll_commutator_closed(d["B"], d["A"], d["hbar"]).superoperator()
    return float(np.linalg.norm(f + b)) / max(float(np.linalg.norm(f)), 1e-300), None


_register("ll_antisymmetry", "identities", 1e-10, _ab_sample, _ll_antisym)


def _jacobi(d):
    x = hamiltonian_superop(d["H"], d["hbar"])
    y = lindblad_single_superop(d["A"])
    z = lindblad_single_superop(d["B"])
    c = commutator_super
    terms = [c(x, c(y, z)), c(y, c(z, x)), c(z, c(x, y))]
    return float(np.linalg.norm(sum(terms))) / max(float(np.linalg.norm(t)) for t in terms), None


_register(
    "jacobi_identity",
    "identities",
    1e-9,
    lambda r, n: {"H": rand_hermitian(r, n), "A": rand_complex(r, n), "B": rand_complex(r, n), "hbar": _hbar(r)},
    _jacobi,
)


def _trace_removal(d):
    a, hbar = d["A"], d["hbar"]
    a0, h = remove_trace(a, hbar)
    lhs = lindblad_single_superop(a)
    return _rel(lindblad_single_superop(a0) + hamiltonian_superop(h, hbar), lhs), None


def literal_trace_shift(a, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Trace shift by ``(tr a) I`` instead of ``(tr a / N) I``."""
    tr = np.trace(a)
    a0 = a - tr * np.eye(a.shape[0])
    h = (1j * hbar / 2) * (np.conj(tr) * a - tr * dag(a))
    return a0, 0.5 * (h + dag(h))


def _trace_removal_literal(d):
    # the shifted operator must be traceless and carry the same generator
    a, hbar = d["A"], d["hbar"]
    a0, h = literal_trace_shift(a, hbar)
    trace_dev = abs(np.trace(a0)) / float(np.linalg.norm(a))
    superop_dev = _rel(lindblad_single_superop(a0) + hamiltonian_superop(h, hbar), lindblad_single_superop(a))
    return (1.0 if trace_dev > 1e-8 or superop_dev > 1e-10 else 0.0), trace_dev


_a_sample = lambda r, n: {"A": rand_complex(r, n), "hbar": _hbar(r)}
_register("trace_removal", "identities", 1e-12, _a_sample, _trace_removal)
_register("trace_removal_literal_fails", "identities", 1.0, _a_sample, _trace_removal_literal, mode="any")


def _structural(d):
    g = d["G"]
    n = d["rho"].shape[0]
    tp = float(np.linalg.norm(trace_functional(n).conj() @ g)) / float(np.linalg.norm(g))
    out = unvec(g @ vec(d["rho"]))
    hp = float(np.linalg.norm(out - dag(out))) / (float(np.linalg.norm(g)) * float(np.linalg.norm(d["rho"])))
    return max(tp, hp), None


def _structural_sample(r, n):
    hbar = _hbar(r)
    g = rand_generator(r, n, hbar) + lindblad_single_superop(rand_complex(r, n))
    g = g + hl_commutator_closed(rand_hermitian(r, n), rand_complex(r, n), hbar).superoperator()
    g = g + ll_commutator_closed(rand_complex(r, n), rand_complex(r, n), hbar).superoperator()
    return {"G": g, "rho": rand_hermitian(r, n)}


_register("trace_and_hermiticity_preservation", "identities", 1e-12, _structural_sample, _structural)


def _canon(d):
    hbar = d["hbar"]
    spec = LindbladSpec(d["gamma"], tuple(d[f"L{k}"] for k in range(d["gamma"].shape[0])))
    ref = hamiltonian_superop(d["H"], hbar) + lindblad_superop(spec)
    form = canonicalize(d["H"], spec, hbar)
    again = canonicalize(form.hamiltonian, LindbladSpec.diagonal(form.rates, form.ops, physical=False), hbar)
    return max(_rel(form.superoperator(), ref), _rel(again.superoperator(), ref)), None


def _canon_sample(r, n):
    d = {"H": rand_hermitian(r, n), "gamma": rand_psd(r, n), "hbar": _hbar(r)}
    d.update({f"L{k}": rand_complex(r, n) for k in range(n)})
    return d


_register("canonicalize_preserves_generator", "identities", 1e-10, _canon_sample, _canon)


def _golden(d):
    num = commutator_super(lindblad_single_superop(d["A"]), lindblad_single_superop(d["B"]))
    return _rel(num, hamiltonian_superop(14 * SIGMA_Y)), None


_golden_sample = lambda r, n: {"A": GOLDEN_A, "B": GOLDEN_B}
_register("golden_sigma_y", "identities", 1e-10, _golden_sample, _golden, max_trials=1, dims=(2,))


# bch


def _pair_sample(r, n):
    x = rand_generator(r, n)
    y = rand_generator(r, n)
    return {"X": x / np.linalg.norm(x, 2), "Y": y / np.linalg.norm(y, 2)}


def _triple_sample(r, n):
    d = _pair_sample(r, n)
    z = rand_generator(r, n)
    d["Z"] = z / np.linalg.norm(z, 2)
    return d


def bch_truncation_errors(x, y, order: int, scales=BCH_SCALES) -> np.ndarray:
    return np.array(
        [
            np.linalg.norm(bch_truncated(s * x, s * y, order).generator - oracle_log_product([x, y], s))
            for s in scales
        ]
    )


def bch_sequence_errors(gens, order: int, scales=BCH_SCALES) -> np.ndarray:
    return np.array(
        [
            np.linalg.norm(bch_sequence([s * g for g in gens], order).generator - oracle_log_product(gens, s))
            for s in scales
        ]
    )


def _bch_slope(order):
    def evaluate(d):
        slope = _slope(BCH_SCALES, bch_truncation_errors(d["X"], d["Y"], order))
        return abs(slope - (order + 1)), slope

    return evaluate


def _seq_slope(order):
    def evaluate(d):
        slope = _slope(BCH_SCALES, bch_sequence_errors([d["X"], d["Y"], d["Z"]], order))
        return abs(slope - (order + 1)), slope

    return evaluate


for _k in range(1, 5):
    _register(f"bch_slope_order{_k}", "bch", 0.2, _pair_sample, _bch_slope(_k), max_trials=3, dims=(2,))
    _register(f"bch_sequence_slope_order{_k}", "bch", 0.2, _triple_sample, _seq_slope(_k), max_trials=2, dims=(2,))


def _bch_commuting(d):
    x = 0.1 * d["X"]
    y = x @ x
    return max(_rel(bch_truncated(x, y, k).generator, x + y) for k in range(1, 5)), None


_register("bch_commuting_exact", "bch", 1e-12, _pair_sample, _bch_commuting)


def _sandwich_sample(r, n):
    h = rand_hermitian(r, n)
    a = rand_complex(r, n)
    hs = hamiltonian_superop(h)
    ls = lindblad_single_superop(a)
    return {
        "H": h / np.linalg.norm(hs, 2),
        "A": a / np.sqrt(np.linalg.norm(ls, 2)),
        "t_omega": float(r.uniform(0.05, 0.5)),
        "T": float(r.uniform(0.2, 1.0)),
    }


def _sandwich_exact(d):
    hs = hamiltonian_superop(d["H"])
    ls = lindblad_single_superop(d["A"])
    conj = conjugated_generator(hs, d["t_omega"], ls, d["T"])
    segs = [
        EvolutionSegment(-hs, d["t_omega"]),
        EvolutionSegment(ls, d["T"]),
        EvolutionSegment(hs, d["t_omega"]),
    ]
    return _rel(exact_combined_generator(segs).generator, conj.exact), None


def _sandwich_slope(d):
    hs = hamiltonian_superop(d["H"])
    ls = lindblad_single_superop(d["A"])
    errs = []
    for s in SANDWICH_SCALES:
        c = conjugated_generator(hs, s, ls, d["T"])
        errs.append(np.linalg.norm(c.exact - c.first_order))
    slope = _slope(SANDWICH_SCALES, errs)
    return abs(slope - 2.0), slope


def _shaped_noise(d):
    h, a, t_omega, t = d["H"], d["A"], d["t_omega"], d["T"]
    conj = conjugated_generator(hamiltonian_superop(h), t_omega, lindblad_single_superop(a), t)
    c = 1j * commutator(h, a)
    shaped = t * (
        lindblad_single_superop(a)
        - (t_omega / 2) * lindblad_single_superop(a + c)
        + (t_omega / 2) * lindblad_single_superop(a - c)
    )
    return _rel(conj.first_order, shaped), None


_register("sandwich_exact_vs_combined", "bch", 1e-10, _sandwich_sample, _sandwich_exact)
_register("sandwich_first_order_slope", "bch", 0.1, _sandwich_sample, _sandwich_slope, max_trials=5)
_register("shaped_noise_structured", "bch", 1e-10, _sandwich_sample, _shaped_noise)


def trotter_errors(x, y, steps=TROTTER_STEPS) -> np.ndarray:
    ref = mat_exp(x + y)
    return np.array([np.linalg.norm(trotter_compose(x, y, int(n)) - ref) for n in steps])


def _trotter(d):
    slope = _slope(TROTTER_STEPS, trotter_errors(d["X"], d["Y"]))
    return abs(slope + 1.0), slope


_register("trotter_slope", "bch", 0.1, _pair_sample, _trotter, max_trials=5)


# projection


def _basis_rank(d):
    n = int(d["N"])
    basis, _ = standard_basis(n)
    rank = int(np.linalg.matrix_rank(basis.vectors))
    return float((n * n - 1) * n * n - rank), float(rank)


def _dual_identity(d):
    basis, dual = standard_basis(int(d["N"]))
    eye = np.eye(basis.size)
    gb = dag(dual.vectors) @ basis.vectors
    p = basis.vectors @ dag(dual.vectors)
    return max(
        float(np.linalg.norm(gb - eye)),
        float(np.linalg.norm(p @ p - p)),
        float(np.linalg.norm(p @ basis.vectors - basis.vectors)),
    ), None


_n_sample = lambda r, n: {"N": n}
_register("basis_rank", "projection", 0.0, _n_sample, _basis_rank, max_trials=1)
_register("dual_biorthogonality", "projection", 1e-9, _n_sample, _dual_identity, max_trials=1)


def _golden_projection(d):
    num = commutator_super(lindblad_single_superop(d["A"]), lindblad_single_superop(d["B"]))
    basis, dual = standard_basis(2)
    dec = project_generator(num, basis, dual)
    h_err = float(np.max(np.abs(dec.coefficients[:3] - np.array([0, 14, 0]))))
    return max(h_err, float(np.linalg.norm(dec.gamma))), None


_register("golden_projection", "projection", 1e-9, _golden_sample, _golden_projection, max_trials=1, dims=(2,))


def _project_random(d):
    g = d["G"]
    n = int(round(np.sqrt(g.shape[0])))
    basis, dual = standard_basis(n)
    return g, project_generator(g, basis, dual)


def _in_span(d):
    g, dec = _project_random(d)
    return dec.residual_norm / float(np.linalg.norm(g)), None


def _hermitian_coefficients(d):
    g, dec = _project_random(d)
    m = dec.gamma.shape[0]
    dev = max(
        float(np.max(np.abs(dec.coefficients[:m].imag))),
        float(np.linalg.norm(dec.gamma - dag(dec.gamma))),
    )
    return dev / float(np.linalg.norm(g)), None


_g_sample = lambda r, n: {"G": rand_generator(r, n, _hbar(r))}
_register("lindblad_generators_in_span", "projection", 1e-10, _g_sample, _in_span)
_register("hermitian_coefficients", "projection", 1e-9, _g_sample, _hermitian_coefficients)


def _roundtrip_sample(r, n):
    h, gamma = rand_canonical_coefficients(r, n)
    return {"h": h, "gamma": gamma}


def _roundtrip(d):
    h = np.asarray(d["h"]).reshape(-1).real
    gamma = d["gamma"]
    n = int(round(np.sqrt(h.size + 1)))
    g = coefficient_generator(h, gamma, n)
    ext = extract_lindblad_from_channel(mat_exp(g))
    dec = ext.decomposition
    coeff_err = max(float(np.max(np.abs(dec.h - h))), float(np.max(np.abs(dec.gamma - gamma))))
    return coeff_err, ext.residual_norm / float(np.linalg.norm(ext.generator))


def _roundtrip_residual(d):
    _, ratio = _roundtrip(d)
    return ratio, None


_register("channel_roundtrip_coefficients", "projection", 1e-8, _roundtrip_sample, lambda d: (_roundtrip(d)[0], None))
_register("channel_roundtrip_residual", "projection", 1e-10, _roundtrip_sample, _roundtrip_residual)


def _reconstruct(d):
    c = d["c"].reshape(-1)
    n = int(d["N"])
    basis, dual = standard_basis(n)
    from .projection import GeneratorDecomposition

    m = n * n - 1
    dec = GeneratorDecomposition(n, c, c[:m].real, c[m:].reshape(m, m), 0.0, True)
    back = project_generator(reconstruct(dec, basis), basis, dual).coefficients
    return float(np.linalg.norm(back - c)) / float(np.linalg.norm(c)), None


def _reconstruct_sample(r, n):
    size = (n * n - 1) * n * n
    return {"N": n, "c": (r.normal(size=size) + 1j * r.normal(size=size)).reshape(1, -1)}


_register("reconstruct_roundtrip", "projection", 1e-12, _reconstruct_sample, _reconstruct)


def _negative(d):
    terms = ll_commutator_closed(d["A"], d["B"], d["hbar"])
    report = detect_negative_rates(terms)
    return (1.0 if report.has_negative else 0.0), (min(report.rates) if report.rates else None)


_register("ll_commutator_negative_rates", "projection", 0.95, _ab_sample, _negative, mode="fraction")


# -- runner ----------------------------------------------------------------


def suite_checks(suite: str) -> list[Check]:
    if suite == "all":
        return list(CHECKS.values())
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [c for c in CHECKS.values() if c.suite == suite]


def trial_rng(seed: int, name: str, dim: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode()), int(dim), int(trial)])


def _encode_value(v):
    if isinstance(v, np.ndarray):
        m = v if v.ndim == 2 else v.reshape(1, -1)
        return {"matrix": encode_matrix(m)}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _decode_value(v):
    if isinstance(v, dict) and "matrix" in v:
        return decode_matrix(v["matrix"])
    return v


def encode_inputs(inputs: dict) -> dict:
    return {k: _encode_value(v) for k, v in inputs.items()}


def decode_inputs(doc: dict) -> dict:
    return {k: _decode_value(v) for k, v in doc.items()}


def _passes(check: Check, deviation: float) -> bool:
    if check.mode == "max":
        return bool(deviation <= check.tolerance)
    return deviation >= 1.0


def run_check(check: Check, dim: int, trials: int, seed: int) -> dict:
    n_trials = trials if check.max_trials is None else min(trials, check.max_trials)
    devs, measured = [], []
    failure = None
    for trial in range(n_trials):
        inputs = check.sample(trial_rng(seed, check.name, dim, trial), dim)
        dev, meas = check.evaluate(inputs)
        devs.append(float(dev))
        if meas is not None:
            measured.append(float(meas))
        # for fraction/any checks a miss is only reported if the check fails overall
        if not _passes(check, dev) and failure is None:
            failure = {
                "check": check.name,
                "dim": dim,
                "trial": trial,
                "seed": seed,
                "deviation": float(dev),
                "inputs": encode_inputs(inputs),
            }
    if check.mode == "max":
        stat = max(devs)
        passed = stat <= check.tolerance
    elif check.mode == "fraction":
        stat = float(np.mean(devs))
        passed = stat >= check.tolerance
    else:
        stat = float(max(devs))
        passed = stat >= check.tolerance
    out = {
        "name": check.name,
        "suite": check.suite,
        "dim": dim,
        "trials": n_trials,
        "mode": check.mode,
        "tolerance": check.tolerance,
        "max_deviation" if check.mode == "max" else "hit_fraction": stat,
        "passed": bool(passed),
    }
    if measured:
        out["measured"] = measured if len(measured) <= 8 else {"min": min(measured), "max": max(measured)}
    if failure is not None and not passed:
        out["failure"] = failure
    return out


def run_suite(suite: str, trials: int = 200, seed: int = 0, dims: Sequence[int] = (2, 3, 4)) -> dict:
    """Run every check of ``suite`` (or ``"all"``) and collect a report."""
    results = []
    for check in suite_checks(suite):
        use = [d for d in dims if check.dims is None or d in check.dims]
        if not use and check.dims:
            use = [min(check.dims)]
        for dim in use:
            results.append(run_check(check, dim, trials, seed))
    return {
        "suite": suite,
        "trials": trials,
        "seed": seed,
        "dims": list(dims),
        "checks": results,
        "passed": all(r["passed"] for r in results),
    }


def replay(doc: dict) -> dict:
    """Re-evaluate a serialised failing instance."""
    check = CHECKS[doc["check"]]
    dev, meas = check.evaluate(decode_inputs(doc["inputs"]))
    return {
        "check": check.name,
        "dim": doc.get("dim"),
        "deviation": float(dev),
        "measured": meas,
        "tolerance": check.tolerance,
        "passed": _passes(check, dev),
    }
