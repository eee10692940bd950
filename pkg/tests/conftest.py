import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
SM = np.array([[0, 0], [1, 0]], dtype=complex)  # lowering operator |1><0| in the (|0>,|1>) basis
I2 = np.eye(2, dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_c(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def rand_h(rng, n):
    a = rand_c(rng, n)
    return (a + a.conj().T) / 2


def act(g, rho):
    """Apply a superoperator to a density matrix through row-major flattening."""
    n = rho.shape[0]
    return (g @ rho.reshape(-1)).reshape(n, n)


def superop_of(fn, n):
    """Brute-force superoperator of a linear map, column by column on matrix units."""
    cols = []
    for j in range(n):
        for k in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = 1
            cols.append(fn(e).reshape(-1))
    return np.column_stack(cols)


def lindblad_action(h, ops, rates, hbar=1.0):
    def fn(rho):
        out = (-1j / hbar) * (h @ rho - rho @ h)
        for c, a in zip(rates, ops):
            ad = a.conj().T
            out = out + c * (a @ rho @ ad - 0.5 * (ad @ a @ rho + rho @ ad @ a))
        return out

    return fn


def rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1.0)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs the full verification suite")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
