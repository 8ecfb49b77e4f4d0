import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qdisentangle.linalg import (
    PAULIS,
    SIGMA_0,
    ConvergenceError,
    adjoint,
    hermitian_eigenvalues,
    matrix_exp_real,
    multiply,
    partial_trace_second,
    partial_transpose,
    tensor_product,
    trace_norm,
)

S1, S2, S3 = PAULIS
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
SINGLET_PROJ = np.outer(SINGLET, SINGLET.conj())
SIGMA_DOT_SIGMA = sum(np.kron(s, s) for s in PAULIS)


def random_hermitian(rng, n, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2


def random_density(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_adjoint():
    assert np.array_equal(adjoint(np.eye(2)), np.eye(2))
    assert np.array_equal(adjoint(S2), S2)
    assert np.array_equal(adjoint([[0, 1], [0, 0]]), [[0, 0], [1, 0]])


def test_multiply_pauli_algebra():
    assert np.allclose(multiply(S1, S1), SIGMA_0, atol=0)
    assert np.allclose(multiply(S1, S2), 1j * S3, atol=0)
    m = np.random.default_rng(1).standard_normal((4, 4))
    assert np.array_equal(multiply(np.eye(4), m), m)


def test_multiply_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(np.eye(2), np.eye(4))


def test_tensor_product():
    assert np.array_equal(tensor_product(SIGMA_0, SIGMA_0), np.eye(4))
    assert np.array_equal(tensor_product(S3, S3), np.diag([1, -1, -1, 1]))
    # block convention: (a (x) b)[i*2+k, j*2+l] = a[i,j] b[k,l]
    a = np.arange(4).reshape(2, 2) + 1j
    b = np.arange(4).reshape(2, 2) * 2.0
    ab = tensor_product(a, b)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        assert ab[i * 2 + k, j * 2 + l] == a[i, j] * b[k, l]


def test_sigma_dot_sigma_spectrum():
    m = sum(tensor_product(s, s) for s in PAULIS)
    assert np.allclose(hermitian_eigenvalues(m).eigenvalues, [-3, 1, 1, 1], atol=1e-13)


def test_partial_transpose_examples():
    assert np.array_equal(partial_transpose(np.eye(4) / 4), np.eye(4) / 4)
    lam = hermitian_eigenvalues(partial_transpose(SINGLET_PROJ)).eigenvalues
    assert lam[0] == pytest.approx(-0.5, abs=1e-14)
    with pytest.raises(ValueError):
        partial_transpose(np.eye(2))


def test_partial_transpose_index_rule():
    m = np.arange(16).reshape(4, 4) * (1 + 0.5j)
    out = partial_transpose(m)
    for i, k, j, l in np.ndindex(2, 2, 2, 2):
        assert out[i * 2 + k, j * 2 + l] == m[i * 2 + l, j * 2 + k]


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_partial_transpose_involution_and_trace(seed):
    m = random_hermitian(np.random.default_rng(seed), 4)
    pt = partial_transpose(m)
    assert np.array_equal(partial_transpose(pt), m)
    assert np.array_equal(np.diag(pt), np.diag(m))
    assert np.array_equal(pt, pt.conj().T)


def test_partial_trace_second():
    assert np.allclose(partial_trace_second(SINGLET_PROJ), SIGMA_0 / 2, atol=1e-15)
    assert np.array_equal(partial_trace_second(np.eye(4)), 2 * np.eye(2))
    rng = np.random.default_rng(3)
    a = random_hermitian(rng, 2)
    b = random_density(rng, 2)
    assert np.allclose(partial_trace_second(np.kron(a, b)), a, atol=1e-14)
    with pytest.raises(ValueError):
        partial_trace_second(np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_tensor_trace(seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
    assert abs(np.trace(tensor_product(a, b)) - np.trace(a) * np.trace(b)) <= 1e-13


def test_eigenvalues_examples():
    assert np.array_equal(hermitian_eigenvalues(S3).eigenvalues, [-1, 1])
    werner = (np.eye(4) - SIGMA_DOT_SIGMA) / 4
    assert np.allclose(hermitian_eigenvalues(werner).eigenvalues, [0, 0, 0, 1], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_eigen_reconstruction_and_oracle(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(200):
        m = random_hermitian(rng, n, scale=rng.uniform(0.1, 5))
        w, v = hermitian_eigenvalues(m, want_vectors=True)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) <= 1e-12
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-12
        assert np.max(np.abs(w - np.linalg.eigvalsh(m))) <= 1e-12
        assert abs(w.sum() - np.trace(m).real) <= 1e-12


def test_eigen_degenerate_and_tiny_gaps():
    f = np.exp(-50.0)
    m = np.array([[0.5, 0, 0, 0], [0, 0, f / 2, 0], [0, f / 2, 0, 0], [0, 0, 0, 0.5]])
    w = hermitian_eigenvalues(m).eigenvalues
    assert w[0] == pytest.approx(-f / 2, rel=1e-14)
    assert np.array_equal(hermitian_eigenvalues(np.eye(4) / 4).eigenvalues, np.full(4, 0.25))
    assert np.array_equal(hermitian_eigenvalues(np.zeros((4, 4))).eigenvalues, np.zeros(4))


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[np.nan, 0], [0, 1]]))


def test_eigen_sweep_cap(monkeypatch):
    import qdisentangle.linalg as la

    monkeypatch.setattr(la, "JACOBI_MAX_SWEEPS", 1)
    m = random_hermitian(np.random.default_rng(0), 4)
    with pytest.raises(ConvergenceError):
        la.hermitian_eigenvalues(m)


def test_trace_norm():
    rho = random_density(np.random.default_rng(5), 2)
    assert trace_norm(rho) == pytest.approx(1.0, abs=1e-14)
    assert trace_norm(S3) == pytest.approx(2.0, abs=1e-15)
    assert trace_norm(partial_transpose(SINGLET_PROJ)) == pytest.approx(2.0, abs=1e-14)


def test_expm_closed_forms():
    assert np.array_equal(matrix_exp_real(np.zeros((4, 4)), 3.0), np.eye(4))
    tau = 0.7
    out = matrix_exp_real(np.diag([0.0, -1, -1, -1]) / tau, tau)
    assert np.allclose(out, np.diag([1, np.exp(-1), np.exp(-1), np.exp(-1)]), rtol=1e-12, atol=0)
    for t in (1e-6, 0.3, 5.0, 50.0, 200.0):
        d = np.array([0.0, -1.0, -0.25, 2.0])
        got = np.diag(matrix_exp_real(np.diag(d), t))
        assert np.allclose(got, np.exp(d * t), rtol=1e-12, atol=0)


def test_expm_against_scipy():
    rng = np.random.default_rng(11)
    for _ in range(100):
        g = rng.uniform(-2, 2, (4, 4))
        t = rng.uniform(0, 3)
        ref = scipy.linalg.expm(g * t)
        assert np.max(np.abs(matrix_exp_real(g, t) - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(0, 2), st.floats(0, 2))
def test_expm_semigroup(seed, t1, t2):
    g = np.random.default_rng(seed).uniform(-2, 2, (4, 4))
    lhs = matrix_exp_real(g, t1) @ matrix_exp_real(g, t2)
    rhs = matrix_exp_real(g, t1 + t2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))


def test_expm_rejects_non_finite():
    with pytest.raises(ValueError):
        matrix_exp_real(np.eye(4), float("inf"))
    with pytest.raises(ValueError):
        matrix_exp_real(np.full((4, 4), np.nan), 1.0)
