"""Small dense complex-matrix kernel for 2x2 and 4x4 problems.

Matrices are plain numpy arrays. Products and Kronecker products are
delegated to numpy; the Hermitian eigensolver (cyclic complex Jacobi) and
the real matrix exponential (scaling and squaring) are implemented here.

Two-qubit matrices use the Kronecker index convention: for ``a (x) b`` the
first factor carries the slow index, ``(a (x) b)[i*2+k, j*2+l] = a[i,j] b[k,l]``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)

for _m in (SIGMA_0, *PAULIS):
    _m.setflags(write=False)


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi eigensolver hits its sweep cap."""


class HermitianSpectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _as_square(m, name: str = "m") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def adjoint(m) -> np.ndarray:
    return _as_square(m).conj().T


def multiply(a, b) -> np.ndarray:
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def tensor_product(a, b) -> np.ndarray:
    return np.kron(_as_square(a, "a"), _as_square(b, "b"))


def _as_two_qubit(m) -> np.ndarray:
    m = _as_square(m)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 (2 (x) 2) matrix, got shape {m.shape}")
    return m


def partial_transpose(m) -> np.ndarray:
    """Transpose on the second tensor factor of a 2 (x) 2 operator."""
    m = _as_two_qubit(m)
    # axes (i, k, j, l) -> (i, l, j, k)
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def partial_trace_second(m) -> np.ndarray:
    m = _as_two_qubit(m)
    return np.einsum("ikjk->ij", m.reshape(2, 2, 2, 2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(np.abs(off) ** 2)))


def hermitian_eigenvalues(m, want_vectors: bool = False) -> HermitianSpectrum:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    The input is symmetrized as ``(m + m^dag)/2`` after the Hermiticity check.
    Each rotation first removes the phase of ``a[p, q]`` and then applies a
    real Jacobi rotation, so the annihilated pair is set exactly to zero.
    Off-diagonal entries that are negligible against both of their diagonal
    partners are flushed, which keeps tiny eigenvalues relatively accurate.

    Returns eigenvalues in ascending order; with ``want_vectors`` the columns
    of ``eigenvectors`` are the matching orthonormal eigenvectors.
    """
    m = _as_square(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian within 1e-10")
    a = 0.5 * (m + m.conj().T).astype(complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    for sweep in range(JACOBI_MAX_SWEEPS):
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if sweep > 3 and abs(app) + 100.0 * g == abs(app) and abs(aqq) + 100.0 * g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = apq / g
                theta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.hypot(1.0, theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag phase on q, then real rotation in the (p, q) plane
                u = np.eye(n, dtype=complex)
                u[p, p] = c
                u[p, q] = s
                u[q, p] = -s * phase.conjugate()
                u[q, q] = c * phase.conjugate()
                a = u.conj().T @ a @ u
                a[p, p] = app - t * g
                a[q, q] = aqq + t * g
                a[p, q] = a[q, p] = 0.0
                v = v @ u
        np.fill_diagonal(a, a.diagonal().real)
        # every surviving off-diagonal entry is rotated or flushed next sweep
        if _offdiag_norm(a) == 0.0:
            break
    else:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if not want_vectors:
        return HermitianSpectrum(w)
    return HermitianSpectrum(w, v[:, order])


def min_eigenvalue(m) -> float:
    return float(hermitian_eigenvalues(m).eigenvalues[0])


def trace_norm(m) -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(m).eigenvalues)))


def matrix_exp_real(g, t: float) -> np.ndarray:
    """``exp(g * t)`` for a real square matrix by scaling and squaring.

    The scaled matrix has 1-norm at most 1; its Taylor series is summed until
    the last term drops below 1e-16 in max-entry norm, then squared back.
    """
    g = _as_square(g, "g")
    if np.iscomplexobj(g):
        if np.any(g.imag != 0):
            raise ValueError("generator must be real")
        g = g.real
    if not math.isfinite(t) or not np.all(np.isfinite(g)):
        raise ValueError("matrix_exp_real needs finite entries and time")
    x = np.asarray(g, dtype=float) * t
    n = x.shape[0]
    norm = float(np.max(np.sum(np.abs(x), axis=0))) if n else 0.0
    squarings = max(0, math.ceil(math.log2(norm))) if norm > 0.0 else 0
    x = x / 2.0**squarings

    result = np.eye(n)
    term = np.eye(n)
    k = 1
    while True:
        term = term @ x / k
        result = result + term
        if np.max(np.abs(term)) < 1e-16:
            break
        k += 1
    for _ in range(squarings):
        result = result @ result
    return result
