"""Qubit states and channels in affine Bloch (Pauli transfer) form.

A density matrix is ``rho = (I + r . sigma) / 2`` and a channel acts as
``r -> a @ r + b``. Semigroups are generated by Lindblad generators that are
converted once into a real 4x4 matrix acting on ``(1, r1, r2, r3)``.

Dissipator rate convention
--------------------------
A jump operator ``L`` with rate ``k`` contributes

    k * (2 L rho L^dag - L^dag L rho - rho L^dag L)

to ``d rho / dt``. With this convention the three Pauli jumps at rate
``1 / (8 tau)`` give the isotropic depolarizer ``r(t) = exp(-t / tau) r(0)``,
and ``L = sigma_3`` at rate ``gamma / 4`` damps the transverse components at
rate ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import PAULIS, SIGMA_0, is_hermitian, matrix_exp_real, min_eigenvalue

STATE_TOL = 1e-10
TRACE_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


# -- states -----------------------------------------------------------------


def validate_density_matrix(rho, dim: int = 2) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} density matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if not is_hermitian(rho, STATE_TOL):
        raise ValueError("density matrix is not Hermitian within 1e-10")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr.real:.3g} differs from 1")
    lam = min_eigenvalue(rho)
    if lam < -STATE_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")
    return rho


def density_from_bloch(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValueError("Bloch vector must have 3 finite components")
    if np.linalg.norm(r) > 1.0 + STATE_TOL:
        raise ValueError(f"unphysical Bloch vector, |r| = {np.linalg.norm(r):.12g} > 1")
    return 0.5 * (SIGMA_0 + r[0] * PAULIS[0] + r[1] * PAULIS[1] + r[2] * PAULIS[2])


def bloch_from_density(rho) -> np.ndarray:
    rho = validate_density_matrix(rho)
    return np.array([np.trace(s @ rho).real for s in PAULIS])


def _pauli_coordinates(x: np.ndarray) -> np.ndarray:
    """Complex coordinates ``tr(sigma_mu x)`` for mu = 0..3."""
    return np.array([np.trace(x), *(np.trace(s @ x) for s in PAULIS)])


def _from_pauli_coordinates(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c[0] * SIGMA_0 + c[1] * PAULIS[0] + c[2] * PAULIS[1] + c[3] * PAULIS[2])


# -- channels ----------------------------------------------------------------


@dataclass(frozen=True)
class QubitChannel:
    """Affine Bloch map ``r -> a @ r + b``; trace preservation is built in."""

    a: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (3, 3) or b.shape != (3,):
            raise ValueError("channel needs a 3x3 linear part and a length-3 translation")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("channel has non-finite entries")
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "b", _frozen(b))

    @property
    def transfer_matrix(self) -> np.ndarray:
        """4x4 matrix acting on ``(1, r1, r2, r3)``."""
        t = np.zeros((4, 4))
        t[0, 0] = 1.0
        t[1:, 0] = self.b
        t[1:, 1:] = self.a
        return t

    def apply_to_operator(self, x) -> np.ndarray:
        """Linear extension of the channel to an arbitrary 2x2 operator."""
        c = _pauli_coordinates(np.asarray(x, dtype=complex))
        out = np.empty(4, dtype=complex)
        out[0] = c[0]
        out[1:] = self.a @ c[1:] + self.b * c[0]
        return _from_pauli_coordinates(out)


def identity_channel() -> QubitChannel:
    return QubitChannel(np.eye(3))


def _check_time(t: float, name: str = "t") -> None:
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"{name} must be finite and non-negative, got {t}")


def _check_positive(x: float, name: str) -> None:
    if not x > 0 or math.isnan(x):
        raise ValueError(f"{name} must be positive, got {x}")


def depolarizing_channel(t: float, tau: float) -> QubitChannel:
    _check_time(t)
    _check_positive(tau, "tau")
    return QubitChannel(math.exp(-t / tau) * np.eye(3))


def dephasing_channel(t: float, gamma: float) -> QubitChannel:
    """Continuous sigma_3 measurement: transverse components decay at ``gamma``."""
    _check_time(t)
    _check_positive(gamma, "gamma")
    f = math.exp(-gamma * t)
    return QubitChannel(np.diag([f, f, 1.0]))


def dephasing_channel_literal(t: float, tau: float) -> QubitChannel:
    """Dephasing from ``d rho/dt = -(1/tau) [s3, [s3, rho]]``; transverse rate 4/tau."""
    _check_positive(tau, "tau")
    return dephasing_channel(t, 4.0 / tau)


def compose(ch2: QubitChannel, ch1: QubitChannel) -> QubitChannel:
    """The channel ``ch2 o ch1`` (apply ``ch1`` first)."""
    return QubitChannel(ch2.a @ ch1.a, ch2.a @ ch1.b + ch2.b)


def apply_channel(ch: QubitChannel, rho) -> np.ndarray:
    r = bloch_from_density(rho)
    out = ch.a @ r + ch.b
    norm = float(np.linalg.norm(out))
    # smallest eigenvalue of (I + r.sigma)/2 is (1 - |r|)/2
    if (1.0 - norm) / 2.0 < -STATE_TOL:
        raise ValueError(f"channel output is not positive (|r| = {norm:.12g}); channel is not CP")
    return 0.5 * (SIGMA_0 + out[0] * PAULIS[0] + out[1] * PAULIS[1] + out[2] * PAULIS[2])


# -- generators --------------------------------------------------------------


@dataclass(frozen=True)
class JumpOperator:
    """``L = c0 I + c1 s1 + c2 s2 + c3 s3`` with a non-negative rate."""

    rate: float
    coeffs: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        rate = float(self.rate)
        if not math.isfinite(rate) or rate < 0:
            raise ValueError(f"jump rate must be finite and non-negative, got {self.rate}")
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(coeffs) != 4 or not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise ValueError("jump operator needs 4 finite Pauli coefficients")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def matrix(self) -> np.ndarray:
        c = self.coeffs
        return c[0] * SIGMA_0 + c[1] * PAULIS[0] + c[2] * PAULIS[1] + c[3] * PAULIS[2]


@dataclass(frozen=True)
class LindbladGenerator:
    """Hamiltonian ``H = h . sigma / 2`` plus weighted jump operators."""

    h: tuple[float, float, float] = (0.0, 0.0, 0.0)
    jumps: tuple[JumpOperator, ...] = ()

    def __post_init__(self):
        h = tuple(float(x) for x in self.h)
        if len(h) != 3 or not all(math.isfinite(x) for x in h):
            raise ValueError("Hamiltonian field h needs 3 finite components")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "jumps", tuple(self.jumps))

    @property
    def hamiltonian(self) -> np.ndarray:
        return 0.5 * sum(hk * s for hk, s in zip(self.h, PAULIS))

    def rhs(self, rho) -> np.ndarray:
        """``d rho / dt`` for a 2x2 operator (see module notes for the rate convention)."""
        rho = np.asarray(rho, dtype=complex)
        hm = self.hamiltonian
        out = -1j * (hm @ rho - rho @ hm)
        for jump in self.jumps:
            lm = jump.matrix
            ldl = lm.conj().T @ lm
            out = out + jump.rate * (2.0 * lm @ rho @ lm.conj().T - ldl @ rho - rho @ ldl)
        return out


def depolarizing_generator(tau: float) -> LindbladGenerator:
    _check_positive(tau, "tau")
    rate = 1.0 / (8.0 * tau)
    return LindbladGenerator(
        jumps=tuple(JumpOperator(rate, tuple(1.0 if j == k else 0.0 for j in range(4))) for k in (1, 2, 3))
    )


def dephasing_generator(gamma: float) -> LindbladGenerator:
    _check_positive(gamma, "gamma")
    return LindbladGenerator(jumps=(JumpOperator(gamma / 4.0, (0, 0, 0, 1)),))


def bloch_generator_from_lindblad(gen: LindbladGenerator) -> np.ndarray:
    """Real 4x4 ``g`` with ``d(1, r)/dt = g @ (1, r)``.

    ``g[mu, nu] = tr(sigma_mu L(sigma_nu)) / 2`` with ``sigma_0 = I``; the first
    row vanishes because the generator is trace preserving.
    """
    basis = (SIGMA_0, *PAULIS)
    g = np.empty((4, 4), dtype=complex)
    for nu, s_nu in enumerate(basis):
        image = gen.rhs(s_nu)
        for mu, s_mu in enumerate(basis):
            g[mu, nu] = 0.5 * np.trace(s_mu @ image)
    if np.max(np.abs(g.imag)) > 1e-12:
        raise ValueError("generator does not preserve Hermiticity")
    g = g.real
    g[0] = 0.0
    return g


def channel_from_generator(g, t: float) -> QubitChannel:
    _check_time(t)
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise ValueError("Bloch generator must be 4x4")
    if np.any(g[0] != 0.0):
        raise ValueError("Bloch generator must have a zero first row")
    m = matrix_exp_real(g, t)
    return QubitChannel(m[1:, 1:], m[1:, 0])
