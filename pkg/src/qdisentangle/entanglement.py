"""Bipartite analysis: Choi matrices, PPT verdicts, disentanglement times,
measure-and-prepare decompositions and the evolved singlet.

Separability of two qubits is decided by the Peres-Horodecki test, which is
exact in 2 (x) 2. A channel is entanglement breaking iff its Choi state is
separable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channels
from .channels import QubitChannel, apply_channel, channel_from_generator, density_from_bloch
from .linalg import (
    PAULIS,
    SIGMA_0,
    hermitian_eigenvalues,
    partial_transpose,
    tensor_product,
    trace_norm,
)

CP_TOL = 1e-10
# Verdict tolerance on the smallest partial-transpose eigenvalue. The Jacobi
# solver resolves that eigenvalue to round-off relative to its own size in the
# structured matrices produced here, so the sign itself is used.
EB_TOL = 0.0
POVM_TOL = 1e-13
DEFAULT_VERIFY_SEED = 20020917

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
SIGMA_DOT_SIGMA = sum(tensor_product(s, s) for s in PAULIS)


class NonMonotoneOnsetError(ValueError):
    """The entanglement-breaking verdict switched back to entangled in the scan."""


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random state ``G G^dag / tr`` from a complex Gaussian ``G``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def apply_on_second(ch: QubitChannel, m) -> np.ndarray:
    """``(id (x) ch)`` on a 4x4 operator."""
    blocks = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    out = np.empty_like(blocks)
    for i in range(2):
        for j in range(2):
            out[i, :, j, :] = ch.apply_to_operator(blocks[i, :, j, :])
    return out.reshape(4, 4)


def apply_on_first(ch: QubitChannel, m) -> np.ndarray:
    """``(ch (x) id)`` on a 4x4 operator."""
    blocks = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    out = np.empty_like(blocks)
    for k in range(2):
        for l in range(2):
            out[:, k, :, l] = ch.apply_to_operator(blocks[:, k, :, l])
    return out.reshape(4, 4)


def choi_of_channel(ch: QubitChannel) -> np.ndarray:
    """Trace-one Choi state ``(id (x) ch)|phi+><phi+|``.

    Raises ``ValueError`` if the map is not completely positive.
    """
    choi = apply_on_second(ch, projector(PHI_PLUS))
    lam = hermitian_eigenvalues(choi).eigenvalues[0]
    if lam < -CP_TOL:
        raise ValueError(f"map is not completely positive (Choi eigenvalue {lam:.3g})")
    return choi


@dataclass(frozen=True)
class EBVerdict:
    is_entanglement_breaking: bool
    min_pt_eigenvalue: float
    negativity: float

    @property
    def is_separable(self) -> bool:
        return self.is_entanglement_breaking


def ppt_verdict(m, tol: float = EB_TOL) -> EBVerdict:
    """Peres-Horodecki verdict for a two-qubit density matrix.

    ``negativity`` is the summed magnitude of the negative partial-transpose
    eigenvalues, which equals ``(||m^T_B||_1 - 1) / 2`` for trace-one input but
    keeps full relative precision when the negative eigenvalue is tiny.
    States with ``min_pt_eigenvalue >= -tol`` are reported separable.
    """
    m = channels.validate_density_matrix(m, dim=4)
    lam = hermitian_eigenvalues(partial_transpose(m)).eigenvalues
    negativity = float(np.sum(-lam[lam < 0.0]))
    min_pt = float(lam[0])
    return EBVerdict(min_pt >= -tol, min_pt, negativity)


def negativity_from_trace_norm(m) -> float:
    return (trace_norm(partial_transpose(m)) - 1.0) / 2.0


def is_entanglement_breaking(ch: QubitChannel, tol: float = EB_TOL) -> EBVerdict:
    return ppt_verdict(choi_of_channel(ch), tol=tol)


def disentanglement_time(
    g,
    t_max: float,
    tol: float = 1e-10,
    n_scan: int = 64,
    eb_tol: float = EB_TOL,
) -> float | None:
    """Earliest time at which ``exp(g t)`` becomes entanglement breaking.

    A uniform scan of ``n_scan`` points on ``[0, t_max]`` must show a single
    entangled -> EB transition; it is then bisected until the bracket is
    narrower than ``tol``. Returns the upper (EB) end of the final bracket,
    or ``None`` when the map is still entangling at ``t_max``.
    """
    if not t_max > 0 or not math.isfinite(t_max):
        raise ValueError("t_max must be positive and finite")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def eb(t: float) -> bool:
        return is_entanglement_breaking(channel_from_generator(g, t), tol=eb_tol).is_entanglement_breaking

    times = np.linspace(0.0, t_max, n_scan)
    verdicts = [eb(float(t)) for t in times]
    if verdicts[0]:
        # exp(0) is the identity map, which is never EB; a True here means g is broken
        raise ValueError("map is entanglement breaking at t = 0")
    first = next((i for i, v in enumerate(verdicts) if v), None)
    if first is None:
        return None
    if not all(verdicts[first:]):
        raise NonMonotoneOnsetError("entanglement-breaking onset is not monotone on the scan grid")

    lo, hi = float(times[first - 1]), float(times[first])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if eb(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- measure-and-prepare form --------------------------------------------------


@dataclass(frozen=True)
class HolevoForm:
    """Pairs ``(P, rho)`` with ``M(x) = sum tr(P x) rho``; ``{P}`` is a POVM."""

    entries: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        entries = tuple((np.asarray(p, dtype=complex), np.asarray(r, dtype=complex)) for p, r in self.entries)
        if not entries:
            raise ValueError("empty decomposition")
        total = sum(p for p, _ in entries)
        if np.max(np.abs(total - SIGMA_0)) > POVM_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        for p, r in entries:
            if hermitian_eigenvalues(p).eigenvalues[0] < -1e-12:
                raise ValueError("POVM element is not positive")
            channels.validate_density_matrix(r)
        object.__setattr__(self, "entries", entries)

    @property
    def povm(self) -> list[np.ndarray]:
        return [p for p, _ in self.entries]

    @property
    def states(self) -> list[np.ndarray]:
        return [r for _, r in self.entries]

    def __call__(self, rho) -> np.ndarray:
        return sum(np.trace(p @ rho) * r for p, r in self.entries)


def holevo_form_depolarizing(t: float, tau: float) -> HolevoForm:
    """Six-outcome measure-and-prepare form of the depolarizer at time ``t``.

    Measures along the +-x, +-y, +-z axes with ``P = (I + s sigma_a) / 6`` and
    prepares ``(I + 3 s exp(-t/tau) sigma_a) / 2``. Those states only exist
    once ``3 exp(-t/tau) <= 1``.
    """
    channels.depolarizing_channel(t, tau)  # parameter checks
    coeff = 3.0 * math.exp(-t / tau)
    if coeff > 1.0 + 1e-12:
        raise ValueError(
            f"the prepared states do not exist: 3 exp(-t/tau) = {coeff:.6g} > 1 "
            f"(need t >= tau ln 3 = {tau * math.log(3):.10g})"
        )
    entries = []
    for axis in range(3):
        for s in (1.0, -1.0):
            p = (SIGMA_0 + s * PAULIS[axis]) / 6.0
            r = np.zeros(3)
            r[axis] = s * coeff
            entries.append((p, density_from_bloch(r)))
    return HolevoForm(tuple(entries))


def verify_holevo_form(form: HolevoForm, ch: QubitChannel, n_samples: int, seed: int = DEFAULT_VERIFY_SEED) -> float:
    """Largest trace-norm gap between the decomposition and the channel."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        rho = random_density_matrix(2, rng)
        diff = form(rho) - apply_channel(ch, rho)
        worst = max(worst, trace_norm(0.5 * (diff + diff.conj().T)))
    return worst


# -- evolved singlet ------------------------------------------------------------


@dataclass(frozen=True)
class WernerState:
    """``(I (x) I - f sigma . sigma) / 4``, a state for ``-1/3 <= f <= 1``."""

    f: float

    def __post_init__(self):
        if not -1.0 / 3.0 - 1e-12 <= self.f <= 1.0 + 1e-12:
            raise ValueError(f"Werner parameter {self.f} outside [-1/3, 1]")

    @property
    def m(self) -> np.ndarray:
        return (np.eye(4) - self.f * SIGMA_DOT_SIGMA) / 4.0


def evolve_singlet(t: float, tau: float) -> WernerState:
    """Singlet after the depolarizer has acted on its first qubit for time ``t``."""
    channels.depolarizing_channel(t, tau)
    return WernerState(math.exp(-t / tau))


def first_separable_time(state_at, t_max: float, tol: float = 1e-10, eb_tol: float = EB_TOL) -> float:
    """Bisect for the first ``t`` where ``ppt_verdict(state_at(t))`` is separable.

    ``state_at(0)`` must be entangled and ``state_at(t_max)`` separable.
    """
    lo, hi = 0.0, float(t_max)
    if ppt_verdict(state_at(lo), eb_tol).is_separable or not ppt_verdict(state_at(hi), eb_tol).is_separable:
        raise ValueError("bracket does not straddle the separability boundary")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ppt_verdict(state_at(mid), eb_tol).is_separable:
            hi = mid
        else:
            lo = mid
    return hi
