"""Monte Carlo unraveling of the isotropic depolarizer.

Each trajectory is a pure spin state driven by a white-noise magnetic field,
``d psi = -(i/2) dW . sigma psi`` with independent Gaussian increments of
variance ``dt / tau`` per component. Every step applies the exact SU(2)
rotation ``exp(-(i/2) dW . sigma)``, so the norm is preserved to round-off and
the ensemble average decays as ``r(t) = exp(-t / tau) r(0)``.

Random streams are Philox generators keyed by ``(seed, trajectory_index)``
and consumed step by step, so results do not depend on how trajectories are
batched or scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 20020917
DEFAULT_SAMPLES = 10
CHUNK_SIZE = 256


@dataclass(frozen=True)
class SSEConfig:
    tau: float
    dt: float
    t_final: float
    n_traj: int
    seed: int = DEFAULT_SEED
    initial_state: tuple[complex, complex] = (1.0, 0.0)
    n_samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        psi = tuple(complex(c) for c in self.initial_state)
        object.__setattr__(self, "initial_state", psi)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not (self.dt > 0 and self.dt <= self.tau / 100.0 * (1 + 1e-12)):
            raise ValueError(f"dt must satisfy 0 < dt <= tau/100, got dt={self.dt}, tau={self.tau}")
        if not (math.isfinite(self.t_final) and self.t_final >= self.dt):
            raise ValueError("t_final must be finite and at least dt")
        if abs(self.t_final / self.dt - self.n_steps) > 1e-6:
            raise ValueError("t_final must be an integer multiple of dt")
        if int(self.n_traj) != self.n_traj or self.n_traj < 1:
            raise ValueError("n_traj must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if len(psi) != 2 or abs(math.hypot(abs(psi[0]), abs(psi[1])) - 1.0) > 1e-12:
            raise ValueError("initial_state must be a unit-norm pair of amplitudes")
        if self.n_samples < 2:
            raise ValueError("need at least two sample times")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def sample_steps(self) -> np.ndarray:
        return np.round(np.linspace(0, self.n_steps, self.n_samples)).astype(int)

    @property
    def sample_times(self) -> np.ndarray:
        return self.sample_steps * self.dt


def state_from_bloch(r) -> tuple[complex, complex]:
    """Amplitudes of the pure state with unit Bloch vector ``r``."""
    r = np.asarray(r, dtype=float)
    norm = float(np.linalg.norm(r))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("a pure state needs a unit Bloch vector")
    theta = math.acos(max(-1.0, min(1.0, r[2] / norm)))
    phi = math.atan2(r[1], r[0])
    return (complex(math.cos(theta / 2)), complex(math.sin(theta / 2)) * complex(math.cos(phi), math.sin(phi)))


def bloch_of_states(psi: np.ndarray) -> np.ndarray:
    """Bloch vectors of state vectors stacked along the last axis (size 2)."""
    a, b = psi[..., 0], psi[..., 1]
    ab = a.conj() * b
    return np.stack([2.0 * ab.real, 2.0 * ab.imag, (abs(a) ** 2 - abs(b) ** 2)], axis=-1)


def sse_kick(psi, dw) -> np.ndarray:
    """Apply ``exp(-(i/2) dw . sigma)`` to ``psi``.

    Works on a single state or on a batch (``psi`` of shape ``(n, 2)`` with
    ``dw`` of shape ``(n, 3)``).
    """
    psi = np.asarray(psi, dtype=complex)
    dw = np.asarray(dw, dtype=float)
    theta = np.linalg.norm(dw, axis=-1)
    c = np.cos(theta / 2.0)
    # sin(theta/2)/theta, finite at theta = 0
    u = (0.5 * np.sinc(theta / (2.0 * np.pi)))[..., None] * dw
    return _rotate(psi, c, u)


def _rotate(psi: np.ndarray, c, u: np.ndarray) -> np.ndarray:
    a, b = psi[..., 0], psi[..., 1]
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    new_a = c * a - 1j * (u3 * a + (u1 - 1j * u2) * b)
    new_b = c * b - 1j * ((u1 + 1j * u2) * a - u3 * b)
    return np.stack([new_a, new_b], axis=-1)


def evolve_with_increments(psi0, increments, sample_steps) -> np.ndarray:
    """Drive a batch of trajectories with explicit field increments.

    ``increments`` has shape ``(n_traj, n_steps, 3)``. Returns Bloch vectors of
    shape ``(n_traj, len(sample_steps), 3)`` taken after ``k`` kicks for each
    ``k`` in ``sample_steps``.
    """
    increments = np.asarray(increments, dtype=float)
    n, n_steps, _ = increments.shape
    sample_steps = np.asarray(sample_steps, dtype=int)
    if np.any(sample_steps < 0) or np.any(sample_steps > n_steps) or np.any(np.diff(sample_steps) < 0):
        raise ValueError("sample steps must be non-decreasing and within the step count")

    theta = np.linalg.norm(increments, axis=-1)
    cos_half = np.cos(theta / 2.0)
    u = (0.5 * np.sinc(theta / (2.0 * np.pi)))[..., None] * increments

    psi = np.broadcast_to(np.asarray(psi0, dtype=complex), (n, 2)).copy()
    out = np.empty((n, len(sample_steps), 3))
    j = 0
    for step in range(n_steps + 1):
        while j < len(sample_steps) and sample_steps[j] == step:
            out[:, j] = bloch_of_states(psi)
            j += 1
        if step == n_steps or j == len(sample_steps):
            break
        psi = _rotate(psi, cos_half[:, step], u[:, step])
    return out


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def _increments(cfg: SSEConfig, indices) -> np.ndarray:
    scale = math.sqrt(cfg.dt / cfg.tau)
    return np.stack([scale * trajectory_rng(cfg.seed, i).standard_normal((cfg.n_steps, 3)) for i in indices])


def _run_batch(cfg: SSEConfig, indices) -> np.ndarray:
    return evolve_with_increments(cfg.initial_state, _increments(cfg, indices), cfg.sample_steps)


def run_trajectory(cfg: SSEConfig, trajectory_index: int) -> np.ndarray:
    """Bloch vectors of one trajectory at ``cfg.sample_times``, shape ``(n_samples, 3)``."""
    return _run_batch(cfg, [trajectory_index])[0]


@dataclass(frozen=True)
class EnsembleResult:
    times: np.ndarray
    mean_bloch: np.ndarray
    stderr: np.ndarray
    n_traj: int

    @property
    def stderr_defined(self) -> bool:
        return self.n_traj > 1


def run_ensemble(cfg: SSEConfig, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> EnsembleResult:
    """Mean Bloch vector and its standard error over ``cfg.n_traj`` trajectories.

    Trajectories are processed in fixed index chunks (optionally on a thread
    pool) and reduced in index order. With a single trajectory the standard
    error is NaN.
    """
    chunks = [range(lo, min(lo + chunk_size, cfg.n_traj)) for lo in range(0, cfg.n_traj, chunk_size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: _run_batch(cfg, idx), chunks))
    else:
        parts = [_run_batch(cfg, idx) for idx in chunks]
    samples = np.concatenate(parts, axis=0)

    mean = samples.mean(axis=0)
    if cfg.n_traj > 1:
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(cfg.n_traj)
    else:
        stderr = np.full_like(mean, np.nan)
    return EnsembleResult(cfg.sample_times, mean, stderr, cfg.n_traj)


@dataclass(frozen=True)
class ZReport:
    times: np.ndarray
    z: np.ndarray
    max_abs_z: float

    @property
    def passed(self) -> bool:
        return self.max_abs_z < 4.0

    @property
    def flagged(self) -> bool:
        """Statistically unusual but not failing: 3 <= max |z| < 4."""
        return 3.0 <= self.max_abs_z < 4.0


def analytic_bloch(times, tau: float, r0) -> np.ndarray:
    return np.exp(-np.asarray(times) / tau)[:, None] * np.asarray(r0, dtype=float)[None, :]


def compare_to_analytic(res: EnsembleResult, tau: float) -> ZReport:
    """z-scores of the ensemble mean against ``exp(-t/tau) r(0)``.

    ``r(0)`` is read from the first sample, which all trajectories share.
    Components with zero standard error must match exactly (z = 0).
    """
    if not res.stderr_defined:
        raise ValueError("standard error is undefined for a single trajectory")
    diff = res.mean_bloch - analytic_bloch(res.times, tau, res.mean_bloch[0])
    zero = res.stderr == 0.0
    if np.any(zero & (np.abs(diff) > 1e-14)):
        raise ValueError("zero standard error with a nonzero deviation")
    z = np.where(zero, 0.0, diff / np.where(zero, 1.0, res.stderr))
    return ZReport(res.times, z, float(np.max(np.abs(z))))
