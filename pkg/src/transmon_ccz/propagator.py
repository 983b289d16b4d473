"""Time-ordered propagation of the transmon chain under a control table.

Hamiltonians are in GHz and times in ns, so each step contributes
``exp(-2*pi*i * H * dt)``.  Products are time ordered with later steps on
the left.

Piecewise-constant segments are exponentiated exactly.  Erf-smoothed
segments are split into ``n_sub`` substeps, each integrated with the
fourth-order commutator-free exponential rule: two exponentials of the
Hamiltonian at weighted combinations of the two Gauss-Legendre samples.
Because ``H`` is affine in the detunings, each exponential is simply ``H``
evaluated at an effective detuning for half a substep.

The Hamiltonian conserves the total excitation number, so all propagators
are assembled from the excitation-number blocks of ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import TransmonChain, build_hamiltonian, excitation_number
from .pulses import ControlTable, PulseShape, sample_points

TWO_PI = 2.0 * np.pi
DEFAULT_N_SUB = 64
HERMITIAN_TOL = 1e-10

_GAUSS = np.array([0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6])
_CF4_WEIGHTS = np.array([(3 - 2 * np.sqrt(3)) / 12, (3 + 2 * np.sqrt(3)) / 12])


def expm_hermitian(h: np.ndarray, phase_scale: float) -> np.ndarray:
    """Return ``exp(-i * phase_scale * h)`` for Hermitian ``h`` via eigendecomposition."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    return _expm_hermitian_stack(h, phase_scale)


def _expm_hermitian_stack(h: np.ndarray, phase_scale) -> np.ndarray:
    # works on (..., d, d) stacks; phase_scale broadcasts against (...,)
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * np.asarray(phase_scale)[..., None] * w)
    return (v * phases[..., None, :]) @ v.conj().swapaxes(-1, -2)


def _ordered_product(us: np.ndarray) -> np.ndarray:
    """``us[S-1] @ ... @ us[0]`` for a stack along axis -3."""
    while us.shape[-3] > 1:
        if us.shape[-3] % 2:
            head, last = us[..., :-1, :, :], us[..., -1:, :, :]
            us = np.concatenate([head[..., 1::2, :, :] @ head[..., 0::2, :, :], last], axis=-3)
        else:
            us = us[..., 1::2, :, :] @ us[..., 0::2, :, :]
    return us[..., 0, :, :]


def computational_indices(chain: TransmonChain) -> np.ndarray:
    """Full-space indices of the qubit states, in binary order ``|00..0>, |00..1>, ...``."""
    return np.flatnonzero(np.all(chain.level_digits <= 1, axis=1))


def detuning_schedule(points, dt: float, shape, sigma: float, n_sub: int = DEFAULT_N_SUB):
    """Detunings of every exponential step and the step length.

    Returns ``(delta, step, per_segment)`` where ``delta`` has shape
    ``(batch, n_transmons, N * per_segment)``.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    if PulseShape(shape) is PulseShape.PIECEWISE_CONSTANT:
        return points, dt, 1
    if n_sub < 1:
        raise ValueError("n_sub must be >= 1")
    h = dt / n_sub
    starts = np.arange(n * n_sub) * h
    d1, d2 = (sample_points(points, starts + c * h, dt, shape, sigma) for c in _GAUSS)
    a1, a2 = _CF4_WEIGHTS
    early = 2 * (a2 * d1 + a1 * d2)
    late = 2 * (a1 * d1 + a2 * d2)
    delta = np.stack([early, late], axis=-1).reshape(points.shape[:-1] + (-1,))
    return delta, h / 2, 2 * n_sub


class _Sectors:
    """Excitation-number blocks of the chain Hamiltonian."""

    def __init__(self, chain: TransmonChain, excitations=None):
        exc = excitation_number(chain)
        wanted = np.unique(exc) if excitations is None else excitations
        self.blocks = []
        for n in wanted:
            idx = np.flatnonzero(exc == n)
            self.blocks.append((idx, np.array(chain.drift[np.ix_(idx, idx)]), chain.number_diagonals[:, idx]))

    def propagators(self, delta: np.ndarray, step: float, per_segment: int):
        """Per-segment block propagators, each of shape ``(batch, N, m, m)``."""
        for idx, drift, numbers in self.blocks:
            m = idx.size
            h = np.broadcast_to(drift, delta.shape[:1] + delta.shape[-1:] + (m, m)).copy()
            h[..., np.arange(m), np.arange(m)] += np.einsum("bkt,km->btm", delta, numbers)
            us = _expm_hermitian_stack(h, TWO_PI * step)
            us = us.reshape(us.shape[:1] + (-1, per_segment, m, m))
            yield idx, _ordered_product(us)


@dataclass(frozen=True)
class EvolutionResult:
    u_full: np.ndarray
    u_comp: np.ndarray


def _check(chain: TransmonChain, table: ControlTable) -> None:
    if table.n_transmons != chain.n_transmons:
        raise ValueError(f"table drives {table.n_transmons} transmons, chain has {chain.n_transmons}")


def segment_unitaries(
    chain: TransmonChain, table: ControlTable, n_sub: int = DEFAULT_N_SUB, dense: bool = False
) -> np.ndarray:
    """Full-space propagator of each control segment, shape ``(N, dim, dim)``.

    ``dense=True`` exponentiates the full matrices instead of the blocks.
    """
    _check(chain, table)
    delta, step, per = detuning_schedule(table.points[None], table.dt, table.shape, table.sigma, n_sub)
    if dense:
        hs = np.stack([build_hamiltonian(chain, delta[0, :, m]) for m in range(delta.shape[-1])])
        us = _expm_hermitian_stack(hs, TWO_PI * step)
        return _ordered_product(us.reshape(table.n_steps, per, chain.dim, chain.dim))
    out = np.zeros((table.n_steps, chain.dim, chain.dim), dtype=complex)
    for idx, u in _Sectors(chain).propagators(delta, step, per):
        out[:, idx[:, None], idx[None, :]] = u[0]
    return out


def propagate(
    chain: TransmonChain, table: ControlTable, n_sub: int = DEFAULT_N_SUB, dense: bool = False
) -> EvolutionResult:
    """Evolution operator over the whole pulse and its computational-subspace block."""
    u = _ordered_product(segment_unitaries(chain, table, n_sub, dense))
    comp = computational_indices(chain)
    return EvolutionResult(u_full=u, u_comp=u[np.ix_(comp, comp)])


class SubspacePropagator:
    """Computational-subspace propagator for batches of control tables.

    Only the sectors holding qubit states (at most ``n_transmons``
    excitations, blocks of at most 10x10 for three four-level transmons) are
    propagated, which yields the same ``u_comp`` as :func:`propagate`.
    """

    def __init__(
        self,
        chain: TransmonChain,
        dt: float,
        shape: PulseShape = PulseShape.PIECEWISE_CONSTANT,
        sigma: float = 0.25,
        n_sub: int = DEFAULT_N_SUB,
    ):
        self.chain = chain
        self.dt = float(dt)
        self.shape = PulseShape(shape)
        self.sigma = float(sigma)
        self.n_sub = n_sub
        comp = computational_indices(chain)
        self._comp = comp
        self._sectors = _Sectors(chain, np.unique(excitation_number(chain)[comp]))

    def __call__(self, points) -> np.ndarray:
        """``u_comp`` for control points of shape ``(n_transmons, N)`` or ``(B, n_transmons, N)``."""
        points = np.asarray(points, dtype=float)
        single = points.ndim == 2
        if single:
            points = points[None]
        delta, step, per = detuning_schedule(points, self.dt, self.shape, self.sigma, self.n_sub)
        k = self._comp.size
        out = np.zeros((points.shape[0], k, k), dtype=complex)
        for idx, u in self._sectors.propagators(delta, step, delta.shape[-1]):
            rows = np.flatnonzero(np.isin(self._comp, idx))
            local = np.searchsorted(idx, self._comp[rows])
            out[:, rows[:, None], rows[None, :]] = u[:, 0][:, local[:, None], local[None, :]]
        return out[0] if single else out
