"""Intrinsic CCZ fidelity with single-transmon phase compensation."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from .hamiltonian import TransmonChain
from .propagator import DEFAULT_N_SUB, SubspacePropagator
from .pulses import ControlTable, PulseShape


class DegeneratePhaseError(ValueError):
    """A single-excitation diagonal entry vanished, so its phase is undefined."""


def _bits(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    return (idx[:, None] >> np.arange(n_qubits - 1, -1, -1)[None, :]) & 1


def wrap_phase(theta):
    """Map angles into ``(-pi, pi]``."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def target_ccz(phases) -> np.ndarray:
    """Phase-compensated controlled-phase target.

    Diagonal entry for the qubit string ``b`` is ``exp(i sum_k b_k theta_k)``,
    negated for the all-ones string.  With three phases this is the CCZ target
    ``diag(1, e^{i t3}, e^{i t2}, ..., -e^{i(t1+t2+t3)})``.
    """
    theta = np.asarray(phases, dtype=float)
    bits = _bits(theta.size)
    diag = np.exp(1j * (bits @ theta))
    diag[-1] *= -1
    return np.diag(diag)


def extract_phases(u_comp: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Phases of the single-excitation diagonal entries, qubit 1 first."""
    u_comp = np.asarray(u_comp)
    n = int(round(np.log2(u_comp.shape[0])))
    entries = np.array([u_comp[1 << (n - 1 - k), 1 << (n - 1 - k)] for k in range(n)])
    if np.any(np.abs(entries) < tol):
        raise DegeneratePhaseError("single-excitation diagonal entry is zero")
    return wrap_phase(np.angle(entries))


def intrinsic_fidelity(u_comp: np.ndarray, phases) -> float:
    """``|Tr(target^dagger u_comp)| / 2^n``."""
    u_comp = np.asarray(u_comp)
    target = np.diag(target_ccz(phases))
    return float(np.abs(np.dot(target.conj(), np.diag(u_comp))) / u_comp.shape[0])


def _batch_fidelity(u_comp: np.ndarray, phases: np.ndarray) -> np.ndarray:
    # u_comp (B, 2^n, 2^n), phases (B, n)
    n = phases.shape[-1]
    bits = _bits(n)
    target = np.exp(1j * phases @ bits.T)
    target[:, -1] *= -1
    diag = np.diagonal(u_comp, axis1=-2, axis2=-1)
    return np.abs(np.sum(target.conj() * diag, axis=-1)) / u_comp.shape[-1]


def refine_phases(u_comp: np.ndarray, phases=None, sweeps: int = 3, grid: int = 32) -> np.ndarray:
    """Coordinate ascent of the fidelity over the compensation phases.

    Each coordinate is first scanned on a ``grid``-point lattice, then polished
    by golden-section search around the best lattice point.
    """
    n = int(round(np.log2(len(u_comp))))
    theta = np.zeros(n) if phases is None else np.array(phases, dtype=float)
    lattice = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    width = lattice[1] - lattice[0]
    for _ in range(sweeps):
        for k in range(theta.size):
            def neg(v, k=k):
                trial = theta.copy()
                trial[k] = v
                return -intrinsic_fidelity(u_comp, trial)

            best = min(lattice, key=neg)
            best = best if neg(best) < neg(theta[k]) else theta[k]
            res = minimize_scalar(neg, bracket=(best - width, best, best + width), method="golden")
            if res.fun <= neg(best):
                best = res.x
            theta[k] = best
    return wrap_phase(theta)


def score(u_comp: np.ndarray, refine: bool = False) -> tuple[float, np.ndarray]:
    """Fidelity and phases for one projected unitary, falling back to zero phases."""
    try:
        phases = extract_phases(u_comp)
    except DegeneratePhaseError:
        phases = np.zeros(int(round(np.log2(len(u_comp)))))
    if refine:
        refined = refine_phases(u_comp, phases)
        if intrinsic_fidelity(u_comp, refined) > intrinsic_fidelity(u_comp, phases):
            phases = refined
    return intrinsic_fidelity(u_comp, phases), phases


class CCZObjective:
    """Intrinsic fidelity as a function of the flattened control genome.

    Instances are callable on a single genome and also expose :meth:`batch`
    for a ``(P, 3N)`` array, which the optimiser uses to evaluate a whole
    generation in one vectorised pass.
    """

    def __init__(
        self,
        chain: TransmonChain,
        dt: float = 1.0,
        shape: PulseShape = PulseShape.PIECEWISE_CONSTANT,
        sigma: float = 0.25,
        n_sub: int = DEFAULT_N_SUB,
        refine: bool = False,
    ):
        self.chain = chain
        self.refine = refine
        self.propagator = SubspacePropagator(chain, dt, shape, sigma, n_sub)

    def _points(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x.reshape(x.shape[:-1] + (self.chain.n_transmons, -1))

    def __call__(self, x) -> float:
        return self.batch(np.asarray(x, dtype=float)[None])[0]

    def batch(self, xs) -> np.ndarray:
        us = self.propagator(self._points(xs))
        if self.refine:
            return np.array([score(u, refine=True)[0] for u in us])
        n = self.chain.n_transmons
        singles = np.stack([us[:, 1 << (n - 1 - k), 1 << (n - 1 - k)] for k in range(n)], axis=-1)
        phases = np.where(np.abs(singles) < 1e-12, 0.0, np.angle(singles))
        return _batch_fidelity(us, phases)


def objective(chain: TransmonChain, table: ControlTable, n_sub: int = DEFAULT_N_SUB, refine: bool = False) -> float:
    """Intrinsic fidelity of the gate produced by ``table``."""
    if table.n_transmons != chain.n_transmons:
        raise ValueError(f"table drives {table.n_transmons} transmons, chain has {chain.n_transmons}")
    obj = CCZObjective(chain, table.dt, table.shape, table.sigma, n_sub, refine)
    return obj(table.to_genome())
