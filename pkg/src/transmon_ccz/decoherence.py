"""Open-system scoring with amplitude- and phase-damping Kraus channels.

Times of a pulse are in ns while ``T1``/``T2`` are given in microseconds.
Channels act on one transmon at a time; applying them to every transmon in
turn is the same map as the full tensor-product Kraus family when the
transmons decohere independently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hamiltonian import TransmonChain
from .propagator import DEFAULT_N_SUB, computational_indices, segment_unitaries
from .pulses import ControlTable

NS_PER_US = 1000.0
TRUNCATION_LIMIT = 1e-2


class TruncationWarning(UserWarning):
    """Phase-damping step is too long for the ``l <= 3`` truncation."""


@dataclass(frozen=True)
class KrausFamily:
    process: str
    step: float
    time_constant: float
    matrices: tuple

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.matrices)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def amplitude_kraus(t: float, t1: float, n_levels: int = 4) -> KrausFamily:
    """Amplitude damping over ``t`` ns of a ``n_levels`` oscillator with relaxation ``t1`` us.

    ``E_l[j-l, j] = sqrt(C(j, l)) * p^((j-l)/2) * (1-p)^(l/2)`` with
    ``p = exp(-t/T1)``.
    """
    if not t1 > 0:
        raise ValueError(f"T1 must be positive, got {t1}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    p = math.exp(-t / (t1 * NS_PER_US))
    mats = []
    for l in range(n_levels):
        e = np.zeros((n_levels, n_levels), dtype=complex)
        for j in range(l, n_levels):
            e[j - l, j] = math.sqrt(math.comb(j, l)) * p ** ((j - l) / 2) * (1 - p) ** (l / 2)
        mats.append(e)
    return KrausFamily("amplitude", float(t), float(t1), tuple(mats))


def phase_kraus(t: float, t2: float, n_levels: int = 4, max_order: int = 3) -> KrausFamily:
    """Phase damping over ``t`` ns with dephasing time ``t2`` us, truncated at ``l <= max_order``.

    ``E_l = diag_j exp(-j^2 t / 2T2) sqrt((j^2 t/T2)^l / l!)``.  The truncated
    family is only approximately complete; a :class:`TruncationWarning` is
    issued when ``t/T2`` exceeds 1e-2.
    """
    if not t2 > 0:
        raise ValueError(f"T2 must be positive, got {t2}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    ratio = t / (t2 * NS_PER_US)
    if ratio > TRUNCATION_LIMIT:
        warnings.warn(f"t/T2 = {ratio:.3g} exceeds {TRUNCATION_LIMIT}; phase-damping truncation is inaccurate", TruncationWarning, stacklevel=2)
    lam = np.arange(n_levels) ** 2 * ratio
    mats = tuple(np.diag(np.exp(-lam / 2) * np.sqrt(lam**l / math.factorial(l))).astype(complex) for l in range(max_order + 1))
    return KrausFamily("phase", float(t), float(t2), mats)


def apply_channel(rho: np.ndarray, family: KrausFamily, transmon: int, n_transmons: int = 3) -> np.ndarray:
    """Apply a single-transmon channel to ``rho`` (or a stack of density matrices)."""
    if not 0 <= transmon < n_transmons:
        raise ValueError(f"transmon index {transmon} out of range for {n_transmons} transmons")
    d = family.matrices[0].shape[0]
    dim = d**n_transmons
    rho = np.asarray(rho)
    lead = rho.shape[:-2]
    if rho.shape[-2:] != (dim, dim):
        raise ValueError(f"density matrix must be {dim}x{dim}")
    # split into (batch, left, site, right) for rows and columns
    left, right = d**transmon, d ** (n_transmons - transmon - 1)
    r = rho.reshape((-1, left, d, right, left, d, right))
    # superoperator S[(i, j), (a, c)] = sum_l K_l[i, a] conj(K_l[j, c]) applied to the site's row and column
    sup = sum(np.kron(k, k.conj()) for k in family.matrices)
    site = np.moveaxis(r, (2, 5), (0, 1)).reshape(d * d, -1)
    out = np.moveaxis((sup @ site).reshape((d, d) + r.shape[:2] + r.shape[3:5] + r.shape[6:]), (0, 1), (2, 5))
    return out.reshape(lead + (dim, dim))


def _apply_all(rho, families, n_transmons):
    for fam in families:
        if fam is None:
            continue
        for k in range(n_transmons):
            rho = apply_channel(rho, fam, k, n_transmons)
    return rho


def evolve_open(
    chain: TransmonChain,
    table: ControlTable,
    t1: float | None,
    t2: float | None,
    n_sub: int = DEFAULT_N_SUB,
    phase_first: bool = False,
) -> list[np.ndarray]:
    """Final density matrices of the computational basis states.

    Each control segment applies the segment unitary, then amplitude damping
    on every transmon, then phase damping on every transmon, each for one
    step ``dt``.  ``None`` or ``inf`` coherence times switch a process off.
    """
    n, d = chain.n_transmons, chain.n_levels
    us = segment_unitaries(chain, table, n_sub)
    amp = None if t1 is None or math.isinf(t1) else amplitude_kraus(table.dt, t1, d)
    with warnings.catch_warnings():
        warnings.simplefilter("always", TruncationWarning)
        ph = None if t2 is None or math.isinf(t2) else phase_kraus(table.dt, t2, d)
    families = (ph, amp) if phase_first else (amp, ph)
    comp = computational_indices(chain)
    rho = np.zeros((comp.size, chain.dim, chain.dim), dtype=complex)
    rho[np.arange(comp.size), comp, comp] = 1.0
    for u in us:
        rho = u @ rho @ u.conj().T
        rho = _apply_all(rho, families, n)
    return list(rho)


def average_state_fidelity(
    chain: TransmonChain,
    table: ControlTable,
    t1: float | None,
    t2: float | None,
    n_sub: int = DEFAULT_N_SUB,
    squared: bool = False,
    phase_first: bool = False,
) -> float:
    """``(1/M) sum_k sqrt(|<psi_k| rho_k |psi_k>|)`` over the M computational basis states.

    ``squared=True`` drops the square root (plain average population).
    """
    comp = computational_indices(chain)
    rhos = evolve_open(chain, table, t1, t2, n_sub, phase_first)
    pops = np.abs(np.array([r[i, i] for r, i in zip(rhos, comp)]))
    return float(np.mean(pops if squared else np.sqrt(pops)))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-9, hermitian_tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit trace and positive."""
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"trace {np.trace(rho).real} differs from 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
