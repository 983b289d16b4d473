"""Hamiltonian of a linear chain of frequency-tunable transmons.

All entries are ordinary frequencies in GHz (``H/h``).  The product basis is
ordered with transmon 0 most significant, so for three four-level transmons
the state ``|j1 j2 j3>`` sits at index ``16*j1 + 4*j2 + j3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def _check_levels(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"level count must be an integer >= 2, got {d!r}")


def coupling_x(d: int) -> np.ndarray:
    """Ladder generalisation of Pauli-X: ``X[j-1, j] = X[j, j-1] = sqrt(j)``."""
    _check_levels(d)
    x = np.zeros((d, d), dtype=complex)
    j = np.arange(1, d)
    x[j - 1, j] = np.sqrt(j)
    x[j, j - 1] = np.sqrt(j)
    return x


def coupling_y(d: int) -> np.ndarray:
    """Ladder generalisation of Pauli-Y: ``Y[j-1, j] = -i sqrt(j)``, Hermitian."""
    _check_levels(d)
    y = np.zeros((d, d), dtype=complex)
    j = np.arange(1, d)
    y[j - 1, j] = -1j * np.sqrt(j)
    y[j, j - 1] = 1j * np.sqrt(j)
    return y


def embed(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Place a single-site operator on ``site`` of an ``n_sites`` product space."""
    d = op.shape[0]
    out = np.ones((1, 1), dtype=complex)
    for k in range(n_sites):
        out = np.kron(out, op if k == site else np.eye(d))
    return out


def duffing_anharmonicity(eta: float, n_levels: int = 4) -> np.ndarray:
    """Level shifts ``eta * j (j - 1) / 2`` of a Duffing oscillator (GHz)."""
    j = np.arange(n_levels)
    return eta * j * (j - 1) / 2.0


@dataclass(frozen=True)
class TransmonChain:
    """Static device model of nearest-neighbour coupled transmons.

    Parameters
    ----------
    anharmonicity : array_like, shape (n_transmons, n_levels)
        ``anharmonicity[k, j]`` is the shift of level ``j`` of transmon ``k``
        in GHz.  Column 0 must be zero.
    coupling : array_like, shape (n_transmons - 1,)
        XY coupling strengths in GHz between transmons ``k`` and ``k + 1``.
    """

    anharmonicity: np.ndarray
    coupling: np.ndarray = field(default=None)

    def __post_init__(self):
        eta = np.array(self.anharmonicity, dtype=float)
        if eta.ndim != 2:
            raise ValueError("anharmonicity must be a 2-d table (transmon, level)")
        n, d = eta.shape
        if n < 2:
            raise ValueError("a chain needs at least two transmons")
        _check_levels(d)
        if np.any(eta[:, 0] != 0.0):
            raise ValueError("anharmonicity of the ground level must be zero")
        if not np.all(np.isfinite(eta)):
            raise ValueError("anharmonicity must be finite")
        g = np.zeros(n - 1) if self.coupling is None else np.array(self.coupling, dtype=float)
        if g.shape != (n - 1,):
            raise ValueError(f"expected {n - 1} couplings, got shape {g.shape}")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("couplings must be finite and non-negative")
        eta.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "anharmonicity", eta)
        object.__setattr__(self, "coupling", g)

    @classmethod
    def uniform(
        cls,
        n_transmons: int = 3,
        n_levels: int = 4,
        eta: float = 0.2,
        g: float = 0.03,
    ) -> "TransmonChain":
        """Identical Duffing transmons with equal couplings."""
        table = np.tile(duffing_anharmonicity(eta, n_levels), (n_transmons, 1))
        return cls(table, np.full(n_transmons - 1, g))

    @property
    def n_transmons(self) -> int:
        return self.anharmonicity.shape[0]

    @property
    def n_levels(self) -> int:
        return self.anharmonicity.shape[1]

    @property
    def dim(self) -> int:
        return self.n_levels**self.n_transmons

    @cached_property
    def level_digits(self) -> np.ndarray:
        """``(dim, n_transmons)`` table of the level of each transmon per basis index."""
        idx = np.arange(self.dim)
        powers = self.n_levels ** np.arange(self.n_transmons - 1, -1, -1)
        return (idx[:, None] // powers[None, :]) % self.n_levels

    @cached_property
    def number_diagonals(self) -> np.ndarray:
        """Diagonals of the number operators ``N_k``, shape ``(n_transmons, dim)``."""
        return self.level_digits.T.astype(float)

    @cached_property
    def drift(self) -> np.ndarray:
        """Detuning-independent part: ``-eta`` on the diagonal plus XY coupling."""
        n, d = self.n_transmons, self.n_levels
        levels = self.level_digits
        h = np.diag(-self.anharmonicity[np.arange(n)[None, :], levels].sum(axis=1)).astype(complex)
        x, y = coupling_x(d), coupling_y(d)
        for k, g in enumerate(self.coupling):
            if g:
                h += 0.5 * g * (embed(x, k, n) @ embed(x, k + 1, n) + embed(y, k, n) @ embed(y, k + 1, n))
        h.setflags(write=False)
        return h


def build_hamiltonian(chain: TransmonChain, detuning) -> np.ndarray:
    """Full ``dim x dim`` Hamiltonian (GHz) for one detuning snapshot.

    Parameters
    ----------
    chain : TransmonChain
    detuning : array_like, shape (n_transmons,)
        Instantaneous detunings ``Delta_k`` in GHz.
    """
    delta = np.asarray(detuning, dtype=float)
    if delta.shape != (chain.n_transmons,):
        raise ValueError(f"detuning must have shape ({chain.n_transmons},), got {delta.shape}")
    if not np.all(np.isfinite(delta)):
        raise ValueError("detuning values must be finite")
    h = chain.drift.copy()
    h[np.diag_indices(chain.dim)] += delta @ chain.number_diagonals
    return h


def excitation_number(chain: TransmonChain) -> np.ndarray:
    """Total excitation ``sum_k j_k`` of every basis index."""
    return chain.level_digits.sum(axis=1)
