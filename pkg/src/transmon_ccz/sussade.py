"""Subspace-selective self-adaptive differential evolution (SuSSADE).

The optimiser maximises a black-box objective over a box.  Each generation
draws, in this order, from a single ``numpy.random.Generator``:

1. one uniform ``r``; if ``r < switch_s`` a subspace dimension ``m`` from
   ``subspace_dims`` followed by ``m`` distinct coordinates (sorted),
   otherwise breeding uses every coordinate;
2. for every individual ``i`` in index order: four uniforms ``r1..r4`` for
   the parameter adaptation, three distinct partner indices (all different
   from ``i``), any draws needed by the bound handler, the forced crossover
   coordinate, and one uniform per active coordinate.

All trials of a generation are built from the same parent population and then
evaluated together, so evaluating them in parallel never changes a run.
With ``switch_s = 0`` and ``kappa1 = kappa2 = 0`` the algorithm is plain
DE/rand/1/bin.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

INITIAL_MU = 0.5
INITIAL_XI = 0.9


class ConfigError(ValueError):
    pass


@dataclass
class Chromosome:
    x: np.ndarray
    mu: float = INITIAL_MU
    xi: float = INITIAL_XI
    fitness: float = -np.inf


@dataclass
class OptimizerConfig:
    """Settings of one optimisation run.

    ``lower``/``upper`` define the search box; scalars are broadcast over
    ``dimension`` coordinates.
    """

    dimension: int
    lower: float | np.ndarray = -1.0
    upper: float | np.ndarray = 1.0
    population: int = 32
    switch_s: float = 0.14
    subspace_dims: tuple[int, ...] = (1,)
    kappa1: float = 0.1
    kappa2: float = 0.1
    mu_l: float = 0.1
    mu_u: float = 0.9
    seed: int = 20150401
    target_fitness: Optional[float] = None
    max_generations: Optional[int] = None
    max_evaluations: Optional[int] = None
    bound_handling: str = "reflect"

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,)).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,)).copy()
        return lo, hi

    def validate(self) -> None:
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dimension}")
        if self.population < 4:
            raise ConfigError(f"population must be >= 4 (mutation needs 4 distinct members), got {self.population}")
        if not 0.0 <= self.switch_s <= 1.0:
            raise ConfigError(f"switch_s must lie in [0, 1], got {self.switch_s}")
        dims = tuple(self.subspace_dims)
        if not dims or any(int(m) != m or not 1 <= m <= self.dimension for m in dims):
            raise ConfigError(f"subspace_dims must be a non-empty subset of 1..{self.dimension}, got {dims}")
        for name in ("kappa1", "kappa2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be a probability, got {getattr(self, name)}")
        if self.mu_l < 0 or self.mu_u < 0:
            raise ConfigError("mu_l and mu_u must be non-negative")
        lo, hi = self.box()
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)) or np.any(lo >= hi):
            raise ConfigError("bounds must be finite with lower < upper")
        if self.bound_handling not in ("reflect", "clip", "resample"):
            raise ConfigError(f"unknown bound handling {self.bound_handling!r}")
        if self.max_generations is None and self.max_evaluations is None and self.target_fitness is None:
            raise ConfigError("at least one stopping criterion is required")
        if self.max_generations is not None and self.max_generations < 0:
            raise ConfigError("max_generations must be >= 0")
        if self.max_evaluations is not None and self.max_evaluations < self.population:
            raise ConfigError("max_evaluations must cover the initial population")


def reflect(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold coordinates back into ``[lo, hi]``; ``hi + d`` maps to ``hi - d``."""
    width = hi - lo
    y = np.mod(x - lo, 2 * width)
    return lo + np.where(y > width, 2 * width - y, y)


def apply_bounds(x, lo, hi, mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == "reflect":
        return reflect(x, lo, hi)
    if mode == "clip":
        return np.clip(x, lo, hi)
    out = (x < lo) | (x > hi)
    if out.any():
        x = x.copy()
        x[out] = lo[out] + rng.random(int(out.sum())) * (hi[out] - lo[out])
    return x


def _partners(i: int, population: int, rng: np.random.Generator) -> np.ndarray:
    picks = rng.choice(population - 1, size=3, replace=False)
    return picks + (picks >= i)


def mutate(
    pop: np.ndarray,
    i: int,
    mu: float,
    rng: np.random.Generator,
    bounds: Optional[tuple[np.ndarray, np.ndarray]] = None,
    bound_handling: str = "reflect",
) -> np.ndarray:
    """Donor ``C[i1] + mu * (C[i2] - C[i3])`` with partners distinct from ``i``."""
    if len(pop) < 4:
        raise ConfigError("mutation needs a population of at least 4")
    i1, i2, i3 = _partners(i, len(pop), rng)
    donor = pop[i1] + mu * (pop[i2] - pop[i3])
    if bounds is not None:
        donor = apply_bounds(donor, bounds[0], bounds[1], bound_handling, rng)
    return donor


def crossover(parent: np.ndarray, donor: np.ndarray, xi: float, active, rng: np.random.Generator) -> np.ndarray:
    """Binomial crossover restricted to the ``active`` coordinates.

    One active coordinate, chosen uniformly, always comes from the donor.
    """
    active = np.asarray(active, dtype=int)
    if active.size == 0:
        raise ValueError("crossover needs at least one active coordinate")
    j_rand = active[rng.integers(active.size)]
    take = active[rng.random(active.size) < xi]
    trial = np.array(parent, dtype=float, copy=True)
    trial[take] = donor[take]
    trial[j_rand] = donor[j_rand]
    return trial


def select(parent: Chromosome, trial: np.ndarray, f_trial: float, mu: float, xi: float) -> Chromosome:
    """Keep the fitter of parent and trial; ties go to the trial."""
    if f_trial >= parent.fitness:
        return Chromosome(np.asarray(trial), mu, xi, float(f_trial))
    return parent


def self_adapt(chrom: Chromosome, cfg: OptimizerConfig, rng: np.random.Generator) -> tuple[float, float]:
    r1, r2, r3, r4 = rng.random(4)
    mu = cfg.mu_l + r1 * cfg.mu_u if r2 < cfg.kappa1 else chrom.mu
    xi = r3 if r4 < cfg.kappa2 else chrom.xi
    return float(mu), float(xi)


def choose_subspace(dimension: int, cfg: OptimizerConfig, rng: np.random.Generator) -> np.ndarray:
    """Breeding coordinates for one generation."""
    if rng.random() < cfg.switch_s:
        m = int(rng.choice(np.asarray(cfg.subspace_dims)))
        return np.sort(rng.choice(dimension, size=m, replace=False))
    return np.arange(dimension)


@dataclass
class TraceRow:
    generation: int
    evaluations: int
    best_fitness: float
    mean_fitness: float


@dataclass
class OptimizeResult:
    best: Chromosome
    trace: list[TraceRow]
    population: list[Chromosome]
    evaluations: int
    generations: int
    wall_time: float
    subspace_generations: int = 0
    stop_reason: str = ""
    config: Optional[OptimizerConfig] = field(default=None, repr=False)


class _Evaluator:
    def __init__(self, objective, batch, workers):
        self.objective = objective
        self.batch = batch
        self.pool = ThreadPoolExecutor(workers) if workers and workers > 1 else None

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(xs), dtype=float)
        if self.pool is not None:
            return np.fromiter(self.pool.map(self.objective, xs), dtype=float, count=len(xs))
        return np.array([self.objective(x) for x in xs], dtype=float)

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def optimize(
    objective: Callable[[np.ndarray], float],
    cfg: OptimizerConfig,
    batch_objective: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    workers: int = 1,
    callback: Optional[Callable[[TraceRow], None]] = None,
) -> OptimizeResult:
    """Maximise ``objective`` over the box of ``cfg``.

    Parameters
    ----------
    objective : callable
        Maps a 1-d genome to a float.  Must be pure; with ``workers > 1`` it is
        called from several threads.
    cfg : OptimizerConfig
    batch_objective : callable, optional
        Maps a ``(P, dimension)`` array to ``P`` fitness values.  Used instead
        of ``objective`` when given.
    workers : int
        Thread count for per-genome evaluation.
    callback : callable, optional
        Called with each new trace row.
    """
    cfg.validate()
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.box()
    dim, size = cfg.dimension, cfg.population
    evaluate = _Evaluator(objective, batch_objective, workers)

    xs = lo + rng.random((size, dim)) * (hi - lo)
    pop = [Chromosome(x, INITIAL_MU, INITIAL_XI, f) for x, f in zip(xs, evaluate(xs))]
    evaluations, generation, subspace_gens = size, 0, 0
    trace: list[TraceRow] = []

    def record():
        fits = np.array([c.fitness for c in pop])
        row = TraceRow(generation, evaluations, float(fits.max()), float(fits.mean()))
        trace.append(row)
        if callback is not None:
            callback(row)
        return row

    row = record()
    reason = ""
    try:
        while True:
            if cfg.target_fitness is not None and row.best_fitness >= cfg.target_fitness:
                reason = "target"
                break
            if cfg.max_generations is not None and generation >= cfg.max_generations:
                reason = "max_generations"
                break
            if cfg.max_evaluations is not None and evaluations + size > cfg.max_evaluations:
                reason = "max_evaluations"
                break
            active = choose_subspace(dim, cfg, rng)
            subspace_gens += active.size < dim
            parents = np.array([c.x for c in pop])
            trials, params = np.empty_like(parents), []
            for i, chrom in enumerate(pop):
                mu, xi = self_adapt(chrom, cfg, rng)
                donor = mutate(parents, i, mu, rng, (lo, hi), cfg.bound_handling)
                trials[i] = crossover(parents[i], donor, xi, active, rng)
                params.append((mu, xi))
            fits = evaluate(trials)
            pop = [select(c, t, f, mu, xi) for c, t, f, (mu, xi) in zip(pop, trials, fits, params)]
            evaluations += size
            generation += 1
            row = record()
    finally:
        evaluate.close()

    best = max(pop, key=lambda c: c.fitness)
    return OptimizeResult(
        best=best,
        trace=trace,
        population=pop,
        evaluations=evaluations,
        generations=generation,
        wall_time=time.perf_counter() - start,
        subspace_generations=subspace_gens,
        stop_reason=reason,
        config=cfg,
    )
