"""Analytic test problems for validating the optimiser.

The functions are minimisation problems with known optimum 0; the optimiser
maximises, so callers negate them (see :attr:`Benchmark.fitness`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def sphere(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sum(x**2, axis=-1)


def rosenbrock(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sum(100.0 * (x[..., 1:] - x[..., :-1] ** 2) ** 2 + (1.0 - x[..., :-1]) ** 2, axis=-1)


def rastrigin(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 10.0 * x.shape[-1] + np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x), axis=-1)


@dataclass(frozen=True)
class Benchmark:
    name: str
    function: Callable
    lower: float
    upper: float

    def optimum(self, dimension: int) -> np.ndarray:
        return np.ones(dimension) if self.name == "rosenbrock" else np.zeros(dimension)

    def fitness(self, x) -> float:
        return -float(self.function(x))

    def batch_fitness(self, xs) -> np.ndarray:
        return -self.function(xs)


def benchmark_suite() -> dict[str, Benchmark]:
    return {
        "sphere": Benchmark("sphere", sphere, -5.12, 5.12),
        "rosenbrock": Benchmark("rosenbrock", rosenbrock, -2.048, 2.048),
        "rastrigin": Benchmark("rastrigin", rastrigin, -5.12, 5.12),
    }
