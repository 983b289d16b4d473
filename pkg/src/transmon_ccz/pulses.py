"""Detuning control tables and their realisation as time functions."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erf

DEFAULT_SIGMA_NS = 0.25


class PulseShape(str, enum.Enum):
    PIECEWISE_CONSTANT = "piecewise_constant"
    ERF = "erf"


@dataclass(frozen=True)
class ControlTable:
    """Control points ``points[k, l]`` (GHz) for each transmon ``k``.

    Segment ``l`` covers ``[l*dt, (l+1)*dt)`` in ns.  With the erf shape the
    steps between neighbouring points are smoothed by a Gaussian of width
    ``sigma`` centred on the segment boundaries.
    """

    points: np.ndarray
    dt: float = 1.0
    shape: PulseShape = PulseShape.PIECEWISE_CONSTANT
    sigma: float = DEFAULT_SIGMA_NS
    bounds: tuple[float, float] = (-2.5, 2.5)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError("points must be a 2-d table (transmon, control index)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("control points must be finite")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        shape = PulseShape(self.shape)
        if shape is PulseShape.ERF and not self.sigma > 0:
            raise ValueError(f"erf smoothing width must be positive, got {self.sigma}")
        lo, hi = (float(b) for b in self.bounds)
        if not lo < hi:
            raise ValueError(f"invalid bounds {self.bounds}")
        if pts.min() < lo or pts.max() > hi:
            raise ValueError(f"control points outside bounds [{lo}, {hi}]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "bounds", (lo, hi))

    @property
    def n_transmons(self) -> int:
        return self.points.shape[0]

    @property
    def n_steps(self) -> int:
        return self.points.shape[1]

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    def sample(self, t: float) -> np.ndarray:
        """Detuning of every transmon at time ``t`` (ns), shape ``(n_transmons,)``."""
        if not 0.0 <= t <= self.duration:
            raise ValueError(f"t={t} outside [0, {self.duration}]")
        return sample_points(self.points[None], np.array([t]), self.dt, self.shape, self.sigma)[0, :, 0]

    def to_genome(self) -> np.ndarray:
        return self.points.reshape(-1).copy()

    @classmethod
    def from_genome(
        cls,
        x,
        dt: float = 1.0,
        shape: PulseShape = PulseShape.PIECEWISE_CONSTANT,
        sigma: float = DEFAULT_SIGMA_NS,
        bounds: tuple[float, float] = (-2.5, 2.5),
        n_transmons: int = 3,
    ) -> "ControlTable":
        """Fill rows transmon-major: ``x[0:N]`` is transmon 0, and so on."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size == 0 or x.size % n_transmons:
            raise ValueError(f"genome length {x.size} is not a positive multiple of {n_transmons}")
        return cls(x.reshape(n_transmons, -1), dt, shape, sigma, bounds)

    def to_dict(self) -> dict:
        doc = {"dt_ns": self.dt, "shape": self.shape.value}
        if self.shape is PulseShape.ERF:
            doc["sigma_ns"] = self.sigma
        doc["bounds_ghz"] = list(self.bounds)
        doc["points_ghz"] = self.points.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ControlTable":
        known = {"dt_ns", "shape", "sigma_ns", "bounds_ghz", "points_ghz"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown pulse keys: {sorted(unknown)}")
        missing = {"dt_ns", "shape", "bounds_ghz", "points_ghz"} - set(doc)
        if missing:
            raise ValueError(f"missing pulse keys: {sorted(missing)}")
        return cls(
            np.array(doc["points_ghz"], dtype=float),
            dt=doc["dt_ns"],
            shape=PulseShape(doc["shape"]),
            sigma=doc.get("sigma_ns", DEFAULT_SIGMA_NS),
            bounds=tuple(doc["bounds_ghz"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "ControlTable":
        return cls.from_dict(json.loads(Path(path).read_text()))


def sample_points(points: np.ndarray, times: np.ndarray, dt: float, shape, sigma: float) -> np.ndarray:
    """Vectorised sampling of control tables.

    ``points`` has shape ``(batch, n_transmons, N)``; returns
    ``(batch, n_transmons, len(times))``.  Times are assumed inside ``[0, N*dt]``.
    """
    points = np.asarray(points, dtype=float)
    times = np.asarray(times, dtype=float)
    n = points.shape[-1]
    if PulseShape(shape) is PulseShape.PIECEWISE_CONSTANT:
        seg = np.minimum((times // dt).astype(int), n - 1)
        return points[..., seg]
    if n == 1:
        return np.repeat(points, times.size, axis=-1)
    knots = dt * np.arange(1, n)
    steps = 0.5 * (1.0 + erf((times[:, None] - knots[None, :]) / (np.sqrt(2.0) * sigma)))
    jumps = np.diff(points, axis=-1)
    return points[..., :1] + jumps @ steps.T
