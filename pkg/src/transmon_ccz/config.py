"""JSON run configuration.

A run file is one JSON object::

    {
      "label": "default",
      "chain": {"n_transmons": 3, "n_levels": 4,
                "anharmonicity_ghz": 0.2, "coupling_ghz": 0.03},
      "pulse": {"n_steps": 26, "dt_ns": 1.0, "shape": "piecewise_constant",
                "sigma_ns": 0.25, "n_sub": 64, "bounds_ghz": [-1.0, 1.0]},
      "optimizer": {"population": 32, "switch_s": 0.14, "subspace_dims": [1],
                    "kappa1": 0.1, "kappa2": 0.1, "mu_l": 0.1, "mu_u": 0.9,
                    "seed": 20150401, "target_fitness": 0.999,
                    "max_generations": null, "max_evaluations": 200000,
                    "bound_handling": "reflect", "workers": 1},
      "fidelity": {"refine_phases": false},
      "decoherence": {"t1_us": 25.0, "t2_us": 25.0},
      "output_dir": "runs"
    }

Every section except ``label`` may be omitted to take its defaults.
``anharmonicity_ghz`` is either a single Duffing constant (level shifts
``eta*j*(j-1)/2``) or a full ``[transmon][level]`` table; ``coupling_ghz`` is
a single value for every neighbour pair or one value per pair.  Unknown keys
are rejected.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .hamiltonian import TransmonChain, duffing_anharmonicity
from .pulses import ControlTable, PulseShape
from .sussade import ConfigError, OptimizerConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChainConfig(_Strict):
    n_transmons: int = Field(3, ge=2)
    n_levels: int = Field(4, ge=2)
    anharmonicity_ghz: Union[float, list[list[float]]] = 0.2
    coupling_ghz: Union[float, list[float]] = 0.03

    @model_validator(mode="after")
    def _check(self):
        self.build()
        return self

    def build(self) -> TransmonChain:
        if isinstance(self.anharmonicity_ghz, list):
            eta = np.array(self.anharmonicity_ghz, dtype=float)
            if eta.shape != (self.n_transmons, self.n_levels):
                raise ValueError(f"anharmonicity table must be {self.n_transmons}x{self.n_levels}")
        else:
            eta = np.tile(duffing_anharmonicity(self.anharmonicity_ghz, self.n_levels), (self.n_transmons, 1))
        if isinstance(self.coupling_ghz, list):
            g = np.array(self.coupling_ghz, dtype=float)
        else:
            g = np.full(self.n_transmons - 1, float(self.coupling_ghz))
        return TransmonChain(eta, g)


class PulseConfig(_Strict):
    n_steps: int = Field(26, ge=1)
    dt_ns: float = Field(1.0, gt=0)
    shape: PulseShape = PulseShape.PIECEWISE_CONSTANT
    sigma_ns: float = Field(0.25, gt=0)
    n_sub: int = Field(64, ge=1)
    bounds_ghz: tuple[float, float] = (-1.0, 1.0)

    @field_validator("bounds_ghz")
    @classmethod
    def _ordered(cls, v):
        if not v[0] < v[1]:
            raise ValueError("bounds_ghz must be [low, high] with low < high")
        return v

    def table(self, points) -> ControlTable:
        return ControlTable(points, self.dt_ns, self.shape, self.sigma_ns, self.bounds_ghz)


class OptimizerSettings(_Strict):
    population: int = 32
    switch_s: float = Field(0.14, ge=0, le=1)
    subspace_dims: list[int] = [1]
    kappa1: float = Field(0.1, ge=0, le=1)
    kappa2: float = Field(0.1, ge=0, le=1)
    mu_l: float = Field(0.1, ge=0)
    mu_u: float = Field(0.9, ge=0)
    seed: int = Field(20150401, ge=0, lt=2**64)
    target_fitness: Optional[float] = 0.999
    max_generations: Optional[int] = Field(None, ge=0)
    max_evaluations: Optional[int] = Field(200_000, ge=1)
    bound_handling: Literal["reflect", "clip", "resample"] = "reflect"
    workers: int = Field(1, ge=1)

    @field_validator("population")
    @classmethod
    def _population(cls, v):
        if v < 4:
            raise ValueError(f"population must be >= 4 (mutation needs 4 distinct members), got {v}")
        return v

    @field_validator("subspace_dims")
    @classmethod
    def _dims(cls, v):
        if not v or any(m < 1 for m in v):
            raise ValueError("subspace_dims must be a non-empty list of positive integers")
        return v


class FidelitySettings(_Strict):
    refine_phases: bool = False


class DecoherenceConfig(_Strict):
    t1_us: float = Field(gt=0)
    t2_us: float = Field(gt=0)


class RunConfig(_Strict):
    label: str = "run"
    chain: ChainConfig = ChainConfig()
    pulse: PulseConfig = PulseConfig()
    optimizer: OptimizerSettings = OptimizerSettings()
    fidelity: FidelitySettings = FidelitySettings()
    decoherence: Optional[DecoherenceConfig] = None
    output_dir: str = "runs"

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.chain.n_transmons and self.pulse.n_steps:
            try:
                self.optimizer_config().validate()
            except ConfigError as exc:
                raise ValueError(str(exc)) from None
        return self

    @property
    def dimension(self) -> int:
        return self.chain.n_transmons * self.pulse.n_steps

    def optimizer_config(self, **overrides) -> OptimizerConfig:
        o = self.optimizer
        kwargs = dict(
            dimension=self.dimension,
            lower=self.pulse.bounds_ghz[0],
            upper=self.pulse.bounds_ghz[1],
            population=o.population,
            switch_s=o.switch_s,
            subspace_dims=tuple(o.subspace_dims),
            kappa1=o.kappa1,
            kappa2=o.kappa2,
            mu_l=o.mu_l,
            mu_u=o.mu_u,
            seed=o.seed,
            target_fitness=o.target_fitness,
            max_generations=o.max_generations,
            max_evaluations=o.max_evaluations,
            bound_handling=o.bound_handling,
        )
        kwargs.update(overrides)
        return OptimizerConfig(**kwargs)

    def semantic_hash(self) -> str:
        """Hash of every field that can change a result (not label, paths or thread count)."""
        doc = self.model_dump(mode="json", exclude={"label": True, "output_dir": True, "optimizer": {"workers"}})
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"


def _line_of(text: str, loc) -> int:
    pos = 0
    for key in loc:
        if isinstance(key, str):
            found = text.find(f'"{key}"', pos)
            if found >= 0:
                pos = found
    return text.count("\n", 0, pos) + 1


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a run configuration, raising :class:`ConfigError` with a line number."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}:1: configuration must be a JSON object")
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = tuple(err["loc"])
        where = ".".join(str(p) for p in loc) or "config"
        msg = err["msg"].removeprefix("Value error, ")
        raise ConfigError(f"{source}:{_line_of(text, loc)}: {where}: {msg}") from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration: {exc.strerror}") from None
    return parse_config(text, str(path))
