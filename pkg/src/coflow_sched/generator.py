"""Seeded random instance generation for benchmarks and tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from coflow_sched.instance import CoflowInstance


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for :func:`generate_instance`.

    ``speed_set`` lists the admissible core speeds: used verbatim when
    its length equals ``num_cores``, otherwise one speed per core is
    drawn from it (with replacement).  Demands are integers drawn
    uniformly from ``[demand_min, demand_max]``; each cell of each
    coflow is populated independently with probability ``density``.
    """

    num_ports: int
    num_cores: int
    num_coflows: int
    density: float
    demand_min: int
    demand_max: int
    speed_set: tuple[float, ...]
    seed: int

    def __post_init__(self):
        if not 0 < self.density <= 1:
            raise ValueError(f"density must be in (0, 1], got {self.density}")
        if self.demand_min < 1:
            raise ValueError(f"demand_min must be >= 1, got {self.demand_min}")
        if self.demand_max < self.demand_min:
            raise ValueError("demand range is empty")
        if not self.speed_set:
            raise ValueError("speed_set must be nonempty")


MAX_RESAMPLE_ATTEMPTS = 100


def generate_instance(params: GeneratorParams) -> CoflowInstance:
    """Draw a random instance; identical output for identical params.

    Resamples (up to a fixed attempt budget) when a draw ends up with no
    positive flow at all, which otherwise would make every downstream
    computation degenerate.
    """
    rng = np.random.default_rng(params.seed)
    if len(params.speed_set) == params.num_cores:
        speeds: Sequence[float] = params.speed_set
    else:
        speeds = tuple(rng.choice(params.speed_set, size=params.num_cores))
    shape = (params.num_coflows, params.num_ports, params.num_ports)
    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        mask = rng.random(shape) < params.density
        values = rng.integers(params.demand_min, params.demand_max + 1, size=shape)
        demands = np.where(mask, values, 0)
        if demands.any():
            return CoflowInstance(params.num_ports, speeds, demands)
    raise ValueError(
        "could not draw a nonempty instance in "
        f"{MAX_RESAMPLE_ATTEMPTS} attempts (density too small?)"
    )
