"""Shared test helpers."""

from __future__ import annotations

import numpy as np
import pytest

from coflow_sched.generator import GeneratorParams, generate_instance
from coflow_sched.instance import CoflowInstance


def make_instance(speeds, coflows, num_ports=None) -> CoflowInstance:
    mats = [np.asarray(m) for m in coflows]
    n = mats[0].shape[0] if num_ports is None else num_ports
    return CoflowInstance(n, speeds, mats)


@pytest.fixture
def two_by_two() -> CoflowInstance:
    """N=2, speeds (1, 2), one coflow [[2, 1], [0, 3]] (3 flows)."""
    return make_instance((1.0, 2.0), [[[2, 1], [0, 3]]])


@pytest.fixture
def single_unit_flow() -> CoflowInstance:
    """One flow of one unit on a single unit-speed core."""
    return make_instance((1.0,), [[[1]]])


def random_instance(seed: int, *, max_ports=4, max_cores=3, max_coflows=3,
                    d_lo=1, d_hi=5, speed_set=(1.0, 2.0),
                    density_range=(0.3, 0.9)) -> CoflowInstance:
    """Small random instance for property-style tests."""
    rng = np.random.default_rng(seed)
    n_ports = int(rng.integers(1, max_ports + 1))
    n_cores = int(rng.integers(1, max_cores + 1))
    n_coflows = int(rng.integers(1, max_coflows + 1))
    density = float(rng.uniform(*density_range))
    params = GeneratorParams(
        num_ports=n_ports,
        num_cores=n_cores,
        num_coflows=n_coflows,
        density=density,
        demand_min=d_lo,
        demand_max=d_hi,
        speed_set=speed_set,
        seed=int(rng.integers(0, 2**31)),
    )
    return generate_instance(params)
