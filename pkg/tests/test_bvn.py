import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coflow_sched.bvn import augment, decompose, schedule_aggregated
from coflow_sched.instance import peak_load


def random_matrix(seed, max_n=6, max_entry=9, min_density=0.3):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    density = float(rng.uniform(min_density, 1.0))
    m = np.where(rng.random((n, n)) < density,
                 rng.integers(1, max_entry + 1, (n, n)), 0)
    return m if m.any() else np.eye(n, dtype=np.int64)


class TestAugment:
    def test_fills_deficits(self):
        out = augment(np.array([[2, 1], [0, 3]]))
        assert out.tolist() == [[3, 1], [1, 3]]

    def test_balanced_input_unchanged(self):
        eye = np.eye(2, dtype=np.int64)
        assert np.array_equal(augment(eye), eye)

    def test_single_deficit_cell(self):
        out = augment(np.array([[0, 2], [0, 0]]))
        assert out.tolist() == [[0, 2], [2, 0]]

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            augment(np.zeros((2, 2), dtype=int))

    @given(st.integers(0, 2**31))
    @settings(max_examples=60, deadline=None)
    def test_postconditions(self, seed):
        d = random_matrix(seed)
        out = augment(d)
        rho = peak_load(d)
        assert np.all(out >= d)
        assert np.all(out.sum(axis=0) == rho)
        assert np.all(out.sum(axis=1) == rho)

    @given(st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_idempotent(self, seed):
        d = random_matrix(seed)
        once = augment(d)
        assert np.array_equal(augment(once), once)


class TestDecompose:
    def test_two_step_example(self):
        steps = decompose(np.array([[3, 1], [1, 3]])).steps
        assert steps == (
            (3, frozenset({(0, 0), (1, 1)})),
            (1, frozenset({(0, 1), (1, 0)})),
        )

    def test_identity(self):
        steps = decompose(np.eye(2, dtype=int)).steps
        assert steps == ((1, frozenset({(0, 0), (1, 1)})),)

    def test_single_permutation(self):
        steps = decompose(np.diag([2, 2])).steps
        assert steps == ((2, frozenset({(0, 0), (1, 1)})),)

    def test_unbalanced_rejected(self):
        with pytest.raises(ValueError):
            decompose(np.array([[2, 1], [0, 3]]))

    @given(st.integers(0, 2**31))
    @settings(max_examples=60, deadline=None)
    def test_reconstruction_and_step_bound(self, seed):
        d = augment(random_matrix(seed))
        n = d.shape[0]
        result = decompose(d)
        assert sum(q for q, _ in result.steps) == result.rho == peak_load(d)
        assert np.array_equal(result.reconstruct(n), d)
        assert result.num_steps <= n * n - 2 * n + 2

    def test_json_dump_shape(self):
        dump = decompose(np.eye(2, dtype=int)).to_dict()
        assert dump["rho"] == 1
        assert dump["steps"][0]["q"] == 1


def queue_per_cell(matrix, split=False):
    """One synthetic flow per cell, or two when split is set."""
    queues = {}
    n = matrix.shape[0]
    for i in range(n):
        for j in range(n):
            d = int(matrix[i, j])
            if d == 0:
                continue
            if split and d >= 2:
                queues[(i, j)] = [((i, j, "a"), d - 1), ((i, j, "b"), 1)]
            else:
                queues[(i, j)] = [((i, j, "a"), d)]
    return queues


class TestScheduleAggregated:
    def test_identity_single_slot(self):
        d = np.eye(2, dtype=int)
        slots, completions = schedule_aggregated(d, queue_per_cell(d))
        assert len(slots) == 1
        assert {(i, j) for i, j, _ in slots[0]} == {(0, 0), (1, 1)}
        assert set(completions.values()) == {1}

    def test_slot_count_is_peak_load(self):
        d = np.array([[2, 1], [1, 2]])
        slots, _ = schedule_aggregated(d, queue_per_cell(d))
        assert len(slots) == 3

    def test_queue_order_within_cell(self):
        d = np.array([[2]])
        queues = {(0, 0): [("first", 1), ("second", 1)]}
        slots, completions = schedule_aggregated(d, queues)
        assert completions == {"first": 1, "second": 2}

    def test_queue_partition_enforced(self):
        d = np.array([[2]])
        with pytest.raises(ValueError):
            schedule_aggregated(d, {(0, 0): [("only", 1)]})

    @given(st.integers(0, 2**31))
    @settings(max_examples=60, deadline=None)
    def test_exactness_and_port_capacity(self, seed):
        d = random_matrix(seed)
        slots, completions = schedule_aggregated(d, queue_per_cell(d, split=True))
        assert len(slots) == peak_load(d)
        delivered = np.zeros_like(d)
        for slot in slots:
            ins = [i for i, _, _ in slot]
            outs = [j for _, j, _ in slot]
            assert len(ins) == len(set(ins))
            assert len(outs) == len(set(outs))
            for i, j, _ in slot:
                delivered[i, j] += 1
        assert np.array_equal(delivered, d)
        # Queue order: flow "a" finishes before "b" wherever a cell was split.
        for (i, j), _ in queue_per_cell(d, split=True).items():
            if d[i, j] >= 2:
                assert completions[(i, j, "a")] < completions[(i, j, "b")]
