import numpy as np
import pytest

from coflow_sched.errors import ModelSizeError, SolverError
from coflow_sched.instance import FlowId
from coflow_sched.lp import (
    LpSolution,
    build_interval_indexed,
    build_time_indexed,
    check_solution,
    flow_completion_bound,
    max_residual,
    solve_lp,
)
from conftest import make_instance, random_instance


class TestTimeBuilder:
    def test_minimal_model_shape(self, single_unit_flow):
        model = build_time_indexed(single_unit_flow)
        # T = 1, so 2 y-columns plus the makespan column.
        assert model.num_cols == 3
        assert len(model.eq_rows) == 1
        assert len(model.ub_rows) == 6  # 2 input-cap + 2 output-cap + 1 + 1
        assert model.num_rows == 7

    def test_column_count_formula(self):
        inst = make_instance((1.0, 1.0), [[[1, 1], [0, 0]]])
        model = build_time_indexed(inst)
        # 2 flows x 2 cores x (T+1 = 3) indices.
        assert model.num_y_cols == 12

    def test_empty_instance_rejected(self):
        with pytest.raises(ValueError):
            build_time_indexed(make_instance((1.0,), [[[0]]]))

    def test_size_guard(self, two_by_two):
        with pytest.raises(ModelSizeError):
            build_time_indexed(two_by_two, column_cap=10)

    def test_row_counts_match_dimensions(self, two_by_two):
        model = build_time_indexed(two_by_two)
        flows, n, m, k = 3, 2, 2, 7
        labels = [row.label[0] for row in model.ub_rows]
        assert labels.count("b") == n * m * k
        assert labels.count("c") == n * m * k
        assert labels.count("d") == flows
        assert labels.count("e") == flows
        assert len(model.eq_rows) == flows

    def test_lp_text_listing(self, single_unit_flow):
        text = build_time_indexed(single_unit_flow).to_lp_text()
        assert text.startswith("min")
        assert "<=" in text


class TestIntervalBuilder:
    def test_interval_count(self, two_by_two):
        model = build_interval_indexed(two_by_two, eta=1.0)
        # T = 6 gives L = 3, so m * 4 columns per flow.
        assert model.num_indices == 4
        assert model.num_y_cols == 3 * 2 * 4

    def test_huge_eta_single_growth_step(self, two_by_two):
        model = build_interval_indexed(two_by_two, eta=1e6)
        assert model.num_indices == 2

    def test_interval_zero_offset_convention(self, single_unit_flow):
        model = build_interval_indexed(single_unit_flow, eta=1.0)
        assert model.completion_offset(0) == 0.5
        assert model.completion_offset(1) == 1.0


class TestSolve:
    def test_single_flow_unit(self, single_unit_flow):
        solution = solve_lp(build_time_indexed(single_unit_flow))
        assert solution.c_max == pytest.approx(1.0, abs=1e-7)

    def test_single_flow_two_speeds(self):
        inst = make_instance((1.0, 2.0), [[[2]]])
        solution = solve_lp(build_time_indexed(inst))
        assert solution.c_max == pytest.approx(1.0, abs=1e-7)

    def test_simplex_backend_agrees_with_highs(self):
        for seed in range(8):
            inst = random_instance(seed, max_ports=2, max_cores=2, max_coflows=2, d_hi=3)
            model = build_time_indexed(inst)
            if model.num_cols > 160:
                continue
            a = solve_lp(model, method="highs")
            b = solve_lp(model, method="simplex")
            assert a.c_max == pytest.approx(b.c_max, abs=1e-6)

    def test_residuals_small(self):
        for seed in (1, 2, 3):
            inst = random_instance(seed)
            model = build_time_indexed(inst)
            solution = solve_lp(model)
            assert max_residual(model, solution) <= 1e-6
            assert check_solution(model, solution) == []

    def test_duality_gap_small(self):
        for seed in (4, 5):
            inst = random_instance(seed)
            solution = solve_lp(build_time_indexed(inst))
            assert solution.duality_gap <= 1e-6 * max(1.0, solution.c_max)

    def test_interval_solve_and_residuals(self, two_by_two):
        model = build_interval_indexed(two_by_two, eta=0.5)
        solution = solve_lp(model)
        assert solution.mode == "interval"
        assert check_solution(model, solution) == []

    def test_unknown_method(self, single_unit_flow):
        with pytest.raises(ValueError):
            solve_lp(build_time_indexed(single_unit_flow), method="nope")

    def test_solution_json_dump(self, single_unit_flow):
        solution = solve_lp(build_time_indexed(single_unit_flow))
        dump = solution.to_json_dict()
        assert dump["c_max"] == pytest.approx(1.0)
        assert all("," in key for key in dump if key != "c_max")


class TestCompletionBound:
    def test_concentrated_mass(self, single_unit_flow):
        flow = FlowId(0, 0, 0)
        solution = LpSolution(mode="time", y={(flow, 0, 0): 1.0}, c_max=1.0)
        assert flow_completion_bound(solution, flow, single_unit_flow) == pytest.approx(1.0)

    def test_split_mass(self):
        inst = make_instance((1.0,), [[[2]]])
        flow = FlowId(0, 0, 0)
        solution = LpSolution(
            mode="time", y={(flow, 0, 0): 1.0, (flow, 0, 1): 1.0}, c_max=2.0
        )
        # (1/2)(1/2) + (1/2)(3/2) + (1/2)(1 + 1) = 2.
        assert flow_completion_bound(solution, flow, inst) == pytest.approx(2.0)

    def test_interval_zero_convention(self, single_unit_flow):
        from coflow_sched.instance import build_interval_grid

        flow = FlowId(0, 0, 0)
        grid = build_interval_grid(1.0, 1)
        solution = LpSolution(mode="interval", y={(flow, 0, 0): 1.0},
                              c_max=1.0, grid=grid)
        assert flow_completion_bound(solution, flow, single_unit_flow) == pytest.approx(1.0)

    def test_unknown_flow(self, single_unit_flow):
        solution = LpSolution(mode="time", y={}, c_max=1.0)
        with pytest.raises(ValueError):
            flow_completion_bound(solution, FlowId(0, 0, 0), single_unit_flow)


class TestRelaxationQuality:
    def test_makespan_variable_dominates_completion_bounds(self):
        for seed in (7, 8, 9):
            inst = random_instance(seed, max_ports=3, max_coflows=2)
            model = build_time_indexed(inst)
            solution = solve_lp(model)
            for flow in inst.flows():
                bound = flow_completion_bound(solution, flow, inst)
                assert bound <= solution.c_max + 1e-6
