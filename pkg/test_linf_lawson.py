from __future__ import annotations

import numpy as np
import pytest

from l2_irka.engine import l2_best
from linf_lawson.aaa import CircleGrid, aaa
from linf_lawson.engine import (
    STOP_EXACT,
    LawsonConfig,
    LawsonSolver,
    chebyshev_centre,
    lawson_refine,
    linf_best,
)
from rational.poles import PoleList
from shared.errors import InputError


def tight(n: int, cap: int = 2000) -> LawsonConfig:
    return LawsonConfig(degree=n, max_lawson_iterations=cap, stagnation_tol=0.0)


class TestAaa:
    def test_reproduces_low_degree_rational(self):
        grid = CircleGrid.sample(lambda z: 1.0 / (z - 2.0), 200)
        fit = aaa(grid, 3)
        assert fit.exact
        assert fit.degree == 1
        assert fit.max_errors[-1] < 1e-13
        assert fit.rational.poles().finite[0] == pytest.approx(2.0, abs=1e-10)

    def test_support_points_interpolated(self, functions):
        grid = CircleGrid.sample(functions["exp4"], 200)
        fit = aaa(grid, 4)
        idx = fit.support_indices
        assert len(set(idx)) == len(idx) == 5
        np.testing.assert_array_equal(fit.rational(grid.points[idx]), grid.values[idx])

    def test_greedy_errors_decrease_overall(self, functions):
        fit = aaa(CircleGrid.sample(functions["exp4"], 200), 6)
        assert fit.max_errors[-1] < fit.max_errors[0] * 1e-3

    def test_grid_validation(self):
        with pytest.raises(InputError):
            CircleGrid(np.ones(3), np.ones(4))
        with pytest.raises(InputError):
            CircleGrid(np.ones(2), np.array([1.0, np.inf]))
        with pytest.raises(InputError):
            aaa(CircleGrid(np.ones(3), np.ones(3)), 2)


class TestLawson:
    def test_config_rejects_small_grid(self):
        with pytest.raises(InputError):
            LawsonConfig(degree=5, samples=11)

    def test_from_profile_overrides(self):
        profile = {"lawson": {"max_iterations": 7}, "grid": {"samples": 64}}
        cfg = LawsonConfig.from_profile(profile, 2, stagnation_tol=None, weight_floor=1e-20)
        assert (cfg.max_lawson_iterations, cfg.samples, cfg.weight_floor) == (7, 64, 1e-20)
        assert cfg.stagnation_tol == 1e-3

    def test_weights_stay_normalized_and_errors_monotone(self, functions):
        grid = CircleGrid.sample(functions["exp4"], 200)
        res = lawson_refine(grid, aaa(grid, 2), LawsonConfig(degree=2, max_lawson_iterations=40))
        assert res.weights.min() >= 0
        assert res.weights.sum() == pytest.approx(1.0, rel=1e-12)
        assert all(b <= a for a, b in zip(res.max_errors, res.max_errors[1:]))
        assert res.max_errors[-1] < res.max_errors[0]
        assert res.converged

    def test_exact_input_skips_iteration(self):
        grid = CircleGrid.sample(lambda z: 3.0 / (z + 4.0), 100)
        res = lawson_refine(grid, aaa(grid, 1), LawsonConfig(degree=1))
        assert res.stop_reason == STOP_EXACT
        assert res.iterations == 0

    def test_foreign_support_rejected(self, functions):
        grid = CircleGrid.sample(functions["exp4"], 50)
        other = aaa(CircleGrid.sample(functions["exp4"], 51), 1).rational
        with pytest.raises(InputError):
            lawson_refine(grid, other, LawsonConfig(degree=1, samples=50), support_idx=[0, 1])

    def test_sqrt11_degree1_pole(self, functions):
        result = linf_best(functions["sqrt11"], 1, tight(1))
        assert len(result.poles.finite) == 1
        assert result.poles.finite[0] == pytest.approx(3.146, abs=5e-3)
        assert result.stats.winding == 3
        assert result.bounds is not None and result.bounds.precondition_ok
        assert result.bounds.lower <= result.bounds.upper <= result.stats.sup

    @pytest.mark.slow
    def test_exp4_degree3_near_circular(self, functions):
        result = linf_best(functions["exp4"], 3, tight(3))
        assert result.stats.winding == 7
        assert 1.5e-3 <= result.stats.circularity <= 6e-3
        l2 = l2_best(functions["exp4"], 3)
        assert l2.stats.winding == 7
        assert result.stats.circularity < l2.stats.circularity

    def test_support_rows_take_part_in_the_fit(self, functions):
        # an interpolating iterate cannot have a near-circular error curve
        grid = CircleGrid.sample(functions["sqrt11"], 200)
        fit = aaa(grid, 1)
        res = lawson_refine(grid, fit, tight(1, cap=300))
        idx = fit.support_indices
        err = np.abs(grid.values - res.rational(grid.points))
        assert np.min(err[idx]) > 0.5 * np.max(err)
        assert res.weights.shape == (200,)

    def test_iterates_with_poles_in_the_disk_are_not_reported(self, functions):
        grid = CircleGrid.sample(functions["zsq"], 200)
        res = lawson_refine(grid, aaa(grid, 1), tight(1, cap=300))
        if res.admissible:
            assert not res.rational.poles().inside_closed_disk()
        else:
            assert any("closed disk" in w for w in res.warnings)

    def test_chebyshev_centre(self):
        c, err = chebyshev_centre(np.array([0.0, 2.0, 2.0]), LawsonConfig(degree=0))
        assert c == pytest.approx(1.0, abs=1e-12)
        assert err == pytest.approx(1.0, abs=1e-12)

    def test_zsq_falls_back_to_best_constant(self, functions):
        result = linf_best(functions["zsq"], 1)
        assert result.stats.sup == pytest.approx(1.0, abs=1e-9)
        assert result.poles == PoleList((), 1)
        assert result.effective_degree == 0

    @pytest.mark.slow
    def test_zsq_degree1_is_defective(self, functions):
        result = linf_best(functions["zsq"], 1, tight(1, cap=5000))
        assert 1.0 - 1e-9 <= result.stats.sup < 1.0 + 1e-3
        z = CircleGrid.roots_of_unity(512)
        assert np.max(np.abs(result.approximant(z))) < 1e-3

    @pytest.mark.slow
    def test_tanz3_degree3_is_a_cubic(self, functions):
        result = linf_best(functions["tanz3"], 3, tight(3, cap=5000))
        z = CircleGrid.roots_of_unity(1024)
        r = result.approximant(z)
        c = np.mean(r * np.conj(z ** 3))
        assert abs(c - 1.159500940306) < 1e-5
        assert np.max(np.abs(r - c * z ** 3)) < 1e-5
        assert result.stats.winding == 9

    def test_solver_envelope(self, functions):
        env = LawsonSolver(max_lawson_iterations=20).execute(functions["exp4"], 2)
        assert env["solver"] == "linf_lawson"
        assert env["profile"] == "linf_lawson_default"
        assert env["status"] in ("success", "partial")
        assert env["data"].norm == "linf"
        assert env["meta"]["error_kind"] is None

    def test_solver_envelope_reports_input_error(self, functions):
        env = LawsonSolver(samples=4).execute(functions["exp4"], 3)
        assert env["status"] == "error"
        assert env["meta"]["error_kind"] == "input"
        assert env["data"] is None
