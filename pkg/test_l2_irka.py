from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from diagnostics.error_curve import error_curve, rms_norm
from diagnostics.optimality import l2_interpolation_points
from funcs.corpus import resolve
from l2_irka.engine import (
    STOP_EXACT,
    STOP_FIXED_POINT,
    STOP_STATIONARY,
    Form,
    Initialization,
    IrkaConfig,
    IrkaSolver,
    irka_iterate,
    l2_best,
    multistart,
)
from l2_irka.loewner import (
    HermiteSampleSet,
    bary_hermite_interpolant,
    build_hermite_loewner,
    reflect_poles,
    ss_interpolant,
    taylor_coefficients,
    unreflect,
)
from l2_irka.optimality import verify_optimality
from l2_irka.oracle import brute_force_degree1
from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.errors import CoincidentPointsError, DegenerateError, InputError

NODES = [0.5, 0.3 + 0.4j, -0.2 - 0.5j]
CORPUS = ["exp4", "sqrt11", "tanz3", "zsq"]


def ring_nodes(n: int) -> np.ndarray:
    """Reflections of the default ring of initial poles."""
    return 0.5 * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.37))


def cubic() -> BarycentricRational:
    """z^3 on the origin and the cube roots of -1/8."""
    t = np.append(0j, 0.5 * np.exp(1j * np.pi * np.array([1, 3, 5]) / 3))
    w = [1 / np.prod(t[i] - np.delete(t, i)) for i in range(4)]
    return BarycentricRational(t, t ** 3, w)


class TestHermiteSamples:
    def test_origin_node_rejected(self, functions):
        with pytest.raises(InputError):
            HermiteSampleSet.from_function(functions["exp4"], [0.5, 0.0])

    def test_coincident_nodes_rejected(self, functions):
        with pytest.raises(CoincidentPointsError):
            HermiteSampleSet.from_function(functions["exp4"], [0.5, 0.5])

    def test_length_mismatch_rejected(self):
        with pytest.raises(InputError):
            HermiteSampleSet(np.array([0.5, 0.2]), np.ones(2), np.ones(3), 1.0)

    def test_function_without_derivative_rejected(self):
        with pytest.raises(InputError):
            HermiteSampleSet.from_function(lambda z: z, [0.5])

    def test_loewner_diagonal_holds_derivatives(self, functions):
        s = HermiteSampleSet.from_function(functions["exp4"], NODES)
        L, M, Y = build_hermite_loewner(s)
        np.testing.assert_allclose(np.diag(L), s.derivatives)
        np.testing.assert_allclose(np.diag(M), s.values + s.points * s.derivatives)
        np.testing.assert_array_equal(Y, s.values)
        assert s.n == 3


class TestInterpolants:
    def test_barycentric_hermite_conditions(self, functions):
        f = functions["exp4"]
        s = HermiteSampleSet.from_function(f, NODES)
        r = bary_hermite_interpolant(s)
        sigma = np.array(NODES)
        assert r(0j) == f(0j)
        np.testing.assert_array_equal(r(sigma), f(sigma))
        np.testing.assert_allclose(r.deriv(sigma), f.derivative(sigma), rtol=1e-8)

    @pytest.mark.parametrize("name", CORPUS)
    @pytest.mark.parametrize("n", range(1, 7))
    def test_forms_agree_inside_the_disk(self, functions, name, n):
        s = HermiteSampleSet.from_function(functions[name], ring_nodes(n))
        z = 0.9 * np.exp(2j * np.pi * np.arange(100) / 100)
        bary = bary_hermite_interpolant(s)(z)
        np.testing.assert_allclose(ss_interpolant(s)(z), bary, rtol=1e-10)

    def test_state_space_feedthrough_fixes_origin(self, functions):
        f = functions["sqrt11"]
        h = ss_interpolant(HermiteSampleSet.from_function(f, NODES))
        assert complex(h(0j)) == pytest.approx(complex(f(0j)), abs=1e-10)

    def test_state_space_form_of_infinite_pole_data(self, functions):
        s = HermiteSampleSet.from_function(functions["exp4"], [0.5, -0.4j], infinite_count=1)
        z = 0.9 * np.exp(2j * np.pi * np.arange(100) / 100)
        np.testing.assert_allclose(ss_interpolant(s)(z), bary_hermite_interpolant(s)(z), rtol=1e-10)

    def test_infinite_pole_data_needs_taylor_coefficients(self):
        with pytest.raises(InputError):
            HermiteSampleSet(np.array([0.5]), np.ones(1), np.ones(1), 1.0, 1.0, infinite_count=1)
        s = HermiteSampleSet(np.array([0.5]), np.ones(1), np.ones(1), 1.0, 2.0)
        np.testing.assert_array_equal(s.origin_taylor, [1.0, 2.0])

    def test_infinite_pole_construction_matches_taylor_data(self, functions):
        f = functions["exp4"]
        s = HermiteSampleSet.from_function(f, [0.5, -0.4j], infinite_count=1)
        r = bary_hermite_interpolant(s)
        sigma = np.array([0.5, -0.4j])
        assert complex(r(0j)) == pytest.approx(complex(f(0j)), abs=1e-12)
        np.testing.assert_allclose(r(sigma), f(sigma), rtol=1e-10)
        np.testing.assert_allclose(r.deriv(sigma), f.derivative(sigma), rtol=1e-7)
        assert complex(r.deriv(0j)) == pytest.approx(complex(f.derivative(0j)), rel=1e-7)
        # one infinite pole fixes the second derivative at the origin too
        np.testing.assert_allclose(taylor_coefficients(r, 3), taylor_coefficients(f, 3), rtol=1e-7)

    def test_double_infinite_pole_matches_taylor_data_to_order_four(self, functions):
        f = functions["exp4"]
        s = HermiteSampleSet.from_function(f, [0.5], infinite_count=2)
        assert len(s.origin_taylor) == 5
        r = bary_hermite_interpolant(s)
        assert r.degree == 3
        assert complex(r(0.5)) == complex(f(0.5))
        assert complex(r.deriv(0.5)) == pytest.approx(complex(f.derivative(0.5)), rel=1e-7)
        np.testing.assert_allclose(taylor_coefficients(r, 5), taylor_coefficients(f, 5), rtol=1e-7)

    def test_cubic_data_gives_a_triple_pole_at_infinity(self, functions):
        s = HermiteSampleSet.from_function(functions["tanz3"], [], infinite_count=3)
        r = bary_hermite_interpolant(s)
        z = 0.9 * np.exp(2j * np.pi * np.arange(50) / 50)
        np.testing.assert_allclose(r(z), z ** 3, rtol=1e-10)
        assert r.poles().finite == () or min(abs(p) for p in r.poles().finite) > 1e4


class TestReflection:
    def test_reflect_and_unreflect(self):
        poles = PoleList((2.0, 1 + 1j), 1)
        reflected = reflect_poles(poles)
        assert reflected.infinite_count == 1
        assert reflected.n == 3
        np.testing.assert_allclose(reflected.points, [0.5, 0.5 + 0.5j])
        back = unreflect(reflected.points, reflected.infinite_count)
        assert back.count_at_infinity == 1
        np.testing.assert_allclose(back.finite, [1 + 1j, 2.0])

    def test_tiny_node_unreflects_to_infinity(self):
        back = unreflect([1e-12, 0.5], 0)
        assert back.count_at_infinity == 1
        assert back.finite == (2.0,)

    def test_pole_at_origin_has_no_reflection(self):
        with pytest.raises(DegenerateError):
            reflect_poles(PoleList((0.0,)))


class TestConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            IrkaConfig(degree=0)
        with pytest.raises(InputError):
            IrkaConfig(degree=2, pole_tolerance=0.0)
        with pytest.raises(InputError):
            IrkaConfig(degree=2, initialization="user", initial_poles=(2.0,))
        with pytest.raises(ValueError):
            IrkaConfig(degree=1, form="companion")

    @pytest.mark.parametrize(
        "field, value",
        [
            ("stall_window", 0),
            ("stall_ratio", 0.0),
            ("stall_ratio", 1.5),
            ("far_modulus", 1.0),
            ("far_modulus", 1e12),
            ("drift_modulus", 0.5),
            ("drift_growth", 0.0),
        ],
    )
    def test_guard_validation(self, field, value):
        with pytest.raises(InputError):
            IrkaConfig(degree=2, **{field: value})

    def test_from_profile_overrides(self):
        profile = {
            "iteration": {"max_iterations": 7, "initialization": "ring", "stall_window": 4},
            "damping": {"min_step": 0.25},
            "guards": {"far_modulus": 500.0, "drift_growth": 0.1},
            "exact": {"samples": 32},
        }
        cfg = IrkaConfig.from_profile(profile, 3, pole_tolerance=None, form="state_space")
        assert cfg.max_iterations == 7
        assert cfg.initialization is Initialization.RING
        assert cfg.form is Form.STATE_SPACE
        assert cfg.min_step == 0.25
        assert cfg.pole_tolerance == 1e-10
        assert cfg.stall_window == 4
        assert cfg.stall_ratio == 0.5
        assert cfg.far_modulus == 500.0
        assert cfg.drift_growth == 0.1
        assert cfg.reproduce_samples == 32


class TestIrka:
    def test_zsq_degree1_exact_values(self, functions):
        result = l2_best(functions["zsq"], 1)
        assert result.converged
        assert result.stats.rms == pytest.approx(math.sqrt(3) / 2, abs=1e-9)
        assert abs(result.poles.finite[0]) == pytest.approx(math.sqrt(2), abs=1e-8)
        assert result.stats.winding == 3

    def test_zsq_degree2_reproduced_exactly(self, functions):
        res = irka_iterate(functions["zsq"], IrkaConfig(degree=2, initialization="ring"))
        assert res.stop_reason == STOP_EXACT
        assert res.iterations == 1
        assert rms_norm(error_curve(functions["zsq"], res.approximant)) < 1e-12

    def test_sqrt11_degree1_pole(self, functions):
        res = irka_iterate(functions["sqrt11"], IrkaConfig(degree=1))
        assert res.converged
        assert res.stop_reason == STOP_FIXED_POINT
        assert len(res.poles.finite) == 1
        assert res.poles.finite[0] == pytest.approx(3.865, abs=5e-3)
        assert res.optimality.passed
        assert res.optimality.max_residual < 1e-8

    def test_sqrt11_matches_brute_force_oracle(self, functions):
        f = functions["sqrt11"]
        oracle = brute_force_degree1(f)
        result = l2_best(f, 1)
        assert abs(result.stats.rms - oracle.error) < 1e-4
        assert abs(result.poles.finite[0] - oracle.pole) < 1e-2

    def test_state_space_form_agrees(self, functions):
        f = functions["sqrt11"]
        bary = irka_iterate(f, IrkaConfig(degree=1))
        ss = irka_iterate(f, IrkaConfig(degree=1, form="state_space"))
        assert ss.state_space is not None
        assert ss.poles.finite[0] == pytest.approx(bary.poles.finite[0], abs=1e-6)

    def test_history_starts_with_initial_poles(self, functions):
        cfg = IrkaConfig(degree=1, initialization="user", initial_poles=(5.0,))
        res = irka_iterate(functions["sqrt11"], cfg)
        assert res.pole_history[0].finite == (5.0,)
        assert len(res.pole_history) == res.iterations + 1

    def test_iteration_cap_reports_not_converged(self, functions):
        res = irka_iterate(functions["exp4"], IrkaConfig(degree=2, max_iterations=1, initialization="ring"))
        assert not res.converged
        assert res.iterations == 1
        assert any("did not converge" in w for w in res.warnings)

    def test_wrong_pole_fails_optimality(self, functions):
        f = functions["sqrt11"]
        res = irka_iterate(f, IrkaConfig(degree=1))
        report = verify_optimality(f, res.approximant, poles=PoleList((5.0,)))
        assert not report.passed
        assert "r(node 0)" in report.failures() or "r'(node 0)" in report.failures()

    def test_pole_inside_disk_fails_precondition(self, functions):
        f = functions["sqrt11"]
        res = irka_iterate(f, IrkaConfig(degree=1))
        report = verify_optimality(f, res.approximant, poles=PoleList((0.5,)))
        assert not report.precondition_ok
        assert report.residuals == []

    def test_multistart_keeps_rotation_order(self, functions):
        rotations = [0.0, 1.0, 2.0]
        runs = multistart(functions["exp4"], IrkaConfig(degree=1), rotations, workers=2)
        assert [run.rotation for run in runs] == rotations
        assert all(len(run.moduli) == 1 for run in runs)

    @pytest.mark.slow
    def test_error_decreases_with_degree_over_the_corpus(self, functions):
        for name in CORPUS:
            errors = [l2_best(functions[name], n).stats.rms for n in range(1, 9)]
            for n, (a, b) in enumerate(zip(errors, errors[1:]), start=1):
                if a < 1e-12:
                    # f reproduced exactly from here on
                    assert b < 1e-12, (name, n)
                else:
                    assert b < a - 1e-12, (name, n, a, b)

    @pytest.mark.slow
    def test_exp4_degree3_winding(self, functions):
        result = l2_best(functions["exp4"], 3)
        assert result.converged
        assert result.stats.winding == 7

    def test_tanz3_pole_ring_moves_outward(self, functions):
        # on an equally spaced ring each step multiplies the pole modulus by about 1.5 ** (1/3)
        start = tuple(15.95 * np.exp(1j * (2 * np.pi * np.arange(3) / 3 + 0.37)))
        cfg = IrkaConfig(degree=3, initialization="user", initial_poles=start, max_iterations=1)
        res = irka_iterate(functions["tanz3"], cfg)
        moduli = [abs(p) for p in res.pole_history[1].finite]
        assert len(moduli) == 3
        assert moduli == pytest.approx([15.95 * 1.5 ** (1 / 3)] * 3, rel=2e-3)

    @pytest.mark.slow
    def test_tanz3_degree3_drifts_to_the_cubic(self, functions):
        f = functions["tanz3"]
        res = irka_iterate(f, IrkaConfig(degree=3, initialization="ring"))
        assert res.converged
        assert res.stop_reason == STOP_FIXED_POINT
        assert res.poles.count_at_infinity == 3
        assert any("drifting outward" in w for w in res.warnings)
        assert res.optimality.passed
        rms = rms_norm(error_curve(f, res.approximant))
        assert rms == pytest.approx(rms_norm(error_curve(f, lambda z: z ** 3)), abs=1e-10)
        pts = l2_interpolation_points(res.approximant, res.poles)
        assert pts.points == [0j]
        assert pts.multiplicities == [7]
        assert pts.total == pts.expected == 7

    def test_tanz3_rotated_starts_give_rotated_iterates(self, functions):
        f = functions["tanz3"]
        base = IrkaConfig(degree=3, initialization="ring", max_iterations=5)
        a = irka_iterate(f, base)
        b = irka_iterate(f, replace(base, ring_phase=base.ring_phase + np.pi / 3))
        turn = np.exp(1j * np.pi / 3)
        for pa, pb in zip(a.pole_history[1:], b.pole_history[1:]):
            left, right = pa.as_array(), pb.as_array()
            assert sorted(abs(left)) == pytest.approx(sorted(abs(right)), rel=1e-6)
            assert np.max(np.min(np.abs((turn * left)[:, None] - right[None, :]), axis=1)) < 1e-6 * np.max(abs(left))
            assert np.min(np.abs(left[:, None] - right[None, :])) > 0.5

    @pytest.mark.slow
    def test_tanz3_multistart_agrees_in_modulus(self, functions):
        runs = multistart(functions["tanz3"], IrkaConfig(degree=3), [0.0, np.pi / 3], workers=2)
        assert all(run.converged for run in runs)
        assert runs[0].moduli == pytest.approx(runs[1].moduli, rel=1e-6)
        assert runs[0].rms == pytest.approx(runs[1].rms, abs=1e-12)

    def test_cubic_satisfies_the_conditions_of_a_triple_pole_at_infinity(self, functions):
        report = verify_optimality(functions["tanz3"], cubic(), poles=PoleList((), 3))
        assert report.passed
        assert [name for name, _ in report.residuals][-1] == "taylor order 6 at 0"
        # z^3 + z^6 differs from the cubic at order 6 only
        other = verify_optimality(resolve("z^3 + z^6"), cubic(), poles=PoleList((), 3))
        assert other.failures() == ["taylor order 6 at 0"]

    def test_stationary_stop_on_a_stalled_run(self, functions):
        cfg = IrkaConfig(degree=1, stall_window=1, stall_ratio=1e-300, pole_tolerance=1e-300)
        res = irka_iterate(functions["sqrt11"], cfg)
        assert res.converged
        assert res.stop_reason == STOP_STATIONARY
        assert res.optimality.passed


class TestSolver:
    def test_envelope(self, functions):
        env = IrkaSolver().execute(functions["sqrt11"], 1)
        assert env["solver"] == "l2_irka"
        assert env["profile"] == "l2_irka_default"
        assert env["status"] == "success"
        assert env["data"].norm == "l2"
        assert env["data"].optimality.passed

    def test_envelope_reports_input_error(self, functions):
        env = IrkaSolver(max_iterations=0).execute(functions["exp4"], 2)
        assert env["status"] == "error"
        assert env["meta"]["error_kind"] == "input"

    def test_profile_overrides_section(self):
        solver = IrkaSolver(profile_overrides={"iteration": {"max_iterations": 9}})
        assert solver.config_for(2).max_iterations == 9
