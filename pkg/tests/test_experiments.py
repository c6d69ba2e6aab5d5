"""Experiment harness: verdict logic, exactness claims, determinism."""

import math

import numpy as np
import pytest

from cylstable.constants import c_alpha
from cylstable.experiments import (
    HypothesisFailed,
    char_function_test,
    gof_test_vectors,
    isotropic_gof_report,
    moment_experiment,
    picard_convergence_experiment,
    random_hypothesis_triples,
    tail_experiment,
    uniqueness_experiment,
    willet_wong_check,
)
from cylstable.hilbert import HSMatrix, heat_preset
from cylstable.integral import constant_integrand
from cylstable.picard import SolverConfig, binding_time_bound
from cylstable.sampling import sample_isotropic


def test_tail_zero_operator():
    report = tail_experiment(HSMatrix(np.zeros((2, 2))), 1.5, n_samples=2_000, seed=1)
    assert report.passed
    assert np.array_equal(report.tables["tail"]["p_hat"], np.zeros_like(report.tables["tail"]["p_hat"]))


def test_tail_scalar_plateau_matches_constants():
    report = tail_experiment(HSMatrix([[1.0]]), 1.5, t=1.0, n_samples=300_000, seed=2)
    assert report.passed, [(v.name, v.observed) for v in report.verdicts]
    names = {v.name for v in report.verdicts}
    assert {"plateau_flatness", "plateau_level", "tail_slope"} <= names


def test_tail_time_scaling_of_level():
    # plateau level is t * levy mass: doubling t doubles the target
    report = tail_experiment(
        HSMatrix([[1.0]]), 1.5, t=2.0, n_samples=300_000,
        r_grid=np.geomspace(25, 60, 7), seed=3,
    )
    by_name = {v.name: v for v in report.verdicts}
    assert by_name["plateau_level"].passed
    level = float(report.tables["tail"]["plateau"].mean())
    assert level == pytest.approx(2.0 / c_alpha(1.5), rel=0.15)


def test_tail_under_resolved_is_inconclusive():
    report = tail_experiment(
        HSMatrix([[1.0]]), 1.5, n_samples=2_000,
        r_grid=np.geomspace(50, 400, 5), seed=4,
    )
    assert report.inconclusive
    assert not report.passed


def test_tail_integrand_plateau_and_scaling():
    grid = np.linspace(0.0, 1.0, 9)
    integrand = constant_integrand(np.diag([1.0, 0.5]), grid)
    report = tail_experiment(integrand, 1.5, n_samples=60_000,
                             r_grid=np.geomspace(10, 60, 9), seed=5)
    assert report.passed, [(v.name, v.observed, v.threshold) for v in report.verdicts]
    assert "plateau_scaling" in {v.name for v in report.verdicts}


def test_moment_zero_integrand():
    grid = np.linspace(0.0, 1.0, 5)
    report = moment_experiment(constant_integrand(np.zeros((1, 1)), grid), 1.5,
                               [1.0], 500, seed=6)
    assert np.array_equal(report.tables["moments"]["moment_2N"], np.zeros(1))


def test_moment_stability_and_bit_exact_homogeneity():
    grid = np.linspace(0.0, 1.0, 9)
    integrand = constant_integrand(np.array([[1.0], [0.0]]), grid)
    report = moment_experiment(integrand, 1.5, [1.0, 1.2], 10_000, seed=7)
    assert report.passed, [(v.name, v.observed) for v in report.verdicts]
    table = report.tables["moments"]
    assert np.all(table["moment_2N"] > 0.0)
    assert np.all(table["ci_lo"] <= table["moment_2N"])
    assert np.all(table["moment_2N"] <= table["ci_hi"])


def test_moment_rejects_bad_p_and_scale():
    grid = np.linspace(0.0, 1.0, 5)
    integrand = constant_integrand(np.ones((1, 1)), grid)
    with pytest.raises(ValueError):
        moment_experiment(integrand, 1.5, [1.6], 100, seed=0)
    with pytest.raises(ValueError):
        moment_experiment(integrand, 1.5, [1.0], 100, seed=0, scale_factor=3.0)


def test_moment_flags_p_close_to_alpha():
    grid = np.linspace(0.0, 1.0, 5)
    integrand = constant_integrand(np.ones((1, 1)), grid)
    report = moment_experiment(integrand, 1.5, [1.45], 2_000, seed=8)
    assert any("close to alpha" in note for note in report.notes)


def test_picard_convergence_experiment_preset():
    model = heat_preset(6)
    bound = binding_time_bound(model, 1.5)
    config = SolverConfig(alpha=1.5, T=0.9 * bound, M=60, n=6, seed=9)
    report = picard_convergence_experiment(model, config, n_iters=6, p=1.0,
                                           replicas=60, seed=9)
    assert report.passed, [(v.name, v.observed) for v in report.verdicts]
    moments = report.tables["decay"]["moment"]
    assert moments[-1] < 1e-3


def test_picard_convergence_rejects_horizon_beyond_bound():
    model = heat_preset(4)
    config = SolverConfig(alpha=1.5, T=1.0, M=10, n=4, seed=10)
    with pytest.raises(ValueError, match="admissible"):
        picard_convergence_experiment(model, config, replicas=2, seed=10)


def test_uniqueness_experiment_small():
    model = heat_preset(5)
    bound = binding_time_bound(model, 1.5)
    config = SolverConfig(alpha=1.5, T=0.8 * bound, M=50, n=5, seed=11)
    report = uniqueness_experiment(model, config, replicas=12, seed=11)
    assert report.passed, [(v.name, v.observed) for v in report.verdicts]
    dists = report.tables["distances"]
    assert np.all(dists["picard_seed"] < 10 * config.tol)
    assert np.all(dists["fresh_noise"] > 10 * config.tol)


def test_willet_wong_zero_function():
    t = np.linspace(0.0, 1.0, 101)
    result = willet_wong_check(np.zeros_like(t), np.zeros_like(t), np.ones_like(t), 0.5, t=t)
    assert result["holds"] and result["margin"] >= 0.0


def test_willet_wong_near_equality_instance():
    t = np.linspace(0.0, 1.0, 10_001)
    result = willet_wong_check(t**2 / 4.0, np.zeros_like(t), np.ones_like(t), 0.5, t=t)
    assert result["holds"]
    assert abs(result["margin"]) < 1e-4


def test_willet_wong_hypothesis_failure():
    t = np.linspace(0.0, 1.0, 1_001)
    with pytest.raises(HypothesisFailed):
        willet_wong_check(np.exp(10 * t), np.zeros_like(t), np.ones_like(t), 0.5, t=t)


def test_willet_wong_p_above_one_is_vacuous():
    t = np.linspace(0.0, 1.0, 101)
    result = willet_wong_check(np.zeros_like(t), np.ones_like(t), np.ones_like(t), 2.0, t=t)
    assert result["holds"] and result["margin"] == math.inf


def test_willet_wong_validation():
    t = np.linspace(0.0, 1.0, 11)
    u = np.zeros_like(t)
    with pytest.raises(ValueError):
        willet_wong_check(u, u, u, 1.0, t=t)
    with pytest.raises(ValueError):
        willet_wong_check(u - 1.0, u, u, 0.5, t=t)
    with pytest.raises(ValueError):
        willet_wong_check(u, u, u, 0.5, t=t**2)  # non-uniform grid


def test_random_hypothesis_triples_margins():
    triples = random_hypothesis_triples(20, 2_000, seed=12)
    assert len(triples) == 20
    for t, u, v, w, p in triples:
        result = willet_wong_check(u, v, w, p, t=t)
        assert result["margin"] >= -1e-6


def test_char_function_zero_vector_contributes_zero():
    samples = sample_isotropic(1.5, 2, seed=13, size=5_000)
    result = char_function_test(samples, lambda u: math.exp(-np.linalg.norm(u) ** 1.5),
                                np.zeros((1, 2)))
    assert result["max_abs_dev"] < 1e-12


def test_char_function_isotropic_passes_and_wrong_target_fails():
    samples = sample_isotropic(1.5, 3, seed=14, size=100_000)
    grid = gof_test_vectors(3, 10)
    good = char_function_test(samples, lambda u: math.exp(-np.linalg.norm(u) ** 1.5), grid)
    assert good["passed"] and good["max_abs_dev"] < 0.02
    bad = char_function_test(samples, lambda u: math.exp(-np.linalg.norm(u) ** 2), grid)
    assert bad["max_abs_dev"] > 0.05


def test_char_function_empty_grid_rejected():
    with pytest.raises(ValueError):
        char_function_test(np.zeros((10, 2)), lambda u: 1.0, np.zeros((0, 2)))


def test_gof_report_passes():
    report = isotropic_gof_report(1.5, 3, 50_000, seed=15)
    assert report.passed


def test_reports_deterministic_across_schedules(monkeypatch):
    def run():
        return tail_experiment(HSMatrix([[1.0]]), 1.5, n_samples=50_000,
                               r_grid=np.geomspace(10, 40, 5), seed=16)

    monkeypatch.setenv("CYLSTABLE_THREADS", "1")
    first = run()
    monkeypatch.setenv("CYLSTABLE_THREADS", "4")
    second = run()
    assert np.array_equal(first.tables["tail"]["p_hat"], second.tables["tail"]["p_hat"])
    assert [v.observed for v in first.verdicts] == [v.observed for v in second.verdicts]


def test_picard_experiment_zero_coefficients_all_zero_from_n1():
    from cylstable.hilbert import make_model

    model = make_model(n=4, f_rule="zero", kappa_rule="zero")
    config = SolverConfig(alpha=1.5, T=0.5, M=20, n=4, seed=17)
    report = picard_convergence_experiment(model, config, n_iters=4, replicas=5, seed=17)
    assert np.array_equal(report.tables["decay"]["moment"], np.zeros(4))


def test_picard_experiment_additive_zero_from_n2():
    from cylstable.hilbert import make_model

    model = make_model(n=4, f_rule="zero", kappa_rule="power:0.1:1.5", shape="one")
    config = SolverConfig(alpha=1.5, T=0.05, M=30, n=4, seed=18)
    report = picard_convergence_experiment(model, config, n_iters=4, replicas=5, seed=18)
    moments = report.tables["decay"]["moment"]
    assert moments[0] > 0.0
    assert np.array_equal(moments[1:], np.zeros(3))
