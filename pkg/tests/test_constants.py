"""Constants module: closed forms against independent oracles."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as scipy_gamma

from cylstable.constants import (
    c3_and_Tmax,
    c_alpha,
    chain_constants,
    constants_report,
    jensen_bound,
    levy_tail_mass,
    sphere_total_mass,
)


def test_gamma_backend_against_mpmath_oracle():
    # pre-build validation of the Gamma implementation, frozen as a test
    points = np.linspace(0.1, 10.0, 20)
    for x in points:
        ref = float(mp.gamma(x))
        assert abs(scipy_gamma(x) - ref) <= 1e-13 * abs(ref)
        assert abs(math.gamma(x) - ref) <= 1e-13 * abs(ref)


def test_c_alpha_at_one_is_half_pi():
    assert c_alpha(1.0) == math.pi / 2.0


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_c_alpha_matches_gamma_oracle(alpha):
    ref = float(-alpha * mp.cos(alpha * mp.pi / 2) * mp.gamma(-alpha))
    assert c_alpha(alpha) == pytest.approx(ref, rel=1e-13)


def test_c_alpha_continuous_across_one():
    # |dc/dalpha| at 1 is order 1, so within 1e-7 of the point the value
    # must sit within 1e-6 of the alpha=1 branch
    for k in range(7, 14):
        for eps in (10.0**-k, -(10.0**-k)):
            assert abs(c_alpha(1.0 + eps) - math.pi / 2.0) < 1e-6


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
def test_c_alpha_rejects_out_of_range(alpha):
    for bad in (0.0, 2.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            c_alpha(bad)
    assert c_alpha(alpha) > 0.0


def test_sphere_mass_n1_is_exactly_one():
    for alpha in (0.4, 1.0, 1.5, 1.9):
        assert sphere_total_mass(1, alpha) == pytest.approx(1.0, rel=1e-14)


def test_sphere_mass_n2_gamma_oracle():
    ref = float(mp.gamma(0.5) * mp.gamma(1.75) / (mp.gamma(1.0) * mp.gamma(1.25)))
    assert sphere_total_mass(2, 1.5) == pytest.approx(ref, rel=1e-13)


def test_sphere_mass_large_n_asymptotic():
    # Gamma((n+alpha)/2)/Gamma(n/2) ~ (n/2)^(alpha/2), so
    # mass(n)/n^(alpha/2) -> 2^(-alpha/2) Gamma(1/2)/Gamma((1+alpha)/2)
    alpha = 1.5
    limit = 2.0 ** (-alpha / 2) * math.gamma(0.5) / math.gamma((1 + alpha) / 2)
    for n in (100, 1000, 10000):
        ratio = sphere_total_mass(n, alpha) / n ** (alpha / 2)
        assert ratio == pytest.approx(limit, rel=5.0 / n)


def test_chain_ratio_eliminates_convention():
    for alpha in (1.1, 1.5, 1.9):
        for conv in (0.5, 1.0, 3.0):
            chain = chain_constants(alpha, alpha / 2, c_convention=conv)
            assert chain["c2"] / chain["c1"] == pytest.approx((4 - alpha) / (2 - alpha), rel=1e-14)


def test_chain_identity_C_times_gap():
    alpha, p = 1.5, 1.2
    chain = chain_constants(alpha, p)
    assert chain["C"] * (alpha - p) / alpha == pytest.approx(chain["c2"] ** (p / alpha), rel=1e-14)


def test_chain_example_alpha15_p1():
    chain = chain_constants(1.5, 1.0, c_convention=1.0)
    assert chain["C"] == pytest.approx(chain["c2"] ** (2.0 / 3.0) * 3.0, rel=1e-13)


def test_C_diverges_as_p_approaches_alpha():
    alpha = 1.5
    values = [chain_constants(alpha, p)["C"] for p in (1.0, 1.2, 1.4, 1.49, 1.499)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] > 100.0


def test_chain_rejects_p_at_or_above_alpha():
    with pytest.raises(ValueError):
        chain_constants(1.5, 1.5)
    with pytest.raises(ValueError):
        chain_constants(1.5, 1.7)


def test_c3_degenerate_zero_coefficients():
    result = c3_and_Tmax(1.5, 0.0, 0.0)
    assert result["c3"] == 0.0
    assert result["T_uniq"] == 1.0 and result["T_picard"] == 1.0


def test_c3_monotone_in_coefficients():
    base = c3_and_Tmax(1.5, 1.0, 1.0)["c3"]
    assert c3_and_Tmax(1.5, 2.0, 1.0)["c3"] >= base
    assert c3_and_Tmax(1.5, 1.0, 2.0)["c3"] >= base
    # doubling both multiplies each p-term by at most 2^p <= 2^alpha
    doubled = c3_and_Tmax(1.5, 2.0, 2.0)["c3"]
    assert base <= doubled <= 2.0**1.5 * base * (1 + 1e-12)


def test_c3_grid_refinement_oracle():
    coarse = c3_and_Tmax(1.5, 1.0, 1.0, grid_step=1e-4)["c3"]
    fine = c3_and_Tmax(1.5, 1.0, 1.0, grid_step=1e-5)["c3"]
    assert abs(coarse - fine) < 1e-6


def test_levy_tail_mass_zero_gamma():
    value, se = levy_tail_mass([0.0, 0.0], 1.5)
    assert value == 0.0 and se == 0.0


def test_levy_tail_mass_scalar_unit():
    value, _ = levy_tail_mass([1.0], 1.5)
    assert value == pytest.approx(1.0 / c_alpha(1.5), rel=1e-12)


@given(
    alpha=st.floats(0.3, 1.9),
    scale=st.floats(0.25, 4.0),
    n=st.integers(1, 3),
)
@settings(max_examples=25, deadline=None)
def test_levy_tail_mass_homogeneity(alpha, scale, n):
    gamma = np.linspace(1.0, 0.3, n)
    base, _ = levy_tail_mass(gamma, alpha, nodes=128)
    scaled, _ = levy_tail_mass(scale * gamma, alpha, nodes=128)
    assert scaled == pytest.approx(scale**alpha * base, rel=1e-6)


def test_levy_tail_mass_quadrature_vs_monte_carlo():
    gamma = np.array([1.0, 0.5, 0.25])
    quad, _ = levy_tail_mass(gamma, 1.5)
    mc, se = levy_tail_mass(gamma, 1.5, method="monte_carlo", mc_points=400_000, seed=5)
    assert abs(mc - quad) <= 3.0 * se


def test_jensen_equality_for_constant_gamma():
    for n in (1, 2, 3):
        gamma = np.full(n, 0.7)
        mass, _ = levy_tail_mass(gamma, 1.5)
        assert abs(mass - jensen_bound(gamma, 1.5)) < 1e-8


def test_jensen_strict_for_uneven_gamma():
    mass, _ = levy_tail_mass([1.0, 0.0], 1.5)
    bound = jensen_bound([1.0, 0.0], 1.5)
    assert mass < bound - 1e-3


def test_jensen_dominates_on_random_gammas():
    rng = np.random.default_rng(123)
    for _ in range(50):
        n = rng.integers(1, 4)
        gamma = rng.uniform(0.0, 2.0, size=n)
        if not gamma.any():
            continue
        mass, _ = levy_tail_mass(gamma, 1.5)
        assert mass <= jensen_bound(gamma, 1.5) + 1e-6


def test_jensen_large_n_limit_matches_c_free_combination():
    # with sum gamma^2 fixed, the bound tends to the c-free combination
    # 2^(-alpha/2) Gamma(1/2)/(c_alpha Gamma((1+alpha)/2)) * (sum gamma^2)^(alpha/2);
    # the sharp prefactor carries the 2^(-alpha/2) from the sphere-mass
    # asymptotic, which the stated chain constant c1 upper-bounds away
    alpha = 1.5
    total_sq = 2.0
    target = (
        2.0 ** (-alpha / 2)
        * math.gamma(0.5)
        / (c_alpha(alpha) * math.gamma((1 + alpha) / 2))
        * total_sq ** (alpha / 2)
    )
    for n in (100, 1000, 10000):
        gamma = np.full(n, math.sqrt(total_sq / n))
        assert jensen_bound(gamma, alpha) == pytest.approx(target, rel=5.0 / n)
    # the stated chain constant dominates the sharp limit (c = 1)
    from cylstable.constants import chain_constants

    c1 = chain_constants(alpha, 1.0)["c1"]
    assert target <= c1 * total_sq ** (alpha / 2)


def test_constants_report_positive_entries():
    report = constants_report(1.5, 1.2, c_f=1.0, c_g=1.0, n=3)
    for key, value in report.as_items():
        assert np.isfinite(value), key
        if key not in ("lambda_mass_n",):
            assert value > 0.0, key
