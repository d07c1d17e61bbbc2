import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twowell.errors import (
    DegenerateDirection,
    DivergentParameters,
    InvalidParameters,
    TruncationOverflow,
)
from twowell.meanfield import ModeAngles
from twowell.model import ModelParams
from twowell.thermo import (
    BathParams,
    ThermoObservables,
    compressibility,
    dominant_mode,
    log_grand_partition,
    mode_occupation,
    perpendicular,
    thermal_observables,
)


def free_bosons(gamma, beta, mu):
    """Two independent modes with energies -+lambda_c: Xi, M and dM/dmu."""
    lc = math.hypot(1.0, gamma)
    xi, m, dm = 1.0, 0.0, 0.0
    for e in (-lc, lc):
        q = math.exp(beta * (mu - e))
        xi /= 1.0 - q
        m += q / (1.0 - q)
        dm += beta * q / (1.0 - q) ** 2
    return xi, m, dm


def test_bath_validation():
    for beta in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(InvalidParameters):
            BathParams(beta, -2.0)
    with pytest.raises(InvalidParameters):
        BathParams(1.0, math.nan)


@pytest.mark.parametrize("gamma,beta,mu", [(0.0, 1.0, -2.0), (1.0, 1.0, -2.0), (0.5, 2.5, -1.4),
                                           (1.0, 0.4, -3.0)])
def test_noninteracting_closed_form(gamma, beta, mu):
    xi, m, _ = free_bosons(gamma, beta, mu)
    p, b = ModelParams(gamma, 0.0), BathParams(beta, mu)
    res = log_grand_partition(p, b, tol=1e-13)
    assert math.exp(res.log_xi) == pytest.approx(xi, rel=1e-10)
    assert res.tail_estimate <= 1e-13
    obs = thermal_observables(p, b, tol=1e-13)
    assert obs.m_mean == pytest.approx(m, rel=1e-10)


def test_default_tolerance_bounds_the_tail():
    p, b = ModelParams(1.0, 1.0), BathParams(1.0, -2.3)
    res = log_grand_partition(p, b)
    assert 0 < res.tail_estimate <= 1e-7
    assert res.log_xi >= 0


def test_empty_system_limit():
    res = log_grand_partition(ModelParams(1.0, 1.0), BathParams(1.0, -60.0))
    assert res.log_xi == pytest.approx(0.0, abs=1e-20)
    obs = thermal_observables(ModelParams(1.0, 1.0), BathParams(1.0, -60.0))
    assert obs.m_mean < 1e-20


def test_refuses_non_equilibrium_points():
    with pytest.raises(DivergentParameters):
        log_grand_partition(ModelParams(1.0, 1.0), BathParams(1.0, -1.0))
    with pytest.raises(DivergentParameters):
        thermal_observables(ModelParams(1.0, 3.0), BathParams(1.0, -3.0))


def test_cap_raises_truncation_overflow():
    with pytest.raises(TruncationOverflow, match="50"):
        log_grand_partition(ModelParams(1.0, 1.0), BathParams(1.0, -1.92), m_cap=50)


def test_doubling_the_sum_changes_little():
    p, b = ModelParams(1.0, 1.0), BathParams(1.0, -2.0)
    res = log_grand_partition(p, b)
    longer = log_grand_partition(p, b, m_min=2 * res.m_ax)
    assert longer.m_ax >= 2 * res.m_ax
    assert abs(longer.log_xi - res.log_xi) < 1e-7


POINTS = [
    (1.0, 1.0, 1.0, -2.2),
    (1.0, 2.5, 1.0, -3.6),
    (0.5, 0.7, 2.0, -1.8),
    (0.0, 1.5, 1.0, -2.2),
]


@pytest.mark.parametrize("gamma,lam,beta,mu", POINTS)
def test_observables_match_derivatives_of_log_xi(gamma, lam, beta, mu):
    h = 1e-5
    tol = 1e-13

    def lx(g=gamma, l=lam, m=mu):
        return log_grand_partition(ModelParams(g, l), BathParams(beta, m), tol=tol).log_xi

    obs = thermal_observables(ModelParams(gamma, lam), BathParams(beta, mu), tol=tol)
    assert obs.m_mean == pytest.approx((lx(m=mu + h) - lx(m=mu - h)) / (2 * h * beta), rel=1e-6)
    assert obs.interaction == pytest.approx((lx(l=lam + h) - lx(l=lam - h)) / (2 * h * beta),
                                            rel=1e-6)
    if gamma > 0:
        assert obs.current == pytest.approx(-(lx(g=gamma + h) - lx(g=gamma - h)) / (2 * h * beta),
                                            rel=1e-6)


@pytest.mark.parametrize("gamma,lam,beta,mu", POINTS)
def test_energy_identity_and_symmetry(gamma, lam, beta, mu):
    obs = thermal_observables(ModelParams(gamma, lam), BathParams(beta, mu))
    assert obs.hop == pytest.approx(obs.energy - gamma * obs.current + lam * obs.interaction,
                                    rel=1e-10)
    assert abs(obs.imbalance) <= 1e-8 * max(1.0, obs.m_mean)
    assert obs.interaction >= 0 and obs.m_mean >= 0
    if obs.hop != 0:
        assert obs.current / obs.hop == pytest.approx(gamma, abs=1e-14)


def test_compressibility_closed_form_and_growth():
    _, _, dm = free_bosons(0.0, 1.0, -2.0)
    k = compressibility(ModelParams(0.0, 0.0), BathParams(1.0, -2.0), tol=1e-14, step=1e-4)
    assert k == pytest.approx(dm, rel=1e-7)
    p = ModelParams(1.0, 1.0)
    mu_d = -(math.sqrt(2) + 0.5)
    ks = [compressibility(p, BathParams(1.0, mu_d - d), step=1e-3 * d) for d in (0.4, 0.2, 0.1)]
    assert ks[0] < ks[1] < ks[2]
    assert compressibility(p, BathParams(1.0, -60.0)) == pytest.approx(0.0, abs=1e-15)


def obs_from(m, W, J):
    return ThermoObservables(m_mean=m, energy=0.0, interaction=0.0, current=J, hop=W,
                             imbalance=0.0)


def test_mode_occupation_examples():
    obs = obs_from(4.0, -2.0, 0.0)
    assert mode_occupation(obs, ModeAngles(0.0, 1.0)) == 2.0
    assert mode_occupation(obs, ModeAngles(math.pi / 4, 0.0)) == pytest.approx(3.0)


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0.0, math.pi / 2), phi=st.floats(0.0, 6.28),
       m=st.floats(0.0, 100.0), W=st.floats(-50, 50), J=st.floats(-50, 50))
def test_mode_completeness(theta, phi, m, W, J):
    obs = obs_from(m, W, J)
    a = ModeAngles(theta, phi)
    total = mode_occupation(obs, a) + mode_occupation(obs, perpendicular(a))
    assert total == pytest.approx(m, abs=1e-12 * max(1.0, m, abs(W), abs(J)))


def test_dominant_mode_example():
    mode = dominant_mode(obs_from(4.0, -2.0, 0.0))
    assert mode.theta_max == pytest.approx(math.pi / 4)
    assert mode.phi_max == 0.0
    assert (mode.n_max, mode.n, mode.n_perp) == pytest.approx((3.0, 0.75, 0.25))
    assert mode.n + mode.n_perp == 1.0


@settings(max_examples=100, deadline=None)
@given(W=st.floats(-10, 10), J=st.floats(-10, 10), phi=st.floats(0.0, 6.28))
def test_dominant_mode_maximizes_occupation(W, J, phi):
    obs = obs_from(25.0, W, J)
    mode = dominant_mode(obs)
    best = mode_occupation(obs, ModeAngles(mode.theta_max, mode.phi_max))
    assert best == pytest.approx(mode.n_max, abs=1e-12)
    assert mode_occupation(obs, ModeAngles(math.pi / 4, phi)) <= best + 1e-12


def test_degenerate_direction():
    mode = dominant_mode(obs_from(2.0, 0.0, 0.0))
    assert mode.degenerate and mode.phi_max == 0.0 and mode.n == 0.5
    with pytest.raises(DegenerateDirection):
        dominant_mode(obs_from(2.0, 0.0, 0.0), strict=True)


def test_dominant_fraction_bounds_at_thermal_point():
    obs = thermal_observables(ModelParams(1.0, 1.0), BathParams(1.0, -2.2))
    mode = dominant_mode(obs)
    assert 0.5 <= mode.n <= 1.0
    assert mode.t == pytest.approx(1.0, abs=1e-12)


def test_n_perp_falls_toward_case1_divergence():
    p = ModelParams(1.0, 1.0)
    mu_d = -(math.sqrt(2) + 0.5)
    vals = [dominant_mode(thermal_observables(p, BathParams(1.0, mu_d - d))).n_perp
            for d in (0.5, 0.2, 0.1, 0.05)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
