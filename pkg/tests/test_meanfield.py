import math

import pytest

from twowell.errors import InvalidParameters
from twowell.meanfield import (
    ModeAngles,
    Phase,
    collective_energy,
    critical_lambda,
    minimize_energy,
    numerical_minima,
)
from twowell.model import ModelParams


def circular(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def test_critical_lambda():
    assert critical_lambda(0.0) == 1.0
    assert critical_lambda(1.0) == pytest.approx(math.sqrt(2))
    with pytest.raises(InvalidParameters):
        critical_lambda(-1.0)


@pytest.mark.parametrize("theta,phi", [(-0.1, 0.0), (2.0, 0.0), (0.1, -0.1), (0.1, 2 * math.pi)])
def test_angle_domain(theta, phi):
    with pytest.raises(InvalidParameters):
        ModeAngles(theta, phi)


def test_gapped_phase_minimum():
    sol = minimize_energy(ModelParams(1.0, 1.0))
    assert sol.phase is Phase.GAPPED
    (m,) = sol.minima
    assert m.theta == pytest.approx(math.pi / 4)
    assert m.phi == pytest.approx(math.pi / 4)
    assert sol.energy_per_particle == pytest.approx(-(math.sqrt(2) + 0.5))


def test_degenerate_phase_has_mirror_minima():
    p = ModelParams(1.0, 2.0)
    sol = minimize_energy(p)
    assert sol.phase is Phase.DEGENERATE
    a, b = sol.minima
    assert a.theta + b.theta == pytest.approx(math.pi / 2)
    assert math.sin(2 * a.theta) == pytest.approx(p.lambda_c / p.lam)
    for m in sol.minima:
        assert collective_energy(m, p) == pytest.approx(sol.energy_per_particle, abs=1e-14)


def test_critical_point_reported_gapped():
    sol = minimize_energy(ModelParams(1.0, math.sqrt(2)))
    assert sol.phase is Phase.GAPPED and len(sol.minima) == 1


@pytest.mark.parametrize("gamma,lam", [(0.0, 0.0), (0.3, 0.9), (1.0, 2.5), (2.0, 3.0), (1.7, 1.9)])
def test_closed_forms_match_brute_force(gamma, lam):
    p = ModelParams(gamma, lam)
    sol = minimize_energy(p)
    found = numerical_minima(p)
    if lam == 0.0 or sol.phase is Phase.GAPPED:
        best = min(found, key=lambda item: item[1])
        assert best[0].theta == pytest.approx(math.pi / 4, abs=1e-6)
        assert circular(best[0].phi, sol.phi_star) < 1e-6
        assert best[1] == pytest.approx(sol.energy_per_particle, abs=1e-9)
    else:
        assert len(found) == 2
        for (angles, energy), ref in zip(found, sol.minima):
            assert angles.theta == pytest.approx(ref.theta, abs=1e-6)
            assert circular(angles.phi, ref.phi) < 1e-6
            assert energy == pytest.approx(sol.energy_per_particle, abs=1e-9)
