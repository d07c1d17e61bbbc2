"""Collective (single-mode) ansatz and its zero-temperature phases.

Every particle sits in the mode b^+ = a1^+ cos(theta) - a2^+ exp(i phi) sin(theta).
To leading order in M the energy per particle is

    e(theta, phi) = -[sin(2 theta)(cos(phi) + gamma sin(phi)) + lambda (1 - sin^2(2 theta)/2)]

which has one minimum at theta = pi/4 for lambda <= lambda_c and two minima,
theta_1 and pi/2 - theta_1, above it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters
from .model import ModelParams

TWO_PI = 2.0 * math.pi


class Phase(enum.Enum):
    GAPPED = "gapped"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ModeAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise InvalidParameters(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not (0.0 <= self.phi < TWO_PI):
            raise InvalidParameters(f"phi must lie in [0, 2 pi), got {self.phi!r}")


@dataclass(frozen=True)
class MeanFieldSolution:
    phase: Phase
    lambda_c: float
    minima: tuple[ModeAngles, ...]
    phi_star: float
    energy_per_particle: float


def critical_lambda(gamma: float) -> float:
    if gamma < 0:
        raise InvalidParameters(f"gamma must be >= 0, got {gamma!r}")
    return math.hypot(1.0, gamma)


def collective_energy(angles: ModeAngles, params: ModelParams) -> float:
    """Leading-order energy per particle of the collective state."""
    return float(_energy(angles.theta, angles.phi, params.gamma, params.lam))


def _energy(theta, phi, gamma, lam):
    s2 = np.sin(2.0 * theta)
    return -(s2 * (np.cos(phi) + gamma * np.sin(phi)) + lam * (1.0 - 0.5 * s2 * s2))


def _wrap(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    return 0.0 if phi >= TWO_PI else phi


def minimize_energy(params: ModelParams) -> MeanFieldSolution:
    """Closed-form minima of the collective energy.

    At lambda == lambda_c both branches coincide (theta_1 = pi/4); the point
    is reported as gapped with a single minimum.
    """
    lc = params.lambda_c
    lam = params.lam
    phi_star = _wrap(math.atan2(params.gamma / lc, 1.0 / lc))
    if lam <= lc:
        minima = (ModeAngles(math.pi / 4, phi_star),)
        return MeanFieldSolution(Phase.GAPPED, lc, minima, phi_star, -(lc + 0.5 * lam))
    theta1 = 0.5 * math.asin(lc / lam)
    minima = (ModeAngles(theta1, phi_star), ModeAngles(math.pi / 2 - theta1, phi_star))
    return MeanFieldSolution(Phase.DEGENERATE, lc, minima, phi_star,
                             -(lam + lc * lc / (2.0 * lam)))


def _grad(theta, phi, gamma, lam):
    s2, c2 = math.sin(2 * theta), math.cos(2 * theta)
    h = math.cos(phi) + gamma * math.sin(phi)
    d_theta = -2.0 * c2 * (h - lam * s2)
    d_phi = -s2 * (gamma * math.cos(phi) - math.sin(phi))
    return d_theta, d_phi


def _line_min(func, dfunc, lo, hi, x0, tol=1e-15):
    """Minimize a smooth 1-d function on [lo, hi] near x0.

    Bracket the local minimum by the sign of the derivative, then bisect on
    the derivative; fall back to the endpoint if the derivative never flips.
    """
    step = (hi - lo) / 200.0
    a = max(lo, x0 - step)
    b = min(hi, x0 + step)
    while a > lo and dfunc(a) > 0:
        a = max(lo, a - step)
    while b < hi and dfunc(b) < 0:
        b = min(hi, b + step)
    da, db = dfunc(a), dfunc(b)
    if da >= 0 or db <= 0:
        return min((a, b, x0), key=func)
    for _ in range(200):
        mid = 0.5 * (a + b)
        if b - a <= tol * max(1.0, abs(mid)):
            break
        if dfunc(mid) > 0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def numerical_minima(params: ModelParams, n_theta: int = 401, n_phi: int = 801,
                     sweeps: int = 200) -> list[tuple[ModeAngles, float]]:
    """Brute-force minimizer used to check the closed forms.

    A dense grid search over the angle domain picks a starting point in each
    half theta < pi/4 and theta >= pi/4; coordinate descent then refines each
    start, minimizing along theta and phi alternately.  Returns the refined
    (angles, energy) pairs sorted by theta, duplicates removed.
    """
    g, lam = params.gamma, params.lam
    thetas = np.linspace(0.0, math.pi / 2, n_theta)
    phis = np.linspace(0.0, TWO_PI, n_phi, endpoint=False)
    grid = _energy(thetas[:, None], phis[None, :], g, lam)
    half = n_theta // 2
    starts = []
    for rows in (slice(0, half), slice(half, n_theta)):
        sub = grid[rows]
        i, j = np.unravel_index(np.argmin(sub), sub.shape)
        starts.append((thetas[rows][i], phis[j]))

    found = []
    for theta, phi in starts:
        for _ in range(sweeps):
            old = (theta, phi)
            theta = _line_min(lambda t: _energy(t, phi, g, lam),
                              lambda t: _grad(t, phi, g, lam)[0],
                              0.0, math.pi / 2, theta)
            # phi is periodic: search one period centred on the current value
            phi = _line_min(lambda f: _energy(theta, f, g, lam),
                            lambda f: _grad(theta, f, g, lam)[1],
                            phi - math.pi, phi + math.pi, phi)
            phi = _wrap(phi)
            if abs(theta - old[0]) < 1e-15 and abs(phi - old[1]) < 1e-15:
                break
        found.append((ModeAngles(theta, phi), float(_energy(theta, phi, g, lam))))

    found.sort(key=lambda item: item[0].theta)
    unique = [found[0]]
    for item in found[1:]:
        if abs(item[0].theta - unique[-1][0].theta) > 1e-6:
            unique.append(item)
    return unique
