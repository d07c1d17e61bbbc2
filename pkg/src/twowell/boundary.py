"""Geometry of the equilibrium region in the (lambda, mu) plane.

The grand partition function converges where the maximum F* of the saddle
landscape is negative:

    case 1 (lambda < lambda_c):   F* = lambda/2 + lambda_c + mu
    case 2 (lambda >= lambda_c):  F* = lambda + lambda_c^2/(2 lambda) + mu

The divergence curve F* = 0 has a corner (the triple point) at
(lambda_c, -3/2 lambda_c).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParameters, NoBoundary
from .meanfield import critical_lambda

ON_BOUNDARY_TOL = 1e-12
TRIPLE_TOL = 1e-12


class RegionCase(enum.Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    NON_EQUILIBRIUM = "non-equilibrium"
    ON_BOUNDARY = "on-boundary"

    @property
    def is_equilibrium(self) -> bool:
        return self in (RegionCase.CASE1, RegionCase.CASE2)


@dataclass(frozen=True)
class Region:
    label: RegionCase
    f_star: float


@dataclass(frozen=True)
class BoundaryPoint:
    mu_d: float
    lambda_d: float
    kappa: float
    alpha: float
    case_label: RegionCase
    is_triple_point: bool
    gamma: float

    @property
    def lambda_c(self) -> float:
        return critical_lambda(self.gamma)


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Per-particle ratios E/M, I/M, J/M, W/M close to a divergence point."""

    e_coeff: float
    i_coeff: float
    j_coeff: float
    w_coeff: float


def f_star(lam: float, mu: float, gamma: float) -> float:
    """Global maximum of the saddle landscape F(x, y)."""
    lc = critical_lambda(gamma)
    if lam < lc:
        return 0.5 * lam + lc + mu
    return lam + lc * lc / (2.0 * lam) + mu


def classify(lam: float, mu: float, gamma: float) -> Region:
    """Which convergence case (if any) the point (lambda, mu) belongs to."""
    if not lam >= 0:
        raise InvalidParameters(f"lambda must be >= 0, got {lam!r}")
    lc = critical_lambda(gamma)
    fs = f_star(lam, mu, gamma)
    if abs(fs) <= ON_BOUNDARY_TOL:
        return Region(RegionCase.ON_BOUNDARY, fs)
    if lam < min(-2.0 * (mu + lc), lc):
        return Region(RegionCase.CASE1, fs)
    if mu / lc < -1.5 and lc <= lam < 0.5 * (-mu + math.sqrt(mu * mu - 2.0 * lc * lc)):
        return Region(RegionCase.CASE2, fs)
    return Region(RegionCase.NON_EQUILIBRIUM, fs)


def triple_point(gamma: float) -> tuple[float, float]:
    lc = critical_lambda(gamma)
    return lc, -1.5 * lc


def kappa(lam: float, lambda_d: float, gamma: float) -> float:
    """Slope factor of the divergence bracket."""
    lc = critical_lambda(gamma)
    if lambda_d <= lc:
        return 0.5
    return 1.0 - lc * lc / (2.0 * lam * lambda_d)


def mu_divergence(lam: float, gamma: float) -> float:
    """Chemical potential at which F* vanishes for fixed lambda."""
    lc = critical_lambda(gamma)
    if lam < lc:
        return -(lc + 0.5 * lam)
    return -(lam + lc * lc / (2.0 * lam))


def divergence_lambda(mu_d: float, gamma: float) -> BoundaryPoint:
    """Point of the divergence curve at chemical potential ``mu_d``."""
    lc = critical_lambda(gamma)
    if mu_d >= -lc:
        raise NoBoundary(f"no divergence point for mu_D={mu_d!r} >= -lambda_c={-lc!r}")
    triple = abs(mu_d + 1.5 * lc) <= TRIPLE_TOL * max(1.0, lc)
    if triple:
        lambda_d = lc
    elif mu_d >= -1.5 * lc:
        lambda_d = -2.0 * (lc + mu_d)
    else:
        lambda_d = 0.5 * (-mu_d + math.sqrt(mu_d * mu_d - 2.0 * lc * lc))
    label = RegionCase.CASE1 if (triple or mu_d > -1.5 * lc) else RegionCase.CASE2
    return BoundaryPoint(
        mu_d=mu_d,
        lambda_d=lambda_d,
        kappa=kappa(lambda_d, lambda_d, gamma),
        alpha=1.25 if triple else 1.0,
        case_label=label,
        is_triple_point=triple,
        gamma=gamma,
    )


def dlambda_d_dlambda_c(bp: BoundaryPoint) -> float:
    """Derivative of lambda_D with respect to lambda_c at fixed mu_D."""
    lc = bp.lambda_c
    if bp.lambda_d <= lc:
        return -2.0
    return -lc / math.sqrt(bp.mu_d ** 2 - 2.0 * lc * lc)


def asymptotic_coefficients(bp: BoundaryPoint, gamma: float | None = None) -> AsymptoticCoefficients:
    """Closed-form near-divergence ratios of energy, interaction, current, hop."""
    g = bp.gamma if gamma is None else gamma
    lc = critical_lambda(g)
    ld = bp.lambda_d
    if ld <= lc:
        return AsymptoticCoefficients(-lc - 0.5 * ld, 0.5, -g / lc, -1.0 / lc)
    return AsymptoticCoefficients(-ld - lc * lc / (2.0 * ld), 1.0 - lc * lc / (2.0 * ld * ld),
                                  -g / ld, -1.0 / ld)


def leading_term_coefficients(bp: BoundaryPoint) -> AsymptoticCoefficients:
    """The same ratios assembled from kappa and d(lambda_D)/d(lambda_c).

    Independent route to :func:`asymptotic_coefficients`; the two agree on
    both branches of the curve.
    """
    g = bp.gamma
    lc = bp.lambda_c
    k = bp.kappa
    dld = dlambda_d_dlambda_c(bp)
    return AsymptoticCoefficients(
        e_coeff=bp.mu_d,
        i_coeff=k,
        j_coeff=g * k / lc * dld,
        w_coeff=bp.mu_d + k * (bp.lambda_d - g * g / lc * dld),
    )


def bracket(lam: float, mu: float, bp: BoundaryPoint) -> float:
    """(lambda_D - lambda) kappa(lambda) + mu_D - mu, the divergence distance."""
    return (bp.lambda_d - lam) * kappa(lam, bp.lambda_d, bp.gamma) + bp.mu_d - mu
