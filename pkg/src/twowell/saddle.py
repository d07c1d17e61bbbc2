"""Saddle-point approximation of the grand partition function.

After a Hubbard-Stratonovich decoupling of the interaction the sector sum
collapses to a double integral over auxiliary fields (x, y):

    Xi ~ 1 + beta/(4 pi) * Int dx dy [ csch^2(beta F / 2) / (1 - exp(-beta s))
                                     + csch^2(beta G / 2) / (1 - exp(+beta s)) ]

with s(y) = 2 sqrt(2 lambda y^2 + lambda_c^2), G = F - s and

    F(x, y) = -x^2 - y^2 + sqrt(2 lambda) x + sqrt(2 lambda y^2 + lambda_c^2) + mu.

Xi is finite while max F = F* < 0.  Near F* = 0 the csch^2 peak behaves as
(F* - a_x^2 dx^2 - a_y^2 dy^2)^-2, giving Xi ~ |F*|^-1, or with a quartic y
direction (at the triple point) Xi ~ |F*|^-5/4.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .boundary import RegionCase, classify
from .errors import DivergentParameters, QuadratureFailure
from .model import ModelParams
from .thermo import BathParams

MAX_DEPTH = 20
EDGE_RATIO = 1e-12
NODE_TOL = 1e-8
MAX_NODES = 256
MAX_DOMAIN_DOUBLINGS = 12


class Subcase(enum.Enum):
    S1 = "S1"    # single maximum, quadratic in y
    S2 = "S2"    # single maximum, quartic in y (near the triple point)
    S3 = "S3"    # two maxima, quadratic in y
    S4 = "S4"    # two maxima, quartic in y (near the triple point)


@dataclass(frozen=True)
class SaddleLandscape:
    f: Callable
    surd: Callable
    g: Callable
    maxima: tuple[tuple[float, float], ...]
    f_star: float
    eps_plus: Callable
    eps_minus: Callable


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Curvatures of F at its maximum: F ~ F* - a_x^2 dx^2 - a_y^2 dy^2 - g_y^2 dy^4."""

    alpha_x_sq: float
    alpha_y_sq: float
    gamma_y_sq: float
    subcase: Subcase


def landscape(params: ModelParams, mu: float) -> SaddleLandscape:
    lam, lc = params.lam, params.lambda_c
    r2l = math.sqrt(2.0 * lam)

    def root(y):
        return np.sqrt(2.0 * lam * np.square(y) + lc * lc)

    def f(x, y):
        return -np.square(x) - np.square(y) + r2l * x + root(y) + mu

    def surd(y):
        return 2.0 * root(y)

    def g(x, y):
        return f(x, y) - surd(y)

    x_star = math.sqrt(lam / 2.0)
    if lam <= lc:
        maxima = ((x_star, 0.0),)
    else:
        y_star = math.sqrt((lam * lam - lc * lc) / (2.0 * lam))
        maxima = ((x_star, -y_star), (x_star, y_star))
    f_star = float(f(*maxima[0]))
    return SaddleLandscape(
        f=f, surd=surd, g=g, maxima=maxima, f_star=f_star,
        eps_plus=lambda y: mu + root(y),
        eps_minus=lambda y: mu - root(y),
    )


def expansion_coefficients(params: ModelParams, mu: float) -> ExpansionCoefficients:
    """Leading curvatures of F at its maximum and the matching subcase.

    The y direction is treated as quartic once the quadratic term is
    negligible across the peak width, i.e. a_y^2 <= g_y sqrt(|F*|).
    """
    lam, lc = params.lam, params.lambda_c
    fs = landscape(params, mu).f_star
    if lam <= lc:
        a_y = 1.0 - lam / lc
        g_y = lam * lam / (2.0 * lc ** 3)
        quadratic, quartic = Subcase.S1, Subcase.S2
    else:
        a_y = 1.0 - (lc / lam) ** 2
        g_y = lc * lc * (lc * lc - 4.0 * (lam * lam - lc * lc)) / (2.0 * lam ** 5)
        quadratic, quartic = Subcase.S3, Subcase.S4
    near_triple = g_y > 0 and a_y <= math.sqrt(g_y) * math.sqrt(abs(fs))
    return ExpansionCoefficients(1.0, a_y, g_y, quartic if near_triple else quadratic)


def quadratic_peak_integral(alpha_x: float, alpha_y: float, f_star: float) -> float:
    """Int dx dy (F* - a_x^2 x^2 - a_y^2 y^2)^-2 over the plane, F* < 0."""
    return -math.pi / (abs(alpha_x) * abs(alpha_y) * f_star)


def quartic_constants() -> tuple[float, float]:
    """Int_0^pi dtheta / sqrt(sin theta) and Int_0^inf sqrt(t) / (1 + t^2)^2 dt."""
    # split at the integrable endpoint singularities
    ang = 2.0 * quad(lambda th: 1.0 / math.sqrt(math.sin(th)), 0.0, math.pi / 2,
                     epsabs=0.0, epsrel=1e-13, limit=200)[0]
    rad = sum(quad(lambda t: math.sqrt(t) / (1.0 + t * t) ** 2, a, b,
                   epsabs=0.0, epsrel=1e-13, limit=200)[0]
              for a, b in ((0.0, 1.0), (1.0, math.inf)))
    return ang, rad


def quartic_peak_integral(alpha_x: float, gamma_y_sq: float, f_star: float) -> float:
    """Int dx dy (F* - a_x^2 x^2 - g_y^2 y^4)^-2 over the plane, F* < 0."""
    ang, rad = quartic_constants()
    return ang * rad / (abs(alpha_x) * gamma_y_sq ** 0.25 * (-f_star) ** 1.25)


# -- quadrature ------------------------------------------------------------

def _csch2_half(z):
    """csch^2(z/2) for z < 0, written to avoid overflow: 4 e^z / (e^z - 1)^2."""
    return 4.0 * np.exp(z) / np.square(np.expm1(z))


def _integrand(land: SaddleLandscape, beta: float):
    def h(x, y):
        s = land.surd(y)
        bf = beta * land.f(x, y)
        bg = bf - beta * s
        # 1/(1 - e^{beta s}) = -e^{-beta s}/(1 - e^{-beta s})
        tail = -np.exp(-beta * s) / -np.expm1(-beta * s)
        return _csch2_half(bf) / -np.expm1(-beta * s) + _csch2_half(bg) * tail
    return h


def _breakpoints(lo: float, hi: float, centres, R: float, depth: int) -> np.ndarray:
    pts = {lo, hi}
    for c in centres:
        pts.add(c)
        for k in range(1, depth + 1):
            for p in (c - R * 2.0 ** -k, c + R * 2.0 ** -k):
                if lo < p < hi:
                    pts.add(p)
    return np.array(sorted(pts))


def _composite_nodes(breaks: np.ndarray, n: int):
    t, w = np.polynomial.legendre.leggauss(n)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    return (half * t + 0.5 * (a + b)).ravel(), (half * w).ravel()


def _integrate(h, xb, yb, n):
    x, wx = _composite_nodes(xb, n)
    y, wy = _composite_nodes(yb, n)
    total = 0.0
    # row blocks keep memory bounded
    for i in range(0, x.size, 256):
        vals = h(x[i:i + 256, None], y[None, :])
        total += float(wx[i:i + 256] @ vals @ wy)
    return total


def _domain_integral(params: ModelParams, bath: BathParams) -> float:
    land = landscape(params, bath.mu)
    h = _integrand(land, bath.beta)
    xs = sorted({m[0] for m in land.maxima})
    ys = sorted({m[1] for m in land.maxima})
    x0 = xs[0]
    peak = float(h(np.array(x0), np.array(ys[-1])))
    depth = min(MAX_DEPTH, max(1, math.ceil(math.log2(1.0 / abs(land.f_star)))) + 4)

    R = 4.0 + 2.0 * max(abs(y) for y in ys)
    for _ in range(MAX_DOMAIN_DOUBLINGS):
        edges = np.array([h(np.array(x0 + R), np.array(0.0)),
                          h(np.array(x0 - R), np.array(0.0)),
                          h(np.array(x0), np.array(R)),
                          h(np.array(x0), np.array(-R))], dtype=float)
        if np.max(np.abs(edges)) < EDGE_RATIO * abs(peak):
            break
        R *= 2.0
    else:
        raise QuadratureFailure(
            f"integrand at the domain edge still exceeds {EDGE_RATIO:g} of its peak "
            f"after {MAX_DOMAIN_DOUBLINGS} doublings (R={R:g})")

    xb = _breakpoints(x0 - R, x0 + R, xs, R, depth)
    yb = _breakpoints(-R, R, ys, R, depth)
    n = 8
    prev = _integrate(h, xb, yb, n)
    while n < MAX_NODES:
        n *= 2
        cur = _integrate(h, xb, yb, n)
        if abs(cur - prev) <= NODE_TOL * abs(cur):
            return cur
        prev = cur
    raise QuadratureFailure(f"Gauss-Legendre rule did not settle to {NODE_TOL:g} "
                            f"relative by {MAX_NODES} nodes per panel")


def xi_quadrature(params: ModelParams, bath: BathParams) -> float:
    """log of the saddle-point approximation of Xi."""
    region = classify(params.lam, bath.mu, params.gamma)
    if region.label not in (RegionCase.CASE1, RegionCase.CASE2):
        raise DivergentParameters(
            f"(lambda={params.lam!r}, mu={bath.mu!r}) is {region.label.value}; "
            f"the saddle integral diverges")
    integral = _domain_integral(params, bath)
    return math.log1p(bath.beta / (4.0 * math.pi) * integral)
