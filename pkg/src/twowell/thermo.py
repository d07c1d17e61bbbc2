"""Grand-canonical sums over particle-number sectors.

    Xi = 1 + sum_{M>=1} sum_j exp(beta mu M - beta E_j^M)

Every sum runs in log space, in ascending M and ascending level order, so
results are reproducible bit for bit.  Sector spectra do not depend on mu
and are cached per (gamma, lambda, beta); sweeps in mu reuse them.

The sum stops once the terms decay geometrically and the bound on the
remaining tail of Xi (and of every observable mean) drops below ``tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .boundary import classify
from .errors import DegenerateDirection, DivergentParameters, InvalidParameters, TruncationOverflow
from .meanfield import ModeAngles, TWO_PI
from .model import ModelParams
from .sectors import SectorCache, sector_cache

DEFAULT_CAP = 20000
RATIO_MEMORY = 16


@dataclass(frozen=True)
class BathParams:
    beta: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameters(f"beta must be finite and > 0, got {self.beta!r}")
        if not math.isfinite(self.mu):
            raise InvalidParameters(f"mu must be finite, got {self.mu!r}")


@dataclass(frozen=True)
class XiResult:
    log_xi: float
    m_ax: int
    tail_estimate: float


@dataclass(frozen=True)
class ThermoObservables:
    """Ensemble averages; ``current`` is J and ``hop`` is W."""

    m_mean: float
    energy: float
    interaction: float
    current: float
    hop: float
    imbalance: float
    log_xi: float = 0.0
    m_ax: int = 0


@dataclass(frozen=True)
class ModeOccupation:
    theta_max: float
    phi_max: float
    n_max: float
    n: float
    n_perp: float
    t: float
    degenerate: bool = False


class _SectorTable:
    """mu-independent per-sector sums attached to one SectorCache.

    For each M: log Z_M (levels weighted by exp(-beta E)), the sector means
    of E, I, S and the imbalance, and the log of the discarded-weight bound.
    """

    def __init__(self, cache: SectorCache):
        self.cache = cache
        self.log_z: list[float] = []
        self.means: list[tuple[float, float, float, float]] = []
        self.log_discard: list[float] = []

    def extend(self, M: int):
        beta = self.cache.beta
        while len(self.log_z) < M:
            st = self.cache.get(len(self.log_z) + 1)
            logw = -beta * st.eps + np.log(st.multiplicity)
            lz = float(logsumexp(logw))
            p = np.exp(logw - lz)
            self.means.append((
                float(st.shift + p @ st.eps),
                float(p @ st.interaction),
                float(p @ st.hop_s),
                float(p @ st.imbalance),
            ))
            self.log_z.append(lz - beta * st.shift)
            self.log_discard.append(st.log_discard - beta * st.shift)


def _table(params: ModelParams, beta: float, **kw) -> _SectorTable:
    cache = sector_cache(params, beta, **kw)
    table = getattr(cache, "_table", None)
    if table is None:
        table = _SectorTable(cache)
        cache._table = table
    return table


def _require_equilibrium(params: ModelParams, bath: BathParams):
    region = classify(params.lam, bath.mu, params.gamma)
    if not region.label.is_equilibrium:
        raise DivergentParameters(
            f"(lambda={params.lam!r}, mu={bath.mu!r}, gamma={params.gamma!r}) is "
            f"{region.label.value} (F* = {region.f_star:.6g}); Xi diverges")


def _observable_scale(params: ModelParams) -> float:
    # |E|/M, I/M and |S|/M are all bounded by this
    return 1.0 + params.lam + params.lambda_c


def _sum_sectors(params: ModelParams, bath: BathParams, tol: float, m_cap: int,
                 m_min: int = 0, **kw):
    """Log terms of sectors 1..m_ax and the tail estimate."""
    if not tol > 0:
        raise InvalidParameters(f"tol must be > 0, got {tol!r}")
    _require_equilibrium(params, bath)
    table = _table(params, bath.beta, **kw)
    bmu = bath.beta * bath.mu
    scale = _observable_scale(params)

    log_terms: list[float] = []
    ratios: list[float] = []
    log_xi = 0.0                       # log of 1 + terms so far
    M = 0
    while True:
        M += 1
        if M > m_cap:
            raise TruncationOverflow(
                f"grand-canonical sum needs more than {m_cap} sectors to reach tol={tol:g} "
                f"at (gamma={params.gamma!r}, lambda={params.lam!r}, beta={bath.beta!r}, "
                f"mu={bath.mu!r})")
        table.extend(M)
        lt = bmu * M + table.log_z[M - 1]
        log_terms.append(lt)
        log_xi = float(np.logaddexp(log_xi, lt))
        if M >= 2:
            ratios.append(lt - log_terms[-2])
        if len(ratios) < RATIO_MEMORY:
            continue
        log_r = max(ratios[-RATIO_MEMORY:])
        if log_r >= 0:
            continue
        r = math.exp(log_r)
        geo = r / (1.0 - r)
        t = math.exp(lt)
        tail_xi = t * geo
        # tail of sum_M M t_M relative to Xi bounds the tail of every mean
        tail_mean = t * (M * geo + geo / (1.0 - r)) / math.exp(log_xi) * scale
        if tail_xi <= tol and tail_mean <= tol and M >= m_min:
            break
    discard = float(np.exp(logsumexp(np.array(table.log_discard[:M]) + bmu * np.arange(1, M + 1))))
    return table, np.array(log_terms), log_xi, tail_xi + discard


def log_grand_partition(params: ModelParams, bath: BathParams, tol: float = 1e-7,
                        m_cap: int = DEFAULT_CAP, m_min: int = 0,
                        **sector_options) -> XiResult:
    """log Xi by direct summation over sectors.

    At least ``m_min`` sectors are summed even if the tail bound is met
    earlier.  ``sector_options`` go to :class:`twowell.sectors.SectorCache`.
    """
    _, log_terms, log_xi, tail = _sum_sectors(params, bath, tol, m_cap, m_min,
                                              **sector_options)
    return XiResult(log_xi=log_xi, m_ax=int(log_terms.size), tail_estimate=tail)


def thermal_observables(params: ModelParams, bath: BathParams, tol: float = 1e-7,
                        m_cap: int = DEFAULT_CAP, **sector_options) -> ThermoObservables:
    """Ensemble averages as Boltzmann-weighted sums over sector eigenstates."""
    table, log_terms, log_xi, _ = _sum_sectors(params, bath, tol, m_cap, **sector_options)
    n = log_terms.size
    # weights relative to Xi; the empty sector carries exp(-log_xi) and no observables
    w = np.exp(log_terms - log_xi)
    means = np.array(table.means[:n])
    m = np.arange(1, n + 1, dtype=float)
    m_mean = float(w @ m)
    energy = float(w @ means[:, 0])
    interaction = float(w @ means[:, 1])
    s = float(w @ means[:, 2])
    imbalance = float(w @ means[:, 3])
    lc = params.lambda_c
    return ThermoObservables(
        m_mean=m_mean,
        energy=energy,
        interaction=interaction,
        current=2.0 * s * params.gamma / lc,
        hop=2.0 * s / lc,
        imbalance=imbalance,
        log_xi=log_xi,
        m_ax=n,
    )


def mode_occupation(obs: ThermoObservables, angles: ModeAngles) -> float:
    """Mean occupation of b^+ = cos(theta) a1^+ - exp(i phi) sin(theta) a2^+."""
    return (0.5 * obs.m_mean
            - 0.5 * math.sin(2.0 * angles.theta)
            * (obs.hop * math.cos(angles.phi) + obs.current * math.sin(angles.phi)))


def perpendicular(angles: ModeAngles) -> ModeAngles:
    """Angles of the mode orthogonal to ``angles``."""
    return ModeAngles(math.pi / 2 - angles.theta, math.fmod(angles.phi + math.pi, TWO_PI))


def dominant_mode(obs: ThermoObservables, strict: bool = False) -> ModeOccupation:
    """The most occupied single-particle mode and its occupation fractions.

    When W = J = 0 every phase is optimal; phi = 0 is reported with
    ``degenerate`` set, or DegenerateDirection is raised if ``strict``.
    """
    if not obs.m_mean > 0:
        raise InvalidParameters(f"dominant mode needs m_mean > 0, got {obs.m_mean!r}")
    W, J = obs.hop, obs.current
    degenerate = W == 0.0 and J == 0.0
    if degenerate and strict:
        raise DegenerateDirection("W = J = 0: every phase maximizes the occupation")
    phi = 0.0 if degenerate else math.atan2(-J, -W) % TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    n_max = 0.5 * obs.m_mean + 0.5 * math.hypot(W, J)
    n = n_max / obs.m_mean
    return ModeOccupation(
        theta_max=math.pi / 4,
        phi_max=phi,
        n_max=n_max,
        n=n,
        n_perp=1.0 - n,
        t=J / W if W != 0.0 else math.nan,
        degenerate=degenerate,
    )


def compressibility(params: ModelParams, bath: BathParams, tol: float = 1e-7,
                    step: float = 1e-4, m_cap: int = DEFAULT_CAP, **sector_options) -> float:
    """d(m_mean)/d(mu) by a central difference."""
    up = thermal_observables(params, BathParams(bath.beta, bath.mu + step), tol, m_cap,
                             **sector_options)
    down = thermal_observables(params, BathParams(bath.beta, bath.mu - step), tol, m_cap,
                               **sector_options)
    return (up.m_mean - down.m_mean) / (2.0 * step)
