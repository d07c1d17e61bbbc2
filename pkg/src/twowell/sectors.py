"""Low-lying states of large sectors for the grand-canonical sums.

Near the divergence curve the sums need sectors with M of order 10^4, far
beyond what a full diagonalization of every sector allows.  Only states
within a Boltzmann cutoff of each sector's ground state matter, and those
are localized once the basis is rotated to the mean-field condensate.

Writing the gauged Hamiltonian with Schwinger spin operators,

    H = 2 lambda_c Sx - lambda M / 2 - (2 lambda / M) Sz^2,

a rotation about the y axis by psi puts the quantization axis on the
condensate direction (-sin psi, 0, cos psi).  In the rotated Dicke basis
|n> (n = number of particles outside the condensate mode) the matrix is
pentadiagonal and its low-lying eigenvectors live at small n; in the gapped
phase (psi = pi/2) it splits further into two tridiagonal parity chains.
Sectors are diagonalized on a window n <= K, grown until every retained
eigenpair has a full-space residual below ``res_tol``.

Two frames are used:

* ``symmetric``: psi = pi/2, exact for any lambda; both lobes of the
  degenerate phase sit inside the window.
* ``lobe``: psi = arcsin(lambda_c / lambda) for lambda > lambda_c.  Only
  one lobe is resolved and each level is counted twice.  A sector switches
  to it only after the symmetric frame has confirmed, level by level, that
  the doubling holds to ``switch_tol``.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig_banded, eigh_tridiagonal

from .model import ModelParams

SYMMETRIC = "symmetric"
LOBE = "lobe"


@dataclass(frozen=True)
class SectorStates:
    """Retained eigenstates of one sector.

    Energies are ``shift + eps``.  Per-state observables: ``interaction`` is
    <(m1^2 + m2^2)/M>, ``hop_s`` the real gauged expectation <a1^+ a2>
    (so W = 2 hop_s / lambda_c and J = 2 gamma hop_s / lambda_c) and
    ``imbalance`` <m1 - m2>.  ``log_discard`` bounds, relative to
    exp(-beta*shift), the total weight of the states that were dropped
    (``-inf`` when none were).
    """

    M: int
    shift: float
    eps: np.ndarray
    multiplicity: np.ndarray
    interaction: np.ndarray
    hop_s: np.ndarray
    imbalance: np.ndarray
    log_discard: float
    frame: str
    window: int
    max_residual: float

    @property
    def energies(self) -> np.ndarray:
        return self.shift + self.eps


def _x_elements(M: int, K: int) -> np.ndarray:
    """x[n] = <n-1|X|n> = sqrt(n (M - n + 1)) / 2 for n = 0..K+2 (x[0] = 0)."""
    n = np.arange(K + 3, dtype=float)
    x = 0.5 * np.sqrt(np.clip(n * (M - n + 1.0), 0.0, None))
    x[0] = 0.0
    return x


def frame_coefficients(params: ModelParams, M: int, psi: float) -> dict:
    """Operator coefficients of H - shift in the frame rotated by psi.

    H - shift = aN N + aNN N^2 + aX X + aXX X^2 + aXN (XN + NX), with X the
    rotated transverse spin component and N the rotated excitation number.
    """
    lam, lc = params.lam, params.lambda_c
    s, c = math.sin(psi), math.cos(psi)
    if abs(c) < 1e-15:
        c = 0.0
    return dict(
        shift=-M * (lc * s + 0.5 * lam + 0.5 * lam * c * c),
        aN=2.0 * lc * s + 2.0 * lam * c * c,
        aNN=-(2.0 * lam / M) * c * c,
        aX=2.0 * c * (lc - lam * s),
        aXX=-(2.0 * lam / M) * s * s,
        aXN=(2.0 * lam / M) * s * c,
    )


def frame_bands(params: ModelParams, M: int, psi: float, K: int):
    """Diagonal, first and second super-diagonals on n = 0..K+2.

    Entries are those of the full (M+1)-dimensional matrix, so the leading
    (K+1) block is the exact restriction of H to the window.
    """
    co = frame_coefficients(params, M, psi)
    x = _x_elements(M, K)
    n = np.arange(K + 3, dtype=float)
    x_next = np.append(x[1:], 0.0)                   # x[n+1]
    x_next2 = np.append(x[2:], [0.0, 0.0])           # x[n+2]
    valid = n <= M
    diag = co["aN"] * n + co["aNN"] * n * n + co["aXX"] * (x * x + x_next * x_next)
    band1 = co["aX"] * x_next + co["aXN"] * x_next * (2.0 * n + 1.0)
    band2 = co["aXX"] * x_next * x_next2
    diag = np.where(valid, diag, 0.0)
    band1 = np.where(n + 1 <= M, band1, 0.0)
    band2 = np.where(n + 2 <= M, band2, 0.0)
    return co, diag, band1, band2


def frame_matrix(params: ModelParams, M: int, psi: float) -> tuple[float, np.ndarray]:
    """Dense rotated-frame matrix of a whole sector (testing aid)."""
    co, d, b1, b2 = frame_bands(params, M, psi, M)
    H = np.diag(d[:M + 1]) + np.diag(b1[:M], 1) + np.diag(b1[:M], -1)
    if M >= 2:
        H += np.diag(b2[:M - 1], 2) + np.diag(b2[:M - 1], -2)
    return co["shift"], H


class _Window:
    """Eigen-decomposition of one frame restricted to n <= K."""

    def __init__(self, params, M, psi, K, parity_split, upper=None):
        """Eigenpairs with eigenvalue <= ``upper`` (all of them if None)."""
        self.M, self.K, self.psi = M, K, psi
        co, d, b1, b2 = frame_bands(params, M, psi, K)
        self.co, self.d, self.b1, self.b2 = co, d, b1, b2
        self.x = _x_elements(M, K)
        kw = {} if upper is None else dict(select="v", select_range=(-np.inf, upper))
        blocks = []
        if parity_split:
            for start in (0, 1):
                idx = np.arange(start, K + 1, 2)
                if idx.size == 1:
                    keep = upper is None or d[idx[0]] <= upper
                    w = d[idx].copy() if keep else np.empty(0)
                    blocks.append((idx, w, np.ones((1, w.size))))
                elif idx.size:
                    w, v = eigh_tridiagonal(d[idx], b2[idx[:-1]], **kw)
                    blocks.append((idx, w, v))
        else:
            ab = np.zeros((3, K + 1))
            ab[2] = d[:K + 1]
            ab[1, 1:] = b1[:K]
            if K >= 2:
                ab[0, 2:] = b2[:K - 1]
            w, v = eig_banded(ab, lower=False, **kw)
            blocks.append((np.arange(K + 1), w, v))
        self.blocks = blocks

    def lowest(self) -> float:
        return min((float(w[0]) for _, w, _ in self.blocks if w.size), default=math.inf)

    def residuals(self, idx, v):
        """Norm of (H - E) v outside the window for each column of v."""
        K, M = self.K, self.M
        if K >= M:
            return np.zeros(v.shape[1])
        full = np.zeros((K + 1, v.shape[1]))
        full[idx] = v
        r1 = self.b1[K] * full[K] + (self.b2[K - 1] * full[K - 1] if K >= 1 else 0.0)
        r2 = self.b2[K] * full[K] if K + 2 <= M else 0.0
        return np.sqrt(r1 * r1 + r2 * r2)

    def observables(self, idx, v):
        """<N>, <N^2>, <X>, <X^2>, <XN + NX> for each column of v."""
        K = self.K
        full = np.zeros((K + 1, v.shape[1]))
        full[idx] = v
        n = np.arange(K + 1, dtype=float)[:, None]
        x = self.x
        p = full * full
        N1 = (n * p).sum(0)
        N2 = (n * n * p).sum(0)
        xx_diag = (x[:K + 1] ** 2 + x[1:K + 2] ** 2)[:, None]
        X2 = (xx_diag * p).sum(0)
        X1 = np.zeros(v.shape[1])
        XN = np.zeros(v.shape[1])
        if K >= 1:
            cross1 = full[:-1] * full[1:]
            xs = x[1:K + 1][:, None]
            X1 = 2.0 * (xs * cross1).sum(0)
            XN = 2.0 * (xs * (2.0 * n[:-1] + 1.0) * cross1).sum(0)
        if K >= 2:
            cross2 = full[:-2] * full[2:]
            X2 = X2 + 2.0 * ((x[1:K] * x[2:K + 1])[:, None] * cross2).sum(0)
        return N1, N2, X1, X2, XN


def _physical_observables(M, psi, N1, N2, X1, X2, XN):
    s, c = math.sin(psi), math.cos(psi)
    if abs(c) < 1e-15:
        c = 0.0
    Z1 = 0.5 * M - N1
    hop_s = c * X1 - s * Z1
    sz = s * X1 + c * Z1
    sz2 = (s * s * X2 + c * c * (0.25 * M * M - M * N1 + N2)
           + s * c * (M * X1 - XN))
    interaction = 0.5 * M + (2.0 / M) * sz2
    return interaction, hop_s, 2.0 * sz


class SectorCache:
    """Lazily computed low-lying states of sectors M = 1, 2, ... for one model.

    Sectors are always generated in ascending order, so results do not depend
    on how far earlier callers extended the cache.

    Parameters
    ----------
    params : ModelParams
    beta : float
        Inverse temperature; sets the energy cutoff of retained states.
    state_tol : float
        Discarded states weigh at most ``state_tol`` times the sector's
        ground-state weight in total.
    res_tol : float
        Largest accepted full-space residual of a retained eigenpair.
    exact_upto : int
        Sectors up to this size keep their complete spectrum.
    """

    def __init__(self, params: ModelParams, beta: float, state_tol: float = 1e-15,
                 res_tol: float = 1e-11, switch_tol: float = 1e-10, exact_upto: int = 48):
        self.params = params
        self.beta = float(beta)
        self.state_tol = state_tol
        self.res_tol = res_tol
        self.switch_tol = switch_tol
        self.exact_upto = exact_upto
        self.sectors: list[SectorStates] = []
        self.frame = SYMMETRIC
        self._K = {SYMMETRIC: 24, LOBE: 24}
        self._eps0: dict = {}
        lam, lc = params.lam, params.lambda_c
        self._lobe_psi = math.asin(lc / lam) if lam > lc else None
        self._barrier = (lam - lc) ** 2 / (2.0 * lam) if lam > lc else 0.0

    def cutoff(self, M: int) -> float:
        return (math.log(M + 1.0) - math.log(self.state_tol)) / self.beta

    def get(self, M: int) -> SectorStates:
        while len(self.sectors) < M:
            self.sectors.append(self._compute(len(self.sectors) + 1))
        return self.sectors[M - 1]

    def upto(self, M: int) -> list[SectorStates]:
        self.get(M)
        return self.sectors[:M]

    # -- internals ---------------------------------------------------------

    def _solve(self, M, frame, keep_all, limit=None):
        """Grow the window until every kept state has converged.

        Returns None if that needs a window larger than ``limit``.
        """
        psi = math.pi / 2 if frame == SYMMETRIC else self._lobe_psi
        split = frame == SYMMETRIC
        K = M if keep_all else min(M, max(self._K[frame], 24))
        if limit is not None:
            K = min(K, limit)
        cut = self.cutoff(M)
        hint = self._eps0.get(frame)
        while True:
            if keep_all:
                win = _Window(self.params, M, psi, K, split)
            else:
                # the previous sector's ground level predicts this one closely;
                # widen the range if the prediction turns out too low
                upper = (hint + cut + 1.0) if hint is not None else None
                win = _Window(self.params, M, psi, K, split, upper)
                eps0 = win.lowest()
                if upper is None or eps0 + cut > upper:
                    win = _Window(self.params, M, psi, K, split, eps0 + cut)
                hint = None
            eps0 = win.lowest()
            kept = []
            ok = True
            for idx, w, v in win.blocks:
                if not keep_all:
                    # a block filled up to the cutoff may be missing states
                    # just beyond its edge
                    if K < M and w.size >= idx.size:
                        ok = False
                        break
                    sel = w <= eps0 + cut
                    w, v = w[sel], v[:, sel]
                res = win.residuals(idx, v)
                if res.size and res.max() > self.res_tol:
                    ok = False
                    break
                kept.append((idx, w, v, res))
            if ok or K >= M:
                break
            if limit is not None and K >= limit:
                return None
            K = min(M, int(1.5 * K) + 16)
            if limit is not None:
                K = min(K, limit)
        if not keep_all:
            self._K[frame] = K
            self._eps0[frame] = eps0
        return win, psi, kept, eps0, K

    def _assemble(self, M, frame, keep_all, limit=None):
        solved = self._solve(M, frame, keep_all, limit)
        if solved is None:
            return None
        win, psi, kept, eps0, K = solved
        eps, inter, hop, imb, res_all = [], [], [], [], []
        for idx, w, v, res in kept:
            N1, N2, X1, X2, XN = win.observables(idx, v)
            i_, h_, m_ = _physical_observables(M, psi, N1, N2, X1, X2, XN)
            eps.append(w)
            inter.append(i_)
            hop.append(h_)
            imb.append(m_)
            res_all.append(res)
        eps = np.concatenate(eps)
        order = np.argsort(eps, kind="stable")
        eps = eps[order]
        inter = np.concatenate(inter)[order]
        hop = np.concatenate(hop)[order]
        imb = np.concatenate(imb)[order]
        mult = np.ones(eps.size)
        if frame == LOBE:
            mult *= 2.0
            imb = np.zeros_like(imb)   # mirror lobe carries the opposite imbalance
        n_kept = int(mult.sum())
        dropped = M + 1 - n_kept
        if dropped > 0:
            log_discard = math.log(dropped) - self.beta * (eps0 + self.cutoff(M))
        else:
            log_discard = -math.inf
        max_res = max((float(r.max()) for r in res_all if r.size), default=0.0)
        return SectorStates(
            M=M, shift=win.co["shift"], eps=eps, multiplicity=mult, interaction=inter,
            hop_s=hop, imbalance=imb, log_discard=log_discard, frame=frame,
            window=K, max_residual=max_res)

    def _compute(self, M: int) -> SectorStates:
        if M <= self.exact_upto:
            return self._assemble(M, SYMMETRIC, keep_all=True)
        if self.frame == LOBE:
            return self._assemble(M, LOBE, keep_all=False)
        sym = self._assemble(M, SYMMETRIC, keep_all=False)
        if self._lobe_psi is not None and M * self._barrier > self.cutoff(M):
            # the lobe window must stop short of the barrier top, where the
            # rotated basis starts to reach the mirror lobe
            barrier_n = int(0.5 * M * (1.0 - math.sin(self._lobe_psi)))
            lobe = self._assemble(M, LOBE, keep_all=False, limit=barrier_n)
            if lobe is not None and self._doubling_holds(lobe, sym):
                self.frame = LOBE
                return lobe
        return sym

    def _doubling_holds(self, lobe, sym):
        a = np.repeat(lobe.energies, 2)
        b = sym.energies
        # levels right at the cutoff may fall on either side of it
        if abs(a.size - b.size) > 2:
            return False
        n = min(a.size, b.size)
        tol = self.switch_tol + 1e-14 * abs(sym.shift)
        return bool(np.max(np.abs(a[:n] - b[:n])) <= tol)


_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 16


def sector_cache(params: ModelParams, beta: float, **kwargs) -> SectorCache:
    """Shared cache keyed by (gamma, lambda, beta, options)."""
    key = (params.gamma, params.lam, float(beta), tuple(sorted(kwargs.items())))
    cache = _CACHE.get(key)
    if cache is None:
        cache = SectorCache(params, beta, **kwargs)
        _CACHE[key] = cache
        while len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    else:
        _CACHE.move_to_end(key)
    return cache


def clear_cache():
    _CACHE.clear()
