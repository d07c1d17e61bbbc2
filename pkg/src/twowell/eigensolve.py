"""Implicit-shift QL eigensolver for real symmetric tridiagonal matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .model import TridiagonalHamiltonian

EPS = np.finfo(float).eps
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SectorSpectrum:
    """Eigen-decomposition of one sector, in the gauged basis.

    ``eigenvectors[:, j]`` belongs to ``eigenvalues[j]``; eigenvalues ascend.
    """

    M: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None


def ql_implicit(diag, offdiag, want_vectors=True, label="matrix"):
    """Eigenpairs of a symmetric tridiagonal matrix by QL with Wilkinson shifts.

    Parameters
    ----------
    diag : array_like, shape (n,)
    offdiag : array_like, shape (n-1,)
        ``offdiag[i]`` couples rows ``i`` and ``i+1``.
    want_vectors : bool
        Accumulate the plane rotations into an orthonormal eigenvector matrix.
    label : str
        Used in the error message on non-convergence.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues, ascending.
    V : ndarray, shape (n, n) or None
        Column ``j`` is the unit eigenvector of ``w[j]``, sign-fixed so its
        largest-magnitude entry is positive.
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    if len(e) != n:
        raise ValueError("offdiag must have exactly len(diag) - 1 entries")
    # rows of zt are the evolving eigenvectors
    zt = np.eye(n) if want_vectors else None
    hypot = math.hypot

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == MAX_SWEEPS:
                raise ConvergenceError(
                    f"QL iteration did not converge for eigenvalue {l} of {label} "
                    f"after {MAX_SWEEPS} sweeps")
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    zi = zt[i]
                    zj = zt[i + 1]
                    tmp = s * zi + c * zj
                    zt[i] = c * zi - s * zj
                    zt[i + 1] = tmp
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    w = np.array(d)
    order = np.argsort(w, kind="stable")
    w = w[order]
    if zt is None:
        return w, None
    V = zt[order].T.copy()
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(n)])
    signs[signs == 0] = 1.0
    return w, V * signs


def eigh_tridiagonal(T: TridiagonalHamiltonian, want_vectors: bool = True) -> SectorSpectrum:
    """Full spectrum of a sector Hamiltonian."""
    p = T.params
    label = f"sector M={T.M} (gamma={p.gamma!r}, lambda={p.lam!r})"
    w, V = ql_implicit(T.diag, T.offdiag, want_vectors=want_vectors, label=label)
    return SectorSpectrum(M=T.M, eigenvalues=w, eigenvectors=V)


def ground_gap(spectrum: SectorSpectrum) -> float:
    """E_1 - E_0 of the sector."""
    w = spectrum.eigenvalues
    return max(float(w[1] - w[0]), 0.0)
