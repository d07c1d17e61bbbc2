"""Two-well boson Hamiltonian on a fixed particle-number sector.

The Hamiltonian is

    H_M = (a1^+ a2 + a2^+ a1) - i*gamma*(a1^+ a2 - a2^+ a1) - (lambda/M)(m1^2 + m2^2)

with the symmetric hopping fixed to one.  In the Fock basis |m1=k, m2=M-k>
it is tridiagonal with complex off-diagonal (1 - i*gamma)*sqrt((k+1)(M-k)).
A diagonal phase change u_k = exp(-i*k*chi), chi = arctan(gamma), turns it
into a real symmetric tridiagonal matrix with off-diagonal
lambda_c*sqrt((k+1)(M-k)), lambda_c = sqrt(1 + gamma^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters

#: Largest sector for which the dense complex oracle is built.
DENSE_MAX_M = 128


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the two-well model; the symmetric hopping is fixed to 1."""

    gamma: float
    lam: float

    def __post_init__(self):
        for name in ("gamma", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameters(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def delta(self) -> float:
        return 1.0

    @property
    def lambda_c(self) -> float:
        return math.hypot(1.0, self.gamma)

    @property
    def gauge_phase(self) -> float:
        return math.atan(self.gamma)


@dataclass(frozen=True)
class FockSector:
    """Basis of the M-particle sector, indexed by the occupation of well 1."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise InvalidParameters(f"sector size must be a positive integer, got {self.M!r}")

    @property
    def dimension(self) -> int:
        return self.M + 1

    def occupations(self) -> tuple[np.ndarray, np.ndarray]:
        m1 = np.arange(self.M + 1)
        return m1, self.M - m1


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Gauge-transformed sector Hamiltonian (real symmetric tridiagonal)."""

    params: ModelParams
    M: int
    diag: np.ndarray
    offdiag: np.ndarray
    gauge_phase: float

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.offdiag, 1)
                + np.diag(self.offdiag, -1))

    def to_complex(self) -> np.ndarray:
        """Undo the gauge: conjugate by diag(exp(-i k chi))."""
        u = np.exp(-1j * np.arange(self.M + 1) * self.gauge_phase)
        return (u[:, None] * self.to_dense()) * u.conj()[None, :]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        if self.M:
            e = self.offdiag if v.ndim == 1 else self.offdiag[:, None]
            out[:-1] += e * v[1:]
            out[1:] += e * v[:-1]
        return out


def _check_sector(M) -> int:
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise InvalidParameters(f"sector size M must be a positive integer, got {M!r}")
    return int(M)


def interaction_diagonal(lam: float, M: int) -> np.ndarray:
    k = np.arange(M + 1, dtype=float)
    return -(lam / M) * (k * k + (M - k) ** 2)


def hopping_amplitudes(M: int) -> np.ndarray:
    """sqrt((k+1)(M-k)) for k = 0..M-1, the matrix elements of a1^+ a2."""
    k = np.arange(M, dtype=float)
    return np.sqrt((k + 1.0) * (M - k))


def build_tridiagonal(params: ModelParams, M: int) -> TridiagonalHamiltonian:
    """Real symmetric tridiagonal form of the M-particle Hamiltonian.

    The empty sector is rejected; it contributes the constant 1 to the grand
    partition function and is handled there.
    """
    M = _check_sector(M)
    return TridiagonalHamiltonian(
        params=params,
        M=M,
        diag=interaction_diagonal(params.lam, M),
        offdiag=params.lambda_c * hopping_amplitudes(M),
        gauge_phase=params.gauge_phase,
    )


def dense_hamiltonian(params: ModelParams, M: int) -> np.ndarray:
    """Dense complex Hermitian matrix of the sector, built without any gauge.

    Intended as a test oracle; limited to M <= 128.
    """
    M = _check_sector(M)
    if M > DENSE_MAX_M:
        raise InvalidParameters(f"dense oracle limited to M <= {DENSE_MAX_M}, got {M}")
    H = np.zeros((M + 1, M + 1), dtype=complex)
    H[np.arange(M + 1), np.arange(M + 1)] = interaction_diagonal(params.lam, M)
    amp = hopping_amplitudes(M)
    for k in range(M):
        # a1^+ a2 |k, M-k> = sqrt((k+1)(M-k)) |k+1, M-k-1>
        H[k + 1, k] = (1.0 - 1j * params.gamma) * amp[k]
        H[k, k + 1] = np.conj(H[k + 1, k])
    return H
