"""Linear mapping matrices and the log-det form of the destination rate."""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy import linalg

from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig
from relaybc.core.errors import NumericError

logger = logging.getLogger(__name__)

POWER_TOL = 1e-12
GRAM_TOL = 1e-10
HERMITIAN_TOL = 1e-10


class EigenProfile(BaseModel):
    """Nonzero eigenvalues of G G^H."""

    values: List[float] = Field(default_factory=list)

    @field_validator("values")
    @classmethod
    def _nonnegative(cls, values: List[float]) -> List[float]:
        if any(v < 0.0 for v in values):
            raise ValueError("eigenvalues must be nonnegative")
        return values

    @property
    def total(self) -> float:
        return float(sum(self.values))


@dataclass(frozen=True)
class MappingMatrix:
    """N x M re-encoding matrix of the relay phase."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        G = np.asarray(self.entries, dtype=complex)
        if G.ndim != 2 or G.size == 0:
            raise NumericError(f"mapping matrix must be a non-empty 2-D array, got {G.shape}")
        if not np.all(np.isfinite(G)):
            raise NumericError("mapping matrix has non-finite entries")
        object.__setattr__(self, "entries", G)

        N, M = G.shape
        power = np.real(np.trace(G @ G.conj().T)) / N
        if abs(power - 1.0) > POWER_TOL:
            raise NumericError(f"(1/N) tr(G G^H) = {power}, expected 1")
        if M >= N:
            gram, target = G @ G.conj().T, np.eye(N)
        else:
            gram, target = G.conj().T @ G, (N / M) * np.eye(M)
        if np.max(np.abs(gram - target)) > GRAM_TOL:
            raise NumericError("mapping matrix does not have the optimal Gram structure")

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def optimal_eigenvalues(M: int, N: int) -> EigenProfile:
    """Uniform profile N/min(M, N); empty when either phase is empty."""
    if M < 1 or N < 1:
        return EigenProfile(values=[])
    k = min(M, N)
    return EigenProfile(values=[N / k] * k)


def build_mapping_matrix(M: int, N: int) -> MappingMatrix:
    """Rows (or scaled columns) of a unitary DFT matrix."""
    if M >= N:
        G = linalg.dft(M, scale="sqrtn")[:N, :]
    else:
        G = np.sqrt(N / M) * linalg.dft(N, scale="sqrtn")[:, :M]
    return MappingMatrix(entries=G)


def stacked_channel_matrix(
    G: MappingMatrix, beta: float, P0: float, P1: float, chan: ChannelState
) -> np.ndarray:
    """H_D: the backscatter block over the relay block, (M + N) x M."""
    M = G.cols
    h_sd, h_sr, h_rd = np.sqrt(chan.g_sd), np.sqrt(chan.g_sr), np.sqrt(chan.g_rd)
    top = np.sqrt(beta * P0) * h_sd * h_sr * np.eye(M, dtype=complex)
    bottom = np.sqrt(P1) * h_rd * G.entries
    return np.vstack([top, bottom])


def logdet_hpd(matrix: np.ndarray) -> float:
    """Natural log-determinant of a Hermitian positive-definite matrix."""
    A = np.asarray(matrix)
    if not np.all(np.isfinite(A)):
        raise NumericError("log-det input has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > HERMITIAN_TOL * scale:
        raise NumericError("log-det input is not Hermitian")
    try:
        factor, _ = linalg.cho_factor(A)
    except linalg.LinAlgError as exc:
        raise NumericError(f"log-det input is not positive definite: {exc}") from exc
    return float(2.0 * np.sum(np.log(np.real(np.diag(factor)))))


def numeric_logdet_rate(
    G: MappingMatrix,
    beta: float,
    P0: float,
    P1: float,
    chan: ChannelState,
    cfg: NetworkConfig,
) -> float:
    """(TsW/L) log2 det(I + H_D^H H_D / (W sigma2)), bits/block."""
    H = stacked_channel_matrix(G, beta, P0, P1, chan)
    gram = np.eye(G.cols) + (H.conj().T @ H) / chan.noise_bw
    return (cfg.tsw / cfg.L) * logdet_hpd(gram) / np.log(2.0)


def relay_gain_rate(
    eigenvalues: np.ndarray, gamma_sd: float, gamma_rd: float, tsw: float, L: int
) -> np.ndarray:
    """R_D2 for one profile or a stack of profiles (last axis)."""
    lam = np.asarray(eigenvalues, dtype=float)
    return (tsw / L) * np.sum(np.log2(1.0 + lam * gamma_rd / (1.0 + gamma_sd)), axis=-1)
