"""Generalized Neumann kernel with A = eta and the Nystrom matrix of I + N* + J."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import GeometryError, NumericalError
from .geometry import Discretization

# dense (m+1)n x (m+1)n float64 above this many unknowns needs > ~3 GB
MAX_UNKNOWNS = 20000


def kernel_N(disc: Discretization, i: int, j: int) -> float:
    """N(s_i, t_j) for global node indices ``i`` (row) and ``j`` (column)."""
    eta, deta = disc.eta, disc.deta
    if i == j:
        return float(np.imag(disc.d2eta[i] / (2 * deta[i]) - deta[i] / eta[i]) / np.pi)
    diff = eta[j] - eta[i]
    if diff == 0:
        raise GeometryError("degenerate geometry")
    return float(np.imag(eta[i] / eta[j] * deta[j] / diff) / np.pi)


def neumann_matrix(disc: Discretization) -> np.ndarray:
    """All kernel values ``K[i, j] = N(s_i, t_j)`` at the collocation nodes."""
    eta, deta = disc.eta, disc.deta
    diff = eta[None, :] - eta[:, None]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0):
        raise GeometryError("degenerate geometry")
    K = np.imag((eta[:, None] / eta[None, :]) * (deta[None, :] / diff)) / np.pi
    # continuous extension on the diagonal
    K[np.diag_indices_from(K)] = np.imag(disc.d2eta / (2 * deta) - deta / eta) / np.pi
    return K


def j_matrix(disc: Discretization) -> np.ndarray:
    """Nystrom matrix of J: 1/n inside each curve's diagonal block, 0 elsewhere."""
    same = disc.curve_index[:, None] == disc.curve_index[None, :]
    return same / disc.n


@dataclass(eq=False)
class SystemMatrix:
    """Dense matrix of I + N* + J with its LU factorization."""

    matrix: np.ndarray
    disc: Discretization
    lu: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def factorize(self) -> "SystemMatrix":
        if self.lu is None:
            lu, piv = scipy.linalg.lu_factor(self.matrix, check_finite=True)
            pivots = np.abs(np.diag(lu))
            if pivots.min() <= np.finfo(float).eps * self.size * pivots.max():
                raise NumericalError("discretization too coarse or invalid region")
            self.lu = (lu, piv)
            self.matrix.setflags(write=False)
        return self


def assemble_system(disc: Discretization, factorize: bool = True) -> SystemMatrix:
    """Assemble ``I + (2 pi/n) K^T + J`` and (by default) factorize it once."""
    size = disc.size
    if size > MAX_UNKNOWNS:
        raise NumericalError("system too large")
    try:
        A = (2 * np.pi / disc.n) * neumann_matrix(disc).T
        A += j_matrix(disc)
        A[np.diag_indices_from(A)] += 1.0
    except MemoryError:
        raise NumericalError("system too large") from None
    system = SystemMatrix(A, disc)
    if factorize:
        system.factorize()
    return system
