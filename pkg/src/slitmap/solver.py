"""Densities on the boundary: linear solves, the pairing with phi^[k], and
the trigonometric antiderivative used to integrate theta'."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, SlitMapError
from .geometry import Discretization
from .kernel import SystemMatrix

RESIDUAL_RTOL = 1e-10


def residual(system: SystemMatrix, x: np.ndarray, rhs: np.ndarray) -> float:
    """Relative sup-norm residual of ``A x = rhs`` (worst column)."""
    r = system.matrix @ x - rhs
    scale = np.max(np.abs(rhs), axis=0)
    num = np.max(np.abs(r), axis=0)
    rel = np.where(scale > 0, num / np.where(scale > 0, scale, 1.0), num)
    return float(np.max(rel))


def solve_system(system: SystemMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve with the shared LU factorization; ``rhs`` may hold several columns."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != system.size:
        raise SlitMapError("incompatible densities")
    system.factorize()
    x = scipy.linalg.lu_solve(system.lu, rhs)
    if not np.all(np.isfinite(x)) or residual(system, x, rhs) > RESIDUAL_RTOL:
        raise NumericalError("discretization too coarse or invalid region")
    return x


def chi_densities(system: SystemMatrix) -> np.ndarray:
    """Rows ``phi[k]`` solving ``(I + N* + J) phi[k] = -chi[k]``; shape ``(m+1, N)``."""
    disc = system.disc
    rhs = -np.stack([disc.chi(k) for k in range(len(disc.region))], axis=1)
    return solve_system(system, rhs).T


def functional(u: np.ndarray, phi_k: np.ndarray, disc: Discretization) -> float:
    """Normalized trapezoidal pairing ``(1/2pi) int_J u phi dt = (1/n) sum u phi``."""
    u = np.asarray(u)
    phi_k = np.asarray(phi_k)
    if u.shape != phi_k.shape or u.size != disc.size:
        raise SlitMapError("incompatible densities")
    return float(np.dot(u, phi_k) / disc.n)


@dataclass(frozen=True)
class AntiderivativeResult:
    """Per-curve antiderivative ``rho = mean*t + periodic part`` at the nodes.

    ``a[k, j]`` and ``b[k, j]`` are the cosine/sine coefficients of the
    interpolating trigonometric polynomial (index 0 unused in ``b``).
    """

    rho: np.ndarray
    mean: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def periodic(self) -> np.ndarray:
        n = self.rho.shape[-1]
        t = 2 * np.pi * np.arange(n) / n
        return self.rho - self.mean[:, None] * t


def trig_antiderivative(samples: np.ndarray) -> AntiderivativeResult:
    """Integrate equispaced periodic samples termwise through their trigonometric
    interpolant.  ``samples`` has shape ``(n,)`` or ``(curves, n)``."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    n = x.shape[-1]
    t = 2 * np.pi * np.arange(n) / n
    c = np.fft.rfft(x, axis=-1) / n
    k = np.arange(c.shape[-1])
    a = 2 * c.real
    b = -2 * c.imag
    a[:, 0] = c[:, 0].real
    b[:, 0] = 0.0
    if n % 2 == 0:
        # Nyquist term a*cos(n t/2) integrates to a multiple of sin(n t/2): zero at nodes
        a[:, -1] = c[:, -1].real
        b[:, -1] = 0.0
    C = np.zeros_like(c)
    C[:, 1:] = c[:, 1:] / (1j * k[1:])
    if n % 2 == 0:
        C[:, -1] = 0.0
    periodic = np.fft.irfft(C * n, n=n, axis=-1)
    mean = a[:, 0].copy()
    rho = mean[:, None] * t + periodic
    return AntiderivativeResult(rho, mean, a, b)


def spectral_derivative(samples: np.ndarray) -> np.ndarray:
    """d/dt of periodic (real or complex) samples along the last axis."""
    x = np.asarray(samples)
    n = x.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    d = np.fft.ifft(np.fft.fft(x, axis=-1) * (1j * k), axis=-1)
    return d if np.iscomplexobj(x) else d.real


def trig_interpolate(samples: np.ndarray, factor: int) -> np.ndarray:
    """Resample periodic samples on a grid ``factor`` times finer (zero padding)."""
    x = np.asarray(samples, dtype=complex)
    n = x.shape[-1]
    if factor == 1:
        return x.copy()
    N = n * factor
    X = np.fft.fft(x, axis=-1)
    Y = np.zeros(x.shape[:-1] + (N,), dtype=complex)
    h = n // 2
    Y[..., :h] = X[..., :h]
    Y[..., N - h + 1 :] = X[..., h + 1 :]
    # split the Nyquist mode symmetrically
    Y[..., h] = X[..., h] / 2
    Y[..., N - h] = X[..., h] / 2
    return np.fft.ifft(Y, axis=-1) * factor
