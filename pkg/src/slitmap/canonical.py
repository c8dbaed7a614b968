"""The five canonical slit domains and the full boundary solve.

Every target shares the matrix of I + N* + J; only the right-hand side for
theta', the function gamma + i*mu and the recovery of R and c differ.

=========== ============================================ =================
kind        boundary values of omega                      normalization
=========== ============================================ =================
annulus     R_k exp(i theta), R_0 = 1                      omega(0) > 0
disk        R_k exp(i theta), R_0 = 1                      omega(0) = 0, omega'(0) > 0
circular    R_k exp(i theta)                               omega(alpha) = 0, residue 1 at 0
radial      exp(theta) exp(i R_k)                          omega(alpha) = 0, residue 1 at 0
parallel    exp(-i(pi/2-delta)) (R_k + i theta)            omega(z) - 1/z -> 0 at 0
=========== ============================================ =================
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .geometry import Discretization, Region, locate_point, sample_boundary
from .kernel import SystemMatrix, assemble_system
from .solver import (
    AntiderivativeResult,
    chi_densities,
    functional,
    residual,
    solve_system,
    trig_antiderivative,
)

KINDS = ("annulus", "disk", "circular", "radial", "parallel")
POLE_KINDS = ("circular", "radial", "parallel")
PERIODICITY_TOL = 1e-8


@dataclass(frozen=True)
class CanonicalKind:
    """Target domain tag plus its auxiliary data.

    ``z1`` is a point inside hole 1 (annulus), ``alpha`` the zero of the map
    (circular/radial), ``delta`` the slit angle with the real axis (parallel).
    """

    tag: str
    z1: complex | None = None
    alpha: complex | None = None
    delta: float = math.pi / 4

    def __post_init__(self) -> None:
        if self.tag not in KINDS:
            raise ValueError(f"unknown canonical kind {self.tag!r}")
        if self.tag == "annulus" and self.z1 is None:
            raise ValueError("annulus kind needs z1")
        if self.tag in ("circular", "radial") and self.alpha is None:
            raise ValueError(f"{self.tag} kind needs alpha")

    @classmethod
    def annulus(cls, z1: complex) -> "CanonicalKind":
        return cls("annulus", z1=complex(z1))

    @classmethod
    def disk(cls) -> "CanonicalKind":
        return cls("disk")

    @classmethod
    def circular(cls, alpha: complex) -> "CanonicalKind":
        return cls("circular", alpha=complex(alpha))

    @classmethod
    def radial(cls, alpha: complex) -> "CanonicalKind":
        return cls("radial", alpha=complex(alpha))

    @classmethod
    def parallel(cls, delta: float = math.pi / 4) -> "CanonicalKind":
        return cls("parallel", delta=float(delta))

    @property
    def has_pole(self) -> bool:
        return self.tag in POLE_KINDS

    @property
    def rotation(self) -> complex:
        """exp(i(pi/2 - delta)), the factor turning parallel slits vertical."""
        return complex(np.exp(1j * (math.pi / 2 - self.delta)))

    def winding(self, curves: int) -> np.ndarray:
        """Prescribed (1/2pi) * integral of theta' over each curve."""
        h = np.zeros(curves)
        if self.tag in ("annulus", "disk"):
            h[0] = 1.0
        if self.tag == "annulus":
            h[1] = -1.0
        return h


def validate_kind(kind: CanonicalKind, region: Region) -> None:
    """Check the placement of 0, z1 and alpha required by ``kind``."""
    if kind.tag == "annulus" and region.m < 1:
        raise DomainError("needs at least one hole")
    if not locate_point(region, 0j).interior:
        raise DomainError("origin not in G")
    if kind.tag == "annulus":
        loc = locate_point(region, kind.z1)
        if loc.status != "exterior" or loc.component != 1:
            raise DomainError("invalid auxiliary point")
    if kind.tag in ("circular", "radial"):
        if kind.alpha == 0 or not locate_point(region, kind.alpha).interior:
            raise DomainError("invalid auxiliary point")


def default_z1(region: Region) -> complex:
    """Centre of the bounding box of hole 1."""
    if region.m < 1:
        raise DomainError("needs at least one hole")
    pts = region._check_samples[1]
    return complex(
        0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max())
    )


def default_alpha(region: Region) -> complex:
    """Centroid of the sampled outer curve, provided it is a valid zero."""
    alpha = complex(np.mean(region._check_samples[0]))
    if alpha == 0 or not locate_point(region, alpha).interior:
        raise DomainError("invalid auxiliary point")
    return alpha


def build_rhs(kind: CanonicalKind, disc: Discretization) -> np.ndarray:
    """Right-hand side of ``(I + N* + J) theta' = rhs``."""
    eta, deta = disc.eta, disc.deta
    if kind.tag in ("annulus", "disk"):
        return disc.chi(0) - (disc.chi(1) if kind.tag == "annulus" else 0.0)
    adj = deta / eta
    if kind.tag == "circular":
        g = kind.alpha / (eta - kind.alpha)
    elif kind.tag == "radial":
        g = 1j * kind.alpha / (eta - kind.alpha)
    else:
        g = -kind.rotation / eta
    return 2 * np.imag(adj * g)


def _continuous_log(u: np.ndarray, disc: Discretization) -> tuple[np.ndarray, np.ndarray]:
    """log(u) with the argument unwrapped along each curve, starting from the
    principal value at the first node, plus the integer winding of u per curve."""
    if np.any(np.abs(u) == 0) or not np.all(np.isfinite(u)):
        raise DomainError("auxiliary point on boundary")
    arg = np.unwrap(disc.per_curve(np.angle(u)), axis=-1)
    closing = np.angle(np.exp(1j * (arg[:, 0] - arg[:, -1])))
    winding = np.rint((arg[:, -1] - arg[:, 0] + closing) / (2 * np.pi))
    return np.log(np.abs(u)) + 1j * arg.ravel(), winding


def _gamma_mu_increment(kind: CanonicalKind, disc: Discretization) -> tuple[np.ndarray, np.ndarray]:
    """gamma + i*mu and its exact increment over one turn of each curve."""
    eta = disc.eta
    if kind.tag == "parallel":
        return -kind.rotation / eta, np.zeros(len(disc.region), dtype=complex)
    if kind.tag == "annulus":
        u = 1 - eta / kind.z1
    elif kind.tag == "disk":
        u = eta
    else:
        u = 1 / eta - 1 / kind.alpha
    log_u, winding = _continuous_log(u, disc)
    if kind.tag == "radial":
        return 1j * log_u, 1j * (2j * np.pi * winding)
    return -log_u, -2j * np.pi * winding


def gamma_mu(kind: CanonicalKind, disc: Discretization) -> np.ndarray:
    """Samples of gamma + i*mu, continuous along each curve."""
    return _gamma_mu_increment(kind, disc)[0]


def _rho_sign(kind: CanonicalKind) -> float:
    return -1.0 if kind.tag == "radial" else 1.0


@dataclass(eq=False)
class MapSolution:
    """Everything needed to evaluate omega, omega' and the inverse map."""

    kind: CanonicalKind
    disc: Discretization
    theta: np.ndarray  # (m+1, n)
    theta_prime: np.ndarray  # (m+1, n)
    R: np.ndarray
    c: float | None
    ck: np.ndarray
    omega: np.ndarray  # boundary values, global node order
    domega: np.ndarray  # omega' on the boundary
    residuals: dict[str, float] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def region(self) -> Region:
        return self.disc.region

    @property
    def n(self) -> int:
        return self.disc.n

    @property
    def dxi(self) -> np.ndarray:
        """d/dt of omega(eta(t)) = eta'(t) omega'(eta(t))."""
        return self.disc.deta * self.domega


def recover_parameters(
    kind: CanonicalKind,
    gm: np.ndarray,
    rho: AntiderivativeResult,
    phis: np.ndarray,
    disc: Discretization,
) -> tuple[np.ndarray, float | None, np.ndarray]:
    """Return ``(R, c, ck)`` from the pairings of gamma and s*rho + mu with phi^[k]."""
    curves = len(disc.region)
    s = _rho_sign(kind)
    gamma = gm.real
    mu_part = s * rho.rho.ravel() + gm.imag
    h = np.array([functional(gamma, phis[k], disc) for k in range(curves)])
    nu = np.array([functional(mu_part, phis[k], disc) for k in range(curves)])
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(nu))):
        raise NumericalError("parameter recovery failed")
    c = None
    if kind.tag in ("annulus", "disk"):
        c = float(np.exp(-h[0]))
        R = np.exp(h - h[0])
        R[0] = 1.0
        ck = nu
    elif kind.tag == "circular":
        R = np.exp(h)
        ck = nu
    elif kind.tag == "radial":
        R = h
        ck = -nu
    else:
        R = h
        ck = nu
    return R, c, ck


def boundary_values(
    kind: CanonicalKind,
    disc: Discretization,
    theta: np.ndarray,
    theta_prime: np.ndarray,
    R: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """omega(eta(t)) and omega'(eta(t)) at every node."""
    th = np.asarray(theta).ravel()
    thp = np.asarray(theta_prime).ravel()
    Rt = np.asarray(R)[disc.curve_index]
    if kind.tag == "radial":
        w = np.exp(th) * np.exp(1j * Rt)
        dw = thp * w / disc.deta
    elif kind.tag == "parallel":
        rot = np.conj(kind.rotation)
        w = rot * (Rt + 1j * th)
        dw = rot * 1j * thp / disc.deta
    else:
        w = Rt * np.exp(1j * th)
        dw = 1j * thp * w / disc.deta
    return w, dw


def solve_map(
    region: Region,
    kind: CanonicalKind,
    n: int,
    system: SystemMatrix | None = None,
    phis: np.ndarray | None = None,
) -> MapSolution:
    """Full pipeline: theta', theta, parameters and boundary values.

    ``system`` and ``phis`` may be passed in to share one factorization (and
    the m+1 densities phi^[k]) between several kinds on the same region.
    """
    validate_kind(kind, region)
    if system is None:
        system = assemble_system(sample_boundary(region, n))
    disc = system.disc
    if disc.region is not region or disc.n != n:
        raise ValueError("system was assembled for a different region or n")

    rhs = build_rhs(kind, disc)
    theta_prime = solve_system(system, rhs)
    lin_res = residual(system, theta_prime, rhs)
    if phis is None:
        phis = chi_densities(system)

    tp = disc.per_curve(theta_prime)
    target = kind.winding(len(region))
    winding_res = float(np.max(np.abs(tp.mean(axis=1) - target)))

    rho = trig_antiderivative(tp)
    gm, increment = _gamma_mu_increment(kind, disc)
    R, c, ck = recover_parameters(kind, gm, rho, phis, disc)
    theta = rho.rho + ck[:, None]

    # A*F is single valued: the linear growth of rho cancels the branch increment
    period_res = float(np.max(np.abs(increment + 2j * np.pi * _rho_sign(kind) * rho.mean)))
    if period_res > PERIODICITY_TOL:
        warnings.warn(
            f"gamma + i(rho + mu) not periodic to {PERIODICITY_TOL:g} (defect {period_res:.2e}); "
            "increase n",
            RuntimeWarning,
            stacklevel=2,
        )

    omega, domega = boundary_values(kind, disc, theta, tp, R)
    return MapSolution(
        kind=kind,
        disc=disc,
        theta=theta,
        theta_prime=tp,
        R=R,
        c=c,
        ck=ck,
        omega=omega,
        domega=domega,
        residuals={"linear_system": lin_res, "winding": winding_res, "periodicity": period_res},
    )
