"""Closed-form reference maps, invariant checks and convergence studies."""

from __future__ import annotations

import csv
import io
import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .canonical import KINDS, CanonicalKind, MapSolution, solve_map
from .errors import DomainError, SlitMapError
from .geometry import CurveSpec, Region, build_region, sample_boundary
from .kernel import assemble_system
from .solver import spectral_derivative

ORACLE_TOL = 1e-12


@dataclass(frozen=True)
class Oracle:
    """Exact map with its derivative and canonical-domain parameters."""

    kind: CanonicalKind
    region: Region
    forward: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    R: np.ndarray
    c: float | None = None


def disk_region(r: float = 1.0) -> Region:
    return build_region([CurveSpec.circle(0, r)])


def eccentric_annulus_region(center: float, radius: float) -> Region:
    return build_region([CurveSpec.circle(0, 1.0), CurveSpec.circle(center, radius, clockwise=True)])


def _contour(f, center: complex, r: float, power: int, m: int = 64) -> complex:
    """(1/2 pi i) * closed integral of f(z) (z - center)^power dz over a small circle."""
    s = 2 * np.pi * np.arange(m) / m
    z = center + r * np.exp(1j * s)
    dz = 1j * r * np.exp(1j * s)
    return complex(np.mean(f(z) * (z - center) ** power * dz) / 1j)


def _check(name: str, value: float, tol: float = ORACLE_TOL) -> None:
    if not value <= tol:
        raise AssertionError(f"oracle self-check failed: {name} off by {value:.3e}")


def oracle_disk(kind: CanonicalKind, r: float = 1.0) -> Oracle:
    """Closed-form maps of a disk centred at 0 (radius ``r`` for the disk kind,
    the unit disk for the slit-plane kinds).  Each oracle checks its own
    normalization and boundary shape before it is returned."""
    t = 2 * np.pi * np.arange(256) / 256
    if kind.tag == "disk":
        region = disk_region(r)
        fwd = lambda z: np.asarray(z) / r  # noqa: E731
        der = lambda z: np.full_like(np.asarray(z, dtype=complex), 1 / r)  # noqa: E731
        oracle = Oracle(kind, region, fwd, der, np.array([1.0]), 1 / r)
        _check("omega(0) = 0", abs(fwd(0j)))
        _check("|omega| = 1 on boundary", np.max(np.abs(np.abs(fwd(r * np.exp(1j * t))) - 1)))
        return oracle
    if kind.tag == "annulus" or r != 1.0:
        raise DomainError("no closed form available")

    region = disk_region(1.0)
    on = np.exp(1j * t)
    if kind.tag in ("circular", "radial"):
        a = kind.alpha
        if not 0 < abs(a) < 1:
            raise DomainError("invalid auxiliary point")
        ac = np.conj(a)
        if kind.tag == "circular":
            fwd = lambda z: -(z - a) / (a * z * (1 - ac * z))  # noqa: E731
            # d/dz of -(1/a) (z - a)/(z - ac z^2)
            der = lambda z: -((z - ac * z**2) - (z - a) * (1 - 2 * ac * z)) / (a * (z - ac * z**2) ** 2)  # noqa: E731
            R = np.array([1 / abs(a)])
            _check("|omega| constant", np.max(np.abs(np.abs(fwd(on)) - R[0])))
        else:
            fwd = lambda z: -(z - a) * (1 - ac * z) / (a * z)  # noqa: E731
            # -(1/a) (1 + a ac - ac z - a/z)  =>  derivative -(1/a)(-ac + a/z^2)
            der = lambda z: -(-ac + a / z**2) / a  # noqa: E731
            R = np.array([np.angle(-1 / a) % (2 * np.pi)])
            _check("arg omega constant", np.max(np.abs(np.angle(fwd(on) * np.exp(-1j * R[0])))))
        _check("omega(alpha) = 0", abs(fwd(a)))
        _check("residue 1 at 0", abs(_contour(fwd, 0, 0.5 * abs(a), 0) - 1))
    elif kind.tag == "parallel":
        e2 = np.exp(-2j * (math.pi / 2 - kind.delta))
        fwd = lambda z: 1 / z - e2 * z  # noqa: E731
        der = lambda z: -1 / z**2 - e2  # noqa: E731
        R = np.array([0.0])
        _check("Re[rot omega] constant", np.max(np.abs(np.real(kind.rotation * fwd(on)) - R[0])))
        _check("residue 1 at 0", abs(_contour(fwd, 0, 0.5, 0) - 1))
        _check("omega - 1/z -> 0", abs(_contour(fwd, 0, 0.5, -1)))
    else:
        raise DomainError("no closed form available")
    return Oracle(kind, region, fwd, der, R)


def mobius_parameter(center: float, radius: float) -> float:
    """Real a in (0, 1) such that (a - z)/(1 - a z) makes the hole concentric."""
    s = 1 + center**2 - radius**2
    return (s - math.sqrt(s * s - 4 * center**2)) / (2 * center)


def oracle_eccentric_annulus(center: float, radius: float) -> Oracle:
    """Moebius map of the unit disk minus the disk |z - center| <= radius."""
    if radius <= 0:
        raise DomainError("hole radius must be positive")
    if abs(center) <= radius:
        raise DomainError("origin not in G")
    if not (center > 0 and center + radius < 1):
        raise DomainError("hole must lie inside the unit disk on the positive real axis")
    a = mobius_parameter(center, radius)
    fwd = lambda z: (a - z) / (1 - a * z)  # noqa: E731
    der = lambda z: (a * a - 1) / (1 - a * z) ** 2  # noqa: E731
    R1 = (a - (center - radius)) / (1 - a * (center - radius))
    t = 2 * np.pi * np.arange(256) / 256
    _check("|omega| = 1 on outer circle", np.max(np.abs(np.abs(fwd(np.exp(1j * t))) - 1)))
    _check(
        "|omega| constant on hole",
        np.max(np.abs(np.abs(fwd(center + radius * np.exp(1j * t))) - R1)),
    )
    _check("omega(0) = a > 0", abs(fwd(0.0) - a))
    region = eccentric_annulus_region(center, radius)
    return Oracle(CanonicalKind.annulus(center), region, fwd, der, np.array([1.0, R1]), a)


# invariants of a computed solution -----------------------------------------


def shape_defect(sol: MapSolution) -> float:
    """Largest deviation from the target shape over all curves: constant |omega|
    (circle-type), constant arg omega mod 2 pi (radial) or constant
    Re[exp(i(pi/2 - delta)) omega] (parallel)."""
    w = sol.disc.per_curve(sol.omega)
    if sol.kind.tag == "radial":
        dev = np.angle(w * np.exp(-1j * sol.R)[:, None])
    elif sol.kind.tag == "parallel":
        proj = np.real(sol.kind.rotation * w)
        dev = proj - proj.mean(axis=1, keepdims=True)
    else:
        mod = np.abs(w)
        dev = mod - mod.mean(axis=1, keepdims=True)
    return float(np.max(np.abs(dev)))


def derivative_defect(sol: MapSolution) -> float:
    """sup |d/dt omega(eta(t)) - eta'(t) omega'(eta(t))| with a spectral d/dt."""
    w = sol.disc.per_curve(sol.omega)
    return float(np.max(np.abs(spectral_derivative(w) - sol.disc.per_curve(sol.dxi))))


def sign_changes(values: np.ndarray) -> int:
    """Number of sign changes of a periodic sample sequence."""
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s != np.roll(s, 1)))


# convergence ----------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    kind: str
    n: int
    sup_error: float
    wall_time_ms: float


def convergence_table(
    region: Region,
    kinds: Sequence[CanonicalKind],
    ns: Sequence[int],
    reference_n: int = 512,
) -> list[ConvergenceRow]:
    """Sup-norm distance of the boundary values at each n from the solution at
    ``reference_n``, compared at the shared nodes.

    ``wall_time_ms`` covers assembling and factorizing the system plus the
    solve for that kind.
    """
    ns = list(ns)
    if ns != sorted(ns) or any(n >= reference_n for n in ns):
        raise SlitMapError("n-list must be ascending and below the reference size")
    if any(reference_n % n for n in ns):
        raise SlitMapError("node sets incomparable")

    def run(n: int) -> tuple[dict[str, MapSolution], dict[str, float]]:
        t0 = time.perf_counter()
        system = assemble_system(sample_boundary(region, n))
        t_asm = time.perf_counter() - t0
        sols, times = {}, {}
        for kind in kinds:
            t1 = time.perf_counter()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                sols[kind.tag] = solve_map(region, kind, n, system=system)
            times[kind.tag] = 1e3 * (t_asm + time.perf_counter() - t1)
        return sols, times

    ref, _ = run(reference_n)
    rows = []
    for n in ns:
        sols, times = run(n)
        step = reference_n // n
        for kind in kinds:
            ref_w = ref[kind.tag].disc.per_curve(ref[kind.tag].omega)[:, ::step]
            err = np.max(np.abs(sols[kind.tag].disc.per_curve(sols[kind.tag].omega) - ref_w))
            rows.append(ConvergenceRow(kind.tag, n, float(err), times[kind.tag]))
    return rows


def convergence_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "n", "sup_error", "wall_time_ms"])
    for r in rows:
        writer.writerow([r.kind, r.n, f"{r.sup_error:.17g}", f"{r.wall_time_ms:.3f}"])
    return buf.getvalue()


def default_kinds(region: Region, z1: complex | None = None, alpha: complex | None = None,
                  delta: float = math.pi / 4) -> list[CanonicalKind]:
    """One instance of every kind that makes sense for ``region``."""
    from .canonical import default_alpha, default_z1

    kinds = []
    for tag in KINDS:
        if tag == "annulus":
            if region.m < 1:
                continue
            kinds.append(CanonicalKind.annulus(z1 if z1 is not None else default_z1(region)))
        elif tag == "disk":
            kinds.append(CanonicalKind.disk())
        elif tag in ("circular", "radial"):
            a = alpha if alpha is not None else default_alpha(region)
            kinds.append(CanonicalKind(tag, alpha=a))
        else:
            kinds.append(CanonicalKind.parallel(delta))
    return kinds


# self test ------------------------------------------------------------------


def selftest(n: int = 128) -> list[tuple[str, bool, str]]:
    """Run the closed-form oracle checks; returns ``(name, passed, detail)``."""
    from .evaluate import map_points

    results = []

    def record(name: str, fn: Callable[[], tuple[bool, str]]) -> None:
        try:
            ok, detail = fn()
        except Exception as exc:  # a failing check must not hide the rest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))

    def identity() -> tuple[bool, str]:
        region = disk_region(1.0)
        system = assemble_system(sample_boundary(region, 16))
        err_I = float(np.max(np.abs(system.matrix - np.eye(16))))
        sol = solve_map(region, CanonicalKind.disk(), 16, system=system)
        err = float(np.max(np.abs(sol.theta[0] - sol.disc.t)))
        return bool(err_I <= 1e-14 and err <= 1e-12), f"matrix {err_I:.1e}, theta {err:.1e}"

    def disk_case(kind: CanonicalKind, r: float) -> Callable[[], tuple[bool, str]]:
        def run() -> tuple[bool, str]:
            oracle = oracle_disk(kind, r)
            sol = solve_map(oracle.region, kind, n)
            pts = _lattice(r, clearance=0.2 * r, pole=kind.has_pole)
            e1 = np.max(np.abs(map_points(sol, pts).values - oracle.forward(pts)))
            e2 = np.max(np.abs(map_points(sol, pts, derivative=True).values - oracle.derivative(pts)))
            eR = _angle_aware(sol.R, oracle.R, kind.tag == "radial")
            err = max(e1, e2, eR)
            return bool(err <= 1e-10), f"sup error {err:.1e}"

        return run

    def annulus() -> tuple[bool, str]:
        oracle = oracle_eccentric_annulus(0.5, 0.2)
        sol = solve_map(oracle.region, oracle.kind, 256)
        eR = abs(sol.R[1] - oracle.R[1])
        eb = float(np.max(np.abs(sol.omega - oracle.forward(sol.disc.eta))))
        return bool(max(eR, eb) <= 1e-8), f"R1 {eR:.1e}, boundary {eb:.1e}"

    record("unit circle identity", identity)
    record("disk r=2", disk_case(CanonicalKind.disk(), 2.0))
    record("circular alpha=0.5", disk_case(CanonicalKind.circular(0.5), 1.0))
    record("radial alpha=0.5", disk_case(CanonicalKind.radial(0.5), 1.0))
    record("parallel delta=pi/4", disk_case(CanonicalKind.parallel(math.pi / 4), 1.0))
    record("eccentric annulus", annulus)
    return results


def _angle_aware(a: np.ndarray, b: np.ndarray, angles: bool) -> float:
    d = np.asarray(a) - np.asarray(b)
    if angles:
        d = np.angle(np.exp(1j * d))
    return float(np.max(np.abs(d)))


def _lattice(r: float, clearance: float, pole: bool, step: float | None = None) -> np.ndarray:
    """Square lattice points of the disk |z| < r at distance >= clearance from
    the circle (and from 0 when the map has a pole there)."""
    step = step or r / 8
    xs = np.arange(-r, r + step / 2, step)
    z = (xs[:, None] + 1j * xs[None, :]).ravel()
    keep = np.abs(z) <= r - clearance
    if pole:
        keep &= np.abs(z) >= clearance
    return z[keep]
