"""Boundary curves, multiply connected regions and their collocation grids.

The outer curve (index 0) must run counterclockwise and every inner curve
clockwise, so the region always lies to the left of its boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import GeometryError

Sampler = Callable[[np.ndarray], np.ndarray]

# nodes used for the orientation / disjointness / winding tests
_CHECK_NODES = 512
ON_BOUNDARY_RTOL = 1e-12
MIN_NODES = 4


@dataclass(frozen=True)
class CurveSpec:
    """A 2*pi-periodic closed curve.

    ``kind == "ellipse"`` uses ``center + exp(1j*rot)*(a*cos t + 1j*b*sin t)``;
    a negative ``b`` gives a clockwise ellipse.  ``kind == "generic"`` takes
    caller-supplied samplers for the curve and its first two derivatives.
    """

    kind: str = "ellipse"
    center: complex = 0j
    a: float = 1.0
    b: float = 1.0
    rot: float = 0.0
    samplers: tuple[Sampler, Sampler, Sampler] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind == "ellipse":
            vals = (self.center.real, self.center.imag, self.a, self.b, self.rot)
            if not all(math.isfinite(v) for v in vals):
                raise GeometryError("ellipse parameters must be finite")
            if self.a == 0 or self.b == 0:
                raise GeometryError("ellipse semi-axes must be nonzero")
        elif self.kind == "generic":
            if self.samplers is None or len(self.samplers) != 3:
                raise GeometryError("generic curve needs samplers for eta, eta', eta''")
        else:
            raise GeometryError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def ellipse(cls, center: complex, a: float, b: float, rot: float = 0.0) -> "CurveSpec":
        return cls("ellipse", complex(center), float(a), float(b), float(rot))

    @classmethod
    def circle(cls, center: complex, radius: float, clockwise: bool = False) -> "CurveSpec":
        return cls.ellipse(center, radius, -radius if clockwise else radius)

    @classmethod
    def generic(cls, eta: Sampler, deta: Sampler, d2eta: Sampler) -> "CurveSpec":
        return cls("generic", samplers=(eta, deta, d2eta))

    def eta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.samplers is not None:
            return np.asarray(self.samplers[0](t), dtype=complex)
        return self.center + np.exp(1j * self.rot) * (self.a * np.cos(t) + 1j * self.b * np.sin(t))

    def deta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.samplers is not None:
            return np.asarray(self.samplers[1](t), dtype=complex)
        return np.exp(1j * self.rot) * (-self.a * np.sin(t) + 1j * self.b * np.cos(t))

    def d2eta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.samplers is not None:
            return np.asarray(self.samplers[2](t), dtype=complex)
        return -np.exp(1j * self.rot) * (self.a * np.cos(t) + 1j * self.b * np.sin(t))

    def to_dict(self) -> dict:
        if self.kind != "ellipse":
            raise GeometryError("only ellipse curves can be serialized")
        return {
            "kind": "ellipse",
            "center": [self.center.real, self.center.imag],
            "a": self.a,
            "b": self.b,
            "rot": self.rot,
        }


def signed_area(curve: CurveSpec, n: int = _CHECK_NODES) -> float:
    """Signed area enclosed by ``curve`` (positive when counterclockwise)."""
    t = 2 * np.pi * np.arange(n) / n
    z = curve.eta(t)
    dz = curve.deta(t)
    # (1/2) Im of the closed integral of conj(z) dz, trapezoidal (spectral)
    return 0.5 * float(np.mean(np.imag(np.conj(z) * dz))) * 2 * np.pi


def _polygon_winding(poly: np.ndarray, z: complex) -> int:
    d = poly - z
    ang = np.angle(np.roll(d, -1) / d)
    return int(round(ang.sum() / (2 * np.pi)))


@dataclass(frozen=True)
class Region:
    """Bounded region of connectivity ``m + 1``; ``curves[0]`` is the outer boundary."""

    curves: tuple[CurveSpec, ...]

    @property
    def m(self) -> int:
        return len(self.curves) - 1

    def __len__(self) -> int:
        return len(self.curves)

    @cached_property
    def _check_samples(self) -> np.ndarray:
        t = 2 * np.pi * np.arange(_CHECK_NODES) / _CHECK_NODES
        return np.array([c.eta(t) for c in self.curves])

    @cached_property
    def diameter(self) -> float:
        pts = self._check_samples[0]
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    def to_dict(self) -> dict:
        return {"curves": [c.to_dict() for c in self.curves]}


def build_region(config: dict | Sequence[CurveSpec]) -> Region:
    """Build and validate a region from a config mapping or a list of curves.

    The config follows the region JSON layout::

        {"curves": [{"kind": "ellipse", "center": [re, im], "a": .., "b": .., "rot": ..}, ...]}
    """
    if isinstance(config, dict):
        try:
            raw = config["curves"]
        except KeyError:
            raise GeometryError("no boundary") from None
        curves = []
        for item in raw:
            if item.get("kind", "ellipse") != "ellipse":
                raise GeometryError(f"unsupported curve kind in config: {item.get('kind')!r}")
            cx, cy = item["center"]
            curves.append(CurveSpec.ellipse(complex(cx, cy), item["a"], item["b"], item.get("rot", 0.0)))
    else:
        curves = list(config)
    if not curves:
        raise GeometryError("no boundary")

    region = Region(tuple(curves))
    for j, curve in enumerate(region.curves):
        area = signed_area(curve)
        if (j == 0 and area <= 0) or (j > 0 and area >= 0):
            raise GeometryError(f"curve {j} wrongly oriented")

    samples = region._check_samples
    for j in range(len(curves)):
        for k in range(j + 1, len(curves)):
            dmin = np.min(np.abs(samples[j][:, None] - samples[k][None, :]))
            if dmin <= 0:
                raise GeometryError("curves intersect")
            # inner curves must sit inside the outer one and outside each other
            if j == 0:
                nested = all(_polygon_winding(samples[0], z) == 1 for z in samples[k])
            else:
                nested = all(_polygon_winding(samples[j], z) == 0 for z in samples[k]) and all(
                    _polygon_winding(samples[k], z) == 0 for z in samples[j]
                )
            if not nested:
                raise GeometryError("curves intersect")
    return region


def load_region(path: str | Path) -> Region:
    with open(path, encoding="utf-8") as fh:
        return build_region(json.load(fh))


SEVEN_ELLIPSES = (
    # (a, b, center, rot) for the seven-curve test region
    (4.0, 3.0, -0.5 - 0.3j, 1.0),
    (0.7, -0.3, 1.5 + 1.0j, 0.6),
    (0.3, -0.6, 1.5 - 0.4j, 1.6),
    (0.5, -0.7, 0.5 - 1.8j, 2.6),
    (0.6, -0.4, -2.0 + 0.8j, 2.8),
    (0.3, -0.7, -0.8 + 1.8j, 0.3),
    (0.3, -0.5, 0.5 + 2.3j, 0.5),
)


def seven_ellipse_region() -> Region:
    """The seven-ellipse benchmark region."""
    return build_region([CurveSpec.ellipse(z, a, b, s) for a, b, z, s in SEVEN_ELLIPSES])


@dataclass(frozen=True, eq=False)
class Discretization:
    """``n`` equidistant nodes per curve, stored curve after curve.

    Global node ``k*n + i`` is node ``t_i = 2*pi*i/n`` on curve ``k``.
    """

    region: Region
    n: int
    t: np.ndarray
    eta: np.ndarray
    deta: np.ndarray
    d2eta: np.ndarray
    curve_index: np.ndarray

    @property
    def m(self) -> int:
        return self.region.m

    @property
    def size(self) -> int:
        return self.eta.size

    def per_curve(self, values: np.ndarray) -> np.ndarray:
        """View a global node array as shape ``(m + 1, n)``."""
        return np.asarray(values).reshape(len(self.region), self.n)

    def chi(self, k: int) -> np.ndarray:
        return (self.curve_index == k).astype(float)


def sample_boundary(region: Region, n: int) -> Discretization:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < MIN_NODES or n % 2:
        raise GeometryError("invalid discretization size")
    n = int(n)
    t = 2 * np.pi * np.arange(n) / n
    eta = np.concatenate([c.eta(t) for c in region.curves])
    deta = np.concatenate([c.deta(t) for c in region.curves])
    d2eta = np.concatenate([c.d2eta(t) for c in region.curves])
    if np.any(deta == 0) or not np.all(np.isfinite(deta)):
        raise GeometryError("curve parametrization has vanishing derivative")
    idx = np.repeat(np.arange(len(region)), n)
    for arr in (t, eta, deta, d2eta, idx):
        arr.setflags(write=False)
    return Discretization(region, n, t, eta, deta, d2eta, idx)


@dataclass(frozen=True)
class Location:
    """Where a point sits relative to a region.

    ``status`` is ``"interior"``, ``"boundary"`` or ``"exterior"``; for exterior
    points ``component`` is 0 (outside the outer curve) or the index of the hole.
    ``distance`` is the distance to the nearest boundary curve.
    """

    status: str
    component: int | None = None
    distance: float = math.inf

    @property
    def interior(self) -> bool:
        return self.status == "interior"


def _nearest_on_curve(curve: CurveSpec, samples: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distance from each z to the curve, refined by Newton steps in the parameter."""
    n = samples.size
    h = 2 * np.pi / n
    t = h * np.argmin(np.abs(samples[None, :] - z[:, None]), axis=1).astype(float)
    for _ in range(8):
        e, de, d2e = curve.eta(t), curve.deta(t), curve.d2eta(t)
        g = np.real(np.conj(e - z) * de)
        dg = np.real(np.conj(de) * de + np.conj(e - z) * d2e)
        step = np.where(dg > 0, -g / np.where(dg > 0, dg, 1.0), 0.0)
        t = t + np.clip(step, -h, h)
    e, de = curve.eta(t), curve.deta(t)
    return np.abs(e - z), e, de


def _polygon_windings(poly: np.ndarray, z: np.ndarray) -> np.ndarray:
    d = poly[None, :] - z[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.nan_to_num(np.angle(np.roll(d, -1, axis=1) / d))
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


def locate_points(region: Region, z, chunk: int = 2048) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized classification.

    Returns ``(status, component, distance)`` arrays where status is 1 for
    interior, 0 for boundary and -1 for exterior; ``component`` is the
    exterior component (0 outside the outer curve, k inside hole k) or -1.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    samples = region._check_samples
    spacing = np.max(np.abs(np.diff(samples, axis=1)), axis=1)
    status = np.empty(z.size, dtype=int)
    component = np.full(z.size, -1, dtype=int)
    distance = np.empty(z.size)
    tol = ON_BOUNDARY_RTOL * region.diameter
    for lo in range(0, z.size, chunk):
        zc = z[lo : lo + chunk]
        inside = np.empty((len(region), zc.size), dtype=bool)
        dists = np.empty((len(region), zc.size))
        for j, curve in enumerate(region.curves):
            d, e, de = _nearest_on_curve(curve, samples[j], zc)
            dists[j] = d
            # near a curve the polygon cuts corners: use the side of the tangent
            left = np.imag(np.conj(de) * (zc - e)) > 0
            near = d < 4 * spacing[j]
            inside[j] = np.where(near, left if j == 0 else ~left, _polygon_windings(samples[j], zc) != 0)
        dist = dists.min(axis=0)
        st = np.where(inside[0], 1, -1)
        comp = np.where(inside[0], -1, 0)
        for j in range(len(region) - 1, 0, -1):
            hole = inside[0] & inside[j]
            st = np.where(hole, -1, st)
            comp = np.where(hole, j, comp)
        on = dist <= tol
        st[on] = 0
        comp[on] = -1
        status[lo : lo + chunk] = st
        component[lo : lo + chunk] = comp
        distance[lo : lo + chunk] = dist
    return status, component, distance


def locate_point(region: Region, z: complex) -> Location:
    """Classify ``z`` by the winding number of the boundary about it."""
    st, comp, dist = locate_points(region, complex(z))
    d = float(dist[0])
    if st[0] == 0:
        return Location("boundary", None, d)
    if st[0] < 0:
        return Location("exterior", int(comp[0]), d)
    return Location("interior", None, d)


def boundary_distance(region: Region, z: complex) -> float:
    return locate_point(region, z).distance
