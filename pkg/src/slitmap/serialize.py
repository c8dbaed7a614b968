"""Deterministic JSON for solutions: fixed key order, floats at 17 significant digits."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .canonical import CanonicalKind, MapSolution, boundary_values
from .geometry import build_region, sample_boundary


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 0) -> str:
    """Minimal JSON writer; unlike :func:`json.dumps` it pins the float format."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(f'{pad}  {json.dumps(str(k))}: {dumps(v, indent + 2)}' for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [dumps(v, indent + 2) for v in obj]
        if all("\n" not in it for it in items):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + "  " + it for it in items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cplx(z: complex | None):
    return None if z is None else [z.real, z.imag]


def solution_to_dict(sol: MapSolution) -> dict:
    kind = sol.kind
    return {
        "kind": kind.tag,
        "n": sol.n,
        "R": [float(v) for v in sol.R],
        "c": sol.c,
        "c_k": [float(v) for v in sol.ck],
        "theta": sol.theta.tolist(),
        "theta_prime": sol.theta_prime.tolist(),
        "omega_boundary": [[float(w.real), float(w.imag)] for w in sol.omega],
        "residuals": {k: float(v) for k, v in sol.residuals.items()},
        "params": {"z1": _cplx(kind.z1), "alpha": _cplx(kind.alpha), "delta": kind.delta},
        "region": sol.region.to_dict(),
    }


def solution_from_dict(data: dict) -> MapSolution:
    """Rebuild a solution without re-solving the integral equation."""
    params = data.get("params", {})

    def cplx(v):
        return None if v is None else complex(v[0], v[1])

    kind = CanonicalKind(
        data["kind"],
        z1=cplx(params.get("z1")),
        alpha=cplx(params.get("alpha")),
        delta=float(params.get("delta", math.pi / 4)),
    )
    region = build_region(data["region"])
    disc = sample_boundary(region, int(data["n"]))
    theta = np.array(data["theta"], dtype=float)
    theta_prime = np.array(data["theta_prime"], dtype=float)
    R = np.array(data["R"], dtype=float)
    omega, domega = boundary_values(kind, disc, theta, theta_prime, R)
    stored = np.array(data["omega_boundary"], dtype=float)
    if stored.shape == (disc.size, 2):
        omega = stored[:, 0] + 1j * stored[:, 1]
    return MapSolution(
        kind=kind,
        disc=disc,
        theta=theta,
        theta_prime=theta_prime,
        R=R,
        c=data.get("c"),
        ck=np.array(data["c_k"], dtype=float),
        omega=omega,
        domega=domega,
        residuals=dict(data.get("residuals", {})),
    )


def save_solution(sol: MapSolution, path: str | Path) -> None:
    Path(path).write_text(dumps(solution_to_dict(sol)) + "\n", encoding="utf-8")


def load_solution(path: str | Path) -> MapSolution:
    with open(path, encoding="utf-8") as fh:
        return solution_from_dict(json.load(fh))
