import math

import numpy as np
import pytest

from slitmap import CanonicalKind
from slitmap.errors import DomainError, SlitMapError
from slitmap.geometry import seven_ellipse_region
from slitmap.verify import (
    convergence_csv,
    convergence_table,
    default_kinds,
    disk_region,
    eccentric_annulus_region,
    mobius_parameter,
    oracle_disk,
    oracle_eccentric_annulus,
    selftest,
    sign_changes,
)


def test_oracle_parameters():
    assert oracle_disk(CanonicalKind.circular(0.5)).R[0] == pytest.approx(2.0)
    assert oracle_disk(CanonicalKind.radial(0.5)).R[0] == pytest.approx(math.pi)
    for delta in (0.2, math.pi / 4, 2.0):
        assert oracle_disk(CanonicalKind.parallel(delta)).R[0] == 0.0
    o = oracle_disk(CanonicalKind.disk(), 2.0)
    assert o.c == 0.5 and o.forward(np.array([1.0]))[0] == 0.5


def test_oracle_derivatives_match_difference_quotients():
    z = np.array([0.3 + 0.1j, -0.4 + 0.5j])
    h = 1e-6
    for kind in (CanonicalKind.circular(0.5), CanonicalKind.radial(0.2 - 0.3j), CanonicalKind.parallel(1.1)):
        o = oracle_disk(kind)
        fd = (o.forward(z + h) - o.forward(z - h)) / (2 * h)
        np.testing.assert_allclose(o.derivative(z), fd, rtol=1e-7)


def test_oracle_unavailable():
    with pytest.raises(DomainError, match="no closed form available"):
        oracle_disk(CanonicalKind.annulus(0.5))
    with pytest.raises(DomainError, match="no closed form available"):
        oracle_disk(CanonicalKind.circular(0.5), r=2.0)


def test_eccentric_annulus_oracle():
    assert mobius_parameter(0.5, 0.2) == pytest.approx(0.528751146789956, abs=1e-15)
    o = oracle_eccentric_annulus(0.5, 0.2)
    assert o.R[1] == pytest.approx(0.27187786697489014, abs=1e-15)
    assert o.c == pytest.approx(0.528751146789956, abs=1e-15)
    # both hole extremes land on the same circle
    assert abs(o.forward(0.3)) == pytest.approx(abs(o.forward(0.7)), abs=1e-15)
    t = np.linspace(0, 2 * np.pi, 50)
    np.testing.assert_allclose(np.abs(o.forward(np.exp(1j * t))), 1, atol=1e-15)
    with pytest.raises(DomainError, match="origin not in G"):
        oracle_eccentric_annulus(0.1, 0.2)


def test_regions():
    assert disk_region(3.0).m == 0
    assert eccentric_annulus_region(0.5, 0.2).m == 1


def test_sign_changes():
    t = 2 * np.pi * np.arange(64) / 64
    assert sign_changes(np.cos(t)) == 2
    assert sign_changes(np.sin(3 * t) + 0.01) == 6
    assert sign_changes(np.ones(8)) == 0


def test_convergence_identity_disk():
    rows = convergence_table(disk_region(), [CanonicalKind.disk()], [16, 32], reference_n=64)
    assert [r.n for r in rows] == [16, 32]
    assert all(r.sup_error <= 1e-13 for r in rows)


def test_convergence_eccentric_annulus():
    o = oracle_eccentric_annulus(0.5, 0.2)
    rows = convergence_table(o.region, [o.kind], [16, 32, 64], reference_n=128)
    errs = [r.sup_error for r in rows]
    assert errs[0] > errs[1] > errs[2]


def test_convergence_rejects_bad_lists():
    with pytest.raises(SlitMapError, match="node sets incomparable"):
        convergence_table(disk_region(), [CanonicalKind.disk()], [24], reference_n=64)
    with pytest.raises(SlitMapError):
        convergence_table(disk_region(), [CanonicalKind.disk()], [32, 16], reference_n=64)


def test_convergence_csv_format():
    rows = convergence_table(disk_region(), [CanonicalKind.disk()], [16], reference_n=32)
    text = convergence_csv(rows)
    lines = text.split("\n")
    assert lines[0] == "kind,n,sup_error,wall_time_ms"
    assert lines[1].startswith("disk,16,") and text.endswith("\n") and "\r" not in text


def test_default_kinds():
    tags = [k.tag for k in default_kinds(seven_ellipse_region())]
    assert tags == ["annulus", "disk", "circular", "radial", "parallel"]
    assert "annulus" not in [k.tag for k in default_kinds(disk_region())]


def test_selftest_passes():
    results = selftest()
    assert len(results) == 6
    for name, ok, detail in results:
        assert ok, f"{name}: {detail}"
