import math
import warnings

import numpy as np
import pytest

from slitmap import CanonicalKind, solve_map
from slitmap.canonical import (
    _gamma_mu_increment,
    boundary_values,
    build_rhs,
    default_alpha,
    default_z1,
    gamma_mu,
    recover_parameters,
    validate_kind,
)
from slitmap.errors import DomainError, NumericalError
from slitmap.geometry import CurveSpec, build_region, sample_boundary
from slitmap.kernel import assemble_system
from slitmap.solver import chi_densities, trig_antiderivative
from slitmap.verify import derivative_defect, shape_defect, sign_changes

from conftest import SEVEN_ALPHA, SEVEN_Z1, seven_kinds

ECC_R1 = 0.27187786697489014  # frozen from the Moebius closed form


def two_hole_region():
    return build_region(
        [
            CurveSpec.circle(0, 1),
            CurveSpec.circle(0.5, 0.2, clockwise=True),
            CurveSpec.circle(-0.5, 0.2, clockwise=True),
        ]
    )


def test_kind_constructors():
    assert CanonicalKind.parallel().delta == pytest.approx(math.pi / 4)
    assert CanonicalKind.parallel(math.pi / 2).rotation == pytest.approx(1.0)
    assert CanonicalKind.circular(0.5).has_pole and not CanonicalKind.disk().has_pole
    with pytest.raises(ValueError):
        CanonicalKind("spiral")
    with pytest.raises(ValueError):
        CanonicalKind("annulus")
    with pytest.raises(ValueError):
        CanonicalKind("radial")
    np.testing.assert_array_equal(CanonicalKind.annulus(0.5).winding(3), [1, -1, 0])
    np.testing.assert_array_equal(CanonicalKind.disk().winding(3), [1, 0, 0])
    np.testing.assert_array_equal(CanonicalKind.parallel().winding(3), [0, 0, 0])


def test_rhs_annulus_two_holes():
    d = sample_boundary(two_hole_region(), 4)
    np.testing.assert_array_equal(build_rhs(CanonicalKind.annulus(0.5), d), [1] * 4 + [-1] * 4 + [0] * 4)


def test_rhs_circular_node_pi(unit_disk):
    d = sample_boundary(unit_disk, 4)
    assert build_rhs(CanonicalKind.circular(0.5), d)[2] == pytest.approx(-2 / 3, abs=1e-15)


def test_rhs_parallel_vertical(unit_disk):
    d = sample_boundary(unit_disk, 16)
    np.testing.assert_allclose(build_rhs(CanonicalKind.parallel(math.pi / 2), d), -2 * np.cos(d.t), atol=1e-15)


def test_validation_errors(unit_disk):
    with pytest.raises(DomainError, match="needs at least one hole"):
        validate_kind(CanonicalKind.annulus(0.5), unit_disk)
    shifted = build_region([CurveSpec.circle(3, 1)])
    with pytest.raises(DomainError, match="origin not in G"):
        validate_kind(CanonicalKind.disk(), shifted)
    ann = two_hole_region()
    for z1 in (0.0, 2.0, -0.5):  # interior, outside, wrong hole
        with pytest.raises(DomainError, match="invalid auxiliary point"):
            validate_kind(CanonicalKind.annulus(z1), ann)
    for alpha in (0.0, 1.0, 2.0, 0.5):  # zero, boundary, outside, in a hole
        with pytest.raises(DomainError, match="invalid auxiliary point"):
            validate_kind(CanonicalKind.circular(alpha), ann)
    validate_kind(CanonicalKind.radial(0.5j), ann)


def test_defaults(seven):
    assert default_z1(seven) == pytest.approx(SEVEN_Z1, abs=1e-3)
    assert default_alpha(seven) == pytest.approx(SEVEN_ALPHA, abs=1e-12)


def test_gamma_mu_disk(unit_disk):
    d = sample_boundary(unit_disk, 16)
    gm = gamma_mu(CanonicalKind.disk(), d)
    np.testing.assert_allclose(gm.real, 0, atol=1e-15)
    np.testing.assert_allclose(gm.imag, -d.t, atol=1e-14)


def test_gamma_mu_scaled_disk():
    d = sample_boundary(build_region([CurveSpec.circle(0, 2.5)]), 16)
    gm = gamma_mu(CanonicalKind.disk(), d)
    np.testing.assert_allclose(gm.real, -math.log(2.5), atol=1e-15)
    np.testing.assert_allclose(gm.imag, -d.t, atol=1e-14)


def test_gamma_mu_parallel(unit_disk):
    d = sample_boundary(unit_disk, 16)
    gm = gamma_mu(CanonicalKind.parallel(math.pi / 2), d)
    np.testing.assert_allclose(gm, -np.exp(-1j * d.t), atol=1e-15)


def test_gamma_mu_continuous_on_seven_ellipses(seven):
    d = sample_boundary(seven, 128)
    for kind in seven_kinds():
        gm = d.per_curve(gamma_mu(kind, d))
        assert np.max(np.abs(np.diff(gm, axis=1))) < 0.5


def test_gamma_mu_zero_argument():
    region = two_hole_region()
    d = sample_boundary(region, 8)
    with pytest.raises(DomainError, match="auxiliary point on boundary"):
        _gamma_mu_increment(CanonicalKind.annulus(complex(d.eta[0])), d)


def test_recover_identity(unit_disk):
    d = sample_boundary(unit_disk, 16)
    kind = CanonicalKind.disk()
    phis = chi_densities(assemble_system(d))
    rho = trig_antiderivative(np.ones((1, 16)))
    R, c, ck = recover_parameters(kind, gamma_mu(kind, d), rho, phis, d)
    assert c == pytest.approx(1.0, abs=1e-15)
    assert R[0] == 1.0 and ck[0] == pytest.approx(0.0, abs=1e-15)


def test_recover_rejects_nonfinite(unit_disk):
    d = sample_boundary(unit_disk, 16)
    kind = CanonicalKind.disk()
    rho = trig_antiderivative(np.ones((1, 16)))
    with pytest.raises(NumericalError, match="parameter recovery failed"):
        recover_parameters(kind, gamma_mu(kind, d), rho, np.full((1, 16), np.nan), d)


@pytest.mark.parametrize("r", [1.0, 0.4, 3.0])
def test_solve_scaled_disk(r):
    region = build_region([CurveSpec.circle(0, r)])
    sol = solve_map(region, CanonicalKind.disk(), 16)
    np.testing.assert_allclose(sol.theta_prime, 1, atol=1e-14)
    np.testing.assert_allclose(sol.theta[0], sol.disc.t, atol=1e-13)
    assert sol.c == pytest.approx(1 / r, rel=1e-14)


def test_identity_boundary_values(unit_disk):
    sol = solve_map(unit_disk, CanonicalKind.disk(), 16)
    np.testing.assert_allclose(sol.omega, np.exp(1j * sol.disc.t), atol=1e-14)
    np.testing.assert_allclose(sol.domega, 1, atol=1e-14)


def test_radial_disk_boundary(unit_disk):
    a = 0.5
    sol = solve_map(unit_disk, CanonicalKind.radial(a), 64)
    z = sol.disc.eta
    np.testing.assert_allclose(np.abs(sol.omega), np.abs(z - a) ** 2 / a, atol=1e-13)
    assert sol.R[0] % (2 * np.pi) == pytest.approx(np.pi, abs=1e-13)


def test_boundary_values_parallel_offset(unit_disk):
    d = sample_boundary(unit_disk, 8)
    kind = CanonicalKind.parallel(0.3)
    w, _ = boundary_values(kind, d, np.linspace(-1, 1, 8)[None, :], np.ones((1, 8)), np.array([0.7]))
    np.testing.assert_allclose(np.real(kind.rotation * w), 0.7, atol=1e-15)


def test_eccentric_annulus_n128():
    region = build_region([CurveSpec.circle(0, 1), CurveSpec.circle(0.5, 0.2, clockwise=True)])
    sol = solve_map(region, CanonicalKind.annulus(0.5), 128)
    assert abs(sol.R[1] - ECC_R1) <= 1e-8


def test_system_mismatch_rejected(seven, unit_disk):
    s = assemble_system(sample_boundary(unit_disk, 16))
    with pytest.raises(ValueError):
        solve_map(seven, CanonicalKind.disk(), 16, system=s)


def test_coarse_solve_warns(seven):
    with pytest.warns(RuntimeWarning, match="not periodic"):
        sol = solve_map(seven, CanonicalKind.annulus(SEVEN_Z1), 16)
    assert sol.residuals["periodicity"] > 1e-8


# properties of the n=256 seven-ellipse solutions --------------------------


@pytest.mark.parametrize("tag", ["annulus", "disk", "circular", "radial", "parallel"])
def test_seven_invariants(seven_solutions_256, tag):
    _, sols = seven_solutions_256
    sol = sols[tag]
    assert sol.residuals["linear_system"] <= 1e-12
    assert sol.residuals["winding"] <= 1e-10
    assert sol.residuals["periodicity"] <= 1e-8
    assert shape_defect(sol) <= 1e-8
    assert derivative_defect(sol) <= 1e-8
    if tag in ("annulus", "disk"):
        assert sol.R[0] == 1.0 and sol.c > 0
    if tag in ("annulus", "disk", "circular"):
        assert np.all(sol.R > 0)


def test_annulus_holes_inside_unit_disk(seven_solutions_256):
    R = seven_solutions_256[1]["annulus"].R
    # hole 1 is the inner circle; every other hole is a slit between R1 and 1
    assert np.all(R[2:] < 1) and np.all(R[2:] > R[1])


@pytest.mark.parametrize("tag", ["annulus", "disk", "circular", "radial", "parallel"])
def test_slit_closure(seven_solutions_256, tag):
    sol = seven_solutions_256[1][tag]
    h = sol.kind.winding(7)
    for k in range(7):
        if h[k] == 0:
            assert sign_changes(sol.theta_prime[k]) == 2, (tag, k)
        else:
            assert np.all(np.sign(sol.theta_prime[k]) == np.sign(h[k]))


def test_matrix_kind_independent(seven):
    mats = []
    for kind in seven_kinds():
        s = assemble_system(sample_boundary(seven, 32))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            solve_map(seven, kind, 32, system=s)
        mats.append(s.matrix.tobytes())
    assert len(set(mats)) == 1


def test_shared_system_gives_same_answer(seven, seven_solutions_256):
    system, sols = seven_solutions_256
    alone = solve_map(seven, CanonicalKind.circular(SEVEN_ALPHA), 256)
    np.testing.assert_allclose(alone.omega, sols["circular"].omega, atol=1e-13)
