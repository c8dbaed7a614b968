import math
import warnings

import numpy as np
import pytest

from slitmap import CanonicalKind, solve_map
from slitmap.geometry import CurveSpec, build_region, sample_boundary, seven_ellipse_region
from slitmap.kernel import assemble_system
from slitmap.solver import chi_densities

SEVEN_Z1 = 1.5 + 1.0j
SEVEN_ALPHA = -0.5 - 0.3j


def seven_kinds():
    return [
        CanonicalKind.annulus(SEVEN_Z1),
        CanonicalKind.disk(),
        CanonicalKind.circular(SEVEN_ALPHA),
        CanonicalKind.radial(SEVEN_ALPHA),
        CanonicalKind.parallel(math.pi / 4),
    ]


@pytest.fixture(scope="session")
def seven():
    return seven_ellipse_region()


@pytest.fixture(scope="session")
def unit_disk():
    return build_region([CurveSpec.circle(0, 1.0)])


@pytest.fixture(scope="session")
def seven_solutions_256(seven):
    """All five kinds on the seven-curve region, sharing one factorization."""
    system = assemble_system(sample_boundary(seven, 256))
    phis = chi_densities(system)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        sols = {k.tag: solve_map(seven, k, 256, system=system, phis=phis) for k in seven_kinds()}
    return system, sols


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)
