import numpy as np
import pytest

from star_approx.approx import PolynomialBasisL2
from star_approx.cheb import ChebSeries, Interval
from star_approx.odesolve import reference_solve
from star_approx.problems import load_config
from star_approx.spectral import analytic_eigendecompose, commutation_residual


@pytest.fixture(scope="session")
def iv01():
    return Interval(0.0, 1.0)


@pytest.fixture(scope="session")
def iv02():
    return Interval(0.0, 2.0)


@pytest.fixture(scope="session")
def cos_series(iv02):
    return ChebSeries.fit(np.cos, iv02)


@pytest.fixture(scope="session")
def commuting_bundle():
    """Everything the bound-chain tests need for the bundled commuting problem."""
    cfg = load_config("commuting_demo")
    curve = cfg.build_curve()
    v, scale = cfg.normalized_vector()
    deco = analytic_eigendecompose(curve)
    comm = max(commutation_residual(deco, j) for j in range(deco.dim))
    reference = reference_solve(curve, v, 1e-13)
    workspace = PolynomialBasisL2(curve.to_star_matrix(), v, 12,
                                  curve.interval.lo, reference)
    return {
        "config": cfg,
        "curve": curve,
        "v": v,
        "scale": scale,
        "deco": deco,
        "commutation": comm,
        "reference": reference,
        "workspace": workspace,
    }


@pytest.fixture(scope="session")
def rotating_deco():
    cfg = load_config("rotating_2x2")
    curve = cfg.build_curve()
    return curve, analytic_eigendecompose(curve)
