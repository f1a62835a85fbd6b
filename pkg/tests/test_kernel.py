import numpy as np
import pytest

from star_approx.cheb import ChebSeries, Interval
from star_approx.errors import IntervalMismatchError, ShapeError
from star_approx.kernel import (
    SmoothKernel,
    StarElement,
    StarMatrix,
    deltaprime_act_left,
    deltaprime_act_right,
    hermitian_transpose,
    matrix_star_product,
    star_product,
    theta_act_left,
    theta_act_right,
)

from .oracles import convolution_quadrature, triangle_pairs


@pytest.fixture()
def rng():
    return np.random.default_rng(11)


def random_element(rng, iv, complex_valued=True):
    decay = np.outer(0.6 ** np.arange(5), 0.6 ** np.arange(5))
    c = rng.normal(size=(5, 5)) * decay
    if complex_valued:
        c = c + 1j * rng.normal(size=(5, 5)) * decay
    theta = SmoothKernel(iv, c)
    delta = None
    if rng.uniform() > 0.4:
        dc = rng.normal(size=4) * 0.6 ** np.arange(4)
        delta = ChebSeries(iv, dc)
    return StarElement(iv, theta=theta, delta=delta)


def element_gap(a, b):
    d = a - b
    gap = 0.0
    if d.theta is not None:
        gap = max(gap, d.theta.max_abs_triangle())
    if d.delta is not None:
        gap = max(gap, d.delta.max_abs())
    return gap


# -- star_product ----------------------------------------------------------

def test_identity_element_both_sides(iv02, rng):
    delta = StarElement.identity(iv02)
    for _ in range(5):
        x = random_element(rng, iv02)
        assert element_gap(delta.star(x), x) <= 1e-11
        assert element_gap(x.star(delta), x) <= 1e-11


def test_theta_squared_is_t_minus_s(iv02):
    theta = StarElement.heaviside(iv02)
    r = theta.star(theta)
    assert r.delta is None
    ts, ss = triangle_pairs(np.random.default_rng(0), iv02, 25)
    np.testing.assert_allclose(r.theta(ts, ss), ts - ss, atol=1e-13)


def test_integration_action_of_cos(iv02, cos_series):
    # integrating element applied from the left: primitive anchored on the diagonal
    theta = StarElement.heaviside(iv02)
    x = StarElement.from_univariate_t(cos_series)
    r = theta.star(x)
    ts, ss = triangle_pairs(np.random.default_rng(1), iv02, 50)
    assert np.abs(r.theta(ts, ss) - (np.sin(ts) - np.sin(ss))).max() <= 1e-10


def test_quadrature_oracle_random_pairs(iv02, cos_series, rng):
    x = StarElement.from_univariate_t(cos_series)
    theta = StarElement.heaviside(iv02)
    for a, b, fa, fb in [
        (theta, x, lambda t, u: 1.0, lambda u, s: np.cos(u)),
        (x, theta, lambda t, u: np.cos(t), lambda u, s: 1.0),
    ]:
        r = a.star(b)
        ts, ss = triangle_pairs(rng, iv02, 12)
        for t, s in zip(ts, ss):
            want = convolution_quadrature(fa, fb, t, s)
            assert abs(r.theta(t, s) - want) <= 1e-10


def test_product_of_general_kernels_vs_oracle(iv02, rng):
    f = SmoothKernel.fit(lambda t, s: np.cos(t) * np.exp(0.3 * s), iv02)
    g = SmoothKernel.fit(lambda t, s: np.sin(0.5 * t + s), iv02)
    r = StarElement(iv02, theta=f).star(StarElement(iv02, theta=g))
    ts, ss = triangle_pairs(rng, iv02, 10)
    for t, s in zip(ts, ss):
        want = convolution_quadrature(
            lambda tt, u: np.cos(tt) * np.exp(0.3 * u),
            lambda u, sS: np.sin(0.5 * u + sS), t, s)
        assert abs(r.theta(t, s) - want) <= 1e-10


def test_interval_mismatch_rejected():
    a = StarElement.heaviside(Interval(0.0, 1.0))
    b = StarElement.heaviside(Interval(0.0, 2.0))
    with pytest.raises(IntervalMismatchError):
        a.star(b)


# -- matrix product -----------------------------------------------------------

def test_matrix_identity_and_scalar_degenerate(iv02, cos_series, rng):
    x = StarElement.from_univariate_t(cos_series)
    m = StarMatrix(iv02, [[x, StarElement.heaviside(iv02)],
                          [StarElement.identity(iv02), x]])
    im = StarMatrix.identity(2, iv02)
    prod = matrix_star_product(im, m)
    for i in range(2):
        for j in range(2):
            assert element_gap(prod[i, j], m[i, j]) <= 1e-11

    a11 = StarMatrix(iv02, [[x]])
    b11 = StarMatrix(iv02, [[StarElement.heaviside(iv02)]])
    assert element_gap(a11.star(b11)[0, 0], star_product(
        x, StarElement.heaviside(iv02))) == 0.0


def test_matrix_associativity_random_3x3(iv02, rng):
    def random_theta_matrix():
        rows = []
        for _ in range(3):
            row = []
            for _ in range(3):
                decay = np.outer(0.5 ** np.arange(4), 0.5 ** np.arange(4))
                row.append(StarElement(
                    iv02, theta=SmoothKernel(iv02, rng.normal(size=(4, 4)) * decay)))
            rows.append(row)
        return StarMatrix(iv02, rows)

    x, y, z = (random_theta_matrix() for _ in range(3))
    left = x.star(y).star(z)
    right = x.star(y.star(z))
    worst = max(element_gap(left[i, j], right[i, j])
                for i in range(3) for j in range(3))
    assert worst <= 1e-9


def test_matrix_shape_mismatch(iv02):
    a = StarMatrix.zeros(2, 3, iv02)
    b = StarMatrix.zeros(2, 3, iv02)
    with pytest.raises(ShapeError):
        a.star(b)


# -- actions ---------------------------------------------------------------

def test_theta_act_left_examples(iv02, cos_series):
    one = SmoothKernel.constant(1.0, iv02)
    r = theta_act_left(one)
    ts, ss = triangle_pairs(np.random.default_rng(5), iv02, 20)
    np.testing.assert_allclose(r(ts, ss), ts - ss, atol=1e-13)

    r2 = theta_act_left(SmoothKernel.from_t_series(cos_series))
    np.testing.assert_allclose(r2(ts, ss), np.sin(ts) - np.sin(ss), atol=1e-12)


def test_theta_act_right_is_integration_in_second_argument(iv02, cos_series):
    k = SmoothKernel.from_t_series(cos_series)   # kernel cos(t), constant in s
    r = theta_act_right(k)
    ts, ss = triangle_pairs(np.random.default_rng(6), iv02, 20)
    np.testing.assert_allclose(r(ts, ss), np.cos(ts) * (ts - ss), atol=1e-12)


def test_theta_act_matches_quadrature_path(iv02, rng):
    theta = StarElement.heaviside(iv02)
    for _ in range(5):
        decay = np.outer(0.6 ** np.arange(5), 0.6 ** np.arange(5))
        f = SmoothKernel(iv02, rng.normal(size=(5, 5)) * decay)
        spectral = theta_act_left(f)
        quad = theta.star(StarElement(iv02, theta=f)).theta
        assert (spectral - quad).max_abs_triangle() <= 1e-10


def test_deltaprime_left_examples(iv02):
    # kernel (t - s): differentiation gives the unit kernel with no impulse part
    tm_s = SmoothKernel.fit(lambda t, s: t - s, iv02)
    elem = deltaprime_act_left(tm_s)
    assert (elem.theta - SmoothKernel.constant(1.0, iv02)).max_abs_triangle() <= 1e-13
    assert elem.delta.max_abs() <= 1e-13

    # s-independent kernel g(t): derivative plus diagonal impulse g(t)
    g = ChebSeries.fit(lambda t: np.exp(0.4 * t), iv02)
    elem2 = deltaprime_act_left(SmoothKernel.from_t_series(g))
    ts = np.linspace(0, 2, 15)
    np.testing.assert_allclose(elem2.delta(ts), np.exp(0.4 * ts), atol=1e-12)
    np.testing.assert_allclose(elem2.theta(ts, np.zeros_like(ts)),
                               0.4 * np.exp(0.4 * ts), atol=1e-12)


def test_deltaprime_inverts_theta_action(iv02, rng):
    decay = np.outer(0.6 ** np.arange(6), 0.6 ** np.arange(6))
    f = SmoothKernel(iv02, rng.normal(size=(6, 6)) * decay
                     + 1j * rng.normal(size=(6, 6)) * decay)
    back = deltaprime_act_left(theta_act_left(f))
    assert (back.theta - f).max_abs_triangle() <= 1e-10
    assert back.delta.max_abs() <= 1e-10


def test_deltaprime_right_rule(iv02):
    f = SmoothKernel.fit(lambda t, s: np.exp(0.2 * t) * np.cos(s), iv02)
    elem = deltaprime_act_right(f)
    ts, ss = triangle_pairs(np.random.default_rng(8), iv02, 20)
    np.testing.assert_allclose(elem.theta(ts, ss),
                               np.exp(0.2 * ts) * np.sin(ss), atol=1e-12)
    xs = np.linspace(0, 2, 9)
    np.testing.assert_allclose(elem.delta(xs),
                               np.exp(0.2 * xs) * np.cos(xs), atol=1e-12)


# -- hermitian transpose ----------------------------------------------------

def test_hermitian_transpose_identity_and_symmetric(iv02, cos_series):
    im = StarMatrix.identity(2, iv02)
    imh = hermitian_transpose(im)
    for i in range(2):
        for j in range(2):
            gap = element_gap(imh[i, j], im[i, j])
            assert gap == 0.0

    x = StarElement.from_univariate_t(cos_series)
    sym = StarMatrix(iv02, [[x, x], [x, x]])
    symh = sym.hermitian_transpose()
    for i in range(2):
        for j in range(2):
            assert element_gap(symh[i, j], sym[i, j]) == 0.0


def test_hermitian_transpose_involution_bitwise(iv02, rng):
    rows = [[random_element(rng, iv02) for _ in range(2)] for _ in range(3)]
    m = StarMatrix(iv02, rows)
    back = m.hermitian_transpose().hermitian_transpose()
    for i in range(3):
        for j in range(2):
            a, b = m[i, j], back[i, j]
            if a.theta is not None:
                assert np.array_equal(a.theta.coeffs, b.theta.coeffs)
            if a.delta is not None:
                assert np.array_equal(a.delta.coeffs, b.delta.coeffs)


def test_zero_detection_canonicalizes(iv02):
    x = StarElement.heaviside(iv02)
    diff = x - x
    assert diff.is_zero
