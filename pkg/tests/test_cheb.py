import numpy as np
import pytest

from star_approx.cheb import ChebSeries, Interval, clenshaw_curtis
from star_approx.errors import DomainError, UnresolvedFunctionError


def test_interval_validation():
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)
    with pytest.raises(DomainError):
        Interval(0.0, np.inf)
    iv = Interval(-1.0, 3.0)
    assert iv.length == 4.0
    assert iv.contains(2.9999)
    assert not iv.contains(3.1)


def test_fit_constant_is_single_coefficient():
    s = ChebSeries.fit(lambda t: 1.0, Interval(0.0, 1.0))
    assert s.coeffs.shape == (1,)
    assert s.coeffs[0] == pytest.approx(1.0, abs=1e-15)


def test_fit_identity_basis_function():
    s = ChebSeries.fit(lambda t: t, Interval(-1.0, 1.0))
    assert s.degree == 1
    np.testing.assert_allclose(s.coeffs, [0.0, 1.0], atol=1e-14)


def test_fit_cos_offgrid_accuracy(iv02):
    s = ChebSeries.fit(np.cos, iv02, tol=1e-13)
    rng = np.random.default_rng(3)
    ts = rng.uniform(0.0, 2.0, 100)
    assert np.abs(s(ts) - np.cos(ts)).max() <= 1e-12


def test_eval_trivial_and_domain():
    iv = Interval(-1.0, 1.0)
    const = ChebSeries(iv, [1.0])
    assert const(0.33) == pytest.approx(1.0)
    lin = ChebSeries(iv, [0.0, 1.0])
    assert lin(0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        lin(1.5)
    assert lin(1.5, out_of_domain="clamp") == pytest.approx(1.0)


def test_eval_fit_cos_at_point(iv02, cos_series):
    assert cos_series(1.0) == pytest.approx(np.cos(1.0), abs=1e-12)


def test_antiderivative_examples(iv02):
    one = ChebSeries.constant(1.0, Interval(0.0, 1.0))
    t_fun = one.antiderivative(0.0)
    xs = np.linspace(0, 1, 17)
    np.testing.assert_allclose(t_fun(xs), xs, atol=1e-14)

    cos_fit = ChebSeries.fit(np.cos, iv02)
    sin_fit = cos_fit.antiderivative(0.0)
    xs = np.linspace(0, 2, 33)
    assert np.abs(sin_fit(xs) - np.sin(xs)).max() <= 1e-12
    assert sin_fit(0.0) == pytest.approx(0.0, abs=1e-15)

    mid_anchored = cos_fit.antiderivative(1.0)
    assert abs(mid_anchored(1.0)) <= 1e-14


def test_antiderivative_anchor_outside():
    s = ChebSeries.constant(1.0, Interval(0.0, 1.0))
    with pytest.raises(DomainError):
        s.antiderivative(2.0)


def test_derivative_examples():
    iv = Interval(0.0, 1.0)
    assert ChebSeries.constant(5.0, iv).derivative().max_abs() == 0.0
    sq = ChebSeries.fit(lambda t: t ** 2, iv)
    xs = np.linspace(0, 1, 21)
    assert np.abs(sq.derivative()(xs) - 2 * xs).max() <= 1e-12


def test_derivative_antiderivative_roundtrip(iv02, cos_series):
    back = cos_series.antiderivative(0.0).derivative()
    xs = np.linspace(0, 2, 50)
    assert np.abs(back(xs) - np.cos(xs)).max() <= 1e-10


def test_linearity_of_fit_and_calculus(iv02):
    rng = np.random.default_rng(4)
    a = ChebSeries.fit(np.cos, iv02)
    b = ChebSeries.fit(np.exp, iv02)
    alpha = rng.normal()
    combo = a * alpha + b
    xs = rng.uniform(0, 2, 40)
    np.testing.assert_allclose(combo(xs), alpha * np.cos(xs) + np.exp(xs),
                               rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(
        combo.antiderivative(0.0)(xs),
        (a.antiderivative(0.0) * alpha + b.antiderivative(0.0))(xs),
        rtol=1e-12, atol=1e-13)


def test_pointwise_product_and_max_abs(iv02):
    c = ChebSeries.fit(np.cos, iv02)
    prod = c * c
    xs = np.linspace(0, 2, 30)
    np.testing.assert_allclose(prod(xs), np.cos(xs) ** 2, atol=1e-13)
    assert prod.max_abs() == pytest.approx(1.0, abs=1e-10)


def test_unresolved_function_raises():
    with pytest.raises(UnresolvedFunctionError) as info:
        ChebSeries.fit(lambda t: np.abs(t - 0.5677), Interval(0.0, 1.0),
                       tol=1e-13, max_degree=512)
    assert info.value.achieved is not None
    assert info.value.achieved > 0


def test_clenshaw_curtis_exactness():
    x, w = clenshaw_curtis(12)
    for k in range(0, 13):
        exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        assert (w * x ** k).sum() == pytest.approx(exact, abs=1e-14)


def test_complex_coefficients_roundtrip(iv01):
    f = lambda t: np.cos(t) + 1j * np.sin(2 * t)
    s = ChebSeries.fit(f, iv01)
    xs = np.linspace(0, 1, 23)
    np.testing.assert_allclose(s(xs), f(xs), atol=1e-13)
    np.testing.assert_allclose(s.conj()(xs), np.conj(f(xs)), atol=1e-13)
