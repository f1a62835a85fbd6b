"""Independent reference computations used by the tests.

These deliberately avoid the package's own fast paths: products are
checked against generic adaptive quadrature, minimax polynomials against
a discrete linear program, propagators against dense matrix exponentials.
"""

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from scipy.integrate import quad
from scipy.optimize import linprog


def convolution_quadrature(f1, f2, t, s):
    """(f1 * f2)(t, s) = int_s^t f1(t, u) f2(u, s) du by adaptive quadrature."""
    re, _ = quad(lambda u: np.real(f1(t, u) * f2(u, s)), s, t, limit=200,
                 epsabs=1e-12, epsrel=1e-12)
    im, _ = quad(lambda u: np.imag(f1(t, u) * f2(u, s)), s, t, limit=200,
                 epsabs=1e-12, epsrel=1e-12)
    return re + 1j * im


def l2_integral(fn, lo, hi):
    val, _ = quad(fn, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-13)
    return val


def discrete_minimax_exp(lo, hi, n, n_grid=10_000):
    """Brute-force minimax of exp on a dense grid via linear programming.

    Returns the optimal discrete sup error. Chebyshev basis keeps the LP
    well conditioned.
    """
    x = np.linspace(lo, hi, n_grid)
    u = (2.0 * x - lo - hi) / (hi - lo)
    phi = npcheb.chebvander(u, n)
    f = np.exp(x)
    ones = np.ones((n_grid, 1))
    a_ub = np.vstack([np.hstack([phi, -ones]), np.hstack([-phi, -ones])])
    b_ub = np.concatenate([f, -f])
    c = np.zeros(n + 2)
    c[-1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (n + 2),
                  method="highs")
    assert res.success, res.message
    return float(res.x[-1])


def triangle_pairs(rng, interval, count):
    """Random (t, s) pairs with t >= s inside the interval."""
    a = rng.uniform(interval.lo, interval.hi, count)
    b = rng.uniform(interval.lo, interval.hi, count)
    return np.maximum(a, b), np.minimum(a, b)
