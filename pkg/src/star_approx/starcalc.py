"""Closed-form powers, truncated resolvents, polynomial application,
and propagation to solution values.

For a triangle element with kernel f(t) independent of s, its n-th
product power and the integrated power have explicit kernels built from
the primitive F of f:

    power n:             f(t) (F(t) - F(s))^(n-1) / (n-1)!
    integrated power n:  (F(t) - F(s))^n / n!

These closed forms are the fast path and the oracle for the quadrature
route. Polynomial application uses Horner's scheme in the algebra; the
explicit power-sum route is kept as a self-check.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .cheb import ChebSeries, DEFAULT_TOL, Interval
from .errors import DomainError, ShapeError
from .kernel import SmoothKernel, StarElement, StarMatrix

MAX_POLY_DEGREE = 64


class StarPolynomial:
    """Polynomial in the algebra: coefficients alpha_0..alpha_n."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if coeffs.size == 0:
            raise ValueError("empty coefficient list")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("StarPolynomial is immutable")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def resolvent_truncation(cls, m: int) -> "StarPolynomial":
        """All-ones coefficients up to degree m (iterated-kernel truncation)."""
        if m < 0:
            raise ValueError("degree must be >= 0")
        return cls(np.ones(m + 1))

    def __repr__(self):
        return f"StarPolynomial(degree={self.degree})"


def _bracket(f: ChebSeries) -> SmoothKernel:
    """Kernel F(t) - F(s) with F the primitive of f anchored at the left end."""
    F = f.antiderivative(f.interval.lo)
    return SmoothKernel.from_t_series(F) - SmoothKernel.from_s_series(F)


def _bracket_power(bracket: SmoothKernel, n: int) -> SmoothKernel:
    """bracket^n with re-trimming per multiply to control degree growth."""
    out = SmoothKernel.constant(1.0, bracket.interval, bracket.tol)
    for _ in range(n):
        out = out.mul(bracket).trimmed()
    return out


def star_power_closed_form(f: ChebSeries, n: int) -> SmoothKernel:
    """Kernel of the n-th power of the element with kernel f(t)."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if n == 1:
        return SmoothKernel.from_t_series(f)
    br = _bracket_power(_bracket(f), n - 1)
    return br.mul(SmoothKernel.from_t_series(f)).scaled(1.0 / factorial(n - 1)).trimmed()


def theta_star_power_closed_form(f: ChebSeries, n: int) -> SmoothKernel:
    """Kernel of the integrated n-th power; n = 0 gives the constant one."""
    if n < 0:
        raise ValueError("power must be >= 0")
    if n == 0:
        return SmoothKernel.constant(1.0, f.interval, f.tol)
    return _bracket_power(_bracket(f), n).scaled(1.0 / factorial(n))


def star_poly_apply(p: StarPolynomial, a: StarMatrix, v,
                    method: str = "horner") -> StarMatrix:
    """Apply the polynomial of a triangle-type square matrix to a vector.

    Returns the column p(A) applied to the impulse embedding of ``v``.
    ``method`` is "horner" (default) or "powers" (explicit accumulation,
    retained as a cross-check oracle).
    """
    n, m = a.shape
    if n != m:
        raise ShapeError("matrix must be square")
    v = np.asarray(v)
    if v.size != n:
        raise ShapeError(f"vector length {v.size} != {n}")
    if not a.is_theta_type:
        raise ShapeError("matrix must be pure triangle type")
    iv = a.interval
    vdelta = StarMatrix.delta_column(v, iv)
    alphas = p.coeffs
    if method == "horner":
        out = vdelta.scaled(alphas[-1])
        for k in range(p.degree - 1, -1, -1):
            out = a.star(out) + vdelta.scaled(alphas[k])
        return out
    if method == "powers":
        out = vdelta.scaled(alphas[0])
        term = vdelta
        for k in range(1, p.degree + 1):
            term = a.star(term)
            out = out + term.scaled(alphas[k])
        return out
    raise ValueError(f"unknown method {method!r}")


def truncated_resolvent_apply(a: StarMatrix, v, m: int,
                              method: str = "horner") -> StarMatrix:
    """Iterated-kernel (Neumann) truncation of the resolvent applied to v."""
    return star_poly_apply(StarPolynomial.resolvent_truncation(m), a, v,
                           method=method)


def propagate(x: StarMatrix, t, s0: float) -> np.ndarray:
    """Evaluate the integrated column at times ``t`` from start ``s0``.

    Applies the left integration action entrywise (impulse parts contribute
    their value at ``s0``, constant in t) and evaluates at (t, s0). ``t``
    may be a scalar or array; returns shape ``t.shape + (N,)`` (vector for
    scalar t).
    """
    n, m = x.shape
    if m != 1:
        raise ShapeError("propagate expects a column")
    iv = x.interval
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < s0):
        raise DomainError("evaluation time precedes the start time")
    if not iv.contains(s0) or not iv.contains(t_arr):
        raise DomainError("times outside the interval")
    out = np.zeros(t_arr.shape + (n,), dtype=complex)
    s_arr = np.full_like(t_arr, s0)
    for i in range(n):
        k = x[i, 0].theta_compose()
        out[..., i] = k(t_arr, s_arr)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return out[0]
    return out
