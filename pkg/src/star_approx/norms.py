"""The anchor-parameterized inner product, norm, and induced matrix norm.

For columns v, w whose integrated forms have kernels V(t, s) and W(t, s),
the inner product at anchor s is the classical L2 pairing of V(., s) and
W(., s) on [s, b]. It is a family of inner products indexed by
s in [a, b); the matrix norm it induces is estimated by discretizing the
action on quadrature-weighted samples and taking the largest singular
value, a grid-converged lower estimate of the true supremum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .cheb import ChebSeries, Interval, _unit_nodes, clenshaw_curtis
from .errors import DomainError, ShapeError
from .kernel import SmoothKernel, StarMatrix

_EPS = np.finfo(float).eps


def _check_anchor(interval: Interval, s: float):
    if not (interval.lo - 1e-12 * interval.length <= s < interval.hi):
        raise DomainError(f"anchor {s} outside [{interval.lo}, {interval.hi})")


def _column_kernels(v: StarMatrix) -> list[SmoothKernel]:
    if v.shape[1] != 1:
        raise ShapeError("expected a column")
    return [v[i, 0].theta_compose() for i in range(v.shape[0])]


def star_inner_product(v: StarMatrix, w: StarMatrix, s: float,
                       _kv: list | None = None, _kw: list | None = None) -> complex:
    """Inner product of two columns at anchor ``s``.

    The conjugate-transposed factor is folded into the reduced integral
    over [s, b]; it is never materialized.
    """
    iv = v.interval
    _check_anchor(iv, s)
    kv = _column_kernels(v) if _kv is None else _kv
    kw = _column_kernels(w) if _kw is None else _kw
    if len(kv) != len(kw):
        raise ShapeError("column lengths differ")
    deg = max(k.deg_t for k in kv) + max(k.deg_t for k in kw)
    m = deg + 4
    x, wq = clenshaw_curtis(m)
    half = 0.5 * (iv.hi - s)
    tau = 0.5 * (iv.hi + s) + half * x
    s_arr = np.full_like(tau, s)
    total = 0.0 + 0.0j
    for ki, wi in zip(kv, kw):
        vi = ki(tau, s_arr)
        zi = wi(tau, s_arr)
        total += np.sum(np.conj(vi) * zi * wq)
    return complex(half * total)


def star_norm(v: StarMatrix, s: float, _kv: list | None = None) -> float:
    """Norm at anchor ``s``; imaginary residue is checked then discarded."""
    kv = _column_kernels(v) if _kv is None else _kv
    val = star_inner_product(v, v, s, _kv=kv, _kw=kv)
    if abs(val.imag) > 1e-13 * max(1.0, abs(val.real)):
        raise ValueError(f"inner product not real: {val}")
    return float(np.sqrt(max(val.real, 0.0)))


@dataclass(frozen=True)
class SFamily:
    """Samples of an anchor-indexed quantity on a Chebyshev grid of [a, b)."""

    interval: Interval
    anchors: np.ndarray
    values: np.ndarray

    @classmethod
    def from_function(cls, fn: Callable[[float], float], interval: Interval,
                      n: int = 33) -> "SFamily":
        anchors = interval.from_unit(_unit_nodes(n))[::-1].copy()
        anchors[-1] = interval.hi - 1e-9 * interval.length
        values = np.array([fn(float(s)) for s in anchors])
        return cls(interval, anchors, values)

    def sup(self) -> float:
        return float(np.abs(self.values).max())


def star_norm_family(v: StarMatrix, n: int = 33) -> SFamily:
    """The norm as a function of the anchor, sampled on a grid of [a, b)."""
    kv = _column_kernels(v)
    return SFamily.from_function(lambda s: star_norm(v, s, _kv=kv), v.interval, n)


def _cumulative_integration(unit_nodes: np.ndarray, half: float) -> np.ndarray:
    """Matrix mapping nodal values to values of the primitive anchored at -1."""
    m = unit_nodes.size - 1
    eye = np.eye(m + 1)
    from .cheb import coeffs_from_values
    d = coeffs_from_values(eye.T).T      # columns: coeffs of each cardinal
    anti = npcheb.chebint(d, m=1, scl=half, axis=0)
    vander = npcheb.chebvander(unit_nodes, m + 1)
    anchor = npcheb.chebvander(np.array([-1.0]), m + 1)
    return (vander - anchor) @ anti


def induced_matrix_norm_estimate(a: StarMatrix, s: float, grid: int = 32,
                                 rel_change: float = 1e-6,
                                 max_grid: int = 512) -> float:
    """Largest singular value of the discretized action at anchor ``s``.

    Converges from below to the supremum over the full space; the grid is
    doubled until the estimate is stable to ``rel_change``.
    """
    n, m = a.shape
    if n != m:
        raise ShapeError("matrix must be square")
    if not a.is_theta_type:
        raise ShapeError("induced norm requires a pure triangle-type matrix")
    iv = a.interval
    _check_anchor(iv, s)
    composed = a.theta_compose()
    c_theta = np.empty((n, n), dtype=object)
    c_delta = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            k = composed[i, j]
            c_theta[i, j] = (-k.derivative_s()).trimmed()
            c_delta[i, j] = k.diag_trace()
    prev = None
    k_nodes = grid
    while True:
        est = _operator_norm_on_grid(c_theta, c_delta, iv, s, k_nodes)
        if prev is not None and abs(est - prev) <= rel_change * max(est, _EPS):
            return est
        if k_nodes >= max_grid:
            return est
        prev = est
        k_nodes *= 2


def _operator_norm_on_grid(c_theta, c_delta, iv: Interval, s: float,
                           m: int) -> float:
    n = c_theta.shape[0]
    x, wq = clenshaw_curtis(m)
    half = 0.5 * (iv.hi - s)
    tau = 0.5 * (iv.hi + s) + half * x          # descending, tau[-1] = s
    q = _cumulative_integration(x, half)
    nn = (m + 1) * n
    big = np.zeros((nn, nn), dtype=complex)
    tj = tau[:, None] + np.zeros((1, m + 1))
    tk = tau[None, :] + np.zeros((m + 1, 1))
    diag_idx = np.arange(m + 1)
    # node-major flattening: row index = node * n + component
    for i in range(n):
        for j in range(n):
            block = big[i::n, j::n]
            block += q * c_theta[i, j](tj, tk)
            block[diag_idx, diag_idx] += c_delta[i, j](tau)
    w = np.sqrt(np.maximum(np.repeat(half * wq, n), 0.0))
    scaled = (w[:, None] * big) / np.maximum(w[None, :], _EPS)
    sv = np.linalg.svd(scaled, compute_uv=False)
    return float(sv[0]) if sv.size else 0.0
