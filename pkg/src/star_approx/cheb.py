"""Univariate analytic-function engine on Chebyshev series.

Every smooth one-variable object in the package (entry functions of the
system matrix, eigencurves, primitives, diagonal traces) is stored as a
finite first-kind Chebyshev series mapped affinely onto its interval.
Construction is adaptive: the sampling grid is doubled until the
coefficient tail falls below the requested tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from scipy import fft as sp_fft

from .errors import DomainError, UnresolvedFunctionError

DEFAULT_TOL = 1e-13
MAX_DEGREE = 2 ** 14
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Interval:
    """Closed bounded time interval [lo, hi], lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise DomainError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def to_unit(self, t):
        """Map t in [lo, hi] to x in [-1, 1]."""
        return (np.asarray(t) - self.mid) / self.half

    def from_unit(self, x):
        return self.mid + self.half * np.asarray(x)

    def contains(self, t, slack_rel: float = 1e-12) -> bool:
        slack = slack_rel * max(1.0, abs(self.lo), abs(self.hi))
        t = np.asarray(t)
        return bool(np.all(t >= self.lo - slack) and np.all(t <= self.hi + slack))


@lru_cache(maxsize=128)
def _unit_nodes(m: int) -> np.ndarray:
    """Chebyshev-Lobatto points cos(pi*j/m), j=0..m, descending 1 -> -1."""
    if m == 0:
        return np.array([1.0])
    return np.cos(np.pi * np.arange(m + 1) / m)


def lobatto_nodes(interval: Interval, m: int, ascending: bool = True) -> np.ndarray:
    """m+1 Chebyshev-Lobatto nodes of ``interval``."""
    t = interval.from_unit(_unit_nodes(m))
    return t[::-1] if ascending else t


def _dct1(values: np.ndarray, axis: int = -1) -> np.ndarray:
    return sp_fft.dct(values, type=1, axis=axis)


def coeffs_from_values(values: np.ndarray) -> np.ndarray:
    """Interpolation coefficients from samples at descending Lobatto nodes."""
    values = np.asarray(values)
    m = values.shape[-1] - 1
    if m == 0:
        return values.copy()
    c = _dct1(values) / m
    c[..., 0] *= 0.5
    c[..., -1] *= 0.5
    return c


def values_from_coeffs(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Evaluate a coefficient vector at the m+1 descending Lobatto nodes."""
    return npcheb.chebval(_unit_nodes(m), coeffs)


@lru_cache(maxsize=64)
def clenshaw_curtis(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (descending) and weights of (m+1)-point Clenshaw-Curtis on [-1, 1].

    Exact for polynomials of degree <= m.
    """
    if m == 0:
        return np.array([1.0]), np.array([2.0])
    k = np.arange(m + 1)
    moments = np.zeros(m + 1)
    even = k[k % 2 == 0]
    moments[even] = 2.0 / (1.0 - even.astype(float) ** 2)
    # w^T v = moments^T (values->coeffs applied to v); transpose the DCT.
    eye = np.eye(m + 1)
    basis_coeffs = coeffs_from_values(eye)  # row i: coeffs of cardinal at node i
    weights = basis_coeffs @ moments
    return _unit_nodes(m), weights


def _tail_magnitude(coeffs: np.ndarray) -> tuple[float, float]:
    """(tail, scale): largest of the last two coefficients vs overall max."""
    a = np.abs(coeffs)
    scale = float(a.max()) if a.size else 0.0
    tail = float(a[-min(2, a.size):].max()) if a.size else 0.0
    return tail, scale


class ChebSeries:
    """A smooth function on an interval, stored as Chebyshev coefficients.

    Immutable once constructed; all operations return new instances.
    """

    __slots__ = ("interval", "coeffs", "tol", "resolved")

    def __init__(self, interval: Interval, coeffs, tol: float = DEFAULT_TOL,
                 resolved: bool = True):
        coeffs = np.atleast_1d(np.asarray(coeffs))
        if coeffs.size == 0:
            coeffs = np.zeros(1)
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tol", tol)
        object.__setattr__(self, "resolved", resolved)

    def __setattr__(self, name, value):
        raise AttributeError("ChebSeries is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def fit(cls, f: Callable, interval: Interval, tol: float = DEFAULT_TOL,
            max_degree: int = MAX_DEGREE) -> "ChebSeries":
        """Adaptively interpolate ``f`` until the coefficient tail is below tol.

        ``f`` must accept a numpy array of points and return values; scalars
        are broadcast. Raises :class:`UnresolvedFunctionError` at the degree
        cap, carrying the achieved relative tail.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        m = 16
        values = None
        achieved = np.inf
        while m <= max_degree:
            nodes = interval.from_unit(_unit_nodes(m))
            if values is None:
                values = np.asarray(f(nodes), dtype=None) + np.zeros(m + 1)
            else:
                fresh = np.asarray(f(nodes[1::2])) + np.zeros(m // 2)
                merged = np.empty(m + 1, dtype=np.result_type(values, fresh))
                merged[0::2] = values
                merged[1::2] = fresh
                values = merged
            coeffs = coeffs_from_values(values)
            tail, scale = _tail_magnitude(coeffs)
            if scale == 0.0:
                return cls(interval, np.zeros(1), tol=tol)
            achieved = min(achieved, tail / scale)
            if tail <= max(tol, 4 * _EPS) * scale:
                return cls(interval, _trim(coeffs, tol), tol=tol)
            m *= 2
        raise UnresolvedFunctionError(
            f"function not resolved at degree {max_degree}", achieved=achieved)

    @classmethod
    def from_values(cls, interval: Interval, values_desc: np.ndarray,
                    tol: float = DEFAULT_TOL, trim_tol: float | None = None) -> "ChebSeries":
        """Exact interpolant through samples at descending Lobatto nodes."""
        coeffs = coeffs_from_values(np.asarray(values_desc))
        if trim_tol is not None:
            coeffs = _trim(coeffs, trim_tol)
        return cls(interval, coeffs, tol=tol)

    @classmethod
    def constant(cls, c, interval: Interval, tol: float = DEFAULT_TOL) -> "ChebSeries":
        return cls(interval, np.array([c]), tol=tol)

    @classmethod
    def identity(cls, interval: Interval, tol: float = DEFAULT_TOL) -> "ChebSeries":
        """The coordinate function t on ``interval``."""
        return cls(interval, np.array([interval.mid, interval.half]), tol=tol)

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t, out_of_domain: str = "raise"):
        """Clenshaw evaluation at scalar or array ``t``.

        out_of_domain: "raise" (default) or "clamp".
        """
        t = np.asarray(t, dtype=float)
        if not self.interval.contains(t):
            if out_of_domain == "clamp":
                t = np.clip(t, self.interval.lo, self.interval.hi)
            else:
                raise DomainError(
                    f"evaluation outside [{self.interval.lo}, {self.interval.hi}]")
        return npcheb.chebval(self.interval.to_unit(t), self.coeffs)

    def max_abs(self, oversample: int = 4) -> float:
        """Estimated sup-norm over the interval via a dense Lobatto scan."""
        m = oversample * (self.degree + 1) + 16
        return float(np.abs(values_from_coeffs(self.coeffs, m)).max())

    def is_real(self, rel: float = 1e-13) -> bool:
        if not np.iscomplexobj(self.coeffs):
            return True
        scale = max(float(np.abs(self.coeffs).max()), _EPS)
        return float(np.abs(self.coeffs.imag).max()) <= rel * scale

    def real(self) -> "ChebSeries":
        return ChebSeries(self.interval, self.coeffs.real.copy(), tol=self.tol)

    def conj(self) -> "ChebSeries":
        return ChebSeries(self.interval, np.conj(self.coeffs), tol=self.tol)

    # -- calculus ----------------------------------------------------------

    def antiderivative(self, anchor: float) -> "ChebSeries":
        """Primitive F with F(anchor) = 0 and F' = self."""
        if not self.interval.contains(anchor):
            raise DomainError("anchor outside interval")
        c = npcheb.chebint(self.coeffs, m=1, scl=self.interval.half)
        c[0] -= npcheb.chebval(self.interval.to_unit(anchor), c)
        return ChebSeries(self.interval, c, tol=self.tol)

    def derivative(self) -> "ChebSeries":
        if self.degree == 0:
            return ChebSeries(self.interval, np.zeros(1, dtype=self.coeffs.dtype),
                              tol=self.tol)
        c = npcheb.chebder(self.coeffs, m=1, scl=1.0 / self.interval.half)
        return ChebSeries(self.interval, c, tol=self.tol)

    def definite_integral(self) -> complex:
        """Integral over the whole interval."""
        k = np.arange(self.coeffs.size)
        moments = np.zeros(self.coeffs.size)
        even = k[k % 2 == 0]
        moments[even] = 2.0 / (1.0 - even.astype(float) ** 2)
        return complex(self.interval.half * (self.coeffs @ moments))

    # -- arithmetic ----------------------------------------------------------

    def _check_same_interval(self, other: "ChebSeries"):
        if self.interval != other.interval:
            from .errors import IntervalMismatchError
            raise IntervalMismatchError("operands on different intervals")

    def __add__(self, other):
        if isinstance(other, ChebSeries):
            self._check_same_interval(other)
            c = npcheb.chebadd(self.coeffs, other.coeffs)
        else:
            c = self.coeffs.copy()
            c = c.astype(np.result_type(c, other))
            c[0] += other
        return ChebSeries(self.interval, c, tol=self.tol)

    __radd__ = __add__

    def __neg__(self):
        return ChebSeries(self.interval, -self.coeffs, tol=self.tol)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ChebSeries) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ChebSeries):
            self._check_same_interval(other)
            c = npcheb.chebmul(self.coeffs, other.coeffs)
            return ChebSeries(self.interval, c, tol=self.tol)
        return ChebSeries(self.interval, self.coeffs * other, tol=self.tol)

    __rmul__ = __mul__

    def trimmed(self, tol: float | None = None) -> "ChebSeries":
        tol = self.tol if tol is None else tol
        return ChebSeries(self.interval, _trim(self.coeffs, tol), tol=self.tol)

    def __repr__(self):
        return (f"ChebSeries(deg={self.degree}, "
                f"interval=[{self.interval.lo}, {self.interval.hi}])")


def _trim(coeffs: np.ndarray, tol: float) -> np.ndarray:
    a = np.abs(coeffs)
    scale = a.max()
    if scale == 0.0:
        return coeffs[:1].copy()
    cut = 0.25 * tol * scale
    keep = np.nonzero(a > cut)[0]
    last = keep[-1] if keep.size else 0
    return coeffs[: last + 1].copy()


def cheb_fit(f: Callable, interval: Interval, tol: float = DEFAULT_TOL) -> ChebSeries:
    """Functional alias for :meth:`ChebSeries.fit`."""
    return ChebSeries.fit(f, interval, tol=tol)


def cheb_eval(series: ChebSeries, t, out_of_domain: str = "raise"):
    return series(t, out_of_domain=out_of_domain)


def cheb_antiderivative(series: ChebSeries, anchor: float) -> ChebSeries:
    return series.antiderivative(anchor)


def cheb_derivative(series: ChebSeries) -> ChebSeries:
    return series.derivative()
