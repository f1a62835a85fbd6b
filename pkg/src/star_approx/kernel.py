"""Order-capped convolution algebra elements and the ⋆-product.

An element is stored as an optional smooth bivariate kernel (the part
supported on the triangle t >= s via a Heaviside factor) plus an optional
univariate impulse coefficient (the Dirac part). Products follow four
closed rules: convolution of two triangle kernels is a Volterra integral
evaluated by Clenshaw-Curtis quadrature at every tensor node; mixed
products reduce to pointwise multiplications; impulse-impulse products
multiply coefficients.

Kernels are represented on the full square via the analytic continuation
of their defining formulas; only the triangle t >= s is ever meaningful,
and diagnostics restrict to it.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .cheb import (
    ChebSeries,
    DEFAULT_TOL,
    Interval,
    _unit_nodes,
    clenshaw_curtis,
    coeffs_from_values,
)
from .errors import (
    DomainError,
    IntervalMismatchError,
    ShapeError,
    UnresolvedFunctionError,
)

MAX_KERNEL_DEGREE = 384
_EPS = np.finfo(float).eps
# cap on elements of the batched quadrature workspace (~64 MB complex)
_BATCH_ELEMS = 4_000_000


def _coeffs2d_from_values(values: np.ndarray) -> np.ndarray:
    """Tensor Chebyshev coefficients from samples at descending Lobatto nodes."""
    c = coeffs_from_values(values)          # along s axis
    c = coeffs_from_values(np.swapaxes(c, 0, 1))
    return np.swapaxes(c, 0, 1)


def _trim2d(coeffs: np.ndarray, tol: float) -> np.ndarray:
    a = np.abs(coeffs)
    scale = a.max()
    if scale == 0.0:
        return coeffs[:1, :1].copy()
    cut = 0.25 * tol * scale
    rows = np.nonzero(a.max(axis=1) > cut)[0]
    cols = np.nonzero(a.max(axis=0) > cut)[0]
    lr = rows[-1] if rows.size else 0
    lc = cols[-1] if cols.size else 0
    return coeffs[: lr + 1, : lc + 1].copy()


def _tails2d(coeffs: np.ndarray) -> tuple[float, float, float]:
    """(tail_t, tail_s, scale) from the trailing two rows/columns."""
    a = np.abs(coeffs)
    scale = float(a.max())
    nt = min(2, a.shape[0])
    ns = min(2, a.shape[1])
    return float(a[-nt:, :].max()), float(a[:, -ns:].max()), scale


def _clenshaw_batch(x: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Evaluate Chebyshev series with leading coefficient axis at points x.

    ``coeffs`` has shape (D, ...) with trailing axes broadcastable against
    ``x``; returns the broadcast result.
    """
    d = coeffs.shape[0]
    out_shape = np.broadcast_shapes(x.shape, coeffs.shape[1:])
    dtype = np.result_type(x, coeffs)
    if d == 1:
        return np.broadcast_to(coeffs[0], out_shape).astype(dtype)
    b0 = np.zeros(out_shape, dtype=dtype)
    b1 = np.zeros(out_shape, dtype=dtype)
    x2 = 2.0 * x
    for k in range(d - 1, 0, -1):
        b0, b1 = coeffs[k] + x2 * b0 - b1, b0
    return coeffs[0] + x * b0 - b1


class SmoothKernel:
    """Bivariate analytic function f(t, s) as a tensor Chebyshev series."""

    __slots__ = ("interval", "coeffs", "tol")

    def __init__(self, interval: Interval, coeffs, tol: float = DEFAULT_TOL):
        coeffs = np.atleast_2d(np.asarray(coeffs))
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("SmoothKernel is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def fit(cls, f: Callable, interval: Interval, tol: float = DEFAULT_TOL,
            max_degree: int = MAX_KERNEL_DEGREE) -> "SmoothKernel":
        """Adaptive tensor interpolation of ``f(t, s)`` on the square.

        ``f`` receives broadcastable arrays (t grid as column, s grid as row).
        """
        mt = ms = 16
        achieved = np.inf
        while True:
            tt = interval.from_unit(_unit_nodes(mt))
            ss = interval.from_unit(_unit_nodes(ms))
            values = np.asarray(f(tt[:, None], ss[None, :])) + np.zeros((mt + 1, ms + 1))
            coeffs = _coeffs2d_from_values(values)
            tail_t, tail_s, scale = _tails2d(coeffs)
            if scale == 0.0:
                return cls(interval, np.zeros((1, 1)), tol=tol)
            thresh = max(tol, 4 * _EPS) * scale
            achieved = min(achieved, max(tail_t, tail_s) / scale)
            if tail_t <= thresh and tail_s <= thresh:
                return cls(interval, _trim2d(coeffs, tol), tol=tol)
            if tail_t > thresh:
                mt *= 2
            if tail_s > thresh:
                ms *= 2
            if max(mt, ms) > max_degree:
                raise UnresolvedFunctionError(
                    f"kernel not resolved at degree {max_degree}",
                    achieved=achieved)

    @classmethod
    def constant(cls, c, interval: Interval, tol: float = DEFAULT_TOL) -> "SmoothKernel":
        return cls(interval, np.array([[c]]), tol=tol)

    @classmethod
    def from_t_series(cls, series: ChebSeries) -> "SmoothKernel":
        """Embed a univariate function of t as an s-independent kernel."""
        return cls(series.interval, series.coeffs[:, None].copy(), tol=series.tol)

    @classmethod
    def from_s_series(cls, series: ChebSeries) -> "SmoothKernel":
        """Embed a univariate function of s as a t-independent kernel."""
        return cls(series.interval, series.coeffs[None, :].copy(), tol=series.tol)

    # -- queries ------------------------------------------------------------

    @property
    def deg_t(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def deg_s(self) -> int:
        return self.coeffs.shape[1] - 1

    def coeff_scale(self) -> float:
        return float(np.abs(self.coeffs).max())

    def __call__(self, t, s, out_of_domain: str = "raise"):
        """Evaluate at broadcastable point arrays (t, s) inside the square."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        if not (self.interval.contains(t) and self.interval.contains(s)):
            if out_of_domain == "clamp":
                t = np.clip(t, self.interval.lo, self.interval.hi)
                s = np.clip(s, self.interval.lo, self.interval.hi)
            else:
                raise DomainError("kernel evaluation outside its square")
        t, s = np.broadcast_arrays(t, s)
        return npcheb.chebval2d(self.interval.to_unit(t), self.interval.to_unit(s),
                                self.coeffs)

    def eval_grid(self, t_nodes: np.ndarray, s_nodes: np.ndarray) -> np.ndarray:
        """Tensor evaluation; rows index t, columns index s."""
        return npcheb.chebgrid2d(self.interval.to_unit(t_nodes),
                                 self.interval.to_unit(s_nodes), self.coeffs)

    def max_abs_triangle(self, oversample: int = 2) -> float:
        """Estimated sup over the closed triangle t >= s."""
        mt = oversample * (self.deg_t + 1) + 16
        ms = oversample * (self.deg_s + 1) + 16
        tt = self.interval.from_unit(_unit_nodes(mt))
        ss = self.interval.from_unit(_unit_nodes(ms))
        vals = self.eval_grid(tt, ss)
        mask = tt[:, None] >= ss[None, :]
        return float(np.abs(vals[mask]).max())

    def diag_trace(self) -> ChebSeries:
        """The univariate restriction f(t, t)."""
        m = self.deg_t + self.deg_s
        x = _unit_nodes(m)
        vals = npcheb.chebval2d(x, x, self.coeffs)
        return ChebSeries.from_values(self.interval, vals, tol=self.tol,
                                      trim_tol=self.tol)

    # -- calculus -----------------------------------------------------------

    def antiderivative_t(self) -> "SmoothKernel":
        c = npcheb.chebint(self.coeffs, m=1, scl=self.interval.half, axis=0)
        return SmoothKernel(self.interval, c, tol=self.tol)

    def antiderivative_s(self) -> "SmoothKernel":
        c = npcheb.chebint(self.coeffs, m=1, scl=self.interval.half, axis=1)
        return SmoothKernel(self.interval, c, tol=self.tol)

    def derivative_t(self) -> "SmoothKernel":
        if self.deg_t == 0:
            return SmoothKernel(self.interval,
                                np.zeros((1, self.coeffs.shape[1]),
                                         dtype=self.coeffs.dtype), tol=self.tol)
        c = npcheb.chebder(self.coeffs, m=1, scl=1.0 / self.interval.half, axis=0)
        return SmoothKernel(self.interval, c, tol=self.tol)

    def derivative_s(self) -> "SmoothKernel":
        if self.deg_s == 0:
            return SmoothKernel(self.interval,
                                np.zeros((self.coeffs.shape[0], 1),
                                         dtype=self.coeffs.dtype), tol=self.tol)
        c = npcheb.chebder(self.coeffs, m=1, scl=1.0 / self.interval.half, axis=1)
        return SmoothKernel(self.interval, c, tol=self.tol)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "SmoothKernel"):
        if self.interval != other.interval:
            raise IntervalMismatchError("kernels on different intervals")

    def __add__(self, other: "SmoothKernel") -> "SmoothKernel":
        self._check(other)
        nt = max(self.coeffs.shape[0], other.coeffs.shape[0])
        ns = max(self.coeffs.shape[1], other.coeffs.shape[1])
        c = np.zeros((nt, ns), dtype=np.result_type(self.coeffs, other.coeffs))
        c[: self.coeffs.shape[0], : self.coeffs.shape[1]] += self.coeffs
        c[: other.coeffs.shape[0], : other.coeffs.shape[1]] += other.coeffs
        return SmoothKernel(self.interval, c, tol=min(self.tol, other.tol))

    def __neg__(self):
        return SmoothKernel(self.interval, -self.coeffs, tol=self.tol)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, alpha) -> "SmoothKernel":
        return SmoothKernel(self.interval, self.coeffs * alpha, tol=self.tol)

    def mul(self, other: "SmoothKernel") -> "SmoothKernel":
        """Pointwise product, exact on the combined-degree grid."""
        self._check(other)
        mt = self.deg_t + other.deg_t
        ms = self.deg_s + other.deg_s
        tt = self.interval.from_unit(_unit_nodes(mt))
        ss = self.interval.from_unit(_unit_nodes(ms))
        vals = self.eval_grid(tt, ss) * other.eval_grid(tt, ss)
        return SmoothKernel(self.interval, _coeffs2d_from_values(vals),
                            tol=min(self.tol, other.tol))

    def conj(self) -> "SmoothKernel":
        return SmoothKernel(self.interval, np.conj(self.coeffs), tol=self.tol)

    def trimmed(self, tol: float | None = None) -> "SmoothKernel":
        tol = self.tol if tol is None else tol
        return SmoothKernel(self.interval, _trim2d(self.coeffs, tol), tol=self.tol)

    def __repr__(self):
        return f"SmoothKernel(deg=({self.deg_t},{self.deg_s}))"


def _volterra_compose(F: SmoothKernel, G: SmoothKernel,
                      tol: float) -> SmoothKernel:
    """Kernel of the triangle-triangle product: h(t,s) = int_s^t F(t,u) G(u,s) du.

    Clenshaw-Curtis on [s, t] at every tensor node; the node count is tied
    to the operands' polynomial degrees so the inner quadrature is exact.
    """
    iv = F.interval
    q = F.deg_s + G.deg_t
    mt = min(F.deg_t + q + 5, MAX_KERNEL_DEGREE)
    ms = min(G.deg_s + q + 5, MAX_KERNEL_DEGREE)
    K = q + 4
    for attempt in range(3):
        vals = _volterra_values(F, G, mt, ms, K)
        coeffs = _coeffs2d_from_values(vals)
        tail_t, tail_s, scale = _tails2d(coeffs)
        if scale == 0.0:
            return SmoothKernel(iv, np.zeros((1, 1)), tol=tol)
        if max(tail_t, tail_s) <= max(tol, 8 * _EPS) * scale:
            return SmoothKernel(iv, _trim2d(coeffs, tol), tol=tol)
        if mt >= MAX_KERNEL_DEGREE and ms >= MAX_KERNEL_DEGREE:
            break
        mt = min(2 * mt, MAX_KERNEL_DEGREE)
        ms = min(2 * ms, MAX_KERNEL_DEGREE)
        K = 2 * K
    raise UnresolvedFunctionError(
        "product kernel not resolved at the grid cap",
        achieved=max(tail_t, tail_s) / scale)


def _volterra_values(F: SmoothKernel, G: SmoothKernel,
                     mt: int, ms: int, K: int) -> np.ndarray:
    iv = F.interval
    xt = _unit_nodes(mt)
    xs = _unit_nodes(ms)
    tt = iv.from_unit(xt)
    ss = iv.from_unit(xs)
    xq, wq = clenshaw_curtis(K)

    # coefficients of F(t_i, .) per t node and of G(., s_j) per s node
    fc = (npcheb.chebvander(xt, F.deg_t) @ F.coeffs).T          # (dsf+1, nt)
    gc = G.coeffs @ npcheb.chebvander(xs, G.deg_s).T            # (dtg+1, ns)

    dtype = np.result_type(F.coeffs, G.coeffs, float)
    out = np.empty((mt + 1, ms + 1), dtype=dtype)
    nq = K + 1
    block = max(1, _BATCH_ELEMS // ((ms + 1) * nq))
    for i0 in range(0, mt + 1, block):
        i1 = min(i0 + block, mt + 1)
        t_blk = tt[i0:i1]
        mid = 0.5 * (t_blk[:, None] + ss[None, :])
        half = 0.5 * (t_blk[:, None] - ss[None, :])
        tau = mid[:, :, None] + half[:, :, None] * xq[None, None, :]
        xtau = iv.to_unit(tau)
        fv = _clenshaw_batch(xtau, fc[:, i0:i1, None, None])
        gv = _clenshaw_batch(xtau, gc[:, None, :, None])
        out[i0:i1] = half * ((fv * gv) @ wq)
    return out


def theta_act_left(kernel: SmoothKernel) -> SmoothKernel:
    """Primitive in t anchored to vanish on the diagonal: int_s^t f(u, s) du."""
    h = kernel.antiderivative_t()
    diag = h.diag_trace()
    return (h - SmoothKernel.from_s_series(diag)).trimmed()


def theta_act_right(kernel: SmoothKernel) -> SmoothKernel:
    """Integral over the second argument: int_s^t f(t, u) du."""
    g = kernel.antiderivative_s()
    diag = g.diag_trace()
    return (SmoothKernel.from_t_series(diag) - g).trimmed()


class StarElement:
    """Algebra element with a triangle part and an impulse part.

    ``theta`` is the smooth kernel multiplying the Heaviside factor,
    ``delta`` the univariate coefficient of the Dirac impulse. Either may
    be ``None``; both absent is the canonical zero.
    """

    __slots__ = ("interval", "theta", "delta", "tol")

    def __init__(self, interval: Interval, theta: Optional[SmoothKernel] = None,
                 delta: Optional[ChebSeries] = None, tol: float = DEFAULT_TOL):
        if theta is not None and theta.interval != interval:
            raise IntervalMismatchError("theta part interval mismatch")
        if delta is not None and delta.interval != interval:
            raise IntervalMismatchError("delta part interval mismatch")
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("StarElement is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, interval: Interval, tol: float = DEFAULT_TOL) -> "StarElement":
        return cls(interval, tol=tol)

    @classmethod
    def identity(cls, interval: Interval, tol: float = DEFAULT_TOL) -> "StarElement":
        """The unit impulse (multiplicative identity)."""
        return cls(interval, delta=ChebSeries.constant(1.0, interval, tol), tol=tol)

    @classmethod
    def heaviside(cls, interval: Interval, tol: float = DEFAULT_TOL) -> "StarElement":
        """The pure integration element (kernel identically one)."""
        return cls(interval, theta=SmoothKernel.constant(1.0, interval, tol), tol=tol)

    @classmethod
    def from_univariate_t(cls, series: ChebSeries) -> "StarElement":
        """Triangle element with kernel f(t), independent of s."""
        return cls(series.interval, theta=SmoothKernel.from_t_series(series),
                   tol=series.tol)

    @classmethod
    def from_delta(cls, series: ChebSeries) -> "StarElement":
        return cls(series.interval, delta=series, tol=series.tol)

    # -- queries ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.theta is None and self.delta is None

    @property
    def is_theta_type(self) -> bool:
        return self.delta is None

    def coeff_scale(self) -> float:
        s = 0.0
        if self.theta is not None:
            s = max(s, self.theta.coeff_scale())
        if self.delta is not None:
            s = max(s, float(np.abs(self.delta.coeffs).max()))
        return s

    # -- algebra -----------------------------------------------------------------

    def _check(self, other: "StarElement"):
        if self.interval != other.interval:
            raise IntervalMismatchError("elements on different intervals")

    def star(self, other: "StarElement") -> "StarElement":
        """The convolution product, via the four closed part rules."""
        self._check(other)
        tol = min(self.tol, other.tol)
        ref = self.coeff_scale() * other.coeff_scale()
        theta_parts = []
        delta_part = None
        if self.theta is not None and other.theta is not None:
            theta_parts.append(_volterra_compose(self.theta, other.theta, tol))
        if self.theta is not None and other.delta is not None:
            theta_parts.append(
                self.theta.mul(SmoothKernel.from_s_series(other.delta)))
        if self.delta is not None and other.theta is not None:
            theta_parts.append(
                other.theta.mul(SmoothKernel.from_t_series(self.delta)))
        if self.delta is not None and other.delta is not None:
            delta_part = self.delta * other.delta
        theta = None
        for p in theta_parts:
            theta = p if theta is None else theta + p
        if theta is not None:
            theta = theta.trimmed()
        return _canonical(self.interval, theta, delta_part, ref, tol)

    def __add__(self, other: "StarElement") -> "StarElement":
        self._check(other)
        tol = min(self.tol, other.tol)
        ref = max(self.coeff_scale(), other.coeff_scale())
        theta = _opt_add(self.theta, other.theta)
        delta = _opt_add(self.delta, other.delta)
        return _canonical(self.interval, theta, delta, ref, tol)

    def __sub__(self, other: "StarElement") -> "StarElement":
        return self + other.scaled(-1.0)

    def scaled(self, alpha) -> "StarElement":
        if alpha == 0 or self.is_zero:
            return StarElement.zero(self.interval, self.tol)
        theta = self.theta.scaled(alpha) if self.theta is not None else None
        delta = self.delta * alpha if self.delta is not None else None
        return StarElement(self.interval, theta, delta, tol=self.tol)

    def conj(self) -> "StarElement":
        theta = self.theta.conj() if self.theta is not None else None
        delta = self.delta.conj() if self.delta is not None else None
        return StarElement(self.interval, theta, delta, tol=self.tol)

    def theta_compose(self) -> SmoothKernel:
        """Kernel of the left integration action applied to this element."""
        parts = []
        if self.theta is not None:
            parts.append(theta_act_left(self.theta))
        if self.delta is not None:
            parts.append(SmoothKernel.from_s_series(self.delta))
        if not parts:
            return SmoothKernel.constant(0.0, self.interval, self.tol)
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out

    def __repr__(self):
        parts = []
        if self.theta is not None:
            parts.append(f"theta(deg={self.theta.deg_t},{self.theta.deg_s})")
        if self.delta is not None:
            parts.append(f"delta(deg={self.delta.degree})")
        return "StarElement(" + (" + ".join(parts) or "0") + ")"


def _opt_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _canonical(interval, theta, delta, ref, tol) -> StarElement:
    """Drop parts that are negligible against the operation scale ``ref``."""
    floor = tol * max(ref, 1e-300)
    if theta is not None and theta.coeff_scale() <= floor:
        theta = None
    if delta is not None and float(np.abs(delta.coeffs).max()) <= floor:
        delta = None
    return StarElement(interval, theta, delta, tol=tol)


def deltaprime_act_left(kernel: SmoothKernel) -> StarElement:
    """Left differentiation action on a triangle kernel.

    Produces the t-derivative as the new triangle part and the diagonal
    restriction as the impulse part.
    """
    return StarElement(kernel.interval, theta=kernel.derivative_t().trimmed(),
                       delta=kernel.diag_trace(), tol=kernel.tol)


def deltaprime_act_right(kernel: SmoothKernel) -> StarElement:
    """Right differentiation action: negated s-derivative plus diagonal impulse."""
    return StarElement(kernel.interval, theta=(-kernel.derivative_s()).trimmed(),
                       delta=kernel.diag_trace(), tol=kernel.tol)


def star_product(x: StarElement, y: StarElement) -> StarElement:
    return x.star(y)


class StarMatrix:
    """Dense rectangular matrix of :class:`StarElement` on one interval."""

    __slots__ = ("interval", "entries")

    def __init__(self, interval: Interval, entries):
        arr = np.empty((len(entries), len(entries[0])), dtype=object)
        for i, row in enumerate(entries):
            if len(row) != arr.shape[1]:
                raise ShapeError("ragged entry rows")
            for j, e in enumerate(row):
                if e.interval != interval:
                    raise IntervalMismatchError("entry interval mismatch")
                arr[i, j] = e
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("StarMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int, interval: Interval,
              tol: float = DEFAULT_TOL) -> "StarMatrix":
        z = StarElement.zero(interval, tol)
        return cls(interval, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int, interval: Interval, tol: float = DEFAULT_TOL) -> "StarMatrix":
        """Impulse identity matrix."""
        one = StarElement.identity(interval, tol)
        zero = StarElement.zero(interval, tol)
        return cls(interval, [[one if i == j else zero for j in range(n)]
                              for i in range(n)])

    @classmethod
    def delta_column(cls, v, interval: Interval, tol: float = DEFAULT_TOL) -> "StarMatrix":
        """Column vector of impulses with constant coefficients ``v``."""
        v = np.asarray(v)
        rows = []
        for vi in v:
            if vi == 0:
                rows.append([StarElement.zero(interval, tol)])
            else:
                rows.append([StarElement.from_delta(
                    ChebSeries.constant(vi, interval, tol))])
        return cls(interval, rows)

    @classmethod
    def from_theta_univariate(cls, funcs, interval: Interval,
                              tol: float = DEFAULT_TOL) -> "StarMatrix":
        """Triangle-type matrix with kernels f_ij(t) given as ChebSeries."""
        rows = []
        for frow in funcs:
            row = []
            for f in frow:
                if f is None or (isinstance(f, ChebSeries)
                                 and float(np.abs(f.coeffs).max()) == 0.0):
                    row.append(StarElement.zero(interval, tol))
                else:
                    row.append(StarElement.from_univariate_t(f))
            rows.append(row)
        return cls(interval, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, idx) -> StarElement:
        return self.entries[idx]

    @property
    def is_theta_type(self) -> bool:
        return all(e.delta is None for e in self.entries.flat)

    def star(self, other: "StarMatrix") -> "StarMatrix":
        if self.interval != other.interval:
            raise IntervalMismatchError("matrices on different intervals")
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ShapeError(f"inner dimensions {k} != {k2}")
        rows = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = StarElement.zero(self.interval)
                for l in range(k):
                    a = self.entries[i, l]
                    b = other.entries[l, j]
                    if a.is_zero or b.is_zero:
                        continue
                    acc = acc + a.star(b)
                row.append(acc)
            rows.append(row)
        return StarMatrix(self.interval, rows)

    def __add__(self, other: "StarMatrix") -> "StarMatrix":
        if self.shape != other.shape:
            raise ShapeError("shape mismatch in addition")
        rows = [[self.entries[i, j] + other.entries[i, j]
                 for j in range(self.shape[1])] for i in range(self.shape[0])]
        return StarMatrix(self.interval, rows)

    def scaled(self, alpha) -> "StarMatrix":
        rows = [[self.entries[i, j].scaled(alpha)
                 for j in range(self.shape[1])] for i in range(self.shape[0])]
        return StarMatrix(self.interval, rows)

    def hermitian_transpose(self) -> "StarMatrix":
        n, m = self.shape
        rows = [[self.entries[j, i].conj() for j in range(n)] for i in range(m)]
        return StarMatrix(self.interval, rows)

    def theta_compose(self) -> np.ndarray:
        """Object array of the integrated kernels, entry by entry."""
        n, m = self.shape
        out = np.empty((n, m), dtype=object)
        for i in range(n):
            for j in range(m):
                out[i, j] = self.entries[i, j].theta_compose()
        return out

    def __repr__(self):
        return f"StarMatrix(shape={self.shape})"


def matrix_star_product(x: StarMatrix, y: StarMatrix) -> StarMatrix:
    return x.star(y)


def hermitian_transpose(a: StarMatrix) -> StarMatrix:
    return a.hermitian_transpose()
