"""Analytic eigendecomposition of Hermitian matrix curves.

Pointwise Hermitian eigensolves on a Chebyshev grid are matched across
adjacent nodes by maximal eigenvector overlap, phase-aligned so that
successive overlaps are real positive, and fitted as Chebyshev series.
The grid is refined until the fitted curves resolve. Near-degenerate
overlap patterns raise instead of guessing a continuation.

From a decomposition we build eigenpairs of the associated triangle-type
matrix: the eigenvalue element has kernel lambda_i(t), the eigenvector
column has triangle part q_i'(t) and impulse part q_i(t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cheb import ChebSeries, DEFAULT_TOL, Interval, _unit_nodes, coeffs_from_values
from .errors import CrossingError, NonHermitianError, UnresolvedFunctionError
from .kernel import SmoothKernel, StarElement, StarMatrix

_EPS = np.finfo(float).eps
MATCH_MARGIN = 0.1
MAX_TRACK_NODES = 4096


class HermitianCurve:
    """Hermitian matrix-valued function with Chebyshev-series entries."""

    __slots__ = ("interval", "dim", "entries", "tol")

    def __init__(self, interval: Interval, entries, tol: float = DEFAULT_TOL):
        n = len(entries)
        arr = np.empty((n, n), dtype=object)
        for i in range(n):
            if len(entries[i]) != n:
                raise NonHermitianError("entry table must be square")
            for j in range(n):
                arr[i, j] = entries[i][j]
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "tol", tol)
        self._check_hermitian()

    def __setattr__(self, name, value):
        raise AttributeError("HermitianCurve is immutable")

    @classmethod
    def from_upper(cls, interval: Interval, upper: dict, dim: int,
                   tol: float = DEFAULT_TOL) -> "HermitianCurve":
        """Build from {(i, j): ChebSeries} for i <= j; symmetry by construction."""
        zero = ChebSeries.constant(0.0, interval, tol)
        table = [[zero for _ in range(dim)] for _ in range(dim)]
        for (i, j), series in upper.items():
            if not (0 <= i <= j < dim):
                raise NonHermitianError(f"bad upper-triangle index ({i},{j})")
            table[i][j] = series
            if i != j:
                table[j][i] = series.conj()
            elif not series.is_real(1e-12):
                raise NonHermitianError(f"diagonal entry ({i},{i}) not real")
        return cls(interval, table, tol=tol)

    @classmethod
    def from_callable(cls, f: Callable, dim: int, interval: Interval,
                      tol: float = DEFAULT_TOL) -> "HermitianCurve":
        """Fit every entry of t -> f(t) (an (N,N) array) adaptively."""
        entries = [[ChebSeries.fit(
            lambda ts, i=i, j=j: np.array([f(t)[i, j] for t in np.atleast_1d(ts)]),
            interval, tol) for j in range(dim)] for i in range(dim)]
        return cls(interval, entries, tol=tol)

    def _check_hermitian(self, n_nodes: int = 17, rel: float = 1e-12):
        scale = max(max(float(np.abs(e.coeffs).max()) for e in self.entries.flat),
                    _EPS)
        nodes = self.interval.from_unit(_unit_nodes(n_nodes))
        vals = self.sample(nodes)
        dev = float(np.abs(vals - np.conj(np.swapaxes(vals, -1, -2))).max())
        if dev > rel * scale * 10:
            raise NonHermitianError(f"matrix curve asymmetric by {dev:.3e}")

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Matrix values at each time; shape (len(times), N, N)."""
        times = np.atleast_1d(times)
        out = np.zeros((times.size, self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            for j in range(self.dim):
                out[:, i, j] = self.entries[i, j](times)
        return out

    def max_entry_degree(self) -> int:
        return max(e.degree for e in self.entries.flat)

    def trace_series(self) -> ChebSeries:
        out = self.entries[0, 0]
        for i in range(1, self.dim):
            out = out + self.entries[i, i]
        return out

    def to_star_matrix(self) -> StarMatrix:
        """The triangle-type matrix with kernels A_ij(t)."""
        return StarMatrix.from_theta_univariate(
            [[self.entries[i, j] for j in range(self.dim)]
             for i in range(self.dim)], self.interval, tol=self.tol)


@dataclass(frozen=True)
class EigenDecomposition:
    """Tracked eigenvalue curves and orthonormal eigenvector curves."""

    interval: Interval
    eigenvalues: tuple          # N ChebSeries, real
    eigenvectors: tuple         # N x N nested tuple of ChebSeries, columns = vectors
    grid_times: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def eigenvalue_matrix(self, times: np.ndarray) -> np.ndarray:
        times = np.atleast_1d(times)
        return np.stack([lam(times) for lam in self.eigenvalues], axis=-1).real

    def eigenvector_matrix(self, times: np.ndarray) -> np.ndarray:
        """Q(t) for each time; shape (len(times), N, N)."""
        times = np.atleast_1d(times)
        n = self.dim
        out = np.zeros((times.size, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[:, i, j] = self.eigenvectors[i][j](times)
        return out


def _eigh_grid(curve: HermitianCurve, times: np.ndarray):
    mats = curve.sample(times)
    mats = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    return np.linalg.eigh(mats)


def _match_and_gauge(vals: np.ndarray, vecs: np.ndarray, times: np.ndarray,
                     force_match: bool) -> tuple[np.ndarray, np.ndarray]:
    """Order eigenpairs continuously along the grid and fix phases.

    vals: (K, N), vecs: (K, N, N) with columns as eigenvectors.
    """
    k_nodes, n = vals.shape
    # initial node: ascending eigenvalues; phase anchors the largest component
    order = np.argsort(vals[0])
    vals[0] = vals[0][order]
    vecs[0] = vecs[0][:, order]
    for j in range(n):
        col = vecs[0][:, j]
        r = int(np.argmax(np.abs(col)))
        phase = col[r] / abs(col[r]) if col[r] != 0 else 1.0
        vecs[0][:, j] = col / phase
    for k in range(1, k_nodes):
        overlap = np.conj(vecs[k - 1]).T @ vecs[k]
        mag = np.abs(overlap)
        row, col = linear_sum_assignment(-mag)
        perm = np.empty(n, dtype=int)
        perm[row] = col
        if not force_match:
            for i in range(n):
                best = mag[i, perm[i]]
                others = np.delete(mag[i], perm[i])
                if others.size and best - others.max() < MATCH_MARGIN:
                    raise CrossingError(
                        f"ambiguous eigenvector matching near t = {times[k]:.6g} "
                        f"(overlap margin {best - others.max():.3f})")
        vecs[k] = vecs[k][:, perm]
        vals[k] = vals[k][perm]
        ov = np.einsum("ij,ij->j", np.conj(vecs[k - 1]), vecs[k])
        phases = np.where(np.abs(ov) > 0, ov / np.maximum(np.abs(ov), _EPS), 1.0)
        vecs[k] = vecs[k] / phases[None, :]
    return vals, vecs


def analytic_eigendecompose(curve: HermitianCurve, grid_density: int | None = None,
                            force_match: bool = False,
                            tol: float | None = None) -> EigenDecomposition:
    """Track eigencurves of a Hermitian curve and fit them spectrally.

    ``grid_density`` sets the starting node count; default is four times
    the entry resolution. Raises :class:`CrossingError` when the overlap
    assignment is ambiguous (near-crossing), unless ``force_match``.
    """
    tol = curve.tol if tol is None else tol
    m = grid_density or max(16, 4 * (curve.max_entry_degree() + 1))
    while True:
        unit = _unit_nodes(m)
        asc = curve.interval.from_unit(unit)[::-1].copy()
        vals, vecs = _eigh_grid(curve, asc)
        vals, vecs = _match_and_gauge(vals, vecs, asc, force_match)
        # back to descending node order for the transforms
        vals_d = vals[::-1]
        vecs_d = vecs[::-1]
        lam_coeffs = coeffs_from_values(vals_d.T)        # (N, m+1)
        vec_coeffs = coeffs_from_values(np.transpose(vecs_d, (1, 2, 0)))
        tails = []
        for arr in (lam_coeffs, vec_coeffs.reshape(-1, m + 1)):
            a = np.abs(arr)
            tails.append(a[:, -2:].max() / max(a.max(), _EPS))
        if max(tails) <= max(tol, 8 * _EPS):
            break
        m *= 2
        if m > MAX_TRACK_NODES:
            raise UnresolvedFunctionError(
                "eigencurves not resolved at the tracking-grid cap",
                achieved=max(tails))
    lam_series = tuple(
        ChebSeries(curve.interval, _trim_vec(lam_coeffs[i], tol), tol=tol)
        for i in range(curve.dim))
    vec_series = tuple(
        tuple(ChebSeries(curve.interval, _trim_vec(vec_coeffs[i, j], tol), tol=tol)
              for j in range(curve.dim))
        for i in range(curve.dim))
    deco = EigenDecomposition(curve.interval, lam_series, vec_series, asc)
    _validate(curve, deco)
    return deco


def _trim_vec(c: np.ndarray, tol: float) -> np.ndarray:
    a = np.abs(c)
    scale = a.max()
    if scale == 0.0:
        return c[:1].copy()
    keep = np.nonzero(a > 0.25 * tol * scale)[0]
    return c[: (keep[-1] if keep.size else 0) + 1].copy()


def _validate(curve: HermitianCurve, deco: EigenDecomposition,
              n_check: int = 11, tol: float = 1e-9):
    rng = np.random.default_rng(7)
    ts = curve.interval.lo + curve.interval.length * rng.uniform(0.01, 0.99, n_check)
    a = curve.sample(ts)
    q = deco.eigenvector_matrix(ts)
    lam = deco.eigenvalue_matrix(ts)
    scale = max(float(np.abs(a).max()), 1.0)
    ortho = np.abs(np.conj(np.swapaxes(q, -1, -2)) @ q
                   - np.eye(curve.dim)).max()
    resid = np.abs(a @ q - q * lam[:, None, :]).max()
    if ortho > tol or resid > tol * scale:
        raise UnresolvedFunctionError(
            f"decomposition failed validation (ortho {ortho:.2e}, "
            f"residual {resid:.2e})", achieved=max(ortho, resid))


@dataclass(frozen=True)
class StarEigenPair:
    """Eigenpair of the triangle-type matrix attached to a Hermitian curve."""

    index: int
    eigenvalue: ChebSeries            # lambda_i(t)
    vector_series: tuple              # N ChebSeries q_i components
    element: StarElement              # lambda_i(t) as a triangle element
    vector: StarMatrix                # column: q_i'(t) triangle + q_i(t) impulse


def build_star_eigenpairs(deco: EigenDecomposition) -> list[StarEigenPair]:
    """Eigenpairs per the factorization: derivative triangle part plus impulse."""
    pairs = []
    iv = deco.interval
    n = deco.dim
    for j in range(n):
        lam = deco.eigenvalues[j]
        lam_elem = StarElement.from_univariate_t(lam)
        rows = []
        comps = tuple(deco.eigenvectors[i][j] for i in range(n))
        for comp in comps:
            dcomp = comp.derivative().trimmed()
            theta = None
            if float(np.abs(dcomp.coeffs).max()) > 0.25 * comp.tol * max(
                    1.0, float(np.abs(comp.coeffs).max())):
                theta = SmoothKernel.from_t_series(dcomp)
            rows.append([StarElement(iv, theta=theta, delta=comp, tol=comp.tol)])
        vec = StarMatrix(iv, rows)
        pairs.append(StarEigenPair(j, lam, comps, lam_elem, vec))
    return pairs


def _sup_star_norm(elem: StarElement, n_s: int = 17) -> float:
    """Sup over anchor s of the family norm of a scalar element."""
    from .norms import star_norm
    iv = elem.interval
    col = StarMatrix(iv, [[elem]])
    ss = iv.lo + iv.length * (0.5 - 0.5 * np.cos(np.pi * np.arange(n_s) / (n_s - 1)))
    ss = ss[ss < iv.hi - 1e-12 * iv.length]
    return max(star_norm(col, float(s)) for s in ss)


def star_eigen_residual(a: StarMatrix, pair: StarEigenPair) -> float:
    """Max family-norm of the entries of A*q - lambda*q."""
    if not a.is_theta_type:
        raise NonHermitianError("matrix must be triangle type")
    lam_col = _scalar_times_column(pair.element, pair.vector)
    resid = a.star(pair.vector) + lam_col.scaled(-1.0)
    return max(_sup_star_norm(resid[i, 0]) for i in range(resid.shape[0]))


def _scalar_times_column(elem: StarElement, col: StarMatrix) -> StarMatrix:
    rows = [[elem.star(col[i, 0])] for i in range(col.shape[0])]
    return StarMatrix(col.interval, rows)


def star_unitarity_residual(deco: EigenDecomposition) -> float:
    """Deviation of Q Q^H and Q^H Q from the impulse identity, integrated form."""
    pairs = build_star_eigenpairs(deco)
    q = _column_concat(pairs)
    qh = q.hermitian_transpose()
    out = 0.0
    for prod in (q.star(qh), qh.star(q)):
        kernels = prod.theta_compose()
        for i in range(deco.dim):
            for j in range(deco.dim):
                k = kernels[i, j]
                if i == j:
                    k = k - SmoothKernel.constant(1.0, deco.interval)
                out = max(out, k.max_abs_triangle())
    return out


def _column_concat(pairs: Sequence[StarEigenPair]) -> StarMatrix:
    n = pairs[0].vector.shape[0]
    iv = pairs[0].vector.interval
    rows = [[pairs[j].vector[i, 0] for j in range(len(pairs))] for i in range(n)]
    return StarMatrix(iv, rows)


def commutation_residual(deco: EigenDecomposition, j: int) -> float:
    """Two-sided product mismatch for channel j.

    Zero (to tolerance) exactly when the eigenvector element and its
    eigenvalue element commute; the bound chain is only asserted when
    every channel passes.
    """
    pairs = build_star_eigenpairs(deco)
    pair = pairs[j]
    out = 0.0
    for i in range(deco.dim):
        q_entry = pair.vector[i, 0]
        left = q_entry.star(pair.element)
        right = pair.element.star(q_entry)
        diff = left - right
        if diff.theta is not None:
            out = max(out, diff.theta.max_abs_triangle())
        if diff.delta is not None:
            out = max(out, diff.delta.max_abs())
    return out


def factorization_residual(curve: HermitianCurve, deco: EigenDecomposition,
                           power: int = 1) -> float:
    """Integrated-kernel deviation of Q Lambda^k Q^H from A^k."""
    pairs = build_star_eigenpairs(deco)
    q = _column_concat(pairs)
    qh = q.hermitian_transpose()
    iv = deco.interval
    n = deco.dim
    zero = StarElement.zero(iv)
    lam_mat = StarMatrix(iv, [[pairs[i].element if i == j else zero
                               for j in range(n)] for i in range(n)])
    lam_pow = lam_mat
    a = curve.to_star_matrix()
    a_pow = a
    for _ in range(power - 1):
        lam_pow = lam_pow.star(lam_mat)
        a_pow = a_pow.star(a)
    lhs = q.star(lam_pow.star(qh)).theta_compose()
    rhs = a_pow.theta_compose()
    out = 0.0
    for i in range(n):
        for j in range(n):
            out = max(out, (lhs[i, j] - rhs[i, j]).max_abs_triangle())
    return out
