"""Best polynomial approximation of the propagator and its error-bound chain.

The measured quantity is the L2 error of the degree-n polynomial (in the
convolution algebra) applied to the initial vector, against a reference
solution. Under the commutation hypothesis it is dominated by the worst
per-eigenvalue channel error, which in turn is dominated by the minimax
error of the exponential over the scaled spectral interval, and finally
by an ellipse-based geometric bound:

    measured  <=  channel bound  <=  E_n * |I|  <=  M rho^(n+1)

Each link is computed independently so the chain can be checked with a
stated additive slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly
from scipy.optimize import minimize_scalar

from .cheb import ChebSeries, Interval, _unit_nodes, clenshaw_curtis
from .errors import DomainError, NumericalError, ShapeError
from .kernel import StarMatrix
from .spectral import EigenDecomposition
from .starcalc import StarPolynomial

_EPS = np.finfo(float).eps

REMEZ_MAX_ITER = 100
REMEZ_REL_LEVEL = 1e-12
CHI_SEARCH_HI = 50.0
DEGREE_CAP = 24
SVD_RCOND = 1e-12


@dataclass(frozen=True)
class ScalarPolynomial:
    """Ordinary polynomial with ascending monomial coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           np.atleast_1d(np.asarray(self.coeffs)))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return nppoly.polyval(np.asarray(x), self.coeffs)


@dataclass(frozen=True)
class MinimaxResult:
    polynomial: ScalarPolynomial
    error: float                      # measured sup deviation of the polynomial
    reference_points: np.ndarray      # final equioscillation abscissae
    converged: bool                   # False: interpolant fallback, upper bound only
    levelled_spread: float


@dataclass(frozen=True)
class BoundReport:
    """Per-degree record of the bound quantities."""

    degree: int
    j_lo: float
    j_hi: float
    e_n: float
    theorem_bound: float              # E_n * length(I)
    chi: float
    m_const: float
    rho: float
    bernstein_bound: float            # M * rho^(n+1)
    chi_mode: str = "fixed"
    e_n_upper_bound_only: bool = False


def spectral_interval_j(deco: EigenDecomposition) -> tuple[float, float]:
    """Scaled hull of all eigencurve values over the interval.

    Both extrema are multiplied by the interval length; the ordered hull is
    returned and may be degenerate.
    """
    lo = np.inf
    hi = -np.inf
    for lam in deco.eigenvalues:
        m = 4 * (lam.degree + 1) + 32
        vals = npcheb.chebval(_unit_nodes(m), lam.coeffs).real
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
    length = deco.interval.length
    a, b = lo * length, hi * length
    return (min(a, b), max(a, b))


def _alternating_extrema_idx(r: np.ndarray, count: int) -> np.ndarray | None:
    """Indices of ``count`` sign-alternating local extrema, or None."""
    signs = np.sign(r)
    signs[signs == 0] = 1
    change = np.nonzero(np.diff(signs))[0]
    bounds = np.concatenate(([0], change + 1, [r.size]))
    picks = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi <= lo:
            continue
        seg = slice(lo, hi)
        picks.append(lo + int(np.argmax(np.abs(r[seg]))))
    if len(picks) < count:
        return None
    if len(picks) > count:
        # keep the consecutive window with the largest smallest deviation
        best, best_val = 0, -np.inf
        amp = np.abs(r[np.asarray(picks)])
        for start in range(len(picks) - count + 1):
            v = amp[start:start + count].min()
            if v > best_val:
                best, best_val = start, v
        picks = picks[best:best + count]
    return np.asarray(picks)


def _newton_polish(t0: float, lo: float, hi: float, mid: float, half: float,
                   d1: np.ndarray, d2: np.ndarray, steps: int = 12) -> float:
    """Move an interior extremum of exp - p onto a root of its derivative."""
    t = t0
    for _ in range(steps):
        x = (t - mid) / half
        g = np.exp(t) - npcheb.chebval(x, d1) / half
        h = np.exp(t) - npcheb.chebval(x, d2) / half ** 2
        if h == 0.0:
            break
        step = g / h
        t_new = t - step
        if not (lo <= t_new <= hi):
            break
        t = t_new
        if abs(step) <= 4 * _EPS * max(1.0, abs(t)):
            break
    return t


def minimax_exp(j: tuple[float, float], n: int,
                max_iter: int = REMEZ_MAX_ITER) -> MinimaxResult:
    """Best uniform polynomial approximation of exp on the interval ``j``.

    Remez exchange on n+2 references; convergence is a levelled error
    spread below 1e-12 relative (or the double-precision floor of the
    residual). A degenerate interval short-circuits to the point value.
    Non-convergence falls back to the Chebyshev interpolant with the
    measured deviation flagged as an upper bound only.
    """
    lo, hi = float(j[0]), float(j[1])
    if n < 0:
        raise ValueError("degree must be >= 0")
    scale = max(1.0, abs(lo), abs(hi))
    if hi - lo <= 1e-14 * scale:
        c = 0.5 * (lo + hi)
        return MinimaxResult(ScalarPolynomial(np.array([np.exp(c)])), 0.0,
                             np.array([c]), True, 0.0)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    xg = mid + half * np.linspace(-1.0, 1.0, 4097)
    fg = np.exp(xg)
    noise_floor = 64 * _EPS * np.exp(hi)
    refs = mid + half * np.cos(np.pi * np.arange(n + 2) / (n + 1))[::-1]
    coeffs = None
    spread = np.inf
    converged = False
    for _ in range(max_iter):
        v = npcheb.chebvander((refs - mid) / half, n)
        sigma = ((-1.0) ** np.arange(n + 2))[:, None]
        sys = np.hstack([v, sigma])
        sol = np.linalg.solve(sys, np.exp(refs))
        coeffs = sol[:-1]
        rg = fg - npcheb.chebval((xg - mid) / half, coeffs)
        idx = _alternating_extrema_idx(rg, n + 2)
        if idx is None:
            coeffs = None
            break
        d1 = npcheb.chebder(coeffs, m=1)
        d2 = npcheb.chebder(coeffs, m=2)
        new_refs = xg[idx].copy()
        for k in range(idx.size):
            if 0 < idx[k] < xg.size - 1:      # endpoints stay put
                new_refs[k] = _newton_polish(new_refs[k], lo, hi, mid, half,
                                             d1, d2)
        new_refs = np.sort(new_refs)
        ref_dev = np.abs(np.exp(new_refs)
                         - npcheb.chebval((new_refs - mid) / half, coeffs))
        spread = float(ref_dev.max() - ref_dev.min())
        refs = new_refs
        level = float(ref_dev.max())
        if spread <= max(REMEZ_REL_LEVEL * level, noise_floor):
            converged = True
            break
    if coeffs is None:
        # interpolant fallback: measured deviation is an upper bound on E_n
        nodes = mid + half * np.cos(np.pi * (2 * np.arange(n + 1) + 1) / (2 * (n + 1)))
        coeffs = npcheb.chebfit((nodes - mid) / half, np.exp(nodes), n)
        converged = False
    err_grid = float(np.abs(fg - npcheb.chebval((xg - mid) / half, coeffs)).max())
    err_refs = float(np.abs(np.exp(refs)
                            - npcheb.chebval((refs - mid) / half, coeffs)).max())
    err = max(err_grid, err_refs)
    poly = npcheb.Chebyshev(coeffs, domain=[lo, hi]).convert(
        kind=np.polynomial.Polynomial)
    return MinimaxResult(ScalarPolynomial(poly.coef), err, refs, converged, spread)


def _ellipse_max_exp(j: tuple[float, float], chi: float,
                     n_boundary: int = 2048) -> float:
    """Max of |exp| over the ellipse parameter ``chi`` mapped back to ``j``.

    The maximum sits at the rightmost boundary point; the dense scan
    verifies this and guards the closed form.
    """
    lo, hi = j
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    theta = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False)
    z = 0.5 * (chi * np.exp(1j * theta) + np.exp(-1j * theta) / chi)
    re = mid + half * z.real
    dense = float(np.exp(re).max())
    closed = float(np.exp(mid + half * 0.5 * (chi + 1.0 / chi)))
    return max(dense, closed)


def bernstein_bound(j: tuple[float, float], length_i: float, n: int,
                    chi: Optional[float] = None,
                    minimax: Optional[MinimaxResult] = None) -> BoundReport:
    """Geometric bound M rho^(n+1) from the ellipse containing the interval.

    ``chi`` fixes the ellipse parameter (> 1); ``None`` optimizes it per
    degree over (1, 50]. ``minimax`` may carry a precomputed minimax
    result to fill the comparison fields without re-running Remez.
    """
    if chi is not None and chi <= 1.0:
        raise DomainError("ellipse parameter must exceed 1")
    mm = minimax if minimax is not None else minimax_exp(j, n)

    def value(c: float) -> tuple[float, float]:
        m_const = length_i * (2.0 * c / (c - 1.0)) * _ellipse_max_exp(j, c)
        return m_const, m_const * (1.0 / c) ** (n + 1)

    if chi is None:
        grid = np.exp(np.linspace(np.log(1.0 + 1e-6), np.log(CHI_SEARCH_HI), 240))
        vals = [value(c)[1] for c in grid]
        k = int(np.argmin(vals))
        lo_c = grid[max(k - 1, 0)]
        hi_c = grid[min(k + 1, grid.size - 1)]
        res = minimize_scalar(lambda c: value(c)[1], bounds=(lo_c, hi_c),
                              method="bounded",
                              options={"xatol": 1e-10})
        chi_star = float(res.x) if res.fun <= vals[k] else float(grid[k])
        m_const, bound = value(chi_star)
        mode = "optimized"
        chi_out = chi_star
    else:
        m_const, bound = value(chi)
        mode = "fixed"
        chi_out = float(chi)
    return BoundReport(degree=n, j_lo=j[0], j_hi=j[1], e_n=mm.error,
                       theorem_bound=mm.error * length_i, chi=chi_out,
                       m_const=m_const, rho=1.0 / chi_out,
                       bernstein_bound=bound, chi_mode=mode,
                       e_n_upper_bound_only=not mm.converged)


def remark_fixed_chi_bound(length_i: float, n: int, chi: float = 2.0) -> float:
    """Explicit constant form of the geometric bound at a fixed chi.

    length * (2 chi / (chi - 1)) * exp(chi) * chi^-(n+1); at chi = 2 this is
    4 e^2 length * 2^-(n+1).
    """
    if chi <= 1.0:
        raise DomainError("ellipse parameter must exceed 1")
    return length_i * (2.0 * chi / (chi - 1.0)) * np.exp(chi) * chi ** (-(n + 1))


def remark_chi_valid(j: tuple[float, float], chi: float) -> bool:
    """Whether the interval fits inside the ellipse with parameter chi."""
    semi_major = 0.5 * (chi + 1.0 / chi)
    return max(abs(j[0]), abs(j[1])) <= semi_major + 1e-12


def scalar_to_star(p: ScalarPolynomial) -> StarPolynomial:
    """Coefficient rescaling alpha_k = k! beta_k."""
    fac = np.array([factorial(k) for k in range(p.coeffs.size)], dtype=float)
    return StarPolynomial(p.coeffs * fac)


def star_to_scalar(p: StarPolynomial) -> ScalarPolynomial:
    fac = np.array([factorial(k) for k in range(p.coeffs.size)], dtype=float)
    return ScalarPolynomial(p.coeffs / fac)


def channel_error(lam: ChebSeries, alpha: StarPolynomial, s: float,
                  rel_tol: float = 1e-13) -> float:
    """L2 deviation along one eigenvalue channel at anchor ``s``.

    Integrates |exp(L(tau)) - p(L(tau))|^2 over [s, b], with L the primitive
    of the eigencurve anchored at s and p the rescaled ordinary polynomial.
    """
    iv = lam.interval
    if not (iv.lo - 1e-12 * iv.length <= s < iv.hi):
        raise DomainError("anchor outside the interval")
    big_l = lam.antiderivative(s)
    p = star_to_scalar(alpha)
    half = 0.5 * (iv.hi - s)
    mid = 0.5 * (iv.hi + s)
    m = 64
    prev = None
    while True:
        x, w = clenshaw_curtis(m)
        tau = mid + half * x
        lv = big_l(tau).real
        diff = np.exp(lv) - p(lv)
        val = half * float(np.sum(np.abs(diff) ** 2 * w))
        if prev is not None and abs(val - prev) <= max(rel_tol * abs(val), 1e-28):
            break
        if m >= 4096:
            break
        prev = val
        m *= 2
    return float(np.sqrt(max(val, 0.0)))


@dataclass
class BestL2Result:
    alpha: StarPolynomial
    error: float
    method: str
    conditioning_warning: bool = False


class PolynomialBasisL2:
    """Shared workspace for least-squares fits in the iterated-kernel basis.

    Samples the integrated basis columns g_k (k = 0..n_max) and the
    reference solution on a quadrature grid of [s0, b], assembles the Gram
    matrix and moments once, and answers per-degree solves and competitor
    evaluations without recomputation.
    """

    def __init__(self, a: StarMatrix, v, n_max: int, s0: float,
                 reference, grid: Optional[int] = None):
        if n_max > DEGREE_CAP:
            raise DomainError(f"degree {n_max} above the conditioning cap "
                              f"{DEGREE_CAP}")
        if not a.is_theta_type:
            raise ShapeError("matrix must be pure triangle type")
        v = np.asarray(v, dtype=complex)
        iv = a.interval
        self.interval = iv
        self.s0 = float(s0)
        self.n_max = n_max
        dim = a.shape[0]

        columns = [StarMatrix.delta_column(v, iv)]
        for _ in range(n_max):
            columns.append(a.star(columns[-1]))
        kernels = [c.theta_compose() for c in columns]
        max_deg = max(k[i, 0].deg_t for k in kernels for i in range(dim))
        m = grid or max(128, max_deg + 32)
        x, w = clenshaw_curtis(m)
        half = 0.5 * (iv.hi - self.s0)
        tau = 0.5 * (iv.hi + self.s0) + half * x
        s_arr = np.full_like(tau, self.s0)

        g = np.zeros((n_max + 1, m + 1, dim), dtype=complex)
        for k, kern in enumerate(kernels):
            for i in range(dim):
                g[k, :, i] = kern[i, 0](tau, s_arr)
        u = np.asarray(_reference_values(reference, tau), dtype=complex)
        if u.shape != (m + 1, dim):
            raise ShapeError(f"reference produced shape {u.shape}, "
                             f"expected {(m + 1, dim)}")

        self.weights = half * w
        self.g = g
        self.u = u
        wg = self.weights[None, :, None]
        self.gram = np.einsum("jqi,kqi->jk", np.conj(g) * wg, g)
        self.moments = np.einsum("kqi,qi->k", np.conj(g) * wg, u)
        self.u_norm2 = float(np.einsum("qi,qi,q->", np.conj(u), u,
                                       self.weights).real)

    # -- direct error of an explicit coefficient vector ---------------------

    def error_of(self, alpha) -> float:
        """L2 error of the explicit combination; cancellation-free."""
        alpha = np.asarray(alpha, dtype=complex)
        if alpha.size > self.n_max + 1:
            raise ShapeError("coefficient vector longer than the basis")
        resid = self.u - np.tensordot(alpha, self.g[: alpha.size], axes=(0, 0))
        val = np.einsum("qi,qi,q->", np.conj(resid), resid, self.weights).real
        return float(np.sqrt(max(val, 0.0)))

    def solve_normal(self, n: int) -> BestL2Result:
        """Normal equations through an SVD with relative cutoff."""
        gram = self.gram[: n + 1, : n + 1]
        mom = self.moments[: n + 1]
        u_svd, sv, vh = np.linalg.svd(gram, hermitian=True)
        cutoff = SVD_RCOND * (sv[0] if sv.size else 0.0)
        inv = np.where(sv > cutoff, 1.0 / np.maximum(sv, _EPS), 0.0)
        warn = bool(np.any(sv <= cutoff))
        alpha = (vh.conj().T * inv) @ (u_svd.conj().T @ mom)
        return BestL2Result(StarPolynomial(alpha), self.error_of(alpha),
                            "normal", conditioning_warning=warn)

    def solve_orthogonal(self) -> list[BestL2Result]:
        """Orthonormalized-basis solve; returns results for every prefix degree.

        Modified Gram-Schmidt with re-orthogonalization on the weighted
        samples; numerically dependent directions are dropped.
        """
        sqw = np.sqrt(self.weights)[:, None]
        cols = [(self.g[k] * sqw).ravel() for k in range(self.n_max + 1)]
        uvec = (self.u * sqw).ravel()
        basis = []
        r = np.zeros((self.n_max + 1, self.n_max + 1), dtype=complex)
        kept = []
        for k, col in enumerate(cols):
            work = col.copy()
            orig = np.linalg.norm(work)
            for _ in range(2):
                for idx, e in zip(kept, basis):
                    c = np.vdot(e, work)
                    r[idx, k] += c
                    work -= c * e
            nrm = np.linalg.norm(work)
            if nrm > 1e-13 * max(orig, _EPS):
                basis.append(work / nrm)
                r[k, k] = nrm
                kept.append(k)
        resid = uvec.copy()
        coeffs = np.zeros(self.n_max + 1, dtype=complex)
        results = []
        warn = len(kept) < self.n_max + 1
        pos = 0
        for n in range(self.n_max + 1):
            while pos < len(kept) and kept[pos] <= n:
                c = np.vdot(basis[pos], resid)
                coeffs[kept[pos]] = c
                resid = resid - c * basis[pos]
                pos += 1
            err = float(np.linalg.norm(resid))
            alpha = _back_substitute(r, coeffs, kept, n)
            results.append(BestL2Result(StarPolynomial(alpha), err,
                                        "orthogonal",
                                        conditioning_warning=warn))
        return results

    def solve_best(self, n: int) -> BestL2Result:
        """Smaller of the normal-equation and orthogonalized errors."""
        normal = self.solve_normal(n)
        ortho = self.solve_orthogonal()[n]
        return normal if normal.error <= ortho.error else ortho


def _back_substitute(r, coeffs, kept, n) -> np.ndarray:
    idx = [k for k in kept if k <= n]
    alpha = np.zeros(n + 1, dtype=complex)
    if not idx:
        return alpha
    sub = r[np.ix_(idx, idx)]
    rhs = coeffs[idx]
    alpha_idx = np.linalg.solve(sub, rhs)
    alpha[idx] = alpha_idx
    return alpha


def _reference_values(reference, tau: np.ndarray) -> np.ndarray:
    if hasattr(reference, "at"):
        return reference.at(tau)
    if callable(reference):
        return reference(tau)
    raise TypeError("reference must expose .at(times) or be callable")


def best_l2_coefficients(a: StarMatrix, v, n: int, s0: float, reference,
                         method: str = "normal",
                         grid: Optional[int] = None) -> tuple[StarPolynomial, float]:
    """Best-L2 coefficients of the degree-n polynomial applied to ``v``.

    ``v`` must be unit Euclidean norm. ``method``: "normal" (SVD-backed
    normal equations, default), "orthogonal", or "best" (minimum of both).
    """
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise DomainError("initial vector must be normalized")
    ws = PolynomialBasisL2(a, v, n, s0, reference, grid=grid)
    if method == "normal":
        res = ws.solve_normal(n)
    elif method == "orthogonal":
        res = ws.solve_orthogonal()[n]
    elif method == "best":
        res = ws.solve_best(n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return res.alpha, res.error


@dataclass(frozen=True)
class ChainReport:
    """All roundtrip quantities of the bound chain at one degree."""

    degree: int
    measured_l2: float
    peano_baker_l2: float
    minimax_poly_l2: float
    channel_bound: float
    en_bound: float
    bernstein_fixed: float
    bernstein_opt: float
    commutation_residual: float
    hypothesis_ok: bool
    bound_asserted: bool
    chain_holds: Optional[bool]
    remark_chi: float
    remark_valid: bool
    links: dict = field(default_factory=dict)
    conditioning_warning: bool = False
    e_n_upper_bound_only: bool = False


def theorem_bound_check(workspace: PolynomialBasisL2,
                        deco: EigenDecomposition, n: int,
                        commutation: float,
                        chi_fixed: float = 2.0,
                        slack: float = 1e-10,
                        hypothesis_tol: float = 1e-8) -> ChainReport:
    """Evaluate every link of the bound chain at degree ``n``.

    When the commutation residual exceeds ``hypothesis_tol`` the chain is
    reported but not asserted (soft behavior).
    """
    j = spectral_interval_j(deco)
    length = deco.interval.length
    mm = minimax_exp(j, n)
    alpha_mm = scalar_to_star(mm.polynomial)
    s0 = workspace.s0

    best = workspace.solve_best(n)
    pb = workspace.error_of(np.ones(n + 1))
    mm_err = workspace.error_of(alpha_mm.coeffs)

    sqrt_len = np.sqrt(deco.interval.hi - s0)
    ch = max(channel_error(lam, alpha_mm, s0) for lam in deco.eigenvalues)
    channel = float(ch * sqrt_len)

    en_bound = mm.error * length
    opt = bernstein_bound(j, length, n, chi=None, minimax=mm)
    fixed = remark_fixed_chi_bound(length, n, chi=chi_fixed)
    valid = remark_chi_valid(j, chi_fixed)

    hypothesis_ok = commutation <= hypothesis_tol
    links = {
        "measured_le_channel": bool(best.error <= channel + slack),
        "channel_le_en": bool(channel <= en_bound + slack),
        "en_le_bernstein_opt": bool(en_bound <= opt.bernstein_bound + slack),
        "en_le_remark_fixed": bool(en_bound <= fixed + slack) if valid else None,
    }
    chain = (all(v for v in links.values() if v is not None)
             if hypothesis_ok else None)
    return ChainReport(
        degree=n, measured_l2=best.error, peano_baker_l2=pb,
        minimax_poly_l2=mm_err, channel_bound=channel, en_bound=en_bound,
        bernstein_fixed=fixed, bernstein_opt=opt.bernstein_bound,
        commutation_residual=commutation, hypothesis_ok=hypothesis_ok,
        bound_asserted=hypothesis_ok, chain_holds=chain,
        remark_chi=chi_fixed, remark_valid=valid, links=links,
        conditioning_warning=best.conditioning_warning,
        e_n_upper_bound_only=not mm.converged)
