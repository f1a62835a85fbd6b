"""Ground-truth solutions of u'(t) = A(t) u(t) for error measurement.

The reference integrator is a high-order embedded Runge-Kutta pair, chosen
deliberately far from the series machinery under test. The commuting
family A(t) = a(t) B additionally has an exact closed form through the
eigendecomposition of B; the two solvers cross-validate each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .cheb import ChebSeries, Interval, _unit_nodes, coeffs_from_values
from .errors import NumericalError
from .spectral import HermitianCurve

DEFAULT_OUTPUT_DEGREE = 128
MIN_TOL = 1e-14


@dataclass(frozen=True)
class SampledSolution:
    """Solution values on a Chebyshev grid, spectrally interpolable."""

    interval: Interval
    times: np.ndarray           # ascending, times[0] = a
    states: np.ndarray          # (len(times), N) complex
    tol_achieved: float

    def __post_init__(self):
        object.__setattr__(self, "_series", None)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def to_series(self) -> list[ChebSeries]:
        cached = object.__getattribute__(self, "_series")
        if cached is None:
            desc = self.states[::-1]
            cached = [ChebSeries.from_values(self.interval, desc[:, i],
                                             trim_tol=1e-15)
                      for i in range(self.dim)]
            object.__setattr__(self, "_series", cached)
        return cached

    def at(self, times) -> np.ndarray:
        """Interpolated states; shape (len(times), N)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        series = self.to_series()
        return np.stack([s(times) for s in series], axis=-1)


def _output_grid(interval: Interval, degree: int) -> np.ndarray:
    return interval.from_unit(_unit_nodes(degree))[::-1].copy()


def _rhs_factory(curve: HermitianCurve):
    n = curve.dim
    max_deg = curve.max_entry_degree()
    coeff = np.zeros((n, n, max_deg + 1), dtype=complex)
    for i in range(n):
        for j in range(n):
            c = curve.entries[i, j].coeffs
            coeff[i, j, : c.size] = c
    iv = curve.interval

    def rhs(t, y):
        x = (t - iv.mid) / iv.half
        tvals = np.cos(np.arange(max_deg + 1) * np.arccos(np.clip(x, -1, 1)))
        a = coeff @ tvals
        return a @ y

    return rhs


def reference_solve(curve: HermitianCurve, v, tol: float,
                    output_degree: int = DEFAULT_OUTPUT_DEGREE) -> SampledSolution:
    """Adaptive eighth-order Runge-Kutta solve sampled on a Chebyshev grid.

    The achieved tolerance is estimated from a half-tolerance re-run; the
    tighter run's samples are returned.
    """
    if tol < MIN_TOL:
        raise ValueError(f"tolerance below the supported floor {MIN_TOL}")
    iv = curve.interval
    v = np.asarray(v, dtype=complex)
    grid = _output_grid(iv, output_degree)
    rhs = _rhs_factory(curve)

    rtol_floor = 110 * np.finfo(float).eps

    def run(rt):
        sol = solve_ivp(rhs, (iv.lo, iv.hi), v, method="DOP853",
                        t_eval=grid, rtol=max(rt, rtol_floor), atol=rt * 1e-2,
                        dense_output=False)
        if not sol.success:
            raise NumericalError(
                "reference integration failed (possible stiffness); "
                f"try the closed-form solver or a smaller interval: {sol.message}")
        return sol.y.T

    coarse = run(tol)
    fine = run(0.5 * tol)
    achieved = float(np.abs(coarse - fine).max())
    states = fine
    states[0] = v
    return SampledSolution(iv, grid, states, achieved)


def closed_form_commuting(b: np.ndarray, a_fn: ChebSeries, v, times=None,
                          output_degree: int = DEFAULT_OUTPUT_DEGREE) -> SampledSolution:
    """Exact solution for A(t) = a(t) B with constant Hermitian B.

    u(t) = exp((F(t) - F(a)) B) v with F the primitive of the scalar factor.
    """
    b = np.asarray(b, dtype=complex)
    if np.abs(b - b.conj().T).max() > 1e-12 * max(1.0, np.abs(b).max()):
        raise NumericalError("matrix factor is not Hermitian")
    iv = a_fn.interval
    v = np.asarray(v, dtype=complex)
    grid = (np.asarray(times, dtype=float) if times is not None
            else _output_grid(iv, output_degree))
    mu, w = np.linalg.eigh(b)
    f = a_fn.antiderivative(iv.lo)
    phases = np.exp(np.outer(f(grid).real, mu))          # (T, N)
    states = (w * phases[:, None, :]) @ (w.conj().T @ v)
    return SampledSolution(iv, grid, states, 0.0)
