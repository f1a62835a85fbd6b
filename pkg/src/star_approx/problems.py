"""Problem configurations and the bundled zoo.

A problem is a Hermitian matrix curve given by upper-triangle entry
expressions, an initial vector, a degree range, and tolerances. The
initial vector is normalized on load (the scale is recorded); all
reported errors refer to the normalized problem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .cheb import ChebSeries, Interval
from .errors import ConfigError, ExpressionError
from .expressions import compile_expression, parse_expression
from .spectral import HermitianCurve

DEFAULT_TOL = 1e-13


@dataclass(frozen=True)
class ProblemConfig:
    interval: tuple[float, float]
    dimension: int
    entries: dict[str, Union[str, tuple[str, str]]]
    initial_vector: tuple
    degrees: tuple[int, int] = (0, 8)
    tol: float = DEFAULT_TOL
    chi: Union[float, str] = 2.0
    seed: int = 0
    name: str = ""
    description: str = ""
    force_match: bool = False
    output: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemConfig":
        try:
            interval = tuple(float(x) for x in data["interval"])
            dim = int(data["dimension"])
            entries = dict(data["entries"])
            vec = data["initial_vector"]
        except KeyError as exc:
            raise ConfigError(f"missing config field {exc}") from exc
        if len(interval) != 2 or not interval[0] < interval[1]:
            raise ConfigError(f"bad interval {interval}")
        if dim < 1:
            raise ConfigError("dimension must be >= 1")
        norm_entries = {}
        for key, expr in entries.items():
            try:
                i, j = (int(p) for p in key.split(","))
            except ValueError:
                raise ConfigError(f"bad entry key {key!r}; expected 'i,j'")
            if not (0 <= i <= j < dim):
                raise ConfigError(
                    f"entry key {key!r} outside the upper triangle of size {dim}")
            if isinstance(expr, str):
                sources = (expr,)
            elif isinstance(expr, (list, tuple)) and len(expr) == 2:
                sources = tuple(expr)
                if i == j:
                    raise ConfigError(f"diagonal entry {key!r} must be real")
            else:
                raise ConfigError(f"entry {key!r} must be a string or [re, im]")
            for src in sources:
                try:
                    parse_expression(src)
                except ExpressionError as exc:
                    raise ConfigError(
                        f"entry {key!r}: {exc} (offset {exc.offset})") from exc
            norm_entries[key] = expr if isinstance(expr, str) else tuple(expr)
        vec_t = tuple(
            complex(x[0], x[1]) if isinstance(x, (list, tuple)) else float(x)
            for x in vec)
        if len(vec_t) != dim:
            raise ConfigError(f"initial vector length {len(vec_t)} != {dim}")
        if all(abs(x) == 0 for x in vec_t):
            raise ConfigError("initial vector must be nonzero")
        degrees = tuple(int(x) for x in data.get("degrees", (0, 8)))
        if len(degrees) != 2 or degrees[0] < 0 or degrees[1] < degrees[0]:
            raise ConfigError(f"bad degree range {degrees}")
        chi = data.get("chi", 2.0)
        if isinstance(chi, str):
            if chi != "optimize":
                raise ConfigError(f"chi must be a number > 1 or 'optimize', got {chi!r}")
        else:
            chi = float(chi)
            if chi <= 1.0:
                raise ConfigError("chi must exceed 1")
        tol = float(data.get("tol", DEFAULT_TOL))
        if tol <= 0:
            raise ConfigError("tol must be positive")
        return cls(interval=interval, dimension=dim, entries=norm_entries,
                   initial_vector=vec_t, degrees=degrees, tol=tol, chi=chi,
                   seed=int(data.get("seed", 0)),
                   name=str(data.get("name", "")),
                   description=str(data.get("description", "")),
                   force_match=bool(data.get("force_match", False)),
                   output=str(data.get("output", "")))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "interval": list(self.interval),
            "dimension": self.dimension,
            "entries": {k: (v if isinstance(v, str) else list(v))
                        for k, v in self.entries.items()},
            "initial_vector": [
                [x.real, x.imag] if isinstance(x, complex) else x
                for x in self.initial_vector],
            "degrees": list(self.degrees),
            "tol": self.tol,
            "chi": self.chi,
            "seed": self.seed,
            "force_match": self.force_match,
            "output": self.output,
        }

    def build_curve(self) -> HermitianCurve:
        iv = Interval(*self.interval)
        upper = {}
        for key, expr in self.entries.items():
            i, j = (int(p) for p in key.split(","))
            if isinstance(expr, str):
                fn = compile_expression(expr)
                series = ChebSeries.fit(fn, iv, self.tol)
            else:
                fre = compile_expression(expr[0])
                fim = compile_expression(expr[1])
                series = (ChebSeries.fit(fre, iv, self.tol)
                          + ChebSeries.fit(fim, iv, self.tol) * 1j)
            upper[(i, j)] = series
        return HermitianCurve.from_upper(iv, upper, self.dimension, tol=self.tol)

    def normalized_vector(self) -> tuple[np.ndarray, float]:
        """Unit vector and the normalization scale that was divided out."""
        v = np.asarray(self.initial_vector, dtype=complex)
        scale = float(np.linalg.norm(v))
        return v / scale, scale


def load_config(source: Union[str, dict]) -> ProblemConfig:
    """Load from a zoo name, a JSON file path, or a raw dict."""
    if isinstance(source, dict):
        return ProblemConfig.from_dict(source)
    if source in ZOO:
        return ProblemConfig.from_dict(ZOO[source])
    try:
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(
            f"{source!r} is neither a bundled problem ({', '.join(sorted(ZOO))}) "
            f"nor a readable file")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {source}: {exc}") from exc
    return ProblemConfig.from_dict(data)


ZOO: dict[str, dict] = {
    "zero": {
        "name": "zero",
        "description": "Zero matrix; every error column vanishes.",
        "interval": [0.0, 1.0],
        "dimension": 2,
        "entries": {},
        "initial_vector": [1.0, 0.0],
        "degrees": [0, 6],
    },
    "scalar_exp": {
        "name": "scalar_exp",
        "description": "Scalar constant coefficient; growth exp(t - a).",
        "interval": [0.0, 1.0],
        "dimension": 1,
        "entries": {"0,0": "1"},
        "initial_vector": [1.0],
        "degrees": [0, 12],
    },
    "commuting_demo": {
        "name": "commuting_demo",
        "description": ("Scalar profile (1 + t/2) times a fixed 4x4 symmetric "
                        "matrix with spectrum inside [-1, 1]; constant "
                        "eigenvectors, bound chain asserted."),
        "interval": [0.0, 1.0],
        "dimension": 4,
        "entries": {
            "0,1": "0.5*(1 + t/2)",
            "1,2": "0.5*(1 + t/2)",
            "2,3": "0.5*(1 + t/2)",
        },
        "initial_vector": [0.5, 0.5, 0.5, 0.5],
        "degrees": [0, 12],
    },
    "noncommuting_2x2": {
        "name": "noncommuting_2x2",
        "description": ("Rotating eigenvectors with drifting eigenvalues; "
                        "the commutation hypothesis fails and the bound "
                        "is reported without assertion."),
        "interval": [0.0, 1.0],
        "dimension": 2,
        "entries": {
            "0,0": "(1 + t/2)*cos(t)^2 - sin(t)^2",
            "0,1": "(2 + t/2)*sin(t)*cos(t)",
            "1,1": "(1 + t/2)*sin(t)^2 - cos(t)^2",
        },
        "initial_vector": [1.0, 0.0],
        "degrees": [0, 8],
    },
    "rotating_2x2": {
        "name": "rotating_2x2",
        "description": ("Eigenvectors rotating at unit rate with constant "
                        "eigenvalues +/-1; hypothesis-violating probe."),
        "interval": [0.0, 1.0],
        "dimension": 2,
        "entries": {
            "0,0": "cos(2*t)",
            "0,1": "sin(2*t)",
            "1,1": "-cos(2*t)",
        },
        "initial_vector": [1.0, 0.0],
        "degrees": [0, 8],
    },
}


def list_problems() -> list[dict]:
    out = []
    for name in sorted(ZOO):
        cfg = ZOO[name]
        out.append({
            "name": name,
            "description": cfg["description"],
            "dimension": cfg["dimension"],
            "interval": cfg["interval"],
        })
    return out
