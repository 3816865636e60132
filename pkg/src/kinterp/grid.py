"""Geometric grids and the sampled-function / K-profile carriers.

Everything downstream works on a geometric grid ``t_i = t_min * r**i``.
Each node owns a log-cell of width ``dlog`` centred on the node, so
quadrature against the homogeneous measure dt/t is midpoint-in-log and
exact for functions that are constant on cells.  On a reciprocal-symmetric
grid (``t_min * t_max == 1``) the map ``t -> 1/t`` permutes nodes exactly,
which keeps all couple-reversal identities exact at the discrete level.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridRangeError, InvariantError, ParameterError

UNIT = "unit"
FULL = "full"

#: Default grids: unit (ordered-couple) domain and full-line domain.
DEFAULT_UNIT = (1e-8, 1.0, 2048)
DEFAULT_FULL = (1e-8, 1e8, 4096)

#: Relative slack for monotonicity checks (floating-point noise).
MONOTONE_RTOL = 1e-9


@dataclass(frozen=True)
class GeometricGrid:
    """Geometric grid on (t_min, t_max) with ``n`` nodes.

    ``domain`` selects the evaluation mode: ``"unit"`` treats the grid as a
    discretisation of (0, 1) carrying a finite measure (ordered-couple
    setting, all upper interval endpoints truncate at t_max), ``"full"``
    as a discretisation of (0, inf).
    """

    t_min: float
    t_max: float
    n: int
    domain: str = UNIT

    def __post_init__(self):
        if not (0.0 < self.t_min < self.t_max):
            raise ParameterError("grid requires 0 < t_min < t_max")
        if self.n < 2:
            raise ParameterError("grid requires n >= 2 nodes")
        if self.domain not in (UNIT, FULL):
            raise ParameterError(f"unknown grid domain {self.domain!r}")
        if self.domain == UNIT and not math.isclose(self.t_max, 1.0):
            raise ParameterError("unit-domain grid must end at t_max = 1")

    @cached_property
    def dlog(self) -> float:
        return (math.log(self.t_max) - math.log(self.t_min)) / (self.n - 1)

    @cached_property
    def log_t(self) -> np.ndarray:
        l0 = math.log(self.t_min)
        l1 = math.log(self.t_max)
        if abs(l0 + l1) < 1e-12 * max(abs(l0), abs(l1)):
            # Reciprocal-symmetric grid: build exactly antisymmetric nodes.
            half = self.dlog / 2.0
            k = np.arange(self.n, dtype=float)
            return (2.0 * k - (self.n - 1)) * half
        return np.linspace(l0, l1, self.n)

    @cached_property
    def t(self) -> np.ndarray:
        return np.exp(self.log_t)

    @property
    def symmetric(self) -> bool:
        return abs(self.log_t[0] + self.log_t[-1]) < 1e-9

    @cached_property
    def plain_left(self) -> np.ndarray:
        return np.exp(self.log_t - self.dlog / 2.0)

    @cached_property
    def plain_right(self) -> np.ndarray:
        right = np.exp(self.log_t + self.dlog / 2.0)
        if self.domain == UNIT:
            right[-1] = self.t_max  # the finite-measure domain ends at 1
        return right

    @cached_property
    def plain_width(self) -> np.ndarray:
        return self.plain_right - self.plain_left

    @property
    def span_lo(self) -> float:
        """Lower edge of the first cell (start of representable mass)."""
        return float(np.exp(self.log_t[0] - self.dlog / 2.0))

    @property
    def span_hi(self) -> float:
        return float(np.exp(self.log_t[-1] + self.dlog / 2.0))

    def node_index(self, t: float, *, snap: bool = True) -> int:
        """Index of the grid node nearest to ``t``."""
        if not (t > 0.0) or not math.isfinite(t):
            raise GridRangeError(f"query point {t} is not a positive real")
        i = int(round((math.log(t) - self.log_t[0]) / self.dlog))
        if i < 0 or i >= self.n:
            raise GridRangeError(f"{t} outside grid range [{self.t_min}, {self.t_max}]")
        if not snap and abs(math.log(t) - self.log_t[i]) > 1e-9:
            raise GridRangeError(f"{t} is not a grid node")
        return i

    def interior(self, frac: float = 1.0 / 6.0) -> slice:
        """Node slice excluding a fraction of the log-range at each end."""
        k = int(math.ceil(frac * (self.n - 1)))
        return slice(k, self.n - k)

    def refined(self, factor: int = 2) -> "GeometricGrid":
        return GeometricGrid(self.t_min, self.t_max, factor * self.n, self.domain)

    def reflected_index(self, i):
        """Node index of 1/t_i; exact only on symmetric grids."""
        if not self.symmetric:
            raise GridRangeError("reflection requires a reciprocal-symmetric grid")
        return self.n - 1 - i


def default_grid(domain: str = UNIT, n: int | None = None) -> GeometricGrid:
    t0, t1, n0 = DEFAULT_UNIT if domain == UNIT else DEFAULT_FULL
    return GeometricGrid(t0, t1, n if n is not None else n0, domain)


def _validate_values(grid: GeometricGrid, values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n,):
        raise InvariantError(f"{what}: expected {grid.n} values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InvariantError(f"{what}: values must be finite")
    if np.any(values < 0.0):
        raise InvariantError(f"{what}: values must be nonnegative")
    return values


@dataclass(frozen=True)
class SampledFunction:
    """Nonnegative function sampled at the nodes, piecewise constant on cells."""

    grid: GeometricGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _validate_values(self.grid, self.values, "SampledFunction"))
        self.values.setflags(write=False)

    def is_nonincreasing(self, rtol: float = MONOTONE_RTOL) -> bool:
        v = self.values
        scale = np.maximum(v[:-1], v[1:])
        return bool(np.all(v[1:] - v[:-1] <= rtol * np.maximum(scale, 1e-300)))

    def scaled(self, c: float) -> "SampledFunction":
        if c < 0:
            raise ParameterError("scaling constant must be nonnegative")
        return SampledFunction(self.grid, self.values * c)

    def to_csv(self) -> str:
        return _csv_dump(self.grid.t, self.values)

    @staticmethod
    def from_csv(text: str, grid: GeometricGrid) -> "SampledFunction":
        return SampledFunction(grid, _csv_load(text, grid))


@dataclass(frozen=True)
class KProfile:
    """Sampled K-functional t -> K(t, f).

    Invariants: nondecreasing in t, K(t)/t nonincreasing, and concave on
    the t-axis (chord slopes nonincreasing), each up to relative slack.
    """

    grid: GeometricGrid
    values: np.ndarray

    def __post_init__(self):
        v = _validate_values(self.grid, self.values, "KProfile")
        object.__setattr__(self, "values", v)
        self.values.setflags(write=False)
        self.validate()

    def validate(self, rtol: float = 1e-7):
        v, t = self.values, self.grid.t
        if np.all(v == 0.0):
            return
        scale = np.maximum(v[1:], v[:-1]) + 1e-300
        if np.any((v[:-1] - v[1:]) > rtol * scale):
            raise InvariantError("KProfile: K(t) must be nondecreasing")
        ratio = v / t
        rscale = np.maximum(ratio[1:], ratio[:-1]) + 1e-300
        if np.any((ratio[1:] - ratio[:-1]) > rtol * rscale):
            raise InvariantError("KProfile: K(t)/t must be nonincreasing")
        slopes = np.diff(v) / np.diff(t)
        sscale = np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1])) + 1e-300
        # absolute slack: float noise on nearly-flat profiles makes the local
        # slope scale itself pure rounding error
        flat = 1e-10 * float(v.max()) / (t[2:] - t[:-2])
        if np.any((slopes[1:] - slopes[:-1]) > 1e2 * rtol * sscale + flat):
            raise InvariantError("KProfile: chord slopes must be nonincreasing")

    def __call__(self, t) -> np.ndarray:
        """Chord interpolation in (t, K); preserves monotonicity and concavity."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.grid.t[0] * (1 - 1e-12)) or np.any(t > self.grid.t[-1] * (1 + 1e-12)):
            raise GridRangeError("K-profile queried outside grid range")
        return np.interp(t, self.grid.t, self.values)

    def to_csv(self) -> str:
        return _csv_dump(self.grid.t, self.values)

    @staticmethod
    def from_csv(text: str, grid: GeometricGrid) -> "KProfile":
        return KProfile(grid, _csv_load(text, grid))


def _csv_dump(t: np.ndarray, values: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write("t,value\n")
    for ti, vi in zip(t, values):
        buf.write(f"{float(ti)!r},{float(vi)!r}\n")
    return buf.getvalue()


def _csv_load(text: str, grid: GeometricGrid) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip().lower() != "t,value":
        raise InvariantError("CSV must start with header 't,value'")
    rows = [ln.split(",") for ln in lines[1:]]
    if len(rows) != grid.n:
        raise InvariantError(f"CSV holds {len(rows)} rows, grid has {grid.n} nodes")
    t = np.array([float(r[0]) for r in rows])
    if not np.allclose(t, grid.t, rtol=1e-9):
        raise InvariantError("CSV nodes do not match the grid")
    return np.array([float(r[1]) for r in rows])
