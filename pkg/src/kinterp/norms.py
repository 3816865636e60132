"""Weighted norms against dt/t on geometric grids.

All interval norms are midpoint-in-log quadratures over node-centred
cells: a node anchoring an interval endpoint contributes half of its cell,
the conceptual endpoints 0 and inf contribute full boundary cells.  With
this convention prefix and suffix passes are exact discrete adjoints of
each other under t -> 1/t on symmetric grids.

For q = inf the norm is the max over the nodes whose cell meets the
interval (both anchoring nodes included).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvariantError, ParameterError
from .grid import FULL, UNIT, GeometricGrid, KProfile, SampledFunction
from .sv import INF, LqSpace, SVExpr, log_exponent, tail_pow_above, tail_pow_below

FLOOR = 1e-300


class EmptyIntervalWarning(UserWarning):
    pass


def _q_of(space: Union[LqSpace, float]) -> float:
    return space.q if isinstance(space, LqSpace) else float(space)


def _check_values(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if np.any(np.isnan(values)):
        raise InvariantError("integrand contains NaN")
    return values


class HomNorms:
    """Cumulative interval-norm machinery for one node array.

    Precomputes power sums (or running maxima) so that every interval norm
    anchored at grid nodes costs O(1), and windowed families cost O(n).
    """

    def __init__(self, grid: GeometricGrid, values: np.ndarray, space: Union[LqSpace, float]):
        self.grid = grid
        self.q = _q_of(space)
        self.v = _check_values(values)
        if self.v.shape != (grid.n,):
            raise InvariantError("value array does not match grid")
        self.dlog = grid.dlog
        if self.q == INF:
            self.prefix_max = np.maximum.accumulate(self.v)
            self.suffix_max = np.maximum.accumulate(self.v[::-1])[::-1]
        else:
            self.pw = self.v ** self.q
            self.cum = np.concatenate([[0.0], np.cumsum(self.pw)])  # cum[k] = sum_{i<k}

    def _fin(self, s):
        return (self.dlog * np.maximum(s, 0.0)) ** (1.0 / self.q)

    # -- prefix norms ||.|| on (0 | t_min, t_m) ---------------------------

    def head(self, m: int, from_zero: bool = True) -> float:
        if self.q == INF:
            return float(self.prefix_max[m])
        if m == 0:
            return self._fin(0.5 * self.pw[0]) if from_zero else 0.0
        s = self.cum[m] + 0.5 * self.pw[m]
        if not from_zero:
            s -= 0.5 * self.pw[0]
        return float(self._fin(s))

    def head_all(self, from_zero: bool = True) -> np.ndarray:
        if self.q == INF:
            return self.prefix_max.copy()
        m = np.arange(self.grid.n)
        s = self.cum[m] + 0.5 * self.pw
        if not from_zero:
            s = s - 0.5 * self.pw[0]
            s[0] = 0.0
        return self._fin(s)

    # -- suffix norms ||.|| on (t_m, t_max | inf) --------------------------

    def tail(self, m: int, extended: bool) -> float:
        if self.q == INF:
            return float(self.suffix_max[m])
        total = self.cum[-1]
        s = 0.5 * self.pw[m] + (total - self.cum[m + 1])
        if not extended:
            s -= 0.5 * self.pw[-1]
            if m == self.grid.n - 1:
                return 0.0
        return float(self._fin(s))

    def tail_all(self, extended: bool) -> np.ndarray:
        if self.q == INF:
            return self.suffix_max.copy()
        total = self.cum[-1]
        m = np.arange(self.grid.n)
        s = 0.5 * self.pw + (total - self.cum[m + 1])
        if not extended:
            s = s - 0.5 * self.pw[-1]
            s[-1] = 0.0
        return self._fin(s)

    def tail_all_inclusive(self) -> np.ndarray:
        """Suffix norms measured from the left edge of the anchoring cell.

        Strictly positive everywhere (the anchored variant vanishes at the
        last node); used where a degenerate endpoint would poison a ratio.
        """
        if self.q == INF:
            return self.suffix_max.copy()
        m = np.arange(self.grid.n)
        s = self.cum[-1] - self.cum[m]
        if self.grid.domain == UNIT:
            s = s - 0.5 * self.pw[-1]
            s[-1] = 0.5 * self.pw[-1]
        return self._fin(s)

    # -- windows ||.|| on (t_i, t_j) ---------------------------------------

    def window(self, i: int, j: int) -> float:
        if i >= j:
            return 0.0
        if self.q == INF:
            return float(np.max(self.v[i:j + 1]))
        s = 0.5 * self.pw[i] + (self.cum[j] - self.cum[i + 1]) + 0.5 * self.pw[j]
        return float(self._fin(s))

    def left_windows(self, m: int) -> np.ndarray:
        """W[i] = ||.|| on (t_i, t_m) for i = 0..m (W[m] = 0)."""
        if self.q == INF:
            w = np.maximum.accumulate(self.v[m::-1])[::-1]
            w[m] = 0.0
            return w
        i = np.arange(m + 1)
        s = 0.5 * self.pw[:m + 1] + (self.cum[m] - self.cum[i + 1]) + 0.5 * self.pw[m]
        s[m] = 0.0
        return self._fin(s)

    def right_windows(self, m: int) -> np.ndarray:
        """W[j] = ||.|| on (t_m, t_j) for j = m..n-1 (W[m] = 0)."""
        n = self.grid.n
        if self.q == INF:
            w = np.maximum.accumulate(self.v[m:])
            w[0] = 0.0
            return w
        j = np.arange(m, n)
        s = 0.5 * self.pw[m] + (self.cum[j] - self.cum[m + 1]) + 0.5 * self.pw[m:]
        s[0] = 0.0
        return self._fin(s)

    # -- outer norm over the whole domain ----------------------------------

    def full(self) -> float:
        if self.q == INF:
            return float(self.prefix_max[-1])
        s = self.cum[-1]
        if self.grid.domain == UNIT:
            s -= 0.5 * self.pw[-1]
        return float(self._fin(s))


# ---------------------------------------------------------------------------
# Free functions (the module's public operations)
# ---------------------------------------------------------------------------

def hom_norm(grid: GeometricGrid, values: np.ndarray, space: Union[LqSpace, float],
             lo: float = 0.0, hi: float = INF) -> float:
    """||values||_{L~q(lo, hi)} with generic endpoints.

    Endpoints below/above the grid span are clamped (conceptual 0 / inf
    ends); interior endpoints weight the straddled cell by log-overlap.
    """
    q = _q_of(space)
    values = _check_values(values)
    if not lo < hi:
        warnings.warn("empty interval in hom_norm", EmptyIntervalWarning)
        return 0.0
    d = grid.dlog
    lg = grid.log_t
    llo = -INF if lo <= 0.0 else math.log(lo)
    lhi = INF if hi == INF else math.log(hi)
    w = np.clip(np.minimum(lhi, lg + d / 2) - np.maximum(llo, lg - d / 2), 0.0, d)
    if q == INF:
        mask = w > 1e-12 * d
        if not mask.any():
            warnings.warn("interval misses every cell", EmptyIntervalWarning)
            return 0.0
        return float(np.max(values[mask]))
    return float(np.sum(w * values ** q) ** (1.0 / q))


def inner_profile_lower(grid: GeometricGrid, values: np.ndarray,
                        space: Union[LqSpace, float]) -> np.ndarray:
    """t_k -> ||values|| on (t_min, t_k), one left-to-right pass."""
    return HomNorms(grid, values, space).head_all(from_zero=False)


def inner_profile_upper(grid: GeometricGrid, values: np.ndarray,
                        space: Union[LqSpace, float]) -> np.ndarray:
    """t_k -> ||values|| on (t_k, t_max), one right-to-left pass."""
    return HomNorms(grid, values, space).tail_all(extended=False)


def weighted_integrand(f: Union[SampledFunction, KProfile], theta: float,
                       a: Optional[SVExpr] = None) -> SampledFunction:
    """Node-wise s^(-theta) * a(s) * f(s)."""
    grid = f.grid
    out = grid.t ** (-theta) * f.values
    if a is not None:
        out = out * np.asarray(a(grid.t), dtype=float)
    return SampledFunction(grid, out)


def outer_norm(grid: GeometricGrid, values: np.ndarray, space: Union[LqSpace, float]) -> float:
    """Norm over the whole working interval: (0, 1) in unit mode, (0, inf) in full."""
    return HomNorms(grid, values, space).full()


def band_profile(grid: GeometricGrid, values: np.ndarray, space: Union[LqSpace, float],
                 shift_log: float) -> np.ndarray:
    """t_i -> ||values|| on (t_i, t_i * e^shift_log), vectorized.

    Only indices whose window stays on the grid are meaningful; trailing
    entries (window truncated) are returned as NaN.
    """
    q = _q_of(space)
    v = _check_values(values)
    d = grid.dlog
    s = shift_log / d  # window length in index units
    if s <= 0:
        raise ParameterError("band_profile requires a positive shift")
    n = grid.n
    reach = int(math.ceil(s + 0.5))
    out = np.full(n, np.nan)
    if q == INF:
        width = int(math.floor(s)) + 1
        if width <= n:
            sw = np.lib.stride_tricks.sliding_window_view(v, width)
            out[:n - width + 1] = sw.max(axis=1)
        return out
    # kernel[d] = log-overlap of [0, s] with cell [d-1/2, d+1/2), in units of dlog
    dd = np.arange(reach + 1, dtype=float)
    kern = np.clip(np.minimum(s, dd + 0.5) - np.maximum(0.0, dd - 0.5), 0.0, 1.0)
    pw = v ** q
    m = n - reach
    if m > 0:
        acc = np.zeros(m)
        for k, wk in enumerate(kern):
            if wk > 0:
                acc += wk * pw[k:k + m]
        out[:m] = (d * acc) ** (1.0 / q)
    return out


# ---------------------------------------------------------------------------
# Envelopes of symbolic integrands, with analytic tail completion
# ---------------------------------------------------------------------------

def sv_profile(grid: GeometricGrid, expr: SVExpr, space: Union[LqSpace, float],
               side: str) -> np.ndarray:
    """u -> ||expr||_{L~q(0, u)} ("lower") or ||expr||_{L~q(u, T)} ("upper").

    T is t_max (= 1) in unit mode and inf in full mode.  Grid truncation is
    completed analytically from the known log-power asymptotics whenever
    the exponent is available; divergent completions yield inf entries.
    """
    q = _q_of(space)
    x = np.asarray(expr(grid.t), dtype=float)
    h = HomNorms(grid, x, q)
    if side == "lower":
        base = h.head_all(from_zero=True)
        if q == INF:
            s = log_exponent(expr, 0)
            if s is not None and float(s) > 0.0:
                return np.full(grid.n, INF)
            return base
        t = tail_pow_below(expr, q, grid.span_lo)
        if t is None or t == 0.0:
            return base
        if t == INF:
            return np.full(grid.n, INF)
        return (base ** q + t) ** (1.0 / q)
    if side == "upper":
        extended = grid.domain == FULL
        base = h.tail_all(extended=extended)
        if not extended:
            return base
        if q == INF:
            s = log_exponent(expr, INF)
            if s is not None and float(s) > 0.0:
                return np.full(grid.n, INF)
            return base
        t = tail_pow_above(expr, q, grid.span_hi)
        if t is None or t == 0.0:
            return base
        if t == INF:
            return np.full(grid.n, INF)
        return (base ** q + t) ** (1.0 / q)
    raise ParameterError("side must be 'lower' or 'upper'")


def hom_norm_sv(grid: GeometricGrid, expr: SVExpr, space: Union[LqSpace, float],
                lo: float = 0.0, hi: float = INF) -> float:
    """hom_norm of a purely symbolic integrand, tail-completed beyond the grid."""
    q = _q_of(space)
    x = np.asarray(expr(grid.t), dtype=float)
    base = hom_norm(grid, x, q, lo, hi)
    if q == INF:
        for end, beyond in ((0, lo <= grid.span_lo), (INF, hi >= grid.span_hi)):
            if beyond:
                s = log_exponent(expr, end)
                if s is not None and float(s) > 0.0:
                    return INF
        return base
    extra = 0.0
    if lo <= grid.span_lo:
        t = tail_pow_below(expr, q, grid.span_lo)
        if t == INF:
            return INF
        extra += t or 0.0
    if hi >= grid.span_hi and grid.domain == FULL:
        t = tail_pow_above(expr, q, grid.span_hi)
        if t == INF:
            return INF
        extra += t or 0.0
    return (base ** q + extra) ** (1.0 / q)


def edge_mass_fraction(grid: GeometricGrid, values: np.ndarray,
                       space: Union[LqSpace, float], decades: float = 2.0) -> float:
    """Fraction of the norm carried by the outermost decades of the grid.

    Used to flag untrusted truncated integrals (> 1 % is suspicious).
    """
    q = _q_of(space)
    v = _check_values(values)
    if q == INF:
        return 0.0
    k = max(1, int(round(decades * math.log(10.0) / grid.dlog)))
    pw = v ** q
    total = float(np.sum(pw))
    if total <= FLOOR:
        return 0.0
    # only truncated ends count: the unit domain genuinely ends at t = 1
    edge = float(np.sum(pw[:k]))
    if grid.domain == FULL:
        edge += float(np.sum(pw[-k:]))
    return min(1.0, edge / total)
