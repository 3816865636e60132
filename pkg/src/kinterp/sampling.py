"""Rearrangement, the maximal average f**, and K-functional construction.

Plain-measure integrals run over the node-centred cells; the unrepresented
mass below the grid span is completed with a local power-law model fitted
to the first two samples, which is exact for pure powers and keeps the
cumulative integral accurate down to the lowest nodes.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import GridRangeError, InvariantError, ParameterError
from .grid import FULL, UNIT, GeometricGrid, KProfile, SampledFunction
from .sv import SVExpr, ell

MAX_HEAD_EXPONENT = 0.97


class HeadModelWarning(UserWarning):
    pass


def _head_exponent(grid: GeometricGrid, v: np.ndarray) -> float:
    """Local power s^(-gamma) fitted to the first two positive samples."""
    if v[0] <= 0.0 or v.size < 2 or v[1] <= 0.0:
        return 0.0
    gamma = (math.log(v[0]) - math.log(v[1])) / grid.dlog
    if gamma > MAX_HEAD_EXPONENT:
        warnings.warn(
            "near non-integrable singularity at 0; head mass is underestimated",
            HeadModelWarning)
        gamma = MAX_HEAD_EXPONENT
    return max(gamma, 0.0)


def plain_cumint(grid: GeometricGrid, dens: np.ndarray) -> np.ndarray:
    """I_j = integral_0^{t_j} dens(s) ds for a cellwise-constant density.

    Exact per cell; the (0, span_lo) head uses the power-law model.
    """
    dens = np.asarray(dens, dtype=float)
    t = grid.t
    gamma = _head_exponent(grid, dens)
    head = dens[0] * t[0] ** gamma * grid.span_lo ** (1.0 - gamma) / (1.0 - gamma)
    masses = dens * grid.plain_width
    before = np.concatenate([[0.0], np.cumsum(masses)[:-1]])
    partial = dens * (t - grid.plain_left)
    return head + before + partial


def rearrange(f: SampledFunction) -> SampledFunction:
    """Non-increasing rearrangement on a finite-measure (unit) grid.

    The rearranged step function is resampled at the grid nodes, so
    distribution functions agree with the input up to one grid cell.
    """
    grid = f.grid
    if grid.domain != UNIT:
        raise ParameterError("rearrangement requires a finite-measure (unit) grid")
    v = np.abs(f.values)
    # Extend the first cell's value over the unrepresented (0, span_lo) head
    # so node positions align exactly with measure coordinates on (0, 1].
    vals = np.concatenate([[v[0]], v])
    lens = np.concatenate([[grid.span_lo], grid.plain_width])
    order = np.argsort(-vals, kind="stable")
    sorted_v = vals[order]
    edges = np.concatenate([[0.0], np.cumsum(lens[order])])
    # sample strictly inside the covered measure range: t = t_max sits on
    # the final edge and belongs to the last occupied segment
    pos = np.minimum(grid.t, edges[-1] * (1.0 - 1e-15))
    idx = np.clip(np.searchsorted(edges, pos, side="right") - 1, 0, len(sorted_v) - 1)
    out = sorted_v[idx]
    out[grid.t > edges[-1] * (1.0 + 1e-12)] = 0.0
    return SampledFunction(grid, out)


def peetre_k(fstar: SampledFunction) -> KProfile:
    """K(t) = integral_0^t f*(s) ds for the couple (L_1, L_inf)."""
    if not fstar.is_nonincreasing():
        raise InvariantError("peetre_k requires a non-increasing input")
    return KProfile(fstar.grid, plain_cumint(fstar.grid, fstar.values))


def double_star(fstar: SampledFunction) -> SampledFunction:
    """f**(t) = K(t)/t; non-increasing and >= f* pointwise."""
    k = peetre_k(fstar)
    return SampledFunction(fstar.grid, k.values / fstar.grid.t)


def reverse_couple(k: KProfile) -> KProfile:
    """K-profile of the reversed couple: t -> t * K(1/t).

    Exact node permutation on reciprocal-symmetric grids; otherwise 1/t
    must stay inside the grid range.
    """
    grid = k.grid
    if grid.symmetric:
        vals = grid.t * k.values[::-1]
    else:
        recip = 1.0 / grid.t
        if recip.min() < grid.t[0] * (1 - 1e-12) or recip.max() > grid.t[-1] * (1 + 1e-12):
            raise GridRangeError("reverse_couple: 1/t leaves the grid range")
        vals = grid.t * k(recip)
    return KProfile(grid, vals)


# ---------------------------------------------------------------------------
# Test-function constructors
# ---------------------------------------------------------------------------

def chi(grid: GeometricGrid, a: float) -> SampledFunction:
    """Indicator of (0, a), with a snapped to the nearest cell boundary.

    Snapping makes the cumulative integral of the sample agree with
    min(t, a_eff) exactly; the effective cutoff is available as
    ``chi_cutoff(grid, a)``.
    """
    a_eff = chi_cutoff(grid, a)
    return SampledFunction(grid, (grid.t < a_eff).astype(float))


def chi_cutoff(grid: GeometricGrid, a: float) -> float:
    if not grid.span_lo < a <= grid.span_hi:
        raise GridRangeError("chi cutoff outside the grid span")
    k = int(round((math.log(a) - (grid.log_t[0] - grid.dlog / 2)) / grid.dlog))
    k = min(max(k, 1), grid.n)
    return float(np.exp(grid.log_t[0] + (k - 0.5) * grid.dlog))


def power_log(grid: GeometricGrid, r: float, delta: float = 0.0,
              support: float | None = None) -> SampledFunction:
    """f*(s) = s^(-1/r) * ell^delta(s), forced non-increasing.

    For delta < 0 the raw function eventually increases near s = 1; the
    non-increasing envelope (running max from the right) is returned so the
    sample is a valid rearrangement.  ``support`` truncates to (0, support].
    """
    if r <= 1.0:
        raise ParameterError("power_log requires r > 1 (integrable decay)")
    t = grid.t
    v = t ** (-1.0 / r) * ell(t) ** delta
    if support is not None:
        v = np.where(t <= support, v, 0.0)
    v = np.maximum.accumulate(v[::-1])[::-1]
    return SampledFunction(grid, v)


def random_steps(grid: GeometricGrid, seed: int, k: int = 12) -> SampledFunction:
    """Random non-increasing step function with ~k levels (deterministic in seed)."""
    rng = np.random.default_rng(seed)
    # level boundaries log-uniform across the grid, heights log-spaced down
    cuts = np.sort(rng.uniform(grid.log_t[0], grid.log_t[-1], size=k - 1))
    heights = np.exp(np.cumsum(-rng.exponential(0.7, size=k)) + rng.normal(0.0, 0.5))
    heights = np.sort(heights)[::-1]
    idx = np.searchsorted(cuts, grid.log_t, side="right")
    return SampledFunction(grid, heights[idx])


def default_family(grid: GeometricGrid, p0: float, p1: float, seed: int = 20240915,
                   n_steps: int = 4) -> list[tuple[str, SampledFunction]]:
    """Verification family spanning the power range between the endpoint spaces."""
    eps = 0.25
    support = 1.0 if grid.domain == FULL else None
    members: list[tuple[str, SampledFunction]] = []
    combos = [(p0 + eps, 0.0), (p1 - eps, 1.0), (p1 - eps, -1.0), (2.0, 0.5), (2.0, -0.5)]
    for r, d in combos:
        if r > 1.05:
            members.append((f"pow({r:g},{d:g})", power_log(grid, r, d, support=support)))
    for a in (1e-4, 1e-1):
        members.append((f"chi({a:g})", chi(grid, a)))
    for j in range(n_steps):
        members.append((f"steps({seed + j})", random_steps(grid, seed + j)))
    return members
