"""Norm evaluators for all implemented space families.

K-functional based families (classic, R, L and the doubly-nested extreme
classes) take a KProfile; the concrete Lebesgue-type families (grand,
small, Lorentz-Karamata, Gamma with double weight, A/B-type) take a
non-increasing rearrangement f* on the unit grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import InvariantError, ParameterError
from .grid import FULL, UNIT, GeometricGrid, KProfile, SampledFunction
from .norms import HomNorms, outer_norm
from .sampling import double_star
from .sv import (INF, LqSpace, SVExpr, log_exponent, norm_is_finite, sv_bar)

Theta = Union[int, float, Fraction]


def _theta_float(theta: Theta) -> float:
    return float(theta)


def _one_minus(theta: Theta) -> Theta:
    if isinstance(theta, (int, Fraction)):
        return Fraction(1) - Fraction(theta)
    return 1.0 - theta


# ---------------------------------------------------------------------------
# Space specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classic:
    theta: Theta
    b: SVExpr
    E: LqSpace

    def __post_init__(self):
        if not 0.0 <= _theta_float(self.theta) <= 1.0:
            raise ParameterError("Classic requires theta in [0, 1]")


@dataclass(frozen=True)
class RClass:
    theta: Theta
    b: SVExpr
    E: LqSpace
    a: SVExpr
    F: LqSpace

    def __post_init__(self):
        if not 0.0 <= _theta_float(self.theta) <= 1.0:
            raise ParameterError("RClass requires theta in [0, 1]")


@dataclass(frozen=True)
class LClass:
    theta: Theta
    b: SVExpr
    E: LqSpace
    a: SVExpr
    F: LqSpace

    def __post_init__(self):
        if not 0.0 <= _theta_float(self.theta) <= 1.0:
            raise ParameterError("LClass requires theta in [0, 1]")


EXTREME_KINDS = ("RR", "LL", "RL", "LR")


@dataclass(frozen=True)
class Extreme:
    """Doubly nested classes; kind names the (outer, inner) interval pattern."""

    kind: str
    theta: Theta
    c: SVExpr
    E: LqSpace
    b: SVExpr
    F: LqSpace
    a: SVExpr
    G: LqSpace

    def __post_init__(self):
        if self.kind not in EXTREME_KINDS:
            raise ParameterError(f"Extreme kind must be one of {EXTREME_KINDS}")
        if not 0.0 <= _theta_float(self.theta) <= 1.0:
            raise ParameterError("Extreme requires theta in [0, 1]")


@dataclass(frozen=True)
class GrandLebesgue:
    p: float
    alpha: float

    def __post_init__(self):
        if not (1.0 < self.p < INF and self.alpha > 0.0):
            raise ParameterError("GrandLebesgue requires p in (1, inf) and alpha > 0")


@dataclass(frozen=True)
class SmallLebesgue:
    p: float
    alpha: float

    def __post_init__(self):
        if not (1.0 < self.p < INF and self.alpha > 0.0):
            raise ParameterError("SmallLebesgue requires p in (1, inf) and alpha > 0")


@dataclass(frozen=True)
class LorentzKaramata:
    p: float
    b: SVExpr
    E: LqSpace

    def __post_init__(self):
        if not (1.0 < self.p <= INF):
            raise ParameterError("LorentzKaramata requires p in (1, inf]")


@dataclass(frozen=True)
class GammaDouble:
    """Gamma space with double weight; ``uw1`` is the slowly varying u*w1(u)."""

    p: float
    q: float
    uw1: SVExpr
    w2: SVExpr

    def __post_init__(self):
        if not (1.0 <= self.p < INF and 1.0 <= self.q <= INF):
            raise ParameterError("GammaDouble requires 1 <= p < inf, 1 <= q <= inf")


@dataclass(frozen=True)
class AType:
    p: float
    alpha: float
    E: LqSpace

    def __post_init__(self):
        if not (1.0 < self.p < INF and self.alpha < 1.0):
            raise ParameterError("AType requires p in (1, inf) and alpha < 1")


@dataclass(frozen=True)
class BType:
    p: float
    alpha: float
    E: LqSpace

    def __post_init__(self):
        if not (1.0 < self.p < INF and self.alpha < 1.0):
            raise ParameterError("BType requires p in (1, inf) and alpha < 1")


@dataclass(frozen=True)
class Intersection:
    members: tuple

    def __post_init__(self):
        if len(self.members) < 1:
            raise ParameterError("Intersection requires at least one member")


K_BASED = (Classic, RClass, LClass, Extreme)
FSTAR_BASED = (GrandLebesgue, SmallLebesgue, LorentzKaramata, GammaDouble, AType, BType)


# ---------------------------------------------------------------------------
# Couple specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeetreCouple:
    """(L_1, L_inf) realisation; the grid's domain selects unit/full mode."""

    domain: str = UNIT


@dataclass(frozen=True)
class AbstractCouple:
    """User-supplied K-profile standing in for an arbitrary couple."""

    k: KProfile


# ---------------------------------------------------------------------------
# Fundamental function of E = L_q
# ---------------------------------------------------------------------------

def fundamental_exponent(E: LqSpace) -> float:
    """phi_{L_q}(t) = t^(1/q); returns the exponent 1/q (0 for q = inf)."""
    return 0.0 if E.q == INF else 1.0 / E.q


# ---------------------------------------------------------------------------
# Norm evaluation
# ---------------------------------------------------------------------------

def _k_weighted(grid: GeometricGrid, k: KProfile, theta: float, a: Optional[SVExpr]):
    out = grid.t ** (-theta) * k.values
    if a is not None:
        out = out * np.asarray(a(grid.t), dtype=float)
    return out


def space_norm(spec, arg) -> float:
    """Evaluate the defining expression of ``spec`` on the grid.

    K-based specs take a KProfile, concrete families take f* (non-increasing
    SampledFunction); Intersection takes whatever its members take.
    """
    if isinstance(spec, Intersection):
        return max(space_norm(m, arg) for m in spec.members)
    if isinstance(spec, K_BASED):
        if not isinstance(arg, KProfile):
            raise ParameterError(f"{type(spec).__name__} norm needs a KProfile")
        return _k_norm(spec, arg)
    if isinstance(spec, FSTAR_BASED):
        if not isinstance(arg, SampledFunction):
            raise ParameterError(f"{type(spec).__name__} norm needs an f* sample")
        if not arg.is_nonincreasing():
            raise InvariantError("f* must be non-increasing")
        return _fstar_norm(spec, arg)
    raise ParameterError(f"unknown space spec {type(spec).__name__}")


def _k_norm(spec, k: KProfile) -> float:
    grid = k.grid
    ext = grid.domain == FULL
    t = grid.t
    if isinstance(spec, Classic):
        x = _k_weighted(grid, k, _theta_float(spec.theta), spec.b)
        return outer_norm(grid, x, spec.E)
    if isinstance(spec, RClass):
        h = _k_weighted(grid, k, _theta_float(spec.theta), spec.a)
        v = HomNorms(grid, h, spec.F).tail_all(extended=ext)
        return outer_norm(grid, np.asarray(spec.b(t)) * v, spec.E)
    if isinstance(spec, LClass):
        h = _k_weighted(grid, k, _theta_float(spec.theta), spec.a)
        p = HomNorms(grid, h, spec.F).head_all(from_zero=True)
        return outer_norm(grid, np.asarray(spec.b(t)) * p, spec.E)
    if isinstance(spec, Extreme):
        return _extreme_norm(spec, k)
    raise ParameterError(f"unhandled K-based spec {type(spec).__name__}")


def _extreme_norm(spec: Extreme, k: KProfile) -> float:
    grid = k.grid
    ext = grid.domain == FULL
    t = grid.t
    h = _k_weighted(grid, k, _theta_float(spec.theta), spec.a)
    bvals = np.asarray(spec.b(t), dtype=float)
    cvals = np.asarray(spec.c(t), dtype=float)
    hg = HomNorms(grid, h, spec.G)
    if spec.kind == "RR":
        mid = bvals * hg.tail_all(extended=ext)
        outer = HomNorms(grid, mid, spec.F).tail_all(extended=ext)
        return outer_norm(grid, cvals * outer, spec.E)
    if spec.kind == "LL":
        mid = bvals * hg.head_all(from_zero=True)
        outer = HomNorms(grid, mid, spec.F).head_all(from_zero=True)
        return outer_norm(grid, cvals * outer, spec.E)
    # Mixed kinds: the inner interval couples t with the outer variable u.
    n = grid.n
    x = np.empty(n)
    qf = spec.F.q
    d = grid.dlog
    for m in range(n):
        if spec.kind == "RL":
            w = bvals[:m + 1] * hg.left_windows(m)      # ||.||_G(t, u) for t <= u
            if qf == INF:
                mid = float(np.max(w))
            else:
                pw = w ** qf
                mid = (d * (np.sum(pw[:m]) + 0.5 * pw[m])) ** (1.0 / qf)
        else:  # "LR"
            w = bvals[m:] * hg.right_windows(m)          # ||.||_G(u, t) for t >= u
            if qf == INF:
                mid = float(np.max(w))
            else:
                pw = w ** qf
                s = 0.5 * pw[0] + np.sum(pw[1:])
                if not ext:
                    s -= 0.5 * pw[-1]
                mid = (d * max(s, 0.0)) ** (1.0 / qf)
        x[m] = cvals[m] * mid
    return outer_norm(grid, x, spec.E)


def _fstar_norm(spec, fstar: SampledFunction) -> float:
    grid = fstar.grid
    t = grid.t
    if isinstance(spec, LorentzKaramata):
        expo = 0.0 if spec.p == INF else 1.0 / spec.p
        x = t ** expo * np.asarray(spec.b(t)) * fstar.values
        return outer_norm(grid, x, spec.E)
    if grid.domain != UNIT:
        raise ParameterError(f"{type(spec).__name__} lives on the unit domain")
    lt = 1.0 + np.abs(np.log(t))
    if isinstance(spec, GrandLebesgue):
        h = t ** (1.0 / spec.p) * fstar.values
        v = HomNorms(grid, h, spec.p).tail_all(extended=False)
        return outer_norm(grid, lt ** (-spec.alpha / spec.p) * v, LqSpace(INF))
    if isinstance(spec, SmallLebesgue):
        pp = spec.p / (spec.p - 1.0)
        h = t ** (1.0 / spec.p) * fstar.values
        v = HomNorms(grid, h, spec.p).head_all(from_zero=True)
        return outer_norm(grid, lt ** (spec.alpha / pp - 1.0) * v, LqSpace(1.0))
    if isinstance(spec, GammaDouble):
        from .sampling import plain_cumint
        w2 = np.asarray(spec.w2(t), dtype=float)
        inner = plain_cumint(grid, w2 * fstar.values ** spec.p)
        if spec.q == INF:
            return float(np.max(inner ** (1.0 / spec.p)))
        w1 = np.asarray(spec.uw1(t), dtype=float) / t
        dens = w1 * inner ** (spec.q / spec.p)
        widths = grid.plain_width
        total = float(np.sum(dens * widths))
        return total ** (1.0 / spec.q)
    if isinstance(spec, AType):
        fss = double_star(fstar)
        h = t ** (1.0 / spec.p) * fss.values
        inner = HomNorms(grid, h, 1.0).tail_all(extended=False)
        return outer_norm(grid, lt ** (spec.alpha - 1.0) * inner, spec.E)
    if isinstance(spec, BType):
        fss = double_star(fstar)
        z = t ** (1.0 / spec.p) * lt ** (spec.alpha - 1.0) * fss.values
        running = np.maximum.accumulate(z)
        return outer_norm(grid, running, spec.E)
    raise ParameterError(f"unhandled f*-based spec {type(spec).__name__}")


def gamma_double_conditions(spec: GammaDouble, grid: GeometricGrid) -> dict:
    """Numeric report on the sufficient conditions of the Gamma definition.

    (c1) doubling bound for w2 and L^p(w2) -> L^1 embedding; (c2) the
    cumulative w2 integral lies in L^{q/p}(w1).  Failures warn only.
    """
    from .sampling import plain_cumint
    t = grid.t
    w2 = np.asarray(spec.w2(t), dtype=float)
    half = t <= 0.5
    doubling = float(np.max(np.asarray(spec.w2(np.minimum(2 * t[half], 1.0))) / w2[half]))
    cum = plain_cumint(grid, w2)
    w1 = np.asarray(spec.uw1(t), dtype=float) / t
    if spec.q == INF:
        c2 = float(np.max(cum ** (1.0 / spec.p)))
    else:
        c2 = float(np.sum(w1 * cum ** (spec.q / spec.p) * grid.plain_width))
    report = {"doubling_constant": doubling, "c2_value": c2,
              "ok": math.isfinite(doubling) and math.isfinite(c2)}
    if not report["ok"]:
        warnings.warn("GammaDouble sufficient conditions failed numerically; "
                      "norm evaluation proceeds", UserWarning)
    return report


# ---------------------------------------------------------------------------
# Nontriviality conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Nontriviality:
    ok: bool
    failed: Optional[str]
    checked: tuple


def _finite(e: SVExpr, q: float, end: float) -> Optional[bool]:
    return norm_is_finite(e, q, end)


def _inner_exponent(a: SVExpr, qf: float, end: float, *, bounded_interval: bool):
    """Growth exponent of t -> ||a|| on the inner interval ending/starting at t.

    For (t, 1)/(1, t) style intervals the inner norm saturates when the full
    integral converges (exponent 0); for (0, t)/(t, inf) convergence of the
    full integral is required and the exponent is s + 1/q.
    """
    s = log_exponent(a, end)
    if s is None:
        return None
    s = float(s)
    shift = 0.0 if qf == INF else 1.0 / qf
    if bounded_interval:
        return max(s + shift, 0.0)
    if qf == INF:
        return s if s <= 0.0 else INF
    return s + shift if s * qf + 1.0 < 0.0 else INF


def _rule(sigma: Optional[float], q: float) -> Optional[bool]:
    if sigma is None:
        return None
    if sigma == INF:
        return False
    if q == INF:
        return sigma <= 0.0
    return sigma * q + 1.0 < 0.0


def nontrivial(spec, domain: str = UNIT) -> Nontriviality:
    """Numerically/symbolically decide the finiteness conditions for the spec.

    On the unit (ordered) domain every condition concerning (1, inf) is
    vacuous and dropped.
    """
    th = _theta_float(spec.theta)
    checked = []

    def add(name: str, e: SVExpr, q: float, end: float) -> Optional[bool]:
        ok = _finite(e, q, end)
        checked.append((name, ok))
        return ok

    def add_sigma(name: str, sigma, q: float) -> Optional[bool]:
        ok = _rule(sigma, q)
        checked.append((name, ok))
        return ok

    def verdict() -> Nontriviality:
        for name, ok in checked:
            if ok is False:
                return Nontriviality(False, name, tuple(checked))
        if any(ok is None for _, ok in checked):
            return Nontriviality(True, None, tuple(checked))
        return Nontriviality(True, None, tuple(checked))

    if isinstance(spec, Classic):
        if th == 0.0 and domain == FULL:
            add("||b|| on (1,inf)", spec.b, spec.E.q, INF)
        if th == 1.0:
            add("||b|| on (0,1)", spec.b, spec.E.q, 0)
        return verdict()

    if isinstance(spec, RClass):
        add("||b|| on (0,1)", spec.b, spec.E.q, 0)
        if th == 0.0 and domain == FULL:
            s_in = _inner_exponent(spec.a, spec.F.q, INF, bounded_interval=False)
            sb = log_exponent(spec.b, INF)
            total = None if (s_in is None or sb is None) else (INF if s_in == INF else float(sb) + s_in)
            add_sigma("||b(t)||a||_F(t,inf)|| on (1,inf)", total, spec.E.q)
        if th == 1.0:
            s_in = _inner_exponent(spec.a, spec.F.q, 0, bounded_interval=True)
            sb = log_exponent(spec.b, 0)
            total = None if (s_in is None or sb is None) else float(sb) + s_in
            add_sigma("||b(t)||a||_F(t,1)|| on (0,1)", total, spec.E.q)
            sab = None
            sa, sb0 = log_exponent(spec.a, 0), log_exponent(spec.b, 0)
            if sa is not None and sb0 is not None:
                sab = float(sa) + float(sb0)
            add_sigma("||a b|| on (0,1)", sab, spec.E.q)
        return verdict()

    if isinstance(spec, LClass):
        if domain == FULL:
            add("||b|| on (1,inf)", spec.b, spec.E.q, INF)
            if th == 0.0:
                s_in = _inner_exponent(spec.a, spec.F.q, INF, bounded_interval=True)
                sb = log_exponent(spec.b, INF)
                total = None if (s_in is None or sb is None) else float(sb) + s_in
                add_sigma("||b(t)||a||_F(1,t)|| on (1,inf)", total, spec.E.q)
                sa, sbI = log_exponent(spec.a, INF), log_exponent(spec.b, INF)
                sab = None if (sa is None or sbI is None) else float(sa) + float(sbI)
                add_sigma("||a b|| on (1,inf)", sab, spec.E.q)
        if th == 1.0:
            s_in = _inner_exponent(spec.a, spec.F.q, 0, bounded_interval=False)
            sb = log_exponent(spec.b, 0)
            total = None if (s_in is None or sb is None) else (INF if s_in == INF else float(sb) + s_in)
            add_sigma("||b(t)||a||_F(0,t)|| on (0,1)", total, spec.E.q)
        return verdict()

    raise ParameterError("nontrivial applies to Classic, RClass and LClass specs")


# ---------------------------------------------------------------------------
# Couple-reversal symmetry
# ---------------------------------------------------------------------------

def symmetrize(spec):
    """Spec of the same space viewed from the reversed couple (X1, X0)."""
    if isinstance(spec, Classic):
        return Classic(_one_minus(spec.theta), sv_bar(spec.b), spec.E)
    if isinstance(spec, RClass):
        return LClass(_one_minus(spec.theta), sv_bar(spec.b), spec.E, sv_bar(spec.a), spec.F)
    if isinstance(spec, LClass):
        return RClass(_one_minus(spec.theta), sv_bar(spec.b), spec.E, sv_bar(spec.a), spec.F)
    if isinstance(spec, Extreme):
        flip = {"LL": "RR", "RR": "LL", "LR": "RL", "RL": "LR"}
        return Extreme(flip[spec.kind], _one_minus(spec.theta), sv_bar(spec.c), spec.E,
                       sv_bar(spec.b), spec.F, sv_bar(spec.a), spec.G)
    raise ParameterError(f"symmetrize does not support {type(spec).__name__}")
