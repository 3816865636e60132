"""Slowly varying functions: expression trees, evaluation, log-norm asymptotics.

The symbolic layer covers products of (broken) logarithm powers together
with reflection ``t -> 1/t``, composition ``u -> b(u^g * b1(u))`` and
numerically tabulated envelopes.  ``ell(t) = 1 + |log t|`` uses the natural
logarithm, so the antiderivative identities below are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import DomainError, ParameterError, TableMissError

Number = Union[int, float, Fraction]

INF = math.inf


def ell(t):
    """ell(t) = 1 + |log t|, the basic slowly varying prototype."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("ell requires t > 0")
    return 1.0 + np.abs(np.log(t))


def _as_float(x: Number) -> float:
    return float(x)


def _check_positive_scalar_or_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("slowly varying functions are defined for t in (0, inf)")
    return arr


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------

class SVExpr:
    """Base class; immutable, evaluable, closed under *, ** and bar."""

    def __call__(self, t):
        t = _check_positive_scalar_or_array(t)
        out = self._eval(t)
        return out if out.shape else float(out)

    def _eval(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def __mul__(self, other: "SVExpr") -> "SVExpr":
        return sv_mul(self, other)

    def __pow__(self, r: Number) -> "SVExpr":
        return sv_pow(self, r)

    def bar(self) -> "SVExpr":
        return sv_bar(self)


@dataclass(frozen=True)
class Const(SVExpr):
    value: float = 1.0

    def __post_init__(self):
        if not (float(self.value) > 0.0) or not math.isfinite(float(self.value)):
            raise ParameterError("Const requires a positive finite value")

    def _eval(self, t):
        return np.full_like(t, float(self.value))


@dataclass(frozen=True)
class LogPow(SVExpr):
    """Broken logarithm power: ell^alpha on (0,1], ell^beta on (1,inf)."""

    alpha: Number
    beta: Number

    def _eval(self, t):
        lt = 1.0 + np.abs(np.log(t))
        a, b = _as_float(self.alpha), _as_float(self.beta)
        if a == b:
            return lt ** a
        return np.where(t <= 1.0, lt ** a, lt ** b)


@dataclass(frozen=True)
class Product(SVExpr):
    factors: tuple

    def _eval(self, t):
        out = np.ones_like(t)
        for f in self.factors:
            out = out * f._eval(t)
        return out


@dataclass(frozen=True)
class Power(SVExpr):
    base: SVExpr
    r: Number

    def _eval(self, t):
        return self.base._eval(t) ** _as_float(self.r)


@dataclass(frozen=True)
class Bar(SVExpr):
    """Reflection t -> inner(1/t)."""

    inner: SVExpr

    def _eval(self, t):
        return self.inner._eval(1.0 / t)


@dataclass(frozen=True)
class ComposePower(SVExpr):
    """u -> outer(u**gamma * inner(u)), gamma > 0."""

    outer: SVExpr
    gamma: Number
    inner: SVExpr

    def __post_init__(self):
        if not (_as_float(self.gamma) > 0.0):
            raise ParameterError("ComposePower requires gamma > 0")

    def _eval(self, t):
        arg = t ** _as_float(self.gamma) * self.inner._eval(t)
        return self.outer._eval(arg)


@dataclass(frozen=True)
class Envelope(SVExpr):
    """Numerically tabulated slowly varying function, linear in log t.

    ``log_exp0``/``log_expinf`` optionally record the asymptotic log-power
    exponents (known when the table was produced from a symbolic integrand).
    """

    label: str
    log_u: np.ndarray
    table: np.ndarray
    extend: bool = False
    log_exp0: Optional[Number] = None
    log_expinf: Optional[Number] = None

    def __post_init__(self):
        lu = np.asarray(self.log_u, dtype=float)
        tv = np.asarray(self.table, dtype=float)
        if lu.ndim != 1 or lu.shape != tv.shape or lu.size < 2:
            raise ParameterError("Envelope requires matching 1-d log_u/table arrays")
        if np.any(np.diff(lu) <= 0):
            raise ParameterError("Envelope log_u must be strictly increasing")
        if np.any(~np.isfinite(tv)) or np.any(tv <= 0.0):
            raise ParameterError("Envelope table must be positive and finite")
        object.__setattr__(self, "log_u", lu)
        object.__setattr__(self, "table", tv)
        self.log_u.setflags(write=False)
        self.table.setflags(write=False)

    def _eval(self, t):
        x = np.log(t)
        slack = 1e-9 * (1.0 + np.abs(self.log_u[[0, -1]]).max())
        if not self.extend:
            if np.any(x < self.log_u[0] - slack) or np.any(x > self.log_u[-1] + slack):
                raise TableMissError(
                    f"envelope {self.label!r} queried outside its grid")
        return np.interp(x, self.log_u, self.table)

    def __hash__(self):
        return hash((self.label, self.log_u.shape, float(self.table[0]), float(self.table[-1])))

    def __eq__(self, other):
        return self is other


ONE = Const(1.0)


def log_pow(alpha: Number, beta: Optional[Number] = None) -> LogPow:
    """ell^alpha, or the broken version ell^(alpha, beta)."""
    return LogPow(alpha, alpha if beta is None else beta)


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

def eval_sv(e: SVExpr, t):
    """Pointwise evaluation; raises DomainError for t <= 0."""
    return e(t)


def _flatten(e: SVExpr):
    if isinstance(e, Product):
        return list(e.factors)
    return [e]


def sv_mul(e1: SVExpr, e2: SVExpr) -> SVExpr:
    factors = [f for f in _flatten(e1) + _flatten(e2) if not (isinstance(f, Const) and float(f.value) == 1.0)]
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


def sv_pow(e: SVExpr, r: Number) -> SVExpr:
    if _as_float(r) == 1.0:
        return e
    if isinstance(e, Const):
        return Const(float(e.value) ** _as_float(r))
    if isinstance(e, LogPow):
        return LogPow(_mul_exp(e.alpha, r), _mul_exp(e.beta, r))
    return Power(e, r)


def sv_bar(e: SVExpr) -> SVExpr:
    if isinstance(e, Bar):
        return e.inner
    if isinstance(e, Const):
        return e
    if isinstance(e, LogPow):
        return LogPow(e.beta, e.alpha)
    return Bar(e)


def sv_compose_power(outer: SVExpr, gamma: Number, inner: SVExpr) -> SVExpr:
    if not (_as_float(gamma) > 0.0):
        raise ParameterError("sv_compose_power requires gamma > 0")
    if isinstance(outer, Const):
        return outer
    return ComposePower(outer, gamma, inner)


def _mul_exp(a: Number, r: Number) -> Number:
    if isinstance(a, (int, Fraction)) and isinstance(r, (int, Fraction)):
        return Fraction(a) * Fraction(r)
    return _as_float(a) * _as_float(r)


def _add_exp(a: Number, b: Number) -> Number:
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) + Fraction(b)
    return _as_float(a) + _as_float(b)


# ---------------------------------------------------------------------------
# Asymptotic log exponents and finiteness
# ---------------------------------------------------------------------------

def log_exponent(e: SVExpr, end: float) -> Optional[Number]:
    """Exponent s with e(t) ~ c * ell^s(t) as t -> end (0 or inf); None if unknown.

    Exact symbolic arithmetic (Fractions survive) on log-power trees.
    """
    if end not in (0, 0.0, INF):
        raise ParameterError("end must be 0 or inf")
    if isinstance(e, Const):
        return 0
    if isinstance(e, LogPow):
        return e.alpha if end == 0 else e.beta
    if isinstance(e, Product):
        total: Number = 0
        for f in e.factors:
            s = log_exponent(f, end)
            if s is None:
                return None
            total = _add_exp(total, s)
        return total
    if isinstance(e, Power):
        s = log_exponent(e.base, end)
        return None if s is None else _mul_exp(s, e.r)
    if isinstance(e, Bar):
        return log_exponent(e.inner, 0 if end == INF else INF)
    if isinstance(e, ComposePower):
        # gamma > 0 sends u -> 0 to arg -> 0 and u -> inf to arg -> inf.
        return log_exponent(e.outer, end)
    if isinstance(e, Envelope):
        meta = e.log_exp0 if end == 0 else e.log_expinf
        if meta is not None:
            return meta
        return _envelope_exponent_estimate(e, end)
    return None


def _envelope_exponent_estimate(e: Envelope, end: float) -> Optional[float]:
    """Slope of log(table) against log(ell) at the table end; None if flat data."""
    k = min(32, e.log_u.size // 4)
    if k < 2:
        return None
    sl = slice(0, k) if end == 0 else slice(-k, None)
    x = np.log(1.0 + np.abs(e.log_u[sl]))
    y = np.log(e.table[sl])
    if np.ptp(x) < 1e-9:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def norm_is_finite(e: SVExpr, q: float, end: float) -> Optional[bool]:
    """Whether ||e||_{L~q} is finite near the given end (0 or inf).

    Uses the log-exponent calculus: for q < inf the dt/t integral of
    ell^(s q) converges iff s*q + 1 < 0; for q = inf the sup is finite
    iff s <= 0.  Returns None when the exponent cannot be determined.
    """
    s = log_exponent(e, end)
    if s is None:
        return None
    s = _as_float(s)
    if q == INF:
        return s <= 0.0
    return s * q + 1.0 < 0.0


# ---------------------------------------------------------------------------
# Closed forms for log-norms on (0, 1]
# ---------------------------------------------------------------------------

def lq_log_head(sigma: Number, q: float, u: float) -> float:
    """||ell^sigma||_{L~q(0, u)} for 0 < u <= 1, exact (natural log)."""
    if not (0.0 < u <= 1.0):
        raise ParameterError("head norm requires u in (0, 1]")
    s = _as_float(sigma)
    lu = 1.0 - math.log(u)
    if q == INF:
        return lu ** s if s <= 0.0 else INF
    e = s * q + 1.0
    if e >= 0.0:
        return INF
    return (lu ** e / (-e)) ** (1.0 / q)


def lq_log_band(sigma: Number, q: float, u: float, w: float) -> float:
    """||ell^sigma||_{L~q(u, w)} for 0 < u < w <= 1, exact."""
    if not (0.0 < u < w <= 1.0):
        raise ParameterError("band norm requires 0 < u < w <= 1")
    s = _as_float(sigma)
    lu, lw = 1.0 - math.log(u), 1.0 - math.log(w)
    if q == INF:
        return max(lu ** s, lw ** s)
    e = s * q + 1.0
    if e == 0.0:
        return (math.log(lu / lw)) ** (1.0 / q)
    return (abs((lu ** e - lw ** e) / e)) ** (1.0 / q)


def tail_pow_below(e: SVExpr, q: float, s0: float) -> Optional[float]:
    """Model value of ||e||^q_{L~q(0, s0)}, completing a grid truncation.

    Exact when e is (a product of) log powers; inf when divergent; None
    when the asymptotic exponent is unknown.  Only for q < inf.
    """
    s = log_exponent(e, 0)
    if s is None:
        return None
    s = _as_float(s)
    ex = s * q + 1.0
    if ex >= 0.0:
        return INF
    c = float(e(s0)) / (1.0 - math.log(s0)) ** s
    return (c ** q) * (1.0 - math.log(s0)) ** ex / (-ex)


def tail_pow_above(e: SVExpr, q: float, s1: float) -> Optional[float]:
    """Model value of ||e||^q_{L~q(s1, inf)} for s1 >= 1; see tail_pow_below."""
    if s1 < 1.0:
        raise ParameterError("upper tail completion requires s1 >= 1")
    s = log_exponent(e, INF)
    if s is None:
        return None
    s = _as_float(s)
    ex = s * q + 1.0
    if ex >= 0.0:
        return INF
    c = float(e(s1)) / (1.0 + math.log(s1)) ** s
    return (c ** q) * (1.0 + math.log(s1)) ** ex / (-ex)


# ---------------------------------------------------------------------------
# L_q space selector (the r.i. family realised here)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LqSpace:
    """The space L_q over dt/t; q = inf means essential sup."""

    q: float = INF

    def __post_init__(self):
        if not (self.q >= 1.0):
            raise ParameterError("LqSpace requires q >= 1")


LINF = LqSpace(INF)
L1 = LqSpace(1.0)
L2 = LqSpace(2.0)


def lognorm_asymptotic(sigma: Number, q: float, side: str) -> LogPow:
    """Asymptotic equivalent of ||ell^sigma|| on (0,u) (lower) or (u,1) (upper).

    Returns ell^(sigma + 1/q); preconditions follow the sign conditions of
    the exact antiderivative and are reported by name on violation.
    """
    s = _as_float(sigma)
    if side == "lower":
        if q == INF:
            if s > 0.0:
                raise ParameterError("lower asymptotic requires sigma <= 0 when q = inf")
        elif not (s + 1.0 / q < 0.0):
            raise ParameterError("lower asymptotic requires sigma + 1/q < 0")
    elif side == "upper":
        if q == INF:
            if s < 0.0:
                raise ParameterError("upper asymptotic requires sigma >= 0 when q = inf")
        elif not (s + 1.0 / q > 0.0):
            raise ParameterError("upper asymptotic requires sigma + 1/q > 0")
    else:
        raise ParameterError("side must be 'lower' or 'upper'")
    if q == INF:
        expo: Number = sigma
    elif isinstance(sigma, (int, Fraction)) and float(q).is_integer():
        expo = Fraction(sigma) + Fraction(1, int(q))
    else:
        expo = s + 1.0 / q
    return LogPow(expo, expo)


# ---------------------------------------------------------------------------
# Membership check
# ---------------------------------------------------------------------------

def sv_monotone_defect(e: SVExpr, grid, eps=(0.1, 0.5)) -> float:
    """Equivalence defect of the defining monotonicity properties.

    For each eps, t^eps * e(t) should be *equivalent* to nondecreasing; the
    defect is the worst relative drop below the running maximum (and the
    mirrored quantity for the nonincreasing direction).  Finite for every
    slowly varying function, but the constants can be large: literal
    monotonicity fails near t = 1 for any log power steeper than eps.
    """
    t = grid.t
    v = np.asarray(e(t), dtype=float)
    worst = 0.0
    for epsv in eps:
        up = t ** epsv * v
        run = np.maximum.accumulate(up)
        worst = max(worst, float(np.max((run - up) / run, initial=0.0)))
        down = t ** (-epsv) * v
        runm = np.minimum.accumulate(down)
        worst = max(worst, float(np.max((down - runm) / down, initial=0.0)))
    return worst


#: default bound on the end-of-grid log-slope accepted as slowly varying;
#: genuine log powers have |slope| = |alpha| / ell(t) -> 0 toward the ends,
#: while a power t^gamma keeps slope gamma everywhere
SV_SLOPE_TOL = 0.25


def sv_defect(e: SVExpr, grid, eps=(0.1, 0.5)) -> float:
    """Operational membership defect: largest log-log slope magnitude over
    the outermost decade of nodes at either grid end.

    Slowly varying functions flatten toward the ends of any geometric grid,
    so this quantity tends to zero with growing range; powers keep their
    exponent.  (A true monotonicity check cannot separate the two classes
    on a finite grid: the equivalence constants are unbounded in eps.)
    """
    t = grid.t
    v = np.asarray(e(t), dtype=float)
    slopes = np.diff(np.log(np.maximum(v, 1e-300))) / grid.dlog
    k = max(2, int(round(math.log(10.0) / grid.dlog)))
    return float(max(np.abs(np.median(slopes[:k])), np.abs(np.median(slopes[-k:]))))


def is_slowly_varying(e: SVExpr, grid, eps=(0.1, 0.5), rtol: float = SV_SLOPE_TOL) -> bool:
    return sv_defect(e, grid, eps) <= rtol
