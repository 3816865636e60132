"""Two-sided K-functional formulae for couples of R/L-type spaces.

For each couple kind the right-hand side is an explicit sum of nested
weighted norms of the base-couple K-functional over split intervals,
paired with the gauge function rho(u).  An independent upper-bound oracle
scans the truncation decompositions f = (f*-tau)_+ + min(f*, tau), which
realise near-optimal splittings for (L_1, L_inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import CaseError, GridRangeError, InvariantError, ParameterError
from .grid import FULL, UNIT, GeometricGrid, KProfile, SampledFunction
from .norms import HomNorms, sv_profile
from .sampling import peetre_k
from .spaces import LClass, RClass, Theta, _theta_float
from .sv import (INF, Envelope, LqSpace, Product, SVExpr, log_exponent,
                 sv_bar, sv_compose_power, sv_mul, sv_pow)

#: envelope side taken for (b0, b1) per couple kind
KIND_SIDES = {
    "RR": ("lower", "lower"),
    "LL": ("upper", "upper"),
    "RL": ("lower", "upper"),
    "LR": ("upper", "lower"),
}


@dataclass(frozen=True)
class CoupleCase:
    """Couple of R/L-type spaces over the same base couple.

    ``kind`` spells the types of the two spaces, e.g. "RL" is the couple
    (R-space at theta0, L-space at theta1).
    """

    kind: str
    theta0: Theta
    theta1: Theta
    a0: SVExpr
    a1: SVExpr
    b0: SVExpr
    b1: SVExpr
    E0: LqSpace
    E1: LqSpace
    F0: LqSpace
    F1: LqSpace

    def __post_init__(self):
        if self.kind not in KIND_SIDES:
            raise ParameterError(f"couple kind must be one of {tuple(KIND_SIDES)}")
        t0, t1 = _theta_float(self.theta0), _theta_float(self.theta1)
        if not (0.0 < t0 < t1 < 1.0):
            raise ParameterError("couple case requires 0 < theta0 < theta1 < 1")

    def member_spec(self, j: int):
        """Spec of the j-th space of the couple (j in {0, 1})."""
        letter = self.kind[j]
        theta = (self.theta0, self.theta1)[j]
        b = (self.b0, self.b1)[j]
        a = (self.a0, self.a1)[j]
        E = (self.E0, self.E1)[j]
        F = (self.F0, self.F1)[j]
        cls = RClass if letter == "R" else LClass
        return cls(theta, b, E, a, F)


def validate_hypotheses(case: CoupleCase, domain: str) -> None:
    """Check the finiteness hypotheses of the matching formula.

    Lower-side spaces need ||b_j|| finite near 0; upper-side spaces need it
    finite near infinity, which is vacuous on the unit domain.
    """
    from .sv import norm_is_finite
    for j, side in enumerate(KIND_SIDES[case.kind]):
        b = (case.b0, case.b1)[j]
        E = (case.E0, case.E1)[j]
        if side == "lower":
            ok = norm_is_finite(b, E.q, 0)
            if ok is False:
                raise CaseError(f"||b{j}|| diverges on (0,1) in E{j}")
        elif domain == FULL:
            ok = norm_is_finite(b, E.q, INF)
            if ok is False:
                raise CaseError(f"||b{j}|| diverges on (1,inf) in E{j}")


# ---------------------------------------------------------------------------
# The gauge function rho
# ---------------------------------------------------------------------------

def _plus_inv_q(sigma, q: float):
    if q == INF:
        return sigma
    if isinstance(sigma, (int, Fraction)) and float(q).is_integer():
        return Fraction(sigma) + Fraction(1, int(q))
    return float(sigma) + 1.0 / q


@dataclass(frozen=True)
class SymbolicRho:
    """rho(u) ~ u^power * ell^log_exp(u) near 0 (unit-domain asymptotics)."""

    power: Union[int, float, Fraction]
    log_exp: Union[int, float, Fraction]


#: largest relative dip of the raw gauge repaired by the isotonic envelope
MAX_RHO_DIP = 0.3


@dataclass
class RhoFunction:
    """Numerically tabulated gauge u -> rho(u), strictly increasing."""

    case: CoupleCase
    grid: GeometricGrid
    values: np.ndarray
    env0: np.ndarray
    env1: np.ndarray
    symbolic: Optional[SymbolicRho] = None
    sv_part: Optional[SVExpr] = None
    monotone_adjust: float = 0.0

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if np.any(u < self.grid.t[0] * (1 - 1e-12)) or np.any(u > self.grid.t[-1] * (1 + 1e-12)):
            raise GridRangeError("rho queried outside the grid")
        out = np.exp(np.interp(np.log(u), self.grid.log_t, np.log(self.values)))
        return out if out.shape else float(out)

    def inverse(self, rho_value: float) -> float:
        """u with rho(u) = rho_value by monotone bisection; ties toward smaller u.

        Works on the isotonic envelope of the tabulated gauge (the raw one
        is only equivalent to increasing).
        """
        v = np.maximum.accumulate(self.values)
        if not (v[0] <= rho_value <= v[-1]):
            raise GridRangeError("rho value outside the attained range")
        i = int(np.searchsorted(v, rho_value, side="left"))
        if i == 0:
            return float(self.grid.t[0])
        lo, hi = np.log(self.grid.t[i - 1]), np.log(self.grid.t[i])
        flo, fhi = math.log(v[i - 1]), math.log(v[i])
        target = math.log(rho_value)
        x = lo if fhi == flo else lo + (hi - lo) * (target - flo) / (fhi - flo)
        return float(math.exp(x))


def _envelope_array(grid: GeometricGrid, b: SVExpr, E: LqSpace, side: str) -> np.ndarray:
    if side == "upper" and grid.domain == UNIT:
        # Anchored suffix norms vanish at the last node; measure from the
        # anchoring cell's left edge so the gauge stays positive.
        vals = HomNorms(grid, np.asarray(b(grid.t), dtype=float), E).tail_all_inclusive()
    else:
        vals = sv_profile(grid, b, E, side)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
        raise CaseError(f"envelope ||b|| on the {side} side is degenerate or divergent")
    return vals


def _upper_env_exponent(b: SVExpr, E: LqSpace):
    """Asymptotic ell-exponent of u -> ||b||_E(u, 1) as u -> 0, or None."""
    s = log_exponent(b, 0)
    if s is None:
        return None
    e = _plus_inv_q(s, E.q)
    if float(e) > 0.0:
        return e
    return 0 if isinstance(e, (int, Fraction)) else 0.0


def _lower_env_exponent(b: SVExpr, E: LqSpace):
    s = log_exponent(b, 0)
    if s is None:
        return None
    e = _plus_inv_q(s, E.q)
    if E.q == INF:
        return e if float(e) <= 0.0 else None
    return e if float(e) < 0.0 else None


def envelope_exponent(b: SVExpr, E: LqSpace, side: str):
    return _lower_env_exponent(b, E) if side == "lower" else _upper_env_exponent(b, E)


def make_rho(case: CoupleCase, grid: GeometricGrid) -> RhoFunction:
    """Build rho(u) = u^(theta1-theta0) * a0 Phi0 / (a1 Phi1) on the grid."""
    validate_hypotheses(case, grid.domain)
    side0, side1 = KIND_SIDES[case.kind]
    env0 = _envelope_array(grid, case.b0, case.E0, side0)
    env1 = _envelope_array(grid, case.b1, case.E1, side1)
    dth = _theta_float(case.theta1) - _theta_float(case.theta0)
    t = grid.t
    sv_vals = np.asarray(case.a0(t)) * env0 / (np.asarray(case.a1(t)) * env1)
    values = t ** dth * sv_vals
    # The gauge is u^(theta1-theta0) times a slowly varying factor: it is
    # equivalent to an increasing function but may genuinely dip where the
    # SV factor turns (and crashes at the unit-domain edge, where upper
    # envelopes vanish).  The raw values are kept (pointwise identities and
    # reflection exactness depend on them); the isotonic defect inside the
    # sweep window is the equivalence constant and must stay bounded.
    iso = np.maximum.accumulate(values)
    adjust = (iso - values) / iso
    sweep = u_sweep(grid, exclude_decades=1.0, stride=1)
    if float(np.max(adjust[sweep], initial=0.0)) > MAX_RHO_DIP:
        raise InvariantError(
            f"rho dips by {np.max(adjust[sweep]):.2%} inside the sweep window; "
            "not equivalent to increasing")
    monotone_adjust = float(np.max(adjust, initial=0.0))
    symbolic = None
    if grid.domain == UNIT:
        e0 = envelope_exponent(case.b0, case.E0, side0)
        e1 = envelope_exponent(case.b1, case.E1, side1)
        sa0, sa1 = log_exponent(case.a0, 0), log_exponent(case.a1, 0)
        if None not in (e0, e1, sa0, sa1):
            power = (Fraction(case.theta1) - Fraction(case.theta0)
                     if isinstance(case.theta0, (int, Fraction)) and isinstance(case.theta1, (int, Fraction))
                     else dth)
            symbolic = SymbolicRho(power, (sa0 + e0) - (sa1 + e1))
    sv_part = sv_mul(
        sv_mul(case.a0, Envelope("phi0", grid.log_t, env0,
                                 log_exp0=envelope_exponent(case.b0, case.E0, side0))),
        sv_pow(sv_mul(case.a1, Envelope("phi1", grid.log_t, env1,
                                        log_exp0=envelope_exponent(case.b1, case.E1, side1))), -1))
    return RhoFunction(case, grid, values, env0, env1, symbolic, sv_part, monotone_adjust)


def compose_with_rho(b: SVExpr, rho: RhoFunction) -> SVExpr:
    """b(rho(u)) as an expression; gamma = theta1 - theta0 > 0."""
    dth = _theta_float(rho.case.theta1) - _theta_float(rho.case.theta0)
    return sv_compose_power(b, dth, rho.sv_part)


# ---------------------------------------------------------------------------
# Right-hand-side evaluator
# ---------------------------------------------------------------------------

class HolmstedtEvaluator:
    """Precomputes all u-independent passes for one (case, K-profile) pair."""

    def __init__(self, case: CoupleCase, k: KProfile, rho: Optional[RhoFunction] = None):
        self.case = case
        self.grid = k.grid
        self.k = k
        self.ext = self.grid.domain == FULL
        self.rho = rho if rho is not None else make_rho(case, self.grid)
        t = self.grid.t
        th0, th1 = _theta_float(case.theta0), _theta_float(case.theta1)
        self.h0vals = t ** (-th0) * np.asarray(case.a0(t)) * k.values
        self.h1vals = t ** (-th1) * np.asarray(case.a1(t)) * k.values
        self.b0v = np.asarray(case.b0(t), dtype=float)
        self.b1v = np.asarray(case.b1(t), dtype=float)
        self.h0 = HomNorms(self.grid, self.h0vals, case.F0)
        self.h1 = HomNorms(self.grid, self.h1vals, case.F1)
        kind = case.kind
        if kind in ("RR", "LR"):
            # Q1 = || b1(t) ||H1||_F1(t, T) ||_E1(u, T): u-independent inner pass
            q1_integrand = self.b1v * self.h1.tail_all(extended=self.ext)
            self._q1_outer = HomNorms(self.grid, q1_integrand, case.E1)
        if kind in ("LL", "LR"):
            # term1 = || b0(t) ||H0||_F0(0, t) ||_E0(0, u)
            t1_integrand = self.b0v * self.h0.head_all(from_zero=True)
            self._t1_outer = HomNorms(self.grid, t1_integrand, case.E0)

    # -- individual terms at node index m ----------------------------------

    def _p0_window(self, m: int) -> float:
        """|| b0(t) ||H0||_F0(t, u) ||_E0(0, u) at u = t_m."""
        w = self.b0v[:m + 1] * self.h0.left_windows(m)
        q = self.case.E0.q
        if q == INF:
            return float(np.max(w))
        pw = w ** q
        return float((self.grid.dlog * np.sum(pw[:m])) ** (1.0 / q))

    def _q1_window(self, m: int) -> float:
        """|| b1(t) ||H1||_F1(u, t) ||_E1(u, T) at u = t_m."""
        w = self.b1v[m:] * self.h1.right_windows(m)
        q = self.case.E1.q
        if q == INF:
            return float(np.max(w))
        pw = w ** q
        s = np.sum(pw[1:])
        if not self.ext:
            s -= 0.5 * pw[-1]
        return float((self.grid.dlog * max(s, 0.0)) ** (1.0 / q))

    def terms(self, m: int) -> dict:
        """Named right-hand-side terms at u = t_m (rho factors not applied)."""
        c, rho_u = self.case, float(self.rho.values[m])
        kind = c.kind
        out = {"rho": rho_u}
        if kind == "RR":
            out["P0"] = self._p0_window(m)
            out["R1"] = float(self.rho.env1[m] * self.h1.tail(m, self.ext))
            out["Q1"] = float(self._q1_outer.tail(m, self.ext))
        elif kind == "LL":
            out["P0"] = float(self._t1_outer.head(m, from_zero=True))
            out["R0"] = float(self.rho.env0[m] * self.h0.head(m, from_zero=True))
            out["Q1"] = self._q1_window(m)
        elif kind == "RL":
            out["P0"] = self._p0_window(m)
            out["Q1"] = self._q1_window(m)
        elif kind == "LR":
            out["P0"] = float(self._t1_outer.head(m, from_zero=True))
            out["R0"] = float(self.rho.env0[m] * self.h0.head(m, from_zero=True))
            out["R1"] = float(self.rho.env1[m] * self.h1.tail(m, self.ext))
            out["Q1"] = float(self._q1_outer.tail(m, self.ext))
        return out

    def rhs(self, m: int) -> float:
        t = self.terms(m)
        kind = self.case.kind
        if kind == "RR":
            return t["P0"] + t["rho"] * (t["R1"] + t["Q1"])
        if kind == "LL":
            return t["P0"] + t["R0"] + t["rho"] * t["Q1"]
        if kind == "RL":
            return t["P0"] + t["rho"] * t["Q1"]
        return t["P0"] + t["R0"] + t["rho"] * (t["R1"] + t["Q1"])

    def rhs_sweep(self, indices) -> np.ndarray:
        return np.array([self.rhs(int(m)) for m in indices])


def holmstedt_rhs(case: CoupleCase, k: KProfile, u: float,
                  rho: Optional[RhoFunction] = None) -> float:
    """Right-hand side of the matching formula at the node nearest to u."""
    m = k.grid.node_index(u)
    return HolmstedtEvaluator(case, k, rho).rhs(m)


# ---------------------------------------------------------------------------
# Truncation-family upper bound for K(rho(u), f; Y0, Y1)
# ---------------------------------------------------------------------------

class TruncationScan:
    """Upper bound min_tau ||(f*-tau)_+||_Y0 + rho * ||min(f*,tau)||_Y1.

    The tau grid is the set of sampled f* values (plus 0), so the scan
    includes both endpoint decompositions.
    """

    def __init__(self, case: CoupleCase, fstar: SampledFunction, stride: int = 1):
        if not fstar.is_nonincreasing():
            raise InvariantError("truncation scan requires a non-increasing f*")
        self.case = case
        grid = fstar.grid
        y0, y1 = case.member_spec(0), case.member_spec(1)
        from .sampling import HeadModelWarning
        from .spaces import space_norm
        taus = np.unique(np.concatenate([[0.0], fstar.values[::max(1, stride)]]))
        a_vals, b_vals = [], []
        import warnings as _w
        with _w.catch_warnings():
            # truncating just below a sample value makes the local head model
            # steep by construction; the resulting mass error is one cell
            _w.simplefilter("ignore", HeadModelWarning)
            for tau in taus:
                g = np.maximum(fstar.values - tau, 0.0)
                h = np.minimum(fstar.values, tau)
                a_vals.append(space_norm(y0, peetre_k(SampledFunction(grid, g))))
                b_vals.append(space_norm(y1, peetre_k(SampledFunction(grid, h))))
        self.taus = taus
        self.a = np.array(a_vals)
        self.b = np.array(b_vals)

    def bound(self, rho_u: float) -> float:
        return float(np.min(self.a + rho_u * self.b))


def couple_k_upper(case: CoupleCase, fstar: SampledFunction, u: float,
                   rho: Optional[RhoFunction] = None, stride: int = 1) -> float:
    """One-shot upper bound for K(rho(u), f; Y0, Y1) at the node nearest u."""
    grid = fstar.grid
    m = grid.node_index(u)
    rho = rho if rho is not None else make_rho(case, grid)
    return TruncationScan(case, fstar, stride).bound(float(rho.values[m]))


def u_sweep(grid: GeometricGrid, exclude_decades: float = 1.0, stride: int = 4) -> np.ndarray:
    """Node indices for u sweeps, excluding the outermost decades."""
    skip = int(round(exclude_decades * math.log(10.0) / grid.dlog))
    lo, hi = skip, grid.n - 1 - skip
    if hi <= lo:
        raise ParameterError("sweep window is empty; grid too small for the exclusion")
    return np.arange(lo, hi + 1, stride)


def holmstedt_samples(case: CoupleCase, grid: GeometricGrid, family: list,
                      exclude_decades: float = 1.0, stride: int = 16,
                      tau_stride: int = 1) -> tuple:
    """(ids, upper-bound values, rhs values) over family x u-sweep."""
    rho = make_rho(case, grid)
    idx = u_sweep(grid, exclude_decades, stride)
    ids, lhs, rhs = [], [], []
    for name, fstar in family:
        k = peetre_k(fstar)
        ev = HolmstedtEvaluator(case, k, rho)
        scan = TruncationScan(case, fstar, stride=tau_stride)
        for m in idx:
            m = int(m)
            ids.append(f"{name} u={grid.t[m]:.4g}")
            lhs.append(scan.bound(float(rho.values[m])))
            rhs.append(ev.rhs(m))
    return ids, lhs, rhs


def check_holmstedt(case: CoupleCase, family_fn, n: int, domain: str = UNIT,
                    threshold: float = 50.0, exclude_decades: float = 1.0,
                    stride: int = 16, tau_stride: int = 1, refine: bool = True,
                    label: Optional[str] = None):
    """Bounded-band certificate: truncation-scan upper bound vs formula."""
    from .grid import default_grid
    from .verify import check_equivalence, spread_of
    grid = default_grid(domain, n)
    ids, lhs, rhs = holmstedt_samples(case, grid, family_fn(grid),
                                      exclude_decades, stride, tau_stride)
    refinement = None
    if refine:
        grid2 = default_grid(domain, 2 * n)
        _, l2, r2 = holmstedt_samples(case, grid2, family_fn(grid2),
                                      exclude_decades, 2 * stride, tau_stride)
        refinement = spread_of(l2, r2)
    return check_equivalence(label or f"holmstedt[{case.kind}]", ids, lhs, rhs,
                             threshold, refinement_spread=refinement)
