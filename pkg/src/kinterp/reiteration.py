"""Reiteration targets and equivalence checks.

Given a couple of R/L-type spaces and outer parameters (theta, b, E),
``predict`` constructs the identified target space: a classic space with
transformed parameters for interior theta, and extreme-class spaces (or
intersections) at theta = 0, 1.  ``lhs_norm`` evaluates the interpolation
norm of the couple through the matching K-functional formula and the
substitution t = rho(u); ``check_reiteration`` certifies lhs ~ rhs as a
bounded-ratio property across a family of test functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import CaseError, ParameterError
from .grid import FULL, UNIT, GeometricGrid, KProfile, SampledFunction
from .holmstedt import (CoupleCase, HolmstedtEvaluator, RhoFunction,
                        compose_with_rho, envelope_exponent, make_rho, u_sweep)
from .norms import FLOOR
from .sampling import peetre_k
from .spaces import (Classic, Extreme, Intersection, LClass, RClass, Theta,
                     _theta_float, space_norm)
from .sv import (INF, Envelope, LqSpace, SVExpr, log_exponent, norm_is_finite,
                 sv_mul)


@dataclass(frozen=True)
class ReiterationCase:
    couple: CoupleCase
    theta: Theta
    b: SVExpr
    E: LqSpace

    def __post_init__(self):
        if not 0.0 <= _theta_float(self.theta) <= 1.0:
            raise ParameterError("reiteration requires theta in [0, 1]")

    def validate(self, domain: str):
        th = _theta_float(self.theta)
        if th == 0.0 and domain == FULL:
            if norm_is_finite(self.b, self.E.q, INF) is False:
                raise CaseError("theta = 0 requires ||b|| finite on (1, inf)")
        if th == 1.0:
            if norm_is_finite(self.b, self.E.q, 0) is False:
                raise CaseError("theta = 1 requires ||b|| finite on (0, 1)")


@dataclass
class Prediction:
    target: object            # SpaceSpec or Intersection
    rho: RhoFunction
    theta_tilde: Theta
    b_comp: SVExpr            # b(rho(u))
    symbolic: dict = field(default_factory=dict)


def _affine_theta(theta: Theta, th0: Theta, th1: Theta) -> Theta:
    if all(isinstance(x, (int, Fraction)) for x in (theta, th0, th1)):
        return (Fraction(1) - Fraction(theta)) * Fraction(th0) + Fraction(theta) * Fraction(th1)
    return (1.0 - _theta_float(theta)) * _theta_float(th0) + _theta_float(theta) * _theta_float(th1)


def _env_expr(rho: RhoFunction, j: int) -> Envelope:
    from .holmstedt import KIND_SIDES
    case, grid = rho.case, rho.grid
    side = KIND_SIDES[case.kind][j]
    b = (case.b0, case.b1)[j]
    E = (case.E0, case.E1)[j]
    return Envelope(f"phi{j}", grid.log_t, (rho.env0, rho.env1)[j],
                    log_exp0=envelope_exponent(b, E, side))


def predict(case: ReiterationCase, grid: GeometricGrid) -> Prediction:
    """Construct the identified target space for the given theta branch."""
    case.validate(grid.domain)
    cc = case.couple
    rho = make_rho(cc, grid)
    b_rho = compose_with_rho(case.b, rho)
    th = _theta_float(case.theta)
    kind = cc.kind

    symbolic: dict = {}
    sb = log_exponent(case.b, 0)
    if rho.symbolic is not None and sb is not None:
        symbolic["rho_power"] = rho.symbolic.power
        symbolic["rho_log_exp"] = rho.symbolic.log_exp

    if 0.0 < th < 1.0:
        th_t = _affine_theta(case.theta, cc.theta0, cc.theta1)
        env0, env1 = _env_expr(rho, 0), _env_expr(rho, 1)
        w0 = sv_mul(cc.a0, env0) ** (_one_minus_n(case.theta))
        w1 = sv_mul(cc.a1, env1) ** case.theta
        b_theta = sv_mul(sv_mul(w0, w1), b_rho)
        if rho.symbolic is not None and sb is not None:
            e0, e1 = env0.log_exp0, env1.log_exp0
            sa0, sa1 = log_exponent(cc.a0, 0), log_exponent(cc.a1, 0)
            if None not in (e0, e1, sa0, sa1):
                symbolic["theta_tilde"] = th_t
                symbolic["b_weight_exp"] = _affine(case.theta, _addf(sa0, e0), _addf(sa1, e1))
                symbolic["b_log_exp"] = _addf(symbolic["b_weight_exp"], sb)
        return Prediction(Classic(th_t, b_theta, case.E), rho, th_t, b_rho, symbolic)

    if th == 0.0:
        if kind in ("RR", "RL"):
            target = Extreme("RL", cc.theta0, b_rho, case.E, cc.b0, cc.E0, cc.a0, cc.F0)
        else:  # LL, LR
            b0 = sv_mul(_env_expr(rho, 0), b_rho)
            target = Intersection((
                LClass(cc.theta0, b0, case.E, cc.a0, cc.F0),
                Extreme("LL", cc.theta0, b_rho, case.E, cc.b0, cc.E0, cc.a0, cc.F0),
            ))
        return Prediction(target, rho, cc.theta0, b_rho, symbolic)

    # theta == 1
    if kind in ("LL", "RL"):
        target = Extreme("LR", cc.theta1, b_rho, case.E, cc.b1, cc.E1, cc.a1, cc.F1)
    else:  # RR, LR
        b1 = sv_mul(_env_expr(rho, 1), b_rho)
        target = Intersection((
            RClass(cc.theta1, b1, case.E, cc.a1, cc.F1),
            Extreme("RR", cc.theta1, b_rho, case.E, cc.b1, cc.E1, cc.a1, cc.F1),
        ))
    return Prediction(target, rho, cc.theta1, b_rho, symbolic)


def _one_minus_n(theta: Theta):
    if isinstance(theta, (int, Fraction)):
        return Fraction(1) - Fraction(theta)
    return 1.0 - theta


def _addf(a, b):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) + Fraction(b)
    return float(a) + float(b)


def _affine(theta: Theta, x, y):
    if all(isinstance(v, (int, Fraction)) for v in (theta, x, y)):
        return (Fraction(1) - Fraction(theta)) * Fraction(x) + Fraction(theta) * Fraction(y)
    return (1.0 - float(theta)) * float(x) + float(theta) * float(y)


# ---------------------------------------------------------------------------
# Norm evaluation through the K-functional formula
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    exclude_decades: float = 1.0
    stride: int = 4


def lhs_norm(case: ReiterationCase, fstar: SampledFunction,
             rho: Optional[RhoFunction] = None,
             sweep: SweepConfig = SweepConfig()) -> float:
    """|| rho(u)^(-theta) b(rho(u)) K(rho(u), f; Y0, Y1) ||_E over the u sweep.

    The couple K-functional is represented by its matching-formula right-hand
    side; the substitution u -> rho(u) is measured against du/u.
    """
    grid = fstar.grid
    case.validate(grid.domain)
    k = peetre_k(fstar)
    ev = HolmstedtEvaluator(case.couple, k, rho)
    idx = u_sweep(grid, sweep.exclude_decades, sweep.stride)
    vals = ev.rhs_sweep(idx)
    rho_u = ev.rho.values[idx]
    th = _theta_float(case.theta)
    weight = rho_u ** (-th) * np.asarray(case.b(rho_u), dtype=float)
    x = weight * vals
    q = case.E.q
    if q == INF:
        return float(np.max(x))
    return float((np.sum(x ** q) * grid.dlog * sweep.stride) ** (1.0 / q))


def rhs_norm(pred: Union[Prediction, object], fstar: SampledFunction) -> float:
    """Norm of f in the predicted space; intersections take the max."""
    target = pred.target if isinstance(pred, Prediction) else pred
    k = peetre_k(fstar)
    return space_norm(target, k)


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

def reiteration_samples(case: ReiterationCase, grid: GeometricGrid,
                        family: list, sweep: SweepConfig = SweepConfig()) -> list:
    """(member, lhs, rhs) triples for one grid; non-finite members are kept
    so the report can count floor-skipped entries."""
    pred = predict(case, grid)
    out = []
    for name, fstar in family:
        lhs = lhs_norm(case, fstar, pred.rho, sweep)
        rhs = rhs_norm(pred, fstar)
        out.append((name, lhs, rhs))
    return out


def check_reiteration(case: ReiterationCase, family_fn: Callable[[GeometricGrid], list],
                      n: int, domain: str = UNIT, threshold: float = 50.0,
                      sweep: SweepConfig = SweepConfig(), refine: bool = True,
                      label: Optional[str] = None):
    """Bounded-ratio certificate lhs ~ rhs over the family, with optional
    refinement stability (n vs 2n)."""
    from .grid import default_grid
    from .verify import check_equivalence
    grid = default_grid(domain, n)
    samples = reiteration_samples(case, grid, family_fn(grid), sweep)
    ids = [s[0] for s in samples]
    lhs = np.array([s[1] for s in samples])
    rhs = np.array([s[2] for s in samples])
    refinement = None
    if refine:
        grid2 = default_grid(domain, 2 * n)
        samples2 = reiteration_samples(case, grid2, family_fn(grid2), sweep)
        l2 = np.array([s[1] for s in samples2])
        r2 = np.array([s[2] for s in samples2])
        ok = (l2 > FLOOR) & (r2 > FLOOR)
        if ok.any():
            ratios2 = l2[ok] / r2[ok]
            refinement = float(ratios2.max() / ratios2.min())
    name = label or f"reiteration[{case.couple.kind}, theta={case.theta}]"
    return check_equivalence(name, ids, lhs, rhs, threshold=threshold,
                             refinement_spread=refinement)
