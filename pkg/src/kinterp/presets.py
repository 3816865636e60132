"""Couple-case builders for the concrete application families.

Grand and small Lebesgue spaces, Gamma spaces with double weight and the
A/B-type spaces are all R/L-type spaces over (L_1, L_inf) on (0, 1); the
builders here produce the matching couple cases, the expected symbolic
reiteration data (exact rational arithmetic) and default parameterized
instances for each check id exposed by the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ParameterError
from .holmstedt import CoupleCase
from .reiteration import ReiterationCase
from .spaces import AType, BType, GammaDouble, GrandLebesgue, SmallLebesgue
from .sv import INF, LogPow, LqSpace, ONE, SVExpr, log_pow, sv_pow

Rat = Union[int, Fraction]


def _frac(x) -> Fraction:
    return Fraction(x).limit_denominator(10 ** 9) if not isinstance(x, (int, Fraction)) else Fraction(x)


def conjugate(p: Rat) -> Fraction:
    p = _frac(p)
    return p / (p - 1)


def theta_of(p: Rat) -> Fraction:
    """theta with X_theta over (L_1, L_inf) matching the L_p scale: 1 - 1/p."""
    return 1 - 1 / _frac(p)


# ---------------------------------------------------------------------------
# Grand / small Lebesgue couples
# ---------------------------------------------------------------------------

def grand_r_spec(p: Rat, alpha: Rat):
    """R-class data identifying the grand Lebesgue space of (p, alpha)."""
    p = _frac(p)
    return dict(theta=theta_of(p), b=log_pow(-Fraction(alpha) / p), E=LqSpace(INF),
                a=ONE, F=LqSpace(float(p)))


def small_l_spec(p: Rat, alpha: Rat):
    """L-class data identifying the small Lebesgue space of (p, alpha)."""
    p = _frac(p)
    return dict(theta=theta_of(p), b=log_pow(Fraction(alpha) / conjugate(p) - 1),
                E=LqSpace(1.0), a=ONE, F=LqSpace(float(p)))


def _couple(kind: str, s0: dict, s1: dict) -> CoupleCase:
    return CoupleCase(kind, s0["theta"], s1["theta"], s0["a"], s1["a"],
                      s0["b"], s1["b"], s0["E"], s1["E"], s0["F"], s1["F"])


def grand_grand_case(p0: Rat, p1: Rat, alpha: Rat, beta: Rat) -> CoupleCase:
    return _couple("RR", grand_r_spec(p0, alpha), grand_r_spec(p1, beta))


def small_small_case(p0: Rat, p1: Rat, alpha: Rat, beta: Rat) -> CoupleCase:
    return _couple("LL", small_l_spec(p0, alpha), small_l_spec(p1, beta))


def grand_small_case(p0: Rat, p1: Rat, alpha: Rat, beta: Rat) -> CoupleCase:
    return _couple("RL", grand_r_spec(p0, alpha), small_l_spec(p1, beta))


def small_grand_case(p0: Rat, p1: Rat, alpha: Rat, beta: Rat) -> CoupleCase:
    return _couple("LR", small_l_spec(p0, alpha), grand_r_spec(p1, beta))


def expected_grand_small(name: str, p0: Rat, p1: Rat, alpha: Rat, beta: Rat,
                         theta: Rat) -> dict:
    """Exact rational reiteration data stated by the application identities."""
    p0, p1 = _frac(p0), _frac(p1)
    a, b, th = _frac(alpha), _frac(beta), _frac(theta)
    pp0, pp1 = conjugate(p0), conjugate(p1)
    rho_power = 1 / p0 - 1 / p1
    if name == "cor55":
        rho_log = b / p1 - a / p0
        weight = -(a * (1 - th) / p0 + b * th / p1)
    elif name == "cor57":
        rho_log = a / pp0 - b / pp1
        weight = a * (1 - th) / pp0 + b * th / pp1
    elif name == "cor1":
        rho_log = -(a / p0 + b / pp1)
        weight = -a * (1 - th) / p0 + b * th / pp1
    elif name == "cor2":
        rho_log = a / pp0 + b / p1
        weight = a * (1 - th) / pp0 - b * th / p1
    else:
        raise ParameterError(f"unknown corollary preset {name!r}")
    theta_tilde = (1 - th) * theta_of(p0) + th * theta_of(p1)
    return {
        "rho_power": rho_power,
        "rho_log_exp": rho_log,
        "theta_tilde": theta_tilde,
        "inv_p": 1 - theta_tilde,
        "b_weight_exp": weight,
    }


CORO_CASES = {
    "cor55": grand_grand_case,
    "cor57": small_small_case,
    "cor1": grand_small_case,
    "cor2": small_grand_case,
}


def corollary_case(name: str, p0: Rat = 2, p1: Rat = 4, alpha: Rat = 1, beta: Rat = 1,
                   theta: Rat = Fraction(1, 2), b: Optional[SVExpr] = None,
                   E: Optional[LqSpace] = None) -> ReiterationCase:
    if name not in CORO_CASES:
        raise ParameterError(f"unknown corollary preset {name!r}")
    couple = CORO_CASES[name](p0, p1, alpha, beta)
    return ReiterationCase(couple, _frac(theta), b if b is not None else ONE,
                           E if E is not None else LqSpace(INF))


def concrete_space(name: str, p: Rat, alpha: Rat):
    """The directly-defined space of the given family (grand/small)."""
    if name == "grand":
        return GrandLebesgue(float(p), float(alpha))
    if name == "small":
        return SmallLebesgue(float(p), float(alpha))
    raise ParameterError(f"unknown concrete family {name!r}")


# ---------------------------------------------------------------------------
# Gamma spaces with double weight
# ---------------------------------------------------------------------------

def gamma_l_spec(p: Rat, q: float, uw1: SVExpr, w2: SVExpr) -> dict:
    """L-class data identifying GGamma(p, q, w1, w2); uw1 is u*w1(u) in SV form."""
    p = _frac(p)
    b = ONE if q == INF else sv_pow(uw1, Fraction(1, int(q)) if float(q).is_integer() else 1.0 / q)
    a = sv_pow(w2, 1 / p)
    return dict(theta=theta_of(p), b=b, E=LqSpace(float(q)), a=a, F=LqSpace(float(p)))


def gamma_gamma_case(p0: Rat, q0: float, uw1: SVExpr, w2: SVExpr,
                     p1: Rat, q1: float, uw3: SVExpr, w4: SVExpr) -> CoupleCase:
    return _couple("LL", gamma_l_spec(p0, q0, uw1, w2), gamma_l_spec(p1, q1, uw3, w4))


def gamma_space(p: Rat, q: float, uw1: SVExpr, w2: SVExpr) -> GammaDouble:
    return GammaDouble(float(p), float(q), uw1, w2)


# ---------------------------------------------------------------------------
# A / B-type couples
# ---------------------------------------------------------------------------

def a_type_spec(p: Rat, alpha: Rat, E: LqSpace) -> dict:
    return dict(theta=theta_of(p), b=log_pow(Fraction(alpha) - 1), E=E, a=ONE, F=LqSpace(1.0))


def b_type_spec(p: Rat, alpha: Rat, E: LqSpace) -> dict:
    return dict(theta=theta_of(p), b=ONE, E=E, a=log_pow(Fraction(alpha) - 1), F=LqSpace(INF))


def ab_case(kinds: str, p0: Rat, alpha: Rat, E0: LqSpace,
            p1: Rat, beta: Rat, E1: LqSpace) -> CoupleCase:
    """Couple of A/B-type spaces; ``kinds`` in {"AA","BB","AB","BA"}."""
    mk = {"A": a_type_spec, "B": b_type_spec}
    try:
        s0 = mk[kinds[0]](p0, alpha, E0)
        s1 = mk[kinds[1]](p1, beta, E1)
    except KeyError:
        raise ParameterError("kinds must pair 'A' and 'B' letters")
    letter = {"A": "R", "B": "L"}
    return _couple(letter[kinds[0]] + letter[kinds[1]], s0, s1)


def ab_space(kind: str, p: Rat, alpha: Rat, E: LqSpace):
    return AType(float(p), float(alpha), E) if kind == "A" else BType(float(p), float(alpha), E)


# ---------------------------------------------------------------------------
# Default theorem-check instances (one per couple kind and theta branch)
# ---------------------------------------------------------------------------

THEOREMS = ("thmRR", "thmLL", "thmRL", "thmLR")
BRANCHES = ("a", "b", "c")


def _default_couple(kind: str) -> CoupleCase:
    th0, th1 = Fraction(1, 4), Fraction(3, 4)
    if kind == "RR":
        m0 = dict(theta=th0, b=log_pow(-2), E=LqSpace(1.0), a=ONE, F=LqSpace(2.0))
        m1 = dict(theta=th1, b=log_pow(-3), E=LqSpace(1.0), a=ONE, F=LqSpace(2.0))
    elif kind == "LL":
        m0 = dict(theta=th0, b=log_pow(Fraction(1, 2)), E=LqSpace(1.0), a=ONE, F=LqSpace(2.0))
        m1 = dict(theta=th1, b=ONE, E=LqSpace(2.0), a=ONE, F=LqSpace(1.0))
    elif kind == "RL":
        m0 = dict(theta=th0, b=log_pow(-2), E=LqSpace(1.0), a=ONE, F=LqSpace(2.0))
        m1 = dict(theta=th1, b=ONE, E=LqSpace(2.0), a=ONE, F=LqSpace(1.0))
    else:  # LR
        m0 = dict(theta=th0, b=log_pow(Fraction(1, 2)), E=LqSpace(INF), a=ONE, F=LqSpace(2.0))
        m1 = dict(theta=th1, b=log_pow(-1), E=LqSpace(2.0), a=ONE, F=LqSpace(2.0))
    return _couple(kind, m0, m1)


def theorem_instance(theorem: str, branch: str) -> ReiterationCase:
    """Default parameterized instance for ids like 'thmRR.a'."""
    if theorem not in THEOREMS or branch not in BRANCHES:
        raise ParameterError(f"unknown theorem id {theorem}.{branch}")
    kind = theorem[3:]
    couple = _default_couple(kind)
    if branch == "a":
        return ReiterationCase(couple, Fraction(1, 2), ONE, LqSpace(2.0))
    if branch == "b":
        return ReiterationCase(couple, 0, log_pow(-1), LqSpace(INF))
    return ReiterationCase(couple, 1, log_pow(-1), LqSpace(INF))


def holmstedt_instances(kind: str) -> list:
    """Two couple instances per kind: trivial weights and log weights."""
    th0, th1 = Fraction(1, 4), Fraction(3, 4)
    trivial_member = dict(theta=th0, b=ONE, E=LqSpace(INF), a=ONE, F=LqSpace(2.0))
    t0, t1 = dict(trivial_member), dict(trivial_member, theta=th1)
    trivial = _couple(kind, t0, t1)
    return [("trivial", trivial), ("log", _default_couple(kind))]
