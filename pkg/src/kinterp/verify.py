"""Equivalence engine and the lemma/property check catalog.

Every check reduces to bounded-ratio statistics: two-sided checks certify
c <= lhs/rhs <= C with spread C/c below a threshold and stable under grid
refinement; one-sided checks certify only the upper constant C_max and
pass iff it is refinement-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import ParameterError
from .grid import FULL, UNIT, GeometricGrid, default_grid
from .norms import FLOOR, HomNorms, band_profile, outer_norm, sv_profile
from .sampling import peetre_k, power_log, random_steps, reverse_couple
from .spaces import Classic, LClass, RClass, space_norm, symmetrize
from .sv import (INF, LqSpace, SVExpr, log_pow, lognorm_asymptotic, ONE)

STABLE_FACTOR = 1.5


@dataclass
class EquivalenceReport:
    label: str
    samples: list                      # (id, lhs, rhs, ratio)
    ratio_min: float
    ratio_max: float
    spread: float
    floor_skipped: int
    threshold: float
    refinement: Optional[tuple] = None  # (spread_n, spread_2n)
    verdict: str = "inconclusive"
    one_sided: bool = False
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_samples": len(self.samples),
            "samples": [[str(i), float(l), float(r), float(q)]
                        for i, l, r, q in self.samples],
            "ratio_min": self.ratio_min,
            "ratio_max": self.ratio_max,
            "spread": self.spread,
            "floor_skipped": self.floor_skipped,
            "threshold": self.threshold,
            "refinement": list(self.refinement) if self.refinement else None,
            "verdict": self.verdict,
            "one_sided": self.one_sided,
            "notes": self.notes,
        }


def ratio_stats(lhs, rhs, floor: float = FLOOR, one_sided: bool = False):
    """(ratios, skipped): floor guard treats both-sides-below-floor as equal."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    both_small = (lhs < floor) & (rhs < floor)
    valid = ~both_small & np.isfinite(lhs) & np.isfinite(rhs) & (rhs > 0.0)
    ratios = lhs[valid] / rhs[valid]
    return ratios, int(both_small.sum()) + int((~valid & ~both_small).sum())


def spread_of(lhs, rhs, one_sided: bool = False, floor: float = FLOOR) -> Optional[float]:
    ratios, _ = ratio_stats(lhs, rhs, floor)
    if ratios.size == 0:
        return None
    if one_sided:
        return float(ratios.max())
    if ratios.min() <= 0.0:
        return INF
    return float(ratios.max() / ratios.min())


def check_equivalence(label: str, ids: Iterable, lhs, rhs, threshold: float,
                      floor: float = FLOOR, refinement_spread: Optional[float] = None,
                      one_sided: bool = False, notes: Optional[dict] = None) -> EquivalenceReport:
    """Assemble a report; verdict requires spread <= threshold and, when a
    refinement value is supplied, spread_2n <= 1.5 * spread_n."""
    if threshold <= 1.0 and not one_sided:
        raise ParameterError("threshold must exceed 1")
    ids = list(ids)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if len(ids) != lhs.size or lhs.size != rhs.size:
        raise ParameterError("mismatched index sets in check_equivalence")
    ratios, skipped = ratio_stats(lhs, rhs, floor)
    samples = [(i, float(l), float(r), float(l / r) if r > 0 else INF)
               for i, l, r in zip(ids, lhs, rhs) if not (l < floor and r < floor)]
    rep = EquivalenceReport(label, samples, INF, INF, INF, skipped, threshold,
                            one_sided=one_sided, notes=dict(notes or {}))
    if ratios.size == 0:
        rep.verdict = "inconclusive"
        return rep
    rep.ratio_min = float(ratios.min())
    rep.ratio_max = float(ratios.max())
    if one_sided:
        rep.spread = rep.ratio_max
        ok = math.isfinite(rep.spread)
    else:
        rep.spread = INF if rep.ratio_min <= 0 else rep.ratio_max / rep.ratio_min
        ok = rep.spread <= threshold
    if refinement_spread is not None:
        rep.refinement = (rep.spread, float(refinement_spread))
        ok = ok and math.isfinite(refinement_spread) and refinement_spread <= STABLE_FACTOR * rep.spread
        if not one_sided:
            ok = ok and refinement_spread <= threshold * STABLE_FACTOR
    # floor-guard sensitivity: the verdict must not depend on the floor level
    ratios_lo, _ = ratio_stats(lhs, rhs, floor / 100.0)
    flip = (ratios_lo.size == 0) != (ratios.size == 0)
    if not flip and ratios_lo.size and not one_sided and rep.ratio_min > 0:
        flip = (float(ratios_lo.max() / ratios_lo.min()) <= threshold) != (rep.spread <= threshold)
    rep.notes["floor_sensitive"] = bool(flip)
    rep.verdict = "pass" if ok else "fail"
    return rep


def write_jsonl(reports: Iterable[EquivalenceReport], path: str):
    with open(path, "w") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_dict(), sort_keys=True) + "\n")


def write_csv_summary(reports: Iterable[EquivalenceReport], path: str):
    with open(path, "w") as fh:
        fh.write("label,n_samples,ratio_min,ratio_max,spread,floor_skipped,"
                 "refined_spread,verdict\n")
        for r in reports:
            ref = r.refinement[1] if r.refinement else ""
            fh.write(f"{r.label},{len(r.samples)},{r.ratio_min!r},{r.ratio_max!r},"
                     f"{r.spread!r},{r.floor_skipped},{ref!r},{r.verdict}\n")


# ---------------------------------------------------------------------------
# Lemma suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    n: int = 2048
    refine: bool = True
    seed: int = 20240915
    interior_frac: float = 1.0 / 6.0
    stride: int = 8
    threshold: float = 10.0
    sym_tol: float = 1e-6


def _interior_indices(grid: GeometricGrid, cfg: SuiteConfig) -> np.ndarray:
    sl = grid.interior(cfg.interior_frac)
    return np.arange(sl.start, sl.stop, cfg.stride)


def _test_kprofile(grid: GeometricGrid):
    support = 1.0 if grid.domain == FULL else None
    return peetre_k(power_log(grid, 2.0, 0.0, support=support))


def _two_level(label: str, sampler: Callable[[GeometricGrid], tuple], cfg: SuiteConfig,
               domain: str, threshold: float, one_sided: bool = False) -> EquivalenceReport:
    ids, lhs, rhs = sampler(default_grid(domain, cfg.n))
    refinement = None
    if cfg.refine:
        _, l2, r2 = sampler(default_grid(domain, 2 * cfg.n))
        refinement = spread_of(l2, r2, one_sided)
    return check_equivalence(label, ids, lhs, rhs, threshold,
                             refinement_spread=refinement, one_sided=one_sided)


def _multi_two_level(label: str, sampler: Callable[[GeometricGrid], list], cfg: SuiteConfig,
                     domain: str, threshold: float, one_sided: bool = False) -> list:
    """One report per parameter combination.

    The equivalence constants of the underlying statements depend on the
    parameters; uniformity is claimed only across the swept variable, so
    each combination carries its own spread and refinement verdict.
    """
    groups = sampler(default_grid(domain, cfg.n))
    refined = {}
    if cfg.refine:
        for sub, ids, lhs, rhs in sampler(default_grid(domain, 2 * cfg.n)):
            refined[sub] = spread_of(lhs, rhs, one_sided)
    out = []
    for sub, ids, lhs, rhs in groups:
        out.append(check_equivalence(f"{label}[{sub}]", ids, lhs, rhs, threshold,
                                     refinement_spread=refined.get(sub),
                                     one_sided=one_sided))
    return out


# -- lem1: norms of s^a b(s) over (0,t), (t,inf) and (t,2t) ------------------

def _check_lem1_i(cfg: SuiteConfig) -> list:
    def sampler(grid):
        idx = _interior_indices(grid, cfg)
        t = grid.t
        groups = []
        for alpha in (0.3, 1.0):
            for bname, b in (("1", ONE), ("l(1)", log_pow(1)), ("l(-1)", log_pow(-1))):
                bv = np.asarray(b(t))
                for q in (1.0, 2.0, INF):
                    low = HomNorms(grid, t ** alpha * bv, q).head_all(from_zero=True)
                    up = HomNorms(grid, t ** (-alpha) * bv, q).tail_all(extended=True)
                    ref = t ** alpha * bv
                    refm = t ** (-alpha) * bv
                    groups.append((f"low a={alpha} b={bname} q={q}",
                                   [f"i={i}" for i in idx], low[idx], ref[idx]))
                    groups.append((f"up a={alpha} b={bname} q={q}",
                                   [f"i={i}" for i in idx], up[idx], refm[idx]))
        return groups
    return _multi_two_level("lem1.i", sampler, cfg, FULL, cfg.threshold)


def _check_lem1_ii(cfg: SuiteConfig) -> list:
    def sampler(grid):
        idx = _interior_indices(grid, cfg)
        t = grid.t
        groups = []
        for alpha in (-1.0, 0.0, 1.0):
            for bname, b in (("1", ONE), ("l(1)", log_pow(1))):
                bv = np.asarray(b(t))
                for q in (1.0, 2.0, INF):
                    band = band_profile(grid, t ** alpha * bv, q, math.log(2.0))
                    ref = t ** alpha * bv
                    keep = idx[np.isfinite(band[idx])]
                    groups.append((f"a={alpha} b={bname} q={q}",
                                   [f"i={i}" for i in keep], band[keep], ref[keep]))
        return groups
    return _multi_two_level("lem1.ii", sampler, cfg, FULL, cfg.threshold)


def _check_lem1_iv(cfg: SuiteConfig) -> EquivalenceReport:
    lower_matrix = [("l(-2)", log_pow(-2), 1.0), ("l(-1)", log_pow(-1), 2.0),
                    ("l(-0.5)", log_pow(-0.5), INF), ("l(-2,3)", log_pow(-2, 3), 1.0)]
    upper_matrix = [("l(-2)", log_pow(-2), 1.0), ("l(3,-2)", log_pow(3, -2), 1.0),
                    ("l(-1)", log_pow(-1), 2.0), ("l(-0.5)", log_pow(-0.5), INF)]

    def sampler(grid):
        idx = _interior_indices(grid, cfg)
        t = grid.t
        ids, lhs, rhs = [], [], []
        for bname, b, q in lower_matrix:
            prof = sv_profile(grid, b, q, "lower")
            bv = np.asarray(b(t))
            for i in idx:
                ids.append(f"low {bname} q={q} i={i}")
                lhs.append(bv[i]); rhs.append(prof[i])
        for bname, b, q in upper_matrix:
            prof = sv_profile(grid, b, q, "upper")
            bv = np.asarray(b(t))
            for i in idx:
                ids.append(f"up {bname} q={q} i={i}")
                lhs.append(bv[i]); rhs.append(prof[i])
        return ids, lhs, rhs
    return _two_level("lem1.iv", sampler, cfg, FULL, cfg.threshold, one_sided=True)


# -- lema45: collapsing a nested norm of a monotone function ----------------

def _lema45_functions(grid: GeometricGrid):
    """Monotone test functions: K-profiles and reversed K-profiles."""
    from .sampling import chi
    k1 = peetre_k(power_log(grid, 2.0, 0.0, support=1.0))
    k2 = peetre_k(power_log(grid, 1.5, 0.5, support=1.0))
    k3 = peetre_k(chi(grid, 1e-2))
    return [("K1", k1.values), ("K2", k2.values), ("K3", k3.values),
            ("K1rev", reverse_couple(k1).values), ("K3rev", reverse_couple(k3).values)]


def _check_lema45_0t(cfg: SuiteConfig) -> list:
    spaces = [(1.0, 2.0), (2.0, INF), (INF, 1.0)]

    def sampler(grid):
        t = grid.t
        fams = _lema45_functions(grid)
        groups = []
        for alpha in (0.0, 0.5, -0.5):
            for beta in (-0.3, -0.8):
                if not -0.95 <= alpha + beta <= -0.05:
                    continue
                for bname, b in (("1", ONE), ("l(1)", log_pow(1))):
                    bv = np.asarray(b(t))
                    for qe, qf in spaces:
                        ids, lhs, rhs = [], [], []
                        for fname, f in fams:
                            inner = HomNorms(grid, t ** alpha * f, qf).head_all(from_zero=True)
                            lhs.append(outer_norm(grid, t ** beta * bv * inner, qe))
                            rhs.append(outer_norm(grid, t ** (alpha + beta) * bv * f, qe))
                            ids.append(fname)
                        groups.append((f"a={alpha} b0={beta} b={bname} E={qe} F={qf}",
                                       ids, lhs, rhs))
        return groups
    return _multi_two_level("lema45.0t", sampler, cfg, FULL, cfg.threshold)


def _check_lema45_tinfty(cfg: SuiteConfig) -> list:
    spaces = [(1.0, 2.0), (2.0, INF), (INF, 1.0)]

    def sampler(grid):
        t = grid.t
        fams = _lema45_functions(grid)
        groups = []
        for alpha in (-0.5, -0.9):
            for gamma in (0.3, 0.8):
                if not -0.95 <= alpha + gamma <= -0.05:
                    continue
                for bname, b in (("1", ONE), ("l(1)", log_pow(1))):
                    bv = np.asarray(b(t))
                    for qe, qf in spaces:
                        ids, lhs, rhs = [], [], []
                        for fname, f in fams:
                            inner = HomNorms(grid, t ** alpha * f, qf).tail_all(extended=True)
                            lhs.append(outer_norm(grid, t ** gamma * bv * inner, qe))
                            rhs.append(outer_norm(grid, t ** (alpha + gamma) * bv * f, qe))
                            ids.append(fname)
                        groups.append((f"a={alpha} g={gamma} b={bname} E={qe} F={qf}",
                                       ids, lhs, rhs))
        return groups
    return _multi_two_level("lema45.tinfty", sampler, cfg, FULL, cfg.threshold)


# -- lemLRK: pointwise lower estimates for nested norms ----------------------

def _lrk_matrix():
    return [("1/Linf", ONE, INF), ("l(-2)/L1", log_pow(-2), 1.0)]


def _check_lemLRK(cfg: SuiteConfig, which: str) -> EquivalenceReport:
    def sampler(grid):
        k = _test_kprofile(grid)
        t = grid.t
        idx = _interior_indices(grid, cfg)[::2]
        ids, lhs, rhs = [], [], []
        for theta in (0.0, 0.5, 1.0):
            h = t ** (-theta) * k.values
            for bname, b, qe in _lrk_matrix():
                env = sv_profile(grid, b, qe, "lower" if which == "e5" else "upper")
                bv = np.asarray(b(t))
                for qf in (1.0, INF):
                    hn = HomNorms(grid, h, qf)
                    he = HomNorms(grid, bv, qe)
                    for m in idx:
                        m = int(m)
                        if which == "e5":
                            w = hn.left_windows(m)
                            x = bv[:m + 1] * w
                            if qe == INF:
                                right = float(np.max(x))
                            else:
                                right = float((grid.dlog * np.sum((x[:m]) ** qe)) ** (1 / qe))
                        else:
                            w = hn.right_windows(m)
                            x = bv[m:] * w
                            if qe == INF:
                                right = float(np.max(x))
                            else:
                                pw = x ** qe
                                s = np.sum(pw[1:])
                                if grid.domain != FULL:
                                    s -= 0.5 * pw[-1]
                                right = float((grid.dlog * max(s, 0.0)) ** (1 / qe))
                        left = t[m] ** (-theta) * env[m] * k.values[m]
                        ids.append(f"th={theta} b={bname} F={qf} m={m}")
                        lhs.append(left); rhs.append(right)
        return ids, lhs, rhs
    return _two_level(f"lemLRK.{which}", sampler, cfg, FULL, cfg.threshold, one_sided=True)


# -- elementary estimates e1 / e3 --------------------------------------------

def _check_pointwise(cfg: SuiteConfig, which: str) -> EquivalenceReport:
    thetas = (0.0, 0.5, 1.0) if which == "e1" else (0.5, 1.0)

    def sampler(grid):
        k = _test_kprofile(grid)
        t = grid.t
        idx = _interior_indices(grid, cfg)
        ids, lhs, rhs = [], [], []
        for theta in thetas:
            for bname, b in (("1", ONE), ("l(1)", log_pow(1))):
                bv = np.asarray(b(t))
                h = t ** (-theta) * bv * k.values
                for q in (1.0, 2.0, INF):
                    hn = HomNorms(grid, h, q)
                    prof = hn.head_all(from_zero=True) if which == "e1" else hn.tail_all(extended=True)
                    for i in idx:
                        ids.append(f"th={theta} b={bname} q={q} i={i}")
                        lhs.append(h[i]); rhs.append(prof[i])
        return ids, lhs, rhs
    return _two_level(which, sampler, cfg, FULL, cfg.threshold, one_sided=True)


# -- einfty: closed-form asymptotics of log-norms ----------------------------

def _check_einfty(cfg: SuiteConfig, side: str) -> list:
    matrix = ([(-2.0, 1.0), (-1.5, 2.0), (-0.5, INF), (-3.0, 1.0)] if side == "lower"
              else [(0.0, 1.0), (1.0, 2.0), (0.5, INF), (-0.3, 1.0)])

    def sampler(grid):
        t = grid.t
        half = int(np.searchsorted(t, 0.5))
        idx = np.arange(0, half, cfg.stride)
        groups = []
        for sigma, q in matrix:
            prof = sv_profile(grid, log_pow(sigma), q, side)
            asym = np.asarray(lognorm_asymptotic(sigma, q, side)(t))
            groups.append((f"s={sigma} q={q}", [f"i={i}" for i in idx],
                           prof[idx], asym[idx]))
        return groups
    return _multi_two_level(f"einfty.{side}", sampler, cfg, UNIT, cfg.threshold)


# -- symLR.norm: couple reversal is an exact discrete symmetry ---------------

def _check_symLR(cfg: SuiteConfig) -> EquivalenceReport:
    def sampler(grid):
        k = _test_kprofile(grid)
        krev = reverse_couple(k)
        specs = []
        for theta in (0.3, 0.5):
            for bname, b in (("l(2)", log_pow(2)), ("l(1,-1)", log_pow(1, -1))):
                for q in (1.0, 2.0, INF):
                    specs.append((f"classic th={theta} b={bname} E={q}",
                                  Classic(theta, b, LqSpace(q))))
        specs.append(("R th=0.3", RClass(0.3, log_pow(-2), LqSpace(1.0), log_pow(1), LqSpace(2.0))))
        specs.append(("L th=0.7", LClass(0.7, log_pow(1, -3), LqSpace(2.0), ONE, LqSpace(1.0))))
        from .spaces import Extreme
        specs.append(("LL th=0.4", Extreme("LL", 0.4, log_pow(2, -4), LqSpace(1.0),
                                           log_pow(1), LqSpace(2.0), ONE, LqSpace(INF))))
        specs.append(("RL th=0.4", Extreme("RL", 0.4, log_pow(-3), LqSpace(2.0),
                                           log_pow(-1), LqSpace(1.0), ONE, LqSpace(INF))))
        ids, lhs, rhs = [], [], []
        for name, spec in specs:
            ids.append(name)
            lhs.append(space_norm(spec, k))
            rhs.append(space_norm(symmetrize(spec), krev))
        return ids, lhs, rhs
    return _two_level("symLR.norm", sampler, cfg, FULL, 1.0 + cfg.sym_tol)


# -- Le51: substitution t = rho(u) --------------------------------------------

def _le51_kprofiles(grid: GeometricGrid):
    from .sampling import chi
    return [("f1", peetre_k(power_log(grid, 2.0, 0.0, support=1.0))),
            ("f2", peetre_k(power_log(grid, 1.5, 0.5, support=1.0))),
            ("f3", peetre_k(power_log(grid, 6.0, -1.0, support=1.0))),
            ("f4", peetre_k(chi(grid, 1e-2)))]


def _check_le51(cfg: SuiteConfig) -> list:
    combos = [(0.0, log_pow(-2), "l(-2)"), (0.5, ONE, "1"),
              (0.5, log_pow(1), "l(1)"), (1.0, log_pow(-2), "l(-2)")]

    def sampler(grid):
        from .norms import hom_norm
        t = grid.t
        ks = _le51_kprofiles(grid)
        groups = []
        for alpha in (0.3, 0.7):
            for aname, a in (("1", ONE), ("l(-0.5)", log_pow(-0.5))):
                rho = t ** alpha * np.asarray(a(t))
                rho = np.clip(rho, t[0], t[-1])
                # the substitution only covers t in rho(grid); compare the
                # direct norm over the same window, as truncation outside it
                # is invisible to the substituted side
                lo, hi = float(rho[0]), float(rho[-1])
                for theta, b, bname in combos:
                    for q in (1.0, INF):
                        ids, lhs, rhs = [], [], []
                        for fname, k in ks:
                            krho = k(rho)
                            x = rho ** (-theta) * np.asarray(b(rho)) * krho
                            y = t ** (-theta) * np.asarray(b(t)) * k.values
                            ids.append(fname)
                            lhs.append(outer_norm(grid, x, q))
                            rhs.append(hom_norm(grid, y, q, lo, hi))
                        groups.append((f"al={alpha} a={aname} th={theta} b={bname} E={q}",
                                       ids, lhs, rhs))
        return groups
    return _multi_two_level("Le51.subst", sampler, cfg, FULL, cfg.threshold)


# -- inclusion of R/L scales on the ordered domain ---------------------------

def _inclusion_specs(kind: str):
    b_r, e_r = log_pow(-2), LqSpace(1.0)
    mk = {"R": lambda th: RClass(th, b_r, e_r, ONE, LqSpace(2.0)),
          "L": lambda th: LClass(th, ONE, LqSpace(1.0), ONE, LqSpace(2.0))}
    hi = mk[kind[0]](0.7)   # smaller space, larger theta
    lo = mk[kind[1]](0.3)   # larger space, smaller theta
    return lo, hi


def _check_inclusion(cfg: SuiteConfig, kind: str) -> EquivalenceReport:
    def sampler(grid):
        lo, hi = _inclusion_specs(kind)
        from .sampling import default_family
        fam = default_family(grid, 1.0 / 0.7, 1.0 / 0.3, seed=cfg.seed)
        ids, lhs, rhs = [], [], []
        for name, fstar in fam:
            k = peetre_k(fstar)
            ids.append(name)
            lhs.append(space_norm(lo, k))
            rhs.append(space_norm(hi, k))
        return ids, lhs, rhs
    return _two_level(f"inclusion.{kind}", sampler, cfg, UNIT, cfg.threshold, one_sided=True)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

CATALOG: dict = {
    "lem1.i": _check_lem1_i,
    "lem1.ii": _check_lem1_ii,
    "lem1.iv": _check_lem1_iv,
    "lema45.0t": _check_lema45_0t,
    "lema45.tinfty": _check_lema45_tinfty,
    "lemLRK.e5": lambda cfg: _check_lemLRK(cfg, "e5"),
    "lemLRK.e7": lambda cfg: _check_lemLRK(cfg, "e7"),
    "e1": lambda cfg: _check_pointwise(cfg, "e1"),
    "e3": lambda cfg: _check_pointwise(cfg, "e3"),
    "einfty.lower": lambda cfg: _check_einfty(cfg, "lower"),
    "einfty.upper": lambda cfg: _check_einfty(cfg, "upper"),
    "symLR.norm": _check_symLR,
    "Le51.subst": _check_le51,
    "inclusion.RR": lambda cfg: _check_inclusion(cfg, "RR"),
    "inclusion.LL": lambda cfg: _check_inclusion(cfg, "LL"),
    "inclusion.RL": lambda cfg: _check_inclusion(cfg, "RL"),
    "inclusion.LR": lambda cfg: _check_inclusion(cfg, "LR"),
}


def run_lemma_suite(ids: Optional[list] = None,
                    cfg: SuiteConfig = SuiteConfig()) -> list:
    """Execute the registered property checks; unknown ids raise.

    Checks whose equivalence constants depend on parameters emit one report
    per parameter combination, so the result usually holds more reports
    than ids.
    """
    ids = list(CATALOG) if ids is None else list(ids)
    unknown = [i for i in ids if i not in CATALOG]
    if unknown:
        raise ParameterError(f"unknown lemma ids: {unknown}")
    reports = []
    for i in ids:
        out = CATALOG[i](cfg)
        reports.extend(out if isinstance(out, list) else [out])
    return reports
