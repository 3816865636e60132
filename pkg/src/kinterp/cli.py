"""Command-line interface: norm evaluation, K-profiles, certification
suites and report aggregation.

Exit codes: 0 all checks pass, 1 any failure, 2 inconclusive results only,
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from . import presets
from .errors import KinterpError, ParameterError, ParseError
from .grid import FULL, UNIT, GeometricGrid, KProfile, default_grid
from .holmstedt import CoupleCase, check_holmstedt
from .reiteration import ReiterationCase, SweepConfig, check_reiteration, lhs_norm
from .sampling import chi, default_family, peetre_k, power_log, random_steps
from .spaces import FSTAR_BASED, K_BASED, space_norm
from .dsl import _Parser, parse_spec, render
from .verify import SuiteConfig, run_lemma_suite

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class _Cli(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we reserve that
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _parse_grid_opt(text: str, domain: str) -> GeometricGrid:
    """--grid accepts '2048' or 'n=2048[,tmin=1e-8][,tmax=...]'."""
    n = None
    tmin = tmax = None
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            key, val = part.split("=", 1)
            key = key.strip()
            if key == "n":
                n = int(val)
            elif key in ("tmin", "t_min"):
                tmin = float(val)
            elif key in ("tmax", "t_max"):
                tmax = float(val)
            else:
                raise ParameterError(f"unknown grid option {key!r}")
        else:
            n = int(part)
    if tmin is None and tmax is None:
        return default_grid(domain, n)
    base = default_grid(domain)
    return GeometricGrid(tmin if tmin is not None else base.t_min,
                         tmax if tmax is not None else base.t_max,
                         n if n is not None else base.n, domain)


def parse_fn(text: str, grid: GeometricGrid, seed: int = 0):
    """Family member spec: pow(r), powlog(r, d), chi(a), steps(seed[, k])."""
    p = _Parser(text)
    name_tok = p.expect("name")
    name = name_tok.text
    p.expect("(")
    args = [p.number()]
    while p.peek().kind == ",":
        p.next()
        args.append(p.number())
    p.expect(")")
    if p.peek().kind != "end":
        p.fail("trailing input after function spec")
    support = 1.0 if grid.domain == FULL else None
    if name == "pow" and len(args) == 1:
        return power_log(grid, float(args[0]), 0.0, support=support)
    if name == "powlog" and len(args) == 2:
        return power_log(grid, float(args[0]), float(args[1]), support=support)
    if name == "chi" and len(args) == 1:
        return chi(grid, float(args[0]))
    if name == "steps" and len(args) in (1, 2):
        k = int(args[1]) if len(args) == 2 else 12
        return random_steps(grid, int(args[0]) + seed, k)
    raise ParseError(f"unknown function spec {name!r} with {len(args)} argument(s)",
                     name_tok.pos, text)


def _family_fn(seed: int, p0: float, p1: float, n_steps: int = 4):
    def fn(grid):
        return default_family(grid, p0, p1, seed=seed, n_steps=n_steps)
    return fn


def _family_bounds(case) -> tuple:
    th0, th1 = float(case.couple.theta0), float(case.couple.theta1)
    return 1.0 / (1.0 - th0), 1.0 / (1.0 - th1)


def _exit_from(reports) -> int:
    verdicts = {r.verdict for r in reports}
    if "fail" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _print_reports(reports):
    for r in reports:
        ref = f" refined={r.refinement[1]:.3g}" if r.refinement else ""
        print(f"[{r.verdict:12s}] {r.label}: spread={r.spread:.4g} "
              f"(ratio in [{r.ratio_min:.4g}, {r.ratio_max:.4g}]){ref}")


def _emit(reports, out_dir, prefix):
    if out_dir:
        from .report import emit_artifacts
        paths = emit_artifacts(reports, out_dir, prefix)
        print(f"wrote {len(paths)} artifact(s) under {out_dir}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_eval_norm(args) -> int:
    grid = _parse_grid_opt(args.grid, args.domain)
    spec = parse_spec(args.spec)
    fstar = parse_fn(args.fn, grid, args.seed)
    if isinstance(spec, K_BASED):
        value = space_norm(spec, peetre_k(fstar))
    elif isinstance(spec, FSTAR_BASED):
        value = space_norm(spec, fstar)
    elif isinstance(spec, ReiterationCase):
        value = lhs_norm(spec, fstar)
    else:
        print("error: eval-norm takes a space spec, not a bare couple", file=sys.stderr)
        return EXIT_USAGE
    print(repr(value))
    return EXIT_PASS


def _cmd_k_profile(args) -> int:
    grid = _parse_grid_opt(args.grid, args.domain)
    fstar = parse_fn(args.fn, grid, args.seed)
    k = peetre_k(fstar)
    text = k.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _cmd_check_holmstedt(args) -> int:
    if args.case:
        parsed = parse_spec(args.case)
        if not isinstance(parsed, CoupleCase):
            print("error: --case must parse to a couple case", file=sys.stderr)
            return EXIT_USAGE
        instances = [("custom", parsed)]
    else:
        instances = presets.holmstedt_instances(args.kind)
        if args.instance != "both":
            instances = [it for it in instances if it[0] == args.instance]
    reports = []
    for iname, case in instances:
        fam = _family_fn(args.seed, 1.0 / (1.0 - float(case.theta0)),
                         1.0 / (1.0 - float(case.theta1)), n_steps=2)
        reports.append(check_holmstedt(
            case, fam, args.n, args.domain, threshold=args.threshold,
            refine=args.refine, tau_stride=args.tau_stride,
            label=f"holmstedt[{case.kind}:{iname}]"))
    _print_reports(reports)
    _emit(reports, args.out, "holmstedt")
    return _exit_from(reports)


def _cmd_check_reiteration(args) -> int:
    if args.case:
        parsed = parse_spec(args.case)
        if not isinstance(parsed, ReiterationCase):
            print("error: --case must parse to reiterate(...)", file=sys.stderr)
            return EXIT_USAGE
        case, label = parsed, "custom"
    elif args.theorem:
        thm, _, branch = args.theorem.partition(".")
        case = presets.theorem_instance(thm, branch or "a")
        label = args.theorem
    elif args.preset:
        theta = Fraction(args.theta) if args.theta else Fraction(1, 2)
        case = presets.corollary_case(args.preset, theta=theta)
        label = f"{args.preset} theta={theta}"
    else:
        print("error: one of --case/--theorem/--preset is required", file=sys.stderr)
        return EXIT_USAGE
    p0, p1 = _family_bounds(case)
    rep = check_reiteration(case, _family_fn(args.seed, p0, p1), args.n, args.domain,
                            threshold=args.threshold, refine=args.refine, label=label)
    _print_reports([rep])
    if args.out:
        import os
        from .report import emit_artifacts, write_reiteration_csv
        os.makedirs(args.out, exist_ok=True)
        write_reiteration_csv(rep, os.path.join(args.out, "reiteration.csv"),
                              u_count=len(rep.samples))
        emit_artifacts([rep], args.out, "reiteration")
        print(f"wrote artifacts under {args.out}")
    return _exit_from([rep])


def _cmd_suite(args) -> int:
    if args.which == "lemmas":
        cfg = SuiteConfig(n=args.n, refine=args.refine, seed=args.seed,
                          threshold=args.threshold)
        ids = args.ids.split(",") if args.ids else None
        reports = run_lemma_suite(ids, cfg)
        _print_reports(reports)
        _emit(reports, args.out, "lemmas")
        return _exit_from(reports)
    if args.which == "corollaries":
        reports = []
        for preset in ("cor55", "cor57", "cor1", "cor2"):
            for theta in (Fraction(0), Fraction(1, 2), Fraction(1)):
                case = presets.corollary_case(preset, theta=theta)
                p0, p1 = _family_bounds(case)
                reports.append(check_reiteration(
                    case, _family_fn(args.seed, p0, p1), args.n, UNIT,
                    threshold=args.threshold, refine=args.refine,
                    label=f"{preset} theta={theta}"))
        _print_reports(reports)
        _emit(reports, args.out, "corollaries")
        return _exit_from(reports)
    print(f"error: unknown suite {args.which!r}", file=sys.stderr)
    return EXIT_USAGE


def _cmd_report(args) -> int:
    import json
    import os
    from .report import ratio_band_svg, read_jsonl
    from .verify import EquivalenceReport
    rows = read_jsonl(args.infile)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "summary.csv")
    with open(csv_path, "w") as fh:
        fh.write("label,n_samples,ratio_min,ratio_max,spread,verdict\n")
        for r in rows:
            fh.write(f"{r['label']},{r['n_samples']},{r['ratio_min']!r},"
                     f"{r['ratio_max']!r},{r['spread']!r},{r['verdict']}\n")
    for i, r in enumerate(rows):
        rep = EquivalenceReport(
            label=r["label"],
            samples=[(s[0], s[1], s[2], s[3]) for s in r.get("samples", [])],
            ratio_min=r["ratio_min"], ratio_max=r["ratio_max"], spread=r["spread"],
            floor_skipped=r["floor_skipped"], threshold=r["threshold"],
            refinement=tuple(r["refinement"]) if r.get("refinement") else None,
            verdict=r["verdict"], one_sided=r.get("one_sided", False))
        safe = "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in rep.label)[:80]
        ratio_band_svg(rep, os.path.join(args.out, f"plot_{i:03d}_{safe}.svg"))
    print(f"wrote summary and {len(rows)} plot(s) under {args.out}")
    return EXIT_PASS


def _cmd_parse(args) -> int:
    obj = parse_spec(args.spec)
    print(render(obj))
    return EXIT_PASS


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Cli(prog="kinterp",
              description="interpolation-space norms, K-functional formulae "
                          "and bounded-ratio certification")
    ap.add_argument("--domain", choices=(UNIT, FULL), default=UNIT)
    ap.add_argument("--grid", default="", help="grid size: '2048' or 'n=2048,tmin=1e-8'")
    ap.add_argument("--n", type=int, default=2048, help="grid nodes for suites")
    ap.add_argument("--threshold", type=float, default=50.0)
    ap.add_argument("--refine", action="store_true", help="also run at 2n and demand stability")
    ap.add_argument("--seed", type=int, default=20240915)
    ap.add_argument("--out", default="", help="artifact output directory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-norm", help="evaluate one norm")
    p.add_argument("--spec", required=True)
    p.add_argument("--fn", required=True)
    p.set_defaults(func=_cmd_eval_norm)

    p = sub.add_parser("k-profile", help="emit the K-profile of a test function as CSV")
    p.add_argument("--fn", required=True)
    p.set_defaults(func=_cmd_k_profile)

    p = sub.add_parser("check", help="run one certification check")
    csub = p.add_subparsers(dest="what", required=True)
    ph = csub.add_parser("holmstedt")
    ph.add_argument("--kind", choices=("RR", "LL", "RL", "LR"), default="RR")
    ph.add_argument("--instance", choices=("trivial", "log", "both"), default="both")
    ph.add_argument("--case", default="", help="couple case in DSL form")
    ph.add_argument("--tau-stride", type=int, default=2)
    ph.set_defaults(func=_cmd_check_holmstedt)
    pr = csub.add_parser("reiteration")
    pr.add_argument("--theorem", default="", help="e.g. thmRR.a ... thmLR.c")
    pr.add_argument("--preset", default="", choices=("", "cor55", "cor57", "cor1", "cor2"))
    pr.add_argument("--theta", default="", help="0, 1/2 or 1 for presets")
    pr.add_argument("--case", default="", help="reiterate(...) in DSL form")
    pr.set_defaults(func=_cmd_check_reiteration)

    p = sub.add_parser("suite", help="run a registered suite")
    p.add_argument("which", choices=("lemmas", "corollaries"))
    p.add_argument("--ids", default="", help="comma-separated lemma ids")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("report", help="aggregate a JSONL report stream")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("parse", help="parse a spec and print its canonical form")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=_cmd_parse)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        code = args.func(args)
    except ParseError as exc:
        print(exc.pretty(), file=sys.stderr)
        code = EXIT_USAGE
    except KinterpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
