"""Command-line front end.

Subcommands: curve-info, ap, modsym, theta, plseries, frobenius, recover,
verify.  Curves are identified only by their coefficients (no database
lookups); every command is deterministic given its flags, and --threads (or
PRPOINT_THREADS) never changes numeric output.

Exit codes: 0 success, 64 usage error, 2 NotASquare, 3 ReconstructionFailed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from ._kernels import backend_name, default_threads
from .archlfun import anlist, gross_zagier_constant, l_derivative, l_value, real_period
from .elliptic import CurveData, ap as ap_fn, parse_curve, point, reduction_type
from .crystalline import eigen_data, kedlaya_frobenius
from .modsym import build_space, eigen_plus_symbol, hecke_matrix
from .padiclfun import mazur_tate, padic_l_series
from .recover import NotASquare, ReconstructionFailed, recover


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Config:
    curve: CurveData
    gen: object
    p: int
    depth: int
    prec: int
    terms: int
    tol: float
    json_mode: bool
    threads: int
    seed: int

    def validate(self, need_p=False, need_depth=False):
        if need_p and self.p is not None and self.p < 5:
            raise UsageError("p must be >= 5")
        if need_depth and self.depth is not None and self.depth < 1:
            raise UsageError("depth must be >= 1")
        if (self.prec is not None and self.depth is not None
                and self.prec < self.depth + 4):
            raise UsageError("precision must be >= depth + 4")
        return self


def _build_parser():
    parser = _Parser(prog="prpoint", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, gen=False):
        sp.add_argument("--curve", help='inline "a1,a2,a3,a4,a6;N" or JSON')
        sp.add_argument("--curve-file", help="path to a curve file (same formats)")
        sp.add_argument("--p", type=int)
        sp.add_argument("--depth", type=int)
        sp.add_argument("--prec", type=int)
        sp.add_argument("--terms", type=int, default=2000)
        sp.add_argument("--gen", help='generator "x,y" (rationals)')
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0,
                        help="recorded for reproducibility; no CLI path is randomized")

    for name in ("curve-info", "ap", "modsym", "theta", "plseries",
                 "frobenius", "recover", "verify"):
        sp = sub.add_parser(name)
        common(sp)
        if name == "modsym":
            sp.add_argument("--ell", type=int, default=None,
                            help="also print the Hecke matrix T_ell")
        if name == "plseries":
            sp.add_argument("--root", choices=("alpha", "beta"), default="alpha")
    return parser


def _config(args) -> Config:
    src = args.curve
    if args.curve_file:
        with open(args.curve_file) as fh:
            src = fh.read()
    if not src:
        raise UsageError("a curve is required (--curve or --curve-file)")
    curve, gen = parse_curve(src)
    if args.gen:
        gx, _, gy = args.gen.partition(",")
        gen = point(curve, Fraction(gx), Fraction(gy))
    threads = args.threads if args.threads is not None else default_threads()
    return Config(curve, gen, args.p, args.depth, args.prec, args.terms,
                  args.tol, args.json, max(1, threads), args.seed)


def _emit(cfg, obj, human_lines):
    if cfg.json_mode:
        print(json.dumps(obj, indent=2, default=str))
    else:
        for line in human_lines:
            print(line)


def cmd_curve_info(cfg: Config) -> int:
    E = cfg.curve
    an = anlist(E, cfg.terms)
    om, comps = real_period(E)
    out = {"curve": E.label(), "discriminant": E.discriminant,
           "c4": E.c4, "c6": E.c6,
           "real_period": float(om), "real_components": comps}
    lines = [f"curve          {E.label()}",
             f"discriminant   {E.discriminant}",
             f"real period    {float(om):.12f}  ({comps} component(s))"]
    L1, tail = l_value(E, an, w=+1)
    out["l_value_even_sign"] = float(L1)
    out["l_value_tail_bound"] = float(tail)
    lines.append(f"L(E,1) [w=+1]  {float(L1):.12f}  (tail < {float(tail):.2e})")
    if cfg.gen is not None:
        lp, lb = l_derivative(E, an, tol=cfg.tol * 1e-2)
        C = gross_zagier_constant(E, cfg.gen, terms=cfg.terms, tol=cfg.tol)
        out["l_derivative"] = float(lp)
        out["l_derivative_bound"] = float(lb)
        out["gross_zagier"] = C.to_json()
        lines += [f"L'(E,1)        {float(lp):.12f}  (tail < {float(lb):.2e})",
                  f"height(gen)    {C.height:.12f}",
                  f"C(E)           {C.value}  (residual {C.float_residual:.2e}"
                  + (", SUSPECT MULTIPLE" if C.suspect_multiple else "") + ")"]
    _emit(cfg, out, lines)
    return 0


def cmd_ap(cfg: Config) -> int:
    cfg.validate(need_p=True)
    a = ap_fn(cfg.curve, cfg.p)
    _emit(cfg, {"curve": cfg.curve.label(), "p": cfg.p, "ap": a,
                "reduction": reduction_type(cfg.curve, cfg.p)},
          [str(a)])
    return 0


def cmd_modsym(cfg: Config, ell=None) -> int:
    E = cfg.curve
    space = build_space(E.conductor)
    phi = eigen_plus_symbol(E, space)
    out = {"level": space.N, "p1_size": len(space.p1),
           "dimension": space.dimension,
           "basis_reps": [space.p1.reps[i] for i in space.basis],
           "phi_values": [str(v) for v in phi.gen_values],
           "denominator": phi.denominator,
           "normalization": phi.normalization}
    lines = [f"level {space.N}: #P1 = {len(space.p1)}, dimension {space.dimension}",
             f"normalization: {phi.normalization}",
             "phi on generators: "
             + ", ".join(f"({c}:{d})={v}" for (c, d), v
                         in zip(space.p1.reps, phi.gen_values))]
    if ell:
        T = hecke_matrix(space, ell)
        out[f"hecke_T{ell}"] = [[str(T[i, j]) for j in range(T.cols)]
                                for i in range(T.rows)]
        lines.append(f"T_{ell} = " + str(out[f"hecke_T{ell}"]))
    _emit(cfg, out, lines)
    return 0


def cmd_theta(cfg: Config) -> int:
    cfg.validate(need_p=True)
    if cfg.depth is None or cfg.depth < 0:
        raise UsageError("--depth >= 0 required")
    if cfg.p ** (cfg.depth + 1) > 10 ** 6:
        raise UsageError("theta dump limited to p^(depth+1) <= 10^6")
    phi = eigen_plus_symbol(cfg.curve)
    theta = mazur_tate(phi, cfg.p, cfg.depth)
    out = {"p": cfg.p, "depth": cfg.depth,
           "coefficients": {str(a): str(c) for a, c in sorted(theta.coeffs.items())}}
    lines = [f"theta_{cfg.depth} at p={cfg.p} ({len(theta.coeffs)} units)"]
    lines += [f"  [{a}] {c}" for a, c in sorted(theta.coeffs.items())[:50]]
    if len(theta.coeffs) > 50:
        lines.append(f"  ... ({len(theta.coeffs) - 50} more; use --json)")
    _emit(cfg, out, lines)
    return 0


def cmd_plseries(cfg: Config, root: str) -> int:
    cfg.validate(need_p=True, need_depth=True)
    if cfg.depth is None:
        raise UsageError("--depth required")
    phi = eigen_plus_symbol(cfg.curve)
    series = padic_l_series(phi, cfg.p, cfg.depth, root, prec=cfg.prec,
                            threads=cfg.threads)
    out = series.to_json()
    lines = [f"L_p series, root {root}, depth {cfg.depth}, p = {cfg.p}"]
    for k, c in enumerate(series.coeffs):
        g = series.guarantees[k]
        lines.append(f"  T^{k}: {c!r}" + ("" if g is None else f"  [measure {g} pi-units]"))
    _emit(cfg, out, lines)
    return 0


def cmd_frobenius(cfg: Config) -> int:
    cfg.validate(need_p=True)
    m = cfg.prec if cfg.prec is not None else 8
    F = kedlaya_frobenius(cfg.curve, cfg.p, m)
    a = ap_fn(cfg.curve, cfg.p)
    out = F.to_json()
    out["ap"] = a
    out["trace_check"] = (F.trace() - a).is_zero()
    out["det_check"] = (F.det() - cfg.p).is_zero()
    lines = [f"Frobenius at p={cfg.p}, precision {m} (short model "
             f"A={F.A}, B={F.B}, u={F.u})"]
    for i in (0, 1):
        lines.append("  [" + ", ".join(repr(F.entry(i, j)) for j in (0, 1)) + "]")
    lines.append(f"trace = a_p ({a}): {out['trace_check']}; det = p: {out['det_check']}")
    if cfg.gen is not None and a == 0:
        C = gross_zagier_constant(cfg.curve, cfg.gen, terms=cfg.terms, tol=cfg.tol)
        ed = eigen_data(F, C)
        out["eigen_data"] = ed.to_json()
        lines.append(f"delta_E = {ed.delta_E!r}")
    _emit(cfg, out, lines)
    return 0


def cmd_recover(cfg: Config, verify_mode=False) -> int:
    cfg.validate(need_p=True, need_depth=True)
    if cfg.gen is None:
        raise UsageError("--gen (or a JSON curve with a generator) is required")
    if cfg.depth is None:
        raise UsageError("--depth required")
    try:
        result = recover(cfg.curve, cfg.gen, cfg.p, cfg.depth, prec=cfg.prec,
                         threads=cfg.threads)
    except NotASquare as exc:
        print(f"NotASquare: {exc}", file=sys.stderr)
        return 2
    except ReconstructionFailed as exc:
        print(f"ReconstructionFailed: {exc}", file=sys.stderr)
        return 3
    r = result.report
    lines = [
        f"curve {r.curve}, p = {r.p}, depth {r.depth} "
        f"(kernel backend: {backend_name()}, threads {cfg.threads})",
        f"C(E) = {result.C_E.value} (residual {result.C_E.float_residual:.2e})",
        f"delta_E = {result.delta_E!r}",
        f"A = {r.A!r}   (sign used: {r.flags['sign_used']})",
        f"log_E(gen) = {r.log_gen!r}",
        f"lambda = +-({r.lam})",
        f"exact check valuation >= {r.lam_residual_valuation} pi-units",
        f"identity constant kappa = {result.verdict.constant} "
        f"[{result.verdict.status}]",
    ]
    _emit(cfg, result.to_json(), lines)
    if verify_mode:
        from .recover import exp_coordinate_check
        ok = result.verdict.status in ("PASS", "PASS-EXACT")
        coord = exp_coordinate_check(cfg.curve, cfg.gen, result.report)
        print(f"exp-coordinate cross-check: {'ok' if coord else 'FAILED'}")
        print("VERIFY: " + result.verdict.status)
        return 0 if (ok and coord) else 1
    return 0


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        cmd = args.command
        if cmd == "curve-info":
            return cmd_curve_info(cfg)
        if cmd == "ap":
            return cmd_ap(cfg)
        if cmd == "modsym":
            return cmd_modsym(cfg, ell=args.ell)
        if cmd == "theta":
            return cmd_theta(cfg)
        if cmd == "plseries":
            return cmd_plseries(cfg, root=args.root)
        if cmd == "frobenius":
            return cmd_frobenius(cfg)
        if cmd == "recover":
            return cmd_recover(cfg)
        if cmd == "verify":
            return cmd_recover(cfg, verify_mode=True)
        raise UsageError(f"unknown command {cmd}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
