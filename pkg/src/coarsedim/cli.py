"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration
error, 3 budget exceeded.  Reports are JSON (sorted keys, no timestamps)
and summaries are TSV, so identical configurations give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import demos
from .config import RunConfig
from .constructors import brick_cover_Zn, interval_cover_Z, tree_cover_free
from .covers import load_certificate, recolor, save_certificate, verify_certificate
from .errors import BudgetError, CoarseError, ConfigError, PreconditionError, VerificationError
from .groups import FreeAbelian, FreeGroup, Integers, model_from_json, set_default_caps

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact number: {s!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", help="preset (Z, Z2, Z3, F2, F3, Z_mod_m, Dyadic(K)) or JSON description")
    p.add_argument("--r", type=_frac, help="radius")
    p.add_argument("--scale", "--R", dest="scale", type=_frac, help="scale radius R (K = B(R))")
    p.add_argument("--window", type=_frac, help="window radius")
    p.add_argument("--colors", type=int, help="number of colors")
    p.add_argument("--out", help="output file (construct) or directory (demo)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    p.add_argument("--budget-balls", type=int, help="ball enumeration cap")
    p.add_argument("--budget-search", type=int, help="norm search node budget")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coarsedim", description="Coarse structures and asymptotic-dimension certificates")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    b = sub.add_parser("ball", help="enumerate a ball and print its size and largest norm")
    _common(b)
    v = sub.add_parser("verify", help="verify a certificate JSON file")
    v.add_argument("certificate")
    _common(v)
    d = sub.add_parser("demo", help="run a demo pipeline")
    d.add_argument("demo", choices=sorted(demos.DEMOS))
    _common(d)
    c = sub.add_parser("construct", help="build a certificate")
    c.add_argument("kind", choices=["interval", "brick", "tree"])
    c.add_argument("--rank", "--n", dest="rank", type=int, help="rank n of Z^n or k of F_k")
    c.add_argument("--L", dest="side", type=int, help="brick side length")
    _common(c)
    return p


def _config(ns) -> RunConfig:
    return RunConfig(ns.command, ns.group, ns.r, ns.scale, ns.window, ns.colors, ns.out, ns.seed,
                     ns.budget_balls, ns.budget_search).validate()


def _int(v: Fraction | None, default: int, name: str) -> int:
    if v is None:
        return default
    if v.denominator != 1:
        raise ConfigError(f"--{name} must be an integer here")
    return int(v)


def _tsv(rows: list[list]) -> str:
    return "".join("\t".join(str(c) for c in row) + "\n" for row in rows)


def _dump(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_ball(cfg: RunConfig) -> int:
    model = model_from_json(cfg.group or "Z")
    r = cfg.r if cfg.r is not None else Fraction(1)
    win = model.ball(r, cap=cfg.budget_balls)
    sys.stdout.write(_tsv([["group", "r", "size", "max_norm"], [model.name, r, len(win), win.max_norm]]))
    return EXIT_PASS


def cmd_verify(cfg: RunConfig, path: str) -> int:
    model = model_from_json(cfg.group) if cfg.group else None
    try:
        cert = load_certificate(path, model=model, ball_cap=cfg.budget_balls)
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    rep = verify_certificate(cert)
    rep.details["seed"] = cfg.seed
    sys.stdout.write("\n".join(rep.summary_lines()) + "\n")
    for c in rep.children:
        for w in c.witnesses[:5]:
            sys.stdout.write(f"witness\t{c.name}\t{json.dumps(w, sort_keys=True)}\n")
    if cfg.out:
        _dump(rep.to_dict(), cfg.out)
    return EXIT_PASS if rep else EXIT_FAIL


def _run_demo(cfg: RunConfig, name: str) -> demos.DemoResult:
    R = None if cfg.scale is None else _int(cfg.scale, 0, "scale")
    if name == "z":
        return demos.demo_z(scales=(R,) if R else (2, 8, 32))
    if name == "zn":
        ranks = (1, 2, 3)
        if cfg.group:
            m = model_from_json(cfg.group)
            if not isinstance(m, FreeAbelian):
                raise ConfigError("demo zn needs a free abelian group")
            ranks = (m.rank,)
        return demos.demo_zn(ranks=ranks, R=R or 2)
    if name == "free":
        k = 2
        if cfg.group:
            m = model_from_json(cfg.group)
            if not isinstance(m, FreeGroup):
                raise ConfigError("demo free needs a free group")
            k = m.rank
        return demos.demo_free(k=k, scales=(R or 2,), ball_cap=cfg.budget_balls, seed=cfg.seed)
    if name == "dyadic":
        kmax = 6
        if cfg.group:
            kmax = getattr(model_from_json(cfg.group), "kmax", None)
            if kmax is None:
                raise ConfigError("demo dyadic needs a Dyadic(K) group")
        return demos.demo_dyadic(kmax=kmax, window_r=_int(cfg.window, 12, "window"))
    if name == "extension":
        return demos.demo_extension(scale_r=R or 3, window_r=_int(cfg.window, 60, "window"))
    if name == "zerodim":
        bound = cfg.r if cfg.r is not None else 5
        window = cfg.window if cfg.window is not None else 20
        if cfg.group:
            m = model_from_json(cfg.group)
            K = list(m.ball(cfg.scale if cfg.scale is not None else 1).elements)
            return demos.demo_zerodim(m, K, bound, window)
        return demos.demo_zerodim(bound_r=bound, window_r=window)
    if name == "restrict":
        return demos.demo_restrict(R=R or 2)
    if name == "translate":
        return demos.demo_translate_2z(R=R or 3)
    if name == "conversions":
        return demos.demo_chain()
    raise ConfigError(f"unknown demo {name!r}")


def cmd_demo(cfg: RunConfig, name: str) -> int:
    try:
        res = _run_demo(cfg, name)
    except (PreconditionError, VerificationError) as exc:
        sys.stdout.write(f"FAIL\t{name}\t{type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    rows = [["demo", "stage", "pass", "colors", "window_r", "uniform_bound", "details"]]
    for st in res.stages:
        d = dict(st.details)
        colors = d.pop("colors", "")
        wr = d.pop("window_r", "")
        ub = d.pop("uniform_bound", "")
        rows.append([name, st.name, "PASS" if st.report else "FAIL", colors, wr, ub,
                     json.dumps({k: _plain(v) for k, v in sorted(d.items())}, sort_keys=True)])
    table = _tsv(rows)
    sys.stdout.write(table)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        bundle = {"demo": name, "config": cfg.to_dict(), "pass": res.passed,
                  "stages": [{"name": s.name, "report": s.report.to_dict(),
                              "details": {k: _plain(v) for k, v in sorted(s.details.items())}}
                             for s in res.stages]}
        _dump(bundle, os.path.join(cfg.out, f"{name}_report.json"))
        with open(os.path.join(cfg.out, f"{name}_summary.tsv"), "w") as fh:
            fh.write(table)
        for st in res.stages:
            if st.certificate is not None:
                stem = re.sub(r"[^A-Za-z0-9_.-]+", "_", f"{name}_{st.name}").strip("_")
                save_certificate(st.certificate, os.path.join(cfg.out, f"{stem}.json"))
    if not res.passed:
        failed = [s.name for s in res.stages if not s.report]
        sys.stdout.write(f"FAIL\t{name}\tstages: {','.join(failed)}\n")
        return EXIT_FAIL
    return EXIT_PASS


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def cmd_construct(cfg: RunConfig, kind: str, rank: int | None, side: int | None) -> int:
    R = _int(cfg.scale, 2, "scale")
    if kind == "interval":
        cert = interval_cover_Z(R, _int(cfg.window, 20 * R, "window"))
    elif kind == "brick":
        n = rank
        if n is None and cfg.group:
            m = model_from_json(cfg.group)
            n = m.rank if isinstance(m, FreeAbelian) else (1 if isinstance(m, Integers) else None)
        if n is None:
            n = 2
        cert = brick_cover_Zn(n, R, L=side, window_r=None if cfg.window is None else _int(cfg.window, 0, "window"))
    else:
        k = rank or 2
        cert = tree_cover_free(k, R, _int(cfg.window, 6 * R, "window"), ball_cap=cfg.budget_balls)
    if cfg.colors is not None and cfg.colors != cert.colors:
        cert = recolor(cert, lambda c: c % cfg.colors, colors=cfg.colors)
        cert.report = verify_certificate(cert)
    sys.stdout.write("\n".join(cert.report.summary_lines()) + "\n")
    if cfg.out:
        save_certificate(cert, cfg.out)
    return EXIT_PASS if cert.report else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config(ns)
        set_default_caps(ball=cfg.budget_balls, search=cfg.budget_search)
        if ns.command == "ball":
            return cmd_ball(cfg)
        if ns.command == "verify":
            return cmd_verify(cfg, ns.certificate)
        if ns.command == "demo":
            return cmd_demo(cfg, ns.demo)
        if ns.command == "construct":
            return cmd_construct(cfg, ns.kind, ns.rank, ns.side)
    except BudgetError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (ConfigError, ValueError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CoarseError as exc:
        sys.stderr.write(f"failed: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
