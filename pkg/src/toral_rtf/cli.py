"""Command line driver: ``rtf verify-lemmas | geometric | spectral | rtf | equidist``.

Exit codes: 0 pass, 1 numeric failure, 2 usage error, 3 data error.  Every
report starts with '#' header lines carrying the tool version and the fully
resolved configuration, followed by CSV.  Numbers are printed with 17
significant digits so that identical inputs give identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__, equidist, suites
from .field import QuadraticCharacter, eta_local
from .geometric import GeometricConfig, TruncationError, geometric_side
from .hecke import TestFunction
from .spectral import (
    CoverageError,
    DataError,
    MissingData,
    load_spectral_data,
    spectral_side,
)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def parse_S(text: str | None) -> dict[int, int]:
    """'p:m,p:m' -> {p: m}."""
    out: dict[int, int] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            p, m = part.split(":")
            p, m = int(p), int(m)
        except ValueError:
            raise UsageError(f"bad S entry {part!r}; expected p:m") from None
        if p in out:
            raise UsageError(f"prime {p} listed twice in S")
        out[p] = m
    return out


class Report:
    """Header lines plus CSV sections, written in a fixed order."""

    def __init__(self, command: str, config: dict):
        self.lines = [f"# tool toral_rtf {__version__}", f"# command {command}"]
        for key in sorted(config):
            self.lines.append(f"# config {key}={fmt(config[key])}")

    def note(self, text: str):
        self.lines.append(f"# {text}")

    def table(self, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        self.lines.extend(buf.getvalue().rstrip("\n").split("\n"))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _emit(report: Report, out_path: str | None):
    text = report.text()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- verify-lemmas ---------------------------------------------------------------

def cmd_verify_lemmas(args) -> int:
    selected = suites.select(args.filter)
    if not selected:
        raise UsageError(f"no suite matches {args.filter!r}")
    rep = Report("verify-lemmas", {"filter": args.filter or "", "tol": "default" if args.tol is None else args.tol})
    results = [suites.run_suite(s, args.tol) for s in selected]
    rows = []
    for res in results:
        for r in res.rows:
            rows.append((r.suite, r.case, r.closed_form, r.oracle, r.abs_err))
    if args.csv:
        buf = Report("verify-lemmas", {})
        buf.lines = []
        buf.table(["lemma", "case", "closed_form", "oracle", "abs_err"], rows)
        Path(args.csv).write_text(buf.text(), encoding="utf-8")
    summary = [(res.suite.name, "PASS" if res.passed else "FAIL", len(res.rows), res.failures,
                res.tol, res.max_err) for res in results]
    rep.table(["suite", "status", "cases", "failures", "tol", "max_abs_err"], summary)
    if not args.csv:
        rep.table(["lemma", "case", "closed_form", "oracle", "abs_err"], rows)
    _emit(rep, args.out)
    return EXIT_OK if all(res.passed for res in results) else EXIT_NUMERIC


# -- geometric / spectral / rtf --------------------------------------------------

def _config(args) -> GeometricConfig:
    S = parse_S(args.S)
    try:
        return GeometricConfig(args.weight, args.level, args.eta, S=S, eps_trunc=args.tol,
                               bound=args.bound, threads=args.threads)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _alpha(S: dict) -> TestFunction:
    return TestFunction.basis(S) if S else TestFunction.unit()


def _config_dict(args, cfg: GeometricConfig) -> dict:
    out = {"weight": cfg.weight, "level": cfg.level.n, "eta": cfg.eta.D,
           "S": ",".join(f"{p}:{m}" for p, m in sorted(cfg.S.items())),
           "tol": cfg.eps_trunc, "bound": "auto" if cfg.bound is None else cfg.bound,
           "test_function": "prod alpha^(m_p) over S" if cfg.S else "unit"}
    if getattr(args, "data", None):
        out["data"] = args.data
    return out


def _geometric_rows(g) -> list:
    return [("hyperbolic", g.hyperbolic), ("unipotent", g.unipotent), ("total", g.total),
            ("truncation_certificate", g.truncation_error), ("bound", g.bound),
            ("lattice_points", g.n_terms), ("nonzero_terms", g.n_nonzero)]


def cmd_geometric(args) -> int:
    cfg = _config(args)
    g = geometric_side(cfg, _alpha(cfg.S), keep_terms=args.per_b)
    rep = Report("geometric", _config_dict(args, cfg))
    rep.note("all values computed")
    rep.table(["quantity", "value"], _geometric_rows(g))
    if args.per_b:
        rep.table(["b", "term"], [(b, v) for b, v in g.per_b if v != 0])
    _emit(rep, args.out)
    return EXIT_OK


def _load(path):
    try:
        return load_spectral_data(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _spectral(args, cfg):
    data = _load(args.data)
    return spectral_side(data, cfg.weight, cfg.level, cfg.eta, _alpha(cfg.S), allow_partial=args.allow_partial)


def _spectral_rows(sp) -> list:
    return [(label, v) for label, v in sp.terms] + [("total", sp.value)]


def cmd_spectral(args) -> int:
    cfg = _config(args)
    sp = _spectral(args, cfg)
    rep = Report("spectral", _config_dict(args, cfg))
    if not sp.complete:
        rep.note("UNSOUND: data not asserted complete for this weight and level")
    for line in sp.provenance:
        rep.note(f"ingested {line}")
    rep.table(["form", "contribution"], _spectral_rows(sp))
    _emit(rep, args.out)
    return EXIT_OK


def cmd_rtf(args) -> int:
    cfg = _config(args)
    sp = _spectral(args, cfg)
    g = geometric_side(cfg, _alpha(cfg.S))
    lhs, rhs = sp.value, g.total
    residual = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel = residual / scale if scale else 0.0
    conf = _config_dict(args, cfg)
    conf["check"] = "none" if args.check is None else args.check
    rep = Report("rtf", conf)
    if not sp.complete:
        rep.note("UNSOUND: data not asserted complete for this weight and level")
    for line in sp.provenance:
        rep.note(f"ingested {line}")
    rep.note("computed: geometric side, spectral constants and weights")
    within = residual <= g.truncation_error
    rows = [("lhs_spectral", lhs), ("rhs_geometric", rhs), ("residual", residual),
            ("relative_residual", rel), ("residual_within_certificate", within)]
    rows += [(f"spectral:{k}", v) for k, v in sp.terms]
    rows += [(f"geometric:{k}", v) for k, v in _geometric_rows(g)]
    rep.table(["quantity", "value"], rows)
    _emit(rep, args.out)
    # when both sides vanish the relative residual is meaningless; a residual
    # inside the truncation certificate is then the right criterion
    if args.check is not None and not (rel <= args.check or within):
        return EXIT_NUMERIC
    return EXIT_OK


# -- equidist --------------------------------------------------------------------

def _svg(spec: equidist.MeasureSpec, bins, title: str, width=640, height=400) -> str:
    pad = 40
    xs = [-2 + 4 * i / 400 for i in range(401)]
    ys = [equidist.mu_density(spec, x) for x in xs]
    heights = [(lo, hi, w / (hi - lo)) for lo, hi, w, _ in bins]
    top = max(ys + [h for _, _, h in heights] + [1e-12]) * 1.05

    def px(x):
        return pad + (x + 2) / 4 * (width - 2 * pad)

    def py(y):
        return height - pad - y / top * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<title>{escape(title)}</title>',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    for lo, hi, h in heights:
        if h > 0:
            out.append(f'<rect x="{px(lo):.3f}" y="{py(h):.3f}" width="{px(hi) - px(lo):.3f}" '
                       f'height="{py(0) - py(h):.3f}" fill="#9ecae1" stroke="#3182bd"/>')
    pts = " ".join(f"{px(x):.3f},{py(y):.3f}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#d62728" stroke-width="1.5"/>')
    out.append(f'<line x1="{px(-2):.3f}" y1="{py(0):.3f}" x2="{px(2):.3f}" y2="{py(0):.3f}" stroke="black"/>')
    for t in (-2, -1, 0, 1, 2):
        out.append(f'<text x="{px(t):.3f}" y="{height - pad + 16}" font-size="12" '
                   f'text-anchor="middle">{t}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="20" font-size="14" text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_equidist(args) -> int:
    sign = {"+": 1, "-": -1, "+1": 1, "-1": -1}.get(args.eta_sign)
    if sign is None:
        raise UsageError("--eta-sign takes + or -")
    try:
        spec = equidist.MeasureSpec(args.q, sign)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    conf = {"q": args.q, "eta_sign": sign, "bins": args.bins}
    if args.data:
        if args.weight is None or args.level is None or args.eta is None:
            raise UsageError("--data needs --weight, --level and --eta")
        try:
            eta = QuadraticCharacter(args.eta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if eta_local(eta, args.q) != sign:
            raise UsageError(f"eta({args.q}) = {eta_local(eta, args.q)} contradicts --eta-sign")
        conf.update({"data": args.data, "weight": args.weight, "level": args.level, "eta": args.eta})
        data = _load(args.data)
        try:
            res = equidist.weighted_empirical(data, args.weight, args.level, eta, args.q,
                                              args.bins, args.allow_partial)
        except DataError:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        bins, title = res.bins, f"weighted x_{args.q} vs mu (q={args.q}, eta={sign:+d})"
    else:
        res = None
        bins, title = equidist.model_histogram(spec, args.bins), f"mu (q={args.q}, eta={sign:+d})"
    rep = Report("equidist", conf)
    if res is not None:
        if not res.complete:
            rep.note("UNSOUND: data not asserted complete for this weight and level")
        rep.note(f"discrepancy {fmt(res.discrepancy)}")
    rep.note(f"model mass {fmt(math.fsum(b[3] for b in bins))}")
    rep.table(["bin_lo", "bin_hi", "weight", "model_mass"], bins)
    _emit(rep, args.out)
    if args.svg:
        Path(args.svg).write_text(_svg(spec, bins, title), encoding="utf-8")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------

def _common_side(p, data: bool):
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--eta", type=int, required=True, help="fundamental discriminant, 1 for trivial")
    p.add_argument("--S", default="", help="test function degrees p:m,p:m")
    p.add_argument("--tol", type=float, default=1e-10, help="truncation error target")
    p.add_argument("--bound", type=float, default=None, help="explicit |b| cutoff")
    p.add_argument("--out", default=None)
    if data:
        p.add_argument("--data", required=True)
        p.add_argument("--allow-partial", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rtf", description="Relative trace formula toolkit")
    ap.add_argument("--version", action="version", version=f"toral_rtf {__version__}")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (default: RTF_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-lemmas", help="closed forms against numerical oracles")
    p.add_argument("--filter", default=None, help="comma separated substrings of suite names")
    p.add_argument("--tol", type=float, default=None, help="override every suite tolerance")
    p.add_argument("--csv", default=None, help="write the per-case rows here")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("geometric", help="hyperbolic and unipotent terms")
    _common_side(p, data=False)
    p.add_argument("--per-b", action="store_true", help="list the nonzero terms of the b-sum")
    p.set_defaults(func=cmd_geometric)

    p = sub.add_parser("spectral", help="sum over eigenforms")
    _common_side(p, data=True)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("rtf", help="compare both sides")
    _common_side(p, data=True)
    p.add_argument("--check", type=float, default=None, help="fail if the relative residual exceeds this")
    p.set_defaults(func=cmd_rtf)

    p = sub.add_parser("equidist", help="limit measure and weighted histograms")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--eta-sign", required=True)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--data", default=None)
    p.add_argument("--weight", type=int, default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--eta", type=int, default=None)
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--svg", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_equidist)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None:
        os.environ["RTF_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rtf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, MissingData, CoverageError) as exc:
        print(f"rtf: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TruncationError as exc:
        print(f"rtf: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"rtf: i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
