"""Command-line front end: ``qchar check|synthesize|verify|falsify|corpus``.

Exit codes: 0 when the expected verdict is reached, 1 when it is not (or the
polynomial is in the wrong class for the command), 2 on parse/usage errors.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from . import io
from .config import load_config
from .construct import build_density, default_grid
from .errors import (
    AdmissiblePolynomialError,
    ArityError,
    ConstantTermError,
    InadmissiblePolynomialError,
    PolySyntaxError,
)
from .basedensity import scale
from .poly import check_q_identical, check_q_independence, format_poly, parse_poly
from .verify import run_corpus, run_falsification, run_sufficiency, select_epsilon

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _infer_arity(text: str, mode: str | None) -> int:
    if mode == "identical":
        return 1
    indices = [int(m) for m in re.findall(r"t(\d+)", text)]
    return max([2] + indices)


def _parse(args):
    arity = args.arity or _infer_arity(args.poly, getattr(args, "mode", None))
    return parse_poly(args.poly, arity)


def _config(args):
    return load_config(
        args.config,
        epsilon=getattr(args, "epsilon", None),
        power=args.power,
        shift=args.shift,
        grid_span=args.grid_span,
        grid_count=args.grid_count,
        truncation=args.truncation,
        seed=args.seed,
    )


def _emit(text: str, out_dir: str | None, name: str):
    sys.stdout.write(text)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        io.write_text(Path(out_dir) / name, text)


def _admissibility_payload(q, report):
    payload = report.to_dict()
    payload.update(poly=format_poly(q), arity=q.arity, mode=report.mode)
    return payload


def cmd_check(args) -> int:
    q = _parse(args)
    mode = args.mode or ("identical" if q.arity == 1 else "independence")
    report = check_q_identical(q) if mode == "identical" else check_q_independence(q)
    sys.stdout.write(io.dumps(_admissibility_payload(q, report)))
    return EXIT_OK if report.verdict else EXIT_FAIL


def cmd_synthesize(args) -> int:
    q = _parse(args)
    cfg = _config(args)
    eps, _, c3 = select_epsilon(q, cfg)
    p = scale(cfg.base(), eps)
    grid = default_grid(p, q.arity, cfg.grid_count, cfg.grid_span, cfg.grid_tail)
    try:
        r, cert = build_density(q, p, grid, N=cfg.truncation, tol=cfg.tol, c3=c3)
    except InadmissiblePolynomialError as exc:
        sys.stdout.write(io.dumps(_admissibility_payload(q, exc.report)))
        return EXIT_FAIL
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_density_csv(out / "r.csv", r)
    payload = cert.to_dict()
    payload.update(poly=format_poly(q), config=cfg.to_dict())
    text = io.dumps(payload)
    io.write_text(out / "certificate.json", text)
    sys.stdout.write(text)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    q = _parse(args)
    try:
        report = run_sufficiency(q, _config(args))
    except InadmissiblePolynomialError as exc:
        sys.stdout.write(io.dumps(_admissibility_payload(q, exc.report)))
        return EXIT_FAIL
    _emit(io.dumps(report.to_dict()), args.out_dir, "verdict.json")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_falsify(args) -> int:
    q = _parse(args)
    try:
        report = run_falsification(q, _config(args))
    except AdmissiblePolynomialError as exc:
        sys.stderr.write(f"qchar: {exc}\n")
        return EXIT_FAIL
    _emit(io.dumps(report.to_dict()), args.out_dir, "falsification.json")
    return EXIT_OK if report.detected else EXIT_FAIL


def cmd_corpus(args) -> int:
    cfg = _config(args)
    seed = args.seed if args.seed is not None else 7
    rows = run_corpus(args.n, seed, cfg, run_pipelines=not args.checker_only)
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        with open(Path(args.out_dir) / "corpus.csv", "w", newline="", encoding="utf-8") as fh:
            io.write_corpus_csv(fh, rows)
    io.write_corpus_csv(sys.stdout, rows)
    errors = sum(r.routing_error for r in rows)
    sys.stderr.write(f"{len(rows)} polynomials, {errors} routing errors\n")
    return EXIT_OK if errors == 0 else EXIT_FAIL


def _common(p: argparse.ArgumentParser, poly: bool = True):
    if poly:
        p.add_argument("poly", help="polynomial text, e.g. 't1*t2' or 'i*t1^2*t2'")
        p.add_argument("--arity", type=int, help="number of variables (default: inferred)")
    p.add_argument("--config", help="JSON config file (fallback: $QCHAR_CONFIG)")
    p.add_argument("--power", type=int, help="even Fejér exponent of the base density")
    p.add_argument("--shift", type=float, help="offset of the second mixture component")
    p.add_argument("--grid-span", type=float, help="half-width L of the grid [-L, L]")
    p.add_argument("--grid-count", "--grid", type=int, help="grid points per axis")
    p.add_argument("--truncation", type=int, help="series truncation order N")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out-dir", help="directory for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qchar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="admissibility of a polynomial")
    p.add_argument("poly")
    p.add_argument("--arity", type=int)
    p.add_argument("--mode", choices=["independence", "identical"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize", help="series density r.csv and certificate.json")
    _common(p)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_synthesize, out_dir=".")

    p = sub.add_parser("verify", help="full sufficiency pipeline")
    _common(p)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("falsify", help="falsification run for an inadmissible polynomial")
    _common(p)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("corpus", help="random admissibility dichotomy corpus (CSV)")
    _common(p, poly=False)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--checker-only", action="store_true",
                   help="compare admissibility verdicts without running pipelines")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (PolySyntaxError, ConstantTermError, ArityError) as exc:
        sys.stderr.write(f"qchar: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
