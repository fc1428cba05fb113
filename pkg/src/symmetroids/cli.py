"""Command-line front end: ``symmetroids <command> ...``.

Exit codes: 0 ok, 2 parse error or unreadable input, 3 solve failure,
4 nongeneric pencil, 5 certification unsuccessful, 6 inadmissible target.
Reports carry no timestamps, so the same input and seed give the same bytes.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .certify import certify_pencil, format_certificate, pencil_digest
from .classify import (AmbiguousClassification, CombType, InadmissibleType, NongenericPencil, Tolerances,
                       admissible_types, classify_endpoints, comb_type, pd_witness_search)
from .families import FAMILIES, family_text
from .hillclimb import ClimbOptions, climb
from .pencil import Pencil, PencilParseError, grid_samples, parse_pencil, parse_number
from .tracker import SINGULAR, solve
from .witness import Catalog, WitnessParseError, WitnessRecord, digest, save_witness, verify_catalog, witness_filename

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVE = 3
EXIT_NONGENERIC = 4
EXIT_CERTIFY = 5
EXIT_INADMISSIBLE = 6

log = logging.getLogger("symmetroids")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    """Options shared by all commands.

    ``seed`` defaults to 0 (required with ``strict``).  ``threads`` is recorded
    in reports; the numerical kernels are vectorized and run in one process.
    """

    seed: int = 0
    threads: int = 1
    tols: Tolerances = Tolerances()
    out: Optional[Path] = None
    verbosity: int = 0
    strict: bool = False


def _config(args) -> RunConfig:
    if args.strict and args.seed is None:
        raise CliError("--strict requires an explicit --seed", EXIT_PARSE)
    if args.threads < 1:
        raise CliError("--threads must be at least 1", EXIT_PARSE)
    overrides = {f.name: getattr(args, "tol_" + f.name.replace("_tol", ""))
                 for f in fields(Tolerances) if getattr(args, "tol_" + f.name.replace("_tol", "")) is not None}
    return RunConfig(seed=0 if args.seed is None else args.seed, threads=args.threads,
                     tols=Tolerances(**overrides), out=Path(args.out) if args.out else None,
                     verbosity=args.verbose, strict=args.strict)


def _read_pencil(path) -> Pencil:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_PARSE) from None
    try:
        return parse_pencil(text)
    except PencilParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _emit(cfg: RunConfig, name: str, text: str) -> None:
    """Print ``text``; with ``--out`` also write it to ``out/name``."""
    sys.stdout.write(text)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / name).write_text(text)


def _fmt(x: complex) -> str:
    re, im = (round(v, 10) + 0.0 for v in (complex(x).real, complex(x).imag))  # + 0.0 drops -0
    return f"{re:+.10f}" if im == 0 else f"{re:+.10f}{im:+.10f}j"


# -- commands -----------------------------------------------------------------

def cmd_solve(args, cfg: RunConfig) -> int:
    P = _read_pencil(args.pencil)
    S = solve(P, cfg.seed)
    if not S.ok:
        singular = sum(r.status == SINGULAR for r in S.results)
        if singular:
            raise CliError(f"nongeneric pencil: {singular} paths end at singular solutions", EXIT_NONGENERIC)
        raise CliError(f"solve failure: {S.failures} of 64 paths failed", EXIT_SOLVE)
    try:
        nodes, _ = classify_endpoints(P, S.points, cfg.tols)
    except NongenericPencil as exc:
        raise CliError(str(exc), EXIT_NONGENERIC) from None
    except AmbiguousClassification as exc:
        raise CliError(f"{exc}; run 'certify'", EXIT_SOLVE) from None
    t = comb_type(nodes)
    witness = pd_witness_search(P, seed=cfg.seed)
    lines = [
        f"# symmetroids solve report (version {__version__})",
        f"pencil_sha256: {pencil_digest(P)}",
        f"seed: {cfg.seed}",
        f"threads: {cfg.threads}",
        "paths: 64 ok",
        f"type: {t}",
        "nodes:",
    ]
    order = sorted(range(len(nodes)), key=lambda i: (nodes[i].tag, tuple(np.round(nodes[i].point.real, 8)),
                                                     tuple(np.round(nodes[i].point.imag, 8))))
    for k, i in enumerate(order):
        n = nodes[i]
        lines.append(f"  {k:2d} {n.tag:<17} " + " ".join(_fmt(v) for v in n.point) + f"  imag={n.imag_norm:.3e}")
    if witness is None:
        lines.append("pd_witness: not found")
        if t.sigma:
            lines.append("note: no definite point found; sigma counts semidefinite nodes, which need not lie "
                         "on a spectrahedron boundary")
    else:
        lines.append("pd_witness: " + " ".join(f"{v:+.10f}" for v in witness))
    _emit(cfg, "solve_report.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig) -> int:
    P = _read_pencil(args.pencil)
    cert = certify_pencil(P, cfg.seed)
    text = format_certificate(cert)
    name = Path(args.pencil).stem + ".cert"
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / name).write_text(text)
    if args.print_certificate:
        sys.stdout.write(text)
    if not cert.successful:
        print(f"Unsuccessful: {cert.reason}")
        return EXIT_CERTIFY
    print(f"type: {cert.type}")
    return EXIT_OK


def _random_pencil(seed) -> Pencil:
    rng = np.random.default_rng([seed, 17])
    G = rng.standard_normal((3, 5, 5))
    mats = np.concatenate([np.eye(5)[None], (G + np.swapaxes(G, 1, 2)) / 2])
    return Pencil(mats)


def cmd_climb(args, cfg: RunConfig) -> int:
    target = CombType(*args.target)
    if target not in admissible_types(5):
        raise CliError(f"target {target} is not an admissible type", EXIT_INADMISSIBLE)
    if args.random == (args.start is not None):
        raise CliError("give exactly one of a start pencil file or --random", EXIT_PARSE)
    P = _random_pencil(cfg.seed) if args.random else _read_pencil(args.start)
    opts = ClimbOptions(max_restarts=args.restarts, max_iterations=args.iterations)
    try:
        result = climb(P, target, opts, seed=cfg.seed, transcript=args.transcript)
    except NongenericPencil as exc:
        raise CliError(str(exc), EXIT_NONGENERIC) from None
    if not result.success:
        print(f"Unsuccessful: {result.reason}; closest type reached {result.best_type}")
        return EXIT_CERTIFY
    rec = WitnessRecord.new(result.pencil, target, cfg.seed, digest(format_certificate(result.certification)))
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / witness_filename(target)
    save_witness(path, rec)
    print(f"type: {target}")
    print(f"witness: {path}")
    return EXIT_OK


def cmd_family(args, cfg: RunConfig) -> int:
    try:
        params = [parse_number(p) for p in args.params]
    except PencilParseError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    try:
        text = family_text(args.kind, *params)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    _emit(cfg, f"{args.kind}.pencil", text)
    return EXIT_OK


def cmd_catalog(args, cfg: RunConfig) -> int:
    try:
        cat = Catalog.load(args.directory)
    except (WitnessParseError, PencilParseError) as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    except InadmissibleType as exc:
        raise CliError(str(exc), EXIT_INADMISSIBLE) from None
    if args.action == "list":
        lines = [f"{t.rho} {t.sigma} present" for t in sorted(cat.entries)]
        lines += [f"{t.rho} {t.sigma} missing" for t in cat.missing()]
        lines.sort(key=lambda s: tuple(int(v) for v in s.split()[:2]))
        lines.append(f"{len(cat)} present, {len(cat.missing())} missing")
        _emit(cfg, "catalog.txt", "\n".join(lines) + "\n")
        return EXIT_OK
    report = verify_catalog(cat)
    _emit(cfg, "catalog_verify.txt", "\n".join(report.lines() + [report.summary()]) + "\n")
    return EXIT_CERTIFY if report.failed else EXIT_OK


def cmd_grid(args, cfg: RunConfig) -> int:
    P = _read_pencil(args.pencil)
    rows = grid_samples(P, args.lower, args.upper, args.resolution)
    out = sys.stdout if cfg.out is None else None
    if out is None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        out = open(cfg.out / (Path(args.pencil).stem + "_grid.csv"), "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "x3", "D", "lambda_min"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    g.add_argument("--threads", type=int, default=1, help="thread budget, recorded in reports (default 1)")
    g.add_argument("--out", metavar="DIR", help="also write outputs into DIR")
    g.add_argument("--strict", action="store_true", help="require an explicit --seed")
    g.add_argument("-v", "--verbose", action="count", default=0)
    t = Tolerances()
    g.add_argument("--tol-d", type=float, default=None, help=f"node threshold on relative |d| (default {t.d_tol})")
    g.add_argument("--tol-reality", type=float, default=None,
                   help=f"imaginary-part threshold for real nodes (default {t.reality_tol})")
    g.add_argument("--tol-dedupe", type=float, default=None,
                   help=f"duplicate endpoint distance (default {t.dedupe_tol})")
    g.add_argument("--tol-zero", type=float, default=None,
                   help=f"relative eigenvalue zero threshold (default {t.zero_tol})")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="symmetroids", description="Nodes of quintic spectrahedral symmetroids.",
                                     epilog="exit codes: 0 ok, 2 parse, 3 solve, 4 nongeneric, 5 certification, "
                                            "6 inadmissible target")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="heuristic type, node list and PD-witness status")
    p.add_argument("pencil")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", parents=[common], help="certified type via interval arithmetic")
    p.add_argument("pencil")
    p.add_argument("--print-certificate", action="store_true", help="also print the certificate")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("climb", parents=[common], help="hill-climb toward a target type")
    p.add_argument("start", nargs="?", help="start pencil file")
    p.add_argument("--random", action="store_true", help="start from a random pencil with A0 = I")
    p.add_argument("--target", nargs=2, type=int, required=True, metavar=("RHO", "SIGMA"))
    p.add_argument("--restarts", type=int, default=ClimbOptions.max_restarts)
    p.add_argument("--iterations", type=int, default=ClimbOptions.max_iterations)
    p.add_argument("--transcript", metavar="FILE", help="append a JSON-lines log of the climb")
    p.set_defaults(func=cmd_climb)

    p = sub.add_parser("family", parents=[common], help="print a member of a symmetric family",
                       epilog='put "--" before parameters such as -3/2, e.g. "family prismatic -- 1/2 -3/2"')
    p.add_argument("kind", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="t (tetrahedral), a b (prismatic), none (degenerate)")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("catalog", parents=[common], help="list or re-verify a witness directory")
    p.add_argument("action", choices=("list", "verify"))
    p.add_argument("directory")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("grid", parents=[common], help="CSV samples of D and the smallest eigenvalue")
    p.add_argument("pencil")
    p.add_argument("--lower", nargs=4, type=float, default=[-1.0] * 4, metavar=("T", "X1", "X2", "X3"))
    p.add_argument("--upper", nargs=4, type=float, default=[1.0] * 4, metavar=("T", "X1", "X2", "X3"))
    p.add_argument("--resolution", nargs="+", type=int, default=[5], help="points per axis (1 or 4 values)")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors, 0 for --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    try:
        cfg = _config(args)
        if getattr(args, "resolution", None) is not None and len(args.resolution) not in (1, 4):
            raise CliError("--resolution takes 1 or 4 values", EXIT_PARSE)
        return args.func(args, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
