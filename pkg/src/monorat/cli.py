"""Command-line front end.

    monorat construct --n 3 --rho 0.01 --out f3.json
    monorat verify --input f3.json --n 3
    monorat nodes --n 2 --delta 0.024691358 --out nodes.csv
    monorat table --max-n 5 --rho 0.01 --csv table.csv
    monorat sample --input f3.json --points 1001 --out f3.csv

Exit codes: 0 success/PASS, 1 bad arguments, 2 I/O or malformed input,
3 construction stopped early (partial output written), 4 bound FAIL or
node-system slope too small, 5 input not certified increasing.
Data goes to stdout or files; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import comparison, extremal, ratcore
from .errors import DegenerateInput, GammaUnderflow, MonoratError, SchemaError, SlopeTooSmall
from .io import csv_text, function_to_dict, loads_function, write_csv, write_json
from .miranda import SolverConfig

log = logging.getLogger("monorat")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PARTIAL, EXIT_FAIL, EXIT_NOT_MONOTONE = 0, 1, 2, 3, 4, 5
NODE_COLUMNS = ("i", "u_i", "v_i", "z_i", "residual_i")
SAMPLE_COLUMNS = ("x", "R", "dR", "bernstein_envelope")
TABLE_COLUMNS = ("n", "achieved", "lower", "upper", "ratio_fraction")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _load(path):
    """Parse a function document; returns (function, None) or (None, exit code)."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        return None, EXIT_IO
    try:
        return loads_function(text), None
    except json.JSONDecodeError as e:
        print(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}", file=sys.stderr)
    except (SchemaError, MonoratError, ValueError) as e:
        print(f"{path}: invalid function document: {e}", file=sys.stderr)
    return None, EXIT_IO


def cmd_construct(args):
    try:
        rep = extremal.construct(args.n, args.rho)
        code = EXIT_OK
    except GammaUnderflow as e:
        print(f"construction stopped: {e}", file=sys.stderr)
        rep, code = e.partial, EXIT_PARTIAL
    if args.out:
        try:
            write_json(args.out, function_to_dict(rep.function))
            write_json(_sibling(args.out, ".report.json"), rep.to_dict())
            write_csv(_sibling(args.out, ".stages.csv"), extremal.STAGE_COLUMNS, rep.stage_rows())
        except OSError as e:
            print(f"cannot write output: {e}", file=sys.stderr)
            return EXIT_IO
    print(f"n={rep.n} ratio={rep.ratio!r} target={rep.target!r} "
          f"ratio_fraction={rep.ratio_fraction:.6f}" + (" partial" if rep.partial else ""))
    return code


def _certify(R):
    cert = ratcore.certify_increasing(R, "strict")
    if not cert.ok:
        weak = ratcore.certify_increasing(R, "weak")
        if weak.ok:
            return weak
    return cert


def cmd_verify(args):
    R, code = _load(args.input)
    if R is None:
        return code
    deg = ratcore.declared_degree(R)
    n = args.n if args.n is not None else max(1, (deg + 1) // 2)
    if deg > 2 * n:
        print(f"declared degree {deg} exceeds 2n = {2 * n}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = _certify(R)
    except DegenerateInput as e:
        print(f"not certifiable: {e}", file=sys.stderr)
        return EXIT_NOT_MONOTONE
    out = {"certificate": cert.to_dict(), "declared_degree": deg}
    if not cert.ok:
        out["verdict"] = "NOT_MONOTONE"
        print(json.dumps(out, indent=2))
        return EXIT_NOT_MONOTONE
    verdicts = []
    if cert.odd:
        t1 = comparison.verify_theorem1(R, n, cert)
        out["theorem1"] = t1.to_dict()
        verdicts.append(t1.verdict)
    c1 = comparison.verify_corollary1(R, deg, cert)
    out["corollary1"] = c1.to_dict()
    verdicts.append(c1.verdict)
    out["verdict"] = "PASS" if all(v == "PASS" for v in verdicts) else "FAIL"
    print(json.dumps(out, indent=2))
    return EXIT_OK if out["verdict"] == "PASS" else EXIT_FAIL


def cmd_nodes(args):
    target = comparison.f_delta(args.delta)
    cfg = SolverConfig(tol=args.tol)
    try:
        nodes = comparison.solve_interpolation_nodes(target, args.n, cfg)
    except SlopeTooSmall as e:
        print(str(e), file=sys.stderr)
        return EXIT_FAIL
    except MonoratError as e:
        print(f"node solve failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    text = csv_text(NODE_COLUMNS, nodes.csv_rows())
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as e:
            print(f"cannot write output: {e}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    print(f"residual_inf={nodes.residual_inf!r}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def table_rows(max_n, rho):
    rows = []
    for n in range(1, max_n + 1):
        try:
            rep = extremal.construct(n, rho)
        except GammaUnderflow as e:
            log.warning("row n=%d: %s", n, e)
            rows.append((n, float("nan"), 9.0 ** (n - 1), 0.5 * 9.0 ** n, float("nan")))
            continue
        rows.append((n, rep.ratio, 9.0 ** (n - 1), 0.5 * 9.0 ** n, rep.ratio_fraction))
    return rows


def cmd_table(args):
    rows = table_rows(args.max_n, args.rho)
    sys.stdout.write(csv_text(TABLE_COLUMNS, rows))
    if args.csv:
        try:
            write_csv(args.csv, TABLE_COLUMNS, rows)
        except OSError as e:
            print(f"cannot write output: {e}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def sample_rows(R, points, margin=comparison.COROLLARY_MARGIN):
    xs = np.linspace(-1.0 + margin, 1.0 - margin, points)
    deg = ratcore.declared_degree(R)
    cert = _certify(R)
    norm = ratcore.sup_norm(R, cert if cert.ok else None)
    env = 9.0 ** deg * norm / (1.0 - xs * xs)
    return list(zip(xs.tolist(), ratcore.evaluate(R, xs).tolist(),
                    ratcore.derivative_at(R, xs).tolist(), env.tolist()))


def cmd_sample(args):
    R, code = _load(args.input)
    if R is None:
        return code
    text = csv_text(SAMPLE_COLUMNS, sample_rows(R, args.points))
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as e:
            print(f"cannot write output: {e}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be an integer >= 1")
    return v


def _rho(s):
    v = float(s)
    if not 0.0 < v < 0.5:
        raise argparse.ArgumentTypeError("rho must lie in (0, 0.5)")
    return v


def _points(s):
    v = int(s)
    if v < 2:
        raise argparse.ArgumentTypeError("need at least 2 points")
    return v


def build_parser():
    p = _Parser(prog="monorat", description="Bernstein-type bounds for monotone rational functions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a near-extremal odd increasing function")
    c.add_argument("--n", type=_positive_int, required=True)
    c.add_argument("--rho", type=_rho, default=0.01)
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check the upper bounds on a function document")
    v.add_argument("--input", required=True)
    v.add_argument("--n", type=_positive_int)
    v.set_defaults(func=cmd_verify)

    nd = sub.add_parser("nodes", help="thresholds and interpolation nodes for f_delta")
    nd.add_argument("--n", type=_positive_int, required=True)
    nd.add_argument("--delta", type=float, required=True)
    nd.add_argument("--tol", type=float, default=1e-10)
    nd.add_argument("--out")
    nd.set_defaults(func=cmd_nodes)

    t = sub.add_parser("table", help="achieved ratio against the 9^(n-1) and 9^n/2 bounds")
    t.add_argument("--max-n", type=_positive_int, required=True)
    t.add_argument("--rho", type=_rho, default=0.01)
    t.add_argument("--csv")
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("sample", help="plot data: R, R' and the Bernstein envelope")
    s.add_argument("--input", required=True)
    s.add_argument("--points", type=_points, default=1001)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None):
    level = os.environ.get("MONORAT_LOG", "warn").lower()
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level={"error": logging.ERROR, "warn": logging.WARNING,
                               "info": logging.INFO, "debug": logging.DEBUG}.get(level, logging.WARNING))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
