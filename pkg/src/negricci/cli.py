"""Command-line front end.

Subcommands: catalog, ricci, decide, construct, certify, sweep,
necessity-test.  Rational parameters are parsed exactly ("p/q", integers,
or finite decimals); output is JSON or CSV and is deterministic for a
fixed (flags, seed).

Exit codes: 0 ok (including a correct "no" decision or refusal with
reason), 2 refusal, 3 certificate failure, 4 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import algebra
from .catalog import (
    CatalogError,
    ln_diagonal_derivation,
    make_Ln,
    make_Qn,
    qn_diagonal_derivation,
    rank_one_torus,
    torus,
    FiliformSpec,
)
from .criterion import CriterionError, critical_l, decide_Ln, decide_Qn, iota_Qn, trace_T
from .constructor import (
    ConeInfeasibleError,
    ConstructionRefused,
    DegenerationExhausted,
    FeasibilitySolveError,
    certify,
    construct,
    construct_Ln,
    rebuild_metric,
)
from .linalg import as_fraction
from .ricci import ExtensionMetric, MetricError, random_flag_gram, ricci_blocks, necessity_trace_bound

EXIT_OK = 0
EXIT_REFUSED = 2
EXIT_CERT_FAIL = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_rational(text: str) -> Fraction:
    """Exact rational from "p/q", an integer literal, or a finite decimal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational: {text!r}") from exc


def parse_range(text: str) -> list[Fraction]:
    """Inclusive grid "lo..hi/step" of exact rationals, or a single value."""
    if ".." not in text:
        return [parse_rational(text)]
    span, _, step_s = text.partition("/")
    if not step_s:
        raise UsageError(f"range needs a step: {text!r}")
    lo_s, _, hi_s = span.partition("..")
    lo, hi, step = parse_rational(lo_s), parse_rational(hi_s), parse_rational(step_s)
    if step <= 0 or hi < lo:
        raise UsageError(f"bad range: {text!r}")
    out, v = [], lo
    while v <= hi:
        out.append(v)
        v += step
    return out


def _write_out(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    base = os.environ.get("NEGRICCI_OUT")
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _load_lower(path: str | None):
    if path is None:
        return None
    with open(path) as fh:
        data = json.load(fh)
    return [[as_fraction(v) for v in row] for row in data]


def _family(args) -> str:
    fam = args.family
    if fam not in ("Ln", "Qn"):
        raise UsageError(f"unknown family {fam!r} (expected Ln or Qn)")
    return fam


def cmd_catalog(args) -> int:
    fam = _family(args)
    spec = FiliformSpec("L" if fam == "Ln" else "Q", args.n)
    alg = spec.build()
    out = algebra.to_json_dict(alg)
    phi1, phi2 = torus(spec)
    out["torus"] = [[str(v) for v in phi1.diagonal()],
                    [str(v) for v in phi2.diagonal()]]
    if args.r is not None:
        r = parse_rational(args.r)
        mat = rank_one_torus(args.n, r)
        out["rank_one_torus"] = [str(mat[i][i]) for i in range(args.n)]
    _write_out(json.dumps(out, indent=2), args.out)
    return EXIT_OK


def _extension(args) -> ExtensionMetric:
    fam = _family(args)
    a, d = parse_rational(args.a), parse_rational(args.d)
    if fam == "Qn":
        nil = make_Qn(args.n)
        der = qn_diagonal_derivation(args.n, a, d)
    else:
        nil = make_Ln(args.n)
        der = ln_diagonal_derivation(args.n, a, d)
    lower = _load_lower(args.lower)
    if lower is not None:
        from .constructor import _total_derivation
        der = _total_derivation(nil, der, lower)
    gram = np.eye(args.n)
    if args.gram is not None:
        with open(args.gram) as fh:
            gram = np.asarray(json.load(fh), dtype=float)
    return ExtensionMetric(nil, der, gram)


def cmd_ricci(args) -> int:
    report = ricci_blocks(_extension(args))
    _write_out(report.to_json(), args.out)
    return EXIT_OK


def cmd_decide(args) -> int:
    fam = _family(args)
    a, d = parse_rational(args.a), parse_rational(args.d)
    decision = decide_Qn(args.n, a, d) if fam == "Qn" else decide_Ln(args.n, a, d)
    _write_out(json.dumps(decision.to_json_dict(), indent=2), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    fam = _family(args)
    a, d = parse_rational(args.a), parse_rational(args.d)
    try:
        if fam == "Qn":
            built = construct(args.n, a, d, lower=_load_lower(args.lower))
        else:
            built = construct_Ln(args.n, a, d)
    except ConstructionRefused as exc:
        payload = {"refused": True, "decision": exc.decision.to_json_dict()}
        _write_out(json.dumps(payload, indent=2), args.out)
        return EXIT_REFUSED
    except (ConeInfeasibleError, FeasibilitySolveError, DegenerationExhausted) as exc:
        sys.stderr.write(f"certificate failure: {exc}\n")
        return EXIT_CERT_FAIL
    # re-validate in-process before claiming success
    check = certify(rebuild_metric(built.to_json_dict()))
    if not check.negative_definite:
        sys.stderr.write("certificate failure: re-validation rejected the metric\n")
        return EXIT_CERT_FAIL
    _write_out(built.to_json(), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    with open(args.metric) as fh:
        data = json.load(fh)
    report = certify(rebuild_metric(data))
    _write_out(report.to_json(), args.out)
    return EXIT_OK if report.negative_definite else EXIT_CERT_FAIL


def _sweep_cell(task):
    n, a, d = task
    m = n // 2
    dec = decide_Qn(n, a, d)
    l, _, _ = critical_l(n)
    row = [str(a), str(d), str(trace_T(n, a, d))]
    row += [str(iota_Qn(n, a, d, k)) for k in range(m + 1, n + 1)]
    row += [str(l), "yes" if dec.answer else "no", str(dec.sign_flipped).lower()]
    return row


def cmd_sweep(args) -> int:
    if _family(args) != "Qn":
        raise UsageError("sweep supports --family Qn")
    n = args.n
    m = n // 2
    cells = [(n, a, d) for a in parse_range(args.a) for d in parse_range(args.d)
             if (a, d) != (0, 0)]
    cells.sort(key=lambda t: (t[1], t[2]))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(c) for c in cells]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["a", "d", "T"] + [f"iota_{k}" for k in range(m + 1, n + 1)]
    header += ["l", "answer", "sign_flipped"]
    writer.writerow(header)
    writer.writerows(rows)
    _write_out(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_necessity_test(args) -> int:
    n = args.n
    a, d = parse_rational(args.a), parse_rational(args.d)
    t = trace_T(n, a, d)
    if t == 0:
        raise UsageError("necessity-test requires a non-unimodular extension (T != 0)")
    if t < 0:
        a, d = -a, -d
    nil = make_Qn(n)
    der = qn_diagonal_derivation(n, a, d)
    l, _, _ = critical_l(n)
    rng = np.random.default_rng(args.seed)
    hits = 0
    bound_ok = 0
    for _ in range(args.samples):
        gram = random_flag_gram(n, rng)
        ext = ExtensionMetric(nil, der, gram)
        report = ricci_blocks(ext)
        if report.negative_definite:
            hits += 1
        lhs, rhs = necessity_trace_bound(ext, l)
        if lhs >= rhs - 1e-9 * max(1.0, abs(rhs)):
            bound_ok += 1
    out = {
        "n": n, "a": str(a), "d": str(d), "k": l,
        "samples": args.samples, "seed": args.seed,
        "negative_definite_hits": hits,
        "trace_bound_satisfied": bound_ok,
    }
    _write_out(json.dumps(out, indent=2), args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="negricci", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, params=True):
        if family:
            p.add_argument("--family", required=True, choices=["Ln", "Qn"])
        p.add_argument("--n", type=int, required=True)
        if params:
            p.add_argument("--a", required=True)
            p.add_argument("--d", required=True)
        p.add_argument("--out", default=None)

    p = sub.add_parser("catalog", help="emit a catalog algebra with its torus")
    common(p, params=False)
    p.add_argument("--r", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("ricci", help="Ricci block report of a diagonal extension")
    common(p)
    p.add_argument("--lower", default=None)
    p.add_argument("--gram", default=None)
    p.set_defaults(func=cmd_ricci)

    p = sub.add_parser("decide", help="existence decision for a negative-Ricci metric")
    common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("construct", help="construct and certify a metric")
    common(p)
    p.add_argument("--lower", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("certify", help="re-verify a stored metric")
    p.add_argument("--metric", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", help="decision sweep over a rational grid (CSV)")
    p.add_argument("--family", required=True, choices=["Ln", "Qn"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True, help='range "lo..hi/step" or a value')
    p.add_argument("--d", required=True, help='range "lo..hi/step" or a value')
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("necessity-test",
                       help="randomized no-metric evidence at a refused point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_necessity_test)
    return parser


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join "--flag -5/2" into "--flag=-5/2" so argparse does not mistake
    negative rationals and ranges for option names."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_USAGE
    except (CatalogError, CriterionError, MetricError, ValueError) as exc:
        sys.stderr.write(f"invalid parameters: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
