"""Command-line front end: ``bfan analyze|verify|generate|sharpness|approx``.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

from . import families, verify
from .config import max_n
from .cube import (
    and_,
    degree,
    dictator,
    fwht,
    majority,
    mean,
    or_,
    parity,
    weight_at_least,
)
from .errors import BadParameters, BfanError, ParseError, UnknownSuite
from .influence import influence_report, max_influence, total_influence
from .tt_io import format_tt1, read_function, write_function

SCHEMA = "bfan/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(BfanError):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _envelope(args, command: str, body: dict) -> dict:
    doc = {"schema": SCHEMA, "command": command}
    if args.timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    doc.update(body)
    return doc


def _emit(args, text: str) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _text_lines(doc, prefix="") -> list[str]:
    lines = []
    if isinstance(doc, dict) and set(doc) >= {"num", "exp", "float"}:
        return [f"{prefix}: {doc['num']}/2^{doc['exp']} ({doc['float']})"]
    if isinstance(doc, dict):
        for k, v in doc.items():
            lines.extend(_text_lines(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(doc, list) and doc and all(isinstance(v, (dict, list)) for v in doc):
        for idx, v in enumerate(doc):
            lines.extend(_text_lines(v, f"{prefix}[{idx}]"))
    else:
        lines.append(f"{prefix}: {json.dumps(doc)}")
    return lines


def _render(args, doc: dict) -> str:
    if args.format == "text":
        return "\n".join(_text_lines(doc)) + "\n"
    return _dump(doc)


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    if not args.input:
        raise UsageError("analyze needs --input")
    f = read_function(args.input)
    d = args.d if args.d is not None else 1
    if not 1 <= d <= f.n:
        raise UsageError(f"--d must lie in [1, {f.n}]")
    t = fwht(f)
    maxima = []
    reports = []
    for r in range(1, d + 1):
        where, value = max_influence(t, r)
        maxima.append({"d": r, "value": value.to_json(), "set": where.indices()})
        reports.append(influence_report(f, where, t).to_json())
    body = {
        "n": f.n,
        "spectrum": {
            "nonzero_coefficients": t.nonzero_masks().size,
            "degree": degree(t),
            "mean": mean(f).to_json(),
            "level_weights": [w.to_json() for w in t.level_weights()],
        },
        "weight_at_least": [{"d": r, "value": weight_at_least(t, r).to_json()} for r in range(1, d + 1)],
        "total_influence": total_influence(t).to_json(),
        "max_influence": maxima,
        "influence_reports": reports,
    }
    _emit(args, _render(args, _envelope(args, "analyze", body)))
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    suite = args.suite
    if suite != "all" and suite not in verify.SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(verify.SUITES + ('all',))}")
    names = verify.SUITES if suite == "all" else (suite,)
    results = []
    lines = []
    for name in names:
        res = verify.run_suite(name, args.n_max, args.seed)
        lines.append(verify.summary_line(name, res))
        results.extend(res)
    if suite == "all":
        lines.append(verify.summary_line("all", results))
    ok = all(r.passed for r in results)
    body = {
        "suite": suite,
        "n_max": args.n_max,
        "seed": args.seed,
        "summary": lines,
        "passed": ok,
        "results": [r.to_json() for r in results],
    }
    if args.out:
        _emit(args, _dump(_envelope(args, "verify", body)))
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- generate


def _indices(text):
    if not text:
        return None
    return [int(v) for v in text.replace(",", " ").split()]


def cmd_generate(args) -> int:
    fam = args.family
    n = args.n
    if n is None:
        raise UsageError("generate needs --n")
    spec = None
    if fam == "dictator":
        f = dictator(n, args.index or 1)
    elif fam == "parity":
        f = parity(n, _indices(args.indices))
    elif fam == "majority":
        f = majority(n)
    elif fam == "and":
        f = and_(n)
    elif fam == "or":
        f = or_(n)
    elif fam == "tribes":
        if args.w is None:
            raise UsageError("tribes needs --w")
        spec = families.tribes_spec(n, args.w)
        f = spec.function
    elif fam == "hypertribe":
        d = args.d if args.d is not None else 2
        spec, _ = families.hypertribe(n, d, seed=args.seed, k_override=args.k, lexicographic=args.lexicographic)
        f = spec.function
    else:
        raise BadParameters(f"unknown family {fam!r}")
    binary = args.format == "ttb"
    info = {"schema": SCHEMA, "family": fam, "n": n}
    if spec is not None:
        info["packing"] = spec.to_json()
        info["coverage"] = families.coverage_stats(spec.packing).to_json()
        info["packing_valid"] = families.packing_is_valid(spec.packing)
    if args.out and args.out != "-":
        if f is not None:
            write_function(f, args.out, binary=binary)
            info["truth_table"] = args.out
        else:
            info["truth_table"] = None
        if spec is not None:
            path = args.packing_out or args.out + ".packing.json"
            with open(path, "w") as fh:
                fh.write(spec.packing.dumps())
            info["packing_file"] = path
        if "packing" in info:
            del info["packing"]
        sys.stdout.write(_dump(info))
    else:
        if f is None:
            raise UsageError(f"n={n} exceeds the truth-table cap {max_n()}; pass --out to write the packing")
        if binary:
            raise UsageError("binary output needs --out")
        sys.stdout.write(format_tt1(f))
        if spec is not None:
            sys.stderr.write(_dump(info["coverage"]))
    return EXIT_OK


# ---------------------------------------------------------------- sharpness

SHARPNESS_COLUMNS = [
    "n", "d", "k", "t", "mode", "coverage_ratio", "reaches_half", "p_plus", "p_plus_stderr",
    "p_minus", "p_minus_stderr", "max_joint_influence", "max_joint_influence_stderr",
    "weight_at_least_d", "weight_at_least_d_stderr", "scale", "ratio", "ratio_stderr", "harris_floor",
]


def _value(v):
    if isinstance(v, dict):
        return v.get("float", v.get("value"))
    return v


def _stderr(v):
    return v.get("stderr", 0.0) if isinstance(v, dict) else 0.0


def sharpness_row(rep: dict) -> dict:
    return {
        "n": rep["n"], "d": rep["d"], "k": rep["k"], "t": rep["t"], "mode": rep["mode"],
        "coverage_ratio": rep["coverage"]["coverage_ratio"],
        "reaches_half": rep["coverage"]["reaches_half"],
        "p_plus": _value(rep["p_plus"]), "p_plus_stderr": _stderr(rep["p_plus"]),
        "p_minus": _value(rep["p_minus"]), "p_minus_stderr": _stderr(rep["p_minus"]),
        "max_joint_influence": _value(rep["max_joint_influence"]),
        "max_joint_influence_stderr": _stderr(rep["max_joint_influence"]),
        "weight_at_least_d": _value(rep["weight_at_least_d"]),
        "weight_at_least_d_stderr": _stderr(rep["weight_at_least_d"]),
        "scale": rep["scale"],
        "ratio": "undefined" if rep["ratio"] is None else rep["ratio"],
        "ratio_stderr": "" if rep["ratio_stderr"] is None else rep["ratio_stderr"],
        "harris_floor": rep["harris_floor"],
    }


def cmd_sharpness(args) -> int:
    ns = _indices(args.n_list)
    if not ns:
        raise UsageError("sharpness needs a non-empty --n-list")
    if any(n < 4 for n in ns):
        raise UsageError("every n in --n-list must be at least 4")
    d = args.d if args.d is not None else 2
    buf = io.StringIO()
    w = csv.DictWriter(buf, SHARPNESS_COLUMNS, lineterminator="\n")
    w.writeheader()
    for n in ns:
        spec, _ = families.hypertribe(n, d, seed=args.seed)
        rep = verify.sharpness_report(spec, d, args.sample_budget, args.samples, args.seed, threads=args.threads)
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in sharpness_row(rep).items()})
    _emit(args, buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- approx


def cmd_approx(args) -> int:
    if not args.input:
        raise UsageError("approx needs --input")
    f = read_function(args.input)
    d = args.d if args.d is not None else 1
    approx = verify.nearest_low_degree(f, d, lattice=args.lattice)
    body = {"n": f.n, "d": d, "approximation": approx.to_json()}
    if f.n >= max(d + 1, 2):
        rep = verify.fkn_report(f, d, lattice=args.lattice)
        body["alpha_star"] = rep["alpha_star"]
        body["ratios"] = rep["ratios"]
    else:
        body["alpha_star"] = None
        body["ratios"] = None
        body["note"] = "ratios need n >= max(d + 1, 2)"
    _emit(args, _render(args, _envelope(args, "approx", body)))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="truth-table file (TT1 text or TTB binary)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", default="json", choices=["json", "csv", "text", "tt1", "ttb"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--n-max", type=int, default=4)
    common.add_argument("--d", type=int)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--timestamp", action="store_true", help="add a timestamp field to JSON reports")

    parser = argparse.ArgumentParser(prog="bfan", description="Harmonic analysis of Boolean functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="spectrum and influence summary of a truth table")

    p = sub.add_parser("verify", parents=[common], help="run a theorem battery")
    p.add_argument("suite", help="one of " + ", ".join(verify.SUITES + ("all",)))

    p = sub.add_parser("generate", parents=[common], help="write a named function")
    p.add_argument("family")
    p.add_argument("--n", type=int)
    p.add_argument("--w", type=int, help="tribe width")
    p.add_argument("--k", type=int, help="override the hypertribe block size")
    p.add_argument("--index", type=int, help="dictator coordinate (1-based)")
    p.add_argument("--indices", help="parity coordinates, comma separated")
    p.add_argument("--lexicographic", action="store_true", help="deterministic lexicographic packing")
    p.add_argument("--packing-out", help="packing JSON path (default: <out>.packing.json)")

    p = sub.add_parser("sharpness", parents=[common], help="hypertribe sharpness trend as CSV")
    p.add_argument("--n-list", default="", help="comma separated dimensions")
    p.add_argument("--sample-budget", type=int, default=200, help="number of d-sets sampled for large n")

    p = sub.add_parser("approx", parents=[common], help="nearest low-degree Boolean function")
    p.add_argument("--lattice", action="store_true", help="allow the lattice search for 4 < n <= 10")
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "generate": cmd_generate,
    "sharpness": cmd_sharpness,
    "approx": cmd_approx,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1 or args.samples < 2 or args.n_max < 1:
        print("bfan: error: --threads >= 1, --samples >= 2 and --n-max >= 1 are required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (ParseError, OSError) as exc:
        print(f"bfan: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BfanError as exc:
        print(f"bfan: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
