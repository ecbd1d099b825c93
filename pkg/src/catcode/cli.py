"""Command-line interface: ``catcode {presets,gen,encode,decode,metrics,simulate}``.

Exit codes: 0 success, 2 parameter error, 3 data error, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import codes, inference, metrics, presets
from .errors import CapExceeded, CodingError, OutOfRange, ShapeMismatch

EXIT_PARAM = 2
EXIT_DATA = 3
EXIT_CAP = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_codebook(path: str, anti: bool = False) -> codes.Codebook:
    try:
        cb = codes.load(path)
    except FileNotFoundError:
        raise CliError(f"codebook not found: {path}", EXIT_DATA)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"malformed codebook {path}: {exc}", EXIT_DATA)
    return codes.with_anti(cb, True) if anti else cb


def _read_ids(path: str, n_classes: int) -> list[int]:
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError:
        raise CliError(f"input not found: {path}", EXIT_DATA)
    ids = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            x = int(line.strip())
        except ValueError:
            raise CliError(f"line {lineno}: not a decimal ID: {line.strip()!r}", EXIT_DATA)
        if not 0 <= x < n_classes:
            raise CliError(f"line {lineno}: ID {x} outside [0, {n_classes})", EXIT_DATA)
        ids.append(x)
    return ids


# --------------------------------------------------------------------------
# commands


def cmd_presets(args) -> int:
    for name, (desc, _) in presets.PRESETS.items():
        print(f"{name}\t{desc}")
    return 0


def _build_from_args(args) -> codes.Codebook:
    if args.preset:
        return presets.build_preset(args.preset, args.n)
    if not args.scheme or args.n is None:
        raise CliError("gen needs --preset or both --scheme and --n", EXIT_PARAM)
    s, n = args.scheme, args.n
    if s == "polynomial":
        return codes.build_polynomial_cc(n, k=args.k, p=args.p, r=args.r, eval_points=args.points, epsilon=args.epsilon)
    if s == "remainder":
        return codes.build_remainder_cc(n, k=args.k, moduli=args.moduli and _int_list(args.moduli), r=args.r, epsilon=args.epsilon)
    if s == "gauss":
        return codes.build_gauss_cc(n, k=args.k, moduli=args.moduli and _str_list(args.moduli), r=args.r, epsilon=args.epsilon)
    if s == "coo":
        if args.bits is None:
            raise CliError("coo needs --bits", EXIT_PARAM)
        order = None
        if args.frequency_file:
            order = _read_ids(args.frequency_file, n)
        return codes.build_coo(n, args.bits, order)
    if s == "rmp":
        if args.m is None or args.bits is None:
            raise CliError("rmp needs --m and --bits", EXIT_PARAM)
        return codes.build_rmp(n, args.m, args.bits, seed=args.seed)
    if s == "ecoc":
        if args.bits is None:
            raise CliError("ecoc needs --bits", EXIT_PARAM)
        return codes.build_ecoc(n, args.bits, seed=args.seed if args.random_ecoc else None)
    raise CliError(f"unknown scheme {s}", EXIT_PARAM)  # pragma: no cover


def cmd_gen(args) -> int:
    cb = _build_from_args(args)
    if args.anti:
        cb = codes.with_anti(cb)
    _write(args.output, codes.dumps(cb))
    try:
        bound = codes.theoretical_min_collision(cb.n_classes, cb.site_sizes)
    except CodingError:
        bound = None
    summary = (
        f"scheme={cb.scheme} n_classes={cb.n_classes} site_sizes={','.join(map(str, cb.site_sizes))} "
        f"theoretical_min_collision={bound if bound is not None else 'unreachable'} total_bits={cb.total_bits}\n"
    )
    # keep stdout clean when the codebook itself goes there
    (sys.stderr if args.output in (None, "-") else sys.stdout).write(summary)
    return 0


def cmd_encode(args) -> int:
    cb = _load_codebook(args.codebook, args.anti)
    ids = _read_ids(args.input, cb.n_classes)
    rows = []
    if args.mode == "sites":
        table = codes.encode_many(cb, ids) if ids else np.zeros((0, cb.r), dtype=np.int64)
        for x, row in zip(ids, table.tolist()):
            rows.append(",".join(map(str, [x, *row])))
    else:
        for lo in range(0, len(ids), 4096):
            chunk = ids[lo : lo + 4096]
            bits = codes.rhot_matrix(cb, chunk)
            for x, row in zip(chunk, bits):
                rows.append(f"{x},{''.join('1' if b else '0' for b in row)}")
    _write(args.output, "".join(r + "\n" for r in rows))
    return 0


def cmd_decode(args) -> int:
    cb = _load_codebook(args.codebook)
    try:
        outs = inference.load_outputs(args.input)
    except FileNotFoundError:
        raise CliError(f"input not found: {args.input}", EXIT_DATA)
    except (json.JSONDecodeError, KeyError, TypeError, ShapeMismatch) as exc:
        raise CliError(f"malformed ensemble output: {exc}", EXIT_DATA)
    labels = []
    for i, out in enumerate(outs):
        try:
            labels.append(inference.decode(cb, out, floor=args.floor))
        except ShapeMismatch as exc:
            raise CliError(f"output {i}: {exc}", EXIT_DATA)
    _write(args.output, "".join(f"{y}\n" for y in labels))
    return 0


def cmd_metrics(args) -> int:
    cb = _load_codebook(args.codebook, args.anti)
    mode = "sampled" if args.sampled else "exhaustive"
    want_collision = args.collision or args.verify_minimal or not (args.mi or args.amkl or args.hamming)
    try:
        report = metrics.metrics_report(
            cb,
            collision=mode if want_collision else None,
            samples=args.samples,
            mi_pairs=[tuple(p) for p in (args.mi or [])],
            amkl=args.amkl,
            hamming=args.hamming,
            seed=args.seed,
            cap=args.cap,
        )
    except CapExceeded as exc:
        raise CliError(f"{exc}; rerun with --sampled or a larger --cap", EXIT_CAP)
    _write(args.output, json.dumps(report, indent=1) + "\n")
    if args.verify_minimal:
        col = report["collision"]
        if col["mode"] != "exhaustive" or col["max_collisions"] != col["theoretical_bound"]:
            print(
                f"not certified minimal: C(f)={col['max_collisions']} bound={col['theoretical_bound']} mode={col['mode']}",
                file=sys.stderr,
            )
            return 1
    return 0


def cmd_simulate(args) -> int:
    noise = inference.NoiseModel(args.noise, eta=args.eta, alpha=args.alpha, seed=args.seed)
    rows = []
    for path in args.codebook:
        cb = _load_codebook(path)
        rep = inference.run_trials(cb, noise, args.trials, args.seed)
        rows.append({"codebook": path, "scheme": cb.scheme, "r": cb.r, **rep.to_dict()})
    doc = rows[0] if len(rows) == 1 else {
        "noise": {"kind": noise.kind, "eta": noise.eta, "alpha": noise.alpha},
        "rows": rows,
    }
    _write(args.output, json.dumps(doc, indent=1) + "\n")
    return 0


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="catcode", description="Category coding for huge categorical ID spaces.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("presets", help="list named codebooks")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("gen", help="build a codebook and write it as JSON")
    p.add_argument("--preset", choices=presets.preset_names())
    p.add_argument("--scheme", choices=codes.SCHEMES)
    p.add_argument("--n", type=int, help="number of classes N")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int, help="prime for the polynomial scheme")
    p.add_argument("--r", type=int, default=2, help="site count when moduli/points are auto-selected")
    p.add_argument("--points", type=_int_list, help="polynomial evaluation points")
    p.add_argument("--moduli", help="comma-separated moduli (integers or a+bi)")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--bits", type=int, help="coo total bits, rmp kept bits, or ecoc bit count")
    p.add_argument("--m", type=int, help="Reed-Muller parameter m of RM(m,1)")
    p.add_argument("--frequency-file", help="coo: IDs, most frequent first, one per line")
    p.add_argument("--random-ecoc", action="store_true", help="seeded random ECOC assignment")
    p.add_argument("--anti", action="store_true", help="complement the r-hot output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="codebook path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="encode decimal IDs to CSV")
    p.add_argument("--codebook", required=True)
    p.add_argument("--input", required=True, help="one decimal ID per line")
    p.add_argument("--mode", choices=("sites", "rhot"), default="sites")
    p.add_argument("--anti", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode ensemble outputs to labels")
    p.add_argument("--codebook", required=True)
    p.add_argument("--input", required=True, help='JSON {"dists": [...]} or a list of them')
    p.add_argument("--floor", type=float, default=inference.PROB_FLOOR)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("metrics", help="collision number, MI, AMKL, Hamming")
    p.add_argument("--codebook", required=True)
    p.add_argument("--collision", action="store_true")
    p.add_argument("--sampled", action="store_true", help="sampled (lower-bound) collision scan")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--mi", nargs=2, type=int, action="append", metavar=("I", "J"))
    p.add_argument("--amkl", action="store_true")
    p.add_argument("--hamming", type=int, metavar="PAIRS")
    p.add_argument("--verify-minimal", action="store_true")
    p.add_argument("--anti", action="store_true")
    p.add_argument("--cap", type=int, default=metrics.COLLISION_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="Monte Carlo accuracy of the soft decoder")
    p.add_argument("--codebook", required=True, action="append")
    p.add_argument("--noise", choices=("symmetric", "dirichlet", "delta"), default="symmetric")
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return exc.code if isinstance(exc.code, int) else EXIT_PARAM
    try:
        return args.func(args)
    except CliError as exc:
        print(f"catcode: {exc}", file=sys.stderr)
        return exc.code
    except CapExceeded as exc:
        print(f"catcode: {exc}", file=sys.stderr)
        return EXIT_CAP
    except OutOfRange as exc:
        print(f"catcode: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (CodingError, KeyError) as exc:
        print(f"catcode: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
