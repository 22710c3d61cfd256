"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 when ``test``
finds a failing statistical test.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import __version__, analysis, cipher, pgm, prng, stats
from .maps import DEFAULT_BURN_IN, DegenerateOrbitError, MapKind, MapSpec, estimate_threshold

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_TEST_FAILED = 3


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _key_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--key", help="key file")
    group.add_argument("--preset", choices=sorted(prng.PRESETS), help="built-in parameter set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threshcrypt",
        description="Chaotic threshold-function bit generator, image cipher and evaluation tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("keygen", help="write a key file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=sorted(prng.PRESETS))
    group.add_argument("--random", choices=[m.value for m in prng.Method], metavar="METHOD",
                       help="draw a random key for METHOD (segmentation | self_similarity)")
    p.add_argument("--seed", type=int, help="seed for --random")
    p.add_argument("--split-rule", choices=[r.value for r in prng.SplitRule],
                   help="self-similar cut placement (default: relative)")
    p.add_argument("--out", help="destination (default: stdout)")

    p = sub.add_parser("genbits", help="generate a keystream")
    _key_source(p)
    p.add_argument("--bits", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["raw", "ascii"], default="raw")

    p = sub.add_parser("test", help="run the randomness tests on a bitstream")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=["auto", "raw", "ascii"], default="auto")
    p.add_argument("--alpha", type=float, default=stats.ALPHA)
    p.add_argument("--json", action="store_true", help="one JSON record per line")

    p = sub.add_parser("export", help="convert a raw bitstream to the external suite's ASCII form")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)

    for name in ("encrypt", "decrypt"):
        p = sub.add_parser(name, help=f"{name} a PGM image")
        p.add_argument("--key", required=True)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="security metrics for a plain/cipher pair")
    p.add_argument("--plain", required=True)
    p.add_argument("--cipher", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--pairs", type=_positive_int, default=2000)
    p.add_argument("--csv-dir", help="also write histogram.csv and scatter.csv here")

    p = sub.add_parser("threshold", help="estimate a map's threshold by orbit averaging")
    p.add_argument("--map", choices=[k.value for k in MapKind], required=True)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.3)
    p.add_argument("--samples", type=_positive_int, default=10**6)
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _read_key(path: str) -> prng.KeySet:
    with open(path, encoding="ascii") as fh:
        return prng.load_key(fh)


def _resolve_key(args) -> prng.KeySet:
    if getattr(args, "preset", None):
        return prng.load_preset(args.preset)
    return _read_key(args.key)


def _keygen(args) -> int:
    if args.preset:
        key = prng.load_preset(args.preset)
    else:
        key = prng.random_key(prng.Method(args.random), args.seed)
    if args.split_rule:
        key = replace(key, split_rule=prng.SplitRule(args.split_rule))
    text = prng.dumps_key(key)
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _genbits(args) -> int:
    bits = prng.generate_keystream(_resolve_key(args), args.bits)
    with open(args.out, "wb") as fh:
        prng.write_bitstream(bits, fh, args.format)
    return EXIT_OK


def _test(args) -> int:
    with open(args.input, "rb") as fh:
        bits = prng.read_bitstream(fh, args.format)
    report = stats.run_suite(bits, args.alpha)
    sys.stdout.write(report.to_jsonl() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_TEST_FAILED


def _export(args) -> int:
    with open(args.input, "rb") as fh:
        bits = prng.read_bitstream(fh, "raw")
    with open(args.out, "w", encoding="ascii", newline="") as fh:
        stats.export_ascii(bits, fh)
    return EXIT_OK


def _crypt(args) -> int:
    key = _read_key(args.key)
    img = pgm.read_pgm(args.input)
    fn = cipher.encrypt if args.command == "encrypt" else cipher.decrypt
    pgm.write_pgm(fn(img, key), args.out)
    return EXIT_OK


def _analyze(args) -> int:
    key = _read_key(args.key)
    report = analysis.analyze(pgm.read_pgm(args.plain), pgm.read_pgm(args.cipher), key,
                              seed=args.seed, n_pairs=args.pairs)
    sys.stdout.write(report.to_text())
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        with open(os.path.join(args.csv_dir, "histogram.csv"), "w") as fh:
            fh.write(report.histogram_csv())
        with open(os.path.join(args.csv_dir, "scatter.csv"), "w") as fh:
            fh.write(report.scatter_csv())
    return EXIT_OK


def _threshold(args) -> int:
    spec = MapSpec(MapKind(args.map), args.param)
    c = estimate_threshold(spec, args.x0, args.samples, args.burn_in)
    sys.stdout.write(f"{c:.6f}\n")
    return EXIT_OK


_HANDLERS = {
    "keygen": _keygen,
    "genbits": _genbits,
    "test": _test,
    "export": _export,
    "encrypt": _crypt,
    "decrypt": _crypt,
    "analyze": _analyze,
    "threshold": _threshold,
}


def run(args: argparse.Namespace) -> int:
    try:
        return _HANDLERS[args.command](args)
    except (OSError, ValueError, DegenerateOrbitError) as exc:
        print(f"threshcrypt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
