"""Command-line entry point (``dpis``).

Reports go to stdout as ``key=value`` lines; diagnostics go to stderr.

Exit codes: 0 ok, 1 usage, 2 capacity exceeded, 3 tamper detected,
4 malformed key/manifest/image, 5 malformed extraction payload.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analysis, baselines, codec, formats, integrity
from .errors import (
    CapacityError,
    CorruptFile,
    DimensionMismatch,
    MalformedPayload,
    ParseError,
    UnsupportedFormat,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_TAMPERED = 3
EXIT_MALFORMED_INPUT = 4
EXIT_MALFORMED_PAYLOAD = 5

log = logging.getLogger("dpis")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(out, **fields):
    for k, v in fields.items():
        out.write(f"{k}={v}\n")


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _sample_size(text: str):
    if text == "all":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count or 'all', got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("sample size must be >= 0")
    return n


def _schema(text: str) -> baselines.PartitionSchema:
    try:
        return baselines.PartitionSchema.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# -- commands -----------------------------------------------------------------


def cmd_keygen(args, out):
    key = codec.keygen(args.length, args.seed)
    if args.threshold is not None:
        key = codec.StegoKey(key.indicator_sequence, args.threshold)
    formats.write_key(key, args.out)
    _emit(out, key=args.out, length=len(key), keyspace=analysis.keyspace_count(len(key)))
    return EXIT_OK


def cmd_embed(args, out):
    cover = formats.load_image(args.cover)
    key = formats.read_key(args.key)
    message = _read_bytes(args.message)
    stego, skipped, report = codec.embed(cover, key, message)
    formats.save_image(stego, args.out)
    _emit(out, stego=args.out, message_bytes=len(message), **report.as_dict())
    if args.manifest:
        manifest = integrity.build_manifest(stego, skipped, args.manifest_size, args.manifest_seed)
        formats.write_manifest(manifest, args.manifest)
        _emit(out, manifest=args.manifest, manifest_entries=len(manifest.entries))
    return EXIT_OK


def _verify(stego, manifest_path, out):
    result = integrity.verify_manifest(stego, formats.read_manifest(manifest_path))
    if result.ok:
        _emit(out, status="ok")
        return EXIT_OK
    _emit(out, status="tampered", mismatches=len(result.mismatches))
    for x, y in result.mismatches:
        _emit(out, tampered=f"{x},{y}")
    log.error("stego image was modified at %d tracked position(s)", len(result.mismatches))
    return EXIT_TAMPERED


def cmd_extract(args, out):
    stego = formats.load_image(args.stego)
    key = formats.read_key(args.key)
    if args.manifest:
        code = _verify(stego, args.manifest, out)
        if code != EXIT_OK:
            return code
    message = codec.extract(stego, key)
    _write_bytes(args.out, message)
    if args.out != "-":
        _emit(out, message=args.out, message_bytes=len(message))
    return EXIT_OK


def cmd_verify(args, out):
    return _verify(formats.load_image(args.stego), args.manifest, out)


def cmd_capacity(args, out):
    image = formats.load_image(args.image)
    report = codec.capacity_scan(image, formats.read_key(args.key))
    fields = report.as_dict()
    fields.pop("used_bits")
    _emit(out, **fields, max_message_bytes=max(0, (report.capacity_bits - codec.HEADER_BITS) // 8))
    return EXIT_OK


def cmd_analyze_histogram(args, out):
    cover = formats.load_image(args.cover)
    stego = formats.load_image(args.stego)
    if cover.shape != stego.shape:
        raise DimensionMismatch(f"cover is {cover.shape[1]}x{cover.shape[0]}, stego is {stego.shape[1]}x{stego.shape[0]}")
    for name, stats in analysis.histogram_report(cover, stego).items():
        _emit(out, **{f"{name.lower()}_{k}": v for k, v in stats.items()})
    return EXIT_OK


def cmd_analyze_keyspace(args, out):
    if args.explain:
        for line in analysis.keyspace_explain(args.length):
            out.write(line + "\n")
    else:
        _emit(out, length=args.length, keyspace=analysis.keyspace_count(args.length))
    return EXIT_OK


def cmd_analyze_capacity(args, out):
    image = formats.load_image(args.image)
    key = formats.read_key(args.key)
    message = _read_bytes(args.message)
    for scheme, report in analysis.compare_capacity(image, key, message, args.schema).items():
        d = report.as_dict()
        _emit(out, **{f"{scheme}_{k}": d[k] for k in ("utilized_pixels", "capacity_bits", "utilization_percent")})
    _emit(out, intensity_vb_schema=f"{args.schema} (reconstructed baseline)")
    return EXIT_OK


def _truth(args):
    return _read_bytes(args.message) if args.message else None


def _attack_report(report, out):
    _emit(out, **report.as_dict())
    return EXIT_OK


def cmd_attack_sequential(args, out):
    stego = formats.load_image(args.stego)
    report = analysis.attack_sequential(stego, formats.read_key(args.key), args.expected_len, _truth(args))
    return _attack_report(report, out)


def cmd_attack_uniform(args, out):
    stego = formats.load_image(args.stego)
    report = analysis.attack_uniform(stego, formats.read_key(args.key), args.bits, args.expected_len, _truth(args))
    return _attack_report(report, out)


def cmd_attack_bruteforce(args, out):
    stego = formats.load_image(args.stego)
    results = analysis.attack_bruteforce(
        stego, args.length, args.budget, args.expected_len, seed=args.seed, truth=_truth(args)
    )
    matches = sum(1 for c in results if c.match)
    _emit(out, attack="bruteforce", candidates=len(results), keyspace=analysis.keyspace_count(args.length))
    if args.message:
        _emit(out, matches=matches)
    for cand in results[: args.top]:
        match = "unknown" if cand.match is None else str(cand.match).lower()
        _emit(out, candidate=f"{cand.key} {cand.printable_ratio:.4f} {match}")
    return EXIT_OK


def cmd_baseline(args, out):
    if args.scheme == "pixel-indicator":
        do_embed = baselines.pi_embed
        do_extract = baselines.pi_extract
    else:
        do_embed = lambda cover, msg: baselines.ivb_embed(cover, args.schema, msg)  # noqa: E731
        do_extract = lambda stego: baselines.ivb_extract(stego, args.schema)  # noqa: E731
    if args.action == "embed":
        if not (args.cover and args.message):
            raise UsageError("baseline embed needs --cover and --message")
        message = _read_bytes(args.message)
        stego, report = do_embed(formats.load_image(args.cover), message)
        formats.save_image(stego, args.out)
        _emit(out, stego=args.out, scheme=args.scheme, message_bytes=len(message), **report.as_dict())
    else:
        if not args.stego:
            raise UsageError("baseline extract needs --stego")
        _write_bytes(args.out, do_extract(formats.load_image(args.stego)))
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dpis", description="Dynamic-pattern RGB image steganography toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("keygen", help="generate a random indicator-sequence key")
    s.add_argument("--length", type=int, default=20)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--threshold", type=int, choices=range(256), metavar="0..255")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_keygen)

    s = sub.add_parser("embed", help="hide a message in a cover image")
    s.add_argument("--cover", required=True)
    s.add_argument("--key", required=True)
    s.add_argument("--message", required=True, help="message file, or - for stdin")
    s.add_argument("--out", required=True, help="stego image (.png, .bmp, .tif, .ppm)")
    s.add_argument("--manifest", help="write an integrity manifest here")
    s.add_argument("--manifest-size", type=_sample_size, default=integrity.DEFAULT_SAMPLE_SIZE,
                   help="tracked pixels, or 'all' (default %(default)s)")
    s.add_argument("--manifest-seed", type=int, default=0)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("extract", help="recover a message from a stego image")
    s.add_argument("--stego", required=True)
    s.add_argument("--key", required=True)
    s.add_argument("--out", required=True, help="message file, or - for stdout")
    s.add_argument("--manifest", help="verify against this manifest before extracting")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("verify", help="check a stego image against its manifest")
    s.add_argument("--stego", required=True)
    s.add_argument("--manifest", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("capacity", help="payload capacity of an image under a key")
    s.add_argument("--image", required=True)
    s.add_argument("--key", required=True)
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("analyze", help="evaluation instruments")
    asub = s.add_subparsers(dest="what", required=True, parser_class=_Parser)
    a = asub.add_parser("histogram", help="per-channel histogram distance cover vs stego")
    a.add_argument("--cover", required=True)
    a.add_argument("--stego", required=True)
    a.set_defaults(func=cmd_analyze_histogram)
    a = asub.add_parser("keyspace", help="number of distinct indicator patterns")
    a.add_argument("--length", type=int, required=True)
    a.add_argument("--explain", action="store_true", help="show both readings of the formula")
    a.set_defaults(func=cmd_analyze_keyspace)
    a = asub.add_parser("capacity", help="utilized pixels per scheme for one message")
    a.add_argument("--image", required=True)
    a.add_argument("--key", required=True)
    a.add_argument("--message", required=True)
    a.add_argument("--schema", type=_schema, default=baselines.DEFAULT_SCHEMA)
    a.set_defaults(func=cmd_analyze_capacity)

    s = sub.add_parser("attack", help="steganalysis attacks")
    tsub = s.add_subparsers(dest="attack", required=True, parser_class=_Parser)
    a = tsub.add_parser("bruteforce", help="search indicator sequences")
    a.add_argument("--stego", required=True)
    a.add_argument("--length", type=int, required=True)
    a.add_argument("--budget", type=int, default=10_000)
    a.add_argument("--expected-len", type=int, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--message", help="true message, to report matches")
    a.add_argument("--top", type=int, default=5)
    a.set_defaults(func=cmd_attack_bruteforce)
    for name, helptext in (("sequential", "read every pixel, ignoring skips"),
                           ("uniform", "read a constant number of bits per pixel")):
        a = tsub.add_parser(name, help=helptext)
        a.add_argument("--stego", required=True)
        a.add_argument("--key", required=True)
        a.add_argument("--expected-len", type=int, required=True)
        a.add_argument("--message", help="true message, to report a match")
        if name == "uniform":
            a.add_argument("--bits", type=int, default=2, choices=range(1, 5))
            a.set_defaults(func=cmd_attack_uniform)
        else:
            a.set_defaults(func=cmd_attack_sequential)

    s = sub.add_parser("baseline", help="comparison schemes")
    s.add_argument("scheme", choices=["pixel-indicator", "intensity-vb"])
    s.add_argument("action", choices=["embed", "extract"])
    s.add_argument("--cover")
    s.add_argument("--stego")
    s.add_argument("--message")
    s.add_argument("--out", required=True)
    s.add_argument("--schema", type=_schema, default=baselines.DEFAULT_SCHEMA,
                   help="intensity-vb partition, e.g. 0-63:4,64-127:3,128-255:2")
    s.set_defaults(func=cmd_baseline)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"dpis: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="dpis: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"dpis: error: {exc}\n")
        return EXIT_USAGE
    except CapacityError as exc:
        sys.stderr.write(f"dpis: capacity exceeded: {exc}\n")
        return EXIT_CAPACITY
    except MalformedPayload as exc:
        sys.stderr.write(f"dpis: malformed payload: {exc}\n")
        return EXIT_MALFORMED_PAYLOAD
    except (ParseError, UnsupportedFormat, CorruptFile, DimensionMismatch, UnicodeDecodeError) as exc:
        sys.stderr.write(f"dpis: bad input: {exc}\n")
        return EXIT_MALFORMED_INPUT
    except ValueError as exc:
        sys.stderr.write(f"dpis: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"dpis: {exc}\n")
        return EXIT_MALFORMED_INPUT


if __name__ == "__main__":
    sys.exit(main())
