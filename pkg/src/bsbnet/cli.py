"""Command line interface.

Exit codes: 0 success or accept, 1 reject (or enrollment refused), 2 usage
error (bad flags, bad input values, enumeration refused), 3 I/O or file
format error.
"""
import argparse
import os
import sys

import numpy as np

from . import auth, codec
from .analyzer import (
    BASIN_MAX_D,
    basin_map,
    check_global_stability,
    enumerate_fixed_points,
    pattern_digest,
)
from .core import BsbParams, recall, saturate
from .errors import (
    BsbError,
    DimensionError,
    DuplicateUserError,
    EncodingError,
    EnumerationBoundError,
    ImageFormatError,
    PatternError,
    StoreError,
)
from .store import TrainedNetwork, load_network, save_network
from .training import PatternSet, TrainingConfig, set_bias, suppression_bias, train

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_P = BsbParams()
_T = TrainingConfig()


def _add_recall_flags(p, stored=False):
    g = p.add_argument_group("recall dynamics")
    note = "default: value stored in the network" if stored else "default: %(default)s"
    g.add_argument("--gamma", type=float, default=None if stored else _P.gamma,
                   help=f"state feedback gain ({note})")
    g.add_argument("--eta", type=float, default=None if stored else _P.eta,
                   help=f"weight gain ({note})")
    g.add_argument("--theta", type=float, default=None if stored else _P.theta,
                   help=f"input persistence gain ({note})")
    g.add_argument("--max-iters", type=int, default=None if stored else _P.max_iters,
                   help=f"iteration limit ({note})")
    g.add_argument("--tol", type=float, default=None if stored else _P.convergence_tol,
                   help=f"max-norm convergence tolerance ({note})")


def _add_training_flags(p):
    g = p.add_argument_group("training")
    g.add_argument("--lr", type=float, default=_T.lr, help="learning rate (default: %(default)s)")
    g.add_argument("--keep-diagonal", action="store_true",
                   help="keep self-connections (default: diagonal zeroed)")
    g.add_argument("--connectivity", type=float, default=_T.connectivity,
                   help="fraction of off-diagonal weights kept (default: %(default)s)")
    g.add_argument("--mask-seed", type=int, default=_T.mask_seed,
                   help="connectivity mask seed (default: %(default)s)")
    g.add_argument("--asymmetric-mask", action="store_true",
                   help="draw the mask per entry instead of per pair (default: symmetric)")


def _params(args, base=None):
    base = base or _P
    pick = lambda name, attr: getattr(base, attr) if getattr(args, name) is None else getattr(args, name)
    return BsbParams(pick("gamma", "gamma"), pick("eta", "eta"), pick("theta", "theta"),
                     pick("max_iters", "max_iters"), pick("tol", "convergence_tol"))


def _training(args):
    return TrainingConfig(lr=args.lr, zero_diagonal=not args.keep_diagonal,
                          connectivity=args.connectivity, mask_seed=args.mask_seed,
                          symmetric_mask=not args.asymmetric_mask)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bsbnet", description="Brain-state-in-a-box associative memory tools.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="enroll a user with a text or image password")
    p.add_argument("--store", required=True, help="credential store file (created if missing)")
    p.add_argument("--user", required=True)
    secret = p.add_mutually_exclusive_group(required=True)
    secret.add_argument("--password")
    secret.add_argument("--image", help="ASCII PPM/PGM file")
    p.add_argument("--width", type=int, default=auth.DEFAULT_TEXT_WIDTH,
                   help="bits per text pattern (default: %(default)s)")
    p.add_argument("--threshold", type=int, default=128,
                   help="luminance threshold for images (default: %(default)s)")
    _add_training_flags(p)
    _add_recall_flags(p)

    p = sub.add_parser("verify", help="check a password against an enrolled user")
    p.add_argument("--store", required=True)
    p.add_argument("--user", required=True)
    secret = p.add_mutually_exclusive_group(required=True)
    secret.add_argument("--password")
    secret.add_argument("--image")
    p.add_argument("--tolerance", type=int, default=0,
                   help="max Hamming distance between candidate and recalled pattern (default: %(default)s)")
    p.add_argument("--verbose", action="store_true", help="print the rejection reason and diagnostics")

    p = sub.add_parser("recall", help="run recall on a raw bipolar pattern")
    p.add_argument("--network", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern", help="space-separated +1/-1 tokens")
    src.add_argument("--patterns-file", help="one pattern per line")
    p.add_argument("--verbose", action="store_true")
    _add_recall_flags(p, stored=True)

    p = sub.add_parser("convert-image", help="convert an ASCII PPM/PGM image to bipolar text")
    p.add_argument("image")
    p.add_argument("--threshold", type=int, default=128, help="luminance threshold (default: %(default)s)")
    p.add_argument("--stage", choices=("rgb", "binary", "bipolar"), default="bipolar",
                   help="conversion stage to print (default: %(default)s)")
    p.add_argument("--matrix", action="store_true", help="print one image row per line")

    p = sub.add_parser("analyze", help="attractor census of a saved network")
    p.add_argument("--network", required=True)
    p.add_argument("--max-d", type=int, default=12, help="refuse networks above this dimension (default: %(default)s)")
    p.add_argument("--basins", action="store_true", help=f"also map basins (d <= {BASIN_MAX_D})")
    p.add_argument("--json", help="write the census as JSON to this path")
    p.add_argument("--stability-trials", type=int, default=0,
                   help="random interior starts for the stability check (default: %(default)s, off)")
    p.add_argument("--seed", type=int, default=0, help="seed for the stability check (default: %(default)s)")
    _add_recall_flags(p, stored=True)

    p = sub.add_parser("train", help="train a network from a patterns file")
    p.add_argument("--patterns", required=True, help="one pattern of +1/-1 tokens per line")
    p.add_argument("--out", required=True)
    p.add_argument("--bias-eps", type=float, default=0.0,
                   help="set b = eps * sum of patterns (default: %(default)s, zero bias)")
    _add_training_flags(p)
    _add_recall_flags(p)
    return parser


def _read_patterns(path):
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    return [codec.parse_bipolar(ln) for ln in lines]


def _load_secret(args):
    if args.password is not None:
        return args.password, auth.TEXT
    return codec.read_image(args.image), auth.IMAGE


def cmd_enroll(args, out):
    store = auth.load_store(args.store) if os.path.exists(args.store) else auth.CredentialStore()
    secret, kind = _load_secret(args)
    try:
        rec = auth.enroll(store, args.user, secret, kind, args.width, args.threshold,
                          _training(args), _params(args))
    except DuplicateUserError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_REJECT
    auth.save_store(store, args.store)
    print(f"enrolled {rec.username} (d={rec.network.d})", file=out)
    return EXIT_OK


def cmd_verify(args, out):
    store = auth.load_store(args.store)
    secret, _ = _load_secret(args)
    v = auth.verify(store, args.user, secret, args.tolerance)
    if v.accepted:
        print("accepted", file=out)
    elif args.verbose:
        print(f"rejected: {v.reason.replace('_', ' ')}", file=out)
    else:
        print("rejected", file=out)
    if args.verbose and v.reason != "unknown_user":
        print(f"hamming {v.hamming} converged {v.converged} iterations {v.iterations}", file=out)
    return EXIT_OK if v.accepted else EXIT_REJECT


def cmd_recall(args, out):
    net = load_network(args.network)
    params = _params(args, net.params)
    probes = [codec.parse_bipolar(args.pattern)] if args.pattern else _read_patterns(args.patterns_file)
    digests = set(net.digests)
    for probe in probes:
        trace = recall(probe, net.weights, params)
        print(codec.format_bipolar(trace.final_state), file=out)
        if args.verbose:
            known = pattern_digest(saturate(trace.final_state)) in digests
            print(f"# converged {trace.converged} iterations {trace.iterations_used} "
                  f"saturated {trace.saturated} stored {known}", file=out)
    return EXIT_OK


def cmd_convert(args, out):
    img = codec.read_image(args.image)
    if args.stage == "rgb":
        rows = [img.pixels[r * img.width : (r + 1) * img.width] for r in range(img.height)]
        for row in rows:
            print(" ".join(f"({r},{g},{b})" for r, g, b in row), file=out)
        return EXIT_OK
    binary = codec.image_to_binary(img, args.threshold)
    if args.stage == "binary":
        arr = binary.to_array()
        text = "\n".join(" ".join(map(str, row)) for row in arr) if args.matrix \
            else " ".join(str(v) for v in binary.bits)
        print(text, file=out)
        return EXIT_OK
    print(codec.format_bipolar(codec.binary_to_bipolar(binary), img.width if args.matrix else None), file=out)
    return EXIT_OK


def cmd_analyze(args, out):
    net = load_network(args.network)
    if net.d > args.max_d:
        print(f"refusing: network dimension {net.d} exceeds --max-d {args.max_d}; "
              "exhaustive enumeration is 2**d", file=sys.stderr)
        return EXIT_USAGE
    params = _params(args, net.params)
    digests = frozenset(net.digests)
    if args.basins:
        census = basin_map(net.weights, params, digests)
    else:
        census = enumerate_fixed_points(net.weights, params, digests)
    print(census.to_text(), file=out)
    if args.stability_trials:
        report = check_global_stability(net.weights, params, args.stability_trials, args.seed)
        print(f"stability_trials {report.trials} unsettled {len(report.issues)} "
              f"oscillating {len(report.oscillating)}", file=out)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(census.to_json())
    return EXIT_OK


def cmd_train(args, out):
    patterns = PatternSet(_read_patterns(args.patterns))
    config = _training(args)
    weights = train(patterns, config)
    if args.bias_eps:
        weights = set_bias(weights, suppression_bias(patterns, args.bias_eps))
    net = TrainedNetwork(weights, _params(args), config,
                         tuple(pattern_digest(x) for x in patterns))
    save_network(net, args.out)
    print(f"trained d={patterns.d} m={patterns.m} -> {args.out}", file=out)
    return EXIT_OK


COMMANDS = {
    "enroll": cmd_enroll,
    "verify": cmd_verify,
    "recall": cmd_recall,
    "convert-image": cmd_convert,
    "analyze": cmd_analyze,
    "train": cmd_train,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (StoreError, ImageFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EnumerationBoundError, EncodingError, PatternError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BsbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECT


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
