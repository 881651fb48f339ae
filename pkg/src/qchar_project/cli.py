"""
Command-line front end.

Every subcommand prints one JSON document (``--format json``, the default)
or a plain-text rendering to stdout. Logging goes to stderr. Exit codes:
0 success or passed verification, 1 failed verification, 2 usage or
computation error.
"""
import argparse
import json
import logging
import sys
from dataclasses import replace

from qchar_project.algebra.qseries import QCharSeries
from qchar_project.config import settings
from qchar_project.errors import ConfigError
from qchar_project.runners.compute_runner import ComputeRunner
from qchar_project.runners.verify_runner import TARGETS, VerifyRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", default=None, help="Spectral window rmin:rmax (default: QCHAR_WINDOW or -8:0).")
    common.add_argument("--degcap", type=int, default=None, help="Maximal A^{-1}-degree (default: QCHAR_DEGCAP or 4).")
    common.add_argument("--depth", type=int, default=None, help="Largest |J| tracked (default: QCHAR_DEPTH or 2).")
    common.add_argument("--q", dest="qmode", default=None, help="'symbolic' or two rational values 'a,b'.")
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized checks (default: QCHAR_SEED or 0).")
    common.add_argument("--format", choices=("json", "text"), default=None, help="Output format.")

    parser = _Parser(prog="qchar", description="Exact q-characters for the Borel subalgebra of quantum affine sl2.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("qchar", parents=[common], help="Normalized limit q-character of an l-weight.")
    p.add_argument("expr", help="l-weight such as 'Psi[0]^-1' or 'Y[-1]*Y[-3]'.")

    p = sub.add_parser("limit", parents=[common], help="Stabilize the standard sequence of an l-weight.")
    p.add_argument("expr")
    p.add_argument("--N", dest="n_max", type=int, default=None, help="Give-up bound on N.")

    p = sub.add_parser("decompose", parents=[common], help="Simple constituents of M(Psi_{q^r}^{-1}).")
    p.add_argument("--r", type=int, default=0, help="Even exponent r (default 0).")

    p = sub.add_parser("verify", parents=[common], help="Run verification checks.")
    p.add_argument("target", choices=TARGETS + ("all",))
    p.add_argument("--D", type=int, default=None, help="PBW degree bound (oracle, induced).")
    p.add_argument("--N", type=int, default=None, help="Tensor length of the divergence witness.")
    p.add_argument("--positions", type=int, default=None, help="Tracked slot positions.")
    p.add_argument("--samples", type=int, default=None, help="Random samples (multiplicativity).")

    p = sub.add_parser("simulate", parents=[common], help="l-weights of a tensor product of evaluation modules.")
    p.add_argument("factors", help="Comma-separated k:s factors, or [w] for a one-dimensional factor.")
    p.add_argument("--normalized", action="store_true", help="Use normalized factors.")

    p = sub.add_parser("induce", parents=[common], help="Eigenvector location on the truncated induced module.")
    p.add_argument("--D", type=int, default=4)
    p.add_argument("--positions", type=int, default=3)
    p.add_argument("--r", type=int, action="append", default=None, help="h_r to test (repeatable, default 1).")

    p = sub.add_parser("basis", parents=[common], help="Change of basis v -> w of the asymptotic standard module.")
    p.add_argument("--positions", type=int, default=3)
    p.add_argument("--rmax", type=int, default=3)
    return parser


def _join_window(argv):
    """Glue ``--window -8:0`` into ``--window=-8:0``; argparse reads a leading '-' as a flag."""
    out = []
    args = iter(argv)
    for arg in args:
        value = next(args, None) if arg == "--window" else None
        out.append(arg if value is None else f"{arg}={value}")
    return out


def build_config(args):
    config = settings.RunConfig.from_env().with_overrides(
        window=settings.parse_window(args.window) if args.window is not None else None,
        degcap=args.degcap,
        depth=args.depth,
        qmode=settings.parse_qmode(args.qmode) if args.qmode is not None else None,
        seed=args.seed,
        format=args.format,
    )
    if args.qmode is not None and args.qmode.strip().lower() == "symbolic":
        config = replace(config, qmode=None)
    return config.validate()


def build_message(args):
    if args.command == "verify":
        message = {"action": "verify", "target": args.target}
        for key in ("D", "N", "positions", "samples"):
            if getattr(args, key) is not None:
                message[key] = getattr(args, key)
        return message
    if args.command in ("qchar", "limit"):
        message = {"action": args.command, "expr": args.expr}
        if args.command == "limit":
            message["n_max"] = args.n_max
        return message
    if args.command == "decompose":
        return {"action": "decompose", "r": args.r}
    if args.command == "simulate":
        return {"action": "simulate", "factors": args.factors, "normalized": args.normalized}
    if args.command == "induce":
        return {"action": "induce", "D": args.D, "positions": args.positions, "rset": args.r or [1]}
    return {"action": "basis", "positions": args.positions, "rmax": args.rmax}


def _is_series(value):
    return isinstance(value, dict) and {"terms", "window", "degcap"} <= set(value)


def _is_summand_list(value):
    return isinstance(value, list) and bool(value) and all(
        isinstance(v, dict) and _is_series(v.get("series")) for v in value
    )


def _series_table(value):
    return ["    " + line for line in QCharSeries.from_json(value).to_text().splitlines()]


def render_text(result):
    """Plain-text rendering: ``key: value`` lines, series as degree-sorted tables."""
    lines = []
    for key in sorted(result):
        value = result[key]
        if _is_series(value):
            lines.append(f"{key}:")
            lines.extend(_series_table(value))
        elif _is_summand_list(value):
            for i, item in enumerate(value):
                fields = ", ".join(f"{k}={json.dumps(item[k])}" for k in sorted(item) if k != "series")
                lines.append(f"{key}[{i}]: {fields}")
                lines.extend(_series_table(item["series"]))
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def main(argv=None):
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_join_window(list(argv)))
    try:
        config = build_config(args)
    except ConfigError as e:
        print(f"qchar: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    runner = VerifyRunner(config=config) if args.command == "verify" else ComputeRunner(config=config)
    result = runner.process_request(build_message(args))
    if "error" in result:
        print(f"qchar: error: {result['error']}", file=sys.stderr)
        return EXIT_USAGE

    if config.format == "json":
        print(json.dumps(result, sort_keys=True, indent=2))
    else:
        print(render_text(result))
    if result.get("passed") is False:
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
