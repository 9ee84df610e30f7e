"""Command-line interface.

``weaktraj <subcommand> --scenario <path-or-bundled-name> [--out PATH]
[--format csv|json] [--profile point|gaussian:<width>]``

Subcommands map one-to-one onto the scenario commands: ``pattern``,
``density``, ``weak-grid``, ``protocol`` and ``invert`` (the latter takes
``--contrasts`` instead of a scenario).  Exit status is 0 iff no operation
errored.
"""

import argparse
import sys

from . import scenario
from .errors import WeaktrajError
from .weakval import InteractionProfile


def _parse_profile(text: str) -> InteractionProfile:
    if text == "point":
        return InteractionProfile("point")
    if text.startswith("gaussian:"):
        width = float(text.split(":", 1)[1])
        return InteractionProfile("gaussian", width)
    raise argparse.ArgumentTypeError(
        f"profile must be 'point' or 'gaussian:<width>', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaktraj",
        description="Weak-measurement trajectories in a double-slit interferometer")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_scenario=True):
        if needs_scenario:
            p.add_argument("--scenario", required=True,
                           help="scenario file path or bundled name "
                                f"({', '.join(scenario.BUNDLED)})")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("pattern", help="screen interference pattern at t_f")
    common(p)

    p = sub.add_parser("density", help="|psi|^2 snapshots at chosen times")
    common(p)
    p.add_argument("--times", default=None,
                   help="comma-separated times (default: 0, t_f/3, 2t_f/3, t_f)")

    p = sub.add_parser("weak-grid", help="pointer shifts and weak trajectories")
    common(p)
    p.add_argument("--profile", type=_parse_profile, default=None,
                   help="override probe profile: point | gaussian:<width>")

    p = sub.add_parser("protocol", help="four-crystal photonic protocol report")
    common(p)
    p.add_argument("--mode", choices=("idealized", "exact"), default="idealized")

    p = sub.add_parser("invert", help="invert a contrasts file offline")
    common(p, needs_scenario=False)
    p.add_argument("--contrasts", required=True, help="contrasts YAML file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "invert":
            table = scenario.cmd_invert(args.contrasts)
        else:
            config = scenario.load_scenario(args.scenario)
            if args.command == "pattern":
                table = scenario.cmd_pattern(config)
            elif args.command == "density":
                times = None
                if args.times:
                    try:
                        times = [float(v) for v in args.times.split(",")]
                    except ValueError:
                        print(f"error: --times must be comma-separated numbers, "
                              f"got {args.times!r}", file=sys.stderr)
                        return 1
                table = scenario.cmd_density(config, times)
            elif args.command == "weak-grid":
                table = scenario.cmd_weak_grid(config, args.profile)
            else:
                table = scenario.cmd_protocol(config, args.mode)
    except WeaktrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
