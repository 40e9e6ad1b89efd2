"""Command-line front end.

.. code-block:: bash

    fdstates run fig1 --out results
    fdstates run my_scenario.json --samples 2001
    fdstates verify --nmax 4 --jobs 4
"""

import argparse
import json
import logging
import os
import sys

from fdstates.base import (
    CONTINUOUS,
    VERIFY_BOUND,
    VERIFY_EPS,
    ScenarioConfig,
    list_presets,
    load_preset,
    run_scenario,
    verify_closed_forms,
)
from fdstates.errors import FdStatesError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_VERIFICATION_FAILED = 2


def build_parser():
    """Returns the argument parser of the ``fdstates`` command."""
    parser = argparse.ArgumentParser(
        prog="fdstates",
        description="Simulate finite-dimensional states in driven Kerr media.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario file or preset.")
    run.add_argument("scenario", help="Path to a JSON scenario or a preset name.")
    run.add_argument("--out", default=".", help="Output directory.")
    run.add_argument("--samples", type=int, help="Override the sample count.")
    run.add_argument("--gamma", type=float, help="Override the damping constant.")
    run.add_argument("--progress", action="store_true", help="Show progress bars.")

    verify = commands.add_parser("verify", help="Compare engines with closed forms.")
    verify.add_argument("--nmax", type=int, default=3, help="Largest Kerr order.")
    verify.add_argument("--bound", type=float, default=VERIFY_BOUND)
    verify.add_argument("--eps", type=float, default=VERIFY_EPS)
    verify.add_argument("--jobs", type=int, default=1, help="Worker threads.")
    verify.add_argument("--out", help="Directory for the verification report.")
    verify.add_argument("--progress", action="store_true", help="Show progress bars.")

    commands.add_parser("presets", help="List the shipped presets.")
    return parser


def configure_logging(verbosity):
    """Sets the root log level from the number of ``-v`` flags."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")


def load_scenario(scenario):
    """Loads `scenario` from a JSON file if it exists, otherwise as a preset name."""
    if os.path.isfile(scenario):
        return ScenarioConfig.from_json(scenario)
    return load_preset(scenario)


def _run(args):
    config = load_scenario(args.scenario)
    overrides = {}
    if args.samples is not None and config.get("engine", CONTINUOUS) != CONTINUOUS:
        logger.warning(
            "--samples ignored: the %s engine samples once per period.", config.engine
        )
    elif args.samples is not None:
        overrides["sample_count"] = args.samples
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.progress:
        overrides["progress"] = True
    config = config + ScenarioConfig(**overrides)

    report = run_scenario(config, args.out)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _verify(args):
    report = verify_closed_forms(
        args.nmax, bound=args.bound, eps=args.eps, jobs=args.jobs, progress=args.progress
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        report.to_json(os.path.join(args.out, "verify.json"))
    for order, deviation in sorted(report.verification["max_deviation"].items()):
        print("N = %s: max deviation %.3e" % (order, deviation))
    if not report.passed:
        print("Verification failed: bound %.1e exceeded." % args.bound)
        return EXIT_VERIFICATION_FAILED
    print("Verification passed.")
    return EXIT_OK


def main(argv=None):
    """Entry point of the ``fdstates`` command; returns the exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "verify":
            return _verify(args)
        print("\n".join(list_presets()))
        return EXIT_OK
    except (FdStatesError, OSError) as err:
        logger.error("%s", err)
        print("error: %s" % err, file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
