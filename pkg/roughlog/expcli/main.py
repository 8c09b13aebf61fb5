"""
The ``roughlog`` command.

Exit status is 0 when every check of the run passes, 1 when a check fails and
2 for usage and configuration errors.
"""
import argparse
import sys

from roughlog.expcli.config import TASKS, load_config
from roughlog.expcli.tasks import run
from roughlog.logger import log
from roughlog.utils.exceptions import ConfigError

__all__ = ['build_parser', 'main']

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_HELP = {
    "eig": "principal eigenpair of the configured operator",
    "lstar": "threshold lambda* of the configured weight",
    "solve": "positive solution of the logistic equation at task.lambda",
    "branch": "solutions along a grid of lambda",
    "semigroup-check": "positivity and domination checks of the semigroup",
    "verify": "the verification suite",
}


def _seed(value):
    seed = int(value)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {value}")
    return seed


def build_parser():
    parser = argparse.ArgumentParser(
        prog="roughlog",
        description="Principal eigenvalues, thresholds and logistic solutions on rasterized "
                    "domains.")
    subparsers = parser.add_subparsers(dest="task", metavar="TASK", required=True)
    for task in TASKS:
        sub = subparsers.add_parser(task, help=_HELP[task])
        sub.add_argument("--config", metavar="PATH", required=task != "verify",
                         help="JSON experiment configuration")
        sub.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
        sub.add_argument("--seed", type=_seed, help="random seed (overrides config)")
        if task == "verify":
            sub.add_argument("--level", choices=("quick", "full"), default=None,
                             help="criteria to run (default quick)")
        sub.add_argument("--workers", type=int, default=None,
                         help="worker threads; ROUGHLOG_THREADS by default")
    return parser


def main(argv=None):
    """
    Run the command line and return its exit status.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_USAGE
    overrides = {"task": args.task, "seed": args.seed, "output": args.out,
                 "level": getattr(args, "level", None)}
    try:
        config = load_config(args.config, overrides)
        artifact = run(config, workers=args.workers)
    except ConfigError as e:
        print(f"roughlog: configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for result in artifact.checks.values():
        print(result)
    if artifact.exit_status:
        log.warning(f"Failed checks: {', '.join(artifact.checks.failed)}")
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
