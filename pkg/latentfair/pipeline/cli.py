"""Command line interface of latentfair.

Examples
--------

    latentfair run --config experiment.json --seed 42 --out results/
    latentfair train-clf --target subgroup --space latent --out results/
    latentfair report --out results/
"""

import argparse
import sys

from .ExperimentConfig import ExperimentConfig, ConfigError
from .ExperimentRun import ExperimentRun, VARIANTS
from .stages import PartialAugmentationError, StageError
from ..classify import TARGETS, SPACES

EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 2
EXIT_STAGE_FAILURE = 3
EXIT_PARTIAL_AUGMENTATION = 4

STAGE_COMMANDS = ("synth", "train-gen", "train-clf", "label", "traverse",
                  "augment", "train-diag", "evaluate", "report")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latentfair",
        description="Debias a diagnostic classifier by latent-space "
                    "augmentation of an under-represented subgroup.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to the JSON config file "
                                         "(default settings if omitted).")
    common.add_argument("--seed", type=int, help="Overrides the config's seed.")
    common.add_argument("--out", help="Overrides the config's output_dir.")
    common.add_argument("--allow-partial", action="store_true",
                        help="Go on when the augmentation plan is only "
                             "partially achieved.")
    common.add_argument("--quiet", action="store_true",
                        help="No progress bars.")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True
    run = subparsers.add_parser("run", parents=[common],
                                help="Run the complete experiment.")
    run.add_argument("--resume", action="store_true",
                     help="Skip the stages whose artifacts are present.")
    for command in STAGE_COMMANDS:
        sub = subparsers.add_parser(command, parents=[common],
                                    help="Run the %s stage only." % command)
        if command == "train-clf":
            sub.add_argument("--target", choices=TARGETS, required=True)
            sub.add_argument("--space", choices=SPACES, required=True)
        elif command == "train-diag":
            sub.add_argument("--variant", choices=VARIANTS, required=True)
    return parser


def load_config(args):
    """Return the ExperimentConfig of the file, with the command line
    overrides."""
    config = (ExperimentConfig() if args.config is None
              else ExperimentConfig.from_file(args.config))
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["output_dir"] = args.out
    return config.copy(**changes) if changes else config


def execute(args):
    """Run the command of parsed arguments (exceptions propagate)."""
    config = load_config(args)
    run = ExperimentRun(config, allow_partial=args.allow_partial or None,
                        logger=None if args.quiet else "bar")
    if args.command == "run":
        run.run(resume=args.resume)
    elif args.command == "train-clf":
        run.run_stage("train-clf-%s" % args.space, targets=(args.target,))
    elif args.command == "train-diag":
        run.run_stage("train-diag", variants=(args.variant,))
    else:
        run.run_stage(args.command)
    return run


def main(argv=None):
    """Entry point of the ``latentfair`` command, returns the exit code:
    0 success, 2 configuration error, 3 stage failure, 4 partial
    augmentation."""
    args = build_parser().parse_args(argv)
    try:
        execute(args)
    except ConfigError as error:
        print("Configuration error: %s" % error, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except StageError as error:
        print(str(error), file=sys.stderr)
        if isinstance(error.__cause__, PartialAugmentationError):
            return EXIT_PARTIAL_AUGMENTATION
        if isinstance(error.__cause__, ConfigError):
            return EXIT_CONFIG_ERROR
        return EXIT_STAGE_FAILURE
    except PartialAugmentationError as error:
        print(str(error), file=sys.stderr)
        return EXIT_PARTIAL_AUGMENTATION
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
