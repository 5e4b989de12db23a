"""Command-line interface for the proximity-detection pipeline."""

import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from scripts.common import setup_logging

from .commands import COMMANDS
from .config import CLASSIFIERS, ConfigError, UsageError, resolve
from .constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, SUBCOMMANDS, VERSION

logger = logging.getLogger(__name__)


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', '-c', type=str, help='key=value config file')
    parser.add_argument('--seed', type=int, help='Master seed (overrides the config)')
    parser.add_argument('--out', '-o', type=str, help='Output directory (relative paths go under $AURA_OUTPUT_ROOT)')
    parser.add_argument('--overwrite', action='store_true', help='Replace a non-empty output directory')
    parser.add_argument('--verbose', '-v', action='store_true', help='Verbose logging')
    parser.add_argument('--quiet', '-q', action='store_true', help='Warnings and errors only, no progress bars')


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser."""
    parser = argparse.ArgumentParser(
        prog='aura',
        description="Simulate, train, evaluate and run leaky-surface-wave proximity detection.",
        epilog="""
Examples:
  python -m scripts.aura simulate --config data/scenarios/static.cfg --seed 7 --out runs/static
  python -m scripts.aura train --dataset runs/static --classifier svm --out runs/svm
  python -m scripts.aura eval --model runs/svm/model.lswm --dataset runs/static --out runs/eval
  python -m scripts.aura simulate --stream approach --out runs/stream
  python -m scripts.aura detect --model runs/svm/model.lswm --input runs/stream/stream.wav --pace
  python -m scripts.aura report --trials 13 --out runs/report
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    sub = parser.add_subparsers(dest='subcommand', metavar='{' + ','.join(SUBCOMMANDS) + '}')
    sub.required = True

    simulate = sub.add_parser('simulate', help='Build a field-study dataset or a synthetic stream')
    _common(simulate)
    simulate.add_argument('--trials', type=int, help='Trials per scenario')
    simulate.add_argument('--stream', choices=['approach', 'quiet'],
                          help='Write one received recording (WAV) instead of a dataset')

    train = sub.add_parser('train', help='Train a window classifier on a dataset')
    _common(train)
    train.add_argument('--dataset', type=str, help='Dataset directory')
    train.add_argument('--classifier', choices=CLASSIFIERS, help='Classifier kind')

    evaluate = sub.add_parser('eval', help='Score a dataset and report TPR/TNR and the ROC')
    _common(evaluate)
    evaluate.add_argument('--model', type=str, help='Model file')
    evaluate.add_argument('--dataset', type=str, help='Dataset directory')
    evaluate.add_argument('--threshold', type=float, help='Fixed detection threshold instead of the ROC choice')
    evaluate.add_argument('--on', choices=['test', 'train', 'all'], help='Which trials to score (default: test)')
    evaluate.add_argument('--allow-train-eval', action='store_true', help='Allow scoring training trials')
    evaluate.add_argument('--allow-mismatch', action='store_true',
                          help='Evaluate even when the dataset is not the one the model was trained on')

    detect = sub.add_parser('detect', help='Run the streaming detector over a recording')
    _common(detect)
    detect.add_argument('--model', type=str, help='Model file')
    detect.add_argument('--input', type=str, help="WAV or raw float32 file, or '-' for raw float32 on stdin")
    detect.add_argument('--threshold', type=float, help='Detection threshold')
    detect.add_argument('--pace', action='store_true', help='Consume input at wall-clock rate')

    report = sub.add_parser('report', help='Micro-benchmark sweeps and the response-budget check')
    _common(report)
    report.add_argument('--trials', type=int, help='Trials per sweep point')
    report.add_argument('--model', type=str, help='Model for the budget check (default: freshly seeded CNN)')
    report.add_argument('--pace', action='store_true', help='Pace the budget-check stream at wall-clock rate')

    return parser


def _check_flags(args):
    threshold = getattr(args, 'threshold', None)
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"--threshold must lie in [0, 1], got {threshold}")
    trials = getattr(args, 'trials', None)
    if trials is not None and trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {trials}")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 on failure, 2 on usage errors."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.verbose, args.quiet)
    load_dotenv()

    try:
        _check_flags(args)
        cfg = resolve(args)
        return COMMANDS[cfg.subcommand](cfg)
    except (ConfigError, UsageError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"{args.subcommand} failed: {e}")
        logger.debug("Traceback", exc_info=True)
        return EXIT_FAILURE


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
