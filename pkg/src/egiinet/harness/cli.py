"""Command line entry point.

Every subcommand accepts ``--config``, ``--seed``, ``--out`` and ``--verbose``. Errors are
reported on standard error: argument errors exit with code 2, every other failure with 1.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from egiinet.harness.config import RunConfig, load_run_config
from egiinet.harness.evaluate import evaluate
from egiinet.harness.synth_data import generate_data
from egiinet.harness.train import run_ablation, train
from egiinet.harness.visualize import visualize_attention
from egiinet.models.egiinet import VARIANTS

LOG = logging.getLogger(__name__)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    common.add_argument("--seed", type=int, default=None, help="overrides the config and EGIINET_SEED")
    common.add_argument("--out", type=Path, default=None, help="output location")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging and progress bars")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="egiinet", description="View-guided point cloud completion")
    sub = parser.add_subparsers(dest="command", metavar="command")

    sub.add_parser("generate-data", parents=[common], help="write synthetic train/val (and unseen) splits")

    p = sub.add_parser("train", parents=[common], help="train a model and write a checkpoint directory")
    p.add_argument("--data", type=Path, default=None, help="dataset directory (defaults to data_dir)")

    p = sub.add_parser("eval", parents=[common], help="write per-family metrics of a checkpoint as CSV")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--manifest", type=Path, default=None, help="defaults to <data_dir>/val.jsonl")
    p.add_argument("--batch-size", type=int, default=8)

    p = sub.add_parser("ablate", parents=[common], help="train and compare ablation variants over seeds")
    p.add_argument("--variants", nargs="+", choices=VARIANTS, default=list(VARIANTS))
    p.add_argument("--seeds", nargs="+", type=int, default=[0, 1, 2])

    p = sub.add_parser("visualize-attention", parents=[common], help="overlay fusion attention on a sample view")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--manifest", type=Path, default=None, help="defaults to <data_dir>/val.jsonl")
    p.add_argument("--sample", type=int, default=0, help="sample index within the manifest")
    return parser


def _run(args: argparse.Namespace, config: RunConfig) -> None:
    data_dir = Path(config.data_dir)
    if args.command == "generate-data":
        generate_data(config, out_dir=args.out, verbose=args.verbose)
    elif args.command == "train":
        if args.data is not None:
            config = config.replace(data_dir=str(args.data))
        train(config, out_dir=args.out or Path("checkpoint"), verbose=args.verbose)
    elif args.command == "eval":
        manifest = args.manifest or data_dir / "val.jsonl"
        out = args.out or Path(".")
        evaluate(args.checkpoint, manifest, out_csv=out / "metrics.csv", batch_size=args.batch_size, verbose=args.verbose)
    elif args.command == "ablate":
        run_ablation(config, args.out or Path("ablation"), variants=args.variants, seeds=args.seeds, verbose=args.verbose)
    elif args.command == "visualize-attention":
        manifest = args.manifest or data_dir / "val.jsonl"
        out = args.out or Path(".")
        visualize_attention(args.checkpoint, manifest, out / f"attention_{args.sample:05d}.png", sample_index=args.sample)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_run_config(args.config, seed=args.seed)
        _run(args, config)
    except Exception as e:
        LOG.debug("command failed", exc_info=True)
        print(f"egiinet {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
