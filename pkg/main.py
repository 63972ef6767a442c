"""
Main entry point for the radar road-boundary detector.

    python main.py simulate --kind straight --frames 200 --seed 7 --out data/train.jsonl
    python main.py train --data data/train.jsonl --out models/full.json
    python main.py train --data data/train.jsonl --out models/no_temporal.json --no-temporal
    python main.py infer --data data/test.jsonl --model models/full.json --out detections.jsonl
    python main.py eval --data data/test.jsonl --model models/full.json --model models/no_temporal.json \
        --report-dir report/
    python main.py sweep --out sweep.json
"""

from typing import List, Optional
import argparse
import logging
import sys

from src.module2_sim.scenario import SCENARIO_KINDS
from src.module6_cli.commands import cmd_eval, cmd_infer, cmd_simulate, cmd_sweep, cmd_train
from src.module4_segnet.training import TrainConfig
from src.module6_cli.run_config import RunConfig, describe_defaults, load_run_config

logger = logging.getLogger("main")


class HelpFormatter(argparse.RawDescriptionHelpFormatter, argparse.ArgumentDefaultsHelpFormatter):
    """Keeps the epilog layout and appends defaults, except for unset (None) ones."""

    def _get_help_string(self, action):
        if action.default is None:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="4D radar road-boundary detection: simulate, train, infer, evaluate.",
        formatter_class=HelpFormatter,
        epilog="configuration defaults (override with --config FILE.toml):\n" + describe_defaults(),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="debug logging")
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--seed", type=int, help="root seed (overrides [run] and [train] seed)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, summary: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], formatter_class=HelpFormatter, help=summary)

    simulate = add_command("simulate", "write a synthetic labeled dataset")
    simulate.add_argument("--kind", choices=SCENARIO_KINDS, required=True)
    simulate.add_argument("--frames", type=int, required=True)
    simulate.add_argument("--out", required=True)

    train = add_command("train", "train a segmentation model")
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--epochs", type=int,
                       help=f"overrides [train] epochs (config default {TrainConfig().epochs})")
    train.add_argument("--no-distance-loss", action="store_true", help="train with lambda_dist = 0")
    train.add_argument("--no-temporal", action="store_true", help="train with default temporal features")

    infer = add_command("infer", "per-frame detections and curves as JSON Lines")
    infer.add_argument("--data", required=True)
    infer.add_argument("--model", required=True)
    infer.add_argument("--out", required=True)

    evaluate = add_command("eval", "evaluate one or more checkpoints")
    evaluate.add_argument("--data", required=True)
    evaluate.add_argument("--model", action="append", required=True, help="repeat for ablation arms")
    evaluate.add_argument("--report-dir", required=True)

    sweep = add_command("sweep", "radar-noise sensitivity sweep")
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--frames", type=int, default=20, help="frames per scenario and noise level")
    return parser


def run(args: argparse.Namespace) -> None:
    config = load_run_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config = config.override("run", seed=args.seed).override("train", seed=args.seed)

    if args.command == "simulate":
        frames = cmd_simulate(args.kind, args.frames, config.run.seed, args.out, config.radar)
        print(f"wrote {len(frames)} frames to {args.out}")
    elif args.command == "train":
        config = config.override("train", epochs=args.epochs)
        _, trace = cmd_train(args.data, config, args.out, args.no_distance_loss, args.no_temporal)
        final = f"{trace[-1]:.5f}" if trace else "n/a"
        print(f"trained {len(trace)} epochs, final loss {final}; model at {args.out}")
    elif args.command == "infer":
        n = cmd_infer(args.data, args.model, args.out, config)
        print(f"wrote detections for {n} frames to {args.out}")
    elif args.command == "eval":
        report = cmd_eval(args.data, args.model, args.report_dir, config)
        for arm in report.arms:
            print(f"{arm.arm}: accuracy {arm.accuracy:.4f}, median chamfer {arm.median_chamfer}, "
                  f"median hausdorff {arm.median_hausdorff}")
    elif args.command == "sweep":
        summary = cmd_sweep(args.out, config, args.frames)
        print("sweep " + ("passed" if all(r["passed"] for r in summary["rows"]) else "FAILED"))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run(args)
    except Exception as exc:
        logger.error("%s failed: %s", args.command, exc)
        logger.debug("traceback", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
