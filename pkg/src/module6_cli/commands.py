"""
Command Implementations

Each command reads its inputs, runs the pipeline stages it needs and writes
its outputs atomically. main.py only parses arguments and calls these.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import csv
import io
import json
import logging

import numpy as np

from src.module1_core.geometry import ego_to_world
from src.module1_core.radar_types import RadarFrame
from src.module2_sim.dataset_io import PathLike, atomic_output, read_dataset, write_dataset
from src.module2_sim.renderer import (
    SOURCE_MOVER,
    SOURCE_OVERHEAD,
    RadarModel,
    perturb_radar,
    render_sequence,
)
from src.module2_sim.scenario import FRAME_PERIOD, Scenario, build_scenario, distance_to_polyline
from src.module3_preprocess.filters import filter_mask
from src.module4_segnet.model import SegModel, load_checkpoint, save_checkpoint
from src.module4_segnet.training import arm_flags, train
from src.module5_curvefit.boundary_fitter import BoundaryCurve, fit_boundaries
from src.module6_cli.evaluation import EvalReport, build_report, evaluate_probabilities, run_arm, write_report
from src.module6_cli.plots import plot_loss, plot_metrics, plot_topview
from src.module6_cli.run_config import RunConfig
from src.pipeline import BoundaryPipeline

logger = logging.getLogger(__name__)

SWEEP_FACTORS = (0.5, 1.0, 1.5)
SWEEP_KINDS = ("straight", "intersection")


def loss_trace_path(model_path: PathLike) -> Path:
    """Where cmd_train writes the loss trace of a checkpoint."""
    model_path = Path(model_path)
    return model_path.with_name(model_path.stem + ".loss.csv")


def simulate_frames(kind: str, n_frames: int, seed: int, radar: Optional[RadarModel] = None) -> List[RadarFrame]:
    """Render n_frames consecutive frames of a fresh scenario."""
    if n_frames < 0:
        raise ValueError("n_frames must be >= 0")
    scenario = build_scenario(kind, seed, duration=max(n_frames - 1, 0) * FRAME_PERIOD)
    return render_sequence(scenario, radar, seed, n_frames)


def cmd_simulate(kind: str, n_frames: int, seed: int, out_path: PathLike,
                 radar: Optional[RadarModel] = None) -> List[RadarFrame]:
    """Write a labeled synthetic dataset; identical for identical (kind, n_frames, seed)."""
    frames = simulate_frames(kind, n_frames, seed, radar)
    write_dataset(frames, out_path)
    return frames


def cmd_train(data_path: PathLike, config: RunConfig, out_model: PathLike,
              no_distance_loss: bool = False, no_temporal: bool = False) -> Tuple[SegModel, List[float]]:
    """
    Train a model on a dataset; writes the checkpoint and its loss-trace CSV.

    Args:
        no_distance_loss: Train with lambda_dist = 0
        no_temporal: Train with default temporal features
    """
    if no_distance_loss:
        config = config.override("loss", lambda_dist=0.0)
    if no_temporal:
        config = config.override("train", use_temporal=False)
    frames = read_dataset(data_path)
    model = SegModel.initialize(config.model, seed=config.train.seed)
    model, trace = train(frames, model, config.train, config.loss, config.filter)

    save_checkpoint(model, out_model, arm=arm_flags(config.train, config.loss))
    text = io.StringIO()
    writer = csv.writer(text, lineterminator="\n")
    writer.writerow(["epoch", "loss"])
    writer.writerows([i + 1, repr(loss)] for i, loss in enumerate(trace))
    with atomic_output(loss_trace_path(out_model)) as handle:
        handle.write(text.getvalue())
    return model, trace


def read_loss_trace(path: PathLike) -> List[float]:
    with open(path, newline="", encoding="utf-8") as handle:
        return [float(row["loss"]) for row in csv.DictReader(handle)]


def _pipeline(model: SegModel, arm: Dict[str, Any], config: RunConfig, fit_curves: bool) -> BoundaryPipeline:
    return BoundaryPipeline(
        model,
        filter_cfg=config.filter,
        cluster_cfg=config.cluster,
        gpr_cfg=config.gpr,
        use_temporal=bool(arm.get("use_temporal", True)),
        fit_curves=fit_curves,
        seed=config.run.seed,
    )


def cmd_infer(data_path: PathLike, model_path: PathLike, out_path: PathLike, config: RunConfig) -> int:
    """
    Per-frame probabilities and curves as JSON Lines.

    Returns:
        Number of frames written
    """
    frames = read_dataset(data_path)
    model, arm = load_checkpoint(model_path)
    results = run_arm(_pipeline(model, arm, config, config.run.fit_curves), frames)
    with atomic_output(out_path) as handle:
        for result in results:
            handle.write(json.dumps(result.to_dict(), separators=(",", ":")))
            handle.write("\n")
    logger.info("wrote detections for %d frames to %s", len(results), out_path)
    return len(results)


def cmd_eval(data_path: PathLike, model_paths: Sequence[PathLike], report_dir: PathLike,
             config: RunConfig) -> EvalReport:
    """
    Evaluate one or more checkpoints (ablation arms) on a labeled dataset.

    Writes report.json, frames.csv, arms.csv, metrics.svg, topview.svg, and
    loss.svg when the checkpoints have loss traces beside them.
    """
    frames = read_dataset(data_path)
    if not frames:
        raise ValueError("cannot evaluate an empty dataset")
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)

    arm_rows, traces = {}, {}
    topview = None
    for model_path in model_paths:
        model, arm = load_checkpoint(model_path)
        name = str(arm.get("name", Path(model_path).stem))
        if name in arm_rows:
            name = f"{name}_{len(arm_rows)}"
        results = run_arm(_pipeline(model, arm, config, fit_curves=False), frames)
        arm_rows[name] = evaluate_probabilities(frames, [r.raw_probabilities for r in results], name)
        if topview is None:
            topview = (name, results[-1])
        trace_path = loss_trace_path(model_path)
        if trace_path.exists():
            traces[name] = read_loss_trace(trace_path)

    report = build_report(arm_rows)
    write_report(report, report_dir)
    plot_metrics(report, report_dir / "metrics.svg")
    name, result = topview
    curves: List[BoundaryCurve] = []
    if config.run.fit_curves:
        curves = fit_boundaries(result.detection.boundary_coords, config.cluster, config.gpr, config.run.seed)
    plot_topview(frames[-1], result.raw_probabilities, curves, report_dir / "topview.svg",
                 title=f"{name}, t = {frames[-1].timestamp:.1f} s")
    if traces:
        plot_loss(traces, report_dir / "loss.svg")
    return report


def filter_soundness(frames: List[RadarFrame], config: RunConfig) -> Dict[str, float]:
    """Fractions of boundary returns kept and of mover / overhead returns removed."""
    kept = {"boundary": [0, 0], "mover": [0, 0], "overhead": [0, 0]}
    for frame in frames:
        keep = filter_mask(frame, config.filter)
        for name, mask in (("boundary", frame.sources >= 0), ("mover", frame.sources == SOURCE_MOVER),
                           ("overhead", frame.sources == SOURCE_OVERHEAD)):
            kept[name][0] += int(np.sum(keep & mask))
            kept[name][1] += int(np.sum(mask))

    def fraction(count: List[int], removed: bool) -> float:
        if count[1] == 0:
            return 1.0
        share = count[0] / count[1]
        return 1.0 - share if removed else share

    return {
        "boundary_retained": fraction(kept["boundary"], False),
        "mover_removed": fraction(kept["mover"], True),
        "overhead_removed": fraction(kept["overhead"], True),
    }


def curve_rms_error(curve: BoundaryCurve, frame: RadarFrame, scenario: Scenario) -> float:
    """RMS distance of the curve's mean to the closest ground-truth boundary."""
    world = ego_to_world(np.column_stack([curve.mean_x, curve.y_grid]), frame.ego.pose)
    return min(
        float(np.sqrt(np.mean(distance_to_polyline(world, boundary.vertices) ** 2)))
        for boundary in scenario.boundaries
    )


def curve_checks(frames: List[RadarFrame], scenario: Scenario, config: RunConfig) -> Dict[str, float]:
    """Curve count, accuracy and purity when fitting the true boundary points."""
    two_curves, single_source, rms = 0, 0, []
    n_curves = 0
    for frame in frames:
        truth = frame.labels == 1
        curves = fit_boundaries(frame.points[truth, :2], config.cluster, config.gpr, config.run.seed)
        sources = frame.sources[truth]
        two_curves += int(len(curves) == 2)
        for curve in curves:
            n_curves += 1
            single_source += int(len(np.unique(sources[curve.members])) == 1)
            rms.append(curve_rms_error(curve, frame, scenario))
    return {
        "two_curve_fraction": two_curves / len(frames) if frames else 0.0,
        "single_source_fraction": single_source / n_curves if n_curves else 1.0,
        "max_rms_error": max(rms) if rms else 0.0,
    }


def cmd_sweep(out_path: PathLike, config: RunConfig, n_frames: int = 20,
              factors: Sequence[float] = SWEEP_FACTORS) -> Dict[str, Any]:
    """
    Rerun the filter and curve checks with the radar noise scaled by each factor.

    Returns:
        Summary written to out_path as JSON
    """
    seed = config.run.seed
    rows = []
    for factor in factors:
        radar = perturb_radar(config.radar, factor)
        row: Dict[str, Any] = {"factor": factor}
        for kind in SWEEP_KINDS:
            scenario = build_scenario(kind, seed, duration=max(n_frames - 1, 0) * FRAME_PERIOD)
            frames = render_sequence(scenario, radar, seed, n_frames)
            checks = filter_soundness(frames, config)
            checks.update(curve_checks(frames, scenario, config))
            row[kind] = checks
        straight, crossing = row["straight"], row["intersection"]
        row["passed"] = bool(
            straight["boundary_retained"] >= 0.95
            and straight["overhead_removed"] == 1.0
            and straight["two_curve_fraction"] >= 0.9
            and crossing["single_source_fraction"] == 1.0
        )
        logger.info("noise x%.2f: %s", factor, "pass" if row["passed"] else "FAIL")
        rows.append(row)
    summary = {"schema": 1, "seed": seed, "n_frames": n_frames, "rows": rows}
    with atomic_output(out_path) as handle:
        json.dump(summary, handle, indent=2)
        handle.write("\n")
    return summary
