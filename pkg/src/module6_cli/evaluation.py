"""
Evaluation

Point-wise segmentation scores and boundary-set distances, per frame and per
ablation arm. A raw point of the current frame counts as detected boundary
when it survives the filters and its probability exceeds 0.5. Distances use
ground-plane (x, y) coordinates of detected vs. true boundary points and are
only defined when both sets are non-empty; frames where either set is empty
are counted separately and left out of the medians.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional
import csv
import io
import json
import logging

import numpy as np

from src.module1_core.metrics import chamfer, hausdorff
from src.module1_core.radar_types import RadarFrame
from src.module2_sim.dataset_io import PathLike, atomic_output
from src.module3_preprocess.fusion import split_sequences
from src.module4_segnet.temporal import DETECTION_THRESHOLD
from src.pipeline import BoundaryPipeline, FrameResult

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1


@dataclass
class FrameMetrics:
    arm: str
    sequence: int
    timestamp: float
    tp: int
    fp: int
    tn: int
    fn: int
    n_detected: int
    n_true: int
    chamfer: Optional[float] = None
    hausdorff: Optional[float] = None

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 1.0


@dataclass
class ArmSummary:
    arm: str
    n_frames: int = 0
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    accuracy: float = 0.0
    median_chamfer: Optional[float] = None
    median_hausdorff: Optional[float] = None
    frames_with_distances: int = 0
    frames_without_detection: int = 0
    frames_without_truth: int = 0


@dataclass
class EvalReport:
    """Per-arm summaries plus every per-frame row."""
    arms: List[ArmSummary] = field(default_factory=list)
    frames: List[FrameMetrics] = field(default_factory=list)

    def arm(self, name: str) -> ArmSummary:
        for summary in self.arms:
            if summary.arm == name:
                return summary
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "arms": [asdict(a) for a in self.arms],
            "frames": [dict(asdict(f), accuracy=f.accuracy) for f in self.frames],
        }


def evaluate_frame(frame: RadarFrame, probabilities: np.ndarray, arm: str = "full",
                   sequence: int = 0) -> FrameMetrics:
    """
    Score one labeled frame.

    Args:
        probabilities: (n,) probability per raw point (0 for filtered points)
    """
    if frame.labels is None:
        raise ValueError("evaluation needs labeled frames")
    predicted = np.asarray(probabilities) > DETECTION_THRESHOLD
    truth = frame.labels == 1
    detected_xy = frame.points[predicted, :2]
    true_xy = frame.points[truth, :2]
    metrics = FrameMetrics(
        arm=arm,
        sequence=sequence,
        timestamp=frame.timestamp,
        tp=int(np.sum(predicted & truth)),
        fp=int(np.sum(predicted & ~truth)),
        tn=int(np.sum(~predicted & ~truth)),
        fn=int(np.sum(~predicted & truth)),
        n_detected=len(detected_xy),
        n_true=len(true_xy),
    )
    if len(detected_xy) and len(true_xy):
        metrics.chamfer = chamfer(detected_xy, true_xy)
        metrics.hausdorff = hausdorff(detected_xy, true_xy)
    return metrics


def summarize_arm(arm: str, rows: List[FrameMetrics]) -> ArmSummary:
    """Aggregate confusion counts and distance medians of one arm."""
    summary = ArmSummary(arm=arm, n_frames=len(rows))
    for row in rows:
        summary.tp += row.tp
        summary.fp += row.fp
        summary.tn += row.tn
        summary.fn += row.fn
        if row.n_detected == 0:
            summary.frames_without_detection += 1
        if row.n_true == 0:
            summary.frames_without_truth += 1
    total = summary.tp + summary.fp + summary.tn + summary.fn
    summary.accuracy = (summary.tp + summary.tn) / total if total else 1.0
    distances = [r for r in rows if r.chamfer is not None]
    summary.frames_with_distances = len(distances)
    if distances:
        summary.median_chamfer = float(np.median([r.chamfer for r in distances]))
        summary.median_hausdorff = float(np.median([r.hausdorff for r in distances]))
    return summary


def evaluate_probabilities(frames: List[RadarFrame], probabilities: List[np.ndarray],
                           arm: str = "full") -> List[FrameMetrics]:
    """Score precomputed per-frame probabilities (any detector)."""
    sequence_of = {}
    for s, seq in enumerate(split_sequences(frames)):
        for frame in seq:
            sequence_of[id(frame)] = s
    return [evaluate_frame(f, p, arm, sequence_of[id(f)]) for f, p in zip(frames, probabilities)]


def run_arm(pipeline: BoundaryPipeline, frames: List[RadarFrame]) -> List[FrameResult]:
    """Run a pipeline over the frames, resetting it at every sequence start."""
    results = []
    for seq in split_sequences(frames):
        pipeline.reset()
        results.extend(pipeline.process_frame(frame) for frame in seq)
    return results


def build_report(arm_rows: Dict[str, List[FrameMetrics]]) -> EvalReport:
    """Report over arms, in the given arm order."""
    report = EvalReport()
    for arm, rows in arm_rows.items():
        report.arms.append(summarize_arm(arm, rows))
        report.frames.extend(rows)
        summary = report.arms[-1]
        logger.info("arm %s: accuracy %.4f, median chamfer %s, median hausdorff %s",
                    arm, summary.accuracy, summary.median_chamfer, summary.median_hausdorff)
    return report


def _csv_text(header: List[str], rows: List[List[Any]]) -> str:
    text = io.StringIO()
    writer = csv.writer(text, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return text.getvalue()


def frames_csv(report: EvalReport) -> str:
    header = ["arm", "sequence", "timestamp", "tp", "fp", "tn", "fn", "accuracy",
              "n_detected", "n_true", "chamfer", "hausdorff"]
    rows = [
        [f.arm, f.sequence, repr(f.timestamp), f.tp, f.fp, f.tn, f.fn, repr(f.accuracy),
         f.n_detected, f.n_true,
         "" if f.chamfer is None else repr(f.chamfer),
         "" if f.hausdorff is None else repr(f.hausdorff)]
        for f in report.frames
    ]
    return _csv_text(header, rows)


def arms_csv(report: EvalReport) -> str:
    header = list(asdict(ArmSummary(arm="")).keys())
    rows = [["" if v is None else v for v in asdict(a).values()] for a in report.arms]
    return _csv_text(header, rows)


def write_report(report: EvalReport, report_dir: PathLike) -> Dict[str, Path]:
    """
    Write report.json, frames.csv and arms.csv into report_dir.

    Returns:
        Mapping of output name to path
    """
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    outputs = {
        "report": (report_dir / "report.json", json.dumps(report.to_dict(), indent=2) + "\n"),
        "frames": (report_dir / "frames.csv", frames_csv(report)),
        "arms": (report_dir / "arms.csv", arms_csv(report)),
    }
    for path, text in outputs.values():
        with atomic_output(path) as handle:
            handle.write(text)
    return {name: path for name, (path, _) in outputs.items()}


def read_frames_csv(path: PathLike) -> List[Dict[str, str]]:
    """Rows of a frames.csv as dicts of strings."""
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
