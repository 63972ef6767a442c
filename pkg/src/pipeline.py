"""
Boundary Detection Pipeline

Per-frame loop that coordinates the modules:
1. Preprocess: physical-constraint filters and multi-frame fusion (Module 3)
2. Segment: deviation features and point-wise probabilities (Module 4)
3. Fit: clustering and GP curves over detected boundary points (Module 5)

The pipeline keeps the last two frames and the last detection between calls;
a timestamp jump starts a new sequence.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import logging

import numpy as np

from src.module1_core.radar_types import RadarFrame
from src.module2_sim.scenario import FRAME_PERIOD
from src.module3_preprocess.filters import FilterConfig
from src.module4_segnet.model import SegModel
from src.module4_segnet.temporal import Detection, infer_frame
from src.module5_curvefit.boundary_fitter import BoundaryCurve, fit_boundaries
from src.module5_curvefit.clustering import ClusterConfig
from src.module5_curvefit.gaussian_process import GPRConfig

logger = logging.getLogger(__name__)


@dataclass
class FrameResult:
    """Everything produced for one frame."""
    timestamp: float
    detection: Detection
    curves: List[BoundaryCurve] = field(default_factory=list)
    raw_probabilities: Optional[np.ndarray] = None
    curve_error: Optional[str] = None  # set when the curve-fitting stage failed

    @property
    def raw_labels(self) -> np.ndarray:
        """Predicted 0/1 label of each raw point of the frame."""
        return (self.raw_probabilities > 0.5).astype(np.int64)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.timestamp,
            "probabilities": self.raw_probabilities.tolist(),
            "n_boundary_points": int(len(self.detection.boundary_coords)),
            "curves": [curve.to_dict() for curve in self.curves],
            "curve_error": self.curve_error,
        }


class BoundaryPipeline:
    """
    Streaming road-boundary detector.

    Runs the three-stage cycle for each incoming frame:
    - Preprocess: filter and fuse with the two previous frames
    - Segment: score fused points using last frame's detection
    - Fit: group detected points into boundaries and fit curves
    """

    def __init__(self, model: SegModel, filter_cfg: Optional[FilterConfig] = None,
                 cluster_cfg: Optional[ClusterConfig] = None, gpr_cfg: Optional[GPRConfig] = None,
                 use_temporal: bool = True, fit_curves: bool = True, seed: int = 0):
        """
        Args:
            model: Trained segmentation network
            use_temporal: Feed deviation features from the previous detection
            fit_curves: Run the curve-fitting stage
            seed: Root seed for curve-fit subsampling
        """
        self.model = model
        self.filter_cfg = filter_cfg or FilterConfig()
        self.cluster_cfg = cluster_cfg or ClusterConfig()
        self.gpr_cfg = gpr_cfg or GPRConfig()
        self.use_temporal = use_temporal
        self.fit_curves = fit_curves
        self.seed = seed
        self.reset()

    def reset(self) -> None:
        """Forget frame history (start of a new sequence)."""
        self.history: List[RadarFrame] = []
        self.last_detection: Optional[Detection] = None

    def _continues_sequence(self, frame: RadarFrame) -> bool:
        if not self.history:
            return True
        step = frame.timestamp - self.history[-1].timestamp
        return abs(step - FRAME_PERIOD) <= 0.5 * FRAME_PERIOD

    def process_frame(self, frame: RadarFrame) -> FrameResult:
        """
        Run one frame through all stages.

        Returns:
            FrameResult with the detection, curves and per-raw-point probabilities;
            a curve-fitting failure leaves no curves and sets curve_error
        """
        if not self._continues_sequence(frame):
            logger.debug("timestamp jump at t=%.2f, starting a new sequence", frame.timestamp)
            self.reset()

        # Stages 1-2: preprocess and segment
        prev1 = self.history[-1] if len(self.history) >= 1 else None
        prev2 = self.history[-2] if len(self.history) >= 2 else None
        detection = infer_frame(self.model, frame, prev1, prev2, self.last_detection,
                                self.filter_cfg, self.use_temporal)
        result = FrameResult(
            timestamp=frame.timestamp,
            detection=detection,
            raw_probabilities=detection.current_frame_probabilities(len(frame)),
        )

        # Stage 3: curve fitting
        if self.fit_curves:
            try:
                result.curves = fit_boundaries(detection.boundary_coords, self.cluster_cfg, self.gpr_cfg, self.seed)
            except ValueError as exc:
                logger.warning("curve fit failed at t=%.2f: %s", frame.timestamp, exc)
                result.curve_error = str(exc)

        self.history = (self.history + [frame])[-2:]
        self.last_detection = detection
        return result

    def process_frames(self, frames: List[RadarFrame]) -> List[FrameResult]:
        """Process frames in file order; returns one result per frame."""
        return [self.process_frame(frame) for frame in frames]
