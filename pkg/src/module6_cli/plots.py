"""
Report Figures

Standalone SVGs drawn with matplotlib's Agg backend (no display needed):
- topview: one frame's raw points, detected boundary points and fitted curves
- metrics: per-frame accuracy / chamfer / hausdorff traces for every arm
- loss: per-epoch training loss
SVG ids are salted with a constant and the date is omitted, so reruns write
identical files.
"""

from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.module1_core.radar_types import RadarFrame  # noqa: E402
from src.module2_sim.dataset_io import PathLike, atomic_output  # noqa: E402
from src.module5_curvefit.boundary_fitter import BoundaryCurve  # noqa: E402
from src.module6_cli.evaluation import EvalReport  # noqa: E402

_SVG_SETTINGS = {"svg.hashsalt": "road-boundary", "svg.fonttype": "none"}


def _save(fig, path: PathLike) -> None:
    with atomic_output(path) as handle:
        fig.savefig(handle, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_topview(frame: RadarFrame, probabilities: np.ndarray, curves: List[BoundaryCurve],
                 path: PathLike, title: str = "") -> None:
    """Bird's-eye view of one frame in ego coordinates."""
    with plt.rc_context(_SVG_SETTINGS):
        fig, ax = plt.subplots(figsize=(6, 8))
        xy = frame.points[:, :2]
        detected = np.asarray(probabilities) > 0.5
        ax.scatter(xy[~detected, 0], xy[~detected, 1], s=4, c="0.7", label="radar points")
        ax.scatter(xy[detected, 0], xy[detected, 1], s=8, c="tab:red", label="detected boundary")
        for curve in curves:
            ax.plot(curve.mean_x, curve.y_grid, c="tab:blue", lw=1.5)
            ax.fill_betweenx(curve.y_grid, curve.mean_x - curve.ci_half_width,
                             curve.mean_x + curve.ci_half_width, color="tab:blue", alpha=0.2)
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_title(title or f"t = {frame.timestamp:.1f} s")
        ax.legend(loc="upper right", fontsize="small")
        _save(fig, path)


def plot_metrics(report: EvalReport, path: PathLike) -> None:
    """Per-frame metric traces, one line per arm."""
    with plt.rc_context(_SVG_SETTINGS):
        fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)
        for summary in report.arms:
            rows = [f for f in report.frames if f.arm == summary.arm]
            index = np.arange(len(rows))
            axes[0].plot(index, [r.accuracy for r in rows], label=summary.arm)
            axes[1].plot(index, [np.nan if r.chamfer is None else r.chamfer for r in rows], label=summary.arm)
            axes[2].plot(index, [np.nan if r.hausdorff is None else r.hausdorff for r in rows], label=summary.arm)
        axes[0].set_ylabel("accuracy")
        axes[1].set_ylabel("chamfer (m)")
        axes[2].set_ylabel("hausdorff (m)")
        axes[2].set_xlabel("frame")
        axes[0].legend(fontsize="small")
        _save(fig, path)


def plot_loss(traces: Dict[str, Sequence[float]], path: PathLike) -> None:
    """Mean loss per epoch, one line per trace."""
    with plt.rc_context(_SVG_SETTINGS):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, trace in traces.items():
            ax.plot(np.arange(1, len(trace) + 1), trace, marker="o", ms=3, label=name)
        ax.set_xlabel("epoch")
        ax.set_ylabel("mean loss")
        ax.legend(fontsize="small")
        _save(fig, path)
