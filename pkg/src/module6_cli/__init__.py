"""
Module 6: Command Line, Evaluation and Reports

Ties the pipeline together: dataset simulation, training, inference,
evaluation of ablation arms with CSV/JSON/SVG reports, and the radar-noise
sensitivity sweep.

Topics: Run configuration, segmentation metrics, report generation

Public API:
- RunConfig, load_run_config: configuration
- evaluate_frame, summarize_arm, EvalReport, write_report: evaluation
- plot_topview, plot_metrics, plot_loss: figures
- cmd_simulate, cmd_train, cmd_infer, cmd_eval, cmd_sweep: commands
"""

from src.module6_cli.run_config import RunConfig, RunSettings, describe_defaults, load_run_config
from src.module6_cli.evaluation import (
    REPORT_SCHEMA,
    ArmSummary,
    EvalReport,
    FrameMetrics,
    build_report,
    evaluate_frame,
    evaluate_probabilities,
    read_frames_csv,
    run_arm,
    summarize_arm,
    write_report,
)
from src.module6_cli.plots import plot_loss, plot_metrics, plot_topview
from src.module6_cli.commands import (
    cmd_eval,
    cmd_infer,
    cmd_simulate,
    cmd_sweep,
    cmd_train,
    curve_checks,
    filter_soundness,
    loss_trace_path,
    read_loss_trace,
    simulate_frames,
)

__all__ = [
    "RunConfig",
    "RunSettings",
    "describe_defaults",
    "load_run_config",
    "REPORT_SCHEMA",
    "ArmSummary",
    "EvalReport",
    "FrameMetrics",
    "build_report",
    "evaluate_frame",
    "evaluate_probabilities",
    "read_frames_csv",
    "run_arm",
    "summarize_arm",
    "write_report",
    "plot_loss",
    "plot_metrics",
    "plot_topview",
    "cmd_eval",
    "cmd_infer",
    "cmd_simulate",
    "cmd_sweep",
    "cmd_train",
    "curve_checks",
    "filter_soundness",
    "loss_trace_path",
    "read_loss_trace",
    "simulate_frames",
]
