"""
Module 2: Synthetic Radar Scenes

Generates labeled 4D radar frame sequences for straight, curved, forked,
intersection and urban roads, and reads/writes them as JSON Lines.

Topics: Scene simulation, sensor noise models, dataset serialization

Public API:
- Scenario, Boundary, Mover, build_scenario: ground-truth worlds
- RadarModel, render_frame, render_sequence, label_points: radar rendering
- write_dataset, read_dataset, DatasetFormatError: dataset files
"""

from src.module2_sim.scenario import (
    SCENARIO_KINDS,
    Boundary,
    Mover,
    Scenario,
    build_scenario,
    distance_to_polyline,
)
from src.module2_sim.renderer import (
    RadarModel,
    in_field_of_view,
    label_points,
    perturb_radar,
    SOURCE_GHOST,
    SOURCE_MOVER,
    SOURCE_OVERHEAD,
    render_frame,
    render_sequence,
    static_doppler,
)
from src.module2_sim.dataset_io import (
    DatasetFormatError,
    atomic_output,
    read_dataset,
    write_dataset,
)

__all__ = [
    "SCENARIO_KINDS",
    "Boundary",
    "Mover",
    "Scenario",
    "build_scenario",
    "distance_to_polyline",
    "RadarModel",
    "in_field_of_view",
    "label_points",
    "perturb_radar",
    "SOURCE_GHOST",
    "SOURCE_MOVER",
    "SOURCE_OVERHEAD",
    "render_frame",
    "render_sequence",
    "static_doppler",
    "DatasetFormatError",
    "atomic_output",
    "read_dataset",
    "write_dataset",
]
