"""
Radar Frame Rendering

Samples a labeled RadarFrame from a Scenario at time t:
- boundary reflectors every `boundary_sample_spacing` meters along each
  polyline, thinned by dropout and perturbed by position noise (label 1 when
  they stay within tau of their polyline)
- mover returns with Doppler = radial component of (v_object - v_ego)
- overhead returns (z > 3 m)
- Poisson ghost returns (at least one) uniform in the field of view with
  uniform Doppler

Doppler convention: positive = receding, radial direction taken in the
ground plane. A static point at (x, y) reads -speed * y / sqrt(x^2 + y^2).

Input: Scenario, time, RadarModel, RNG
Output: RadarFrame with labels and source tags
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple
import logging
import math

import numpy as np

from src.module1_core.geometry import ego_to_world, rotation_matrix, world_to_ego
from src.module1_core.radar_types import EgoState, RadarFrame
from src.module2_sim.scenario import FRAME_PERIOD, Scenario, distance_to_polyline, resample_polyline
from src.seeding import SIM_STREAM, as_generator, substream

logger = logging.getLogger(__name__)

DEFAULT_LABEL_TOLERANCE = 0.5  # m
GHOST_DOPPLER_LIMIT = 15.0  # m/s

# Source tags of non-boundary returns (boundary returns carry their polyline index)
SOURCE_GHOST = -1
SOURCE_MOVER = -2
SOURCE_OVERHEAD = -3

# SNR offsets by reflector type, added to the RadarModel base level
_SNR_OFFSET = {"boundary": 0.0, "mover": 5.0, "overhead": 3.0, "ghost": -12.0}


@dataclass
class RadarModel:
    """Sensor realism knobs. azimuth_fov is the half-angle from the +y axis."""
    max_range: float = 80.0
    min_range: float = 0.5
    azimuth_fov: float = math.radians(60.0)
    position_noise_sigma: float = 0.15
    vertical_noise_sigma: float = 0.3
    doppler_noise_sigma: float = 0.2
    snr_base_db: float = 35.0
    snr_range_loss_db_per_m: float = 0.25
    snr_noise_db: float = 1.5
    boundary_sample_spacing: float = 1.0
    dropout_prob: float = 0.3

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        for name in ("position_noise_sigma", "vertical_noise_sigma", "doppler_noise_sigma", "snr_noise_db"):
            if getattr(self, name) < 0:
                errors.append(f"{name} must be >= 0")
        if self.max_range <= 0:
            errors.append("max_range must be > 0")
        if not 0 < self.azimuth_fov <= math.pi:
            errors.append("azimuth_fov must be in (0, pi]")
        if self.boundary_sample_spacing <= 0:
            errors.append("boundary_sample_spacing must be > 0")
        if not 0 <= self.dropout_prob < 1:
            errors.append("dropout_prob must be in [0, 1)")
        return len(errors) == 0, errors

    @classmethod
    def noiseless(cls, dropout_prob: float = 0.0, **overrides) -> "RadarModel":
        """A model with every noise sigma at zero."""
        return cls(position_noise_sigma=0.0, vertical_noise_sigma=0.0, doppler_noise_sigma=0.0,
                   snr_noise_db=0.0, dropout_prob=dropout_prob, **overrides)


def perturb_radar(radar: RadarModel, factor: float) -> RadarModel:
    """Scale every noise sigma by `factor` (sensitivity sweep)."""
    return replace(
        radar,
        position_noise_sigma=radar.position_noise_sigma * factor,
        vertical_noise_sigma=radar.vertical_noise_sigma * factor,
        doppler_noise_sigma=radar.doppler_noise_sigma * factor,
    )


def static_doppler(xy: np.ndarray, speed: float) -> np.ndarray:
    """Doppler a static reflector at ego-frame (x, y) would show."""
    r = np.hypot(xy[:, 0], xy[:, 1])
    return -speed * xy[:, 1] / np.where(r > 0, r, 1.0)


class _Returns:
    """Accumulates rendered rows by reflector type."""

    def __init__(self):
        self.rows: List[np.ndarray] = []
        self.sources: List[np.ndarray] = []

    def add(self, points: np.ndarray, source: np.ndarray) -> None:
        if len(points):
            self.rows.append(points)
            self.sources.append(source)

    def stack(self) -> Tuple[np.ndarray, np.ndarray]:
        if not self.rows:
            return np.zeros((0, 6)), np.zeros(0, dtype=np.int64)
        return np.vstack(self.rows), np.concatenate(self.sources).astype(np.int64)


def _measure(true_xyz: np.ndarray, doppler: np.ndarray, kind: str, radar: RadarModel,
             rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Add measurement noise, gate to the field of view, attach SNR and range.

    Returns:
        (rows, keep_mask) where rows are POINT_COLUMNS rows of the kept points
    """
    n = len(true_xyz)
    noise = np.column_stack([
        rng.normal(0.0, 1.0, n) * radar.position_noise_sigma,
        rng.normal(0.0, 1.0, n) * radar.position_noise_sigma,
        rng.normal(0.0, 1.0, n) * radar.vertical_noise_sigma,
    ])
    xyz = true_xyz + noise
    measured_doppler = doppler + rng.normal(0.0, 1.0, n) * radar.doppler_noise_sigma
    rng_3d = np.linalg.norm(xyz, axis=1)
    snr = (radar.snr_base_db + _SNR_OFFSET[kind] - radar.snr_range_loss_db_per_m * rng_3d
           + rng.normal(0.0, 1.0, n) * radar.snr_noise_db)
    keep = in_field_of_view(xyz, radar)
    rows = np.column_stack([xyz, measured_doppler, np.maximum(snr, 0.0), rng_3d])
    return rows[keep], keep


def in_field_of_view(xyz: np.ndarray, radar: RadarModel) -> np.ndarray:
    """Ground-plane range and azimuth gate (azimuth measured from +y)."""
    r2d = np.hypot(xyz[:, 0], xyz[:, 1])
    azimuth = np.arctan2(xyz[:, 0], xyz[:, 1])
    return (r2d >= radar.min_range) & (r2d <= radar.max_range) & (np.abs(azimuth) <= radar.azimuth_fov)


def _coarse_gate(xy: np.ndarray, radar: RadarModel) -> np.ndarray:
    """Cheap pre-noise gate with a margin so noise cannot push points back in unseen."""
    margin = 5.0 * max(radar.position_noise_sigma, 1e-3)
    r2d = np.hypot(xy[:, 0], xy[:, 1])
    azimuth = np.arctan2(xy[:, 0], xy[:, 1])
    return (r2d <= radar.max_range + margin) & (np.abs(azimuth) <= radar.azimuth_fov + 0.1) & (xy[:, 1] > -margin)


def render_frame(scenario: Scenario, t: float, radar: Optional[RadarModel] = None,
                 rng=None, tau: float = DEFAULT_LABEL_TOLERANCE) -> RadarFrame:
    """
    Render one labeled radar frame.

    Args:
        scenario: Ground-truth world
        t: Time in seconds, within the scenario's trajectory span
        radar: Sensor model (defaults to RadarModel())
        rng: numpy Generator or int seed
        tau: Labeling tolerance in meters

    Returns:
        RadarFrame with labels and sources

    Raises:
        ValueError: if t is out of range
    """
    radar = radar or RadarModel()
    ok, errors = radar.validate()
    if not ok:
        raise ValueError("; ".join(errors))
    rng = as_generator(rng, SIM_STREAM)
    ego = scenario.ego_state_at(t)
    returns = _Returns()

    for b_index, boundary in enumerate(scenario.boundaries):
        reflectors = world_to_ego(resample_polyline(boundary.vertices, radar.boundary_sample_spacing),
                                  ego.pose)
        reflectors = reflectors[_coarse_gate(reflectors, radar)]
        reflectors = reflectors[rng.random(len(reflectors)) >= radar.dropout_prob]
        z = rng.uniform(0.2, boundary.height, len(reflectors))
        true_xyz = np.column_stack([reflectors, z])
        rows, _ = _measure(true_xyz, static_doppler(reflectors, ego.speed), "boundary", radar, rng)
        returns.add(rows, np.full(len(rows), b_index))

    returns.add(*_render_movers(scenario, t, ego, radar, rng))

    if len(scenario.overheads):
        overhead = world_to_ego(scenario.overheads, ego.pose)
        overhead = overhead[_coarse_gate(overhead[:, :2], radar)]
        rows, _ = _measure(overhead, static_doppler(overhead[:, :2], ego.speed), "overhead", radar, rng)
        returns.add(rows, np.full(len(rows), SOURCE_OVERHEAD))

    # floor of one ghost per frame
    n_ghosts = max(1, int(rng.poisson(scenario.ghost_rate)))
    if n_ghosts:
        r = rng.uniform(2.0, radar.max_range, n_ghosts)
        az = rng.uniform(-radar.azimuth_fov, radar.azimuth_fov, n_ghosts)
        ghost = np.column_stack([r * np.sin(az), r * np.cos(az), rng.uniform(-2.5, 4.0, n_ghosts)])
        doppler = rng.uniform(-GHOST_DOPPLER_LIMIT, GHOST_DOPPLER_LIMIT, n_ghosts)
        # Ghost positions are already uniform; only SNR and Doppler noise apply
        exact = replace(radar, position_noise_sigma=0.0, vertical_noise_sigma=0.0)
        rows, _ = _measure(ghost, doppler, "ghost", exact, rng)
        returns.add(rows, np.full(len(rows), SOURCE_GHOST))

    points, sources = returns.stack()
    order = rng.permutation(len(points))
    frame = RadarFrame(timestamp=float(t), ego=ego, points=points[order], sources=sources[order])
    frame.labels = label_points(frame, scenario, tau)
    logger.debug("rendered t=%.1f: %d points, %d boundary", t, len(frame), int(frame.labels.sum()))
    return frame


def _render_movers(scenario: Scenario, t: float, ego: EgoState, radar: RadarModel,
                   rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Returns from every mover currently on its path."""
    rows, sources = [], []
    ego_velocity = np.array([0.0, ego.speed])
    to_ego = rotation_matrix(ego.pose.yaw).T
    for mover in scenario.movers:
        state = mover.state_at(t)
        if state is None:
            continue
        position, velocity, heading = state
        length, width = mover.extent
        n = int(rng.integers(2, 7))
        body = np.column_stack([rng.uniform(-width / 2, width / 2, n), rng.uniform(-length / 2, length / 2, n)])
        world_xy = body @ rotation_matrix(heading).T + position
        xy = world_to_ego(world_xy, ego.pose)
        keep = _coarse_gate(xy, radar)
        if not np.any(keep):
            continue
        xy = xy[keep]
        relative = to_ego @ velocity - ego_velocity
        r = np.hypot(xy[:, 0], xy[:, 1])
        doppler = (xy @ relative) / np.where(r > 0, r, 1.0)
        true_xyz = np.column_stack([xy, rng.uniform(0.3, 1.5, len(xy))])
        measured, _ = _measure(true_xyz, doppler, "mover", radar, rng)
        rows.append(measured)
        sources.append(np.full(len(measured), SOURCE_MOVER))
    if not rows:
        return np.zeros((0, 6)), np.zeros(0, dtype=np.int64)
    return np.vstack(rows), np.concatenate(sources)


def label_points(frame: RadarFrame, scenario: Scenario, tau: float = DEFAULT_LABEL_TOLERANCE) -> np.ndarray:
    """
    Ground-truth boundary labels.

    A point is labeled 1 iff it came from a boundary reflector and, after
    noise, still lies within tau of its source polyline.

    Args:
        frame: Rendered frame carrying source tags
        scenario: World the frame was rendered from
        tau: Tolerance in meters (> 0)

    Returns:
        (n,) int array of 0/1
    """
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if frame.sources is None:
        raise ValueError("frame carries no source tags")
    labels = np.zeros(len(frame), dtype=np.int64)
    if not len(frame):
        return labels
    world = ego_to_world(frame.positions, frame.ego.pose)
    for b_index in np.unique(frame.sources[frame.sources >= 0]):
        members = np.nonzero(frame.sources == b_index)[0]
        dist = distance_to_polyline(world[members], scenario.boundaries[b_index].vertices)
        labels[members[dist <= tau]] = 1
    return labels


def render_sequence(scenario: Scenario, radar: Optional[RadarModel] = None, seed: int = 0,
                    n_frames: Optional[int] = None) -> List[RadarFrame]:
    """
    Render consecutive frames at 10 Hz, one RNG substream per frame index.

    Args:
        scenario: World to render
        radar: Sensor model
        seed: Root seed
        n_frames: Number of frames (default: the whole trajectory)

    Returns:
        List of RadarFrame in time order
    """
    available = len(scenario.ego_trajectory)
    n_frames = available if n_frames is None else n_frames
    if n_frames > available:
        raise ValueError(f"scenario holds {available} frames, {n_frames} requested")
    return [
        render_frame(scenario, round(k * FRAME_PERIOD, 10), radar, substream(seed, SIM_STREAM, k))
        for k in range(n_frames)
    ]
