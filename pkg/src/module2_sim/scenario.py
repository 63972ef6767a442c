"""
Synthetic Driving Scenarios

A Scenario is the ground-truth world the radar renderer samples from:
boundary polylines in world coordinates, the ego trajectory along the road
centerline, moving vehicles, overhead structures and a ghost-point rate.

Scenario kinds:
- "straight": two parallel boundaries at x = +-4 m
- "curved": constant-curvature road, boundaries at +-4 m from the centerline
- "fork": left boundary plus a right boundary that peels off into a branch,
  and the main road's right edge resuming after the gore (three curves)
- "intersection": +-4 m boundaries interrupted by crossing roads (gaps of 8-12 m,
  or a fixed `junction_gap`)
- "urban": intersection layout with outer fences, more traffic and ghosts

Input: kind, seed
Output: Scenario (deterministic for a fixed kind and seed)
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import math

import numpy as np

from src.module1_core.radar_types import EgoPose, EgoState
from src.seeding import SIM_STREAM, substream

SCENARIO_KINDS = ("straight", "curved", "fork", "intersection", "urban")

FRAME_PERIOD = 0.1  # s, 10 Hz radar
ROAD_HALF_WIDTH = 4.0
CENTERLINE_STEP = 0.5  # m between centerline samples
PATH_BACKOFF = 10.0  # m of road generated behind the start pose
MIN_JUNCTION_GAP = 8.0
OVERHEAD_HEIGHT = 5.5


@dataclass
class Boundary:
    """A static road boundary: world-frame polyline and reflector height."""
    vertices: np.ndarray  # (k, 2), k >= 2
    height: float  # m, in [0.2, 1.2]


@dataclass
class Mover:
    """A vehicle driving along a lane path at constant speed."""
    path: np.ndarray  # (k, 2) world polyline
    s0: float  # arc length at t = 0
    speed: float  # signed m/s along the path
    extent: Tuple[float, float] = (4.5, 1.8)  # length, width

    def state_at(self, t: float) -> Optional[Tuple[np.ndarray, np.ndarray, float]]:
        """
        Position, world velocity and heading at time t, or None if the mover
        has left its path.
        """
        s = self.s0 + self.speed * t
        lengths = polyline_arclength(self.path)
        if s < 0.0 or s > lengths[-1]:
            return None
        position, tangent = point_along(self.path, s, lengths)
        heading = math.atan2(-tangent[0], tangent[1])
        return position, self.speed * tangent, heading


@dataclass
class Scenario:
    """
    Ground-truth world.

    ego_path / ego_curvature describe the centerline the ego follows at
    ego_speed; ego_trajectory is the resulting EgoState sequence at 10 Hz.
    """
    kind: str
    seed: int
    boundaries: List[Boundary]
    ego_path: np.ndarray  # (k, 2) centerline samples
    ego_heading: np.ndarray  # (k,) heading per centerline sample
    ego_curvature: np.ndarray  # (k,) curvature per centerline sample
    ego_speed: float
    ego_trajectory: List[Tuple[float, EgoState]] = field(default_factory=list)
    movers: List[Mover] = field(default_factory=list)
    overheads: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    ghost_rate: float = 4.0
    junction_spans: List[Tuple[float, float]] = field(default_factory=list)  # (start, stop) arc lengths

    @property
    def duration(self) -> float:
        return self.ego_trajectory[-1][0] if self.ego_trajectory else 0.0

    def ego_state_at(self, t: float) -> EgoState:
        """
        Ego state at time t along the centerline.

        Raises:
            ValueError: if t is outside the trajectory span
        """
        if not self.ego_trajectory or t < -1e-9 or t > self.duration + 1e-9:
            raise ValueError(f"time {t} outside trajectory span [0, {self.duration}]")
        return self._state_on_path(t)

    def _state_on_path(self, t: float) -> EgoState:
        s = PATH_BACKOFF + self.ego_speed * t
        arc = np.arange(len(self.ego_path)) * CENTERLINE_STEP
        x = float(np.interp(s, arc, self.ego_path[:, 0]))
        y = float(np.interp(s, arc, self.ego_path[:, 1]))
        yaw = float(np.interp(s, arc, self.ego_heading))
        kappa = float(np.interp(s, arc, self.ego_curvature))
        return EgoState(EgoPose(x, y, yaw), self.ego_speed, self.ego_speed * kappa)

    def to_dict(self) -> Dict[str, Any]:
        """Plain-data form, used for determinism checks and debugging dumps."""
        return {
            "kind": self.kind,
            "seed": self.seed,
            "boundaries": [
                {"vertices": b.vertices.tolist(), "height": b.height} for b in self.boundaries
            ],
            "ego_speed": self.ego_speed,
            "ego_trajectory": [
                [t, s.pose.x_world, s.pose.y_world, s.pose.yaw, s.speed, s.yaw_rate]
                for t, s in self.ego_trajectory
            ],
            "movers": [
                {"path": m.path.tolist(), "s0": m.s0, "speed": m.speed, "extent": list(m.extent)}
                for m in self.movers
            ],
            "overheads": self.overheads.tolist(),
            "ghost_rate": self.ghost_rate,
            "junction_spans": [list(span) for span in self.junction_spans],
        }


# --- Polyline helpers ---

def polyline_arclength(vertices: np.ndarray) -> np.ndarray:
    """Cumulative arc length at each vertex (starts at 0)."""
    seg = np.linalg.norm(np.diff(vertices, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def point_along(vertices: np.ndarray, s: float,
                lengths: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Point and unit tangent at arc length s (clamped to the polyline)."""
    if lengths is None:
        lengths = polyline_arclength(vertices)
    s = min(max(s, 0.0), lengths[-1])
    i = int(np.searchsorted(lengths, s, side="right")) - 1
    i = min(max(i, 0), len(vertices) - 2)
    seg = vertices[i + 1] - vertices[i]
    seg_len = lengths[i + 1] - lengths[i]
    frac = 0.0 if seg_len == 0 else (s - lengths[i]) / seg_len
    tangent = seg / seg_len if seg_len > 0 else np.array([0.0, 1.0])
    return vertices[i] + frac * seg, tangent


def resample_polyline(vertices: np.ndarray, spacing: float) -> np.ndarray:
    """Points every `spacing` meters along the polyline, endpoints included."""
    lengths = polyline_arclength(vertices)
    stations = np.arange(0.0, lengths[-1] + 1e-9, spacing)
    x = np.interp(stations, lengths, vertices[:, 0])
    y = np.interp(stations, lengths, vertices[:, 1])
    return np.column_stack([x, y])


def distance_to_polyline(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """
    Ground-plane distance from each point to the polyline.

    Args:
        points: (n, >=2) positions; only x, y are used
        vertices: (k, 2) polyline

    Returns:
        (n,) distances
    """
    p = np.atleast_2d(points)[:, :2]
    a = vertices[:-1]
    ab = vertices[1:] - a
    denom = np.sum(ab ** 2, axis=1)
    denom = np.where(denom == 0, 1.0, denom)
    ap = p[:, None, :] - a[None, :, :]
    t = np.clip(np.sum(ap * ab[None, :, :], axis=2) / denom[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.min(np.linalg.norm(p[:, None, :] - closest, axis=2), axis=1)


# --- Centerline construction ---

def _centerline(length: float, curvature: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Integrate a centerline that runs straight for PATH_BACKOFF meters, passes
    the origin heading along world +y, then follows `curvature`.
    """
    n = int(math.ceil((length + PATH_BACKOFF) / CENTERLINE_STEP)) + 1
    s = np.arange(n) * CENTERLINE_STEP - PATH_BACKOFF
    kappa = np.where(s < 0.0, 0.0, curvature)
    heading = np.concatenate([[0.0], np.cumsum(kappa[:-1] * CENTERLINE_STEP)])
    # Midpoint heading keeps the integrated arc on the true circle to O(step^3)
    mid = heading[:-1] + 0.5 * kappa[:-1] * CENTERLINE_STEP
    dx = -np.sin(mid) * CENTERLINE_STEP
    dy = np.cos(mid) * CENTERLINE_STEP
    xy = np.column_stack([np.concatenate([[0.0], np.cumsum(dx)]),
                          np.concatenate([[0.0], np.cumsum(dy)])])
    xy[:, 1] -= PATH_BACKOFF
    return xy, heading, kappa


def _offset(path: np.ndarray, heading: np.ndarray, lateral) -> np.ndarray:
    """Shift a centerline sideways; positive lateral = right of travel (scalar or per sample)."""
    right = np.column_stack([np.cos(heading), np.sin(heading)])
    lateral = np.asarray(lateral, dtype=float)
    if lateral.ndim:
        lateral = lateral[:, None]
    return path + lateral * right


def _slice(path: np.ndarray, start: float, stop: float) -> np.ndarray:
    """Centerline-aligned samples with arc length (from the path start) in [start, stop]."""
    arc = np.arange(len(path)) * CENTERLINE_STEP
    return path[(arc >= start) & (arc <= stop)]


def _junction_spans(rng: np.random.Generator, length: float,
                    junction_gap: Optional[float] = None) -> List[Tuple[float, float]]:
    """Crossing-road gaps along the path: (start, stop) arc lengths."""
    spans = []
    s = PATH_BACKOFF + rng.uniform(35.0, 55.0)
    while s < length:
        gap = rng.uniform(MIN_JUNCTION_GAP, 12.0)
        if junction_gap is not None:
            gap = junction_gap
        spans.append((float(s), float(s + gap)))
        s += gap + rng.uniform(60.0, 90.0)
    return spans


def _gapped(path: np.ndarray, heading: np.ndarray, lateral: float,
            spans: List[Tuple[float, float]], total: float) -> List[np.ndarray]:
    """Boundary pieces at `lateral` with the junction spans removed."""
    edge = _offset(path, heading, lateral)
    pieces, start = [], 0.0
    for a, b in spans:
        piece = _slice(edge, start, a)
        if len(piece) >= 2:
            pieces.append(piece)
        start = b
    tail = _slice(edge, start, total)
    if len(tail) >= 2:
        pieces.append(tail)
    return pieces


def _traffic(rng: np.random.Generator, path: np.ndarray, heading: np.ndarray,
             ego_speed: float, count: int) -> List[Mover]:
    """Alternate oncoming (left lane) and faster same-direction (right lane) vehicles."""
    movers = []
    for i in range(count):
        if i % 2 == 0:
            lane = _offset(path, heading, -2.0)[::-1].copy()
            speed = rng.uniform(8.0, 16.0)
        else:
            lane = _offset(path, heading, 2.0)
            speed = ego_speed + rng.uniform(3.0, 8.0)
        total = polyline_arclength(lane)[-1]
        s0 = rng.uniform(0.2 * total, 0.8 * total)
        movers.append(Mover(path=lane, s0=float(s0), speed=float(speed)))
    return movers


def _overpasses(rng: np.random.Generator, path: np.ndarray, heading: np.ndarray,
                count: int) -> np.ndarray:
    """Rows of reflectors spanning the road well above vehicle height."""
    rows = []
    for _ in range(count):
        i = int(rng.integers(int(30 / CENTERLINE_STEP), len(path)))
        right = np.array([math.cos(heading[i]), math.sin(heading[i])])
        for lateral in np.arange(-8.0, 8.01, 1.0):
            x, y = path[i] + lateral * right
            rows.append([x, y, OVERHEAD_HEIGHT + rng.uniform(0.0, 1.0)])
    return np.array(rows).reshape(-1, 3)


def build_scenario(kind: str, seed: int, duration: float = 20.0,
                   junction_gap: Optional[float] = None) -> Scenario:
    """
    Build a deterministic scenario.

    Args:
        kind: One of SCENARIO_KINDS
        seed: RNG seed
        duration: Span of the ego trajectory in seconds
        junction_gap: Fixed width (m) of every crossing-road gap; drawn in
            [MIN_JUNCTION_GAP, 12] when None. Used by intersection and urban.

    Returns:
        Scenario

    Raises:
        ValueError: for an unknown kind or a non-positive junction_gap
    """
    if kind not in SCENARIO_KINDS:
        raise ValueError(f"unknown scenario kind '{kind}', expected one of {SCENARIO_KINDS}")
    if junction_gap is not None and junction_gap <= 0:
        raise ValueError("junction_gap must be > 0")
    rng = substream(seed, SIM_STREAM, SCENARIO_KINDS.index(kind))

    ego_speed = float(rng.uniform(5.0, 10.0) if kind == "urban" else rng.uniform(8.0, 14.0))
    length = ego_speed * duration + 120.0
    curvature = 0.0
    if kind == "curved":
        curvature = float(rng.choice([-1.0, 1.0]) / rng.uniform(150.0, 400.0))
    path, heading, kappa = _centerline(length, curvature)
    total = PATH_BACKOFF + length

    pieces: List[np.ndarray] = []
    spans: List[Tuple[float, float]] = []
    if kind in ("straight", "curved"):
        pieces = [_offset(path, heading, -ROAD_HALF_WIDTH), _offset(path, heading, ROAD_HALF_WIDTH)]
    elif kind == "fork":
        fork_s = PATH_BACKOFF + rng.uniform(40.0, 60.0)
        arc = np.arange(len(path)) * CENTERLINE_STEP
        spread = np.where(arc > fork_s, 0.03 * (arc - fork_s) ** 2, 0.0)
        branch = _offset(path, heading, ROAD_HALF_WIDTH + spread)
        pieces = [
            _offset(path, heading, -ROAD_HALF_WIDTH),
            _slice(branch, 0.0, fork_s + 30.0),
            _slice(_offset(path, heading, ROAD_HALF_WIDTH), fork_s + 12.0, total),
        ]
    else:
        spans = _junction_spans(rng, total, junction_gap)
        laterals = [-ROAD_HALF_WIDTH, ROAD_HALF_WIDTH]
        if kind == "urban":
            laterals += [-9.0, 9.0]
        for lateral in laterals:
            pieces.extend(_gapped(path, heading, lateral, spans, total))
    boundaries = [Boundary(piece, float(rng.uniform(0.4, 1.2))) for piece in pieces]

    mover_count = {"urban": 6, "intersection": 3}.get(kind, 2)
    movers = _traffic(rng, path, heading, ego_speed, mover_count)
    overheads = _overpasses(rng, path, heading, 2 if kind in ("straight", "urban") else 1)
    ghost_rate = 8.0 if kind == "urban" else 4.0

    scenario = Scenario(
        kind=kind,
        seed=seed,
        boundaries=boundaries,
        ego_path=path,
        ego_heading=heading,
        ego_curvature=kappa,
        ego_speed=ego_speed,
        movers=movers,
        overheads=overheads,
        ghost_rate=ghost_rate,
        junction_spans=spans,
    )
    n_steps = int(round(duration / FRAME_PERIOD))
    for k in range(n_steps + 1):
        t = round(k * FRAME_PERIOD, 10)
        scenario.ego_trajectory.append((t, scenario._state_on_path(t)))
    return scenario
