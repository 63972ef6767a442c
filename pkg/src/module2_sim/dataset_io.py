"""
Dataset Serialization

JSON Lines, one object per frame, field order fixed:
    {"t": ..., "ego": {"x", "y", "yaw", "speed", "yaw_rate"},
     "points": [[x, y, z, doppler, snr, range], ...], "labels": [0|1, ...]}
"labels" is omitted for unlabeled frames. A ".jsonl.gz" suffix selects the
gzip-compressed variant (written with mtime 0 so output bytes are stable).

Writes go to a temporary file next to the target and are renamed into place,
so a failed write never leaves a partial file behind.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any, Dict, Iterator, List, Union
import gzip
import io
import json
import logging
import os
import tempfile

import numpy as np

from src.module1_core.radar_types import EgoPose, EgoState, RadarFrame

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


class DatasetFormatError(ValueError):
    """A dataset line could not be parsed."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


def _is_gzip(path: PathLike) -> bool:
    return str(path).endswith(".gz")


@contextmanager
def atomic_output(path: PathLike, binary: bool = False) -> Iterator[IO[Any]]:
    """
    Open a temporary file beside `path`; rename it over `path` on success.

    Raises:
        OSError: if the directory is not writable
    """
    target = Path(path)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        if binary:
            handle = os.fdopen(fd, "wb")
        else:
            handle = os.fdopen(fd, "w", encoding="utf-8", newline="\n")
        with handle:
            yield handle
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def frame_to_dict(frame: RadarFrame) -> Dict[str, Any]:
    """Serialize one frame in the dataset's field order."""
    pose = frame.ego.pose
    record: Dict[str, Any] = {
        "t": frame.timestamp,
        "ego": {
            "x": pose.x_world,
            "y": pose.y_world,
            "yaw": pose.yaw,
            "speed": frame.ego.speed,
            "yaw_rate": frame.ego.yaw_rate,
        },
        "points": frame.points.tolist(),
    }
    if frame.labels is not None:
        record["labels"] = frame.labels.tolist()
    return record


def frame_from_dict(record: Dict[str, Any]) -> RadarFrame:
    """Inverse of frame_to_dict."""
    ego = record["ego"]
    state = EgoState(EgoPose(float(ego["x"]), float(ego["y"]), float(ego["yaw"])),
                     float(ego["speed"]), float(ego["yaw_rate"]))
    points = np.asarray(record["points"], dtype=float).reshape(-1, 6)
    labels = record.get("labels")
    if labels is not None and any(value not in (0, 1) for value in labels):
        raise ValueError("labels must be 0 or 1")
    return RadarFrame(
        timestamp=float(record["t"]),
        ego=state,
        points=points,
        labels=None if labels is None else np.asarray(labels, dtype=np.int64),
    )


def write_dataset(frames: List[RadarFrame], path: PathLike) -> None:
    """
    Write frames as JSON Lines (gzip when the path ends in .gz).

    Args:
        frames: Frames to write, in order
        path: Output file
    """
    text = io.StringIO()
    for frame in frames:
        text.write(json.dumps(frame_to_dict(frame), separators=(",", ":")))
        text.write("\n")
    payload = text.getvalue().encode("utf-8")
    with atomic_output(path, binary=True) as handle:
        if _is_gzip(path):
            with gzip.GzipFile(fileobj=handle, mode="wb", mtime=0, filename="") as gz:
                gz.write(payload)
        else:
            handle.write(payload)
    logger.info("wrote %d frames to %s", len(frames), path)


def read_dataset(path: PathLike) -> List[RadarFrame]:
    """
    Read a dataset written by write_dataset.

    Raises:
        DatasetFormatError: naming the first malformed line
    """
    opener = gzip.open if _is_gzip(path) else open
    frames = []
    with opener(path, "rt", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                frames.append(frame_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DatasetFormatError(line_number, str(exc)) from exc
    logger.info("read %d frames from %s", len(frames), path)
    return frames
