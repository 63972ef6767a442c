"""
Unit tests for Module 3: Point Cloud Preprocessing

Tests the physical-constraint filters, frame fusion and flip augmentation.
"""

import math
import unittest

import numpy as np

from src.module1_core.geometry import world_to_ego
from src.module1_core.radar_types import EgoPose, EgoState, RadarFrame, RadarPoint
from src.module3_preprocess.filters import (
    FilterConfig,
    doppler_filter,
    expected_static_doppler,
    filter_frame,
    height_filter,
)
from src.module3_preprocess.fusion import COL, FEATURE_WIDTH, flip_augment, fuse_frames, split_sequences


def point_row(x, y, z, doppler=0.0, snr=20.0):
    return RadarPoint.from_position(x, y, z, doppler, snr).to_row()


def make_frame(t, rows, pose=EgoPose(0.0, 0.0, 0.0), speed=10.0, yaw_rate=0.0, labels=None):
    return RadarFrame(timestamp=t, ego=EgoState(pose, speed, yaw_rate),
                      points=np.array(rows, dtype=float).reshape(-1, 6), labels=labels)


class TestHeightFilter(unittest.TestCase):
    """Test cases for height_filter."""

    def test_examples(self):
        """Test overpass removal, boundary retention and the closed lower edge."""
        cfg = FilterConfig()
        points = np.array([point_row(1, 20, 3.5), point_row(4, 10, 0.4), point_row(-4, 8, -1.5),
                           point_row(2, 5, 3.0), point_row(2, 5, -1.6)])
        kept = height_filter(points, cfg)
        np.testing.assert_allclose(kept[:, 2], [0.4, -1.5, 3.0])

    def test_subset_in_order(self):
        """Test the output is an order-preserving subset of the input rows."""
        rng = np.random.default_rng(1)
        points = np.array([point_row(*xyz) for xyz in rng.uniform([-10, 1, -3], [10, 40, 6], (40, 3))])
        kept = height_filter(points, FilterConfig())
        idx = [int(np.nonzero(np.all(points == row, axis=1))[0][0]) for row in kept]
        self.assertEqual(idx, sorted(idx))
        self.assertTrue(np.all((kept[:, 2] >= -1.5) & (kept[:, 2] <= 3.0)))

    def test_invalid_config(self):
        """Test inverted height bands are rejected."""
        ok, errors = FilterConfig(z_max=-2.0).validate()
        self.assertFalse(ok)
        self.assertIn("z_max must be greater than z_min", errors)


class TestDopplerFilter(unittest.TestCase):
    """Test cases for expected_static_doppler and doppler_filter."""

    def test_expected_examples(self):
        """Test hand-computed static Doppler values."""
        self.assertAlmostEqual(expected_static_doppler((0, 20, 0), 10.0), -10.0)
        self.assertAlmostEqual(expected_static_doppler((20, 0, 0), 10.0), 0.0)
        self.assertAlmostEqual(expected_static_doppler((10, 10, 0), 10.0), -10.0 / math.sqrt(2), places=9)
        self.assertAlmostEqual(expected_static_doppler(RadarPoint.from_position(0, 5, 1, 0, 1), 4.0), -4.0)

    def test_degenerate_bearing(self):
        """Test x = y = 0 raises."""
        with self.assertRaisesRegex(ValueError, "degenerate bearing"):
            expected_static_doppler((0.0, 0.0, 1.0), 10.0)

    def test_filter_examples(self):
        """Test static points survive and the oncoming car is removed."""
        ego = EgoState(EgoPose(0, 0, 0), 10.0, 0.0)
        points = np.array([
            point_row(0, 20, 0.5, -10.0),   # static, deviation 0
            point_row(0, 30, 0.8, -25.0),   # oncoming car, deviation 15
            point_row(0, 20, 0.5, -9.0),    # deviation exactly 1
            point_row(0, 20, 0.5, -11.0),   # deviation exactly 1
            point_row(0, 20, 0.5, -11.5),   # deviation 1.5
            point_row(0, 0, 2.0, 7.0),      # degenerate bearing passes
        ])
        kept = doppler_filter(points, ego, FilterConfig())
        np.testing.assert_allclose(kept[:, 3], [-10.0, -9.0, -11.0, 7.0])

    def test_filter_frame_keeps_alignment(self):
        """Test labels stay aligned with surviving points."""
        frame = make_frame(0.0, [point_row(4, 10, 0.4, -10 * 10 / math.hypot(4, 10)),
                                 point_row(0, 30, 5.0, -10.0),
                                 point_row(-4, 12, 0.3, 3.0)],
                           labels=np.array([1, 0, 0]))
        out = filter_frame(frame, FilterConfig())
        self.assertEqual(len(out), 1)
        np.testing.assert_array_equal(out.labels, [1])
        np.testing.assert_allclose(out.points[0, :2], [4, 10])


class TestFuseFrames(unittest.TestCase):
    """Test cases for fuse_frames."""

    def setUp(self):
        self.rows = [point_row(4, 10, 0.5, -5.0), point_row(-4, 15, 0.6, -6.0)]

    def test_single_frame(self):
        """Test fusing only the current frame gives frame_index 0 rows."""
        cloud = fuse_frames(make_frame(0.0, self.rows))
        self.assertEqual(cloud.features.shape, (2, FEATURE_WIDTH))
        self.assertTrue(np.all(cloud.frame_index == 0))
        np.testing.assert_allclose(cloud.features[:, COL["prev_prob"]], 0.5)
        np.testing.assert_allclose(cloud.features[:, COL["dev_x"]:COL["dev_y"] + 1], 0.0)
        self.assertIsNone(cloud.labels)

    def test_stationary_identical_frames(self):
        """Test three identical stationary frames give three copies per point."""
        frames = [make_frame(t, self.rows, speed=0.0) for t in (0.0, 0.1, 0.2)]
        cloud = fuse_frames(frames[2], frames[1], frames[0])
        self.assertEqual(len(cloud), 6)
        for k in range(3):
            block = cloud.features[cloud.frame_index == k]
            np.testing.assert_allclose(block[:, :6], np.array(self.rows), atol=1e-12)
        np.testing.assert_array_equal(np.sort(cloud.frame_index), [0, 0, 1, 1, 2, 2])

    def test_motion_compensation(self):
        """Test compensated previous returns coincide with the current ones."""
        world = np.array([[4.0, 12.0, 0.5], [-4.0, 20.0, 0.7], [5.0, 30.0, 0.2]])
        frames = []
        for k in range(3):
            pose = EgoPose(0.3 * k, float(k), 0.02 * k)
            local = world_to_ego(world[:, :2], pose)
            rows = [point_row(x, y, z) for (x, y), z in zip(local, world[:, 2])]
            frames.append(make_frame(0.1 * k, rows, pose=pose, speed=10.0, labels=np.array([1, 1, 0])))
        cloud = fuse_frames(frames[2], frames[1], frames[0])
        current = cloud.positions[cloud.frame_index == 0]
        for k in (1, 2):
            np.testing.assert_allclose(cloud.positions[cloud.frame_index == k], current, atol=1e-9)
        np.testing.assert_array_equal(cloud.labels, [1, 1, 0] * 3)
        np.testing.assert_allclose(cloud.features[:, COL["ego_speed"]], 10.0)

    def test_source_doppler_kept(self):
        """Test doppler, snr and range come from the source frame."""
        prev = make_frame(0.0, [point_row(1, 9, 0.1, -3.0, 11.0)], pose=EgoPose(0, 0, 0))
        curr = make_frame(0.1, [point_row(1, 8, 0.1, -4.0, 12.0)], pose=EgoPose(0, 1, 0))
        cloud = fuse_frames(curr, prev)
        row = cloud.features[cloud.frame_index == 1][0]
        self.assertEqual(row[COL["doppler"]], -3.0)
        self.assertEqual(row[COL["snr"]], 11.0)
        self.assertAlmostEqual(row[COL["range"]], math.sqrt(1 + 81 + 0.01))

    def test_size_with_filter(self):
        """Test the fused size equals the sum of surviving points."""
        cfg = FilterConfig()
        prev = make_frame(0.0, self.rows + [point_row(0, 30, 5.5, -10.0)])
        curr = make_frame(0.1, self.rows + [point_row(0, 30, 0.5, 4.0)])
        cloud = fuse_frames(curr, prev, filter_cfg=cfg)
        expected = len(filter_frame(curr, cfg)) + len(filter_frame(prev, cfg))
        self.assertEqual(len(cloud), expected)
        np.testing.assert_array_equal(cloud.source_rows[cloud.frame_index == 0], [0, 1])

    def test_out_of_order(self):
        """Test non-increasing timestamps raise."""
        with self.assertRaises(ValueError):
            fuse_frames(make_frame(0.1, self.rows), make_frame(0.2, self.rows))
        with self.assertRaises(ValueError):
            fuse_frames(make_frame(0.2, self.rows), make_frame(0.1, self.rows), make_frame(0.1, self.rows))

    def test_empty_frames(self):
        """Test empty frames fuse into an empty cloud."""
        cloud = fuse_frames(make_frame(0.1, []), make_frame(0.0, []))
        self.assertEqual(cloud.features.shape, (0, FEATURE_WIDTH))


class TestFlipAugment(unittest.TestCase):
    """Test cases for flip_augment."""

    def test_mirror(self):
        """Test (3, 10, 0.5) maps to (-3, 10, 0.5) with other channels kept."""
        frame = make_frame(0.0, [point_row(3, 10, 0.5, -2.0, 15.0)], pose=EgoPose(2.0, 5.0, 0.3),
                           yaw_rate=0.1, labels=np.array([1]))
        flipped = flip_augment(frame)
        np.testing.assert_allclose(flipped.points[0], [-3, 10, 0.5, -2.0, 15.0, frame.points[0, 5]])
        self.assertAlmostEqual(flipped.ego.yaw_rate, -0.1)
        self.assertEqual(flipped.ego.speed, frame.ego.speed)
        np.testing.assert_array_equal(flipped.labels, [1])
        self.assertAlmostEqual(flipped.ego.pose.x_world, -2.0)

    def test_involution(self):
        """Test flipping twice restores the frame."""
        rng = np.random.default_rng(3)
        rows = [point_row(*xyz, doppler=d) for xyz, d in zip(rng.normal(size=(10, 3)) * 5, rng.normal(size=10))]
        frame = make_frame(1.0, rows, pose=EgoPose(1.0, -2.0, -0.4), yaw_rate=0.05, labels=rng.integers(0, 2, 10))
        twice = flip_augment(flip_augment(frame))
        np.testing.assert_array_equal(twice.points, frame.points)
        np.testing.assert_array_equal(twice.labels, frame.labels)
        self.assertEqual(twice.ego, frame.ego)

    def test_compensation_commutes_with_flip(self):
        """Test fusing flipped frames equals flipping the fused positions."""
        prev = make_frame(0.0, [point_row(3, 12, 0.5)], pose=EgoPose(0.0, 0.0, 0.0), yaw_rate=0.2)
        curr = make_frame(0.1, [point_row(2, 11, 0.5)], pose=EgoPose(0.2, 1.0, 0.05), yaw_rate=0.2)
        plain = fuse_frames(curr, prev)
        mirrored = fuse_frames(flip_augment(curr), flip_augment(prev))
        expected = plain.positions * np.array([-1.0, 1.0, 1.0])
        np.testing.assert_allclose(mirrored.positions, expected, atol=1e-9)


class TestSplitSequences(unittest.TestCase):
    """Test cases for split_sequences."""

    def test_split_on_jump(self):
        """Test a timestamp jump starts a new sequence."""
        frames = [make_frame(t, []) for t in (0.0, 0.1, 0.2, 5.0, 5.1)]
        sequences = split_sequences(frames)
        self.assertEqual([len(s) for s in sequences], [3, 2])
        self.assertEqual(split_sequences([]), [])


if __name__ == "__main__":
    unittest.main()
