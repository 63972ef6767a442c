"""
Unit tests for Module 1: Core Geometry and Metrics

Tests frame conversions, motion compensation, nearest-neighbor search,
Chamfer / Hausdorff distances and the radar record types.
"""

import math
import unittest

import numpy as np

from src.module1_core.geometry import (
    ego_to_world,
    motion_compensate,
    nearest_neighbor,
    rotation_matrix,
    world_to_ego,
)
from src.module1_core.metrics import chamfer, directed_distances, hausdorff
from src.module1_core.radar_types import EgoPose, EgoState, RadarFrame, RadarPoint, normalize_angle


def brute_chamfer(a, b):
    d = [[math.dist(p, q) for q in b] for p in a]
    forward = sum(min(row) for row in d) / len(a)
    backward = sum(min(d[i][j] for i in range(len(a))) for j in range(len(b))) / len(b)
    return 0.5 * (forward + backward)


def brute_hausdorff(a, b):
    d = [[math.dist(p, q) for q in b] for p in a]
    forward = max(min(row) for row in d)
    backward = max(min(d[i][j] for i in range(len(a))) for j in range(len(b)))
    return max(forward, backward)


class TestEgoPose(unittest.TestCase):
    """Test cases for pose and state records."""

    def test_yaw_normalized(self):
        """Test yaw wraps into (-pi, pi]."""
        self.assertAlmostEqual(EgoPose(0, 0, 3 * math.pi).yaw, math.pi)
        self.assertAlmostEqual(EgoPose(0, 0, -math.pi).yaw, math.pi)
        self.assertAlmostEqual(EgoPose(0, 0, 2 * math.pi + 0.1).yaw, 0.1)

    def test_normalize_angle_range(self):
        """Test normalize_angle output stays in (-pi, pi]."""
        for angle in np.linspace(-20, 20, 101):
            wrapped = normalize_angle(angle)
            self.assertGreater(wrapped, -math.pi)
            self.assertLessEqual(wrapped, math.pi)
            self.assertAlmostEqual(math.cos(wrapped), math.cos(angle), places=9)

    def test_negative_speed_rejected(self):
        """Test EgoState refuses negative speed."""
        with self.assertRaises(ValueError):
            EgoState(EgoPose(0, 0, 0), -1.0, 0.0)


class TestRadarFrame(unittest.TestCase):
    """Test cases for RadarFrame and RadarPoint."""

    def setUp(self):
        rows = [RadarPoint.from_position(1.0, 2.0, 0.5, -3.0, 20.0).to_row(),
                RadarPoint.from_position(-4.0, 10.0, 1.0, 0.5, 12.0).to_row()]
        self.frame = RadarFrame(0.0, EgoState(EgoPose(0, 0, 0), 5.0, 0.0), np.array(rows), np.array([1, 0]))

    def test_valid_frame(self):
        """Test a consistent frame validates."""
        ok, errors = self.frame.validate()
        self.assertTrue(ok, errors)

    def test_range_mismatch_detected(self):
        """Test validate flags a range that is not the position norm."""
        self.frame.points[0, 5] += 0.01
        ok, errors = self.frame.validate()
        self.assertFalse(ok)
        self.assertIn("range", errors[0])

    def test_negative_snr_detected(self):
        """Test validate flags negative SNR."""
        self.frame.points[1, 4] = -1.0
        ok, _ = self.frame.validate()
        self.assertFalse(ok)

    def test_labels_must_align(self):
        """Test misaligned labels are rejected on construction."""
        with self.assertRaises(ValueError):
            RadarFrame(0.0, self.frame.ego, self.frame.points, np.array([1]))

    def test_subset_keeps_labels_aligned(self):
        """Test subset selects labels with the points."""
        sub = self.frame.subset(np.array([False, True]))
        self.assertEqual(len(sub), 1)
        self.assertEqual(sub.labels.tolist(), [0])
        self.assertEqual(sub.point(0).y, 10.0)


class TestFrameConversions(unittest.TestCase):
    """Test cases for ego/world conversions and motion compensation."""

    def test_identity_pose(self):
        """Test the identity pose leaves points unchanged."""
        out = ego_to_world(np.array([1.0, 2.0, 0.5]), EgoPose(0, 0, 0))
        np.testing.assert_allclose(out[0], [1.0, 2.0, 0.5])

    def test_quarter_turn(self):
        """Test a +x point maps to world +y at yaw pi/2."""
        out = ego_to_world(np.array([1.0, 0.0, 0.0]), EgoPose(0, 0, math.pi / 2))
        np.testing.assert_allclose(out[0], [0.0, 1.0, 0.0], atol=1e-12)

    def test_round_trip(self):
        """Test world_to_ego inverts ego_to_world on random inputs."""
        rng = np.random.default_rng(1)
        for _ in range(100):
            p = rng.uniform(-50, 50, size=(1, 3))
            pose = EgoPose(*rng.uniform(-100, 100, 2), rng.uniform(-math.pi, math.pi))
            np.testing.assert_allclose(world_to_ego(ego_to_world(p, pose), pose), p, atol=1e-9)

    def test_no_motion(self):
        """Test compensation between equal poses is the identity."""
        pose = EgoPose(3.0, -2.0, 0.4)
        p = np.array([[1.0, 5.0, 0.2], [-2.0, 8.0, 1.0]])
        np.testing.assert_allclose(motion_compensate(p, pose, pose), p, atol=1e-12)

    def test_forward_motion(self):
        """Test 2 m of forward travel brings a point 2 m closer."""
        out = motion_compensate(np.array([0.0, 10.0, 0.0]), EgoPose(0, 0, 0), EgoPose(0, 2, 0))
        np.testing.assert_allclose(out[0], [0.0, 8.0, 0.0], atol=1e-12)

    def test_pure_rotation_matches_matrix(self):
        """Test a quarter turn of the ego rotates points by -pi/2 in the ego frame."""
        rng = np.random.default_rng(2)
        p = rng.uniform(-20, 20, size=(50, 2))
        out = motion_compensate(p, EgoPose(0, 0, 0), EgoPose(0, 0, math.pi / 2))
        expected = p @ np.array([[0.0, 1.0], [-1.0, 0.0]]).T
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_swapped_poses_invert(self):
        """Test compensation back and forth returns the original points."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = rng.uniform(-30, 30, size=(5, 3))
            a = EgoPose(*rng.uniform(-10, 10, 2), rng.uniform(-3, 3))
            b = EgoPose(*rng.uniform(-10, 10, 2), rng.uniform(-3, 3))
            np.testing.assert_allclose(motion_compensate(motion_compensate(p, a, b), b, a), p, atol=1e-9)

    def test_rotation_matrix_orthonormal(self):
        """Test rotation matrices are orthonormal."""
        r = rotation_matrix(0.7)
        np.testing.assert_allclose(r @ r.T, np.eye(2), atol=1e-12)


class TestNearestNeighbor(unittest.TestCase):
    """Test cases for nearest_neighbor."""

    def test_exact_hit(self):
        """Test a query on a reference point."""
        result = nearest_neighbor(np.array([0.0, 0.0]), np.array([[0.0, 0.0], [5.0, 5.0]]))
        self.assertEqual(result.index[0], 0)
        self.assertEqual(result.distance[0], 0.0)
        np.testing.assert_array_equal(result.vector[0], [0.0, 0.0])

    def test_vector_points_to_query(self):
        """Test the vector runs from the reference point to the query."""
        result = nearest_neighbor(np.array([1.0, 0.0]), np.array([[0.0, 0.0], [3.0, 0.0]]))
        self.assertEqual(result.index[0], 0)
        self.assertAlmostEqual(result.distance[0], 1.0)
        np.testing.assert_allclose(result.vector[0], [1.0, 0.0])

    def test_tie_goes_to_lowest_index(self):
        """Test equidistant references resolve to the lower index."""
        result = nearest_neighbor(np.array([1.5, 0.0]), np.array([[0.0, 0.0], [3.0, 0.0]]))
        self.assertEqual(result.index[0], 0)

    def test_empty_reference(self):
        """Test an empty reference set raises."""
        with self.assertRaisesRegex(ValueError, "empty reference set"):
            nearest_neighbor(np.array([[0.0, 0.0]]), np.zeros((0, 2)))

    def test_matches_exhaustive_scan(self):
        """Test agreement with a brute-force scan on random instances."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            ref = rng.uniform(-10, 10, size=(int(rng.integers(1, 200)), 2))
            query = rng.uniform(-10, 10, size=(int(rng.integers(1, 50)), 2))
            result = nearest_neighbor(query, ref)
            for q, index, distance in zip(query, result.index, result.distance):
                d = [math.dist(q, r) for r in ref]
                best = min(d)
                self.assertEqual(index, d.index(best))
                self.assertAlmostEqual(distance, best, delta=1e-9)


class TestMetrics(unittest.TestCase):
    """Test cases for Chamfer and Hausdorff distances."""

    def test_identical_sets(self):
        """Test identical sets are at distance 0."""
        a = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]])
        self.assertEqual(chamfer(a, a), 0.0)
        self.assertEqual(hausdorff(a, a), 0.0)

    def test_single_pair(self):
        """Test a 3-4-5 pair."""
        self.assertAlmostEqual(chamfer([[0, 0]], [[3, 4]]), 5.0)

    def test_hausdorff_hand_value(self):
        """Test the far point dominates Hausdorff."""
        self.assertAlmostEqual(hausdorff([[0, 0], [10, 0]], [[0, 0]]), 10.0)

    def test_empty_set_undefined(self):
        """Test an empty set raises."""
        with self.assertRaisesRegex(ValueError, "undefined metric"):
            chamfer(np.zeros((0, 2)), [[1, 1]])
        with self.assertRaisesRegex(ValueError, "undefined metric"):
            hausdorff([[1, 1]], np.zeros((0, 2)))

    def test_random_against_oracle(self):
        """Test both metrics against brute force on random sets."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = rng.uniform(-5, 5, size=(int(rng.integers(1, 40)), 2))
            b = rng.uniform(-5, 5, size=(int(rng.integers(1, 40)), 2))
            self.assertAlmostEqual(chamfer(a, b), brute_chamfer(a.tolist(), b.tolist()), delta=1e-9)
            self.assertAlmostEqual(hausdorff(a, b), brute_hausdorff(a.tolist(), b.tolist()), delta=1e-9)

    def test_symmetry_and_ordering(self):
        """Test symmetry and hausdorff >= chamfer."""
        rng = np.random.default_rng(6)
        for _ in range(50):
            a = rng.normal(size=(7, 2))
            b = rng.normal(size=(9, 2))
            self.assertAlmostEqual(chamfer(a, b), chamfer(b, a), places=12)
            self.assertAlmostEqual(hausdorff(a, b), hausdorff(b, a), places=12)
            self.assertGreaterEqual(hausdorff(a, b) + 1e-12, chamfer(a, b))

    def test_directed_distances(self):
        """Test per-point closest distances."""
        d = directed_distances([[0, 0], [0, 3]], [[0, 1]])
        np.testing.assert_allclose(d, [1.0, 2.0])


if __name__ == "__main__":
    unittest.main()
