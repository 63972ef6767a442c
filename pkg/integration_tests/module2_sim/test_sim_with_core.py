"""
Integration test: Module 2 (Sim) with Module 1 (Core)

Tests that rendered frames agree with the core geometry and record types.
"""

import unittest

import numpy as np

from src.module1_core.geometry import ego_to_world
from src.module1_core.metrics import directed_distances
from src.module2_sim.renderer import RadarModel, render_sequence
from src.module2_sim.scenario import SCENARIO_KINDS, build_scenario, distance_to_polyline


class TestSimCoreIntegration(unittest.TestCase):
    """Integration tests for Sim + Core modules."""

    def test_noiseless_returns_lie_on_boundaries(self):
        """Test noiseless boundary returns map back onto their source polyline."""
        for kind in ("straight", "curved", "fork"):
            scenario = build_scenario(kind, 1, duration=0.5)
            for frame in render_sequence(scenario, RadarModel.noiseless(), 1):
                for b_index, boundary in enumerate(scenario.boundaries):
                    mask = frame.sources == b_index
                    if not np.any(mask):
                        continue
                    world = ego_to_world(frame.points[mask, :2], frame.ego.pose)
                    self.assertLess(float(distance_to_polyline(world, boundary.vertices).max()), 1e-6)

    def test_frames_validate(self):
        """Test every rendered frame passes the record invariants."""
        for kind in SCENARIO_KINDS:
            for frame in render_sequence(build_scenario(kind, 2, duration=0.3), RadarModel(), 2):
                ok, errors = frame.validate()
                self.assertTrue(ok, (kind, errors))

    def test_ego_advances_at_speed(self):
        """Test consecutive poses are one period of travel apart."""
        scenario = build_scenario("straight", 3, duration=1.0)
        frames = render_sequence(scenario, RadarModel.noiseless(), 3)
        xy = np.array([[f.ego.pose.x_world, f.ego.pose.y_world] for f in frames])
        steps = np.linalg.norm(np.diff(xy, axis=0), axis=1)
        np.testing.assert_allclose(steps, 0.1 * scenario.ego_speed, rtol=1e-6)

    def test_static_world_consistent_across_frames(self):
        """Test the same wall seen from two poses lands in the same world place."""
        scenario = build_scenario("curved", 4, duration=0.1)
        first, second = render_sequence(scenario, RadarModel.noiseless(), 4)
        a = ego_to_world(first.points[first.sources >= 0, :2], first.ego.pose)
        b = ego_to_world(second.points[second.sources >= 0, :2], second.ego.pose)
        # boundary reflectors are resampled in the world frame, so most coincide
        self.assertGreater(float(np.mean(directed_distances(b, a) < 1e-6)), 0.8)


if __name__ == "__main__":
    unittest.main()
