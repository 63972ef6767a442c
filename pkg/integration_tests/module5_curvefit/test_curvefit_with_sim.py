"""
Integration test: Module 5 (Curvefit) with Module 2 (Sim)

Tests curve fitting on the true boundary points of rendered scenes.
"""

import unittest

import numpy as np

from src.module1_core.geometry import ego_to_world, world_to_ego
from src.module2_sim.renderer import RadarModel, render_sequence
from src.module2_sim.scenario import build_scenario, distance_to_polyline, point_along
from src.module5_curvefit.boundary_fitter import fit_boundaries
from src.module5_curvefit.gaussian_process import GPRConfig


def curve_rms(curve, frame, scenario):
    world = ego_to_world(np.column_stack([curve.mean_x, curve.y_grid]), frame.ego.pose)
    return min(float(np.sqrt(np.mean(distance_to_polyline(world, b.vertices) ** 2)))
               for b in scenario.boundaries)


class TestCurvefitSimIntegration(unittest.TestCase):
    """Integration tests for Curvefit + Sim modules."""

    def test_straight_road_two_curves(self):
        """Test a straight road gives two curves close to the true boundaries."""
        for seed in range(3):
            scenario = build_scenario("straight", seed, duration=1.0)
            for frame in render_sequence(scenario, RadarModel(), seed)[::5]:
                truth = frame.labels == 1
                curves = fit_boundaries(frame.points[truth, :2], seed=seed)
                self.assertEqual(len(curves), 2)
                sides = sorted(float(np.sign(np.mean(c.mean_x))) for c in curves)
                self.assertEqual(sides, [-1.0, 1.0])
                for curve in curves:
                    self.assertLessEqual(curve_rms(curve, frame, scenario), 0.3)

    def test_intersection_curves_single_source(self):
        """Test no curve mixes returns of different boundary pieces."""
        for seed in range(3):
            scenario = build_scenario("intersection", seed, duration=1.0)
            for frame in render_sequence(scenario, RadarModel(), seed)[::5]:
                truth = frame.labels == 1
                sources = frame.sources[truth]
                for curve in fit_boundaries(frame.points[truth, :2], seed=seed):
                    self.assertEqual(len(np.unique(sources[curve.members])), 1)

    def test_seven_meter_gap_never_bridged(self):
        """Test a 7 m junction gap leaves curves on both sides and none across it, over 100 seeds."""
        for seed in range(100):
            scenario = build_scenario("intersection", seed, duration=0.0, junction_gap=7.0)
            frame = render_sequence(scenario, RadarModel(), seed)[0]
            start, stop = scenario.junction_spans[0]
            self.assertAlmostEqual(stop - start, 7.0)
            middle, _ = point_along(scenario.ego_path, 0.5 * (start + stop))
            gap_y = world_to_ego(middle, frame.ego.pose)[1]

            truth = frame.labels == 1
            y = frame.points[truth, 1]
            curves = fit_boundaries(frame.points[truth, :2], seed=seed)
            for curve in curves:
                members_y = y[curve.members]
                self.assertFalse(members_y.min() < gap_y < members_y.max(), f"seed {seed} bridges the gap")
            beyond = {bool(np.all(y[curve.members] > gap_y)) for curve in curves}
            self.assertEqual(beyond, {False, True}, f"seed {seed}")

    def test_jitter_stays_small(self):
        """Test every posterior factorizes with jitter at most 1e-6."""
        for kind in ("straight", "curved", "fork"):
            scenario = build_scenario(kind, 2, duration=0.5)
            for frame in render_sequence(scenario, RadarModel(), 2)[::2]:
                truth = frame.labels == 1
                for curve in fit_boundaries(frame.points[truth, :2], gpr_cfg=GPRConfig()):
                    self.assertLessEqual(curve.posterior.jitter, 1e-6)

    def test_ci_grows_beyond_data(self):
        """Test the confidence band widens past the end of a fitted boundary."""
        scenario = build_scenario("curved", 3, duration=0.0)
        frame = render_sequence(scenario, RadarModel(), 3)[0]
        truth = frame.labels == 1
        curve = fit_boundaries(frame.points[truth, :2])[0]
        top = float(curve.y_grid[-1])
        _, half = curve.posterior.predict(top + np.array([0.0, 5.0, 10.0, 20.0, 40.0]))
        self.assertTrue(np.all(np.diff(half) >= -1e-9))


if __name__ == "__main__":
    unittest.main()
