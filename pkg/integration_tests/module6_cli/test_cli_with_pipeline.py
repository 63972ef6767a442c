"""
Integration test: Module 6 (CLI) with the full pipeline

Runs simulate -> train -> infer -> eval through main() and checks the
reports, their determinism and the radar-noise sweep.
"""

import json
import os
import tempfile
import unittest

from main import main
from src.module2_sim.dataset_io import read_dataset
from src.module6_cli.evaluation import read_frames_csv

TINY_CONFIG = """
[model]
sa1_centroids = 16
sa1_k = 8
sa1_mlp = [8, 8]
sa2_centroids = 4
sa2_k = 4
sa2_mlp = [8, 8]
fp1_mlp = [8]
fp2_mlp = [8]
head_mlp = [4]

[train]
epochs = 2
max_points = 128
"""

ARMS = (("full.json", []), ("no_temporal.json", ["--no-temporal"]),
        ("no_distance_loss.json", ["--no-distance-loss"]))


class TestCliPipelineIntegration(unittest.TestCase):
    """Integration tests for the command line over every module."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = self.path("run.toml")
        with open(self.config, "w", encoding="utf-8") as handle:
            handle.write(TINY_CONFIG)

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, *parts):
        return os.path.join(self.tmp.name, *parts)

    def run_cli(self, *args):
        self.assertEqual(main(list(args) + ["--config", self.config]), 0, args)

    def full_run(self, run_dir):
        os.makedirs(self.path(run_dir), exist_ok=True)
        train_data, test_data = self.path(run_dir, "train.jsonl"), self.path(run_dir, "test.jsonl")
        self.run_cli("simulate", "--kind", "straight", "--frames", "6", "--seed", "1", "--out", train_data)
        self.run_cli("simulate", "--kind", "curved", "--frames", "4", "--seed", "2", "--out", test_data)
        models = []
        for name, flags in ARMS:
            models.append(self.path(run_dir, name))
            self.run_cli("train", "--data", train_data, "--out", models[-1], "--seed", "5", *flags)
        eval_args = ["eval", "--data", test_data, "--report-dir", self.path(run_dir, "report")]
        for model in models:
            eval_args += ["--model", model]
        self.run_cli(*eval_args)
        return test_data, models

    def test_end_to_end(self):
        """Test every command runs and the report holds three arms."""
        test_data, models = self.full_run("a")
        for model in models:
            self.assertTrue(os.path.exists(model[: -len(".json")] + ".loss.csv"))

        out = self.path("a", "detections.jsonl")
        self.run_cli("infer", "--data", test_data, "--model", models[0], "--out", out)
        frames = read_dataset(test_data)
        with open(out, encoding="utf-8") as handle:
            records = [json.loads(line) for line in handle]
        self.assertEqual(len(records), len(frames))
        for record, frame in zip(records, frames):
            self.assertEqual(len(record["probabilities"]), len(frame))

        report_dir = self.path("a", "report")
        for name in ("report.json", "frames.csv", "arms.csv", "metrics.svg", "topview.svg", "loss.svg"):
            self.assertTrue(os.path.exists(os.path.join(report_dir, name)), name)
        with open(os.path.join(report_dir, "report.json"), encoding="utf-8") as handle:
            report = json.load(handle)
        self.assertEqual([a["arm"] for a in report["arms"]], ["full", "no_temporal", "no_distance_loss"])
        self.assertEqual(len(read_frames_csv(os.path.join(report_dir, "frames.csv"))), 3 * len(frames))

    def test_same_seed_same_report(self):
        """Test two complete runs with the same seeds write identical report JSON."""
        self.full_run("a")
        self.full_run("b")
        with open(self.path("a", "report", "report.json"), "rb") as a, \
                open(self.path("b", "report", "report.json"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_sweep(self):
        """Test the noise sweep passes at every factor."""
        out = self.path("sweep.json")
        self.run_cli("sweep", "--out", out, "--frames", "5")
        with open(out, encoding="utf-8") as handle:
            summary = json.load(handle)
        self.assertEqual([row["factor"] for row in summary["rows"]], [0.5, 1.0, 1.5])
        for row in summary["rows"]:
            self.assertTrue(row["passed"], row)
            self.assertEqual(row["straight"]["overhead_removed"], 1.0)

    def test_eval_empty_dataset_fails(self):
        """Test evaluating an empty dataset exits with status 1."""
        empty, model = self.path("empty.jsonl"), self.path("m.json")
        self.run_cli("simulate", "--kind", "straight", "--frames", "0", "--out", empty)
        self.run_cli("simulate", "--kind", "straight", "--frames", "3", "--out", self.path("d.jsonl"))
        self.run_cli("train", "--data", self.path("d.jsonl"), "--out", model)
        code = main(["eval", "--data", empty, "--model", model, "--report-dir", self.path("r"),
                     "--config", self.config])
        self.assertEqual(code, 1)


if __name__ == "__main__":
    unittest.main()
