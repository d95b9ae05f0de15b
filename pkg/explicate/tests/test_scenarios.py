import json
import shutil
import tempfile
from pathlib import Path

import pandas as pd
from django.test import SimpleTestCase

from explicate.enums import ScenarioKind
from explicate.exceptions import UnsupportedPotentialError
from explicate.scenarios import Check, RunReport, default_output_dir, list_scenarios, run_scenario
from explicate.services import build_config


class ScenarioTestCase(SimpleTestCase):
    def setUp(self):
        self.directory = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.directory, ignore_errors=True)

    def run_kind(self, data):
        return run_scenario(build_config(data), self.directory)

    def read_report(self):
        return json.loads((self.directory / "report.json").read_text(encoding="utf-8"))


class ReportTests(SimpleTestCase):
    def test_description_of_a_check(self):
        check = Check("ks_distance", "ks distance", 0.01, 0.05, True, "equivariance")
        self.assertEqual(check.describe(), "[PASS] ks distance ± 0.05 (measured 1.000e-02; equivariance)")

    def test_a_single_failure_fails_the_run(self):
        report = RunReport(
            "coherent",
            [Check("a", "a", 0.0, 1.0, True, ""), Check("b", "b", 2.0, 1.0, False, "")],
        )
        self.assertFalse(report.passed)
        self.assertEqual([check.key for check in report.failures], ["b"])
        self.assertIn("[FAIL] b", report.render())

    def test_catalogue_lists_every_kind(self):
        self.assertEqual([entry["kind"] for entry in list_scenarios()], ScenarioKind.values)

    def test_default_output_directory(self):
        config = build_config({"kind": "filter_demo"})
        self.assertEqual(default_output_dir(config), Path("runs") / "filter_demo")


class DemoScenarioTests(ScenarioTestCase):
    def test_lattice_demo(self):
        report = self.run_kind({"kind": "lattice_demo"})
        self.assertTrue(report.passed, report.render())
        self.assertEqual(report.details["spin_lattice_size"], 6)
        self.assertEqual(report.details["two_qubit_lattice_size"], 36)

        lattice = json.loads((self.directory / "lattice.json").read_text(encoding="utf-8"))
        self.assertTrue(lattice["counterexample"]["violated"])
        self.assertEqual(len(lattice["blocks"]), 2)

    def test_filter_demo(self):
        report = self.run_kind({"kind": "filter_demo"})
        self.assertTrue(report.passed, report.render())
        self.assertIn("stage probabilities (0.5, 0.5, 0.5)", [check.name for check in report.checks])

        filters = pd.read_csv(self.directory / "filters.csv", comment="#")
        self.assertEqual(len(filters), 800)
        self.assertAlmostEqual(filters["p_second"].max(), 0.5, places=12)

    def test_spinor_demo(self):
        report = self.run_kind({"kind": "spinor_demo"})
        self.assertTrue(report.passed, report.render())
        self.assertEqual(self.read_report()["kind"], "spinor_demo")
        self.assertEqual(len(pd.read_csv(self.directory / "spinors.csv", comment="#")), 16)

    def test_same_seed_gives_identical_artifacts(self):
        self.run_kind({"kind": "filter_demo", "seed": 21})
        first = (self.directory / "filters.csv").read_bytes()
        self.run_kind({"kind": "filter_demo", "seed": 21})
        self.assertEqual((self.directory / "filters.csv").read_bytes(), first)


class WaveScenarioTests(ScenarioTestCase):
    def test_ground_state(self):
        report = self.run_kind({"kind": "ground_state"})
        self.assertTrue(report.passed, report.render())
        self.assertIn("Q+V constant = 0.5", [check.name for check in report.checks])
        for name in ("trace.csv", "residuals.csv", "trajectories.csv", "report.json"):
            self.assertIn(name, report.artifacts)
            self.assertTrue((self.directory / name).exists())

        stored = self.read_report()
        self.assertTrue(stored["passed"])
        self.assertEqual(len(stored["checks"]), len(report.checks))

    def test_tolerance_override_can_fail_a_check(self):
        report = self.run_kind({"kind": "ground_state", "tolerances": {"liouville_residual": 1e-30}})
        self.assertFalse(report.passed)
        self.assertEqual([check.key for check in report.failures], ["liouville_residual"])
        self.assertFalse(self.read_report()["passed"])

    def test_ground_state_needs_a_harmonic_potential(self):
        config = build_config(
            {"kind": "ground_state", "hamiltonian": {"potential": "free", "stiffness": 0.0}}
        )
        with self.assertRaises(UnsupportedPotentialError):
            run_scenario(config, self.directory)
