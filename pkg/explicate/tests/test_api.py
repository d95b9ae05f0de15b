import tempfile
import uuid
from unittest import mock

from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from explicate.enums import ScenarioKind, Status
from explicate.models import ScenarioRun
from explicate.tasks import trigger_scenario_run

REPORT = {
    "kind": "filter_demo",
    "passed": True,
    "checks": [
        {
            "key": "unbiased_filters",
            "name": "unbiased filters",
            "value": 1e-16,
            "tolerance": 1e-12,
            "passed": True,
            "criterion": "z then x filters pass 1/2 for every input state",
        }
    ],
}


class ScenarioSubmitTests(APITestCase):
    @mock.patch("explicate.views.trigger_scenario_run.delay")
    def test_valid_config_is_queued(self, delay):
        response = self.client.post(reverse("scenario_submit"), {"kind": "lattice_demo"}, format="json")

        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        record = ScenarioRun.objects.get(task_id=response.data["id"])
        self.assertEqual(record.kind, ScenarioKind.LATTICE_DEMO)
        self.assertEqual(record.status, Status.PROCESSING)
        self.assertEqual(record.config["seed"], 3)
        delay.assert_called_once_with(str(record.task_id))

    @mock.patch("explicate.views.trigger_scenario_run.delay")
    def test_invalid_config_is_unprocessable(self, delay):
        response = self.client.post(
            reverse("scenario_submit"),
            {"kind": "coherent", "time": {"dt": 0.1, "dt_out": 0.01}},
            format="json",
        )

        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertIn("dt", response.data["time"])
        delay.assert_not_called()
        self.assertFalse(ScenarioRun.objects.exists())


class ScenarioResultTests(APITestCase):
    def test_unknown_task_id(self):
        response = self.client.get(reverse("scenario_result", args=[str(uuid.uuid4())]))
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_malformed_task_id(self):
        response = self.client.get(reverse("scenario_result", args=["not-a-uuid"]))
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_processing_record(self):
        record = ScenarioRun.objects.create(kind=ScenarioKind.FILTER_DEMO, config={})
        response = self.client.get(reverse("scenario_result", args=[str(record.task_id)]))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["message"], "This run is still processing")
        self.assertEqual(response.data["data"]["status"], Status.PROCESSING)

    def test_catalogue(self):
        response = self.client.get(reverse("scenario_catalogue"))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), len(ScenarioKind.values))


class ScenarioReportTests(APITestCase):
    def setUp(self):
        self.record = ScenarioRun.objects.create(
            kind=ScenarioKind.FILTER_DEMO,
            config={},
            status=Status.SUCCESS,
            passed=True,
            report=REPORT,
        )

    def test_csv_report(self):
        response = self.client.get(reverse("scenario_report", args=[str(self.record.task_id), "csv"]))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response["Content-Disposition"], "attachment; filename=filter_demo_report.csv")
        lines = response.content.decode().splitlines()
        self.assertEqual(lines[0], "key,name,value,tolerance,passed,criterion")
        self.assertTrue(lines[1].startswith("unbiased_filters,unbiased filters,"))

    def test_json_report(self):
        response = self.client.get(reverse("scenario_report", args=[str(self.record.task_id), "JSON"]))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.json()["checks"][0]["key"], "unbiased_filters")

    def test_unknown_format(self):
        response = self.client.get(reverse("scenario_report", args=[str(self.record.task_id), "xlsx"]))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_report_of_an_unfinished_run(self):
        pending = ScenarioRun.objects.create(kind=ScenarioKind.FILTER_DEMO, config={})
        response = self.client.get(reverse("scenario_report", args=[str(pending.task_id), "json"]))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class TriggerScenarioRunTests(APITestCase):
    def test_missing_record(self):
        result = trigger_scenario_run(str(uuid.uuid4()))
        self.assertEqual(result["status"], "failed")

    @mock.patch("explicate.views.trigger_scenario_run.delay")
    def test_run_is_saved(self, _delay):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        with self.settings(SCENARIO_OUTPUT_ROOT=directory.name):
            response = self.client.post(reverse("scenario_submit"), {"kind": "filter_demo"}, format="json")
            task_id = str(response.data["id"])
            result = trigger_scenario_run(task_id)

        self.assertEqual(result["status"], "success")
        record = ScenarioRun.objects.get(task_id=task_id)
        self.assertEqual(record.status, Status.SUCCESS)
        self.assertTrue(record.passed)
        self.assertIn("filters.csv", record.artifacts)
        self.assertEqual(trigger_scenario_run(task_id)["message"], "this task has already been processed")

    @mock.patch("explicate.services.run_scenario", side_effect=OSError("disk full"))
    @mock.patch("explicate.views.trigger_scenario_run.delay")
    def test_artifact_write_failure_marks_the_run_failed(self, _delay, _run):
        response = self.client.post(reverse("scenario_submit"), {"kind": "filter_demo"}, format="json")
        task_id = str(response.data["id"])

        with self.assertLogs("explicate.services", level="ERROR"):
            result = trigger_scenario_run(task_id)

        self.assertEqual(result["status"], "failed")
        self.assertEqual(result["error"], "disk full")
        record = ScenarioRun.objects.get(task_id=task_id)
        self.assertEqual(record.status, Status.FAILED)
        self.assertEqual(record.error, "disk full")
