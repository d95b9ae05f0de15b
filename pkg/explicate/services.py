import json
import logging
from pathlib import Path
from typing import Any, Dict

import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError as DjangoValidationError
from django.http import HttpResponse
from rest_framework.exceptions import ValidationError

from .config import ScenarioConfig
from .enums import Status
from .exceptions import ConfigurationError
from .models import ScenarioRun
from .scenarios import RunReport, run_scenario
from .serializers import ScenarioConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)


def build_config(data: Dict[str, Any]) -> ScenarioConfig:
    """
    Validate raw configuration data and merge it over the preset of its kind.

    Args:
        data (Dict[str, Any]): the decoded configuration.

    Returns:
        ScenarioConfig: the validated configuration.

    Raises:
        ConfigurationError: with the offending fields as dotted paths.
    """
    serializer = ScenarioConfigSerializer(data=data)
    try:
        serializer.is_valid(raise_exception=True)
    except ValidationError as err:
        errors = flatten_errors(err.detail)
        message = "; ".join(f"{field}: {reason}" for field, reason in errors.items())
        raise ConfigurationError(f"invalid scenario config: {message}", errors) from err

    return serializer.save()


def load_config(path: Path | str) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError as err:
        raise ConfigurationError(f"config file {path} does not exist", {"config": "file not found"}) from err
    except json.JSONDecodeError as err:
        raise ConfigurationError(
            f"config file {path} is not valid JSON: {err.msg} (line {err.lineno})",
            {"config": err.msg},
        ) from err

    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object", {"config": "not an object"})
    return build_config(data)


class ScenarioService:
    def __init__(self, record: ScenarioRun):
        self.record = record

    @property
    def output_dir(self) -> Path:
        return Path(settings.SCENARIO_OUTPUT_ROOT) / str(self.record.task_id)

    @classmethod
    def get_scenario_result(cls, task_id: str) -> ScenarioRun:
        try:
            record = ScenarioRun.objects.get(task_id=task_id)
        except (ScenarioRun.DoesNotExist, DjangoValidationError):
            raise ValueError("this task ID does not exist")

        return record

    @classmethod
    def create_record(cls, config: ScenarioConfig) -> ScenarioRun:
        return ScenarioRun.objects.create(kind=config.kind, config=config.to_dict())

    @classmethod
    def update_record(cls, data: Dict[str, Any], record: ScenarioRun) -> ScenarioRun:
        """
        Update the record with the data

        Args:
            data (Dict[str, Any]): the data to update
            record (ScenarioRun): the record to be updated

        Returns:
            ScenarioRun: The updated scenario run
        """
        for key, value in data.items():
            setattr(record, key, value)

        record.save()
        return record

    def run_and_save(self) -> RunReport:
        """Run the stored configuration and save the outcome; domain errors mark the record failed."""
        config = ScenarioConfig.from_dict(self.record.config)
        try:
            report = run_scenario(config, self.output_dir)
        except (ValueError, OSError) as err:
            logger.exception("scenario run %s failed", self.record.task_id)
            self.update_record(data={"status": Status.FAILED, "error": str(err)}, record=self.record)
            raise

        self.update_record(
            data={
                "status": Status.SUCCESS,
                "passed": report.passed,
                "report": report.to_dict(),
                "artifacts": report.artifacts,
            },
            record=self.record,
        )
        return report


class OutputFormattingService:
    valid_formats = ["json", "csv"]
    report_columns = ["key", "name", "value", "tolerance", "passed", "criterion"]

    def __init__(
        self,
        file_format: str,
        task_id: str | None = None,
    ):
        file_format = file_format.lower()
        if file_format not in self.valid_formats:
            raise ValueError(f"invalid file format, choose from: {self.valid_formats}")

        self.file_format = file_format
        self.record = ScenarioService.get_scenario_result(task_id)
        if self.record.status != Status.SUCCESS:
            raise ValueError(f"run {task_id} has no report yet (status {self.record.status})")

    @property
    def filename(self) -> str:
        return f"{self.record.kind}_report.{self.file_format}"

    def generate_file_format_response(self) -> HttpResponse:
        if self.file_format == "json":
            return self.generate_json_response()
        return self.generate_csv_response()

    def generate_json_response(self) -> HttpResponse:
        """Generate the stored report as a JSON file for download."""
        response = HttpResponse(content_type="application/json")
        response["Content-Disposition"] = f"attachment; filename={self.filename}"
        json.dump(self.record.report, response, indent=4)
        return response

    def generate_csv_response(self) -> HttpResponse:
        """Generate one CSV row per check."""
        response = HttpResponse(content_type="text/csv")
        response["Content-Disposition"] = f"attachment; filename={self.filename}"

        checks = pd.DataFrame(self.record.report["checks"], columns=self.report_columns)
        checks.to_csv(response, index=False, float_format="%.17g", lineterminator="\n")
        return response
