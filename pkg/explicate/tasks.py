from typing import Any, Dict

from celery import shared_task

from .enums import Status
from .models import ScenarioRun
from .services import ScenarioService


def generate_result(message: str, status: bool = True, error: str | None = None) -> Dict[str, Any]:
    data = {
        "status": "success" if status else "failed",
        "message": message,
    }

    if error is not None:
        data["error"] = error

    return data


@shared_task
def trigger_scenario_run(task_id: str) -> Dict[str, Any]:
    """
    Run the scenario stored on a pending record

    Args:
        task_id (str): the task ID of a scenario run

    Returns:
        Dict[str, Any]: the result of the run
    """
    try:
        record = ScenarioRun.objects.get(task_id=task_id)
    except ScenarioRun.DoesNotExist:
        return generate_result(status=False, message=f"record with task_id, {task_id}, does not exist")

    if record.status != Status.PROCESSING:
        return generate_result(message="this task has already been processed")

    try:
        report = ScenarioService(record=record).run_and_save()
    except (ValueError, OSError) as err:
        return generate_result(status=False, message="an error occurred", error=str(err))

    outcome = "passed" if report.passed else "failed"
    return generate_result(message=f"task, with ID, {task_id}, ran and {outcome} its checks")
