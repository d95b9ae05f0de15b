import uuid

from django.db import models

from .enums import ScenarioKind, Status


class ScenarioRun(models.Model):
    task_id = models.UUIDField(default=uuid.uuid4, editable=False, unique=True, db_index=True)
    kind = models.CharField(max_length=32, choices=ScenarioKind.choices)
    config = models.JSONField()
    status = models.CharField(max_length=100, choices=Status.choices, default=Status.PROCESSING)
    passed = models.BooleanField(null=True, blank=True)
    report = models.JSONField(null=True, blank=True)
    artifacts = models.JSONField(null=True, blank=True)
    error = models.TextField(blank=True, default="")
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    def __str__(self) -> str:
        return f"{self.kind} run {self.task_id}"
