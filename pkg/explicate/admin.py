from django.contrib import admin

from .models import ScenarioRun


class ScenarioRunAdmin(admin.ModelAdmin):
    search_fields = [
        "task_id",
    ]
    list_filter = [
        "kind",
        "status",
        "passed",
        "created_at",
    ]

    def get_list_display(self, request):
        return [field.name for field in self.model._meta.concrete_fields if field.name not in ("config", "report")]


admin.site.register(ScenarioRun, ScenarioRunAdmin)
