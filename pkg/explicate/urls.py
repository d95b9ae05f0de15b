from django.urls import path

from .views import ScenarioCatalogueAPIView, ScenarioReportAPIView, ScenarioResultAPIView, ScenarioSubmitAPIView

urlpatterns = [
    path("", ScenarioSubmitAPIView.as_view(), name="scenario_submit"),
    path("catalogue/", ScenarioCatalogueAPIView.as_view(), name="scenario_catalogue"),
    path("<str:task_id>/", ScenarioResultAPIView.as_view(), name="scenario_result"),
    path(
        "report/<str:task_id>/<str:file_format>/",
        ScenarioReportAPIView.as_view(),
        name="scenario_report",
    ),
]
