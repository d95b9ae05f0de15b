from rest_framework import status
from rest_framework.generics import GenericAPIView
from rest_framework.response import Response
from rest_framework.views import APIView

from .enums import Status
from .scenarios import list_scenarios
from .serializers import ScenarioConfigSerializer, ScenarioRunSerializer
from .services import OutputFormattingService, ScenarioService
from .tasks import trigger_scenario_run


class ScenarioSubmitAPIView(GenericAPIView):
    serializer_class = ScenarioConfigSerializer

    def post(self, request, *args, **kwargs):
        """
        Submit a scenario config and obtain a unique ID for the run.
        """
        serializer = self.serializer_class(data=request.data)
        if not serializer.is_valid():
            return Response(data=serializer.errors, status=status.HTTP_422_UNPROCESSABLE_ENTITY)

        try:
            record = ScenarioService.create_record(config=serializer.save())
            trigger_scenario_run.delay(str(record.task_id))
        except ValueError as err:
            return Response(
                data={
                    "error": str(err),
                    "message": "an error occurred",
                },
                status=status.HTTP_400_BAD_REQUEST,
            )

        return Response(
            {
                "id": record.task_id,
                "message": "please use this ID to get your scenario result",
            },
            status=status.HTTP_202_ACCEPTED,
        )


class ScenarioResultAPIView(GenericAPIView):
    serializer_class = ScenarioRunSerializer

    def get(self, request, task_id: str):
        """
        Get the status and report of a scenario run
        """
        try:
            record = ScenarioService.get_scenario_result(task_id=task_id)
        except ValueError as err:
            return Response(data={"message": str(err)}, status=status.HTTP_404_NOT_FOUND)

        if record.status == Status.PROCESSING:
            message = "This run is still processing"
        elif record.status == Status.SUCCESS:
            message = "Every check passed" if record.passed else "The run finished with failed checks"
        else:
            message = "There was an issue running this scenario, please check the error and resubmit"

        data = {
            "message": message,
            "data": self.serializer_class(record).data,
        }

        return Response(
            data,
            status=status.HTTP_200_OK,
        )


class ScenarioReportAPIView(APIView):
    def get(self, request, task_id: str, file_format: str):
        try:
            response = OutputFormattingService(
                file_format=file_format,
                task_id=task_id,
            ).generate_file_format_response()
        except ValueError as err:
            return Response(data={"message": str(err)}, status=status.HTTP_400_BAD_REQUEST)

        return response


class ScenarioCatalogueAPIView(APIView):
    def get(self, request):
        """
        List the scenario kinds a config can request.
        """
        return Response(data=list_scenarios(), status=status.HTTP_200_OK)
