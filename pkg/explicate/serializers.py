from collections.abc import Mapping
from typing import Any, Dict

from rest_framework import serializers

from .config import DEFAULT_TOLERANCES, ScenarioConfig, deep_merge, preset
from .enums import PotentialKind, ScenarioKind
from .models import ScenarioRun
from .validators import validate_positive, validate_power_of_two, validate_schema_version


class StrictSerializer(serializers.Serializer):
    """A serializer that rejects keys it does not declare."""

    def to_internal_value(self, data):
        if isinstance(data, Mapping):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["unknown key."] for key in unknown})
        return super().to_internal_value(data)


class GridSerializer(StrictSerializer):
    points = serializers.IntegerField(validators=[validate_power_of_two])
    half_width = serializers.FloatField(validators=[validate_positive])
    self_dual = serializers.BooleanField()


class HamiltonianSerializer(StrictSerializer):
    mass = serializers.FloatField(validators=[validate_positive])
    potential = serializers.ChoiceField(choices=PotentialKind.choices)
    stiffness = serializers.FloatField(min_value=0)
    cubic = serializers.FloatField()

    def validate(self, attrs):
        if attrs["potential"] == PotentialKind.HARMONIC and attrs["stiffness"] <= 0:
            raise serializers.ValidationError({"stiffness": ["a harmonic potential needs a positive stiffness."]})
        return attrs


class InitialStateSerializer(StrictSerializer):
    center = serializers.FloatField()
    width = serializers.FloatField(validators=[validate_positive])
    momentum = serializers.FloatField()
    separation = serializers.FloatField(validators=[validate_positive])
    level = serializers.ChoiceField(choices=[0, 1])


class TimeSerializer(StrictSerializer):
    dt = serializers.FloatField(validators=[validate_positive])
    dt_out = serializers.FloatField(validators=[validate_positive])
    duration = serializers.FloatField(validators=[validate_positive])
    order = serializers.ChoiceField(choices=[2, 4])

    def validate(self, attrs):
        if attrs["dt"] >= attrs["dt_out"]:
            raise serializers.ValidationError({"dt": [f"dt={attrs['dt']} must be smaller than dt_out={attrs['dt_out']}."]})

        stride = round(attrs["dt_out"] / attrs["dt"])
        if abs(stride * attrs["dt"] - attrs["dt_out"]) > 1e-9 * attrs["dt_out"]:
            raise serializers.ValidationError({"dt_out": ["dt_out must be a whole multiple of dt."]})

        if attrs["duration"] < attrs["dt_out"]:
            raise serializers.ValidationError({"duration": ["duration must be at least dt_out."]})
        return attrs


class TrajectorySerializer(StrictSerializer):
    initial_points = serializers.ListField(child=serializers.FloatField(), allow_empty=True)
    ensemble_size = serializers.IntegerField(min_value=100)
    substeps = serializers.IntegerField(min_value=1)


class ScenarioConfigSerializer(StrictSerializer):
    schema_version = serializers.IntegerField(validators=[validate_schema_version])
    kind = serializers.ChoiceField(
        choices=ScenarioKind.choices,
        error_messages={
            "invalid_choice": f'"{{input}}" is not a scenario kind; choose from: {", ".join(ScenarioKind.values)}.'
        },
    )
    grid = GridSerializer()
    hamiltonian = HamiltonianSerializer()
    initial = InitialStateSerializer()
    time = TimeSerializer()
    trajectories = TrajectorySerializer()
    tolerances = serializers.DictField(child=serializers.FloatField(min_value=0), required=False)
    seed = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    output_dir = serializers.CharField(required=False, allow_null=True)

    def to_internal_value(self, data):
        """Fill every key the user leaves out from the preset of the requested kind."""
        if isinstance(data, Mapping) and data.get("kind") in ScenarioKind.values:
            data = deep_merge(preset(data["kind"]), dict(data))
        return super().to_internal_value(data)

    def validate(self, attrs):
        known = DEFAULT_TOLERANCES[attrs["kind"]]
        unknown = sorted(set(attrs.get("tolerances") or {}) - set(known))
        if unknown:
            raise serializers.ValidationError(
                {"tolerances": {key: [f"no check named {key} in a {attrs['kind']} run."] for key in unknown}}
            )
        return attrs

    def create(self, validated_data: Dict[str, Any]) -> ScenarioConfig:
        return ScenarioConfig.from_dict(validated_data)


class ScenarioRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = ScenarioRun
        fields = [
            "task_id",
            "kind",
            "status",
            "passed",
            "report",
            "artifacts",
            "error",
        ]


def flatten_errors(errors, prefix: str = "") -> Dict[str, str]:
    """Turn nested serializer errors into ``{"time.dt": "message"}``."""
    flat: Dict[str, str] = {}
    if isinstance(errors, Mapping):
        for key, value in errors.items():
            path = key if not prefix else (prefix if key == "non_field_errors" else f"{prefix}.{key}")
            flat.update(flatten_errors(value, path))
    elif isinstance(errors, list) and errors and not isinstance(errors[0], (Mapping, list)):
        flat[prefix or "config"] = " ".join(str(error) for error in errors)
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            flat.update(flatten_errors(value, f"{prefix}[{index}]"))
    else:
        flat[prefix or "config"] = str(errors)
    return flat
