from rest_framework.exceptions import ValidationError

from .config import SCHEMA_VERSION


def validate_power_of_two(value: int) -> None:
    """
    Grid sizes must be powers of two, at least 8.
    """
    if value < 8 or value & (value - 1):
        raise ValidationError(f"{value} is not a power of two of at least 8.")


def validate_schema_version(value: int) -> None:
    if value != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema version {value}, expected {SCHEMA_VERSION}.")


def validate_positive(value: float) -> None:
    if not value > 0:
        raise ValidationError("must be positive.")
