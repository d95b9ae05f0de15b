from django.db import models
from django.utils.translation import gettext_lazy as _


class Status(models.TextChoices):
    PROCESSING = "PROCESSING", _("PROCESSING")
    SUCCESS = "SUCCESS", _("SUCCESS")
    FAILED = "FAILED", _("FAILED")


class ScenarioKind(models.TextChoices):
    GROUND_STATE = "ground_state", _("Ground state")
    COHERENT = "coherent", _("Coherent state")
    FREE_PACKET = "free_packet", _("Free packet")
    CUBIC = "cubic", _("Cubic potential")
    TWO_SLIT_PRESET = "two_slit_preset", _("Two-slit preset")
    LATTICE_DEMO = "lattice_demo", _("Lattice demo")
    FILTER_DEMO = "filter_demo", _("Filter demo")
    SPINOR_DEMO = "spinor_demo", _("Spinor demo")


class Representation(models.TextChoices):
    POSITION = "position", _("Position")
    MOMENTUM = "momentum", _("Momentum")


class PotentialKind(models.TextChoices):
    HARMONIC = "harmonic", _("Harmonic")
    CUBIC = "cubic", _("Cubic")
    FREE = "free", _("Free")


class DifferentiationMethod(models.TextChoices):
    SPECTRAL = "spectral", _("Spectral")
    FINITE_DIFFERENCE = "fd4", _("Fourth-order finite differences")


class TrajectoryStatus(models.TextChoices):
    COMPLETE = "complete", _("Complete")
    NODE = "node", _("Stopped at a node")
    ESCAPED = "escaped", _("Escaped the grid interior")
