"""Scenario configuration: presets, default tolerances and the validated config object."""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict

from .enums import PotentialKind, ScenarioKind
from .evolution import Grid, HamiltonianSpec

SCHEMA_VERSION = 1

_COHERENT_WIDTH = math.sqrt(0.5)

_BASE_PRESET: Dict[str, Any] = {
    "schema_version": SCHEMA_VERSION,
    "grid": {"points": 1024, "half_width": 12.0, "self_dual": False},
    "hamiltonian": {"mass": 1.0, "potential": PotentialKind.HARMONIC.value, "stiffness": 1.0, "cubic": 0.0},
    "initial": {"center": 0.0, "width": _COHERENT_WIDTH, "momentum": 0.0, "separation": 6.0, "level": 0},
    "time": {"dt": 1e-3, "dt_out": 1e-2, "duration": 2.0, "order": 2},
    "trajectories": {"initial_points": [], "ensemble_size": 400, "substeps": 4},
    "tolerances": {},
    "seed": None,
    "output_dir": None,
}

_PRESET_OVERRIDES: Dict[str, Dict[str, Any]] = {
    ScenarioKind.GROUND_STATE: {
        "time": {"dt": 1e-4, "dt_out": 1e-2, "duration": 0.1, "order": 4},
        "trajectories": {"initial_points": [-1.0, -0.5, 0.0, 0.5, 1.0]},
    },
    ScenarioKind.COHERENT: {
        "initial": {"center": 2.0},
        "time": {"duration": 2 * math.pi, "order": 4},
        "trajectories": {"initial_points": [1.0, 1.5, 2.0, 2.5, 3.0]},
    },
    ScenarioKind.FREE_PACKET: {
        "hamiltonian": {"potential": PotentialKind.FREE.value, "stiffness": 0.0},
        "initial": {"width": 1.0},
        "trajectories": {"initial_points": [0.0]},
    },
    ScenarioKind.CUBIC: {
        "hamiltonian": {"potential": PotentialKind.CUBIC.value, "cubic": 0.05},
        "initial": {"center": 1.0},
        "time": {"dt": 1e-4},
    },
    ScenarioKind.TWO_SLIT_PRESET: {
        "grid": {"points": 2048, "half_width": 40.0},
        "hamiltonian": {"potential": PotentialKind.FREE.value, "stiffness": 0.0},
        "initial": {"width": 0.5, "separation": 6.0},
        "time": {"duration": 3.0},
        "trajectories": {"ensemble_size": 200, "substeps": 8},
    },
    ScenarioKind.LATTICE_DEMO: {"seed": 3},
    ScenarioKind.FILTER_DEMO: {"seed": 7},
    ScenarioKind.SPINOR_DEMO: {"seed": 11},
}

DEFAULT_TOLERANCES: Dict[str, Dict[str, float]] = {
    ScenarioKind.GROUND_STATE: {
        "norm_drift": 1e-10,
        "stationarity": 1e-8,
        "liouville_residual": 1e-8,
        "energy_residual": 1e-8,
        "eigenvalue_x": 1e-6,
        "eigenvalue_p": 1e-6,
        "excited_eigenvalue": 1e-4,
        "relabeling": 1e-8,
        "continuity_residual": 1e-8,
        "qhj_residual_x": 1e-6,
        "qhj_residual_p": 1e-6,
        "projected_closure": 1e-10,
        "static_trajectories": 1e-6,
    },
    ScenarioKind.COHERENT: {
        "liouville_residual": 1e-3,
        "energy_residual": 1e-3,
        "liouville_order": 0.2,
        "energy_order": 0.2,
        "continuity_residual": 1e-3,
        "continuity_residual_p": 1e-3,
        "qhj_residual_x": 1e-3,
        "qhj_residual_p": 1e-3,
        "projected_closure": 1e-10,
        "momentum_uniformity": 1e-5,
        "position_uniformity": 1e-5,
        "energy_conservation": 1e-6,
        "center_tracking": 1e-3,
        "rigid_translation": 1e-3,
        "ks_distance": 0.05,
        "crossings": 0.0,
        "phase_space_consistency": 1e-3,
    },
    ScenarioKind.FREE_PACKET: {
        "norm_drift": 1e-10,
        "width_spreading": 1e-3,
        "continuity_residual": 1e-3,
        "continuity_order": 0.2,
        "qhj_residual_x": 1e-3,
        "center_trajectory": 1e-6,
        "ks_distance": 0.05,
        "crossings": 0.0,
    },
    ScenarioKind.CUBIC: {
        "energy_conservation": 1e-6,
        "continuity_residual": 1e-3,
        "continuity_order": 0.2,
        "qhj_residual_x": 1e-3,
        "undefined_fields": 0.0,
    },
    ScenarioKind.TWO_SLIT_PRESET: {
        "norm_drift": 1e-8,
        "crossings": 0.0,
    },
    ScenarioKind.LATTICE_DEMO: {
        "distributivity_lhs": 1e-12,
        "distributivity_rhs": 1e-12,
        "commuting_distributivity": 1e-12,
        "de_morgan": 1e-12,
        "orthomodular_violations": 0.0,
        "boolean_blocks": 0.0,
        "axis_consistency": 1e-12,
    },
    ScenarioKind.FILTER_DEMO: {
        "stage_probabilities": 1e-12,
        "compatible_repetition": 1e-12,
        "unbiased_filters": 1e-12,
        "cubes_after_retest": 1e-12,
    },
    ScenarioKind.SPINOR_DEMO: {
        "algebra_axioms": 1e-12,
        "round_trip": 1e-14,
        "tabulated_components": 0.0,
        "purity": 1e-12,
        "spin_up_density": 1e-12,
        "polar_decomposition": 1e-12,
        "axis_expectation": 1e-12,
    },
}

CATALOGUE: Dict[str, str] = {
    ScenarioKind.GROUND_STATE: "stationary oscillator ground state: quantum potential Q + V = E in position and momentum space",
    ScenarioKind.COHERENT: "displaced oscillator state: commutator and anticommutator equations, projected closure, rigid Bohm flow",
    ScenarioKind.FREE_PACKET: "free Gaussian spreading: continuity equation convergence and symmetric trajectories",
    ScenarioKind.CUBIC: "anharmonic potential: energy conservation and finite Bohm fields beyond the harmonic case",
    ScenarioKind.TWO_SLIT_PRESET: "two-Gaussian interference under free evolution: lane-forming, non-crossing trajectories",
    ScenarioKind.LATTICE_DEMO: "projection lattice: failure of distributivity, orthomodular law, Boolean blocks",
    ScenarioKind.FILTER_DEMO: "sequential projective filters: incompatible properties re-sorted with probability 1/2",
    ScenarioKind.SPINOR_DEMO: "algebraic spinors in a minimal left ideal: column dictionary and pure density elements",
}


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Return ``base`` updated key by key with ``overrides``; nested mappings merge recursively."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def preset(kind: str) -> Dict[str, Any]:
    return deep_merge({**_BASE_PRESET, "kind": str(kind)}, _PRESET_OVERRIDES[ScenarioKind(kind)])


@dataclass(frozen=True)
class GridConfig:
    points: int = 1024
    half_width: float = 12.0
    self_dual: bool = False

    def build(self) -> Grid:
        if self.self_dual:
            return Grid.self_dual(self.points)
        return Grid.centered(self.points, self.half_width)


@dataclass(frozen=True)
class InitialConfig:
    center: float = 0.0
    width: float = _COHERENT_WIDTH
    momentum: float = 0.0
    separation: float = 6.0
    level: int = 0


@dataclass(frozen=True)
class TimeConfig:
    dt: float = 1e-3
    dt_out: float = 1e-2
    duration: float = 2.0
    order: int = 2

    @property
    def stride(self) -> int:
        return round(self.dt_out / self.dt)

    @property
    def n_steps(self) -> int:
        """Whole snapshot intervals that fit in ``duration``."""
        return self.stride * math.floor(self.duration / self.dt_out + 1e-9)


@dataclass(frozen=True)
class TrajectoryConfig:
    initial_points: tuple[float, ...] = ()
    ensemble_size: int = 400
    substeps: int = 4


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind
    grid: GridConfig = field(default_factory=GridConfig)
    hamiltonian: HamiltonianSpec = field(default_factory=HamiltonianSpec)
    initial: InitialConfig = field(default_factory=InitialConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    trajectories: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int | None = None
    output_dir: str | None = None
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> ScenarioConfig:
        """Build a config from already validated, preset-merged data."""
        trajectories = dict(data["trajectories"])
        trajectories["initial_points"] = tuple(trajectories.get("initial_points", ()))
        return cls(
            kind=ScenarioKind(data["kind"]),
            grid=GridConfig(**data["grid"]),
            hamiltonian=HamiltonianSpec(**data["hamiltonian"]),
            initial=InitialConfig(**data["initial"]),
            time=TimeConfig(**data["time"]),
            trajectories=TrajectoryConfig(**trajectories),
            tolerances=dict(data.get("tolerances") or {}),
            seed=data.get("seed"),
            output_dir=data.get("output_dir"),
            schema_version=data.get("schema_version", SCHEMA_VERSION),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = str(self.kind)
        data["hamiltonian"]["potential"] = str(self.hamiltonian.potential)
        data["trajectories"]["initial_points"] = list(self.trajectories.initial_points)
        return data

    def tolerance(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[self.kind][key]))

    def with_overrides(self, **changes) -> ScenarioConfig:
        return ScenarioConfig.from_dict(deep_merge(self.to_dict(), changes))
