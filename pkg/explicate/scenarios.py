"""Scenario pipelines: evolve, project, verify and export.

Every scenario kind has a runner that records named checks against tolerances. A run
passes when every check passes; the report and the CSV/JSON artifacts go to one output
directory.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Type

import numpy as np
import pandas as pd

from . import exports
from .clifford import PAULI, Multivector, Signature, matrix_rep
from .config import CATALOGUE, ScenarioConfig
from .enums import PotentialKind, Representation, ScenarioKind
from .evolution import (
    EvolutionTrace,
    Grid,
    convergence_order,
    energy_equation_residual,
    evolve,
    gaussian_packet,
    liouville_residual,
    oscillator_eigenstate,
    to_momentum,
    two_slit_packet,
)
from .exceptions import UnsupportedPotentialError
from .logic import (
    Projection,
    ProjectionLattice,
    boolean_blocks,
    complement,
    distributivity,
    distributivity_counterexample,
    join,
    meet,
    orthomodular_check,
    projection_from_axis,
    sequential_filter,
    sorting_experiment,
    two_qubit_lattice,
)
from .projection import (
    ExplicateFrame,
    continuity_residual_p,
    continuity_residual_x,
    eigenvalue_deviation,
    explicate_frame,
    explicate_frames,
    polar_fields,
    polar_sequence,
    projected_equations_check,
    qhj_residual_p,
    qhj_residual_x,
    quantum_potential_p,
    quantum_potential_x,
    support_mask,
)
from .spinors import (
    ColumnSpinor,
    algebraic_to_column,
    axis_spinor,
    column_to_algebraic,
    density_element,
    idempotent_expectation,
    polar_decompose,
    standard_idempotent,
)
from .trajectories import (
    VelocityField,
    bohm_momentum_field,
    bohm_position_field,
    integrate_trajectory,
    phase_space_consistency,
    trajectory_ensemble,
)

logger = logging.getLogger(__name__)

RELABELING_SUPPORT = 1e-2


@dataclass(frozen=True)
class Check:
    key: str
    name: str
    value: float
    tolerance: float
    passed: bool
    criterion: str

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ± {self.tolerance:g} (measured {self.value:.3e}; {self.criterion})"


@dataclass
class RunReport:
    kind: str
    checks: List[Check] = field(default_factory=list)
    runtime: float = 0.0
    artifacts: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return exports.to_jsonable(
            {
                "kind": self.kind,
                "passed": self.passed,
                "runtime_seconds": self.runtime,
                "checks": [
                    {
                        "key": check.key,
                        "name": check.name,
                        "value": check.value,
                        "tolerance": check.tolerance,
                        "passed": check.passed,
                        "criterion": check.criterion,
                    }
                    for check in self.checks
                ],
                "artifacts": self.artifacts,
                "details": self.details,
            }
        )

    def render(self) -> str:
        lines = [f"scenario {self.kind}: {'PASS' if self.passed else 'FAIL'} in {self.runtime:.2f}s"]
        lines.extend(f"  {check.describe()}" for check in self.checks)
        if self.artifacts:
            lines.append("  artifacts: " + ", ".join(self.artifacts))
        return "\n".join(lines)


class ScenarioRunner:
    kind: ScenarioKind

    def __init__(self, config: ScenarioConfig, writer: exports.ArtifactWriter):
        self.config = config
        self.writer = writer
        self.checks: List[Check] = []
        self.details: Dict[str, Any] = {}

    def check(self, key: str, value: float, criterion: str, name: str | None = None) -> Check:
        """Record ``value <= tolerance`` for the tolerance stored under ``key``."""
        tolerance = self.config.tolerance(key)
        value = float(value)
        check = Check(
            key=key,
            name=name or key.replace("_", " "),
            value=value,
            tolerance=tolerance,
            passed=math.isfinite(value) and value <= tolerance,
            criterion=criterion,
        )
        self.checks.append(check)
        return check

    def run(self) -> None:
        raise NotImplementedError


_RUNNERS: Dict[str, Type[ScenarioRunner]] = {}


def register(kind: ScenarioKind) -> Callable[[Type[ScenarioRunner]], Type[ScenarioRunner]]:
    def decorator(runner: Type[ScenarioRunner]) -> Type[ScenarioRunner]:
        runner.kind = kind
        _RUNNERS[kind] = runner
        return runner

    return decorator


def _max_abs(matrix) -> float:
    return float(np.max(np.abs(matrix)))


def _uniformity(frames: List[ExplicateFrame]) -> float:
    """Largest deviation of the phase gradient from its density-weighted mean on the support."""
    worst = 0.0
    for frame in frames:
        mask = support_mask(frame.polar, interior=0.8)
        values, weights = frame.phase_gradient[mask], frame.density[mask]
        mean = float(np.sum(values * weights) / np.sum(weights))
        worst = max(worst, float(np.max(np.abs(values - mean))))
    return worst


class WaveScenario(ScenarioRunner):
    """Shared plumbing of the scenarios that evolve a wavefunction."""

    def __init__(self, config: ScenarioConfig, writer: exports.ArtifactWriter):
        super().__init__(config, writer)
        self.hamiltonian = config.hamiltonian
        self.grid: Grid = config.grid.build()

    def require_potential(self, *kinds: PotentialKind) -> None:
        if self.hamiltonian.potential not in kinds:
            raise UnsupportedPotentialError(
                f"a {self.kind} run needs a {' or '.join(str(kind) for kind in kinds)} potential, "
                f"got {self.hamiltonian.potential}"
            )

    def evolve(self, wave) -> EvolutionTrace:
        timing = self.config.time
        trace = evolve(wave, self.hamiltonian, timing.dt, timing.n_steps, timing.dt_out)
        self.details["snapshots"] = len(trace)
        self.details["final_time"] = float(trace.times[-1])
        return trace

    def export_trace(self, trace: EvolutionTrace) -> None:
        stride = exports.checkpoint_stride(len(trace))
        self.writer.write_csv(
            "trace.csv",
            exports.trace_frame(trace, stride),
            f"{self.kind} wavefunction every {stride} snapshot(s): snapshot, t, coordinate, Re psi, Im psi",
        )

    def export_fields(self, frames, name: str) -> None:
        stride = exports.checkpoint_stride(len(frames))
        self.writer.write_csv(
            name,
            exports.field_frame(frames, stride),
            f"{self.kind} projected fields every {stride} snapshot(s)",
        )

    def export_residuals(self, series) -> None:
        self.writer.write_csv("residuals.csv", exports.residual_frame(series), f"{self.kind} residual norms per time")

    def export_trajectories(self, trajectories, ensemble=None) -> None:
        self.writer.write_csv(
            "trajectories.csv",
            exports.trajectory_frame(trajectories),
            f"{self.kind} Bohm trajectories: trajectory_id, t, x",
        )
        if ensemble is not None:
            self.writer.write_json("ensemble.json", ensemble.to_dict())

    def trajectories_from(self, trace: EvolutionTrace, velocity: VelocityField):
        return [
            integrate_trajectory(trace, x0, substeps=self.config.trajectories.substeps, velocity=velocity)
            for x0 in self.config.trajectories.initial_points
        ]


@register(ScenarioKind.GROUND_STATE)
class GroundStateScenario(WaveScenario):
    def run(self) -> None:
        self.require_potential(PotentialKind.HARMONIC)
        hamiltonian, order = self.hamiltonian, self.config.time.order
        omega = hamiltonian.frequency
        ground_energy, excited_energy = 0.5 * omega, 1.5 * omega
        self.details.update(ground_energy=ground_energy, excited_energy=excited_energy)

        ground = oscillator_eigenstate(self.grid, 0, hamiltonian)
        trace = self.evolve(ground)
        self.check("norm_drift", trace.norm_drift(), "unitary propagation")
        overlaps = np.array([abs(ground.inner(snapshot)) for snapshot in trace])
        self.check("stationarity", np.max(np.abs(1.0 - overlaps)), "stationary state stays put")

        liouville = liouville_residual(trace, hamiltonian, order)
        energy = energy_equation_residual(trace, hamiltonian, order)
        self.check("liouville_residual", liouville.maximum, "stationary commutator residual below 1e-8")
        self.check("energy_residual", energy.maximum, "stationary anticommutator residual below 1e-8")

        frames = explicate_frames(trace, hamiltonian)
        self.check(
            "eigenvalue_x",
            max(eigenvalue_deviation(frame, ground_energy) for frame in frames),
            "quantum potential identity Q + V = E",
            name=f"Q+V constant = {ground_energy:g}",
        )

        momentum_frame = explicate_frame(to_momentum(ground), hamiltonian)
        self.check(
            "eigenvalue_p",
            eigenvalue_deviation(momentum_frame, ground_energy),
            "momentum-space identity Q_p + p^2/2m = E",
            name=f"Q_p+p^2/2m constant = {ground_energy:g}",
        )

        excited_frame = explicate_frame(oscillator_eigenstate(self.grid, 1, hamiltonian), hamiltonian)
        self.check(
            "excited_eigenvalue",
            eigenvalue_deviation(excited_frame, excited_energy),
            "quantum potential identity off the node",
            name=f"excited Q+V constant = {excited_energy:g}",
        )
        self.check("relabeling", self.relabeling_deviation(), "x <-> p symmetry of the quantum potential")

        self.check("continuity_residual", continuity_residual_x(frames, order=order).maximum, "probability conservation")
        qhj_x = qhj_residual_x(frames, hamiltonian, order=order)
        self.check("qhj_residual_x", qhj_x.maximum, "position-space Hamilton-Jacobi equation")

        momentum_trace = trace.to_momentum()
        momentum_frames = explicate_frames(momentum_trace, hamiltonian)
        qhj_p = qhj_residual_p(momentum_frames, hamiltonian, order=order)
        self.check("qhj_residual_p", qhj_p.maximum, "momentum-space Hamilton-Jacobi equation")

        projected = projected_equations_check(trace, hamiltonian, Representation.POSITION, order=order)
        self.check(
            "projected_closure",
            max(projected.continuity_gap, projected.hamilton_jacobi_gap),
            "projected equations reduce to continuity and Hamilton-Jacobi",
        )

        velocity = VelocityField(trace, hamiltonian.mass)
        trajectories = self.trajectories_from(trace, velocity)
        drift = max((float(np.nanmax(np.abs(t.displacement()))) for t in trajectories), default=0.0)
        self.check("static_trajectories", drift, "static Bohm trajectories in a real stationary state")

        self.export_trace(trace)
        self.export_fields(frames, "fields_x.csv")
        self.export_fields(momentum_frames, "fields_p.csv")
        self.export_residuals(
            {
                "liouville": liouville,
                "energy": energy,
                "qhj_x": qhj_x,
                "qhj_p": qhj_p,
            }
        )
        if trajectories:
            self.export_trajectories(trajectories)

    def relabeling_deviation(self) -> float:
        """Compare Q(x) and Q_p(p) point by point for the ground state on a self-dual grid."""
        grid = Grid.self_dual(self.config.grid.points)
        hamiltonian = self.hamiltonian
        state = oscillator_eigenstate(grid, 0, hamiltonian)
        position = polar_fields(state)
        momentum = polar_fields(to_momentum(state))

        q_x = quantum_potential_x(position, hamiltonian.mass)
        q_p = quantum_potential_p(momentum, hamiltonian.stiffness)
        mask = (
            support_mask(position, RELABELING_SUPPORT, interior=0.8)
            & support_mask(momentum, RELABELING_SUPPORT, interior=0.8)
        )
        return float(np.max(np.abs(q_x[mask] - q_p[mask])))


@register(ScenarioKind.COHERENT)
class CoherentScenario(WaveScenario):
    def run(self) -> None:
        self.require_potential(PotentialKind.HARMONIC)
        hamiltonian, order, initial = self.hamiltonian, self.config.time.order, self.config.initial
        wave = gaussian_packet(self.grid, initial.center, initial.width, initial.momentum)
        trace = self.evolve(wave)

        liouville = liouville_residual(trace, hamiltonian, order)
        energy = energy_equation_residual(trace, hamiltonian, order)
        self.check("liouville_residual", liouville.maximum, "commutator residual below 1e-3 at dt_out = 1e-2")
        self.check("energy_residual", energy.maximum, "anticommutator residual below 1e-3 at dt_out = 1e-2")

        coarse = trace.subsample(2)
        liouville_order = convergence_order(liouville_residual(trace, hamiltonian, 2), liouville_residual(coarse, hamiltonian, 2))
        energy_order = convergence_order(
            energy_equation_residual(trace, hamiltonian, 2), energy_equation_residual(coarse, hamiltonian, 2)
        )
        self.details.update(liouville_order=liouville_order, energy_order=energy_order)
        self.check("liouville_order", abs(liouville_order - 2), "second-order convergence under dt_out halving")
        self.check("energy_order", abs(energy_order - 2), "second-order convergence under dt_out halving")

        frames = explicate_frames(trace, hamiltonian)
        continuity = continuity_residual_x(frames, order=order)
        qhj_x = qhj_residual_x(frames, hamiltonian, order=order)
        self.check("continuity_residual", continuity.maximum, "probability conservation in position space")
        self.check("qhj_residual_x", qhj_x.maximum, "position-space Hamilton-Jacobi equation")

        momentum_frames = explicate_frames(trace.to_momentum(), hamiltonian)
        continuity_p = continuity_residual_p(momentum_frames, order=order)
        qhj_p = qhj_residual_p(momentum_frames, hamiltonian, order=order)
        self.check("continuity_residual_p", continuity_p.maximum, "probability conservation in momentum space")
        self.check("qhj_residual_p", qhj_p.maximum, "momentum-space Hamilton-Jacobi equation")

        projected = projected_equations_check(trace, hamiltonian, Representation.POSITION, order=order)
        self.check(
            "projected_closure",
            max(projected.continuity_gap, projected.hamilton_jacobi_gap),
            "projected equations reduce to continuity and Hamilton-Jacobi to 1e-10",
        )
        self.check("momentum_uniformity", _uniformity(frames), "Bohm momentum of a coherent state is uniform in x")
        self.check("position_uniformity", _uniformity(momentum_frames), "Bohm position of a coherent state is uniform in p")

        energies = trace.energies(hamiltonian)
        self.check(
            "energy_conservation",
            np.max(np.abs(energies - energies[0])) / abs(energies[0]),
            "<H> conserved",
        )

        omega = hamiltonian.frequency
        times = trace.times - trace.times[0]
        classical = initial.center * np.cos(omega * times) + initial.momentum / (hamiltonian.mass * omega) * np.sin(omega * times)
        centers = trace.mean_positions()
        self.check("center_tracking", np.max(np.abs(centers - classical)), "packet centre follows the classical orbit")

        velocity = VelocityField(trace, hamiltonian.mass)
        trajectories = self.trajectories_from(trace, velocity)
        shift = centers - centers[0]
        rigid = max((float(np.max(np.abs(t.displacement() - shift))) for t in trajectories), default=0.0)
        self.check("rigid_translation", rigid, "trajectories translate rigidly with the packet over one period")

        ensemble = trajectory_ensemble(
            trace, self.config.trajectories.ensemble_size, substeps=self.config.trajectories.substeps, velocity=velocity
        )
        self.check("ks_distance", ensemble.max_ks_distance, "equivariance of the |psi|^2 ensemble")
        self.check("crossings", ensemble.crossing_violations, "no-crossing of one-dimensional trajectories")
        if trajectories:
            self.check(
                "phase_space_consistency",
                phase_space_consistency(trajectories[0], trace, velocity=velocity),
                "p_B along a trajectory equals m dx/dt",
            )

        self.export_trace(trace)
        self.export_fields(frames, "fields_x.csv")
        self.export_fields(momentum_frames, "fields_p.csv")
        self.export_residuals(
            {
                "liouville": liouville,
                "energy": energy,
                "continuity_x": continuity,
                "qhj_x": qhj_x,
                "continuity_p": continuity_p,
                "qhj_p": qhj_p,
            }
        )
        self.export_trajectories(trajectories or ensemble.trajectories, ensemble)


@register(ScenarioKind.FREE_PACKET)
class FreePacketScenario(WaveScenario):
    def run(self) -> None:
        self.require_potential(PotentialKind.FREE)
        hamiltonian, order, initial = self.hamiltonian, self.config.time.order, self.config.initial
        wave = gaussian_packet(self.grid, initial.center, initial.width, initial.momentum)
        trace = self.evolve(wave)
        self.check("norm_drift", trace.norm_drift(), "unitary propagation")

        times = trace.times - trace.times[0]
        expected = initial.width * np.sqrt(1 + (times / (2 * hamiltonian.mass * initial.width**2)) ** 2)
        self.check("width_spreading", np.max(np.abs(trace.widths() - expected) / expected), "free Gaussian spreading law")

        frames = explicate_frames(trace, hamiltonian)
        continuity = continuity_residual_x(frames, order=order)
        continuity_order = convergence_order(continuity_residual_x(frames), continuity_residual_x(frames[::2]))
        self.details["continuity_order"] = continuity_order
        qhj_x = qhj_residual_x(frames, hamiltonian, order=order)
        self.check("continuity_residual", continuity.maximum, "probability conservation")
        self.check("continuity_order", abs(continuity_order - 2), "second-order convergence under dt_out halving")
        self.check("qhj_residual_x", qhj_x.maximum, "position-space Hamilton-Jacobi equation")

        velocity = VelocityField(trace, hamiltonian.mass)
        centre = integrate_trajectory(trace, initial.center, substeps=self.config.trajectories.substeps, velocity=velocity)
        drift = centre.positions - initial.center - initial.momentum / hamiltonian.mass * times
        self.check("center_trajectory", np.max(np.abs(drift)), "the trajectory from the centre stays on the centre")

        ensemble = trajectory_ensemble(
            trace, self.config.trajectories.ensemble_size, substeps=self.config.trajectories.substeps, velocity=velocity
        )
        self.check("ks_distance", ensemble.max_ks_distance, "equivariance of the |psi|^2 ensemble")
        self.check("crossings", ensemble.crossing_violations, "no-crossing of one-dimensional trajectories")

        self.export_trace(trace)
        self.export_fields(frames, "fields_x.csv")
        self.export_residuals({"continuity_x": continuity, "qhj_x": qhj_x})
        self.export_trajectories([centre], ensemble)


@register(ScenarioKind.CUBIC)
class CubicScenario(WaveScenario):
    def run(self) -> None:
        self.require_potential(PotentialKind.CUBIC)
        hamiltonian, order, initial = self.hamiltonian, self.config.time.order, self.config.initial
        wave = gaussian_packet(self.grid, initial.center, initial.width, initial.momentum)
        trace = self.evolve(wave)

        energies = trace.energies(hamiltonian)
        self.check("energy_conservation", np.max(np.abs(energies - energies[0])) / abs(energies[0]), "<H> conserved")

        frames = explicate_frames(trace, hamiltonian)
        continuity = continuity_residual_x(frames, order=order)
        continuity_order = convergence_order(continuity_residual_x(frames), continuity_residual_x(frames[::2]))
        self.details["continuity_order"] = continuity_order
        qhj_x = qhj_residual_x(frames, hamiltonian, order=order)
        self.check("continuity_residual", continuity.maximum, "probability conservation beyond the harmonic case")
        self.check("continuity_order", abs(continuity_order - 2), "second-order convergence under dt_out halving")
        self.check("qhj_residual_x", qhj_x.maximum, "position-space Hamilton-Jacobi equation with a cubic term")

        momentum_polars = polar_sequence(trace.to_momentum())
        undefined = sum(
            int(np.sum(~np.isfinite(bohm_momentum_field(frame.polar)) & ~frame.polar.nodes)) for frame in frames
        ) + sum(int(np.sum(~np.isfinite(bohm_position_field(polar)) & ~polar.nodes)) for polar in momentum_polars)
        self.check("undefined_fields", undefined, "p_B and x_B finite away from nodes")

        self.export_trace(trace)
        self.export_fields(frames, "fields_x.csv")
        stride = exports.checkpoint_stride(len(momentum_polars))
        self.writer.write_csv(
            "fields_p.csv",
            exports.bohm_field_frame(momentum_polars, stride),
            f"{self.kind} momentum-space fields every {stride} snapshot(s)",
        )
        self.export_residuals({"continuity_x": continuity, "qhj_x": qhj_x})


@register(ScenarioKind.TWO_SLIT_PRESET)
class TwoSlitScenario(WaveScenario):
    def run(self) -> None:
        self.require_potential(PotentialKind.FREE)
        initial, settings = self.config.initial, self.config.trajectories
        wave = two_slit_packet(self.grid, initial.separation, initial.width, initial.momentum)
        trace = self.evolve(wave)
        self.check("norm_drift", trace.norm_drift(), "unitary propagation")

        ensemble = trajectory_ensemble(trace, settings.ensemble_size, substeps=settings.substeps)
        self.check("crossings", ensemble.crossing_violations, "interference lanes never cross")
        self.details.update(
            node_terminations=ensemble.node_terminations,
            escapes=ensemble.escapes,
            max_ks_distance=ensemble.max_ks_distance,
        )

        self.export_trace(trace)
        self.export_fields(explicate_frames(trace, self.hamiltonian), "fields_x.csv")
        self.export_trajectories(ensemble.trajectories, ensemble)


def _matrix_json(projection: Projection) -> Dict[str, Any]:
    return {"label": projection.label, "re": projection.matrix.real, "im": projection.matrix.imag}


@register(ScenarioKind.LATTICE_DEMO)
class LatticeDemo(ScenarioRunner):
    def run(self) -> None:
        counterexample = distributivity_counterexample()
        self.check(
            "distributivity_lhs",
            _max_abs(counterexample.lhs.matrix - counterexample.a.matrix),
            "A ^ (B v C) = P_z+",
            name="A ^ (B v C) = Pz+",
        )
        self.check(
            "distributivity_rhs",
            _max_abs(counterexample.rhs.matrix),
            "(A ^ B) v (A ^ C) = 0",
            name="(A ^ B) v (A ^ C) = 0",
        )

        up_z, down_z = projection_from_axis((0, 0, 1)), projection_from_axis((0, 0, 1), -1)
        up_x = projection_from_axis((1, 0, 0))
        commuting = distributivity(up_z, up_z, down_z)
        self.check(
            "commuting_distributivity",
            _max_abs(commuting.lhs.matrix - commuting.rhs.matrix),
            "distributivity holds for commuting projections",
        )

        spin_lattice = ProjectionLattice.generate([up_z, up_x])
        blocks = boolean_blocks(spin_lattice)
        self.check("boolean_blocks", abs(len(blocks) - 2), "two Boolean blocks: the z and x contexts")

        lattice = two_qubit_lattice()
        orthomodular = orthomodular_check(lattice)
        self.check("orthomodular_violations", len(orthomodular.violations), "orthomodular law on the two-spin lattice")
        de_morgan = max(
            _max_abs(complement(meet(p, q)).matrix - join(complement(p), complement(q)).matrix)
            for p, q in itertools.product(lattice.elements, repeat=2)
        )
        self.check("de_morgan", de_morgan, "De Morgan duality")

        rng = np.random.default_rng(self.config.seed)
        axes = rng.normal(size=(16, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        axis_deviation = max(
            max(
                _max_abs(projection_from_axis(axis).matrix - matrix_rep(standard_idempotent(axis).element)),
                _max_abs(projection_from_axis(axis).matrix + projection_from_axis(axis, -1).matrix - np.eye(2)),
            )
            for axis in axes
        )
        self.check("axis_consistency", axis_deviation, "projections agree with idempotents and resolve the identity")

        probabilities = sequential_filter([up_z, up_x, up_z], np.eye(2) / 2).probabilities
        self.details.update(
            spin_lattice_size=len(spin_lattice),
            two_qubit_lattice_size=len(lattice),
            comparable_pairs=orthomodular.comparable_pairs,
            filter_probabilities=probabilities,
        )
        self.writer.write_json(
            "lattice.json",
            {
                "counterexample": {
                    "a": _matrix_json(counterexample.a),
                    "b": _matrix_json(counterexample.b),
                    "c": _matrix_json(counterexample.c),
                    "lhs": _matrix_json(counterexample.lhs),
                    "rhs": _matrix_json(counterexample.rhs),
                    "violated": counterexample.violated,
                },
                "blocks": [[element.label for element in block] for block in blocks],
                "two_qubit_lattice": {
                    "size": len(lattice),
                    "comparable_pairs": orthomodular.comparable_pairs,
                    "violations": orthomodular.violations,
                },
                "filter_probabilities": probabilities,
            },
        )


@register(ScenarioKind.FILTER_DEMO)
class FilterDemo(ScenarioRunner):
    samples = 200

    def run(self) -> None:
        up_z, down_z = projection_from_axis((0, 0, 1)), projection_from_axis((0, 0, 1), -1)
        up_x, down_x = projection_from_axis((1, 0, 0)), projection_from_axis((1, 0, 0), -1)

        stages = sequential_filter([up_z, up_x, up_z], np.eye(2) / 2).probabilities
        self.details["stage_probabilities"] = stages
        self.check(
            "stage_probabilities",
            max(abs(probability - 0.5) for probability in stages),
            "re-testing shape after colour passes half the objects",
            name="stage probabilities " + str(tuple(round(probability, 12) for probability in stages)),
        )

        repeated = sequential_filter([up_z, up_z], ColumnSpinor(1, 0)).probabilities
        self.check("compatible_repetition", max(abs(p - 1.0) for p in repeated), "compatible filters repeat with certainty")

        rng = np.random.default_rng(self.config.seed)
        rows = []
        worst = 0.0
        for index in range(self.samples):
            state = ColumnSpinor.random(rng)
            for first, second in ((up_z, up_x), (down_z, down_x), (up_x, down_z), (down_x, up_z)):
                result = sequential_filter([first, second], state)
                worst = max(worst, abs(result.probabilities[1] - 0.5))
                rows.append(
                    {
                        "state_id": index,
                        "psi1_re": state.psi1.real,
                        "psi1_im": state.psi1.imag,
                        "psi2_re": state.psi2.real,
                        "psi2_im": state.psi2.imag,
                        "first_filter": first.label,
                        "second_filter": second.label,
                        "p_first": result.probabilities[0],
                        "p_second": result.probabilities[1],
                    }
                )
        self.check("unbiased_filters", worst, "z then x filters pass 1/2 for every input state")

        sorting = sorting_experiment()
        self.check("cubes_after_retest", abs(sorting["cubes_after_retest"] - 0.5), "half the red spheres are now cubes")

        self.writer.write_csv("filters.csv", pd.DataFrame(rows), "second-stage probabilities for random input states")
        self.writer.write_json(
            "filter.json",
            {
                "stage_probabilities": stages,
                "sorting_groups": sorting["groups"],
                "cubes_after_retest": sorting["cubes_after_retest"],
            },
        )


def _random_element(rng: np.random.Generator, signature: Signature) -> Multivector:
    return Multivector(signature, rng.normal(size=signature.size) + 1j * rng.normal(size=signature.size))


@register(ScenarioKind.SPINOR_DEMO)
class SpinorDemo(ScenarioRunner):
    samples = 1000
    axiom_samples = 500
    signatures = (Signature(3, 0), Signature(0, 1), Signature(0, 2), Signature(1, 3))

    def run(self) -> None:
        rng = np.random.default_rng(self.config.seed)
        self.check("algebra_axioms", self.axiom_deviation(rng), "associativity, anticommutation, tilde, matrix image")

        spinors = [ColumnSpinor.random(rng) for _ in range(self.samples)]
        round_trip = max(
            _max_abs(algebraic_to_column(column_to_algebraic(spinor)).as_array() - spinor.as_array()) for spinor in spinors
        )
        self.check("round_trip", round_trip, "column <-> ideal dictionary is a bijection")

        tabulated = {(1, 0): (1, 0, 0, 0), (0, 1): (0, 0, 1, 0), (1j, 0): (0, 0, 0, 1)}
        self.check(
            "tabulated_components",
            max(
                _max_abs(np.subtract(column_to_algebraic(ColumnSpinor(*column)).components, expected))
                for column, expected in tabulated.items()
            ),
            "tabulated (g0, g1, g2, g3) values",
        )

        purity = 0.0
        rows = []
        for index, spinor in enumerate(spinors):
            algebraic = column_to_algebraic(spinor)
            rho = density_element(algebraic)
            purity = max(purity, _max_abs((rho.element * rho.element - rho.element).coefficients), abs(rho.trace - 1.0))
            if index < 16:
                rows.append(
                    {
                        "psi1_re": spinor.psi1.real,
                        "psi1_im": spinor.psi1.imag,
                        "psi2_re": spinor.psi2.real,
                        "psi2_im": spinor.psi2.imag,
                        **dict(zip(("g0", "g1", "g2", "g3"), algebraic.components)),
                        **dict(zip(("bloch_x", "bloch_y", "bloch_z"), rho.bloch_vector)),
                    }
                )
        self.check("purity", purity, "rho^2 = rho and tr rho = 1 for pure states")

        up = density_element(column_to_algebraic(ColumnSpinor(1, 0)))
        self.check(
            "spin_up_density",
            up.element.max_deviation(standard_idempotent().element),
            "rho for (1, 0) equals (1 + e3)/2",
        )

        polar = 0.0
        unique = 0
        for spinor in spinors[:100]:
            algebraic = column_to_algebraic(spinor)
            decomposition = polar_decompose(algebraic)
            product = matrix_rep(decomposition.positive * decomposition.unitary)
            polar = max(polar, _max_abs(product - matrix_rep(algebraic.element)))
            unique += decomposition.unique
        self.details["unique_polar_decompositions"] = unique
        self.check("polar_decomposition", polar, "Psi = R U reproduces the spinor")

        axes = rng.normal(size=(32, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        expectation = max(
            abs(idempotent_expectation(density_element(axis_spinor(axis)), standard_idempotent(axis)) - 1.0)
            for axis in axes
        )
        self.check("axis_expectation", expectation, "spin-up along n realizes E(n) with weight 1")

        self.writer.write_csv("spinors.csv", pd.DataFrame(rows), "column spinors, ideal components and Bloch vectors")

    def axiom_deviation(self, rng: np.random.Generator) -> float:
        worst = 0.0
        for signature in self.signatures:
            for _ in range(self.axiom_samples):
                a, b, c = (_random_element(rng, signature) for _ in range(3))
                worst = max(worst, ((a * b) * c).max_deviation(a * (b * c)))
                worst = max(worst, (~(a * b)).max_deviation(~b * ~a))
                if signature == PAULI:
                    worst = max(worst, _max_abs(matrix_rep(a * b) - matrix_rep(a) @ matrix_rep(b)))
            for i, j in itertools.product(range(1, signature.dimension + 1), repeat=2):
                e_i, e_j = Multivector.generator(signature, i), Multivector.generator(signature, j)
                expected = Multivector.scalar(signature, 2 * signature.square(i - 1) if i == j else 0)
                worst = max(worst, (e_i * e_j + e_j * e_i).max_deviation(expected))
        return worst


def list_scenarios() -> List[Dict[str, str]]:
    return [{"kind": kind, "description": CATALOGUE[kind]} for kind in ScenarioKind.values]


def default_output_dir(config: ScenarioConfig) -> Path:
    return Path(config.output_dir) if config.output_dir else Path("runs") / str(config.kind)


def run_scenario(config: ScenarioConfig, output_dir: Path | str | None = None) -> RunReport:
    """
    Run one scenario and write its artifacts and ``report.json``.

    Args:
        config (ScenarioConfig): a validated configuration.
        output_dir (Path | str | None): overrides the configured output directory.

    Returns:
        RunReport: the checks, runtime and artifact list.
    """
    directory = Path(output_dir) if output_dir else default_output_dir(config)
    writer = exports.ArtifactWriter(directory)
    runner = _RUNNERS[config.kind](config, writer)

    logger.info("running %s scenario into %s", config.kind, directory)
    started = time.perf_counter()
    runner.run()
    report = RunReport(
        kind=str(config.kind),
        checks=runner.checks,
        runtime=time.perf_counter() - started,
        artifacts=[*writer.files, "report.json"],
        details=runner.details,
    )
    writer.write_json("report.json", report.to_dict())

    for failure in report.failures:
        logger.warning("%s check failed: %s", config.kind, failure.describe())
    logger.info("%s scenario %s in %.2fs", config.kind, "passed" if report.passed else "failed", report.runtime)
    return report
