"""Bohm phase spaces and trajectories guided by the local momentum field."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .enums import DifferentiationMethod, Representation, TrajectoryStatus
from .evolution import EvolutionTrace
from .exceptions import NodeCrossingError
from .projection import PolarField, phase_gradient, polar_sequence, require_representation

logger = logging.getLogger(__name__)

ESCAPE_MARGIN = 0.05
CROSSING_TOLERANCE = 1e-8
MIN_ENSEMBLE = 100


def bohm_momentum_field(field: PolarField, method: str = DifferentiationMethod.SPECTRAL) -> np.ndarray:
    """p_B(x) = dS/dx, NaN at nodes."""
    require_representation(field, Representation.POSITION)
    return phase_gradient(field, method)


def bohm_position_field(field: PolarField, method: str = DifferentiationMethod.SPECTRAL) -> np.ndarray:
    """x_B(p) = -dS_p/dp, NaN at nodes."""
    require_representation(field, Representation.MOMENTUM)
    return -phase_gradient(field, method)


@dataclass(frozen=True)
class PhaseSpacePoint:
    coordinate: float
    conjugate: float
    representation: str = Representation.POSITION

    @property
    def as_xp(self) -> tuple[float, float]:
        """The point written as (x, p) whichever representation produced it."""
        if self.representation == Representation.POSITION:
            return self.coordinate, self.conjugate
        return self.conjugate, self.coordinate


def phase_space(field: PolarField, method: str = DifferentiationMethod.SPECTRAL) -> tuple[PhaseSpacePoint, ...]:
    """The points (x, p_B(x)) or (x_B(p), p) of one frame, skipping nodes."""
    if field.representation == Representation.POSITION:
        conjugate = bohm_momentum_field(field, method)
    else:
        conjugate = bohm_position_field(field, method)

    coordinates = field.grid.points
    keep = np.isfinite(conjugate)
    return tuple(
        PhaseSpacePoint(float(q), float(c), field.representation)
        for q, c in zip(coordinates[keep], conjugate[keep])
    )


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    initial_position: float
    representation: str = Representation.POSITION
    status: str = TrajectoryStatus.COMPLETE

    @property
    def completed(self) -> bool:
        return self.status == TrajectoryStatus.COMPLETE

    @property
    def final_position(self) -> float:
        finite = self.positions[np.isfinite(self.positions)]
        return float(finite[-1])

    def displacement(self) -> np.ndarray:
        return self.positions - self.initial_position


class VelocityField:
    """p_B/m on the snapshot grid, linearly interpolated in space and in time."""

    def __init__(self, trace: EvolutionTrace, mass: float, method: str = DifferentiationMethod.SPECTRAL):
        require_representation(trace, Representation.POSITION)
        self.grid = trace.grid
        self.times = trace.times
        self.step = trace.dt_out if len(trace) > 1 else math.inf
        self.values = np.stack([bohm_momentum_field(polar, method) for polar in polar_sequence(trace)]) / mass

    def _row(self, row: int, positions: np.ndarray) -> np.ndarray:
        return np.interp(positions, self.grid.points, self.values[row])

    def __call__(self, time: float, positions: np.ndarray) -> np.ndarray:
        offset = (time - self.times[0]) / self.step
        lower = min(max(int(math.floor(offset)), 0), len(self.times) - 1)
        weight = offset - lower
        if lower == len(self.times) - 1 or weight <= 0:
            return self._row(lower, positions)
        return (1 - weight) * self._row(lower, positions) + weight * self._row(lower + 1, positions)


def _integrate(
    velocity: VelocityField,
    initial_positions: np.ndarray,
    substeps: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Fourth-order Runge-Kutta for a whole ensemble at once.

    Returns the sampled positions (T, n), NaN after a trajectory stops, and a status per
    trajectory.
    """
    grid = velocity.grid
    margin = ESCAPE_MARGIN * grid.length
    lower, upper = grid.origin + margin, grid.upper - margin

    times = velocity.times
    positions = np.full((len(times), len(initial_positions)), np.nan)
    positions[0] = initial_positions
    status = np.full(len(initial_positions), TrajectoryStatus.COMPLETE.value, dtype=object)

    current = np.array(initial_positions, dtype=float)
    active = np.ones(len(current), dtype=bool)
    for sample in range(1, len(times)):
        h = (times[sample] - times[sample - 1]) / substeps
        for substep in range(substeps):
            t = times[sample - 1] + substep * h
            x = current[active]
            k1 = velocity(t, x)
            k2 = velocity(t + h / 2, x + h / 2 * k1)
            k3 = velocity(t + h / 2, x + h / 2 * k2)
            k4 = velocity(t + h, x + h * k3)
            advanced = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

            indices = np.flatnonzero(active)
            node = ~np.isfinite(advanced)
            escaped = ~node & ((advanced < lower) | (advanced > upper))
            status[indices[node]] = TrajectoryStatus.NODE.value
            status[indices[escaped]] = TrajectoryStatus.ESCAPED.value
            current[indices] = advanced
            active[indices[node | escaped]] = False

        positions[sample, active] = current[active]
    return positions, status


def integrate_trajectory(
    trace: EvolutionTrace,
    initial_position: float,
    mass: float | None = None,
    substeps: int = 4,
    velocity: VelocityField | None = None,
) -> Trajectory:
    """
    Solve dx/dt = p_B(x, t)/m from ``initial_position`` through every snapshot of ``trace``.

    Args:
        trace (EvolutionTrace): a position-space trace.
        initial_position (float): starting point inside the grid interior.
        mass (float | None): particle mass, the trace Hamiltonian's by default.
        substeps (int): Runge-Kutta steps per snapshot interval.
        velocity (VelocityField | None): a field already built from ``trace``.

    Returns:
        Trajectory: sampled at the snapshot times; status ``escaped`` when the path
            leaves the grid interior.

    Raises:
        NodeCrossingError: when the velocity field is undefined along the path.
    """
    velocity = velocity or VelocityField(trace, _mass(trace, mass))
    grid = trace.grid
    margin = ESCAPE_MARGIN * grid.length
    if not grid.origin + margin <= initial_position <= grid.upper - margin:
        raise ValueError(f"initial position {initial_position} lies outside the grid interior")

    positions, status = _integrate(velocity, np.array([initial_position], dtype=float), substeps)
    if status[0] == TrajectoryStatus.NODE:
        stopped = trace.times[np.flatnonzero(np.isfinite(positions[:, 0]))[-1]]
        raise NodeCrossingError(f"trajectory from x0={initial_position} met a node after t={stopped:g}")

    return Trajectory(
        times=trace.times,
        positions=positions[:, 0],
        initial_position=float(initial_position),
        status=TrajectoryStatus(status[0]),
    )


def _mass(trace: EvolutionTrace, mass: float | None) -> float:
    if mass is not None:
        return mass
    if trace.hamiltonian is None:
        raise ValueError("a mass is required when the trace carries no Hamiltonian")
    return trace.hamiltonian.mass


def _cumulative_density(density: np.ndarray, points: np.ndarray, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell-edge abscissae and the piecewise-linear CDF of a sampled density."""
    edges = np.concatenate([[points[0] - spacing / 2], points + spacing / 2])
    cdf = np.concatenate([[0.0], np.cumsum(density)])
    return edges, cdf / cdf[-1]


def quantile_points(density: np.ndarray, points: np.ndarray, spacing: float, count: int) -> np.ndarray:
    """``count`` deterministic starting points at the mid-quantiles (i + 1/2)/count of the density."""
    edges, cdf = _cumulative_density(density, points, spacing)
    levels = (np.arange(count) + 0.5) / count
    return np.interp(levels, cdf, edges)


@dataclass(frozen=True, eq=False)
class EnsembleReport:
    trajectories: tuple[Trajectory, ...]
    times: np.ndarray
    ks_distances: np.ndarray
    crossing_violations: int
    node_terminations: int = 0
    escapes: int = 0
    bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bound", 2 / math.sqrt(len(self.trajectories)))

    @property
    def size(self) -> int:
        return len(self.trajectories)

    @property
    def max_ks_distance(self) -> float:
        return float(np.nanmax(self.ks_distances))

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "bound": self.bound,
            "max_ks_distance": self.max_ks_distance,
            "crossing_violations": self.crossing_violations,
            "node_terminations": self.node_terminations,
            "escapes": self.escapes,
            "checkpoints": [
                {"t": float(time), "ks_distance": float(distance)}
                for time, distance in zip(self.times, self.ks_distances)
            ],
        }


def trajectory_ensemble(
    trace: EvolutionTrace,
    size: int = 400,
    mass: float | None = None,
    substeps: int = 4,
    velocity: VelocityField | None = None,
) -> EnsembleReport:
    """
    Integrate ``size`` trajectories from quantile-spaced points of P(x, 0).

    Stopped trajectories are counted rather than raised. At every snapshot the surviving
    positions are compared with the evolved density by their Kolmogorov-Smirnov distance,
    and the ordering of consecutive trajectories is checked.
    """
    if size < MIN_ENSEMBLE:
        raise ValueError(f"an ensemble needs at least {MIN_ENSEMBLE} trajectories, got {size}")

    grid = trace.grid
    initial = quantile_points(trace[0].density, grid.points, grid.spacing, size)
    velocity = velocity or VelocityField(trace, _mass(trace, mass))
    positions, status = _integrate(velocity, initial, substeps)

    ks_distances = np.full(len(trace), np.nan)
    crossings = 0
    for row, snapshot in enumerate(trace):
        alive = positions[row][np.isfinite(positions[row])]
        if alive.size == 0:
            continue
        edges, cdf = _cumulative_density(snapshot.density, grid.points, grid.spacing)
        ks_distances[row] = stats.kstest(alive, lambda x: np.interp(x, edges, cdf)).statistic
        crossings += int(np.sum(np.diff(alive) < -CROSSING_TOLERANCE))

    trajectories = tuple(
        Trajectory(trace.times, positions[:, index], float(initial[index]), status=TrajectoryStatus(status[index]))
        for index in range(size)
    )
    report = EnsembleReport(
        trajectories=trajectories,
        times=trace.times,
        ks_distances=ks_distances,
        crossing_violations=crossings,
        node_terminations=int(np.sum(status == TrajectoryStatus.NODE.value)),
        escapes=int(np.sum(status == TrajectoryStatus.ESCAPED.value)),
    )
    if report.node_terminations:
        logger.info("%d of %d trajectories stopped at a node", report.node_terminations, size)
    return report


def phase_space_consistency(
    trajectory: Trajectory,
    trace: EvolutionTrace,
    mass: float | None = None,
    velocity: VelocityField | None = None,
) -> float:
    """
    max |p_B(x(t), t) - m dx/dt| along a trajectory, with dx/dt from second-order differences.

    Only samples with both neighbours available are compared.
    """
    mass = _mass(trace, mass)
    velocity = velocity or VelocityField(trace, mass)
    valid = np.flatnonzero(np.isfinite(trajectory.positions))
    if valid.size < 3:
        raise ValueError("phase-space consistency needs at least three trajectory samples")

    positions = trajectory.positions[: valid[-1] + 1]
    times = trajectory.times[: valid[-1] + 1]
    rate = np.gradient(positions, times)
    deviations = [
        abs(mass * velocity(times[index], np.array([positions[index]]))[0] - mass * rate[index])
        for index in range(1, len(positions) - 1)
    ]
    return float(np.max(deviations))
