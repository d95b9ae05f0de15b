"""Projection of an evolving state onto position or momentum phase space.

A wavefunction is split as R exp(iS). From R and S follow the probability density
P = R^2, the local momentum dS/dq, the quantum potential -(R''/R)/2mu and the two
real equations that the Schrodinger equation separates into: continuity and the
quantum Hamilton-Jacobi equation.

Both representations share one Hamiltonian form, H = -(1/2mu) d^2/dq^2 + U(q):
in position space mu = m and U = V(x); in momentum space mu = 1/K and U = p^2/2m.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .differentiation import (
    central_difference,
    spectral_derivative,
    time_derivative,
    wrapped_phase_derivative,
)
from .enums import DifferentiationMethod, PotentialKind, Representation
from .evolution import (
    EvolutionTrace,
    HamiltonianSpec,
    ResidualSeries,
    WaveField,
    hamiltonian_operator,
)
from .exceptions import (
    InsufficientSnapshotsError,
    RepresentationMismatchError,
    UnsupportedPotentialError,
    ZeroFieldError,
)

logger = logging.getLogger(__name__)

NODE_THRESHOLD = 1e-8
NODE_DOMINATED_FRACTION = 0.2
SUPPORT_LEVEL = 1e-4
EDGE_POINTS = 2


def require_representation(field, representation: str) -> None:
    if field.representation != representation:
        raise RepresentationMismatchError(
            f"expected a {Representation(representation).label.lower()}-representation field, "
            f"got {field.representation}"
        )


def _unwrap_from(phase: np.ndarray, anchor: int) -> np.ndarray:
    """Remove 2 pi jumps walking outwards from ``anchor`` in both directions."""
    right = np.unwrap(phase[anchor:])
    left = np.unwrap(phase[: anchor + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


@dataclass(frozen=True, eq=False)
class PolarField:
    wave: WaveField
    amplitude: np.ndarray
    phase: np.ndarray
    nodes: np.ndarray

    @property
    def grid(self):
        return self.wave.grid

    @property
    def representation(self) -> Representation:
        return self.wave.representation

    @property
    def time(self) -> float:
        return self.wave.time

    @property
    def wavefunction(self) -> np.ndarray:
        """The samples the field was derived from."""
        return self.wave.amplitude

    @property
    def anchor(self) -> int:
        return int(np.argmax(self.amplitude))

    def reconstruct(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)

    def shifted(self, constant: float) -> PolarField:
        return PolarField(self.wave, self.amplitude, self.phase + constant, self.nodes)

    def support(self, level: float = SUPPORT_LEVEL) -> np.ndarray:
        return (self.amplitude >= level * self.amplitude.max()) & ~self.nodes


def polar_fields(wave: WaveField, previous: PolarField | None = None) -> PolarField:
    """
    Split a field into amplitude R, unwrapped phase S and a node mask.

    The phase is unwrapped outwards from the point of largest R. When ``previous`` is
    given, S is shifted by a multiple of 2 pi so that its value at that point is
    continuous with the previous frame.

    Raises:
        ZeroFieldError: for an all-zero field.
    """
    amplitude = np.abs(wave.amplitude)
    peak = float(amplitude.max())
    if peak == 0:
        raise ZeroFieldError("cannot take the polar form of an all-zero field")

    anchor = int(np.argmax(amplitude))
    phase = _unwrap_from(np.angle(wave.amplitude), anchor)
    if previous is not None:
        phase = phase + 2 * np.pi * np.round((previous.phase[anchor] - phase[anchor]) / (2 * np.pi))

    return PolarField(wave=wave, amplitude=amplitude, phase=phase, nodes=amplitude < NODE_THRESHOLD * peak)


def polar_sequence(trace: EvolutionTrace | Iterable[WaveField]) -> tuple[PolarField, ...]:
    """Polar fields of consecutive snapshots with temporally anchored phases."""
    fields = []
    previous = None
    for wave in trace:
        previous = polar_fields(wave, previous)
        fields.append(previous)
    return tuple(fields)


def _dilate(mask: np.ndarray, reach: int) -> np.ndarray:
    dilated = mask.copy()
    for shift in range(1, reach + 1):
        dilated |= np.roll(mask, shift) | np.roll(mask, -shift)
    return dilated


@dataclass(frozen=True)
class _LocalDerivatives:
    gradient: np.ndarray
    curvature: np.ndarray
    nodes: np.ndarray
    first: np.ndarray | None = None
    second: np.ndarray | None = None


def _local_derivatives(field: PolarField, method: str) -> _LocalDerivatives:
    """dS/dq and R''/R, NaN where the field has a node."""
    spacing = field.grid.spacing
    method = DifferentiationMethod(method)

    if method == DifferentiationMethod.SPECTRAL:
        psi = field.wavefunction
        first = spectral_derivative(psi, spacing, order=1)
        second = spectral_derivative(psi, spacing, order=2)
        density = np.abs(psi) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            gradient = (psi.conj() * first).imag / density
            curvature = (psi.conj() * second).real / density + gradient**2
        nodes = field.nodes
    else:
        first = second = None
        nodes = _dilate(field.nodes, 2)
        log_amplitude = np.log(np.maximum(field.amplitude, np.finfo(float).tiny))
        gradient = wrapped_phase_derivative(field.phase, spacing)
        curvature = central_difference(log_amplitude, spacing, order=2) + central_difference(log_amplitude, spacing) ** 2

    gradient = np.where(nodes, np.nan, gradient)
    curvature = np.where(nodes, np.nan, curvature)
    return _LocalDerivatives(gradient=gradient, curvature=curvature, nodes=nodes, first=first, second=second)


def phase_gradient(field: PolarField, method: str = DifferentiationMethod.SPECTRAL) -> np.ndarray:
    return _local_derivatives(field, method).gradient


def _quantum_potential(field: PolarField, inertia: float, method: str) -> np.ndarray:
    curvature = _local_derivatives(field, method).curvature
    if math.isinf(inertia):
        return np.where(np.isnan(curvature), np.nan, 0.0)
    return -curvature / (2 * inertia)


def quantum_potential_x(
    field: PolarField, mass: float, method: str = DifferentiationMethod.SPECTRAL
) -> np.ndarray:
    """Q(x) = -R''/(2mR), NaN at nodes."""
    require_representation(field, Representation.POSITION)
    return _quantum_potential(field, mass, method)


def quantum_potential_p(
    field: PolarField, stiffness: float, method: str = DifferentiationMethod.SPECTRAL
) -> np.ndarray:
    """Q_p(p) = -K R_p''/(2R_p), NaN at nodes."""
    require_representation(field, Representation.MOMENTUM)
    return _quantum_potential(field, math.inf if stiffness == 0 else 1 / stiffness, method)


@dataclass(frozen=True, eq=False)
class ExplicateFrame:
    polar: PolarField
    density: np.ndarray
    phase_gradient: np.ndarray
    curvature: np.ndarray
    quantum_potential: np.ndarray
    potential: np.ndarray
    inertia: float
    method: str = DifferentiationMethod.SPECTRAL
    first_derivative: np.ndarray | None = None
    second_derivative: np.ndarray | None = None

    @property
    def time(self) -> float:
        return self.polar.time

    @property
    def grid(self):
        return self.polar.grid

    @property
    def representation(self) -> Representation:
        return self.polar.representation

    @property
    def nodes(self) -> np.ndarray:
        return np.isnan(self.phase_gradient)

    @property
    def flux(self) -> np.ndarray:
        """P dS/dq, defined at every point."""
        if self.first_derivative is not None:
            return (self.polar.wavefunction.conj() * self.first_derivative).imag
        return np.where(self.nodes, 0.0, self.density * self.phase_gradient)

    @property
    def current(self) -> np.ndarray:
        if math.isinf(self.inertia):
            return np.zeros_like(self.density)
        return self.flux / self.inertia


def explicate_frame(
    field: PolarField | WaveField,
    hamiltonian: HamiltonianSpec,
    method: str = DifferentiationMethod.SPECTRAL,
) -> ExplicateFrame:
    if isinstance(field, WaveField):
        field = polar_fields(field)

    operator = hamiltonian_operator(hamiltonian, field.grid, field.representation)
    derivatives = _local_derivatives(field, method)
    if math.isinf(operator.inertia):
        quantum_potential = np.where(derivatives.nodes, np.nan, 0.0)
    else:
        quantum_potential = -derivatives.curvature / (2 * operator.inertia)

    return ExplicateFrame(
        polar=field,
        density=field.amplitude**2,
        phase_gradient=derivatives.gradient,
        curvature=derivatives.curvature,
        quantum_potential=quantum_potential,
        potential=operator.potential,
        inertia=operator.inertia,
        method=DifferentiationMethod(method),
        first_derivative=derivatives.first,
        second_derivative=derivatives.second,
    )


def explicate_frames(
    source: EvolutionTrace | Sequence[PolarField],
    hamiltonian: HamiltonianSpec | None = None,
    method: str = DifferentiationMethod.SPECTRAL,
) -> tuple[ExplicateFrame, ...]:
    if isinstance(source, EvolutionTrace):
        hamiltonian = hamiltonian or source.hamiltonian
        source = polar_sequence(source)
    if hamiltonian is None:
        raise ValueError("a Hamiltonian is required to build explicate frames")
    return tuple(explicate_frame(field, hamiltonian, method) for field in source)


def support_mask(field: PolarField, level: float = SUPPORT_LEVEL, interior: float | None = None) -> np.ndarray:
    """Non-node points with R >= level * max R, optionally limited to the interior share of the grid."""
    mask = field.support(level)
    if interior is not None:
        mask &= field.grid.interior_mask(interior)
    return mask


def interior_node_fraction(nodes: np.ndarray) -> float:
    """Share of masked points between the first and last unmasked point."""
    unmasked = np.flatnonzero(~nodes)
    if unmasked.size == 0:
        return 1.0
    span = nodes[unmasked[0] : unmasked[-1] + 1]
    return float(np.mean(span))


def eigenvalue_deviation(
    frame: ExplicateFrame,
    energy: float,
    support_level: float = SUPPORT_LEVEL,
    interior: float = 0.8,
) -> float:
    """max |Q + U - energy| over the supported interior of a stationary frame."""
    mask = support_mask(frame.polar, support_level, interior)
    return float(np.max(np.abs(frame.quantum_potential[mask] + frame.potential[mask] - energy)))


@dataclass(frozen=True, eq=False)
class _FrameStack:
    frames: tuple[ExplicateFrame, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) < 3:
            raise InsufficientSnapshotsError(f"residuals need at least 3 frames, got {len(frames)}")
        first = frames[0]
        for frame in frames:
            if frame.grid != first.grid or frame.representation != first.representation:
                raise ValueError("all frames must share grid and representation")
        steps = np.diff([frame.time for frame in frames])
        if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("frames must be uniformly spaced in time")
        object.__setattr__(self, "frames", frames)

    @property
    def grid(self):
        return self.frames[0].grid

    @property
    def representation(self) -> Representation:
        return self.frames[0].representation

    @property
    def times(self) -> np.ndarray:
        return np.array([frame.time for frame in self.frames])

    @property
    def step(self) -> float:
        times = self.times
        return float((times[-1] - times[0]) / (len(times) - 1))

    def stack(self, attribute: str) -> np.ndarray:
        return np.stack([getattr(frame, attribute) for frame in self.frames])

    def phases(self) -> np.ndarray:
        return np.stack([frame.polar.phase for frame in self.frames])

    def edges(self) -> np.ndarray:
        mask = np.ones(self.grid.size, dtype=bool)
        mask[:EDGE_POINTS] = False
        mask[-EDGE_POINTS:] = False
        return mask

    def stencil_nodes(self, indices: np.ndarray, order: int) -> np.ndarray:
        nodes = self.stack("nodes")
        reach = order // 2
        combined = np.zeros((len(indices), self.grid.size), dtype=bool)
        for offset in range(-reach, reach + 1):
            combined |= nodes[indices + offset]
        return combined


def _root_mean_square(pointwise: np.ndarray, valid: np.ndarray) -> np.ndarray:
    values = np.empty(len(pointwise))
    for row, (residual, mask) in enumerate(zip(pointwise, valid)):
        values[row] = math.sqrt(float(np.mean(residual[mask] ** 2))) if mask.any() else math.nan
    return values


def _weighted_root_mean_square(pointwise: np.ndarray, weights: np.ndarray, valid: np.ndarray):
    values = np.empty(len(pointwise))
    offset_removed = np.empty(len(pointwise))
    for row, (residual, weight, mask) in enumerate(zip(pointwise, weights, valid)):
        if not mask.any():
            values[row] = offset_removed[row] = math.nan
            continue
        residual, weight = residual[mask], weight[mask]
        total = float(np.sum(weight))
        mean = float(np.sum(weight * residual)) / total
        values[row] = math.sqrt(float(np.sum(weight * residual**2)) / total)
        offset_removed[row] = math.sqrt(float(np.sum(weight * (residual - mean) ** 2)) / total)
    return values, offset_removed


def _warn_if_node_dominated(stack: _FrameStack, valid: np.ndarray, times: np.ndarray) -> None:
    for mask, time in zip(valid, times):
        fraction = interior_node_fraction(~mask)
        if fraction > NODE_DOMINATED_FRACTION:
            logger.warning("node-dominated grid: %.0f%% of the support is masked at t=%g", 100 * fraction, time)
            return


def _continuity(stack: _FrameStack, inertia: float, order: int) -> ResidualSeries:
    indices, density_rate = time_derivative(stack.stack("density"), stack.step, order=order)
    if math.isinf(inertia):
        divergence = np.zeros_like(density_rate)
    elif stack.frames[0].method == DifferentiationMethod.SPECTRAL:
        divergence = spectral_derivative(stack.stack("flux")[indices], stack.grid.spacing) / inertia
    else:
        divergence = central_difference(stack.stack("flux")[indices], stack.grid.spacing) / inertia

    pointwise = density_rate + divergence
    valid = ~stack.stack("nodes")[indices] & stack.edges()
    return ResidualSeries(stack.times[indices], _root_mean_square(pointwise, valid))


def continuity_residual_x(
    frames: Sequence[ExplicateFrame], mass: float | None = None, order: int = 2
) -> ResidualSeries:
    """
    Residual of dP/dt + d/dx (P dS/dx / m) = 0, RMS over non-node interior points.

    Args:
        frames: position-space frames at uniform times.
        mass (float | None): particle mass, the frames' own by default.
        order (int): time-differencing order, 2 or 4.
    """
    stack = _FrameStack(tuple(frames))
    require_representation(stack, Representation.POSITION)
    if mass is None:
        mass = stack.frames[0].inertia
    elif mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    return _continuity(stack, mass, order)


def continuity_residual_p(
    frames: Sequence[ExplicateFrame], stiffness: float | None = None, order: int = 2
) -> ResidualSeries:
    """Residual of dP/dt + d/dp (P K dS/dp) = 0 in momentum space."""
    stack = _FrameStack(tuple(frames))
    require_representation(stack, Representation.MOMENTUM)
    if stiffness is None:
        inertia = stack.frames[0].inertia
    else:
        inertia = math.inf if stiffness == 0 else 1 / stiffness
    return _continuity(stack, inertia, order)


def _hamilton_jacobi_pointwise(stack: _FrameStack, inertia: float, potential: np.ndarray, order: int):
    indices, phase_rate = time_derivative(stack.phases(), stack.step, order=order, wrap=True)
    gradient = stack.stack("phase_gradient")[indices]
    curvature = stack.stack("curvature")[indices]
    if math.isinf(inertia):
        pointwise = phase_rate + potential
    else:
        pointwise = phase_rate + (gradient**2 - curvature) / (2 * inertia) + potential
    valid = ~stack.stencil_nodes(indices, order) & stack.edges() & np.isfinite(pointwise)
    return indices, pointwise, valid


def _hamilton_jacobi(stack: _FrameStack, inertia: float, potential: np.ndarray, order: int) -> ResidualSeries:
    indices, pointwise, valid = _hamilton_jacobi_pointwise(stack, inertia, potential, order)
    times = stack.times[indices]
    _warn_if_node_dominated(stack, valid, times)
    weights = stack.stack("density")[indices]
    values, offset_removed = _weighted_root_mean_square(pointwise, weights, valid)
    return ResidualSeries(times, values, offset_removed)


def qhj_residual_x(frames: Sequence[ExplicateFrame], hamiltonian: HamiltonianSpec, order: int = 2) -> ResidualSeries:
    """
    Residual of dS/dt + (dS/dx)^2/2m + Q + V = 0, P-weighted RMS over non-node interior points.

    ``offset_removed`` holds the same aggregate after subtracting the weighted mean, which
    discounts a drift of the global phase constant.
    """
    stack = _FrameStack(tuple(frames))
    require_representation(stack, Representation.POSITION)
    return _hamilton_jacobi(stack, hamiltonian.mass, hamiltonian.potential_energy(stack.grid.points), order)


def qhj_residual_p(frames: Sequence[ExplicateFrame], hamiltonian: HamiltonianSpec, order: int = 2) -> ResidualSeries:
    """Residual of dS_p/dt + p^2/2m + K (dS_p/dp)^2/2 + Q_p = 0 in momentum space."""
    stack = _FrameStack(tuple(frames))
    require_representation(stack, Representation.MOMENTUM)
    if hamiltonian.potential == PotentialKind.CUBIC:
        raise UnsupportedPotentialError("the momentum-space Hamilton-Jacobi residual covers harmonic and free potentials")
    operator = hamiltonian_operator(hamiltonian, stack.grid, Representation.MOMENTUM)
    return _hamilton_jacobi(stack, operator.inertia, operator.potential, order)


@dataclass(frozen=True, eq=False)
class ProjectedEquations:
    """Both time-development equations projected onto the grid-cell diagonal, next to their polar forms."""

    basis: Representation
    liouville: ResidualSeries
    energy: ResidualSeries
    continuity: ResidualSeries
    hamilton_jacobi: ResidualSeries

    @property
    def continuity_gap(self) -> float:
        return float(np.max(np.abs(self.liouville.values - self.continuity.values)))

    @property
    def hamilton_jacobi_gap(self) -> float:
        return float(np.max(np.abs(self.energy.values - self.hamilton_jacobi.values)))


def projected_equations_check(
    trace: EvolutionTrace,
    hamiltonian: HamiltonianSpec | None = None,
    basis: str = Representation.POSITION,
    order: int = 2,
) -> ProjectedEquations:
    """
    Project the commutator and anticommutator equations onto cell projectors |a><a|.

    The diagonal of the commutator equation gives dP/dt - i<a|[rho, H]|a> = 0 and the
    diagonal of the anticommutator equation gives 2P dS/dt + <a|rho H + H rho|a> = 0.
    Dividing the second by 2P, both reduce to the continuity and Hamilton-Jacobi
    residuals, which are computed alongside with the same masks and aggregation.
    """
    hamiltonian = hamiltonian or trace.hamiltonian
    basis = Representation(basis)
    if basis == Representation.MOMENTUM and trace.representation == Representation.POSITION:
        trace = trace.to_momentum()
    require_representation(trace, basis)

    stack = _FrameStack(explicate_frames(trace, hamiltonian, DifferentiationMethod.SPECTRAL))
    inertia = stack.frames[0].inertia
    potential = stack.frames[0].potential

    psi = np.stack([frame.polar.wavefunction for frame in stack.frames])
    if math.isinf(inertia):
        h_psi = potential * psi
    else:
        h_psi = -stack.stack("second_derivative") / (2 * inertia) + potential * psi

    indices, density_rate = time_derivative(np.abs(psi) ** 2, stack.step, order=order)
    commutator = psi[indices] * h_psi[indices].conj() - h_psi[indices] * psi[indices].conj()
    liouville_pointwise = (density_rate - 1j * commutator).real
    liouville_valid = ~stack.stack("nodes")[indices] & stack.edges()
    liouville = ResidualSeries(stack.times[indices], _root_mean_square(liouville_pointwise, liouville_valid))

    hj_indices, hj_pointwise, hj_valid = _hamilton_jacobi_pointwise(stack, inertia, potential, order)
    _, phase_rate = time_derivative(stack.phases(), stack.step, order=order, wrap=True)
    density = stack.stack("density")[hj_indices]
    anticommutator = 2 * (psi[hj_indices].conj() * h_psi[hj_indices]).real
    with np.errstate(divide="ignore", invalid="ignore"):
        energy_pointwise = (2 * density * phase_rate + anticommutator) / (2 * density)
    energy_values, energy_offset = _weighted_root_mean_square(energy_pointwise, density, hj_valid)
    energy = ResidualSeries(stack.times[hj_indices], energy_values, energy_offset)

    if basis == Representation.POSITION:
        continuity = continuity_residual_x(stack.frames, order=order)
        hamilton_jacobi = qhj_residual_x(stack.frames, hamiltonian, order=order)
    else:
        continuity = continuity_residual_p(stack.frames, order=order)
        hamilton_jacobi = qhj_residual_p(stack.frames, hamiltonian, order=order)

    return ProjectedEquations(
        basis=basis,
        liouville=liouville,
        energy=energy,
        continuity=continuity,
        hamilton_jacobi=hamilton_jacobi,
    )
