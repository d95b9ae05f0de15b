"""One-dimensional wavefunctions, split-step propagation and time-development residuals.

Units have hbar = 1. Fields live on uniform periodic grids whose size is a power of two.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .differentiation import spectral_derivative, time_derivative, wavenumbers
from .enums import PotentialKind, Representation
from .exceptions import (
    DomainOverflowError,
    InstabilityError,
    InsufficientSnapshotsError,
    RepresentationMismatchError,
    UnsupportedPotentialError,
    ZeroFieldError,
)

logger = logging.getLogger(__name__)

INSTABILITY_THRESHOLD = 1e-6
BOUNDARY_FRACTION = 0.05
PACKET_EXTENT = 6.0


@dataclass(frozen=True)
class Grid:
    origin: float
    spacing: float
    size: int

    def __post_init__(self):
        if self.size < 8 or self.size & (self.size - 1):
            raise ValueError(f"grid size must be a power of two of at least 8, got {self.size}")
        if not math.isfinite(self.spacing) or self.spacing <= 0:
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")

    @classmethod
    def centered(cls, size: int, half_width: float) -> Grid:
        """The periodic grid on [-half_width, half_width)."""
        return cls(origin=-half_width, spacing=2 * half_width / size, size=size)

    @classmethod
    def self_dual(cls, size: int) -> Grid:
        """A centered grid whose reciprocal grid has the same points."""
        spacing = math.sqrt(2 * math.pi / size)
        return cls(origin=-size / 2 * spacing, spacing=spacing, size=size)

    @functools.cached_property
    def points(self) -> np.ndarray:
        points = self.origin + self.spacing * np.arange(self.size)
        points.setflags(write=False)
        return points

    @property
    def length(self) -> float:
        return self.size * self.spacing

    @property
    def upper(self) -> float:
        """The periodic image of ``origin``; not itself a grid point."""
        return self.origin + self.length

    @property
    def center(self) -> float:
        return self.origin + self.length / 2

    def reciprocal(self) -> Grid:
        return Grid(origin=-math.pi / self.spacing, spacing=2 * math.pi / self.length, size=self.size)

    def interior_mask(self, fraction: float = 0.8) -> np.ndarray:
        return np.abs(self.points - self.center) <= fraction * self.length / 2

    def boundary_mask(self, fraction: float = BOUNDARY_FRACTION) -> np.ndarray:
        return ~self.interior_mask(1 - 2 * fraction)

    def contains(self, lower: float, upper: float) -> bool:
        return self.origin <= lower and upper <= self.upper


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: Grid
    amplitude: np.ndarray
    representation: str = Representation.POSITION
    time: float = 0.0

    def __post_init__(self):
        amplitude = np.array(self.amplitude, dtype=complex)
        if amplitude.shape != (self.grid.size,):
            raise ValueError(f"amplitude must have {self.grid.size} samples, got shape {amplitude.shape}")
        amplitude.setflags(write=False)
        object.__setattr__(self, "amplitude", amplitude)
        object.__setattr__(self, "representation", Representation(self.representation))
        object.__setattr__(self, "time", float(self.time))

    @property
    def coordinates(self) -> np.ndarray:
        return self.grid.points

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.density)) * self.grid.spacing)

    def normalized(self) -> WaveField:
        norm = self.norm()
        if norm == 0:
            raise ZeroFieldError("cannot normalize an all-zero field")
        return self.with_amplitude(self.amplitude / norm)

    def inner(self, other: WaveField) -> complex:
        return complex(np.sum(self.amplitude.conj() * other.amplitude) * self.grid.spacing)

    def mean(self) -> float:
        density = self.density
        return float(np.sum(self.coordinates * density) / np.sum(density))

    def width(self) -> float:
        density = self.density
        mean = self.mean()
        return math.sqrt(float(np.sum((self.coordinates - mean) ** 2 * density) / np.sum(density)))

    def with_amplitude(self, amplitude, time: float | None = None) -> WaveField:
        return WaveField(
            grid=self.grid,
            amplitude=amplitude,
            representation=self.representation,
            time=self.time if time is None else time,
        )


@dataclass(frozen=True)
class HamiltonianSpec:
    """H = p^2/2m + V(x) with V = K x^2/2 (+ c3 x^3 for the cubic kind, nothing for the free kind)."""

    mass: float = 1.0
    potential: str = PotentialKind.HARMONIC
    stiffness: float = 1.0
    cubic: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "potential", PotentialKind(self.potential))
        if not math.isfinite(self.mass) or self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (math.isfinite(self.stiffness) and math.isfinite(self.cubic)):
            raise ValueError("potential parameters must be finite")
        if self.potential == PotentialKind.HARMONIC and self.stiffness <= 0:
            raise ValueError(f"a harmonic potential needs a positive stiffness, got {self.stiffness}")

    @property
    def quadratic(self) -> float:
        return 0.0 if self.potential == PotentialKind.FREE else self.stiffness

    @property
    def frequency(self) -> float:
        if self.potential != PotentialKind.HARMONIC:
            raise UnsupportedPotentialError(f"a {self.potential} potential has no oscillator frequency")
        return math.sqrt(self.stiffness / self.mass)

    def potential_energy(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        energy = 0.5 * self.quadratic * x**2
        if self.potential == PotentialKind.CUBIC:
            energy = energy + self.cubic * x**3
        return energy


@dataclass(frozen=True, eq=False)
class RepresentationOperator:
    """H = -(1/2 mu) d^2/dq^2 + U(q) acting along the last axis; an infinite mu drops the derivative."""

    grid: Grid
    inertia: float
    potential: np.ndarray

    def kinetic(self, amplitude) -> np.ndarray:
        amplitude = np.asarray(amplitude, dtype=complex)
        if math.isinf(self.inertia):
            return np.zeros_like(amplitude)
        return -spectral_derivative(amplitude, self.grid.spacing, order=2) / (2 * self.inertia)

    def apply(self, amplitude) -> np.ndarray:
        amplitude = np.asarray(amplitude, dtype=complex)
        return self.kinetic(amplitude) + self.potential * amplitude


def hamiltonian_operator(hamiltonian: HamiltonianSpec, grid: Grid, representation: str) -> RepresentationOperator:
    """
    Write H in the position or momentum representation.

    In momentum space x = i d/dp, so K x^2/2 becomes a second derivative with inertia 1/K
    and p^2/2m becomes the multiplicative term.
    """
    if Representation(representation) == Representation.POSITION:
        return RepresentationOperator(grid, hamiltonian.mass, hamiltonian.potential_energy(grid.points))

    if hamiltonian.potential == PotentialKind.CUBIC:
        raise UnsupportedPotentialError("the momentum-space Hamiltonian is available for harmonic and free potentials")
    stiffness = hamiltonian.quadratic
    inertia = math.inf if stiffness == 0 else 1 / stiffness
    return RepresentationOperator(grid, inertia, grid.points**2 / (2 * hamiltonian.mass))


def gaussian_packet(grid: Grid, center: float, width: float, momentum: float = 0.0) -> WaveField:
    """
    A normalized Gaussian with density standard deviation ``width``.

    Raises:
        DomainOverflowError: when center +/- 6 width leaves the grid.
    """
    if width <= 0:
        raise ValueError(f"packet width must be positive, got {width}")
    if not grid.contains(center - PACKET_EXTENT * width, center + PACKET_EXTENT * width):
        raise DomainOverflowError(
            f"a packet at {center} with width {width} does not fit in [{grid.origin}, {grid.upper})"
        )

    x = grid.points
    amplitude = np.exp(-((x - center) ** 2) / (4 * width**2) + 1j * momentum * x)
    return WaveField(grid, amplitude).normalized()


def oscillator_eigenstate(grid: Grid, level: int, hamiltonian: HamiltonianSpec) -> WaveField:
    """The harmonic-oscillator eigenfunction with ``level`` quanta, normalized on the grid."""
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    scale = math.sqrt(hamiltonian.mass * hamiltonian.frequency)
    xi = scale * grid.points

    coefficients = np.zeros(level + 1)
    coefficients[level] = 1.0
    amplitude = np.polynomial.hermite.hermval(xi, coefficients) * np.exp(-(xi**2) / 2)
    return WaveField(grid, amplitude).normalized()


def two_slit_packet(grid: Grid, separation: float, width: float, momentum: float = 0.0) -> WaveField:
    """Equal-weight superposition of two Gaussians centred at +/- separation/2."""
    left = gaussian_packet(grid, -separation / 2, width, momentum)
    right = gaussian_packet(grid, separation / 2, width, momentum)
    return WaveField(grid, left.amplitude + right.amplitude).normalized()


def to_momentum(wave: WaveField) -> WaveField:
    """phi(p) = (2 pi)^-1/2 * integral of psi(x) exp(-ipx) dx, sampled on the reciprocal grid."""
    if wave.representation != Representation.POSITION:
        raise RepresentationMismatchError("to_momentum expects a position-representation field")

    grid = wave.grid
    momenta = wavenumbers(grid.size, grid.spacing)
    spectrum = np.fft.fft(wave.amplitude) * np.exp(-1j * momenta * grid.origin) * grid.spacing / math.sqrt(2 * math.pi)
    return WaveField(grid.reciprocal(), np.fft.fftshift(spectrum), Representation.MOMENTUM, wave.time)


def from_momentum(wave: WaveField) -> WaveField:
    """Inverse of ``to_momentum`` onto the centered position grid."""
    if wave.representation != Representation.MOMENTUM:
        raise RepresentationMismatchError("from_momentum expects a momentum-representation field")

    grid = wave.grid.reciprocal()
    momenta = wavenumbers(grid.size, grid.spacing)
    spectrum = np.fft.ifftshift(wave.amplitude) * np.exp(1j * momenta * grid.origin) * math.sqrt(2 * math.pi) / grid.spacing
    return WaveField(grid, np.fft.ifft(spectrum), Representation.POSITION, wave.time)


def energy_expectation(wave: WaveField, hamiltonian: HamiltonianSpec) -> float:
    operator = hamiltonian_operator(hamiltonian, wave.grid, wave.representation)
    energy = np.sum(wave.amplitude.conj() * operator.apply(wave.amplitude)) * wave.grid.spacing
    return float(energy.real) / wave.norm() ** 2


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    snapshots: tuple[WaveField, ...]
    hamiltonian: HamiltonianSpec | None = None

    def __post_init__(self):
        snapshots = tuple(self.snapshots)
        if not snapshots:
            raise InsufficientSnapshotsError("a trace needs at least one snapshot")

        first = snapshots[0]
        for snapshot in snapshots:
            if snapshot.grid != first.grid or snapshot.representation != first.representation:
                raise ValueError("all snapshots of a trace must share grid and representation")
            if not np.any(snapshot.amplitude):
                raise ZeroFieldError(f"snapshot at t={snapshot.time} is identically zero")

        if len(snapshots) > 2:
            steps = np.diff([snapshot.time for snapshot in snapshots])
            if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
                raise ValueError("snapshots must be uniformly spaced in time")
        object.__setattr__(self, "snapshots", snapshots)

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, index: int) -> WaveField:
        return self.snapshots[index]

    def __iter__(self):
        return iter(self.snapshots)

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    @property
    def representation(self) -> Representation:
        return self.snapshots[0].representation

    @functools.cached_property
    def times(self) -> np.ndarray:
        return np.array([snapshot.time for snapshot in self.snapshots])

    @property
    def dt_out(self) -> float:
        if len(self) < 2:
            return 0.0
        return float((self.times[-1] - self.times[0]) / (len(self) - 1))

    @functools.cached_property
    def amplitudes(self) -> np.ndarray:
        amplitudes = np.stack([snapshot.amplitude for snapshot in self.snapshots])
        amplitudes.setflags(write=False)
        return amplitudes

    def subsample(self, stride: int) -> EvolutionTrace:
        if stride < 1:
            raise ValueError(f"stride must be at least 1, got {stride}")
        return EvolutionTrace(self.snapshots[::stride], self.hamiltonian)

    def to_momentum(self) -> EvolutionTrace:
        return EvolutionTrace(tuple(to_momentum(snapshot) for snapshot in self.snapshots), self.hamiltonian)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.amplitudes) ** 2, axis=1) * self.grid.spacing)

    def norm_drift(self) -> float:
        norms = self.norms()
        return float(np.max(np.abs(norms - norms[0])))

    def mean_positions(self) -> np.ndarray:
        return np.array([snapshot.mean() for snapshot in self.snapshots])

    def widths(self) -> np.ndarray:
        return np.array([snapshot.width() for snapshot in self.snapshots])

    def energies(self, hamiltonian: HamiltonianSpec | None = None) -> np.ndarray:
        hamiltonian = hamiltonian or self.hamiltonian
        return np.array([energy_expectation(snapshot, hamiltonian) for snapshot in self.snapshots])


def _check_stability(snapshot: WaveField, initial_norm: float, boundary: np.ndarray) -> None:
    drift = abs(snapshot.norm() - initial_norm)
    if drift > INSTABILITY_THRESHOLD:
        raise InstabilityError(f"norm drifted by {drift:.3e} at t={snapshot.time:.6g}")

    boundary_mass = float(np.sum(snapshot.density[boundary])) * snapshot.grid.spacing / initial_norm**2
    if boundary_mass > INSTABILITY_THRESHOLD:
        raise InstabilityError(
            f"{boundary_mass:.3e} of the probability reached the grid boundary at t={snapshot.time:.6g}"
        )


def evolve(
    wave: WaveField,
    hamiltonian: HamiltonianSpec,
    dt: float,
    n_steps: int,
    dt_out: float | None = None,
) -> EvolutionTrace:
    """
    Propagate a position-space field with the symmetric split-step scheme.

    Each step applies half a kinetic step in momentum space, a full potential step and
    another half kinetic step. Consecutive kinetic half steps are fused.

    Args:
        wave (WaveField): the initial state.
        hamiltonian (HamiltonianSpec): the Hamiltonian.
        dt (float): propagation step.
        n_steps (int): number of steps; a whole multiple of dt_out / dt.
        dt_out (float | None): snapshot interval, ``dt`` when omitted.

    Returns:
        EvolutionTrace: the initial state followed by one snapshot every ``dt_out``.

    Raises:
        InstabilityError: when the norm drifts by more than 1e-6 or probability reaches
            the outer 5% of the grid.
    """
    if wave.representation != Representation.POSITION:
        raise RepresentationMismatchError("evolve expects a position-representation field")
    if dt <= 0 or n_steps < 1:
        raise ValueError("dt must be positive and n_steps at least 1")

    stride = 1 if dt_out is None else round(dt_out / dt)
    if stride < 1 or abs(stride * dt - (dt_out or dt)) > 1e-9 * (dt_out or dt):
        raise ValueError(f"dt_out={dt_out} must be a whole multiple of dt={dt}")
    if n_steps % stride:
        raise ValueError(f"n_steps={n_steps} must be a whole multiple of the snapshot stride {stride}")

    initial_norm = wave.norm()
    if initial_norm == 0:
        raise ZeroFieldError("cannot evolve an all-zero field")

    grid = wave.grid
    k = wavenumbers(grid.size, grid.spacing)
    kinetic_half = np.exp(-0.25j * dt * k**2 / hamiltonian.mass)
    kinetic_full = kinetic_half**2
    potential = np.exp(-1j * dt * hamiltonian.potential_energy(grid.points))
    boundary = grid.boundary_mask()

    snapshots = [wave]
    amplitude = wave.amplitude.copy()
    for chunk in range(1, n_steps // stride + 1):
        spectrum = np.fft.fft(amplitude) * kinetic_half
        for step in range(stride):
            spectrum = np.fft.fft(potential * np.fft.ifft(spectrum))
            spectrum *= kinetic_full if step < stride - 1 else kinetic_half
        amplitude = np.fft.ifft(spectrum)

        snapshot = WaveField(grid, amplitude, Representation.POSITION, wave.time + chunk * stride * dt)
        _check_stability(snapshot, initial_norm, boundary)
        snapshots.append(snapshot)

    trace = EvolutionTrace(tuple(snapshots), hamiltonian)
    logger.debug(
        "evolved %d steps of dt=%g into %d snapshots, norm drift %.3e",
        n_steps,
        dt,
        len(trace),
        trace.norm_drift(),
    )
    return trace


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """A residual norm per interior snapshot time."""

    times: np.ndarray
    values: np.ndarray
    offset_removed: np.ndarray | None = None

    @property
    def maximum(self) -> float:
        return float(np.max(self.values))

    def __len__(self) -> int:
        return len(self.values)


def convergence_order(fine: ResidualSeries, coarse: ResidualSeries, ratio: float = 2.0) -> float:
    """
    Median observed order between residuals at two sampling intervals.

    Values are compared at the times both series share.
    """
    orders = []
    for time, coarse_value in zip(coarse.times, coarse.values):
        matches = np.flatnonzero(np.isclose(fine.times, time, rtol=0, atol=1e-9 * max(1.0, abs(time))))
        if matches.size == 0:
            continue
        fine_value = fine.values[matches[0]]
        if fine_value > 0 and coarse_value > 0:
            orders.append(math.log(coarse_value / fine_value) / math.log(ratio))

    if not orders:
        raise InsufficientSnapshotsError("the two residual series share no usable times")
    return float(np.median(orders))


def _rank_one_norm(psi: np.ndarray, defect: np.ndarray, spacing: float, sign: int) -> np.ndarray:
    """|| a psi^H + sign * psi a^H || / || psi psi^H || for each row, in Hilbert-Schmidt norm."""
    psi_norm = np.sum(np.abs(psi) ** 2, axis=-1) * spacing
    defect_norm = np.sum(np.abs(defect) ** 2, axis=-1) * spacing
    overlap = np.sum(psi.conj() * defect, axis=-1) * spacing
    squared = 2 * (defect_norm * psi_norm + sign * (overlap**2).real)
    return np.sqrt(np.maximum(squared, 0.0)) / psi_norm


def _schrodinger_defect(trace: EvolutionTrace, hamiltonian: HamiltonianSpec | None, order: int):
    hamiltonian = hamiltonian or trace.hamiltonian
    if hamiltonian is None:
        raise ValueError("a Hamiltonian is required")

    indices, derivative = time_derivative(trace.amplitudes, trace.dt_out, order=order)
    psi = trace.amplitudes[indices]
    operator = hamiltonian_operator(hamiltonian, trace.grid, trace.representation)
    return trace.times[indices], psi, 1j * derivative - operator.apply(psi)


def liouville_residual(
    trace: EvolutionTrace, hamiltonian: HamiltonianSpec | None = None, order: int = 2
) -> ResidualSeries:
    """
    ||i d(rho)/dt - [H, rho]|| / ||rho|| with rho = |psi><psi|, per interior snapshot.

    The density operator is never formed: with a = i dpsi/dt - H psi the commutator
    equation reads a psi^H - psi a^H = 0, whose norm follows from ||a||, ||psi|| and <psi|a>.
    """
    times, psi, defect = _schrodinger_defect(trace, hamiltonian, order)
    return ResidualSeries(times, _rank_one_norm(psi, defect, trace.grid.spacing, sign=-1))


def energy_equation_residual(
    trace: EvolutionTrace, hamiltonian: HamiltonianSpec | None = None, order: int = 2
) -> ResidualSeries:
    """||i(dpsi/dt psi^H - psi dpsi^H/dt) - (H rho + rho H)|| / ||rho||, per interior snapshot."""
    times, psi, defect = _schrodinger_defect(trace, hamiltonian, order)
    return ResidualSeries(times, _rank_one_norm(psi, defect, trace.grid.spacing, sign=1))


def schrodinger_residual(
    trace: EvolutionTrace, hamiltonian: HamiltonianSpec | None = None, order: int = 2
) -> ResidualSeries:
    """||2 (i dpsi/dt - H psi) psi^H|| / ||rho||: the sum of the two equations above."""
    times, psi, defect = _schrodinger_defect(trace, hamiltonian, order)
    spacing = trace.grid.spacing
    psi_norm = np.sum(np.abs(psi) ** 2, axis=-1) * spacing
    defect_norm = np.sum(np.abs(defect) ** 2, axis=-1) * spacing
    return ResidualSeries(times, 2 * np.sqrt(defect_norm * psi_norm) / psi_norm)
