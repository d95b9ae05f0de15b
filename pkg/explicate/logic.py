"""Projection lattices: meet, join, complement, orthomodularity and Boolean blocks.

Projections are Hermitian idempotent matrices of dimension 2 (one spin) or 4 (two spins).
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .clifford import matrix_rep
from .exceptions import (
    DimensionMismatchError,
    LatticeNotClosedError,
    LatticeTooLargeError,
    NotProjectionError,
    ZeroProbabilityError,
)
from .spinors import ColumnSpinor, standard_idempotent

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-12
NULL_SPACE_THRESHOLD = 1e-10
ZERO_PROBABILITY = 1e-12
MAX_LATTICE_SIZE = 64
SUPPORTED_DIMENSIONS = (2, 4)
_OPPOSITES = {"0": "I", "I": "0"}


@dataclass(frozen=True, eq=False)
class Projection:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] not in SUPPORTED_DIMENSIONS:
            raise NotProjectionError(f"projections are 2x2 or 4x4 matrices, got shape {matrix.shape}")
        if np.max(np.abs(matrix - matrix.conj().T)) > PROJECTION_TOLERANCE:
            raise NotProjectionError(f"{self.label or 'matrix'} is not Hermitian")
        if np.max(np.abs(matrix @ matrix - matrix)) > PROJECTION_TOLERANCE:
            raise NotProjectionError(f"{self.label or 'matrix'} is not idempotent")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def zero(cls, dimension: int = 2) -> Projection:
        return cls(np.zeros((dimension, dimension)), "0")

    @classmethod
    def identity(cls, dimension: int = 2) -> Projection:
        return cls(np.eye(dimension), "I")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))

    def same_as(self, other: Projection, tol: float = PROJECTION_TOLERANCE) -> bool:
        return self.dimension == other.dimension and bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def commutes_with(self, other: Projection, tol: float = PROJECTION_TOLERANCE) -> bool:
        _require_same_dimension(self, other)
        return bool(np.max(np.abs(self.matrix @ other.matrix - other.matrix @ self.matrix)) <= tol)

    def expectation(self, state) -> float:
        """tr(rho P) for a column spinor, state vector or density matrix."""
        rho = _density(state)
        if rho.shape != self.matrix.shape:
            raise DimensionMismatchError(f"a {rho.shape} state cannot be tested by a {self.matrix.shape} projection")
        return float(np.trace(rho @ self.matrix).real)

    def __repr__(self) -> str:
        return f"Projection({self.label or f'rank {self.rank}'})"


def _require_same_dimension(p: Projection, q: Projection) -> None:
    if p.dimension != q.dimension:
        raise DimensionMismatchError(f"cannot combine a {p.dimension}-dimensional and a {q.dimension}-dimensional projection")


def _density(state) -> np.ndarray:
    if isinstance(state, ColumnSpinor):
        return state.density_matrix()
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def _cleaned(matrix: np.ndarray) -> np.ndarray:
    """Re-symmetrize and drop rounding noise so the result passes the projection checks."""
    matrix = (matrix + matrix.conj().T) / 2
    matrix.real[np.abs(matrix.real) < PROJECTION_TOLERANCE / 10] = 0.0
    matrix.imag[np.abs(matrix.imag) < PROJECTION_TOLERANCE / 10] = 0.0
    return matrix


def projection_from_axis(axis, sign: int = 1) -> Projection:
    """(I + sign n.sigma)/2, the image of the standard idempotent along +/- n."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    idempotent = standard_idempotent(tuple(sign * float(component) for component in axis))
    label = _axis_label(idempotent.axis)
    return Projection(matrix_rep(idempotent.element), label)


def _axis_label(axis) -> str:
    for index, name in enumerate("xyz"):
        if abs(abs(axis[index]) - 1.0) < PROJECTION_TOLERANCE:
            return f"P{name}{'+' if axis[index] > 0 else '-'}"
    return "P(" + ", ".join(f"{component:.3g}" for component in axis) + ")"


def complement(p: Projection) -> Projection:
    return Projection(np.eye(p.dimension) - p.matrix, _complement_label(p.label))


def _complement_label(label: str) -> str:
    if label in _OPPOSITES:
        return _OPPOSITES[label]
    if len(label) == 3 and label[0] == "P" and label[1] in "xyz" and label[2] in "+-":
        return label[:2] + ("-" if label[2] == "+" else "+")
    return f"~{label}" if label else ""


def meet(p: Projection, q: Projection) -> Projection:
    """The projection onto range(P) intersected with range(Q), from the null space of (I-P)+(I-Q)."""
    _require_same_dimension(p, q)
    identity = np.eye(p.dimension)
    basis = linalg.null_space((identity - p.matrix) + (identity - q.matrix), rcond=NULL_SPACE_THRESHOLD)
    if basis.shape[1] == 0:
        return Projection.zero(p.dimension)
    return Projection(_cleaned(basis @ basis.conj().T))


def join(p: Projection, q: Projection) -> Projection:
    return complement(meet(complement(p), complement(q)))


def leq(p: Projection, q: Projection) -> bool:
    """P <= Q when range(P) lies inside range(Q), i.e. QP = P."""
    _require_same_dimension(p, q)
    return bool(np.max(np.abs(q.matrix @ p.matrix - p.matrix)) <= PROJECTION_TOLERANCE)


@dataclass(frozen=True, eq=False)
class ProjectionLattice:
    elements: tuple[Projection, ...]

    @classmethod
    def generate(cls, generators, limit: int = MAX_LATTICE_SIZE) -> ProjectionLattice:
        """
        Close a set of projections under meet, join and complement.

        Raises:
            LatticeTooLargeError: when the closure exceeds ``limit`` elements.
        """
        generators = list(generators)
        if not generators:
            raise ValueError("a lattice needs at least one generator")
        dimension = generators[0].dimension

        elements: list[Projection] = []
        pending = deque([Projection.zero(dimension), Projection.identity(dimension), *generators])
        while pending:
            candidate = pending.popleft()
            if any(candidate.same_as(known, 1e-9) for known in elements):
                continue
            elements.append(candidate)
            if len(elements) > limit:
                raise LatticeTooLargeError(f"lattice closure exceeded {limit} elements")
            pending.append(complement(candidate))
            for known in elements:
                pending.append(meet(candidate, known))
                pending.append(join(candidate, known))

        logger.debug("closed %d generators into a lattice of %d elements", len(generators), len(elements))
        elements = [
            element if element.label else Projection(element.matrix, f"E{index}")
            for index, element in enumerate(elements)
        ]
        return cls(tuple(sorted(elements, key=lambda element: element.rank)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def find(self, projection: Projection) -> Projection | None:
        for element in self.elements:
            if element.same_as(projection, 1e-9):
                return element
        return None

    def __contains__(self, projection: Projection) -> bool:
        return self.find(projection) is not None

    def is_closed(self) -> bool:
        for p in self.elements:
            if complement(p) not in self:
                return False
            for q in self.elements:
                if meet(p, q) not in self or join(p, q) not in self:
                    return False
        return True


@dataclass(frozen=True)
class OrthomodularReport:
    comparable_pairs: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def orthomodular_check(lattice: ProjectionLattice) -> OrthomodularReport:
    """
    Verify Q = P v (Q ^ ~P) for every comparable pair P <= Q.

    Raises:
        LatticeNotClosedError: when the input is not closed under the lattice operations.
    """
    if not lattice.is_closed():
        raise LatticeNotClosedError("orthomodularity is only checked on closed lattices")

    pairs = 0
    violations = []
    for p, q in itertools.product(lattice.elements, repeat=2):
        if not leq(p, q):
            continue
        pairs += 1
        if not join(p, meet(q, complement(p))).same_as(q, 1e-10):
            violations.append((p.label, q.label))
    return OrthomodularReport(comparable_pairs=pairs, violations=violations)


@dataclass(frozen=True, eq=False)
class DistributivityCounterexample:
    a: Projection
    b: Projection
    c: Projection
    lhs: Projection
    rhs: Projection

    @property
    def violated(self) -> bool:
        return not self.lhs.same_as(self.rhs, 1e-10)


def distributivity(a: Projection, b: Projection, c: Projection) -> DistributivityCounterexample:
    """Evaluate A ^ (B v C) against (A ^ B) v (A ^ C)."""
    return DistributivityCounterexample(a, b, c, lhs=meet(a, join(b, c)), rhs=join(meet(a, b), meet(a, c)))


def distributivity_counterexample() -> DistributivityCounterexample:
    """A = P_z+, B = P_x+, C = P_x-: the left side is P_z+ while the right side is 0."""
    return distributivity(
        projection_from_axis((0, 0, 1)),
        projection_from_axis((1, 0, 0)),
        projection_from_axis((1, 0, 0), -1),
    )


def _maximal_cliques(adjacency: list[set[int]]):
    """Bron-Kerbosch with pivoting."""

    def expand(clique: set[int], candidates: set[int], excluded: set[int]):
        if not candidates and not excluded:
            yield clique
            return
        pivot = max(candidates | excluded, key=lambda vertex: len(adjacency[vertex] & candidates))
        for vertex in list(candidates - adjacency[pivot]):
            yield from expand(clique | {vertex}, candidates & adjacency[vertex], excluded & adjacency[vertex])
            candidates = candidates - {vertex}
            excluded = excluded | {vertex}

    yield from expand(set(), set(range(len(adjacency))), set())


def is_distributive(elements) -> bool:
    return not any(distributivity(a, b, c).violated for a, b, c in itertools.product(elements, repeat=3))


def boolean_blocks(lattice: ProjectionLattice) -> list[tuple[Projection, ...]]:
    """
    Maximal sets of mutually commuting lattice elements, each verified distributive.

    Blocks are ordered by the rank sequence of their members.
    """
    elements = lattice.elements
    adjacency = [
        {j for j, other in enumerate(elements) if j != i and element.commutes_with(other, 1e-10)}
        for i, element in enumerate(elements)
    ]
    blocks = []
    for clique in _maximal_cliques(adjacency):
        block = tuple(elements[index] for index in sorted(clique))
        if not is_distributive(block):
            raise LatticeNotClosedError("a commuting block failed the distributivity sweep")
        blocks.append(block)
    return sorted(blocks, key=lambda block: [element.label for element in block])


def two_qubit_lattice() -> ProjectionLattice:
    """The lattice generated by P_z+ and P_x+ on the first spin and P_z+ on the second."""
    identity = np.eye(2)
    up_z = projection_from_axis((0, 0, 1)).matrix
    up_x = projection_from_axis((1, 0, 0)).matrix
    return ProjectionLattice.generate(
        [
            Projection(np.kron(up_z, identity), "Pz+ (x) I"),
            Projection(np.kron(up_x, identity), "Px+ (x) I"),
            Projection(np.kron(identity, up_z), "I (x) Pz+"),
        ]
    )


@dataclass(frozen=True, eq=False)
class FilterResult:
    state: np.ndarray
    probabilities: tuple[float, ...]


def sequential_filter(filters, state) -> FilterResult:
    """
    Pass a state through projective filters with the Luders update rho -> P rho P / tr(P rho P).

    Raises:
        ZeroProbabilityError: when a stage passes the state with probability below 1e-12.
    """
    rho = _density(state)
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ValueError("the input state must be normalized")

    probabilities = []
    for stage, projection in enumerate(filters, start=1):
        if rho.shape != projection.matrix.shape:
            raise DimensionMismatchError(f"stage {stage} does not match the state dimension")
        selected = projection.matrix @ rho @ projection.matrix
        probability = float(np.trace(selected).real)
        if probability < ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"stage {stage} ({projection.label}) annihilates the state")
        probabilities.append(probability)
        rho = selected / probability
    return FilterResult(state=rho, probabilities=tuple(probabilities))


@dataclass(frozen=True)
class SortingGroup:
    shape: str
    colour: str
    fraction: float


def sorting_experiment() -> dict:
    """
    Sort an unpolarized collection by shape, then colour, then shape again.

    Shape is the z-spin projection (sphere / cube) and colour the x-spin projection
    (red / green). After keeping the red spheres, a second shape test finds half of them
    have become cubes.
    """
    sphere, cube = projection_from_axis((0, 0, 1)), projection_from_axis((0, 0, 1), -1)
    red, green = projection_from_axis((1, 0, 0)), projection_from_axis((1, 0, 0), -1)
    unpolarized = np.eye(2) / 2

    result = sequential_filter([sphere, red, sphere], unpolarized)
    after_colour = sequential_filter([sphere, red], unpolarized).state
    groups = [
        SortingGroup(shape, colour, sequential_filter([shape_filter, colour_filter], unpolarized).probabilities[1] / 2)
        for (shape, shape_filter), (colour, colour_filter) in itertools.product(
            [("sphere", sphere), ("cube", cube)], [("red", red), ("green", green)]
        )
    ]
    return {
        "stage_probabilities": result.probabilities,
        "groups": groups,
        "cubes_after_retest": cube.expectation(after_colour),
    }
