"""Idempotents, minimal left ideals and algebraic spinors in C(3,0).

A column spinor (psi1, psi2) lives in the left ideal generated by
E = (1 + e3)/2 as (g0 + g1 e23 + g2 e13 + g3 e12) E, with

    g0 = Re psi1,  g1 = Im psi2,  g2 = Re psi2,  g3 = Im psi1.

The 2x2 image of that element has first column (psi1, psi2) and second column 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .clifford import PAULI, Multivector, matrix_rep, from_matrix, trace
from .exceptions import (
    IdealMembershipError,
    NonUnitVectorError,
    NotNormalizedError,
    UnsupportedSignatureError,
    WrongIdempotentError,
    ZeroSpinorError,
)

UNIT_TOLERANCE = 1e-12
NORMALIZATION_TOLERANCE = 1e-9
MEMBERSHIP_TOLERANCE = 1e-12
Z_AXIS = (0.0, 0.0, 1.0)

# blade bitmasks of the even part used by the spinor dictionary
_E23, _E13, _E12 = 0b110, 0b101, 0b011
_ROTOR_BLADES = (0, _E23, _E13, _E12)


def unit_axis(axis) -> tuple[float, float, float]:
    vector = np.asarray(axis, dtype=float)
    if vector.shape != (3,) or not np.all(np.isfinite(vector)):
        raise NonUnitVectorError(f"an axis needs three finite components, got {axis!r}")

    length = float(np.linalg.norm(vector))
    if abs(length - 1.0) > UNIT_TOLERANCE:
        raise NonUnitVectorError(f"axis {tuple(vector)} has length {length!r}, expected 1")
    return tuple(float(component) for component in vector)


@dataclass(frozen=True, eq=False)
class Idempotent:
    element: Multivector
    axis: tuple[float, float, float]

    @property
    def is_z_axis(self) -> bool:
        return bool(np.allclose(self.axis, Z_AXIS, rtol=0, atol=UNIT_TOLERANCE))

    @property
    def matrix(self) -> np.ndarray:
        return matrix_rep(self.element)

    def opposite(self) -> Idempotent:
        return standard_idempotent(tuple(-component for component in self.axis))


def standard_idempotent(axis=Z_AXIS) -> Idempotent:
    """
    The primitive idempotent (1 + n.sigma)/2 for a unit axis n.

    Raises:
        NonUnitVectorError: when |n| differs from 1 by more than 1e-12.
    """
    axis = unit_axis(axis)
    element = (Multivector.scalar(PAULI) + Multivector.vector(PAULI, axis)) * 0.5
    return Idempotent(element=element, axis=axis)


@dataclass(frozen=True)
class ColumnSpinor:
    psi1: complex
    psi2: complex

    def __post_init__(self):
        object.__setattr__(self, "psi1", complex(self.psi1))
        object.__setattr__(self, "psi2", complex(self.psi2))

    @classmethod
    def random(cls, rng: np.random.Generator) -> ColumnSpinor:
        """A normalized spinor with independent complex Gaussian components."""
        components = rng.normal(size=2) + 1j * rng.normal(size=2)
        return cls(*components).normalized()

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.psi1) ** 2 + abs(self.psi2) ** 2)

    def normalized(self) -> ColumnSpinor:
        norm = self.norm
        if norm == 0:
            raise ZeroSpinorError("cannot normalize the zero spinor")
        return ColumnSpinor(self.psi1 / norm, self.psi2 / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.psi1, self.psi2], dtype=complex)

    def density_matrix(self) -> np.ndarray:
        vector = self.as_array()
        return np.outer(vector, vector.conj())


@dataclass(frozen=True, eq=False)
class AlgebraicSpinor:
    element: Multivector
    idempotent: Idempotent

    def __post_init__(self):
        if self.element.signature != PAULI:
            raise UnsupportedSignatureError(f"algebraic spinors live in {PAULI}, not {self.element.signature}")

        projected = self.element * self.idempotent.element
        scale = max(1.0, float(np.max(np.abs(self.element.coefficients))))
        if not projected.allclose(self.element, atol=MEMBERSHIP_TOLERANCE * scale):
            raise IdealMembershipError("element is not in the left ideal of its idempotent (element * E != element)")

    @property
    def matrix(self) -> np.ndarray:
        return matrix_rep(self.element)

    @property
    def components(self) -> tuple[float, float, float, float]:
        """The real coefficients (g0, g1, g2, g3) of the z-ideal dictionary."""
        if not self.idempotent.is_z_axis:
            raise WrongIdempotentError("the (g0, g1, g2, g3) dictionary is defined in the z-axis ideal only")

        components = 2 * self.element.coefficients[list(_ROTOR_BLADES)]
        scale = max(1.0, float(np.max(np.abs(components))))
        rebuilt = _rotor_element(components.real) * self.idempotent.element
        if np.max(np.abs(components.imag)) > MEMBERSHIP_TOLERANCE * scale or not rebuilt.allclose(
            self.element, atol=MEMBERSHIP_TOLERANCE * scale
        ):
            raise IdealMembershipError("element is not of the form (g0 + g1 e23 + g2 e13 + g3 e12) E with real g")
        return tuple(float(component) for component in components.real)


def _rotor_element(components) -> Multivector:
    coefficients = np.zeros(PAULI.size, dtype=complex)
    coefficients[list(_ROTOR_BLADES)] = components
    return Multivector(PAULI, coefficients)


def column_to_algebraic(spinor: ColumnSpinor, idempotent: Idempotent | None = None) -> AlgebraicSpinor:
    """
    Map a column spinor into the left ideal of the z-axis idempotent.

    Args:
        spinor (ColumnSpinor): the column amplitudes.
        idempotent (Idempotent | None): the defining idempotent, z-axis by default.

    Returns:
        AlgebraicSpinor: (g0 + g1 e23 + g2 e13 + g3 e12) E.

    Raises:
        WrongIdempotentError: for an idempotent along any axis other than z.
    """
    idempotent = idempotent or standard_idempotent(Z_AXIS)
    if not idempotent.is_z_axis:
        raise WrongIdempotentError(f"the column dictionary needs the z-axis idempotent, got axis {idempotent.axis}")

    components = (spinor.psi1.real, spinor.psi2.imag, spinor.psi2.real, spinor.psi1.imag)
    return AlgebraicSpinor(element=_rotor_element(components) * idempotent.element, idempotent=idempotent)


def algebraic_to_column(spinor: AlgebraicSpinor) -> ColumnSpinor:
    g0, g1, g2, g3 = spinor.components
    return ColumnSpinor(complex(g0, g3), complex(g2, g1))


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    positive: Multivector
    unitary: Multivector
    singular_values: tuple[float, float]
    unique: bool


def polar_decompose(spinor: AlgebraicSpinor) -> PolarDecomposition:
    """
    Split a spinor as R U with R positive semi-definite and U unitary in the 2x2 image.

    The factors come from the singular value decomposition W S V^H of the image:
    R = W S W^H and U = W V^H. Ideal elements always have a zero singular value, so U
    is then one of many valid unitary factors and ``unique`` is False.
    """
    matrix = matrix_rep(spinor.element)
    if np.linalg.norm(matrix) < np.finfo(float).tiny:
        raise ZeroSpinorError("the zero spinor has no polar decomposition")

    left, singular_values, right_adjoint = linalg.svd(matrix)
    positive = left @ np.diag(singular_values) @ left.conj().T
    unitary = left @ right_adjoint
    unique = bool(singular_values[-1] > 1e-12 * singular_values[0])
    return PolarDecomposition(
        positive=from_matrix(positive),
        unitary=from_matrix(unitary),
        singular_values=(float(singular_values[0]), float(singular_values[1])),
        unique=unique,
    )


@dataclass(frozen=True, eq=False)
class DensityElement:
    element: Multivector
    axis: tuple[float, float, float] = Z_AXIS

    @property
    def matrix(self) -> np.ndarray:
        return matrix_rep(self.element)

    @property
    def trace(self) -> float:
        return trace(self.element).real

    @property
    def bloch_vector(self) -> np.ndarray:
        return 2 * self.element.coefficients[[0b001, 0b010, 0b100]].real

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return (~self.element).allclose(self.element, atol=tol)


def right_dual(spinor: AlgebraicSpinor) -> Multivector:
    """The tilde of a left-ideal element, an element of the matching right ideal."""
    return ~spinor.element


def density_element(spinor: AlgebraicSpinor) -> DensityElement:
    """
    Build rho = Psi Psi~ from a normalized spinor.

    Raises:
        NotNormalizedError: when the spinor norm differs from 1 by more than 1e-9.
    """
    norm_squared = float(np.sum(np.abs(matrix_rep(spinor.element)) ** 2))
    if abs(norm_squared - 1.0) > NORMALIZATION_TOLERANCE:
        raise NotNormalizedError(f"spinor has squared norm {norm_squared!r}, expected 1")

    return DensityElement(element=spinor.element * right_dual(spinor), axis=spinor.idempotent.axis)


def is_pure(rho: DensityElement | Multivector, tol: float = 1e-12) -> bool:
    element = rho.element if isinstance(rho, DensityElement) else rho
    return float(np.max(np.abs((element * element - element).coefficients))) < tol


def rotor(first: int, second: int, angle: float) -> Multivector:
    """exp(e_first e_second * angle / 2) in C(3,0)."""
    return math.cos(angle / 2) + math.sin(angle / 2) * Multivector.blade(PAULI, first, second)


def rotor_to_axis(axis) -> Multivector:
    """The rotor R with R e3 R~ = n.sigma, turning z onto the unit axis n."""
    axis = unit_axis(axis)
    if 1.0 + axis[2] < UNIT_TOLERANCE:
        return Multivector.blade(PAULI, 1, 3)

    z = Multivector.generator(PAULI, 3)
    n = Multivector.vector(PAULI, axis)
    return (1.0 + n * z) / math.sqrt(2.0 * (1.0 + axis[2]))


def conjugate_idempotent(idempotent: Idempotent, rotor_element: Multivector) -> Idempotent:
    element = rotor_element * idempotent.element * ~rotor_element
    axis = 2 * element.coefficients[[0b001, 0b010, 0b100]].real
    return Idempotent(element=element, axis=tuple(float(component) for component in axis / np.linalg.norm(axis)))


def axis_spinor(axis) -> AlgebraicSpinor:
    """Spin up along ``axis``, written in the z-axis ideal as R E."""
    idempotent = standard_idempotent(Z_AXIS)
    return AlgebraicSpinor(element=rotor_to_axis(axis) * idempotent.element, idempotent=idempotent)


def idempotent_expectation(rho: DensityElement, idempotent: Idempotent) -> float:
    """tr(rho E): the weight with which the idempotent is realized in the state."""
    return trace(rho.element * idempotent.element).real
