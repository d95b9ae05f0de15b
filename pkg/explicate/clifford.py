"""Clifford algebras C(p,q) over the complex numbers.

Basis blades are bitmasks over the generators: bit ``i`` set means the generator
``e{i+1}`` is a factor, taken in ascending order. A multivector keeps one complex
coefficient per blade, indexed by that bitmask, so ``coefficients[0b101]`` is the
coefficient of ``e1e3``.
"""

from __future__ import annotations

import functools
import numbers
from dataclasses import dataclass

import numpy as np

from .exceptions import SignatureMismatchError, SignatureTooLargeError, UnsupportedSignatureError

MAX_GENERATORS = 6


@dataclass(frozen=True)
class Signature:
    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"signature counts must be non-negative, got ({self.p}, {self.q})")

    @property
    def dimension(self) -> int:
        return self.p + self.q

    @property
    def size(self) -> int:
        return 1 << self.dimension

    def square(self, index: int) -> int:
        """Square of the generator at 0-based ``index``."""
        return 1 if index < self.p else -1

    def __str__(self) -> str:
        return f"C({self.p},{self.q})"


PAULI = Signature(3, 0)


def grade_of(blade: int) -> int:
    return bin(blade).count("1")


def blade_indices(blade: int) -> tuple[int, ...]:
    """1-based generator indices of ``blade`` in ascending order."""
    return tuple(index + 1 for index in range(blade.bit_length()) if blade >> index & 1)


def blade_name(blade: int) -> str:
    indices = blade_indices(blade)
    return "e" + "".join(str(index) for index in indices) if indices else "1"


def blade_product_sign(left: int, right: int, signature: Signature) -> int:
    """Sign picked up when the product of two blades is brought to canonical order."""
    swaps = 0
    shifted = left >> 1
    while shifted:
        swaps += grade_of(shifted & right)
        shifted >>= 1

    sign = -1 if swaps % 2 else 1
    common = left & right
    for index in range(signature.dimension):
        if common >> index & 1:
            sign *= signature.square(index)
    return sign


@dataclass(frozen=True, eq=False)
class AlgebraTable:
    """Blade multiplication table of one signature.

    ``signs[a, b]`` is the sign and ``results[a, b]`` (always ``a ^ b``) the blade of
    the product of blades ``a`` and ``b``.
    """

    signature: Signature
    blades: tuple[int, ...]
    signs: np.ndarray
    results: np.ndarray

    @property
    def blade_names(self) -> list[str]:
        return [blade_name(blade) for blade in self.blades]

    @functools.cached_property
    def grades(self) -> np.ndarray:
        return np.array([grade_of(blade) for blade in range(self.signature.size)])

    @functools.cached_property
    def reversion_signs(self) -> np.ndarray:
        grades = self.grades
        return np.where((grades * (grades - 1) // 2) % 2, -1.0, 1.0)

    @functools.cached_property
    def cayley(self) -> np.ndarray:
        size = self.signature.size
        tensor = np.zeros((size, size, size))
        rows, columns = np.indices((size, size))
        tensor[rows, columns, self.results] = self.signs
        return tensor

    def product(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", left, right, self.cayley)

    def is_associative(self) -> bool:
        """Enumerate every blade triple and compare (ab)c with a(bc)."""
        index = np.arange(self.signature.size)
        a, b, c = np.meshgrid(index, index, index, indexing="ij")
        left = self.signs[a, b] * self.signs[a ^ b, c]
        right = self.signs[b, c] * self.signs[a, b ^ c]
        return bool(np.all(left == right))


@functools.lru_cache(maxsize=None)
def make_algebra(signature: Signature) -> AlgebraTable:
    """
    Build the product table of C(p,q).

    Args:
        signature (Signature): generator counts, the first ``p`` squaring to +1.

    Returns:
        AlgebraTable: the shared, read-only table for this signature.

    Raises:
        SignatureTooLargeError: when p + q exceeds ``MAX_GENERATORS``.
    """
    if signature.dimension > MAX_GENERATORS:
        raise SignatureTooLargeError(
            f"{signature} has {signature.dimension} generators, at most {MAX_GENERATORS} are supported"
        )

    size = signature.size
    signs = np.empty((size, size), dtype=np.int8)
    for left in range(size):
        for right in range(size):
            signs[left, right] = blade_product_sign(left, right, signature)
    results = np.bitwise_xor.outer(np.arange(size), np.arange(size))

    blades = tuple(sorted(range(size), key=lambda blade: (grade_of(blade), blade_indices(blade))))
    signs.setflags(write=False)
    results.setflags(write=False)
    return AlgebraTable(signature=signature, blades=blades, signs=signs, results=results)


def _format_coefficient(value: complex) -> str:
    if value.imag == 0:
        return f"{value.real:.6g}"
    if value.real == 0:
        return f"{value.imag:.6g}j"
    return f"({value.real:.6g}{value.imag:+.6g}j)"


@dataclass(frozen=True, eq=False)
class Multivector:
    signature: Signature
    coefficients: np.ndarray

    # numpy scalars on the left must defer to __rmul__/__radd__
    __array_ufunc__ = None

    def __post_init__(self):
        make_algebra(self.signature)
        coefficients = np.array(self.coefficients, dtype=complex)
        if coefficients.shape != (self.signature.size,):
            raise ValueError(
                f"{self.signature} needs {self.signature.size} coefficients, got shape {coefficients.shape}"
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def zero(cls, signature: Signature) -> Multivector:
        return cls(signature, np.zeros(signature.size))

    @classmethod
    def scalar(cls, signature: Signature, value: complex = 1.0) -> Multivector:
        coefficients = np.zeros(signature.size, dtype=complex)
        coefficients[0] = value
        return cls(signature, coefficients)

    @classmethod
    def generator(cls, signature: Signature, index: int) -> Multivector:
        if not 1 <= index <= signature.dimension:
            raise ValueError(f"{signature} has no generator e{index}")
        coefficients = np.zeros(signature.size, dtype=complex)
        coefficients[1 << (index - 1)] = 1.0
        return cls(signature, coefficients)

    @classmethod
    def blade(cls, signature: Signature, *indices: int, coefficient: complex = 1.0) -> Multivector:
        """Product of the generators ``e{i}`` in the order given, scaled by ``coefficient``."""
        result = cls.scalar(signature, coefficient)
        for index in indices:
            result = result * cls.generator(signature, index)
        return result

    @classmethod
    def vector(cls, signature: Signature, components) -> Multivector:
        components = np.asarray(components, dtype=complex)
        if components.shape != (signature.dimension,):
            raise ValueError(f"{signature} vectors need {signature.dimension} components")
        coefficients = np.zeros(signature.size, dtype=complex)
        for index, value in enumerate(components):
            coefficients[1 << index] = value
        return cls(signature, coefficients)

    @property
    def table(self) -> AlgebraTable:
        return make_algebra(self.signature)

    @property
    def scalar_part(self) -> complex:
        return complex(self.coefficients[0])

    def component(self, *indices: int) -> complex:
        """Coefficient of the canonical blade with the given generator indices."""
        if len(set(indices)) != len(indices):
            raise ValueError("blade indices must be distinct")
        mask = 0
        for index in indices:
            if not 1 <= index <= self.signature.dimension:
                raise ValueError(f"{self.signature} has no generator e{index}")
            mask |= 1 << (index - 1)
        return complex(self.coefficients[mask])

    def grade(self, k: int) -> Multivector:
        return grade_project(self, k)

    def max_deviation(self, other: Multivector) -> float:
        _require_same_signature(self, other)
        return float(np.max(np.abs(self.coefficients - other.coefficients)))

    def allclose(self, other: Multivector, atol: float = 1e-12) -> bool:
        return self.max_deviation(other) <= atol

    def _coerce(self, other) -> Multivector | None:
        if isinstance(other, Multivector):
            _require_same_signature(self, other)
            return other
        if isinstance(other, numbers.Number):
            return Multivector.scalar(self.signature, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self.signature, self.coefficients + other.coefficients)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self.signature, self.coefficients - other.coefficients)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self.signature, other.coefficients - self.coefficients)

    def __neg__(self):
        return Multivector(self.signature, -self.coefficients)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, self.coefficients * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, other * self.coefficients)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, self.coefficients / other)
        return NotImplemented

    def __invert__(self):
        return reversion(self)

    def __repr__(self) -> str:
        terms = [
            f"{_format_coefficient(complex(self.coefficients[blade]))}"
            + ("" if blade == 0 else f" {blade_name(blade)}")
            for blade in self.table.blades
            if self.coefficients[blade] != 0
        ]
        return f"Multivector[{self.signature}]({' + '.join(terms) or '0'})"


def _require_same_signature(a: Multivector, b: Multivector) -> None:
    if a.signature != b.signature:
        raise SignatureMismatchError(f"cannot combine elements of {a.signature} and {b.signature}")


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    _require_same_signature(a, b)
    return Multivector(a.signature, a.table.product(a.coefficients, b.coefficients))


def reversion(a: Multivector) -> Multivector:
    """Reverse the generator order of every blade and conjugate the coefficients."""
    return Multivector(a.signature, a.table.reversion_signs * np.conj(a.coefficients))


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.signature.dimension:
        raise ValueError(f"grade {k} does not exist in {a.signature}")
    return Multivector(a.signature, np.where(a.table.grades == k, a.coefficients, 0))


def commutator(a: Multivector, b: Multivector) -> Multivector:
    return a * b - b * a


def anticommutator(a: Multivector, b: Multivector) -> Multivector:
    return a * b + b * a


PAULI_MATRICES = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@functools.lru_cache(maxsize=1)
def _pauli_blade_matrices() -> np.ndarray:
    matrices = np.empty((PAULI.size, 2, 2), dtype=complex)
    for blade in range(PAULI.size):
        matrix = np.eye(2, dtype=complex)
        for index in blade_indices(blade):
            matrix = matrix @ PAULI_MATRICES[index - 1]
        matrices[blade] = matrix
    matrices.setflags(write=False)
    return matrices


def _require_pauli(a: Multivector) -> None:
    if a.signature != PAULI:
        raise UnsupportedSignatureError(f"the 2x2 matrix representation exists for {PAULI} only, not {a.signature}")


def matrix_rep(a: Multivector) -> np.ndarray:
    """Image of an element of C(3,0) under e1, e2, e3 -> Pauli matrices."""
    _require_pauli(a)
    return np.tensordot(a.coefficients, _pauli_blade_matrices(), axes=1)


def from_matrix(matrix) -> Multivector:
    """
    Pull a 2x2 complex matrix back into C(3,0).

    The representation sends e1e2e3 to i times the identity, so every matrix has more
    than one preimage; the one returned has no bivector or pseudoscalar part.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {matrix.shape}")

    coefficients = np.zeros(PAULI.size, dtype=complex)
    coefficients[0] = np.trace(matrix) / 2
    for index, pauli in enumerate(PAULI_MATRICES):
        coefficients[1 << index] = np.trace(pauli @ matrix) / 2
    return Multivector(PAULI, coefficients)


def trace(a: Multivector) -> complex:
    """Matrix trace of the Pauli image, ``2 * (a0 + i * a123)``."""
    return complex(np.trace(matrix_rep(a)))
