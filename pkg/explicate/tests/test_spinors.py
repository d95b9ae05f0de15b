import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from explicate.clifford import PAULI, Multivector, matrix_rep
from explicate.exceptions import (
    IdealMembershipError,
    NonUnitVectorError,
    NotNormalizedError,
    WrongIdempotentError,
    ZeroSpinorError,
)
from explicate.spinors import (
    AlgebraicSpinor,
    ColumnSpinor,
    algebraic_to_column,
    axis_spinor,
    column_to_algebraic,
    conjugate_idempotent,
    density_element,
    idempotent_expectation,
    is_pure,
    polar_decompose,
    right_dual,
    rotor,
    rotor_to_axis,
    standard_idempotent,
)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def column_spinors(draw):
    components = [complex(draw(finite), draw(finite)) for _ in range(2)]
    if max(abs(component) for component in components) < 1e-3:
        components[0] = 1.0
    return ColumnSpinor(*components).normalized()


@st.composite
def unit_axes(draw):
    vector = np.array([draw(finite) for _ in range(3)])
    if np.linalg.norm(vector) < 1e-3:
        vector = np.array([0.0, 0.0, 1.0])
    unit = vector / np.linalg.norm(vector)
    # the south pole has its own rotor branch
    return unit if unit[2] > -0.9 else -unit


class IdempotentTests(SimpleTestCase):
    def test_standard_idempotent_is_idempotent(self):
        element = standard_idempotent().element
        self.assertTrue((element * element).allclose(element))

    def test_axis_must_be_unit(self):
        with self.assertRaises(NonUnitVectorError):
            standard_idempotent((0, 0, 2))

    def test_opposite_idempotents_resolve_identity(self):
        idempotent = standard_idempotent((1, 0, 0))
        total = idempotent.element + idempotent.opposite().element
        self.assertTrue(total.allclose(Multivector.scalar(PAULI)))


class DictionaryTests(SimpleTestCase):
    def test_tabulated_components(self):
        self.assertEqual(column_to_algebraic(ColumnSpinor(1, 0)).components, (1.0, 0.0, 0.0, 0.0))
        self.assertEqual(column_to_algebraic(ColumnSpinor(0, 1)).components, (0.0, 0.0, 1.0, 0.0))
        self.assertEqual(column_to_algebraic(ColumnSpinor(1j, 0)).components, (0.0, 0.0, 0.0, 1.0))

    @settings(max_examples=200, deadline=None)
    @given(column_spinors())
    def test_round_trip(self, spinor):
        recovered = algebraic_to_column(column_to_algebraic(spinor))
        np.testing.assert_allclose(recovered.as_array(), spinor.as_array(), rtol=0, atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(column_spinors())
    def test_first_column_of_the_image_is_the_spinor(self, spinor):
        image = column_to_algebraic(spinor).matrix
        np.testing.assert_allclose(image[:, 0], spinor.as_array(), atol=1e-14)
        np.testing.assert_allclose(image[:, 1], 0, atol=1e-14)

    def test_other_ideals_are_rejected(self):
        with self.assertRaises(WrongIdempotentError):
            column_to_algebraic(ColumnSpinor(1, 0), standard_idempotent((1, 0, 0)))

    def test_elements_outside_the_ideal_are_rejected(self):
        with self.assertRaises(IdealMembershipError):
            AlgebraicSpinor(Multivector.generator(PAULI, 1), standard_idempotent())

    def test_zero_spinor_cannot_be_normalized(self):
        with self.assertRaises(ZeroSpinorError):
            ColumnSpinor(0, 0).normalized()


class DensityElementTests(SimpleTestCase):
    def test_spin_up_density_is_the_idempotent(self):
        rho = density_element(column_to_algebraic(ColumnSpinor(1, 0)))
        self.assertTrue(rho.element.allclose(standard_idempotent().element))
        np.testing.assert_allclose(rho.bloch_vector, [0, 0, 1], atol=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(column_spinors())
    def test_pure_states(self, spinor):
        rho = density_element(column_to_algebraic(spinor))
        self.assertTrue(is_pure(rho))
        self.assertAlmostEqual(rho.trace, 1.0, delta=1e-12)
        self.assertTrue(rho.is_hermitian())
        np.testing.assert_allclose(rho.matrix, spinor.density_matrix(), atol=1e-12)

    def test_unnormalized_spinor_is_rejected(self):
        with self.assertRaises(NotNormalizedError):
            density_element(column_to_algebraic(ColumnSpinor(2, 0)))

    def test_right_dual_is_the_tilde(self):
        spinor = column_to_algebraic(ColumnSpinor(0.6, 0.8j))
        self.assertTrue(right_dual(spinor).allclose(~spinor.element))


class RotorTests(SimpleTestCase):
    def test_quarter_turn_about_z(self):
        r = rotor(1, 2, math.pi / 2)
        self.assertTrue((r * ~r).allclose(Multivector.scalar(PAULI)))

    @settings(max_examples=100, deadline=None)
    @given(unit_axes())
    def test_rotor_turns_z_onto_axis(self, axis):
        r = rotor_to_axis(axis)
        turned = r * Multivector.generator(PAULI, 3) * ~r
        self.assertLess(turned.max_deviation(Multivector.vector(PAULI, axis)), 1e-12)

    def test_rotor_to_south_pole(self):
        r = rotor_to_axis((0, 0, -1))
        turned = r * Multivector.generator(PAULI, 3) * ~r
        self.assertTrue(turned.allclose(-Multivector.generator(PAULI, 3)))

    @settings(max_examples=100, deadline=None)
    @given(unit_axes())
    def test_axis_spinor_realizes_its_idempotent(self, axis):
        rho = density_element(axis_spinor(axis))
        self.assertAlmostEqual(idempotent_expectation(rho, standard_idempotent(axis)), 1.0, delta=1e-12)
        self.assertAlmostEqual(idempotent_expectation(rho, standard_idempotent(-axis)), 0.0, delta=1e-12)

    def test_conjugated_idempotent_points_along_the_new_axis(self):
        idempotent = conjugate_idempotent(standard_idempotent(), rotor_to_axis((1, 0, 0)))
        np.testing.assert_allclose(idempotent.axis, (1, 0, 0), atol=1e-12)


class PolarDecompositionTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(column_spinors())
    def test_factors_reproduce_the_spinor(self, spinor):
        algebraic = column_to_algebraic(spinor)
        decomposition = polar_decompose(algebraic)
        product = matrix_rep(decomposition.positive * decomposition.unitary)
        np.testing.assert_allclose(product, algebraic.matrix, atol=1e-12)

        unitary = matrix_rep(decomposition.unitary)
        np.testing.assert_allclose(unitary @ unitary.conj().T, np.eye(2), atol=1e-12)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(matrix_rep(decomposition.positive))), -1e-12)

    def test_ideal_elements_have_a_free_unitary_factor(self):
        decomposition = polar_decompose(column_to_algebraic(ColumnSpinor(1, 0)))
        self.assertFalse(decomposition.unique)
        self.assertAlmostEqual(decomposition.singular_values[0], 1.0, places=12)
