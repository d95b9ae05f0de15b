import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from explicate.clifford import (
    PAULI,
    PAULI_MATRICES,
    Multivector,
    Signature,
    anticommutator,
    blade_name,
    from_matrix,
    make_algebra,
    matrix_rep,
    trace,
)
from explicate.exceptions import SignatureMismatchError, SignatureTooLargeError, UnsupportedSignatureError

SIGNATURES = [Signature(3, 0), Signature(0, 1), Signature(0, 2), Signature(1, 3)]

unit_floats = st.floats(min_value=-1, max_value=1, allow_nan=False, allow_infinity=False)


@st.composite
def multivectors(draw, signature: Signature = PAULI):
    real = draw(arrays(np.float64, signature.size, elements=unit_floats))
    imag = draw(arrays(np.float64, signature.size, elements=unit_floats))
    return Multivector(signature, real + 1j * imag)


@st.composite
def triples(draw, signature: Signature):
    return tuple(draw(multivectors(signature)) for _ in range(3))


class AlgebraTableTests(SimpleTestCase):
    def test_tables_are_associative(self):
        for signature in SIGNATURES:
            self.assertTrue(make_algebra(signature).is_associative(), signature)

    def test_blades_are_listed_by_grade(self):
        table = make_algebra(PAULI)
        self.assertEqual(table.blade_names, ["1", "e1", "e2", "e3", "e12", "e13", "e23", "e123"])
        self.assertEqual(blade_name(0b101), "e13")

    def test_too_many_generators_are_rejected(self):
        with self.assertRaises(SignatureTooLargeError):
            make_algebra(Signature(4, 3))

    def test_table_is_shared(self):
        self.assertIs(make_algebra(Signature(0, 2)), make_algebra(Signature(0, 2)))


class GeneratorTests(SimpleTestCase):
    def test_generators_square_to_signature(self):
        for signature in SIGNATURES:
            for index in range(1, signature.dimension + 1):
                generator = Multivector.generator(signature, index)
                expected = 1 if index <= signature.p else -1
                self.assertTrue((generator * generator).allclose(Multivector.scalar(signature, expected)))

    def test_distinct_generators_anticommute(self):
        signature = Signature(1, 3)
        for i in range(1, 5):
            for j in range(i + 1, 5):
                e_i, e_j = Multivector.generator(signature, i), Multivector.generator(signature, j)
                self.assertTrue(anticommutator(e_i, e_j).allclose(Multivector.zero(signature)))

    def test_product_of_generators_is_a_blade(self):
        e12 = Multivector.generator(PAULI, 1) * Multivector.generator(PAULI, 2)
        self.assertEqual(e12.component(1, 2), 1)
        self.assertTrue(e12.allclose(Multivector.blade(PAULI, 1, 2)))
        self.assertTrue((Multivector.generator(PAULI, 2) * Multivector.generator(PAULI, 1)).allclose(-e12))

    def test_quaternion_units(self):
        signature = Signature(0, 2)
        i, j = Multivector.generator(signature, 1), Multivector.generator(signature, 2)
        minus_one = Multivector.scalar(signature, -1)
        for unit in (i, j, i * j):
            self.assertTrue((unit * unit).allclose(minus_one))

    def test_unknown_generator(self):
        with self.assertRaises(ValueError):
            Multivector.generator(PAULI, 4)


class ProductPropertyTests(SimpleTestCase):
    def test_associativity(self):
        for signature in SIGNATURES:

            @settings(max_examples=500, deadline=None)
            @given(triples(signature))
            def associative(triple):
                a, b, c = triple
                self.assertLess(((a * b) * c).max_deviation(a * (b * c)), 1e-12)

            with self.subTest(signature=signature):
                associative()

    def test_tilde_reverses_products(self):
        for signature in SIGNATURES:

            @settings(max_examples=500, deadline=None)
            @given(triples(signature))
            def reversed_product(triple):
                a, b, _ = triple
                self.assertLess((~(a * b)).max_deviation(~b * ~a), 1e-12)

            with self.subTest(signature=signature):
                reversed_product()

    # the matrix image is only defined on C(3,0)
    @settings(max_examples=500, deadline=None)
    @given(multivectors(), multivectors())
    def test_matrix_image_is_a_homomorphism(self, a, b):
        self.assertLess(np.max(np.abs(matrix_rep(a * b) - matrix_rep(a) @ matrix_rep(b))), 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(multivectors())
    def test_tilde_is_an_involution(self, a):
        self.assertTrue((~~a).allclose(a))

    def test_scalars_combine_from_either_side(self):
        e3 = Multivector.generator(PAULI, 3)
        half = (1 + e3) * 0.5
        self.assertTrue(half.allclose((e3 + 1) / 2))
        self.assertTrue((np.float64(2.0) * half).allclose(1 + e3))

    def test_mixed_signatures_are_rejected(self):
        with self.assertRaises(SignatureMismatchError):
            Multivector.generator(PAULI, 1) * Multivector.generator(Signature(0, 2), 1)


class MatrixRepresentationTests(SimpleTestCase):
    def test_generators_map_to_pauli_matrices(self):
        for index in range(3):
            np.testing.assert_array_equal(matrix_rep(Multivector.generator(PAULI, index + 1)), PAULI_MATRICES[index])

    def test_pseudoscalar_maps_to_i(self):
        np.testing.assert_allclose(matrix_rep(Multivector.blade(PAULI, 1, 2, 3)), 1j * np.eye(2))

    def test_from_matrix_inverts_the_image(self):
        rng = np.random.default_rng(5)
        matrix = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_allclose(matrix_rep(from_matrix(matrix)), matrix, atol=1e-14)

    def test_trace_of_idempotent(self):
        idempotent = (1 + Multivector.generator(PAULI, 3)) / 2
        self.assertAlmostEqual(trace(idempotent), 1.0, places=14)

    def test_other_signatures_have_no_matrix_image(self):
        with self.assertRaises(UnsupportedSignatureError):
            matrix_rep(Multivector.scalar(Signature(0, 2)))
