import math

import numpy as np
from django.test import SimpleTestCase

from explicate.enums import DifferentiationMethod, PotentialKind, Representation
from explicate.evolution import Grid, HamiltonianSpec, evolve, gaussian_packet, oscillator_eigenstate, to_momentum, two_slit_packet
from explicate.exceptions import InsufficientSnapshotsError, RepresentationMismatchError, UnsupportedPotentialError
from explicate.projection import (
    continuity_residual_p,
    continuity_residual_x,
    eigenvalue_deviation,
    explicate_frame,
    explicate_frames,
    interior_node_fraction,
    phase_gradient,
    polar_fields,
    polar_sequence,
    projected_equations_check,
    qhj_residual_p,
    qhj_residual_x,
    quantum_potential_p,
    quantum_potential_x,
    support_mask,
)

HARMONIC = HamiltonianSpec()
FREE = HamiltonianSpec(potential=PotentialKind.FREE, stiffness=0.0)
CUBIC = HamiltonianSpec(potential=PotentialKind.CUBIC, cubic=0.05)


class PolarFieldTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.centered(512, 12.0)

    def test_reconstruction(self):
        wave = gaussian_packet(self.grid, 1.0, 0.8, 2.5)
        field = polar_fields(wave)
        np.testing.assert_allclose(field.reconstruct(), wave.amplitude, atol=1e-14)

    def test_phase_is_unwrapped_over_the_support(self):
        field = polar_fields(gaussian_packet(self.grid, 0.0, 1.0, 4.0))
        mask = support_mask(field)
        self.assertLess(np.max(np.abs(np.diff(field.phase[mask]))), math.pi)

    def test_local_momentum_of_a_plane_wave_packet(self):
        field = polar_fields(gaussian_packet(self.grid, 0.0, 1.0, 1.5))
        mask = support_mask(field, interior=0.8)
        for method in DifferentiationMethod.values:
            np.testing.assert_allclose(phase_gradient(field, method)[mask], 1.5, atol=1e-8)

    def test_phase_is_anchored_to_the_previous_frame(self):
        wave = gaussian_packet(self.grid, 0.0, 1.0)
        first = polar_fields(wave.with_amplitude(wave.amplitude * np.exp(3.0j)))
        second = polar_fields(wave.with_amplitude(wave.amplitude * np.exp(3.3j), time=0.01), first)
        self.assertAlmostEqual(second.phase[second.anchor], 3.3, places=12)

    def test_nodes_are_masked(self):
        field = polar_fields(oscillator_eigenstate(self.grid, 1, HARMONIC))
        node = int(np.argmin(np.abs(self.grid.points)))
        self.assertTrue(field.nodes[node])
        self.assertTrue(np.isnan(quantum_potential_x(field, 1.0)[node]))
        self.assertEqual(int(np.sum(field.nodes & self.grid.interior_mask(0.5))), 1)

    def test_node_fraction_counts_the_hull_only(self):
        nodes = np.array([True, False, True, True, False, True])
        self.assertEqual(interior_node_fraction(nodes), 0.5)


class QuantumPotentialTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.centered(1024, 12.0)
        self.ground = oscillator_eigenstate(self.grid, 0, HARMONIC)

    def test_ground_state_position_identity(self):
        frame = explicate_frame(self.ground, HARMONIC)
        self.assertLess(eigenvalue_deviation(frame, 0.5), 1e-6)

    def test_ground_state_momentum_identity(self):
        frame = explicate_frame(to_momentum(self.ground), HARMONIC)
        self.assertEqual(frame.representation, Representation.MOMENTUM)
        self.assertLess(eigenvalue_deviation(frame, 0.5), 1e-6)

    def test_excited_state_identity_off_the_node(self):
        frame = explicate_frame(oscillator_eigenstate(self.grid, 1, HARMONIC), HARMONIC)
        self.assertLess(eigenvalue_deviation(frame, 1.5), 1e-4)

    def test_finite_difference_cross_check(self):
        spectral = explicate_frame(self.ground, HARMONIC)
        finite = explicate_frame(self.ground, HARMONIC, DifferentiationMethod.FINITE_DIFFERENCE)
        mask = support_mask(spectral.polar, interior=0.8)
        np.testing.assert_allclose(finite.quantum_potential[mask], spectral.quantum_potential[mask], atol=1e-6)

    def test_position_and_momentum_potentials_agree_on_a_self_dual_grid(self):
        grid = Grid.self_dual(1024)
        ground = oscillator_eigenstate(grid, 0, HARMONIC)
        position, momentum = polar_fields(ground), polar_fields(to_momentum(ground))
        q_x = quantum_potential_x(position, HARMONIC.mass)
        q_p = quantum_potential_p(momentum, HARMONIC.stiffness)
        mask = support_mask(position, 1e-2, interior=0.8) & support_mask(momentum, 1e-2, interior=0.8)
        np.testing.assert_allclose(q_x[mask], q_p[mask], atol=1e-8)

    def test_free_momentum_space_has_no_quantum_potential(self):
        field = polar_fields(to_momentum(self.ground))
        q_p = quantum_potential_p(field, 0.0)
        np.testing.assert_array_equal(q_p[~field.nodes], 0.0)

    def test_representations_are_checked(self):
        with self.assertRaises(RepresentationMismatchError):
            quantum_potential_x(polar_fields(to_momentum(self.ground)), 1.0)
        with self.assertRaises(RepresentationMismatchError):
            quantum_potential_p(polar_fields(self.ground), 1.0)


class ResidualTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        grid = Grid.centered(512, 12.0)
        cls.trace = evolve(gaussian_packet(grid, 2.0, math.sqrt(0.5)), HARMONIC, 1e-3, 500, 1e-2)
        cls.frames = explicate_frames(cls.trace)
        cls.momentum_frames = explicate_frames(cls.trace.to_momentum())

    def test_position_space_equations(self):
        self.assertLess(continuity_residual_x(self.frames, order=4).maximum, 1e-3)
        self.assertLess(qhj_residual_x(self.frames, HARMONIC, order=4).maximum, 1e-3)

    def test_momentum_space_equations(self):
        self.assertLess(continuity_residual_p(self.momentum_frames, order=4).maximum, 1e-3)
        self.assertLess(qhj_residual_p(self.momentum_frames, HARMONIC, order=4).maximum, 1e-3)

    def test_offset_removed_aggregate_is_not_larger(self):
        residual = qhj_residual_x(self.frames, HARMONIC)
        self.assertTrue(np.all(residual.offset_removed <= residual.values + 1e-15))

    def test_residuals_ignore_a_constant_phase(self):
        fields = polar_sequence(self.trace)
        for method in DifferentiationMethod.values:
            frames = explicate_frames(fields, HARMONIC, method)
            continuity = continuity_residual_x(frames).values
            hamilton_jacobi = qhj_residual_x(frames, HARMONIC).values
            for constant in (1.0, 3.0, -2.5):
                shifted = explicate_frames([field.shifted(constant) for field in fields], HARMONIC, method)
                with self.subTest(method=method, constant=constant):
                    np.testing.assert_allclose(continuity_residual_x(shifted).values, continuity, rtol=0, atol=1e-12)
                    np.testing.assert_allclose(
                        qhj_residual_x(shifted, HARMONIC).values, hamilton_jacobi, rtol=0, atol=1e-12
                    )

    def test_projected_equations_close_onto_the_polar_equations(self):
        for basis in Representation.values:
            projected = projected_equations_check(self.trace, HARMONIC, basis, order=4)
            self.assertLess(projected.continuity_gap, 1e-10, basis)
            self.assertLess(projected.hamilton_jacobi_gap, 1e-10, basis)

    def test_representation_of_frames_is_checked(self):
        with self.assertRaises(RepresentationMismatchError):
            continuity_residual_x(self.momentum_frames)
        with self.assertRaises(RepresentationMismatchError):
            qhj_residual_p(self.frames, HARMONIC)

    def test_residuals_need_three_frames(self):
        with self.assertRaises(InsufficientSnapshotsError):
            continuity_residual_x(self.frames[:2])

    def test_explicit_mass_must_be_positive(self):
        self.assertEqual(
            continuity_residual_x(self.frames, mass=1.0).values.tolist(), continuity_residual_x(self.frames).values.tolist()
        )
        with self.assertRaises(ValueError):
            continuity_residual_x(self.frames, mass=0.0)

    def test_cubic_momentum_equation_is_unsupported(self):
        with self.assertRaises(UnsupportedPotentialError):
            qhj_residual_p(self.momentum_frames, CUBIC)

    def test_node_dominated_grid_is_reported(self):
        grid = Grid.centered(512, 12.0)
        trace = evolve(two_slit_packet(grid, 12.0, 0.3), FREE, 1e-3, 30, 1e-2)
        with self.assertLogs("explicate.projection", level="WARNING") as logs:
            qhj_residual_x(explicate_frames(trace), FREE)
        self.assertIn("node-dominated grid", logs.output[0])
