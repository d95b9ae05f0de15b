import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from explicate.differentiation import central_difference, spectral_derivative, time_derivative, wrapped_difference
from explicate.enums import PotentialKind, Representation
from explicate.evolution import (
    EvolutionTrace,
    Grid,
    HamiltonianSpec,
    WaveField,
    _schrodinger_defect,
    convergence_order,
    energy_equation_residual,
    energy_expectation,
    evolve,
    from_momentum,
    gaussian_packet,
    hamiltonian_operator,
    liouville_residual,
    oscillator_eigenstate,
    schrodinger_residual,
    to_momentum,
    two_slit_packet,
)
from explicate.exceptions import (
    DomainOverflowError,
    InstabilityError,
    InsufficientSnapshotsError,
    RepresentationMismatchError,
    UnsupportedPotentialError,
)

HARMONIC = HamiltonianSpec()
FREE = HamiltonianSpec(potential=PotentialKind.FREE, stiffness=0.0)


class GridTests(SimpleTestCase):
    def test_size_must_be_a_power_of_two(self):
        for size in (4, 100, 1000):
            with self.assertRaises(ValueError):
                Grid.centered(size, 10.0)

    def test_centered_grid(self):
        grid = Grid.centered(8, 4.0)
        np.testing.assert_allclose(grid.points, [-4, -3, -2, -1, 0, 1, 2, 3])
        self.assertEqual(grid.upper, 4.0)
        self.assertEqual(grid.center, 0.0)

    def test_self_dual_grid_is_its_own_reciprocal(self):
        grid = Grid.self_dual(256)
        np.testing.assert_allclose(grid.reciprocal().points, grid.points, atol=1e-12)

    def test_interior_and_boundary_masks_are_complementary_shares(self):
        grid = Grid.centered(1024, 10.0)
        self.assertAlmostEqual(np.mean(grid.interior_mask(0.8)), 0.8, delta=2 / grid.size)
        self.assertAlmostEqual(np.mean(grid.boundary_mask()), 0.1, delta=2 / grid.size)


class DerivativeTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.centered(128, 2 * math.pi)
        self.x = self.grid.points

    def test_spectral_derivative_of_a_periodic_function(self):
        values = np.sin(self.x)
        np.testing.assert_allclose(spectral_derivative(values, self.grid.spacing), np.cos(self.x), atol=1e-12)
        np.testing.assert_allclose(spectral_derivative(values, self.grid.spacing, order=2), -values, atol=1e-12)

    def test_fourth_order_differences(self):
        values = np.sin(self.x)
        error = np.max(np.abs(central_difference(values, self.grid.spacing) - np.cos(self.x)))
        self.assertLess(error, self.grid.spacing**4)

    def test_wrapped_difference_folds_into_half_open_interval(self):
        np.testing.assert_allclose(wrapped_difference(3.0, -3.0), 6.0 - 2 * math.pi)

    def test_time_derivative_needs_enough_samples(self):
        with self.assertRaises(InsufficientSnapshotsError):
            time_derivative(np.zeros((4, 8)), 0.1, order=4)

    def test_time_derivative_orders(self):
        times = np.arange(20) * 0.05
        samples = np.exp(times)[:, None]
        for order, tolerance in ((2, 1e-3), (4, 1e-6)):
            indices, derivative = time_derivative(samples, 0.05, order=order)
            np.testing.assert_allclose(derivative[:, 0], samples[indices, 0], rtol=tolerance)


class WaveFieldTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.centered(512, 12.0)

    @settings(max_examples=25, deadline=None)
    @given(
        center=st.floats(min_value=-3, max_value=3),
        width=st.floats(min_value=0.4, max_value=1.2),
        momentum=st.floats(min_value=-3, max_value=3),
    )
    def test_gaussian_moments(self, center, width, momentum):
        wave = gaussian_packet(self.grid, center, width, momentum)
        self.assertAlmostEqual(wave.norm(), 1.0, places=12)
        self.assertAlmostEqual(wave.mean(), center, places=8)
        self.assertAlmostEqual(wave.width(), width, places=8)

        momentum_wave = to_momentum(wave)
        self.assertAlmostEqual(momentum_wave.norm(), 1.0, places=10)
        self.assertAlmostEqual(momentum_wave.mean(), momentum, places=8)
        self.assertAlmostEqual(momentum_wave.width(), 1 / (2 * width), places=8)

    def test_packet_must_fit_the_grid(self):
        with self.assertRaises(DomainOverflowError):
            gaussian_packet(self.grid, 10.0, 1.0)

    def test_momentum_round_trip(self):
        wave = gaussian_packet(self.grid, 1.0, 0.8, 1.5)
        back = from_momentum(to_momentum(wave))
        self.assertEqual(back.representation, Representation.POSITION)
        np.testing.assert_allclose(back.amplitude, wave.amplitude, atol=1e-12)

    def test_representation_guards(self):
        momentum_wave = to_momentum(gaussian_packet(self.grid, 0.0, 1.0))
        with self.assertRaises(RepresentationMismatchError):
            to_momentum(momentum_wave)
        with self.assertRaises(RepresentationMismatchError):
            from_momentum(gaussian_packet(self.grid, 0.0, 1.0))

    def test_oscillator_energies(self):
        for level, energy in ((0, 0.5), (1, 1.5)):
            state = oscillator_eigenstate(self.grid, level, HARMONIC)
            self.assertAlmostEqual(energy_expectation(state, HARMONIC), energy, places=10)
            self.assertAlmostEqual(energy_expectation(to_momentum(state), HARMONIC), energy, places=10)

    def test_two_slit_packet_is_symmetric(self):
        wave = two_slit_packet(self.grid, 6.0, 0.5)
        self.assertAlmostEqual(wave.norm(), 1.0, places=12)
        self.assertAlmostEqual(wave.mean(), 0.0, places=10)

    def test_momentum_operator_of_cubic_potential_is_unsupported(self):
        cubic = HamiltonianSpec(potential=PotentialKind.CUBIC, cubic=0.05)
        with self.assertRaises(UnsupportedPotentialError):
            hamiltonian_operator(cubic, self.grid, Representation.MOMENTUM)

    def test_harmonic_potential_needs_stiffness(self):
        with self.assertRaises(ValueError):
            HamiltonianSpec(stiffness=0.0)


class EvolveTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid.centered(512, 12.0)

    def test_ground_state_is_stationary(self):
        ground = oscillator_eigenstate(self.grid, 0, HARMONIC)
        trace = evolve(ground, HARMONIC, 1e-4, 1000, 1e-2)
        self.assertEqual(len(trace), 11)
        self.assertAlmostEqual(trace.times[-1], 0.1, places=12)
        self.assertLess(trace.norm_drift(), 1e-10)
        self.assertLess(liouville_residual(trace, order=4).maximum, 1e-8)
        self.assertLess(energy_equation_residual(trace, order=4).maximum, 1e-8)

    def test_coherent_state_follows_the_classical_orbit(self):
        wave = gaussian_packet(self.grid, 2.0, math.sqrt(0.5))
        trace = evolve(wave, HARMONIC, 1e-3, 1000, 1e-2)
        np.testing.assert_allclose(trace.mean_positions(), 2.0 * np.cos(trace.times), atol=1e-3)
        np.testing.assert_allclose(trace.widths(), math.sqrt(0.5), atol=1e-4)
        energies = trace.energies()
        self.assertLess(np.max(np.abs(energies - energies[0])) / energies[0], 1e-6)

    def test_second_order_convergence_under_halving(self):
        wave = gaussian_packet(self.grid, 2.0, math.sqrt(0.5))
        trace = evolve(wave, HARMONIC, 1e-3, 1000, 1e-2)
        fine = liouville_residual(trace)
        coarse = liouville_residual(trace.subsample(2))
        self.assertAlmostEqual(convergence_order(fine, coarse), 2.0, delta=0.2)

    def test_residual_sum_identity(self):
        grid = Grid.centered(64, 8.0)
        trace = evolve(gaussian_packet(grid, 1.0, math.sqrt(0.5)), HARMONIC, 1e-3, 100, 1e-2)
        _, psi, defect = _schrodinger_defect(trace, None, 2)
        spacing = grid.spacing

        for a, state in zip(defect, psi):
            commutator = np.outer(a, state.conj()) - np.outer(state, a.conj())
            anticommutator = np.outer(a, state.conj()) + np.outer(state, a.conj())
            np.testing.assert_allclose(commutator + anticommutator, 2 * np.outer(a, state.conj()), rtol=0, atol=1e-15)

        def norm(rows):
            return np.sqrt(np.sum(np.abs(rows) ** 2, axis=-1) * spacing)

        expected = 2 * norm(defect) * norm(psi) / norm(psi) ** 2
        np.testing.assert_allclose(schrodinger_residual(trace).values, expected, rtol=1e-12)

        density = norm(psi) ** 2
        pairs = list(zip(defect, psi))
        commutators = np.array([spacing * np.linalg.norm(np.outer(a, s.conj()) - np.outer(s, a.conj())) for a, s in pairs])
        anticommutators = np.array(
            [spacing * np.linalg.norm(np.outer(a, s.conj()) + np.outer(s, a.conj())) for a, s in pairs]
        )
        np.testing.assert_allclose(liouville_residual(trace).values, commutators / density, rtol=1e-9)
        np.testing.assert_allclose(energy_equation_residual(trace).values, anticommutators / density, rtol=1e-9)

    def test_free_packet_spreads(self):
        wave = gaussian_packet(self.grid, 0.0, 1.0)
        trace = evolve(wave, FREE, 1e-2, 200, 1e-1)
        expected = np.sqrt(1 + (trace.times / 2) ** 2)
        np.testing.assert_allclose(trace.widths(), expected, rtol=1e-8)

    def test_boundary_contact_is_an_instability(self):
        grid = Grid.centered(256, 12.0)
        wave = gaussian_packet(grid, 0.0, 0.5, 10.0)
        with self.assertRaises(InstabilityError):
            evolve(wave, FREE, 1e-3, 1000, 1e-2)

    def test_steps_must_fill_whole_snapshot_intervals(self):
        wave = gaussian_packet(self.grid, 0.0, 1.0)
        with self.assertRaises(ValueError):
            evolve(wave, FREE, 1e-3, 15, 1e-2)

    def test_momentum_fields_are_not_propagated(self):
        wave = to_momentum(gaussian_packet(self.grid, 0.0, 1.0))
        with self.assertRaises(RepresentationMismatchError):
            evolve(wave, FREE, 1e-3, 10)

    def test_residuals_need_three_snapshots(self):
        wave = gaussian_packet(self.grid, 0.0, 1.0)
        trace = EvolutionTrace((wave, wave.with_amplitude(wave.amplitude, time=0.1)), FREE)
        with self.assertRaises(InsufficientSnapshotsError):
            liouville_residual(trace)

    def test_trace_rejects_uneven_times(self):
        wave = gaussian_packet(self.grid, 0.0, 1.0)
        snapshots = [wave.with_amplitude(wave.amplitude, time=t) for t in (0.0, 0.1, 0.3)]
        with self.assertRaises(ValueError):
            EvolutionTrace(tuple(snapshots))

    def test_wave_field_shape_is_checked(self):
        with self.assertRaises(ValueError):
            WaveField(self.grid, np.ones(10))
