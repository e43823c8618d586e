#!/usr/bin/env python

""" Test the virtual single-slit experiment and Bohmian velocities
"""

import math
from functools import partial
from unittest import TestCase, main

import numpy as np

from locstate.diffraction import (
    ComparisonReport,
    Regime,
    ScreenGeometry,
    bohm_velocity_y,
    compare_patterns,
    fraunhofer_mapped_reference,
    fresnel_number,
    launch_time,
    product_density,
    quantile_positions,
    screen_evaluator,
    time_of_flight,
    trajectory_fan,
)
from locstate.exceptions import DomainError, GridMismatch, SingularVelocity
from locstate.freestate import SlitSpec, default_grid, density_profile, evaluate_limit
from locstate.shared_types import SampledDensity
from locstate.utils import trapezoid, uniform_grid


class DiffractionTest(TestCase):
    def setUp(self):
        self.slit = SlitSpec(width_a=0.1)

    def test_time_of_flight(self):
        screen = ScreenGeometry(distance_D=1.0, k_x=100.0)
        self.assertAlmostEqual(time_of_flight(screen), 0.01, places=15)
        self.assertAlmostEqual(screen.wavelength, 2 * math.pi / 100.0)
        slow = ScreenGeometry(distance_D=1.0, k_x=100.0, constants={"hbar_over_m": 0.5})
        self.assertAlmostEqual(time_of_flight(slow), 0.02, places=15)

    def test_fresnel_numbers(self):
        expected = {5e-4: 0.796, 7.5e-4: 0.531, 1e-3: 0.398, 1e-2: 0.0398}
        for T, number in expected.items():
            self.assertAlmostEqual(fresnel_number(self.slit, T), number, delta=1e-3, msg=T)
        self.assertEqual(round(fresnel_number(self.slit, 1e-2), 3), 0.04)
        # N_F = a^2 / (4 lambda D) with T = D / v_x
        screen = ScreenGeometry(distance_D=2.0, k_x=50.0)
        self.assertAlmostEqual(
            fresnel_number(self.slit, time_of_flight(screen)),
            0.1**2 / (4 * screen.wavelength * 2.0),
            places=14,
        )
        for T in (0.0, -1.0, float("inf")):
            with self.assertRaises(DomainError):
                fresnel_number(self.slit, T)

    def test_regimes(self):
        self.assertEqual(Regime.classify(0.0398), Regime.fraunhofer)
        self.assertEqual(Regime.classify(0.3), Regime.transition)
        self.assertEqual(Regime.classify(0.796), Regime.fresnel)
        self.assertEqual(Regime.fresnel.value, "Fresnel")

    def test_mapped_reference(self):
        T = 1e-2
        grid = default_grid(self.slit, T)
        reference = fraunhofer_mapped_reference(self.slit, T, grid)
        self.assertTrue(reference.normalized)
        self.assertAlmostEqual(grid[int(np.argmax(reference.density))], 0.0, places=12)
        # first zero at alpha = pi, i.e. y = 2 pi (hbar/m) T / a
        first_zero = 2 * math.pi * T / 0.1
        zero_density = fraunhofer_mapped_reference(self.slit, T, np.array([0.0, first_zero]))
        self.assertLess(zero_density.density[1], 1e-25 * zero_density.density[0] + 1e-20)
        with self.assertRaises(DomainError):
            fraunhofer_mapped_reference(self.slit, 0.0, grid)

    def test_product_density_is_the_transverse_density(self):
        screen = ScreenGeometry(distance_D=1.0, k_x=100.0)
        T = time_of_flight(screen)
        grid = default_grid(self.slit, T, 801)
        on_screen = product_density(self.slit, screen, grid)
        direct = density_profile(partial(evaluate_limit, self.slit), grid, T)
        np.testing.assert_allclose(on_screen.density, direct.density, rtol=1e-12)
        truncated = product_density(self.slit, screen, grid, cutoff_km=200.0)
        self.assertTrue(truncated.normalized)

    def test_screen_evaluator(self):
        limit = screen_evaluator(self.slit)
        self.assertEqual(limit(0.0, 1e-3), evaluate_limit(self.slit, 0.0, 1e-3))
        truncated = screen_evaluator(self.slit, 1e4)
        self.assertAlmostEqual(truncated(0.0, 1e-3), limit(0.0, 1e-3), delta=1e-2)

    def compare_at(self, T):
        grid = default_grid(self.slit, T)
        observed = density_profile(partial(evaluate_limit, self.slit), grid, T)
        reference = fraunhofer_mapped_reference(self.slit, T, grid)
        report = compare_patterns(observed, reference, fresnel_number(self.slit, T))
        return report, reference

    def test_far_field_agreement(self):
        report, reference = self.compare_at(1e-2)
        self.assertEqual(report.regime, Regime.fraunhofer)
        self.assertLessEqual(report.linf_distance, 0.02 * reference.peak)
        self.assertAlmostEqual(report.peak_ratio, 1.0, delta=0.02)

    def test_fresnel_deviation(self):
        report, reference = self.compare_at(1e-3)
        self.assertEqual(report.regime, Regime.transition)
        self.assertGreater(report.linf_distance, 0.10 * reference.peak)
        self.assertGreater(report.l2_distance, 0.0)

    def test_report_key_order(self):
        report, _ = self.compare_at(1e-2)
        self.assertEqual(
            list(report.model_dump().keys()),
            ["fresnel_number", "l2_distance", "linf_distance", "peak_ratio", "regime"],
        )
        self.assertEqual(report.model_dump(mode="json")["regime"], "Fraunhofer")
        self.assertIsInstance(report, ComparisonReport)

    def test_compare_requires_same_grid_and_normalization(self):
        grid = np.linspace(-0.5, 0.5, 11)
        reference = fraunhofer_mapped_reference(self.slit, 1e-2, grid)
        other = fraunhofer_mapped_reference(self.slit, 1e-2, np.linspace(-0.5, 0.5, 12))
        with self.assertRaises(GridMismatch) as cm:
            compare_patterns(reference, other, 0.04)
        self.assertIn("11 points", str(cm.exception))
        raw = SampledDensity(grid_y=grid, density=np.ones(11), time_t=1e-2, normalized=False)
        with self.assertRaises(DomainError):
            compare_patterns(raw, reference, 0.04)

    def test_bohm_velocity(self):
        T = 1e-2
        # far from the slit the flow is ballistic, v = (y - y0) / t
        self.assertAlmostEqual(bohm_velocity_y(self.slit, 0.3, T) / (0.3 / T), 1.0, delta=0.05)
        velocities = bohm_velocity_y(self.slit, np.array([-0.2, 0.0, 0.2]), T)
        self.assertAlmostEqual(velocities[1], 0.0, places=10)
        self.assertAlmostEqual(velocities[0], -velocities[2], places=8)
        self.assertEqual(bohm_velocity_y(self.slit, 0.01, 0.0), 0.0)
        with self.assertRaises(SingularVelocity) as cm:
            bohm_velocity_y(self.slit, 1.0, 0.0)
        self.assertIn("node", str(cm.exception))

    def test_quantile_positions(self):
        T = 1e-2
        positions = quantile_positions(self.slit, T, [0.25, 0.5, 0.75])
        self.assertAlmostEqual(positions[1], 0.0, places=6)
        self.assertAlmostEqual(positions[0], -positions[2], places=6)
        # the state has unit norm, so the mass between two quantiles is their difference
        for lo, hi in ((0.25, 0.75), (0.05, 0.95), (0.01, 0.6)):
            y_lo, y_hi = quantile_positions(self.slit, T, [lo, hi])
            grid = uniform_grid(y_lo, y_hi, 20001)
            density = np.abs(evaluate_limit(self.slit, grid, T)) ** 2
            self.assertAlmostEqual(trapezoid(density, grid), hi - lo, delta=5e-4)

    def test_quantiles_beyond_the_grid(self):
        T = 1e-2
        half_width = default_grid(self.slit, T)[-1]
        far = quantile_positions(self.slit, T, [1e-4, 1 - 1e-4])
        self.assertGreater(far[1], half_width)
        self.assertAlmostEqual(far[0] / far[1], -1.0, places=9)
        # the far tail spreads ballistically
        later = quantile_positions(self.slit, 2 * T, [1 - 1e-4])
        self.assertAlmostEqual(later[0] / far[1], 2.0, delta=1e-3)

    def test_trajectory_fan(self):
        T = 1e-2
        fan = trajectory_fan(self.slit, T, count=9, steps=2000, record_every=100)
        self.assertEqual(fan.paths.shape, (9, 21))
        self.assertEqual(fan.times.shape, (21,))
        self.assertAlmostEqual(fan.times[0], launch_time(T))
        self.assertAlmostEqual(fan.times[-1], T, places=12)
        # trajectories never cross
        self.assertTrue(np.all(np.diff(fan.paths, axis=0) > 0))
        np.testing.assert_allclose(fan.endpoints, -fan.endpoints[::-1], atol=1e-6)
        # they carry the quantiles of the density along
        expected = quantile_positions(self.slit, T, fan.quantiles)
        np.testing.assert_allclose(fan.endpoints, expected, atol=5e-3)

    def test_tail_trajectories_stay_on_their_quantiles(self):
        # far out the flow crosses dark fringes where |Psi| nearly vanishes
        T = 1e-2
        quantiles = [0.00025, 0.02, 0.5, 0.98, 0.99975]
        fan = trajectory_fan(self.slit, T, quantiles=quantiles, steps=400)
        expected = quantile_positions(self.slit, T, quantiles)
        self.assertGreater(expected[-1], 100.0)
        np.testing.assert_allclose(fan.endpoints, expected, rtol=2e-2, atol=5e-3)
        self.assertTrue(np.all(np.diff(fan.paths, axis=0) > 0))

    def test_trajectory_fan_needs_positive_time(self):
        with self.assertRaises(DomainError):
            trajectory_fan(self.slit, 0.0, count=3, steps=10)


if __name__ == "__main__":
    main()
