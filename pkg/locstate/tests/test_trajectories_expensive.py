#!/usr/bin/env python

""" Trajectory ensembles reproduce the screen density

This suite is left out of the dev suite in run.py: it only gets run with
./run.py all, or ./test_trajectories_expensive.py.
"""

from unittest import TestCase, main

import numpy as np
from scipy.stats import chisquare

from locstate.diffraction import quantile_positions, trajectory_fan
from locstate.freestate import SlitSpec

BINS = 20
COUNT = 10000


class ExpensiveTrajectoryTest(TestCase):
    def test_arrivals_follow_the_density(self):
        for slit, T in (
            (SlitSpec(width_a=0.1), 1e-2),
            (SlitSpec(width_a=0.1), 1e-3),
            (SlitSpec(width_a=1.0, center_y0=0.5), 0.5),
        ):
            with self.subTest(a=slit.width_a, y0=slit.center_y0, T=T):
                fan = trajectory_fan(slit, T, count=COUNT, steps=400)
                # every trajectory ends on the quantile it was launched on
                expected = quantile_positions(slit, T, fan.quantiles)
                np.testing.assert_allclose(
                    fan.endpoints, expected, rtol=2e-2, atol=5e-3 * slit.width_a / 0.1
                )
                self.assertTrue(np.all(np.diff(fan.endpoints) > 0))
                edges = quantile_positions(slit, T, np.arange(1, BINS) / BINS)
                counts = np.bincount(np.searchsorted(edges, fan.endpoints), minlength=BINS)
                self.assertEqual(counts.sum(), COUNT)
                # launches are stratified, so each bin holds its share almost exactly
                self.assertLessEqual(np.abs(counts - COUNT // BINS).max(), 5, msg=counts.tolist())
                _, p_value = chisquare(counts)
                self.assertGreaterEqual(p_value, 0.01, msg=counts.tolist())


if __name__ == "__main__":
    main()
