#!/usr/bin/env python

""" Test the special functions and quadrature rules
"""

import doctest
import math
from unittest import TestCase, main

import numpy as np
from scipy import special

from locstate import numerics, utils
from locstate.exceptions import DomainError, QuadratureOrderError
from locstate.numerics import (
    complex_erf,
    erf_difference,
    fresnel_cs,
    gauss_legendre,
    hermite_function,
    iter_hermite_functions,
    sqrt_i_times,
)


class NumericsTest(TestCase):
    def test_run_doctest(self):
        """Run doctests in locstate.numerics and locstate.utils"""
        for module in (numerics, utils):
            results = doctest.testmod(module)
            self.assertFalse(results.failed, results)

    def test_sqrt_i_times(self):
        root = sqrt_i_times(2.0)
        self.assertAlmostEqual(root * root, 2j, places=14)
        self.assertAlmostEqual(np.angle(root), math.pi / 4, places=14)
        negative = sqrt_i_times(-2.0)
        self.assertAlmostEqual(negative * negative, -2j, places=14)
        self.assertGreater(negative.real, 0)

    def test_complex_erf(self):
        self.assertAlmostEqual(complex_erf(1j).imag, 1.6504257587975428, places=13)
        self.assertAlmostEqual(complex_erf(1j).real, 0.0, places=15)
        self.assertIsInstance(complex_erf(0.5), complex)
        self.assertAlmostEqual(complex_erf(1.0).real, 0.8427007929497149, places=14)
        self.assertEqual(complex_erf(0.0), 0.0)
        z = 0.3 + 0.7j
        self.assertAlmostEqual(complex_erf(z.conjugate()), complex_erf(z).conjugate(), places=14)
        # C(u) + i S(u) = (1 + i)/2 erf(sqrt(pi)/2 (1 - i) u)
        c, s = fresnel_cs(1.0)
        via_erf = 0.5 * (1 + 1j) * complex_erf(0.5 * math.sqrt(math.pi) * (1 - 1j))
        self.assertAlmostEqual(via_erf, complex(c, s), places=12)
        self.assertAlmostEqual(c, 0.7798934003768228, places=13)
        self.assertAlmostEqual(s, 0.4382591473903548, places=13)
        values = complex_erf(np.array([0.5, -0.5]))
        self.assertEqual(values.shape, (2,))
        self.assertAlmostEqual(values[0], -values[1], places=15)
        # saturates to +-1 along the diagonal rays
        far = complex_erf(40.0 * np.exp(0.2j * math.pi))
        self.assertAlmostEqual(far, 1.0, places=12)
        with self.assertRaises(DomainError):
            complex_erf(float("nan"))

    def test_erf_difference_keeps_small_differences(self):
        expected = special.erfc(5.0) - special.erfc(6.0)
        result = erf_difference(6.0, 5.0)
        self.assertLess(abs(result - expected), 1e-10 * abs(expected))
        mirrored = erf_difference(-5.0, -6.0)
        self.assertLess(abs(mirrored - expected), 1e-10 * abs(expected))
        mixed = erf_difference(1.0, -1.0)
        self.assertAlmostEqual(mixed, 2 * special.erf(1.0), places=15)
        with self.assertRaises(DomainError):
            erf_difference(float("inf"), 0.0)

    def test_fresnel_order(self):
        c, s = fresnel_cs(np.array([0.0, 1.0, 1e4]))
        self.assertEqual(c[0], 0.0)
        self.assertEqual(s[0], 0.0)
        self.assertGreater(c[1], s[1])
        self.assertAlmostEqual(c[2], 0.5, places=4)
        self.assertAlmostEqual(s[2], 0.5, places=4)

    def test_gauss_legendre_exact_for_polynomials(self):
        for order in (1, 2, 5, 16):
            rule = gauss_legendre(order)
            for degree in range(2 * order):
                exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
                result = rule.integrate(lambda x, d=degree: x**d, -1.0, 1.0)
                self.assertAlmostEqual(result, exact, delta=1e-14, msg=(order, degree))

    def test_gauss_legendre_high_order(self):
        rule = gauss_legendre(64)
        self.assertAlmostEqual(math.fsum(rule.weights.tolist()), 2.0, delta=1e-13)
        self.assertTrue(np.all(np.diff(rule.nodes) > 0))
        np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
        result = rule.integrate(np.exp, 0.0, 1.0)
        self.assertAlmostEqual(result, math.e - 1.0, delta=1e-13)
        big = gauss_legendre(2048)
        self.assertAlmostEqual(math.fsum(big.weights.tolist()), 2.0, delta=1e-10)
        self.assertTrue(np.all(big.weights > 0))

    def test_gauss_legendre_is_cached_and_read_only(self):
        self.assertIs(gauss_legendre(32), gauss_legendre(32))
        with self.assertRaises(ValueError):
            gauss_legendre(32).nodes[0] = 0.0

    def test_gauss_legendre_order_range(self):
        for order in (0, -3, 2049):
            with self.assertRaises(QuadratureOrderError):
                gauss_legendre(order)
        with self.assertRaises(QuadratureOrderError):
            gauss_legendre(2.5)

    def test_hermite_orthonormal(self):
        nodes, weights = gauss_legendre(400).scaled(-15.0, 15.0)
        functions = np.array(list(iter_hermite_functions(30, nodes)))
        gram = (functions * weights) @ functions.T
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)

    def test_hermite_parity_and_values(self):
        x = np.linspace(-3, 3, 13)
        for n in (0, 1, 7, 40):
            np.testing.assert_allclose(
                hermite_function(n, -x), (-1) ** n * hermite_function(n, x), atol=1e-14
            )
        self.assertAlmostEqual(
            hermite_function(1, 1.0), math.sqrt(2) * math.pi**-0.25 * math.exp(-0.5), places=14
        )

    def test_hermite_high_degree(self):
        value = hermite_function(3000, 70.0)
        self.assertTrue(math.isfinite(value))
        self.assertNotEqual(value, 0.0)
        self.assertLess(abs(value), 1.0)
        self.assertEqual(hermite_function(10, 60.0), 0.0)
        with self.assertRaises(DomainError):
            hermite_function(-1, 0.0)
        with self.assertRaises(DomainError):
            hermite_function(10001, 0.0)


if __name__ == "__main__":
    main()
