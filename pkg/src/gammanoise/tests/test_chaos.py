"""
Tests for the Laguerre / Appell systems and the multi-index chaos basis.
"""

import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
from scipy import special

from gammanoise.chaos import (
    appell_coeffs,
    basis_eval,
    chaos_norm,
    compose_with_alpha,
    expand_linear,
    family_to_csv,
    generating_function_check,
    generating_function_series,
    laguerre_coeffs,
    laguerre_eval,
    laguerre_family,
    norm_table_to_csv,
    norm_vector,
    orthogonality_table,
)
from gammanoise.core_model import Partition, StepFunction, poisson_alpha_series
from gammanoise.errors import DomainError
from gammanoise.sampler import sample_increment_batch
from gammanoise.utils.series import multi_index_set

SHAPES = (0.5, 1.0, 2.7)


class TestLaguerre(unittest.TestCase):
    """Test the Laguerre family L_n^(t-1)."""

    def test_low_degrees(self):
        t, s = 2.7, 1.3
        self.assertEqual(laguerre_eval(0, t, s), 1.0)
        self.assertAlmostEqual(laguerre_eval(1, t, s), t - s, places=14)
        self.assertAlmostEqual(laguerre_eval(2, t, s), ((2 + t - s) * (t - s) - t) / 2, places=14)

    def test_matches_scipy(self):
        s = np.linspace(0.0, 20.0, 41)
        for t in SHAPES:
            family = laguerre_family(12, t, s)
            for n in range(13):
                np.testing.assert_allclose(family[n], special.eval_genlaguerre(n, t - 1.0, s),
                                           rtol=1e-10, atol=1e-10)

    def test_monomial_coefficients(self):
        for t in SHAPES:
            for n in range(9):
                poly = laguerre_coeffs(n, t)
                self.assertAlmostEqual(poly(1.7), laguerre_eval(n, t, 1.7), places=10)

    def test_rejects_bad_shape(self):
        with self.assertRaises(DomainError):
            laguerre_eval(2, 0.0, 1.0)


class TestGeneratingFunction(unittest.TestCase):
    """Test the Laguerre generating function (1-lam)^(-t) exp(s lam/(lam-1))."""

    def test_series_coefficients_are_laguerre(self):
        for t in SHAPES:
            series = generating_function_series(t, 0.8, 10)
            np.testing.assert_allclose(series, laguerre_family(10, t, 0.8), rtol=1e-12, atol=1e-13)

    def test_partial_sums_converge(self):
        self.assertLess(generating_function_check(1.5, 0.7, 0.5, 80), 1e-10)
        self.assertEqual(generating_function_check(1.5, 0.7, 0.0, 5), 0.0)

    def test_outside_unit_disk(self):
        with self.assertRaises(DomainError):
            generating_function_check(1.0, 1.0, 1.0, 10)


class TestAppellComposition(unittest.TestCase):
    """Test the Appell family and its alpha composition."""

    def test_appell_low_degrees(self):
        t = 2.7
        np.testing.assert_allclose(appell_coeffs(1, t).coeffs, [-t, 1.0])
        np.testing.assert_allclose(appell_coeffs(2, t).coeffs, [t * (t - 1), -2 * t, 1.0])

    def test_composition_gives_laguerre(self):
        for t in SHAPES:
            composed = compose_with_alpha([appell_coeffs(n, t) for n in range(9)], 8)
            for n, poly in enumerate(composed):
                want = laguerre_coeffs(n, t).coeffs
                scale = max(1.0, float(np.max(np.abs(want))))
                np.testing.assert_allclose(poly.padded(n + 1) / scale, want / scale, atol=1e-12)

    def test_poisson_alpha_first_terms(self):
        t = 1.5
        appell = [appell_coeffs(n, t) for n in range(4)]
        composed = compose_with_alpha(appell, 3, alpha=poisson_alpha_series(3))
        np.testing.assert_allclose(composed[0].coeffs, [1.0])
        np.testing.assert_allclose(composed[1].coeffs, appell[1].coeffs)

    def test_alpha_needs_zero_constant(self):
        with self.assertRaises(DomainError):
            compose_with_alpha([appell_coeffs(n, 1.0) for n in range(3)], 2, alpha=[1.0, 1.0])

    def test_needs_enough_appell_terms(self):
        with self.assertRaises(DomainError):
            compose_with_alpha([appell_coeffs(0, 1.0)], 2)


class TestChaosBasis(unittest.TestCase):
    """Test norms, orthogonality and basis evaluation."""

    def test_norm_formula(self):
        partition = Partition((0.0, 1.0, 3.0))
        self.assertEqual(chaos_norm((0, 0), partition), 1.0)
        self.assertAlmostEqual(chaos_norm((1, 0), partition), 1.0, places=14)
        self.assertAlmostEqual(chaos_norm((2, 0), partition), 1.0, places=14)
        self.assertAlmostEqual(chaos_norm((0, 2), partition), 3.0, places=13)
        self.assertAlmostEqual(chaos_norm((1, 1), partition), 2.0, places=14)

    def test_norm_vector_order(self):
        partition = Partition.uniform(2.0, 2)
        index_set = multi_index_set(2, 3)
        nu = norm_vector(partition, 3)
        for i, idx in enumerate(index_set.indices):
            self.assertAlmostEqual(nu[i], chaos_norm(tuple(idx), partition), places=14)

    def test_norm_rejects_wrong_length(self):
        with self.assertRaises(DomainError):
            chaos_norm((1,), Partition.uniform(2.0, 2))

    def test_quadrature_orthogonality(self):
        for t in SHAPES:
            gram = orthogonality_table(t, 12)
            nu = special.poch(t, np.arange(13)) / special.factorial(np.arange(13))
            scale = np.maximum(1.0, np.maximum.outer(nu, nu))
            self.assertLess(np.max(np.abs(gram - np.diag(nu)) / scale), 1e-9)

    def test_basis_eval_linear(self):
        partition = Partition((0.0, 0.5, 2.0))
        batch = sample_increment_batch(partition, 10, 5)
        np.testing.assert_allclose(basis_eval((0, 1), batch), 1.5 - batch.increments[:, 1], rtol=1e-14)
        np.testing.assert_array_equal(basis_eval((0, 0), batch), np.ones(10))
        self.assertIsInstance(basis_eval((1, 0), batch.path(0)), float)

    def test_basis_eval_raw_array_needs_partition(self):
        with self.assertRaises(DomainError):
            basis_eval((1, 0), np.ones((3, 2)))

    def test_monte_carlo_orthogonality(self):
        partition = Partition((0.0, 0.5, 2.0))
        batch = sample_increment_batch(partition, 40000, 11)
        first = basis_eval((1, 1), batch)
        second = basis_eval((2, 0), batch)
        product = first * second
        self.assertLess(abs(product.mean()), 5 * product.std() / math.sqrt(product.size))
        square = first * first
        self.assertLess(abs(square.mean() - chaos_norm((1, 1), partition)),
                        5 * square.std() / math.sqrt(square.size))

    def test_expand_linear_is_pathwise_pairing(self):
        f = StepFunction(Partition((0.0, 0.5, 2.0)), (2.0, -1.0))
        element = expand_linear(f, N=3)
        batch = sample_increment_batch(f.partition, 8, 3)
        np.testing.assert_allclose(element.evaluate(batch.increments), batch.increments @ f.as_array(),
                                   rtol=1e-12, atol=1e-12)
        with self.assertRaises(DomainError):
            expand_linear(StepFunction(f.partition, (1j, 0.0)))


class TestChaosExport(unittest.TestCase):
    """Test polynomial family and norm table CSVs."""

    def test_family_csv(self):
        family = [laguerre_coeffs(n, 1.0) for n in range(3)]
        with tempfile.TemporaryDirectory() as tmp:
            lines = family_to_csv(family, Path(tmp) / "f.csv").read_text().splitlines()
        self.assertEqual(lines[0], "n,coeff_0,coeff_1,coeff_2")
        self.assertEqual(lines[1], "0,1.0")

    def test_norm_table_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            lines = norm_table_to_csv(Partition.uniform(2.0, 2), 2, Path(tmp) / "n.csv").read_text().splitlines()
        self.assertEqual(lines[0], "multiindex,nu")
        self.assertEqual(lines[1], "0 0,1.0")
        self.assertEqual(len(lines), 1 + 6)


if __name__ == '__main__':
    unittest.main()
