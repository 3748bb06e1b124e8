import unittest

from abelian import (
    abelian_pair, check_fourier_point, check_fourier_zero_section, check_rigidified, check_scaling,
    check_symmetric, fourier, poincare_formula_check, polarization_rank, rank_by_poincare, zero_section_class
)
from exceptions import InvalidGenus, InvalidRank, NotPositiveInteger, RingMismatch
from library import elliptic, elliptic_dual, elliptic_square, jacobian_g2, poincare_class


class TestFourier(unittest.TestCase):
    """
    Fourier transform on E x E^ and on its square.
    """

    def test_unit_goes_to_minus_origin(self):
        pair = abelian_pair(1)
        self.assertEqual(fourier(pair, pair.a_side.unit()), -elliptic_dual().point())

    def test_zero_section_and_point(self):
        for g in (1, 2):
            with self.subTest(g=g):
                pair = abelian_pair(g)
                self.assertTrue(check_fourier_zero_section(pair))
                self.assertTrue(check_fourier_point(pair))

    def test_zero_section_class_is_the_point(self):
        pair = abelian_pair(2)
        self.assertEqual(zero_section_class(pair.zero_section_dual), jacobian_g2().point())

    def test_input_must_live_on_a_side(self):
        with self.assertRaises(RingMismatch):
            fourier(abelian_pair(1), elliptic_dual().unit())

    def test_genus_must_be_positive(self):
        with self.assertRaises(InvalidGenus):
            abelian_pair(0)

    def test_scaling_of_zero_section(self):
        for g in (1, 2):
            for r in (2, 3):
                with self.subTest(g=g, r=r):
                    self.assertTrue(check_scaling(abelian_pair(g), r))


class TestPoincareFormula(unittest.TestCase):

    def test_principal_polarization(self):
        theta = elliptic().point()
        self.assertTrue(poincare_formula_check(elliptic(), theta, 1, 1))
        self.assertFalse(poincare_formula_check(elliptic(), theta, 1, 2))

    def test_rank_two_on_dual(self):
        E = 2 * elliptic_dual().point()
        self.assertEqual(rank_by_poincare(elliptic_dual(), E, 1), 2)
        self.assertEqual(polarization_rank(elliptic_dual(), E, 1), 2)

    def test_rank_four_on_jacobian_of_pair(self):
        ring = jacobian_g2()
        E = 2 * (ring.basis_class('theta_hat_1') + ring.basis_class('theta_hat_2'))
        self.assertTrue(poincare_formula_check(ring, E, 2, 4))
        self.assertEqual(rank_by_poincare(ring, E, 2), 4)
        self.assertEqual(polarization_rank(ring, E, 2), 4)

    def test_rank_must_be_positive(self):
        with self.assertRaises(InvalidRank):
            poincare_formula_check(elliptic(), elliptic().point(), 1, 0)

    def test_not_a_polarization(self):
        theta = elliptic().point()
        with self.assertRaises(NotPositiveInteger):
            polarization_rank(elliptic(), theta / 2, 1)
        with self.assertRaises(NotPositiveInteger):
            polarization_rank(elliptic(), -theta, 1)
        with self.assertRaises(NotPositiveInteger):
            rank_by_poincare(elliptic(), theta / 2, 1)

    def test_ring_mismatch(self):
        with self.assertRaises(RingMismatch):
            poincare_formula_check(elliptic_dual(), elliptic().point(), 1, 1)


class TestHygiene(unittest.TestCase):

    def setUp(self):
        self.square, self.maps = elliptic_square()

    def test_symmetric(self):
        fibres = self.square.element({'f1': 1, 'f2': 1})
        self.assertTrue(check_symmetric(self.square, fibres, self.maps['inv']))
        self.assertFalse(check_symmetric(self.square, poincare_class(self.square), self.maps['inv']))

    def test_rigidified(self):
        self.assertTrue(check_rigidified(self.square, poincare_class(self.square), self.maps['e2']))
        self.assertFalse(check_rigidified(self.square, self.square.basis_class('f1'), self.maps['e2']))


if __name__ == '__main__':
    unittest.main()
