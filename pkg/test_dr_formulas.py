import unittest
from fractions import Fraction

from dr_formulas import (
    FORMULAS, check_multiplicativity, dr, dr_abelian, dr_albanese, dr_hain, dr_main, dr_product_constant,
    dr_scaling_check, dr_via_sections, family_rank, package_e_class, product_expansion_check
)
from exceptions import (
    InvalidGenus, InvalidRank, InvalidScalingFactor, NotACurveFamily, NotAbelianFamily, RingMismatch
)
from geometry import pullback
from library import (
    elliptic_dual, elliptic_pair_family, flagship_family, jacobian_g2, point_ring, projective_line_family
)


class TestFlagshipFamily(unittest.TestCase):
    """
    E x E^ -> E^ with the Poincare bundle: every formula gives the origin of E^.
    """

    def setUp(self):
        self.family = flagship_family()
        self.origin = elliptic_dual().point()

    def test_rank(self):
        self.assertEqual(family_rank(self.family), 2)

    def test_every_formula(self):
        for formula in FORMULAS:
            with self.subTest(formula=formula):
                result = dr(self.family, formula)
                self.assertEqual(result.value, self.origin)
                self.assertEqual(result.formula_used, formula)

    def test_sections(self):
        self.assertEqual(dr_via_sections(self.family).value, self.origin)

    def test_e_class_on_fibre(self):
        package = self.family.package
        E = pullback(package.fibre_inclusion, package_e_class(self.family))
        self.assertEqual(E, 2 * self.origin)

    def test_result_payload(self):
        payload = dr_main(self.family, 2).to_dict()
        self.assertEqual(payload['formula'], 'main')
        self.assertEqual(payload['inputs']['d'], 2)
        self.assertEqual(payload['class']['text'], 'theta_hat')

    def test_invalid_rank(self):
        for d in (0, -1, True, Fraction(1, 2)):
            with self.subTest(d=d):
                with self.assertRaises(InvalidRank):
                    dr_main(self.family, d)

    def test_wrong_rank_rescales(self):
        self.assertEqual(dr_main(self.family, 1).value, 2 * self.origin)

    def test_unknown_formula(self):
        with self.assertRaises(ValueError):
            dr(self.family, 'bogus')

    def test_trivial_bundle_gives_zero_with_warning(self):
        trivial = self.family.with_line_bundle(self.family.total.zero())
        with self.assertLogs('chowdr', level='WARNING'):
            result = dr_main(trivial, 2)
        self.assertTrue(result.value.is_zero())

    def test_scaling(self):
        for r in (0, 1, 2, 3):
            with self.subTest(r=r):
                self.assertTrue(dr_scaling_check(self.family, 2, r))
        with self.assertRaises(InvalidScalingFactor):
            dr_scaling_check(self.family, 2, -1)


class TestEllipticPairFamily(unittest.TestCase):

    def setUp(self):
        self.family = elliptic_pair_family()
        self.point = jacobian_g2().point()

    def test_e_class(self):
        ring = jacobian_g2()
        expected = 2 * (ring.basis_class('theta_hat_1') + ring.basis_class('theta_hat_2'))
        self.assertEqual(package_e_class(self.family), expected)
        self.assertEqual(family_rank(self.family), 4)

    def test_formulas_agree(self):
        self.assertEqual(dr_main(self.family).value, self.point)
        self.assertEqual(dr_abelian(self.family).value, self.point)
        self.assertEqual(dr_albanese(self.family.total, self.family.proj, self.family.cL, 2).value, self.point)

    def test_multiplicativity(self):
        self.assertTrue(check_multiplicativity(self.family, [flagship_family(), flagship_family()]))

    def test_curve_formula_refused(self):
        with self.assertRaises(NotACurveFamily):
            dr_hain(self.family)

    def test_albanese_ring_mismatch(self):
        with self.assertRaises(RingMismatch):
            dr_albanese(flagship_family().total, self.family.proj, self.family.cL, 2)

    def test_scaling(self):
        self.assertTrue(dr_scaling_check(self.family, 4, 2))


class TestGenusZero(unittest.TestCase):

    def setUp(self):
        self.family = projective_line_family()

    def test_unit(self):
        self.assertEqual(family_rank(self.family), 1)
        self.assertEqual(dr_main(self.family).value, point_ring().unit())
        self.assertEqual(dr_hain(self.family).value, point_ring().unit())

    def test_rank_forced_to_one(self):
        with self.assertRaises(InvalidRank):
            dr_main(self.family, 2)

    def test_not_abelian(self):
        with self.assertRaises(NotAbelianFamily):
            dr_abelian(self.family)
        with self.assertRaises(NotAbelianFamily):
            dr(self.family, 'albanese')


class TestProductOfCurves(unittest.TestCase):

    def test_closed_form(self):
        self.assertEqual(dr_product_constant(2, 2), Fraction(1, 256))
        self.assertEqual(dr_product_constant(2, 3), Fraction(1, 4096))
        self.assertEqual(dr_product_constant(3, 0, 'sections'), Fraction(1, 8))

    def test_expansion_matches_closed_form(self):
        for g1, g2 in ((2, 2), (2, 3), (3, 4)):
            with self.subTest(g1=g1, g2=g2):
                ok, constant = product_expansion_check(g1, g2)
                self.assertTrue(ok)
                self.assertEqual(constant, dr_product_constant(g1, g2))

    def test_sections_variant(self):
        for g1, g2 in ((0, 0), (1, 1), (0, 3), (2, 1)):
            with self.subTest(g1=g1, g2=g2):
                ok, constant = product_expansion_check(g1, g2, 'sections')
                self.assertTrue(ok)
                self.assertEqual(constant, Fraction(1, 2 ** (g1 + g2)))

    def test_canonical_needs_genus_two(self):
        with self.assertRaises(InvalidGenus):
            dr_product_constant(1, 2)
        with self.assertRaises(ValueError):
            dr_product_constant(2, 2, 'bogus')


if __name__ == '__main__':
    unittest.main()
