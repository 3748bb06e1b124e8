import unittest

import sympy

from exceptions import (
    CompositionMismatch, DegreeMismatch, NotRingHomomorphism, ProjectionFormulaViolation, RingMismatch,
    UnknownModel, ValidationError
)
from geometry import (
    Registry, compose, external_product, identity, mixed_discriminant, numerical_ring, point_inclusion, pullback,
    pushforward, register_morphism, tensor_morphism, tensor_product
)
from library import (
    DIAGONAL, FIBRE, SECTION, elliptic, elliptic_dual, elliptic_square, elliptic_square_ring, poincare_class
)
from ring_core import integrate, mul


class TestMorphisms(unittest.TestCase):

    def setUp(self):
        self.square, self.maps = elliptic_square()
        self.e = elliptic()

    def test_wrong_relative_dimension(self):
        with self.assertRaises(DegreeMismatch):
            register_morphism('p1', self.square, self.e, {'theta': 'f1'}, rel_dim=0)

    def test_pullback_must_be_multiplicative(self):
        with self.assertRaises(NotRingHomomorphism):
            register_morphism(
                'bad', self.square, self.e, {'theta': {'f1': 1, 'f2': 1}},
                {'f2': 'one', 'delta': 'one', 'pt': 'theta'},
            )

    def test_projection_formula_checked(self):
        with self.assertRaises(ProjectionFormulaViolation):
            register_morphism('bad', self.square, self.e, {'theta': 'f1'}, {'delta': 'one', 'pt': 'theta'})

    def test_pushforward_by_duality(self):
        derived = register_morphism('p1_dual', self.square, self.e, {'theta': 'f1'})
        p1 = self.maps['p1']
        for symbol in ('one', 'f1', 'f2', 'delta', 'pt'):
            self.assertEqual(
                pushforward(derived, self.square.basis_class(symbol)).coefficients,
                pushforward(p1, self.square.basis_class(symbol)).coefficients,
            )

    def test_projection_of_poincare_square(self):
        p = poincare_class(self.square)
        self.assertEqual(pushforward(self.maps['p2'], p ** 2), -2 * elliptic_dual().point())

    def test_ring_mismatch(self):
        with self.assertRaises(RingMismatch):
            pullback(self.maps['p1'], elliptic_dual().point())
        with self.assertRaises(RingMismatch):
            pushforward(self.maps['p1'], self.e.point())

    def test_composition(self):
        p2_after_e2 = compose(self.maps['p2'], self.maps['e2'])
        self.assertEqual(p2_after_e2.rel_dim, 0)
        self.assertEqual(pullback(p2_after_e2, elliptic_dual().point()), self.e.zero())
        # Constant map to the origin
        self.assertEqual(pushforward(p2_after_e2, self.e.unit()), elliptic_dual().zero())
        self.assertEqual(pushforward(p2_after_e2, self.e.point()), elliptic_dual().point())

    def test_composition_mismatch(self):
        with self.assertRaises(CompositionMismatch):
            compose(self.maps['p1'], self.maps['p2'])

    def test_identity(self):
        x = self.square.element({'f1': 2, 'pt': -1})
        self.assertEqual(pullback(identity(self.square), x), x)
        self.assertTrue(compose(self.maps['p1'], identity(self.square)).same_tables(self.maps['p1']))

    def test_inversion_fixes_poincare_up_to_sign(self):
        p = poincare_class(self.square)
        self.assertEqual(pullback(self.maps['inv'], p), -p)

    def test_multiplication_scales_poincare(self):
        p = poincare_class(self.square)
        for r in range(-3, 4):
            with self.subTest(r=r):
                self.assertEqual(pullback(self.maps['mult_r'](r), p), r * p)
        self.assertTrue(self.maps['mult_r'](1).same_tables(identity(self.square)))

    def test_point_inclusion(self):
        include = point_inclusion(self.square)
        pushed = pushforward(include, include.source.unit())
        self.assertEqual(pushed, self.square.point())


class TestKunneth(unittest.TestCase):

    def test_symbols_and_point(self):
        ring, pr1, pr2 = tensor_product(elliptic(), elliptic())
        self.assertEqual(ring.dimension, 2)
        self.assertEqual(ring.point_class, 'theta_1_theta_2')
        self.assertEqual(ring.basis[1], ('theta_1', 'theta_2'))
        self.assertEqual(pullback(pr1, elliptic().point()), ring.basis_class('theta_1'))
        self.assertEqual(pushforward(pr2, ring.point()), elliptic().point())

    def test_product_is_cached(self):
        self.assertIs(tensor_product(elliptic(), elliptic())[0], tensor_product(elliptic(), elliptic())[0])

    def test_external_product(self):
        x = external_product([elliptic().point(), elliptic_dual().unit()])
        self.assertEqual(str(x), 'theta_1')
        self.assertEqual(integrate(mul(x, external_product([elliptic().unit(), elliptic_dual().point()]))), 1)

    def test_labels_must_be_distinct(self):
        with self.assertRaises(ValidationError):
            tensor_product(elliptic(), elliptic(), labels=('a', 'a'))

    def test_tensor_morphism(self):
        maps = elliptic_square()[1]
        product = tensor_morphism(maps['p2'], maps['p2'])
        point = tensor_product(elliptic_dual(), elliptic_dual())[0].point()
        source_point = tensor_product(elliptic_square_ring(), elliptic_square_ring())[0].point()
        self.assertEqual(pushforward(product, source_point), point)


class TestNumericalModels(unittest.TestCase):

    def test_projective_plane(self):
        plane = numerical_ring('plane', 2, ['h'], lambda monomial: 1).ring
        self.assertEqual(plane.basis[1], ('h',))
        self.assertEqual(plane.basis_class('h') ** 2, plane.point())

    def test_mixed_discriminant(self):
        fibre, section, diagonal = (sympy.Matrix(m) for m in (FIBRE, SECTION, DIAGONAL))
        self.assertEqual(mixed_discriminant([fibre, section]), 1)
        self.assertEqual(mixed_discriminant([fibre, diagonal]), 1)
        self.assertEqual(mixed_discriminant([diagonal, diagonal]), 0)
        self.assertEqual(mixed_discriminant([fibre, fibre]), 0)


class TestRegistry(unittest.TestCase):

    def test_duplicate_names_rejected(self):
        registry = Registry()
        registry.add_ring('elliptic', elliptic())
        with self.assertRaises(ValidationError):
            registry.add_ring('elliptic', elliptic_dual())

    def test_lookup(self):
        registry = Registry()
        registry.add_ring('elliptic', elliptic())
        self.assertIs(registry.lookup('rings', 'elliptic'), elliptic())
        with self.assertRaises(UnknownModel):
            registry.lookup('morphisms', 'elliptic')


if __name__ == '__main__':
    unittest.main()
