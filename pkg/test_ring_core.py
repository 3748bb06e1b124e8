import unittest
from fractions import Fraction

from hypothesis import given, strategies as st

from exceptions import (
    DegreeMismatch, DuplicateBasisName, NoPointClass, NonNilpotentInput, RingMismatch, ValidationError
)
from library import elliptic, elliptic_square_ring, jacobian_g2
from ring_core import (
    UNIT_KEY, GradedClass, as_rational, component, degree_pairing, equal, exp_truncated, integrate, make_ring, mul,
    power
)

SQUARE = elliptic_square_ring()
COEFFICIENTS = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def classes(ring, keys=None):
    keys = ring.keys() if keys is None else keys
    return st.dictionaries(st.sampled_from(keys), COEFFICIENTS, max_size=len(keys)).map(
        lambda coefficients: GradedClass(ring, coefficients)
    )


def nilpotent_classes(ring):
    return classes(ring, [key for key in ring.keys() if key != UNIT_KEY])


class TestMakeRing(unittest.TestCase):
    """
    Construction-time validation of ring models.
    """

    def test_duplicate_basis_name(self):
        with self.assertRaises(DuplicateBasisName):
            make_ring('bad', 1, {0: ['one'], 1: ['x', 'x']}, {})

    def test_product_in_wrong_codimension(self):
        with self.assertRaises(DegreeMismatch):
            make_ring('bad', 2, {0: ['one'], 1: ['x'], 2: ['p']}, {('x', 'x'): 'x'}, point_class='p')

    def test_associativity_failure_names_the_triple(self):
        products = {
            ('a', 'a'): 'c', ('a', 'b'): 'd', ('a', 'c'): 'p', ('a', 'd'): 'p',
        }
        with self.assertRaises(ValidationError) as context:
            make_ring('bad', 3, {0: ['one'], 1: ['a', 'b'], 2: ['c', 'd'], 3: ['p']}, products, point_class='p')
        self.assertIn('associativity', str(context.exception))
        self.assertIn('(a, a, b)', str(context.exception))

    def test_unit_law(self):
        with self.assertRaises(ValidationError):
            make_ring('bad', 1, {0: ['one'], 1: ['x']}, {('one', 'x'): 0})

    def test_contradictory_entries(self):
        with self.assertRaises(ValidationError):
            make_ring('bad', 2, {0: ['one'], 1: ['x', 'y'], 2: ['p']}, [('x', 'y', 'p'), ('y', 'x', 0)])

    def test_point_class_must_be_top_codimension(self):
        with self.assertRaises(ValidationError):
            make_ring('bad', 2, {0: ['one'], 1: ['x'], 2: ['p']}, {}, point_class='x')

    def test_point_ring(self):
        point = make_ring('pt', 0, {0: ['one']}, {}, point_class='one')
        self.assertEqual(integrate(point.unit()), 1)
        self.assertEqual(point.size, 1)

    def test_basis_is_sorted_within_codimension(self):
        self.assertEqual(SQUARE.basis[1], ('delta', 'f1', 'f2'))


class TestElementaryArithmetic(unittest.TestCase):

    def setUp(self):
        self.f1 = SQUARE.basis_class('f1')
        self.f2 = SQUARE.basis_class('f2')
        self.delta = SQUARE.basis_class('delta')
        self.poincare = self.delta - self.f1 - self.f2

    def test_poincare_square(self):
        self.assertEqual(self.poincare ** 2, -2 * SQUARE.point())

    def test_exponential_of_poincare(self):
        expected = SQUARE.unit() + self.poincare - SQUARE.point()
        self.assertEqual(exp_truncated(self.poincare), expected)

    def test_exponential_needs_nilpotent_input(self):
        with self.assertRaises(NonNilpotentInput):
            exp_truncated(SQUARE.unit() + self.f1)

    def test_integrate_needs_point_class(self):
        ring = make_ring('no_point', 1, {0: ['one'], 1: ['x']}, {})
        with self.assertRaises(NoPointClass):
            integrate(ring.basis_class('x'))

    def test_degree_pairing(self):
        self.assertEqual(degree_pairing(self.f1, self.delta), 1)
        self.assertEqual(degree_pairing(self.f1, self.f1), 0)

    def test_ring_mismatch(self):
        with self.assertRaises(RingMismatch):
            mul(self.f1, elliptic().unit())
        with self.assertRaises(RingMismatch):
            equal(self.f1, elliptic().unit())

    def test_negative_exponent(self):
        with self.assertRaises(ValueError):
            power(self.f1, -1)

    def test_power_zero_is_unit(self):
        self.assertEqual(power(self.f1, 0), SQUARE.unit())

    def test_above_dimension_vanishes(self):
        self.assertTrue((self.f1 * self.f2 * self.delta).is_zero())

    def test_component(self):
        x = SQUARE.unit() + 3 * self.f1 + SQUARE.point()
        self.assertEqual(component(x, 1), 3 * self.f1)
        self.assertEqual(x.codims(), [0, 1, 2])

    def test_scalars_add_as_unit_multiples(self):
        self.assertEqual(self.f1 + 2, 2 * SQUARE.unit() + self.f1)
        self.assertEqual(1 - self.f1, SQUARE.unit() - self.f1)

    def test_canonical_text(self):
        self.assertEqual(str(2 * SQUARE.point() - self.delta), '-delta + 2*pt')
        self.assertEqual(str(SQUARE.zero()), '0')
        self.assertEqual(str(SQUARE.point() / 2), '1/2*pt')

    def test_to_dict(self):
        payload = (self.f1 - Fraction(1, 3) * SQUARE.point()).to_dict()
        self.assertEqual(payload['ring'], 'elliptic_square')
        self.assertEqual(payload['terms'], [
            {'basis': 'f1', 'codim': 1, 'coefficient': '1'},
            {'basis': 'pt', 'codim': 2, 'coefficient': '-1/3'},
        ])

    def test_exact_rationals_only(self):
        with self.assertRaises(TypeError):
            as_rational(0.5)
        with self.assertRaises(TypeError):
            as_rational('0.5')
        self.assertEqual(as_rational('3/6'), Fraction(1, 2))
        self.assertEqual(as_rational(' -4/8 '), Fraction(-1, 2))
        for text in ('1e-3', '1E3', 'inf', 'nan', '1_000', '1 / 2', '+1', ''):
            with self.subTest(text=text):
                with self.assertRaises(TypeError):
                    as_rational(text)

    def test_equality_is_per_ring(self):
        self.assertNotEqual(elliptic().unit(), jacobian_g2().unit())


class TestRingLaws(unittest.TestCase):
    """
    Algebraic laws on random classes of the elliptic square and of the g = 2 Jacobian.
    """

    @given(classes(SQUARE), classes(SQUARE))
    def test_commutativity(self, x, y):
        self.assertEqual(mul(x, y), mul(y, x))

    @given(classes(SQUARE), classes(SQUARE), classes(SQUARE))
    def test_associativity(self, x, y, z):
        self.assertEqual(mul(mul(x, y), z), mul(x, mul(y, z)))

    @given(classes(SQUARE), classes(SQUARE), classes(SQUARE))
    def test_distributivity(self, x, y, z):
        self.assertEqual(mul(x, y + z), mul(x, y) + mul(x, z))

    @given(nilpotent_classes(jacobian_g2()), nilpotent_classes(jacobian_g2()))
    def test_exponential_is_multiplicative(self, x, y):
        self.assertEqual(exp_truncated(x + y), mul(exp_truncated(x), exp_truncated(y)))

    @given(classes(SQUARE))
    def test_unit_is_neutral(self, x):
        self.assertEqual(mul(x, SQUARE.unit()), x)
        self.assertEqual(x + SQUARE.zero(), x)
        self.assertTrue((x - x).is_zero())


if __name__ == '__main__':
    unittest.main()
