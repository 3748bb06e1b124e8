import textwrap
import unittest
from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

import config
from dr_formulas import dr_main
from dsl_parser import (
    C1, Add, ClassRef, Environment, Mul, Neg, Pow, Push, RationalLit, evaluate_text, format_ast, parse,
    parse_model_file, random_ast
)
from exceptions import DslSyntaxError, EvaluationError, ForwardReference, RingMismatch, UnboundName, ValidationError
from io_ import read_model_file
from library import builtin_registry, elliptic, elliptic_dual, elliptic_square_ring
from ring_core import GradedClass

TINY_RING = textwrap.dedent('''\
    ring r dim 1
      basis 0: one
      basis 1: x
      product x^2 = 0
      point x
''')


class TestParser(unittest.TestCase):
    """
    Precedence, literal folding and error positions.
    """

    def test_precedence(self):
        self.assertEqual(
            parse('a + b * c ^ 2'),
            Add(ClassRef('a'), Mul(ClassRef('b'), Pow(ClassRef('c'), 2))),
        )

    def test_push_with_powers(self):
        self.assertEqual(
            parse('push(pi, c1(L)^2 * c1(F)^0)'),
            Push('pi', Mul(Pow(C1('L'), 2), Pow(C1('F'), 0))),
        )

    def test_negative_literal_folds(self):
        self.assertEqual(
            parse('-1/2 * push(pi, c1(L)^2)'),
            Mul(RationalLit(Fraction(-1, 2)), Push('pi', Pow(C1('L'), 2))),
        )

    def test_negative_literal_under_power_does_not_fold(self):
        self.assertEqual(parse('-2^2'), Neg(Pow(RationalLit(Fraction(2)), 2)))

    def test_subtraction(self):
        self.assertEqual(parse('a - b'), Add(ClassRef('a'), Neg(ClassRef('b'))))

    def test_unclosed_call(self):
        with self.assertRaises(DslSyntaxError) as context:
            parse('c1(L ^')
        error = context.exception
        self.assertEqual((error.line, error.column), (1, 6))
        self.assertEqual(error.expected, (')',))

    def test_exact_literals_only(self):
        for text in ('0.5', 'x * 1.', '1/0'):
            with self.subTest(text=text):
                with self.assertRaises(DslSyntaxError):
                    parse(text)

    def test_exponent_must_be_integer(self):
        with self.assertRaises(DslSyntaxError):
            parse('x^(2)')
        with self.assertRaises(DslSyntaxError):
            parse('x^1/2')

    def test_trailing_input(self):
        with self.assertRaises(DslSyntaxError) as context:
            parse('x y')
        self.assertEqual(context.exception.column, 3)

    def test_nesting_is_bounded(self):
        parse('(' * config.MAX_NESTING + 'x' + ')' * config.MAX_NESTING)
        for text in ('(' * 400 + 'x' + ')' * 400, '-' * 400 + 'x', 'exp(' * 400 + 'x' + ')' * 400):
            with self.subTest(text=text[:8]):
                with self.assertRaises(DslSyntaxError):
                    parse(text)

    def test_operator_chains_are_bounded(self):
        self.assertIsInstance(parse(' * '.join(['x'] * config.MAX_AST_DEPTH)), Mul)
        with self.assertRaises(DslSyntaxError) as context:
            parse(' + '.join(['x'] * 1000))
        self.assertEqual(context.exception.line, 1)


class TestFormatter(unittest.TestCase):

    def test_minimal_parentheses(self):
        self.assertEqual(format_ast(parse('((c1(L))^2)')), 'c1(L)^2')
        self.assertEqual(format_ast(parse('(a + b) * c')), '(a + b) * c')
        self.assertEqual(format_ast(parse('a - (b - c)')), 'a - (b - c)')

    def test_literals(self):
        self.assertEqual(format_ast(RationalLit(Fraction(-1, 2))), '-1/2')
        self.assertEqual(format_ast(Neg(RationalLit(Fraction(2)))), '-(2)')
        self.assertEqual(format_ast(Pow(RationalLit(Fraction(1, 2)), 3)), '(1/2)^3')

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=1, max_value=config.AST_MAX_DEPTH))
    def test_round_trip(self, seed, depth):
        node = random_ast(np.random.default_rng(seed), depth)
        text = format_ast(node)
        self.assertEqual(parse(text), node)
        self.assertEqual(format_ast(parse(text)), text)


class TestEvaluation(unittest.TestCase):

    def setUp(self):
        self.env = Environment.from_registry(builtin_registry())

    def test_integrate_poincare_square(self):
        self.assertEqual(evaluate_text('integrate(c1(P)^2)', self.env), -2)

    def test_curve_formula_by_hand(self):
        self.assertEqual(evaluate_text('-1/2 * push(p2, c1(P)^2)', self.env), elliptic_dual().point())

    def test_scalar_arithmetic(self):
        self.assertEqual(evaluate_text('1/2 + 1/3 * 3^2', self.env), Fraction(7, 2))

    def test_default_ring(self):
        env = Environment.from_registry(builtin_registry(), default_ring=elliptic_square_ring())
        self.assertEqual(evaluate_text('f1 * f2', env), elliptic_square_ring().point())
        self.assertEqual(evaluate_text('1 + f1', env), elliptic_square_ring().element({'one': 1, 'f1': 1}))

    def test_unbound_name(self):
        with self.assertRaises(EvaluationError) as context:
            evaluate_text('f1 + nope', self.env)
        error = context.exception
        self.assertIsInstance(error.inner, UnboundName)
        self.assertEqual(error.column, 6)
        self.assertEqual(error.exit_code, config.EXIT_EVALUATION_ERROR)

    def test_ambiguous_symbol(self):
        with self.assertRaises(EvaluationError) as context:
            evaluate_text('one', self.env)
        self.assertIsInstance(context.exception.inner, UnboundName)

    def test_ring_mismatch(self):
        env = Environment(classes={'x': elliptic().point(), 'y': elliptic_dual().point()})
        with self.assertRaises(EvaluationError) as context:
            evaluate_text('x + y', env)
        self.assertIsInstance(context.exception.inner, RingMismatch)

    def test_exp_of_non_nilpotent(self):
        with self.assertRaises(EvaluationError):
            evaluate_text('exp(1 + f1)', self.env)


class TestModelFiles(unittest.TestCase):

    def test_shipped_files_load(self):
        for stem in ('flagship', 'elliptic_pair', 'projective_line'):
            with self.subTest(stem=stem):
                self.assertTrue(read_model_file(stem).families)

    def test_flagship_file(self):
        registry = read_model_file('flagship')
        family = registry.families['flagship']
        self.assertEqual((family.n, family.g, family.rank), (1, 1, 2))
        self.assertTrue(family.abelian)
        squared = registry.classes['P_squared']
        self.assertEqual(squared, -2 * squared.ring.point())
        p1 = registry.morphisms['p1']
        self.assertEqual(str(p1.push_symbol('delta')), 'one')

    def test_projective_line_file(self):
        registry = read_model_file('projective_line')
        family = registry.lookup('families', 'projective_line_family')
        self.assertIs(family.total, registry.rings['projective_line'])
        self.assertEqual(dr_main(family).value, family.base.unit())

    def test_names_are_shared_across_kinds(self):
        text = TINY_RING + 'class r on r = x\n'
        with self.assertRaises(ValidationError) as context:
            parse_model_file(text)
        self.assertEqual(context.exception.line, 6)

    def test_tensor_declarations(self):
        text = TINY_RING + textwrap.dedent('''\
            ring r2 = tensor(r, r)
            class top on r2 = x_1 * x_2
        ''')
        registry = parse_model_file(text)
        self.assertEqual(registry.classes['top'], registry.rings['r2'].point())

    def test_scalar_class(self):
        registry = parse_model_file(TINY_RING + 'class two on r = 2\n')
        self.assertEqual(registry.classes['two'], 2 * registry.rings['r'].unit())

    def test_forward_reference(self):
        text = TINY_RING + 'class c on r = c1(B)\nbundle B on r = x\n'
        with self.assertRaises(ForwardReference) as context:
            parse_model_file(text)
        self.assertEqual(context.exception.line, 6)

    def test_forward_reference_to_ring(self):
        text = 'morphism f: r -> r\n  pull x = x\n' + TINY_RING
        with self.assertRaises(ForwardReference):
            parse_model_file(text)

    def test_duplicate_declaration(self):
        with self.assertRaises(ValidationError):
            parse_model_file(TINY_RING + TINY_RING)

    def test_associativity_error_is_located(self):
        text = textwrap.dedent('''\
            # broken
            ring bad dim 3
              basis 0: one
              basis 1: a b
              basis 2: c d
              basis 3: p
              product a^2 = c
              product a*b = d
              product a*c = p
              product a*d = p
              point p
        ''')
        with self.assertRaises(ValidationError) as context:
            parse_model_file(text)
        self.assertIn('associativity', str(context.exception))
        self.assertEqual(context.exception.line, 2)

    def test_decimal_in_file(self):
        text = TINY_RING.replace('product x^2 = 0', 'product x^2 = 0.5')
        with self.assertRaises(DslSyntaxError) as context:
            parse_model_file(text)
        self.assertEqual(context.exception.line, 4)

    def test_unreadable_line(self):
        with self.assertRaises(DslSyntaxError) as context:
            parse_model_file(TINY_RING + 'frobnicate r\n')
        self.assertEqual(context.exception.line, 6)

    def test_bundle_must_be_a_divisor(self):
        with self.assertRaises(ValidationError):
            parse_model_file(TINY_RING + 'bundle B on r = 1 + x\n')

    def test_family_needs_every_field(self):
        text = TINY_RING + 'family broken\n  total r\n'
        with self.assertRaises(ValidationError):
            parse_model_file(text)

    def test_values_are_graded_classes(self):
        registry = parse_model_file(TINY_RING + 'class c on r = 3*x\n')
        self.assertIsInstance(registry.classes['c'], GradedClass)
        self.assertEqual(str(registry.classes['c']), '3*x')


if __name__ == '__main__':
    unittest.main()
