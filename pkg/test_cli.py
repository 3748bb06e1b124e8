import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

import config
from cli import main


def run(*argv):
    """Runs the command line; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestEval(unittest.TestCase):

    def test_builtin_catalog(self):
        code, out, _ = run('eval', '-e', 'integrate(c1(P)^2)')
        self.assertEqual(code, config.EXIT_OK)
        self.assertEqual(out.strip(), '-2')

    def test_model_file_json(self):
        code, out, _ = run('eval', '-m', 'flagship', '-e', '-1/2 * push(p2, c1(P)^2)', '--json')
        self.assertEqual(code, config.EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload['result']['class']['terms'], [
            {'basis': 'theta_hat', 'codim': 1, 'coefficient': '1'},
        ])

    def test_default_ring(self):
        code, out, _ = run('eval', '-r', 'elliptic_square', '-e', 'integrate(f1 * delta)')
        self.assertEqual(code, config.EXIT_OK)
        self.assertEqual(out.strip(), '1')

    def test_syntax_error(self):
        code, _, err = run('eval', '-e', 'c1(P ^')
        self.assertEqual(code, config.EXIT_PARSE_ERROR)
        self.assertIn('column 6', err)

    def test_unbound_name(self):
        code, _, _ = run('eval', '-e', 'nope + 1')
        self.assertEqual(code, config.EXIT_EVALUATION_ERROR)

    def test_missing_model_file(self):
        code, _, _ = run('eval', '-m', 'no_such_model', '-e', '1')
        self.assertEqual(code, config.EXIT_PARSE_ERROR)

    def test_model_file_not_utf8(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'bad.chow')
            with open(path, 'wb') as f:
                f.write(b'\xff\xfe ring r dim 0\n')
            code, _, err = run('eval', '-m', path, '-e', '1')
        self.assertEqual(code, config.EXIT_PARSE_ERROR)
        self.assertIn('UTF-8', err)

    def test_deeply_nested_expression(self):
        code, _, err = run('eval', '-e', '(' * 400 + '1' + ')' * 400)
        self.assertEqual(code, config.EXIT_PARSE_ERROR)
        self.assertIn('nested', err)

    def test_long_operator_chain(self):
        code, _, err = run('eval', '-e', ' + '.join(['1'] * 500))
        self.assertEqual(code, config.EXIT_PARSE_ERROR)
        self.assertIn('deeper', err)

    def test_model_file_with_ring_and_family(self):
        code, out, _ = run('dr', '-m', 'projective_line', '-f', 'projective_line_family', '--json')
        self.assertEqual(code, config.EXIT_OK)
        self.assertEqual(json.loads(out)['class']['text'], 'one')


class TestDr(unittest.TestCase):

    def test_flagship_main(self):
        code, out, _ = run('dr', '-f', 'flagship_family', '--formula', 'main', '-d', '2')
        self.assertEqual(code, config.EXIT_OK)
        self.assertIn('theta_hat', out)

    def test_json_is_deterministic(self):
        first = run('dr', '-m', 'flagship', '-f', 'flagship', '--formula', 'hain', '--json')[1]
        second = run('dr', '-m', 'flagship', '-f', 'flagship', '--formula', 'hain', '--json')[1]
        self.assertEqual(first, second)
        payload = json.loads(first)
        self.assertEqual(payload['formula'], 'hain')
        self.assertEqual(payload['class']['text'], 'theta_hat')

    def test_curve_formula_on_surface_family(self):
        code, _, _ = run('dr', '-f', 'elliptic_pair_family', '--formula', 'hain')
        self.assertEqual(code, config.EXIT_PRECONDITION)

    def test_invalid_rank(self):
        code, _, _ = run('dr', '-f', 'flagship_family', '-d', '0')
        self.assertEqual(code, config.EXIT_PRECONDITION)

    def test_rank_ignored_for_other_formulas(self):
        with self.assertLogs('chowdr', level='WARNING'):
            code, out, _ = run('dr', '-f', 'flagship_family', '--formula', 'abelian', '-d', '7')
        self.assertEqual(code, config.EXIT_OK)
        self.assertIn('theta_hat', out)

    def test_unknown_family(self):
        code, _, _ = run('dr', '-f', 'bogus')
        self.assertEqual(code, config.EXIT_PARSE_ERROR)


class TestVerifyAndModels(unittest.TestCase):

    def test_verify_suite(self):
        code, out, _ = run('verify', '--suite', 'poincare', '--json')
        self.assertEqual(code, config.EXIT_OK)
        payload = json.loads(out)
        self.assertTrue(payload['passed'])
        self.assertNotIn('duration', payload)

    def test_verify_human_report_shows_duration(self):
        code, out, _ = run('verify', '--suite', 'poincare')
        self.assertEqual(code, config.EXIT_OK)
        self.assertRegex(out.splitlines()[0], r'checks, \d+\.\d{2} s\)')

    def test_models_list(self):
        code, out, _ = run('models', 'list')
        self.assertEqual(code, config.EXIT_OK)
        for name in ('elliptic_square', 'flagship_family', 'jacobian_g2', 'p2'):
            self.assertIn(name, out)

    def test_models_list_json(self):
        code, out, _ = run('models', '--json')
        self.assertEqual(code, config.EXIT_OK)
        kinds = {entry['kind'] for entry in json.loads(out)}
        self.assertEqual(kinds, {'ring', 'morphism', 'family'})

    def test_describe(self):
        code, out, _ = run('models', 'describe', 'elliptic_square')
        self.assertEqual(code, config.EXIT_OK)
        self.assertIn('delta', out)
        self.assertIn('pt', out)

    def test_describe_unknown(self):
        code, _, err = run('models', 'describe', 'bogus')
        self.assertEqual(code, config.EXIT_PARSE_ERROR)
        self.assertIn('bogus', err)


if __name__ == '__main__':
    unittest.main()
