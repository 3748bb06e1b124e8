import os
import tempfile
import unittest
from unittest import mock

from run import SUITES, run_suite

BROKEN_MODEL = '''\
ring flagship dim 0
  basis 0: one
  point one

family flagship
'''


class TestRunSuites(unittest.TestCase):
    """
    Runs every verification suite over the built-in models and shipped model files.
    """

    @classmethod
    def setUpClass(cls):
        cls.reports = {suite: run_suite(suite) for suite in SUITES}

    def test_every_suite_passes(self):
        for suite, report in self.reports.items():
            with self.subTest(suite=suite):
                failures = [f'{row.check} [{row.anchor}]: {row.expected} vs {row.actual}' for row in report.failures]
                self.assertEqual(failures, [])
                self.assertTrue(report.rows)

    def test_reports_are_deterministic(self):
        """
        Test that a second run of the seeded round-trip suite reproduces the first row for row.
        """
        self.assertEqual(run_suite('dsl').to_dict(), self.reports['dsl'].to_dict())

    def test_broken_model_file_fails_its_rows(self):
        """
        Test that a model file which does not load turns into failing rows rather than aborting the suite.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'flagship.chow')
            with open(path, 'w', encoding='utf-8') as f:
                f.write(BROKEN_MODEL)
            with mock.patch('run.model_files', return_value={'flagship': path}):
                report = run_suite('dsl')
        self.assertFalse(report.passed)
        failed = {row.check for row in report.failures}
        self.assertIn('dsl.model_file.flagship', failed)
        self.assertIn('dsl.flagship.main', failed)
        self.assertTrue(all(row.actual.startswith('error:') for row in report.failures))

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_suite('bogus')


if __name__ == '__main__':
    unittest.main()
