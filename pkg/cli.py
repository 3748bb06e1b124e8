"""
Command-line front end: ``eval``, ``dr``, ``verify`` and ``models``.

Exit codes: 0 success, 1 failing verification, 2 parse or validation error, 3 evaluation error, 4 violated
precondition.
"""
import argparse
import sys
from typing import Optional, Sequence

import config
import library
from dr_formulas import FORMULAS, dr
from dsl_parser import Environment, evaluate_text
from exceptions import ChowError
from io_ import (
    read_model_file, render_catalog, render_description, render_dr, render_suite, render_value, to_json,
    value_payload
)
from logger import logger
from run import SUITES, run_suite


def _registry(model):
    return library.builtin_registry() if model is None else read_model_file(model)


def cmd_eval(model, expression, as_json=False, ring=None):
    """
    Evaluates an expression against a model file, or the built-in catalog when ``model`` is None.

    Parameters:
    model (str or None): Model file path or shipped stem.
    expression (str): DSL expression.
    as_json (bool, optional): Emit JSON instead of text.
    ring (str, optional): Ring whose basis symbols take precedence when names are resolved.

    Returns:
    str: The rendered result.
    """
    registry = _registry(model)
    default_ring = registry.lookup('rings', ring) if ring else None
    value = evaluate_text(expression, Environment.from_registry(registry, default_ring))
    if as_json:
        return to_json({'expression': expression, 'result': value_payload(value)})
    return render_value(value)


def cmd_dr(model, family, formula, d=None, as_json=False):
    registry = _registry(model)
    family = registry.lookup('families', family)
    if d is not None and formula != 'main':
        logger.warning(f'-d is only used by the main formula, ignoring d={d} for {formula}')
        d = None
    result = dr(family, formula, d)
    return to_json(result.to_dict()) if as_json else render_dr(result)


def cmd_verify(suite, as_json=False):
    """Runs a suite; returns (rendered report, exit code)."""
    report = run_suite(suite)
    text = to_json(report.to_dict()) if as_json else render_suite(report)
    return text, config.EXIT_OK if report.passed else config.EXIT_VERIFICATION_FAILED


def cmd_models(action='list', name=None, as_json=False):
    if action == 'list':
        entries = library.catalog()
        return to_json(entries) if as_json else render_catalog(entries)
    description = library.describe(name)
    return to_json(description) if as_json else render_description(description)


def build_parser():
    parser = argparse.ArgumentParser(prog='chowdr', description='Chow-ring models and double ramification cycles')
    subparsers = parser.add_subparsers(dest='command', required=True)

    eval_parser = subparsers.add_parser('eval', help='Evaluate a cycle-class expression.')
    eval_parser.add_argument('-m', '--model', default=None, help='Model file (default: built-in catalog).')
    eval_parser.add_argument('-e', '--expression', required=True, help='Expression to evaluate.')
    eval_parser.add_argument('-r', '--ring', default=None, help='Ring whose basis symbols resolve first.')
    eval_parser.add_argument('--json', action='store_true', help='Machine-readable output.')

    dr_parser = subparsers.add_parser('dr', help='Compute a double ramification cycle.')
    dr_parser.add_argument('-m', '--model', default=None, help='Model file (default: built-in catalog).')
    dr_parser.add_argument('-f', '--family', required=True, help='Family name.')
    dr_parser.add_argument('--formula', choices=FORMULAS, default='main', help='Formula to apply.')
    dr_parser.add_argument('-d', type=int, default=None, help='Polarization rank for the main formula.')
    dr_parser.add_argument('--json', action='store_true', help='Machine-readable output.')

    verify_parser = subparsers.add_parser('verify', help='Run a verification suite.')
    verify_parser.add_argument('--suite', choices=SUITES + ('all',), default='all', help='Suite to run.')
    verify_parser.add_argument('--json', action='store_true', help='Machine-readable output.')

    models_parser = subparsers.add_parser('models', help='List or describe built-in models.')
    models_parser.add_argument('action', nargs='?', choices=('list', 'describe'), default='list')
    models_parser.add_argument('name', nargs='?', default=None, help='Model to describe.')
    models_parser.add_argument('--json', action='store_true', help='Machine-readable output.')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'models' and args.action == 'describe' and not args.name:
        parser.error('models describe needs a NAME')

    code = config.EXIT_OK
    try:
        if args.command == 'eval':
            output = cmd_eval(args.model, args.expression, args.json, args.ring)
        elif args.command == 'dr':
            output = cmd_dr(args.model, args.family, args.formula, args.d, args.json)
        elif args.command == 'verify':
            output, code = cmd_verify(args.suite, args.json)
        else:
            output = cmd_models(args.action, args.name, args.json)
    except ChowError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.exit_code
    print(output)
    return code
