import json
import os
from fractions import Fraction

import pandas as pd

import config
from dsl_parser import parse_model_file
from exceptions import UnknownModel, ValidationError
from logger import logger
from ring_core import GradedClass
from util import colour, format_rational


def model_files():
    """
    Lists the model files shipped with the package.

    Returns:
    dict: File stem -> absolute path, sorted by stem.
    """
    if not os.path.isdir(config.MODEL_DIR):
        return {}
    return {
        os.path.splitext(file)[0]: os.path.join(config.MODEL_DIR, file)
        for file in sorted(os.listdir(config.MODEL_DIR)) if file.endswith(config.MODEL_SUFFIX)
    }


def resolve_model_path(path):
    """Accepts a path or the stem of a shipped model file (``flagship`` for models/flagship.chow)."""
    if os.path.isfile(path):
        return path
    shipped = model_files()
    if path in shipped:
        return shipped[path]
    raise UnknownModel(f'model file {path!r} not found')


def read_model_file(path):
    """
    Reads and validates a model file from disk.

    Parameters:
    path (str): Path to a ``.chow`` file, or the stem of a shipped one.

    Returns:
    Registry: Everything the file declares.
    """
    path = resolve_model_path(path)
    # Read the file as UTF-8 text
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise ValidationError(f'{path} is not UTF-8 text (byte {e.start})') from None
    except OSError as e:
        raise UnknownModel(f'cannot read model file {path!r}: {e.strerror}') from None
    logger.info(f'Loading model file {path}')
    return parse_model_file(text)


def to_json(payload):
    """Byte-deterministic JSON: sorted keys, exact rationals as strings."""
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default)


def _json_default(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, GradedClass):
        return value.to_dict()
    raise TypeError(f'{type(value).__name__} is not JSON serialisable')


def value_payload(value):
    """The JSON form of an evaluation result: a class or an exact scalar."""
    if isinstance(value, GradedClass):
        return {'kind': 'class', 'class': value.to_dict()}
    return {'kind': 'scalar', 'value': format_rational(value)}


def render_value(value):
    if not isinstance(value, GradedClass):
        return format_rational(value)
    frame = class_frame(value)
    return f'{value}   [{value.ring.name}]' + ('' if frame.empty else '\n' + frame.to_string(index=False))


def class_frame(value):
    """One row per nonzero term in canonical basis order."""
    rows = [
        {'basis': value.ring.symbol(key), 'codim': key[0], 'coefficient': format_rational(c)}
        for key, c in value.terms()
    ]
    return pd.DataFrame(rows, columns=['basis', 'codim', 'coefficient'])


def render_dr(result):
    inputs = ', '.join(f'{key}={value}' for key, value in sorted(result.inputs_digest.items()))
    return f'DR ({result.formula_used}; {inputs})\n{render_value(result.value)}'


def render_suite(report, color=None):
    """Human-readable suite report: one table row per check and a coloured status line."""
    frame = report.to_frame()
    frame['passed'] = frame['passed'].map({True: 'ok', False: 'FAIL'})
    status = colour('PASS', 'green', color) if report.passed else colour('FAIL', 'red', color)
    failed = len(report.failures)
    header = (f'{colour(report.name, "bold", color)}: {status} ({len(frame) - failed}/{len(frame)} checks, '
              f'{report.duration:.2f} s)')
    with pd.option_context('display.max_colwidth', 60, 'display.width', 160):
        return header + ('\n' + frame.to_string(index=False) if len(frame) else '')


def render_catalog(entries):
    frame = pd.DataFrame(entries, columns=['name', 'kind', 'dimension', 'basis_size', 'summary'])
    return frame.sort_values(['kind', 'name'], kind='stable').to_string(index=False)


def render_description(description):
    """Flattens a describe() dict into readable text; rings get their basis table and morphism list."""
    kind = description['kind']
    if kind == 'ring':
        ring = description['ring']
        basis = pd.DataFrame(
            [{'codim': int(codim), 'basis': ', '.join(symbols)} for codim, symbols in ring['basis'].items()]
        )
        lines = [f'ring {ring["name"]} (dimension {ring["dimension"]}, point class {ring["point_class"]})',
                 basis.to_string(index=False)]
        if ring['products']:
            lines.append('products:')
            lines.extend(f'  {p["left"]}*{p["right"]} = {p["value"]}' for p in ring['products'])
        for name, morphism in sorted(description['morphisms'].items()):
            lines.append(f'morphism {name}: {morphism["source"]} -> {morphism["target"]}')
        return '\n'.join(lines)
    if kind == 'morphism':
        morphism = description['morphism']
        lines = [f'morphism {morphism["name"]}: {morphism["source"]} -> {morphism["target"]} '
                 f'(rel_dim {morphism["rel_dim"]})']
        lines.extend(f'  pull {symbol} = {value}' for symbol, value in sorted(morphism['pullback'].items()))
        lines.extend(f'  push {symbol} = {value}' for symbol, value in sorted(morphism['pushforward'].items()))
        return '\n'.join(lines)
    family = description['family']
    return '\n'.join(f'{key}: {value}' for key, value in sorted(family.items()))
