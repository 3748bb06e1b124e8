import contextlib
import itertools
import numbers
import time
from dataclasses import asdict, dataclass, field

import pandas as pd
import sympy

import config
import library
from abelian import (
    abelian_pair, check_fourier_point, check_fourier_zero_section, check_rigidified, check_scaling, check_symmetric,
    poincare_formula_check, polarization_rank, rank_by_poincare
)
from dr_formulas import (
    check_multiplicativity, dr_abelian, dr_albanese_family, dr_hain, dr_main, dr_product_constant, dr_scaling_check,
    dr_via_sections, family_rank, package_e_class, product_expansion, product_expansion_check
)
from dsl_parser import Environment, evaluate_text, format_ast, parse, random_ast
from exceptions import ChowError
from geometry import compose, pullback, pushforward
from io_ import model_files, read_model_file
from logger import logger
from ring_core import GradedClass, component, exp_truncated, mul
from util import binomial, format_rational, make_rng, random_class

SUITES = ('ring', 'geometry', 'fourier', 'poincare', 'dr', 'product', 'scaling', 'dsl')
COLUMNS = ['check', 'anchor', 'passed', 'expected', 'actual']


@dataclass(frozen=True)
class Check:
    check: str
    anchor: str
    passed: bool
    expected: str
    actual: str


@dataclass
class SuiteReport:
    """Outcome of one verification suite. ``passed`` holds iff every row passed."""
    name: str
    rows: list = field(default_factory=list)
    duration: float = 0.0

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def failures(self):
        return [row for row in self.rows if not row.passed]

    def to_frame(self):
        return pd.DataFrame([asdict(row) for row in self.rows], columns=COLUMNS)

    def to_dict(self):
        # Duration only appears in the human report so the JSON form is deterministic
        return {
            'suite': self.name,
            'passed': self.passed,
            'checks': [asdict(row) for row in self.rows],
        }


def _text(value):
    if isinstance(value, GradedClass):
        return str(value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Rational):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return '(' + ', '.join(_text(item) for item in value) + ')'
    return str(value)


class _Case:
    def __init__(self):
        self.expected = None
        self.actual = None
        self.passed = None

    def expect(self, expected, actual):
        self.expected, self.actual = expected, actual
        self.passed = expected == actual

    def holds(self, condition):
        self.expected, self.actual = True, bool(condition)
        self.passed = bool(condition)


class Recorder:
    """Collects Check rows; exceptions inside a case become failing rows instead of aborting the suite."""

    def __init__(self, name):
        self.report = SuiteReport(name)

    @contextlib.contextmanager
    def case(self, check, anchor):
        case = _Case()
        try:
            yield case
        except ChowError as e:
            logger.warning(f'{check}: {e}')
            case.actual, case.passed = f'error: {e}', False
        if case.passed is None:
            case.passed = False
        if not case.passed:
            logger.warning(f'Check failed: {check} (expected {_text(case.expected)}, got {_text(case.actual)})')
        self.report.rows.append(Check(check, anchor, case.passed, _text(case.expected), _text(case.actual)))

    def tally(self, check, anchor, outcomes):
        outcomes = list(outcomes)
        with self.case(check, anchor) as case:
            case.expect(f'{len(outcomes)}/{len(outcomes)}', f'{sum(outcomes)}/{len(outcomes)}')


# Suites

def _ring_suite(rec):
    rng = make_rng()
    for name, ring in library.rings().items():
        density = min(0.4, 8 / ring.size)
        outcomes = {'commutativity': [], 'associativity': [], 'distributivity': [], 'exp': []}
        for _ in range(config.RANDOM_CASES):
            x, y, z = (random_class(ring, rng, density) for _ in range(3))
            xy = mul(x, y)
            outcomes['commutativity'].append(xy == mul(y, x))
            outcomes['associativity'].append(mul(xy, z) == mul(x, mul(y, z)))
            outcomes['distributivity'].append(mul(x, y + z) == xy + mul(x, z))
            x0, y0 = x - component(x, 0), y - component(y, 0)
            outcomes['exp'].append(exp_truncated(x0 + y0) == mul(exp_truncated(x0), exp_truncated(y0)))
        for law, values in outcomes.items():
            rec.tally(f'ring.{law}.{name}', 'ring axioms', values)
        # Grading on every basis pair
        keys = ring.keys()
        rec.tally(f'ring.grading.{name}', 'codimensions add', (
            all(key[0] == a[0] + b[0] for key in ring.multiply_keys(a, b)) for a in keys for b in keys
        ))


def _composable_pairs(morphisms):
    for (name_f, f), (name_g, g) in itertools.product(morphisms.items(), repeat=2):
        if g.target is f.source:
            yield f'{name_f}*{name_g}', f, g


def _geometry_suite(rec):
    morphisms = library.morphisms()
    for name, f in morphisms.items():
        source, target = f.source, f.target
        with rec.case(f'geometry.projection_formula.{name}', 'projection formula') as case:
            bad = [
                (target.symbol(a), source.symbol(b))
                for a in target.keys() for b in source.keys()
                if pushforward(f, mul(pullback(f, GradedClass(target, {a: 1})), GradedClass(source, {b: 1})))
                != mul(GradedClass(target, {a: 1}), pushforward(f, GradedClass(source, {b: 1})))
            ]
            case.expect([], bad)
        with rec.case(f'geometry.ring_homomorphism.{name}', 'pullback is a ring map') as case:
            basis = [GradedClass(target, {k: 1}) for k in target.keys()]
            case.holds(
                pullback(f, target.unit()) == source.unit()
                and all(pullback(f, mul(a, b)) == mul(pullback(f, a), pullback(f, b)) for a in basis for b in basis)
            )

    for label, f, g in _composable_pairs(morphisms):
        fg = compose(f, g)
        with rec.case(f'geometry.functoriality.{label}', 'functoriality') as case:
            case.holds(
                all(pullback(fg, x) == pullback(g, pullback(f, x))
                    for x in (GradedClass(f.target, {k: 1}) for k in f.target.keys()))
                and all(pushforward(fg, x) == pushforward(f, pushforward(g, x))
                        for x in (GradedClass(g.source, {k: 1}) for k in g.source.keys()))
            )

    package = library.flagship_package()
    for section in (package.section, package.zero_section):
        projection = package.jacobian_proj
        with rec.case(f'geometry.section.{section.name}', 'sections split the projection') as case:
            base = projection.target
            case.holds(all(
                pullback(section, pullback(projection, GradedClass(base, {k: 1}))) == GradedClass(base, {k: 1})
                for k in base.keys()
            ))

    ring, square = library.elliptic_square()
    p = library.poincare_class(ring)
    with rec.case('geometry.poincare_square', 'c1(P)^2 = -2 pt') as case:
        case.expect(-2 * ring.point(), p ** 2)
    with rec.case('geometry.poincare_pushforward', 'p2_*(c1(P)^2) = -2 theta_hat') as case:
        case.expect(-2 * library.elliptic_dual().point(), pushforward(square['p2'], p ** 2))
    with rec.case('geometry.inversion', '[-1]^* P = -P') as case:
        case.expect(-p, pullback(square['inv'], p))
    for r in range(-3, 4):
        with rec.case(f'geometry.mult_{r}', '[r]^* P = r P') as case:
            case.expect(r * p, pullback(square['mult_r'](r), p))


def _fourier_suite(rec):
    for g in config.FOURIER_GENERA:
        pair = abelian_pair(g)
        with rec.case(f'fourier.zero_section.g{g}', 'e = (-1)^g F(1)') as case:
            case.holds(check_fourier_zero_section(pair))
        with rec.case(f'fourier.point.g{g}', 'F(e) = 1') as case:
            case.holds(check_fourier_point(pair))


def _polarizations():
    jacobian = library.jacobian_g2()
    return [
        ('elliptic', library.elliptic(), library.elliptic().basis_class('theta'), 1, 1),
        ('elliptic_dual', library.elliptic_dual(), 2 * library.elliptic_dual().basis_class('theta_hat'), 1, 2),
        ('jacobian_g2', jacobian,
         2 * (jacobian.basis_class('theta_hat_1') + jacobian.basis_class('theta_hat_2')), 2, 4),
    ]


def _poincare_suite(rec):
    for name, model, E, g, d in _polarizations():
        with rec.case(f'poincare.formula.{name}', 'E^g = g! d e') as case:
            case.holds(poincare_formula_check(model, E, g, d))
        with rec.case(f'poincare.unique_rank.{name}', 'unique d') as case:
            case.expect([d], [k for k in range(1, 2 * d + 3) if poincare_formula_check(model, E, g, k)])
        with rec.case(f'poincare.polarization_rank.{name}', 'd = deg(E^g)/g!') as case:
            case.expect(d, polarization_rank(model, E, g))
        with rec.case(f'poincare.rank_by_poincare.{name}', 'd from the Poincare formula') as case:
            case.expect(d, rank_by_poincare(model, E, g))


def _dr_suite(rec):
    flagship = library.flagship_family()
    point = flagship.base.point()
    with rec.case('dr.family_rank.flagship', 'rank from the fibre degree of E') as case:
        case.expect(2, family_rank(flagship))
    for label, compute in (
            ('main', lambda: dr_main(flagship, 2)),
            ('abelian', lambda: dr_abelian(flagship)),
            ('hain', lambda: dr_hain(flagship)),
            ('albanese', lambda: dr_albanese_family(flagship)),
            ('sections', lambda: dr_via_sections(flagship)),
    ):
        with rec.case(f'dr.flagship.{label}', 'DR(P) is the point class') as case:
            case.expect(point, compute().value)
    with rec.case('dr.flagship.degenerate', 'c1(L) = 0 gives the virtual class 0') as case:
        case.expect(flagship.base.zero(), dr_main(flagship.with_line_bundle(flagship.total.zero()), 2).value)

    pair = library.elliptic_pair_family()
    with rec.case('dr.pair.family_rank', 'rank from the fibre degree of E') as case:
        case.expect(4, family_rank(pair))
    main = dr_main(pair).value
    with rec.case('dr.pair.main', 'DR on the pair family is the point class') as case:
        case.expect(pair.base.point(), main)
    with rec.case('dr.pair.abelian', 'abelian concordance') as case:
        case.expect(main, dr_abelian(pair).value)
    with rec.case('dr.pair.albanese', 'Albanese concordance') as case:
        case.expect(main, dr_albanese_family(pair).value)
    with rec.case('dr.pair.multiplicativity', 'DR of a product is the external product') as case:
        case.holds(check_multiplicativity(pair, [flagship, flagship]))

    for name, family in library.curve_families().items():
        with rec.case(f'dr.curve_concordance.{name}', 'main with d = 2^g equals Hain') as case:
            case.expect(dr_hain(family).value, dr_main(family, 2 ** family.g).value)
    line = library.projective_line_family()
    with rec.case('dr.genus_zero', 'g = 0 gives the fundamental class') as case:
        case.expect(line.base.unit(), dr_main(line).value)

    for label, family in (('flagship', flagship), ('pair', pair)):
        package = family.package
        E = package_e_class(family)
        with rec.case(f'dr.e_class.rigidified.{label}', 'e^* E = 0') as case:
            case.holds(check_rigidified(package.jacobian, E, package.zero_section))
        with rec.case(f'dr.e_class.symmetric.{label}', '[-1]^* E = E') as case:
            case.holds(check_symmetric(package.jacobian, E, package.inversion))
        with rec.case(f'dr.e_class.fibre_degree.{label}', 'deg(E^g)/g! is a positive integer') as case:
            case.expect(family_rank(family), polarization_rank(package.fibre, pullback(package.fibre_inclusion, E),
                                                               family.g))
    with rec.case('dr.e_class.flagship_value', 'E = 2 theta on the Jacobian fibre') as case:
        package = flagship.package
        case.expect(2 * package.fibre.point(), pullback(package.fibre_inclusion, package_e_class(flagship)))


def _multinomial_coefficient(c1, c2, g1, g2):
    a1, a2 = sympy.symbols('a1 a2')
    poly = sympy.Poly(sympy.expand((c1 * a1 + c2 * a2) ** (g1 + g2)), a1, a2)
    return int(poly.coeff_monomial(a1 ** g1 * a2 ** g2))


def _product_suite(rec):
    for g1, g2 in itertools.product(config.PRODUCT_GENERA, repeat=2):
        ok, derived = product_expansion_check(g1, g2)
        with rec.case(f'product.canonical.expansion.{g1}_{g2}', 'binomial expansion in the truncated ring') as case:
            case.holds(ok)
        with rec.case(f'product.canonical.constant.{g1}_{g2}', 'closed-form constant') as case:
            case.expect(dr_product_constant(g1, g2), derived)
        with rec.case(f'product.canonical.oracle.{g1}_{g2}', 'independent multinomial expansion') as case:
            _, expanded = product_expansion(g1, g2)
            oracle = _multinomial_coefficient(2 * g2 - 2, 2 * g1 - 2, g1, g2)
            closed_form = binomial(g1 + g2, g1) * (2 * g2 - 2) ** g1 * (2 * g1 - 2) ** g2
            case.expect((closed_form, closed_form), (oracle, expanded.coefficient(expanded.ring.point_class)))
    for g1, g2 in itertools.product(config.SECTIONS_GENERA, repeat=2):
        ok, derived = product_expansion_check(g1, g2, 'sections')
        with rec.case(f'product.sections.{g1}_{g2}', 'sections variant constant') as case:
            case.expect((True, dr_product_constant(g1, g2, 'sections')), (ok, derived))


def _scaling_suite(rec):
    for name, family in library.families().items():
        d = family_rank(family)
        for r in config.SCALING_FACTORS:
            with rec.case(f'scaling.dr.{name}.r{r}', 'DR(L^r) = r^(2g) DR(L)') as case:
                case.holds(dr_scaling_check(family, d, r))
    for g in config.MODEL_SCALING_GENERA:
        pair = abelian_pair(g)
        for r in config.MODEL_SCALING_FACTORS:
            with rec.case(f'scaling.model.g{g}.r{r}', '[r]^* e = r^(2g) e') as case:
                case.holds(check_scaling(pair, r))


def _dsl_suite(rec):
    rng = make_rng()
    outcomes, stable = [], []
    for _ in range(config.AST_ROUND_TRIPS):
        ast = random_ast(rng, config.AST_MAX_DEPTH)
        text = format_ast(ast)
        parsed = parse(text)
        outcomes.append(parsed == ast)
        stable.append(format_ast(parsed) == text)
    rec.tally('dsl.round_trip', 'parse(format(ast)) = ast', outcomes)
    rec.tally('dsl.canonical_form', 'format is idempotent', stable)

    files = model_files()
    for stem, path in files.items():
        with rec.case(f'dsl.model_file.{stem}', 'shipped model file loads') as case:
            registry = read_model_file(path)
            case.expect(True, len(registry.families) > 0)

    if 'flagship' in files:
        with rec.case('dsl.flagship.hain_expression', 'Hain integrand through the DSL') as case:
            registry, family = _file_family(files['flagship'], 'flagship')
            env = Environment.from_registry(registry, default_ring=family.total)
            case.expect(family.base.point(), evaluate_text('-1/2 * push(p2, c1(P)^2)', env))
        with rec.case('dsl.flagship.self_intersection', 'integrate(c1(P)^2) = -2') as case:
            registry, family = _file_family(files['flagship'], 'flagship')
            env = Environment.from_registry(registry, default_ring=family.total)
            case.expect(-2, evaluate_text('integrate(c1(P)^2)', env))
        for label, compute in (('main', lambda f: dr_main(f, 2)), ('hain', dr_hain), ('abelian', dr_abelian)):
            with rec.case(f'dsl.flagship.{label}', 'DR from the model file') as case:
                family = _file_family(files['flagship'], 'flagship')[1]
                case.expect(family.base.point(), compute(family).value)
    if 'elliptic_pair' in files:
        with rec.case('dsl.elliptic_pair.main', 'DR from the model file') as case:
            family = _file_family(files['elliptic_pair'], 'elliptic_pair')[1]
            case.expect(family.base.point(), dr_main(family).value)
    if 'projective_line' in files:
        with rec.case('dsl.projective_line.main', 'g = 0 from the model file') as case:
            family = _file_family(files['projective_line'], 'projective_line_family')[1]
            case.expect(family.base.unit(), dr_main(family).value)


def _file_family(path, name):
    registry = read_model_file(path)
    return registry, registry.lookup('families', name)


_RUNNERS = {
    'ring': _ring_suite,
    'geometry': _geometry_suite,
    'fourier': _fourier_suite,
    'poincare': _poincare_suite,
    'dr': _dr_suite,
    'product': _product_suite,
    'scaling': _scaling_suite,
    'dsl': _dsl_suite,
}


def run_suite(name):
    """
    Runs a verification suite over the built-in models.

    Parameters:
    name (str): One of SUITES, or ``all`` for every suite in order.

    Returns:
    SuiteReport: One row per check; ``passed`` is True iff every check passed.
    """
    if name == 'all':
        start = time.perf_counter()
        report = SuiteReport('all')
        for suite in SUITES:
            report.rows.extend(run_suite(suite).rows)
        report.duration = time.perf_counter() - start
        logger.info(f'Suite all: {len(report.rows)} checks in {report.duration:.2f} s, passed={report.passed}')
        return report
    if name not in _RUNNERS:
        raise ValueError(f'unknown suite {name!r}, expected one of {SUITES + ("all",)}')

    logger.info(f'Running suite {name}')
    start = time.perf_counter()
    rec = Recorder(name)
    _RUNNERS[name](rec)
    rec.report.duration = time.perf_counter() - start
    logger.info(f'Suite {name}: {len(rec.report.rows)} checks in {rec.report.duration:.2f} s, '
                f'passed={rec.report.passed}')
    return rec.report
