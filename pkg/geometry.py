import dataclasses
import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy

from exceptions import (
    CompositionMismatch, DegreeMismatch, NoPointClass, NotRingHomomorphism, ProjectionFormulaViolation,
    RingMismatch, UnknownModel, UnsupportedModel, ValidationError
)
from logger import logger
from ring_core import UNIT_KEY, GradedClass, RingModel, integrate, linear_combination, make_ring, mul
from util import from_sympy, to_sympy


class Morphism:
    """
    A proper map between two modelled spaces, given by its pullback and pushforward tables on basis elements.

    ``pullback`` maps classes on ``target`` to classes on ``source`` preserving codimension; ``pushforward``
    maps classes on ``source`` to ``target`` lowering codimension by ``rel_dim``.
    """

    def __init__(self, name, source, target, rel_dim, pull, push):
        self.name = name
        self.source = source
        self.target = target
        self.rel_dim = rel_dim
        self._pull = pull
        self._push = push

    def __repr__(self):
        return f'Morphism({self.name!r}: {self.source.name} -> {self.target.name}, rel_dim={self.rel_dim})'

    def __str__(self):
        return self.name

    def pull_key(self, key):
        return self._pull.get(key, {})

    def push_key(self, key):
        return self._push.get(key, {})

    def pull_symbol(self, symbol):
        return GradedClass(self.source, self.pull_key(self.target.key(symbol)))

    def push_symbol(self, symbol):
        return GradedClass(self.target, self.push_key(self.source.key(symbol)))

    def same_tables(self, other):
        """True iff both morphisms connect the same rings with identical pullback and pushforward tables."""
        return (
            self.source is other.source and self.target is other.target and self.rel_dim == other.rel_dim
            and all(self.pull_key(k) == other.pull_key(k) for k in self.target.keys())
            and all(self.push_key(k) == other.push_key(k) for k in self.source.keys())
        )

    def to_dict(self):
        return {
            'name': self.name,
            'source': self.source.name,
            'target': self.target.name,
            'rel_dim': self.rel_dim,
            'pullback': {self.target.symbol(k): str(GradedClass(self.source, self.pull_key(k)))
                         for k in self.target.keys()},
            'pushforward': {self.source.symbol(k): str(GradedClass(self.target, self.push_key(k)))
                            for k in self.source.keys()},
        }


def _read_table(name, domain, codomain, table, what):
    """Turns a symbol-keyed table into a key-keyed one, resolving values on ``codomain``."""
    result = {}
    for symbol, value in (table or {}).items():
        if not domain.has_symbol(symbol):
            raise ValidationError(f'{name}: {what} table entry {symbol!r} is not a basis symbol of {domain.name}')
        if isinstance(value, GradedClass):
            if value.ring is not codomain:
                raise RingMismatch(f'{name}: {what} of {symbol} lives on {value.ring.name}, expected {codomain.name}')
            combination = value.coefficients
        else:
            try:
                combination = {codomain.key(s): c for s, c in linear_combination(value).items()}
            except ValidationError as e:
                raise ValidationError(f'{name}: {what} of {symbol}: {e.detail}') from None
        result[domain.key(symbol)] = {k: Fraction(c) for k, c in combination.items() if c}
    return result


def _apply(table, x, codomain):
    result = {}
    for key, coefficient in x._coefficients.items():
        for image_key, value in table.get(key, {}).items():
            result[image_key] = result.get(image_key, Fraction(0)) + coefficient * value
    return GradedClass(codomain, result)


def _pairing_matrix(ring, codim):
    """Rows: basis of codimension dim-codim; columns: basis of codimension codim; entries: degrees."""
    rows = [(ring.dimension - codim, i) for i in range(len(ring.basis[ring.dimension - codim]))]
    columns = [(codim, j) for j in range(len(ring.basis[codim]))]
    point = ring.point_key
    matrix = sympy.Matrix(len(rows), len(columns), lambda i, j: to_sympy(
        ring.multiply_keys(rows[i], columns[j]).get(point, 0)
    ))
    return rows, columns, matrix


def pushforward_by_duality(name, source, target, pull, rel_dim):
    """
    Derives a pushforward table from a pullback table through the degree pairing.

    f_*(b) is the unique class with deg(f_*(b) . a) = deg(b . f^*(a)) for every basis element a of the target.

    Parameters:
    name (str): Morphism name, for error messages.
    source (RingModel): Source ring, with point class.
    target (RingModel): Target ring, with point class and a nondegenerate pairing.
    pull (dict): Pullback table keyed by target basis keys.
    rel_dim (int): Relative dimension of the morphism.

    Returns:
    dict: Pushforward table keyed by source basis keys.
    """
    if source.point_key is None or target.point_key is None:
        raise NoPointClass(f'{name}: pushforward by duality needs point classes on {source.name} and {target.name}')
    solvers = {}
    push = {}
    for key in source.keys():
        codim = key[0] - rel_dim
        if not 0 <= codim <= target.dimension or not target.basis[codim]:
            continue
        if codim not in solvers:
            rows, columns, matrix = _pairing_matrix(target, codim)
            if matrix.rows != matrix.cols or matrix.det() == 0:
                raise ValidationError(f'{name}: degree pairing on {target.name} is degenerate in codimension {codim}')
            solvers[codim] = (rows, columns, matrix.inv())
        rows, columns, inverse = solvers[codim]
        rhs = []
        for row in rows:
            image = pull.get(row, {})
            total = Fraction(0)
            for image_key, c in image.items():
                total += c * source.multiply_keys(key, image_key).get(source.point_key, 0)
            rhs.append(to_sympy(total))
        if not any(rhs):
            continue
        solution = inverse * sympy.Matrix(rhs)
        push[key] = {columns[j]: from_sympy(v) for j, v in enumerate(solution) if v != 0}
    return push


def _validate(morphism):
    source, target = morphism.source, morphism.target
    name = morphism.name

    # Degrees of both tables
    for key in target.keys():
        for image_key in morphism.pull_key(key):
            if image_key[0] != key[0]:
                raise DegreeMismatch(f'{name}: pullback of {target.symbol(key)} leaves codimension {key[0]}')
    for key in source.keys():
        for image_key in morphism.push_key(key):
            if image_key[0] != key[0] - morphism.rel_dim:
                raise DegreeMismatch(
                    f'{name}: pushforward of {source.symbol(key)} must land in codimension {key[0] - morphism.rel_dim}'
                )

    # Unital ring homomorphism on all basis pairs
    if morphism.pull_key(UNIT_KEY) != {UNIT_KEY: 1}:
        raise NotRingHomomorphism(f'{name}: pullback of the unit is not the unit')
    keys = target.keys()
    pulled = {key: GradedClass(source, morphism.pull_key(key)) for key in keys}
    for i, a in enumerate(keys):
        for b in keys[i:]:
            if mul(pulled[a], pulled[b]) != pullback(morphism, GradedClass(target, target.multiply_keys(a, b))):
                raise NotRingHomomorphism(f'{name}: pair ({target.symbol(a)}, {target.symbol(b)})')

    # Projection formula f_*(f^*a . b) = a . f_*b on all basis pairs
    pushed = {key: GradedClass(target, morphism.push_key(key)) for key in source.keys()}
    for a in keys:
        for b in source.keys():
            left = pushforward(morphism, mul(pulled[a], GradedClass(source, {b: 1})))
            if left != mul(GradedClass(target, {a: 1}), pushed[b]):
                raise ProjectionFormulaViolation(f'{name}: pair ({target.symbol(a)}, {source.symbol(b)})')


def register_morphism(name, source, target, pullback_table, pushforward_table=None, rel_dim=None, validate=True):
    """
    Builds and validates a Morphism from symbol-keyed tables.

    Parameters:
    name (str): Identifier of the morphism.
    source (RingModel): Domain of the map.
    target (RingModel): Codomain of the map.
    pullback_table (dict): target symbol -> class on source. Unlisted symbols pull back to zero, except the unit.
    pushforward_table (dict, optional): source symbol -> class on target. Unlisted symbols push forward to zero.
        When None the table is derived from the pullback by duality.
    rel_dim (int, optional): dim source - dim target; checked when given.
    validate (bool, optional): Run the exhaustive degree, ring-homomorphism and projection-formula checks.

    Returns:
    Morphism: The validated morphism.
    """
    expected = source.dimension - target.dimension
    if rel_dim is None:
        rel_dim = expected
    elif rel_dim != expected:
        raise DegreeMismatch(f'{name}: rel_dim {rel_dim} but dim {source.name} - dim {target.name} = {expected}')

    pull = _read_table(name, target, source, pullback_table, 'pullback')
    pull.setdefault(UNIT_KEY, {UNIT_KEY: Fraction(1)})
    if pushforward_table is None:
        push = pushforward_by_duality(name, source, target, pull, rel_dim)
    else:
        push = _read_table(name, source, target, pushforward_table, 'pushforward')

    morphism = Morphism(name, source, target, rel_dim, pull, push)
    if validate:
        _validate(morphism)
        logger.debug(f'Registered morphism {name}: {source.name} -> {target.name}')
    return morphism


def pullback(f, x):
    if x.ring is not f.target:
        raise RingMismatch(f'pullback along {f.name} expects a class on {f.target.name}, got {x.ring.name}')
    return _apply(f._pull, x, f.source)


def pushforward(f, x):
    if x.ring is not f.source:
        raise RingMismatch(f'pushforward along {f.name} expects a class on {f.source.name}, got {x.ring.name}')
    return _apply(f._push, x, f.target)


def compose(f, g):
    """The morphism f after g: pullbacks compose contravariantly, pushforwards covariantly."""
    if g.target is not f.source:
        raise CompositionMismatch(f'{g.name} lands in {g.target.name} but {f.name} starts at {f.source.name}')
    pull = {
        key: pullback(g, GradedClass(f.source, f.pull_key(key))).coefficients for key in f.target.keys()
    }
    push = {
        key: pushforward(f, GradedClass(g.target, g.push_key(key))).coefficients for key in g.source.keys()
    }
    return Morphism(f'{f.name}_after_{g.name}', g.source, f.target, f.rel_dim + g.rel_dim, pull, push)


def identity(ring):
    table = {key: {key: Fraction(1)} for key in ring.keys()}
    return Morphism(f'id_{ring.name}', ring, ring, 0, table, dict(table))


@functools.lru_cache(maxsize=None)
def point_ring():
    """The zero-dimensional model: basis {one}, point class one."""
    return make_ring('point', 0, {0: ['one']}, {}, point_class='one')


@functools.lru_cache(maxsize=None)
def point_inclusion(ring, name=None):
    """Inclusion of a point into a ring with point class: pushes the unit to the point."""
    return register_morphism(
        name or f'{ring.name}_point', point_ring(), ring, {}, {'one': ring.point_class}
    )


# Künneth products

def _tensor_keys(ring, combinations):
    """External product of per-factor key combinations, expressed in the product ring's keys."""
    result = {}
    for terms in itertools.product(*(combination.items() for combination in combinations)):
        coefficient = Fraction(1)
        for _, c in terms:
            coefficient *= c
        key = ring.product_keys[tuple(k for k, _ in terms)]
        result[key] = result.get(key, Fraction(0)) + coefficient
    return result


def _product_symbol(rings, labels, keys):
    parts = [f'{ring.symbol(key)}_{label}' for ring, label, key in zip(rings, labels, keys) if key != UNIT_KEY]
    return '_'.join(parts) if parts else 'one'


@functools.lru_cache(maxsize=None)
def _kunneth(rings, labels):
    dimension = sum(ring.dimension for ring in rings)
    factor_keys = list(itertools.product(*(ring.keys() for ring in rings)))
    symbols = {keys: _product_symbol(rings, labels, keys) for keys in factor_keys}

    basis = {}
    for keys in factor_keys:
        basis.setdefault(sum(key[0] for key in keys), []).append(symbols[keys])

    products = []
    for i, left in enumerate(factor_keys):
        if all(key == UNIT_KEY for key in left):
            continue
        for right in factor_keys[i:]:
            if all(key == UNIT_KEY for key in right):
                continue
            parts = [ring.multiply_keys(a, b) for ring, a, b in zip(rings, left, right)]
            if not all(parts):
                continue
            value = {}
            for terms in itertools.product(*(part.items() for part in parts)):
                coefficient = Fraction(1)
                for _, c in terms:
                    coefficient *= c
                symbol = symbols[tuple(k for k, _ in terms)]
                value[symbol] = value.get(symbol, Fraction(0)) + coefficient
            products.append((symbols[left], symbols[right], value))

    point = None
    if all(ring.point_key is not None for ring in rings):
        point = symbols[tuple(ring.point_key for ring in rings)]

    name = '_x_'.join(ring.name for ring in rings)
    ring = make_ring(name, dimension, basis, products, point_class=point)
    ring.factors = rings
    ring.factor_keys = {ring.key(symbols[keys]): keys for keys in factor_keys}
    ring.product_keys = {keys: key for key, keys in ring.factor_keys.items()}

    projections = []
    for i, factor in enumerate(rings):
        others = [other for j, other in enumerate(rings) if j != i]
        if any(other.point_key is None for other in others):
            projections.append(None)
            continue
        pull = {}
        for key in factor.keys():
            keys = tuple(key if j == i else UNIT_KEY for j in range(len(rings)))
            pull[factor.symbol(key)] = symbols[keys]
        push = {}
        for keys in factor_keys:
            if all(keys[j] == rings[j].point_key for j in range(len(rings)) if j != i):
                push[symbols[keys]] = factor.symbol(keys[i])
        projections.append(register_morphism(f'{name}_pr{labels[i]}', ring, factor, pull, push))
    return ring, tuple(projections)


def tensor_product(*rings, labels=None):
    """
    Künneth model of a product of spaces.

    Basis elements are tuples of factor basis elements, named ``<symbol>_<label>`` joined by underscores over the
    non-unit factors. Products are componentwise; the point class is the tuple of point classes.

    Parameters:
    *rings (RingModel): The factors.
    labels (tuple of str, optional): Factor labels used in basis names. Default is "1", "2", ...

    Returns:
    tuple: (RingModel, projection_1, ..., projection_k). A projection is None when another factor has no point
        class, since its pushforward cannot be formed.
    """
    if not rings:
        raise ValidationError('tensor_product needs at least one ring')
    labels = tuple(labels) if labels is not None else tuple(str(i + 1) for i in range(len(rings)))
    if len(labels) != len(rings) or len(set(labels)) != len(labels):
        raise ValidationError(f'labels {labels} must be distinct, one per factor')
    ring, projections = _kunneth(tuple(rings), labels)
    return (ring, *projections)


def tensor_power(ring, g):
    return tensor_product(*([ring] * g))


@functools.lru_cache(maxsize=None)
def _tensor_morphism(morphisms):
    source = tensor_product(*(f.source for f in morphisms))[0]
    target = tensor_product(*(f.target for f in morphisms))[0]
    pull = {
        target.symbol(key): GradedClass(source, _tensor_keys(
            source, [f.pull_key(k) for f, k in zip(morphisms, target.factor_keys[key])]
        ))
        for key in target.keys()
    }
    push = {
        source.symbol(key): GradedClass(target, _tensor_keys(
            target, [f.push_key(k) for f, k in zip(morphisms, source.factor_keys[key])]
        ))
        for key in source.keys()
    }
    return register_morphism('_x_'.join(f.name for f in morphisms), source, target, pull, push)


def tensor_morphism(*morphisms):
    """The product map f_1 x ... x f_k between Künneth models (default labels)."""
    return _tensor_morphism(tuple(morphisms))


def external_product(classes):
    """x_1 (x) ... (x) x_k on the Künneth model of the classes' rings (default labels)."""
    classes = list(classes)
    ring = tensor_product(*(x.ring for x in classes))[0]
    return GradedClass(ring, _tensor_keys(ring, [x.coefficients for x in classes]))


# Truncated polynomial rings

def _monomial_symbol(names, exponents):
    parts = [name if e == 1 else f'{name}^{e}' for name, e in zip(names, exponents) if e]
    return '*'.join(parts) if parts else 'one'


def truncated_polynomial_ring(variables, ambient_dimension, name=None, point_class=None):
    """
    Q[a_1, ..., a_k] / (a_i^{t_i}) truncated above codimension ``ambient_dimension``.

    Parameters:
    variables (list of tuple): (name, codim, truncation_exponent) per variable; truncation_exponent >= 1.
    ambient_dimension (int): Top codimension kept.
    name (str, optional): Ring name.
    point_class (str, optional): Monomial symbol, such as ``a1^2*a2``, to designate as point class.

    Returns:
    RingModel: The ring, with monomial basis symbols such as ``a1^2*a2``.
    """
    names = [v[0] for v in variables]
    codims = [v[1] for v in variables]
    for var_name, codim, truncation in variables:
        if truncation < 1 or codim < 1:
            raise ValidationError(f'variable {var_name}: codim and truncation exponent must be positive')

    monomials = [
        exponents for exponents in itertools.product(*(range(v[2]) for v in variables))
        if sum(e * c for e, c in zip(exponents, codims)) <= ambient_dimension
    ]
    basis = {}
    for exponents in monomials:
        codim = sum(e * c for e, c in zip(exponents, codims))
        basis.setdefault(codim, []).append(_monomial_symbol(names, exponents))

    allowed = set(monomials)
    products = []
    for i, left in enumerate(monomials):
        for right in monomials[i:]:
            if not any(left) or not any(right):
                continue
            exponents = tuple(a + b for a, b in zip(left, right))
            value = _monomial_symbol(names, exponents) if exponents in allowed else 0
            products.append((_monomial_symbol(names, left), _monomial_symbol(names, right), value))

    name = name or 'Q[' + ','.join(names) + ']'
    return make_ring(name, ambient_dimension, basis, products, point_class=point_class)


# Numerical models from top intersection numbers

@dataclass(frozen=True, eq=False)
class NumericalRing:
    """
    The numerical quotient of a polynomial ring on divisor generators.

    ``expansion`` expresses every generator monomial (a sorted tuple) as a class; ``basis_monomials`` maps each
    basis symbol to (monomial, scale) with symbol = scale * monomial.
    """
    ring: RingModel
    generators: tuple
    expansion: dict
    basis_monomials: dict

    def monomial_class(self, monomial):
        return self.expansion[tuple(sorted(monomial, key=self.generators.index))]


def numerical_ring(name, dimension, generators, degree, point_symbol='pt', unit_symbol='one'):
    """
    Builds the numerical-equivalence ring spanned by codimension-1 generators from their top intersection numbers.

    In each codimension the monomials modulo the kernel of the degree pairing form the graded piece; a basis
    is chosen greedily among monomials in generator order.

    Parameters:
    name (str): Ring name.
    dimension (int): Dimension of the space.
    generators (sequence of str): Divisor generator names.
    degree (callable): Maps a monomial (tuple of generator names of length dimension) to its degree.
    point_symbol (str, optional): Symbol of the top-codimension class of degree 1.
    unit_symbol (str, optional): Symbol of the unit.

    Returns:
    NumericalRing: The ring plus the monomial expansions.
    """
    generators = tuple(generators)
    monomials = {c: list(itertools.combinations_with_replacement(generators, c)) for c in range(dimension + 1)}
    order = {g: i for i, g in enumerate(generators)}
    degrees = {}

    def degree_of(monomial):
        monomial = tuple(sorted(monomial, key=order.__getitem__))
        if monomial not in degrees:
            degrees[monomial] = Fraction(degree(monomial))
        return degrees[monomial]

    def merge(left, right):
        return tuple(sorted(left + right, key=order.__getitem__))

    coordinates = {}
    basis_monomials = {}
    basis = {}
    for codim in range(dimension + 1):
        rows = monomials[codim]
        columns = monomials[dimension - codim]
        pairing = sympy.Matrix(len(rows), len(columns),
                               lambda i, j: to_sympy(degree_of(merge(rows[i], columns[j]))))
        independent = list(pairing.T.rref()[1]) if pairing.rows and pairing.cols else []
        if not independent:
            for monomial in rows:
                coordinates[monomial] = (codim, {})
            basis[codim] = []
            continue
        chosen = [rows[i] for i in independent]
        if codim == 0:
            symbols = [unit_symbol]
            scales = [Fraction(1)]
        elif codim == dimension:
            symbols = [point_symbol]
            scales = [Fraction(1) / degree_of(chosen[0])]
        else:
            symbols = ['_'.join(monomial) for monomial in chosen]
            scales = [Fraction(1)] * len(chosen)
        basis[codim] = symbols
        for symbol, monomial, scale in zip(symbols, chosen, scales):
            basis_monomials[symbol] = (monomial, scale)

        chosen_rows = pairing.extract(independent, list(range(pairing.cols)))
        pivots = list(chosen_rows.rref()[1])
        inverse = chosen_rows.extract(list(range(chosen_rows.rows)), pivots).inv()
        for i, monomial in enumerate(rows):
            solution = pairing.extract([i], pivots) * inverse
            # Coordinates against chosen monomials; rescale to the (possibly normalised) basis symbols
            coordinates[monomial] = (codim, {
                symbol: from_sympy(v) / scale for symbol, v, scale in zip(symbols, solution, scales) if v != 0
            })

    products = []
    non_unit = [s for s in basis_monomials if basis_monomials[s][0]]
    for i, left in enumerate(non_unit):
        for right in non_unit[i:]:
            (m_1, s_1), (m_2, s_2) = basis_monomials[left], basis_monomials[right]
            if len(m_1) + len(m_2) > dimension:
                continue
            _, combination = coordinates[merge(m_1, m_2)]
            products.append((left, right, {s: c * s_1 * s_2 for s, c in combination.items()}))

    point = point_symbol if basis.get(dimension) else None
    ring = make_ring(name, dimension, basis, products, point_class=point)
    expansion = {monomial: ring.element(combination) for monomial, (_, combination) in coordinates.items()}
    return NumericalRing(ring, generators, expansion, basis_monomials)


# Abelian varieties isogenous to a power of one elliptic curve (End = Z)

def mixed_discriminant(matrices):
    """
    Coefficient of t_1...t_k in det(t_1 M_1 + ... + t_k M_k) for k square matrices of size k.

    This is the intersection number D_1...D_k of the divisors with hermitian forms M_i on E^k.
    """
    k = len(matrices)
    total = sympy.Integer(0)
    for size in range(k + 1):
        for subset in itertools.combinations(range(k), size):
            summed = sympy.zeros(k, k)
            for i in subset:
                summed += matrices[i]
            total += (-1) ** (k - size) * summed.det()
    return from_sympy(total)


@dataclass(frozen=True, eq=False)
class AbelianVarietyModel:
    """
    A ring modelling E^n together with the hermitian matrix of each divisor generator.

    ``basis_monomials`` maps basis symbols to (monomial in generators, scale).
    """
    ring: RingModel
    n: int
    divisor_matrices: dict
    generator_classes: dict
    basis_monomials: dict

    def monomial_class(self, monomial):
        result = self.ring.unit()
        for generator in monomial:
            result = mul(result, self.generator_classes[generator])
        return result


def _symmetric_integer_matrix(entries, n):
    matrix = sympy.Matrix(entries) if n else sympy.zeros(0, 0)
    if matrix.shape != (n, n) or matrix != matrix.T:
        raise ValidationError(f'divisor matrix {entries} must be a symmetric {n}x{n} matrix')
    return matrix


def abelian_ring(name, n, divisors, point_symbol='pt', unit_symbol='one'):
    """
    Numerical model of E^n spanned by the given divisors.

    Parameters:
    name (str): Ring name.
    n (int): Number of elliptic factors, the dimension.
    divisors (dict): Generator name -> symmetric integer n x n matrix (its hermitian form).

    Returns:
    AbelianVarietyModel: The model; top intersections are mixed discriminants.
    """
    matrices = {symbol: _symmetric_integer_matrix(m, n) for symbol, m in divisors.items()}
    numerical = numerical_ring(
        name, n, list(matrices), lambda monomial: mixed_discriminant([matrices[g] for g in monomial]),
        point_symbol=point_symbol, unit_symbol=unit_symbol,
    )
    return AbelianVarietyModel(
        ring=numerical.ring,
        n=n,
        divisor_matrices=matrices,
        generator_classes={g: numerical.monomial_class((g,)) for g in matrices},
        basis_monomials=numerical.basis_monomials,
    )


def abelian_structure(ring, n, divisors, monomials):
    """
    Attaches divisor matrices to a hand-written ring and checks its top intersections against them.

    Parameters:
    ring (RingModel): A ring modelling E^n.
    n (int): Number of elliptic factors.
    divisors (dict): Codimension-1 basis symbol -> symmetric integer matrix.
    monomials (dict): Every basis symbol -> tuple of divisor symbols whose product it equals.

    Returns:
    AbelianVarietyModel: The model.
    """
    matrices = {symbol: _symmetric_integer_matrix(m, n) for symbol, m in divisors.items()}
    if ring.dimension != n:
        raise ValidationError(f'{ring.name}: dimension {ring.dimension} is not {n}')
    for symbol in matrices:
        if ring.key(symbol)[0] != 1:
            raise DegreeMismatch(f'{ring.name}: divisor {symbol} is not in codimension 1')
    model = AbelianVarietyModel(
        ring=ring,
        n=n,
        divisor_matrices=matrices,
        generator_classes={symbol: ring.basis_class(symbol) for symbol in matrices},
        basis_monomials={symbol: (tuple(monomial), Fraction(1)) for symbol, monomial in monomials.items()},
    )
    for symbol, (monomial, _) in model.basis_monomials.items():
        if model.monomial_class(monomial) != ring.basis_class(symbol):
            raise ValidationError(f'{ring.name}: {symbol} is not the product {"*".join(monomial) or "one"}')
    for monomial in itertools.combinations_with_replacement(list(matrices), n):
        expected = mixed_discriminant([matrices[g] for g in monomial])
        if integrate(model.monomial_class(monomial)) != expected:
            raise ValidationError(f'{ring.name}: degree of {"*".join(monomial)} should be {expected}')
    return model


def _divisor_coordinates(model, matrix):
    """Writes a symmetric matrix as a combination of the model's divisor matrices."""
    generators = list(model.divisor_matrices)
    if matrix.is_zero_matrix:
        return {}
    n = model.n
    positions = [(i, j) for i in range(n) for j in range(i, n)]
    system = sympy.Matrix(len(positions), len(generators),
                          lambda r, c: model.divisor_matrices[generators[c]][positions[r]])
    rhs = sympy.Matrix([matrix[p] for p in positions])
    try:
        solution, parameters = system.gauss_jordan_solve(rhs)
    except ValueError:
        raise UnsupportedModel(f'{matrix.tolist()} is outside the divisor span of {model.ring.name}') from None
    solution = solution.subs({p: 0 for p in parameters})
    return {generators[c]: from_sympy(v) for c, v in enumerate(solution) if v != 0}


def homomorphism(name, source, target, matrix, validate=True):
    """
    Morphism induced by a homomorphism E^m -> E^n with integer matrix A (target coords = A . source coords).

    Divisors pull back by M -> A^T M A; higher basis elements pull back as products of generators; the
    pushforward is derived by duality.

    Parameters:
    name (str): Morphism name.
    source (AbelianVarietyModel): Model of E^m.
    target (AbelianVarietyModel): Model of E^n.
    matrix (list of lists): n x m integer matrix.

    Returns:
    Morphism: The validated morphism.
    """
    a = sympy.Matrix(matrix) if target.n and source.n else sympy.zeros(target.n, source.n)
    if a.shape != (target.n, source.n):
        raise DegreeMismatch(f'{name}: matrix shape {a.shape} should be {(target.n, source.n)}')
    pulled_generators = {}
    for generator, m in target.divisor_matrices.items():
        coordinates = _divisor_coordinates(source, a.T * m * a)
        image = source.ring.zero()
        for symbol, c in coordinates.items():
            image = image + c * source.generator_classes[symbol]
        pulled_generators[generator] = image

    pull = {}
    for symbol, (monomial, scale) in target.basis_monomials.items():
        image = source.ring.unit()
        for generator in monomial:
            image = mul(image, pulled_generators[generator])
        pull[symbol] = scale * image
    return register_morphism(name, source.ring, target.ring, pull, None, validate=validate)


# Families and the model registry

@dataclass(frozen=True, eq=False)
class PicardPackage:
    """
    Model of X x_S J with the maps the E-class construction needs.

    ``p1`` goes to the X side (or to a fibre of X for a fibrewise package), ``p2`` to the Jacobian side.
    ``cF`` is c1(F) on p1's target. ``fibre_inclusion`` embeds a Jacobian fibre model into ``jacobian``.
    """
    name: str
    product: RingModel
    p1: Morphism
    p2: Morphism
    cU: GradedClass
    cF: GradedClass
    jacobian: RingModel
    zero_section: Morphism
    inversion: Morphism
    fibre_inclusion: Morphism
    jacobian_proj: Optional[Morphism] = None
    section: Optional[Morphism] = None

    @property
    def fibre(self):
        return self.fibre_inclusion.source


@dataclass(frozen=True, eq=False)
class FamilyModel:
    """A family pi: X -> S of relative dimension n with c1(L), c1(F) and a fibre model."""
    name: str
    total: RingModel
    base: RingModel
    proj: Morphism
    n: int
    g: int
    cL: GradedClass
    cF: GradedClass
    fiber: RingModel
    fiber_restrict: Morphism
    abelian: bool = False
    numerically_trivial: bool = True
    rank: Optional[int] = None
    package: Optional[PicardPackage] = None

    def with_line_bundle(self, cL):
        return dataclasses.replace(self, cL=cL)

    def digest(self):
        return {
            'family': self.name, 'total': self.total.name, 'base': self.base.name, 'n': self.n, 'g': self.g,
        }


def check_family(family):
    """
    Validates the FamilyModel invariants.

    Raises:
    ValidationError: If the projection, classes or fibre data are inconsistent.
    """
    if family.proj.source is not family.total or family.proj.target is not family.base:
        raise ValidationError(f'{family.name}: proj must map {family.total.name} to {family.base.name}')
    if family.proj.rel_dim != family.n:
        raise DegreeMismatch(f'{family.name}: proj has rel_dim {family.proj.rel_dim}, n = {family.n}')
    if family.g < 0:
        raise ValidationError(f'{family.name}: g must be non-negative')
    for label, x in (('L', family.cL), ('F', family.cF)):
        if x.ring is not family.total or not x.is_homogeneous(1):
            raise DegreeMismatch(f'{family.name}: c1({label}) must be a codimension-1 class on {family.total.name}')
    restrict = family.fiber_restrict
    if restrict.source is not family.fiber or restrict.target is not family.total:
        raise ValidationError(f'{family.name}: fiber_restrict must map {family.fiber.name} to {family.total.name}')
    if family.numerically_trivial and family.n >= 1 and family.fiber.point_key is not None:
        restricted = mul(pullback(restrict, family.cL),
                         pullback(restrict, family.cF) ** (family.n - 1))
        if integrate(restricted) != 0:
            raise ValidationError(f'{family.name}: L is not numerically trivial on the fibre')
    return family


@dataclass
class Registry:
    """
    Named rings, morphisms, families, classes and bundles. Append-only: re-registering a name is an error.
    """
    rings: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)
    bundles: dict = field(default_factory=dict)

    def _add(self, kind, name, value):
        table = getattr(self, kind)
        if name in table:
            raise ValidationError(f'{name!r} is already declared among {kind}')
        table[name] = value
        return value

    def add_ring(self, name, ring):
        return self._add('rings', name, ring)

    def add_morphism(self, name, morphism):
        return self._add('morphisms', name, morphism)

    def add_family(self, name, family):
        return self._add('families', name, family)

    def add_class(self, name, x):
        return self._add('classes', name, x)

    def add_bundle(self, name, x):
        return self._add('bundles', name, x)

    def names(self):
        return set(self.rings) | set(self.morphisms) | set(self.families) | set(self.classes) | set(self.bundles)

    def lookup(self, kind, name):
        try:
            return getattr(self, kind)[name]
        except KeyError:
            raise UnknownModel(f'no {kind[:-1]} named {name!r}') from None
