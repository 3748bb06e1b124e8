import itertools
import math
import numbers
import re
from collections.abc import Mapping
from fractions import Fraction

from exceptions import (
    DegreeMismatch, DuplicateBasisName, NonNilpotentInput, NoPointClass, RingMismatch, ValidationError
)
from logger import logger

UNIT_KEY = (0, 0)

_EMPTY = {}
_RATIONAL = re.compile(r'-?\d+(?:/\d+)?')


def as_rational(value):
    """
    Converts an exact scalar to a Fraction.

    Parameters:
    value (int, Fraction, numbers.Rational or str): The scalar. Strings use the ``p`` or ``p/q`` notation.

    Returns:
    Fraction: The value in lowest terms with a positive denominator.
    """
    if isinstance(value, bool):
        raise TypeError('booleans are not rational numbers')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str) and _RATIONAL.fullmatch(value.strip()):
        return Fraction(value.strip())
    # Floats, decimal and exponent strings are refused
    raise TypeError(f'not an exact rational: {value!r}')


class RingModel:
    """
    A finite graded commutative Q-algebra given by a basis per codimension and a structure-constant table.

    Instances are built (and validated) by :func:`make_ring`; they are immutable afterwards. Basis elements are
    addressed by keys ``(codim, index)`` where ``index`` follows the lexicographic order of the names in that
    codimension. The unit always has key ``(0, 0)``.
    """

    # Set on Künneth products: the factor rings and, per basis key, the tuple of factor keys
    factors = ()
    factor_keys = None
    product_keys = None

    def __init__(self, name, dimension, basis, table, point_class=None):
        self.name = name
        self.dimension = dimension
        self.basis = basis
        self._table = table
        self._index = {symbol: (codim, i) for codim, symbols in enumerate(basis) for i, symbol in enumerate(symbols)}
        self.point_class = point_class
        self.point_key = None if point_class is None else self._index[point_class]

    def __repr__(self):
        return f'RingModel({self.name!r}, dimension={self.dimension})'

    def __str__(self):
        return self.name

    @property
    def unit_name(self):
        return self.basis[0][0]

    @property
    def size(self):
        return len(self._index)

    def keys(self):
        """All basis keys in canonical order (codimension, then lexicographic name)."""
        return [(codim, i) for codim, symbols in enumerate(self.basis) for i in range(len(symbols))]

    def key(self, symbol):
        try:
            return self._index[symbol]
        except KeyError:
            raise ValidationError(f'{symbol!r} is not a basis symbol of {self.name}') from None

    def has_symbol(self, symbol):
        return symbol in self._index

    def symbol(self, key):
        return self.basis[key[0]][key[1]]

    def multiply_keys(self, key_1, key_2):
        """
        Product of two basis elements as a sparse mapping key -> Fraction.
        """
        if key_1 == UNIT_KEY:
            return {key_2: Fraction(1)}
        if key_2 == UNIT_KEY:
            return {key_1: Fraction(1)}
        if key_1[0] + key_2[0] > self.dimension:
            return _EMPTY
        return self._table.get((key_1, key_2), _EMPTY)

    def unit(self):
        return GradedClass(self, {UNIT_KEY: Fraction(1)})

    def zero(self):
        return GradedClass(self, {})

    def basis_class(self, symbol):
        return GradedClass(self, {self.key(symbol): Fraction(1)})

    def point(self):
        if self.point_key is None:
            raise NoPointClass(self.name)
        return GradedClass(self, {self.point_key: Fraction(1)})

    def element(self, value):
        """
        Builds a class from a loose description.

        Parameters:
        value: A GradedClass on this ring, a basis symbol, the integer 0, or a mapping symbol -> rational.

        Returns:
        GradedClass: The described class.
        """
        if isinstance(value, GradedClass):
            _check_same_ring(value.ring, self)
            return value
        combination = linear_combination(value)
        return GradedClass(self, {self.key(symbol): coefficient for symbol, coefficient in combination.items()})

    def to_dict(self):
        products = []
        keys = self.keys()
        for i, key_1 in enumerate(keys):
            for key_2 in keys[i:]:
                if UNIT_KEY in (key_1, key_2):
                    continue
                value = self.multiply_keys(key_1, key_2)
                if value:
                    products.append({
                        'left': self.symbol(key_1),
                        'right': self.symbol(key_2),
                        'value': str(GradedClass(self, value)),
                    })
        return {
            'name': self.name,
            'dimension': self.dimension,
            'basis': {str(codim): list(symbols) for codim, symbols in enumerate(self.basis)},
            'point_class': self.point_class,
            'products': products,
        }


class GradedClass:
    """
    A cycle class: an immutable sparse map (codim, basis index) -> Fraction over a RingModel.

    Zero coefficients are never stored, so two classes are equal exactly when their coefficient maps are.
    """
    __slots__ = ('ring', '_coefficients')

    def __init__(self, ring, coefficients=None):
        clean = {}
        for key, coefficient in (coefficients or {}).items():
            coefficient = as_rational(coefficient)
            if coefficient:
                codim, index = key
                if not 0 <= codim <= ring.dimension or not 0 <= index < len(ring.basis[codim]):
                    raise ValidationError(f'key {key} outside ring {ring.name}')
                clean[key] = coefficient
        self.ring = ring
        self._coefficients = clean

    @property
    def coefficients(self):
        return dict(self._coefficients)

    def terms(self):
        """Nonzero terms in canonical order as (key, coefficient)."""
        return sorted(self._coefficients.items())

    def coefficient(self, symbol):
        return self._coefficients.get(self.ring.key(symbol), Fraction(0))

    def is_zero(self):
        return not self._coefficients

    def codims(self):
        return sorted({codim for codim, _ in self._coefficients})

    def is_homogeneous(self, codim):
        return all(key[0] == codim for key in self._coefficients)

    def __eq__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.ring is other.ring and self._coefficients == other._coefficients

    def __hash__(self):
        return hash((id(self.ring), frozenset(self._coefficients.items())))

    def __add__(self, other):
        if isinstance(other, GradedClass):
            return add(self, other)
        if other == 0:
            return self
        return add(self, scalar_mul(other, self.ring.unit()))

    __radd__ = __add__

    def __neg__(self):
        return scalar_mul(-1, self)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GradedClass):
            return mul(self, other)
        return scalar_mul(other, self)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return scalar_mul(Fraction(1) / as_rational(other), self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __repr__(self):
        return f'GradedClass({self.ring.name}: {self})'

    def __str__(self):
        if not self._coefficients:
            return '0'
        pieces = []
        for key, coefficient in self.terms():
            symbol = self.ring.symbol(key)
            magnitude = abs(coefficient)
            term = symbol if magnitude == 1 else f'{magnitude}*{symbol}'
            if not pieces:
                pieces.append(term if coefficient > 0 else f'-{term}')
            else:
                pieces.append(f'+ {term}' if coefficient > 0 else f'- {term}')
        return ' '.join(pieces)

    def to_dict(self):
        return {
            'ring': self.ring.name,
            'terms': [
                {'basis': self.ring.symbol(key), 'codim': key[0], 'coefficient': str(coefficient)}
                for key, coefficient in self.terms()
            ],
            'text': str(self),
        }


def _check_same_ring(ring_1, ring_2):
    if ring_1 is not ring_2:
        raise RingMismatch(f'{ring_1.name} vs {ring_2.name}')


def linear_combination(value):
    """Normalises a table value (mapping, symbol, 0) to a dict symbol -> nonzero Fraction."""
    if isinstance(value, GradedClass):
        return {value.ring.symbol(key): coefficient for key, coefficient in value.terms()}
    if isinstance(value, str):
        return {value: Fraction(1)}
    if isinstance(value, Mapping):
        combination = {}
        for symbol, coefficient in value.items():
            coefficient = as_rational(coefficient)
            if coefficient:
                combination[symbol] = combination.get(symbol, Fraction(0)) + coefficient
        return {symbol: c for symbol, c in combination.items() if c}
    if value == 0:
        return {}
    raise ValidationError(f'cannot read a linear combination from {value!r}')


def _product_entries(products):
    entries = products.items() if isinstance(products, Mapping) else products
    for entry in entries:
        if len(entry) == 3:
            left, right, value = entry
        else:
            (left, right), value = entry
        yield left, right, value


def _multiply_combination(ring, combination, key):
    result = {}
    for key_1, coefficient in combination.items():
        for key_2, value in ring.multiply_keys(key_1, key).items():
            result[key_2] = result.get(key_2, Fraction(0)) + coefficient * value
    return {k: v for k, v in result.items() if v}


def _check_associativity(ring):
    """
    Exhaustive associativity check over basis multisets {x <= y <= z} of non-unit elements.

    For a commutative table the two identities (xy)z = x(yz) and (xy)z = y(xz) per multiset cover every
    ordering. Triples whose codimensions sum past the dimension vanish on both sides by grading.
    """
    keys = [key for key in ring.keys() if key != UNIT_KEY]
    checked = 0
    for x, y, z in itertools.combinations_with_replacement(keys, 3):
        if x[0] + y[0] + z[0] > ring.dimension:
            continue
        left = _multiply_combination(ring, ring.multiply_keys(x, y), z)
        if left != _multiply_combination(ring, ring.multiply_keys(y, z), x) or \
                left != _multiply_combination(ring, ring.multiply_keys(x, z), y):
            raise ValidationError(
                f'associativity fails on ({ring.symbol(x)}, {ring.symbol(y)}, {ring.symbol(z)}) in {ring.name}'
            )
        checked += 1
    logger.debug(f'{ring.name}: associativity verified on {checked} basis triples')


def make_ring(name, dimension, basis_symbols, products, point_class=None):
    """
    Builds and validates a RingModel.

    Parameters:
    name (str): Identifier of the model.
    dimension (int): Dimension of the modelled space; basis codimensions run over 0..dimension.
    basis_symbols (Mapping[int, Sequence[str]]): Basis symbols per codimension. Codimension 0 holds the unit only.
    products (Mapping or iterable): Entries ``(left, right) -> value`` or triples ``(left, right, value)`` where
        value is a symbol, 0, or a mapping symbol -> rational. Unlisted products of non-unit elements are zero;
        an entry and its transpose must agree.
    point_class (str, optional): Top-codimension symbol whose coefficient is the degree.

    Returns:
    RingModel: The validated model.

    Raises:
    DuplicateBasisName, DegreeMismatch, ValidationError naming the first failing pair or triple.
    """
    if not isinstance(dimension, int) or dimension < 0:
        raise ValidationError(f'{name}: dimension must be a non-negative integer')
    codims = set(basis_symbols)
    if not codims <= set(range(dimension + 1)):
        raise ValidationError(f'{name}: basis codimensions {sorted(codims)} outside 0..{dimension}')
    if len(basis_symbols.get(0, ())) != 1:
        raise ValidationError(f'{name}: codimension 0 must hold exactly one basis symbol (the unit)')

    seen = set()
    basis = []
    for codim in range(dimension + 1):
        symbols = list(basis_symbols.get(codim, ()))
        for symbol in symbols:
            if symbol in seen:
                raise DuplicateBasisName(f'{symbol!r} in {name}')
            seen.add(symbol)
        basis.append(tuple(sorted(symbols)))
    basis = tuple(basis)
    index = {symbol: (codim, i) for codim, symbols in enumerate(basis) for i, symbol in enumerate(symbols)}
    unit = basis[0][0]

    table = {}
    for left, right, value in _product_entries(products):
        for symbol in (left, right):
            if symbol not in index:
                raise ValidationError(f'{name}: product {left}*{right} references undeclared symbol {symbol!r}')
        combination = linear_combination(value)
        codim = index[left][0] + index[right][0]
        for symbol in combination:
            if symbol not in index:
                raise ValidationError(f'{name}: product {left}*{right} has undeclared symbol {symbol!r}')
            if index[symbol][0] != codim:
                raise DegreeMismatch(f'{name}: {left}*{right} must land in codimension {codim}, got {symbol}')
        if unit in (left, right):
            other = right if left == unit else left
            if combination != {other: 1}:
                raise ValidationError(f'{name}: unit law fails for {left}*{right}')
            continue
        value_keys = {index[symbol]: coefficient for symbol, coefficient in combination.items()}
        pair = (index[left], index[right])
        for key in (pair, pair[::-1]):
            if key in table and table[key] != value_keys:
                raise ValidationError(f'{name}: contradictory entries for {left}*{right}')
        if not value_keys:
            # Record explicit zeros so a later contradictory entry is still caught
            table[pair] = table[pair[::-1]] = {}
            continue
        table[pair] = table[pair[::-1]] = value_keys
    table = {pair: value for pair, value in table.items() if value}

    if point_class is not None:
        if point_class not in index or index[point_class][0] != dimension:
            raise ValidationError(f'{name}: point class {point_class!r} must be a codimension-{dimension} symbol')

    ring = RingModel(name, dimension, basis, table, point_class)
    _check_associativity(ring)
    logger.debug(f'Built ring {name}: dimension {dimension}, {ring.size} basis elements')
    return ring


def add(x, y):
    _check_same_ring(x.ring, y.ring)
    result = dict(x._coefficients)
    for key, coefficient in y._coefficients.items():
        result[key] = result.get(key, Fraction(0)) + coefficient
    return GradedClass(x.ring, result)


def scalar_mul(q, x):
    q = as_rational(q)
    return GradedClass(x.ring, {key: q * coefficient for key, coefficient in x._coefficients.items()})


def mul(x, y):
    """Intersection product: bilinear extension of the structure constants."""
    _check_same_ring(x.ring, y.ring)
    ring = x.ring
    result = {}
    for key_1, coefficient_1 in x._coefficients.items():
        for key_2, coefficient_2 in y._coefficients.items():
            for key, value in ring.multiply_keys(key_1, key_2).items():
                result[key] = result.get(key, Fraction(0)) + coefficient_1 * coefficient_2 * value
    return GradedClass(ring, result)


def power(x, k):
    if not isinstance(k, int) or k < 0:
        raise ValueError(f'exponent must be a non-negative integer, got {k!r}')
    result = x.ring.unit()
    base = x
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def exp_truncated(x):
    """
    Truncated exponential sum_{i=0}^{dim} x^i / i!.

    The series is exact because a class without codimension-0 part is nilpotent: x^i vanishes for i > dim.
    """
    if not component(x, 0).is_zero():
        raise NonNilpotentInput(f'{x} has codimension-0 part')
    result = x.ring.unit()
    term = x.ring.unit()
    for i in range(1, x.ring.dimension + 1):
        term = mul(term, x)
        if term.is_zero():
            break
        result = add(result, scalar_mul(Fraction(1, math.factorial(i)), term))
    return result


def integrate(x):
    """Degree of a class: the coefficient of the point class."""
    if x.ring.point_key is None:
        raise NoPointClass(x.ring.name)
    return x._coefficients.get(x.ring.point_key, Fraction(0))


def degree_pairing(x, y):
    return integrate(mul(x, y))


def equal(x, y):
    _check_same_ring(x.ring, y.ring)
    return x._coefficients == y._coefficients


def component(x, codim):
    return GradedClass(x.ring, {key: c for key, c in x._coefficients.items() if key[0] == codim})
