"""
Text surface of the engine: an expression language for cycle-class arithmetic and a line-based model-file format.

Expressions::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | power
    power   := primary ('^' INT)?
    primary := NUMBER | NAME | '(' expr ')' | push(NAME, expr) | pull(NAME, expr) | exp(expr) | c1(NAME)
             | integrate(expr) | component(expr, INT)

``a - b`` is Add(a, Neg(b)); a '-' in operand position directly before a number folds into the literal unless
the number is raised to a power. See GRAMMAR.md for the model-file format.
"""
import re
from collections.abc import Mapping
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Optional

import config
from exceptions import (
    ChowError, DslSyntaxError, EvaluationError, ForwardReference, NoPointClass, UnboundName, UnknownModel,
    UnsupportedModel, ValidationError
)
from geometry import (
    FamilyModel, Registry, check_family, compose, identity, pullback, pushforward, register_morphism,
    tensor_morphism, tensor_product
)
from logger import logger
from ring_core import GradedClass, component, exp_truncated, integrate, make_ring, power

FUNCTIONS = ('push', 'pull', 'exp', 'c1', 'integrate', 'component')

_TOKEN = re.compile(r'''
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<decimal>\d+\.\d*|\.\d+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^(),])
''', re.VERBOSE)


# AST

@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class RationalLit(Node):
    value: Fraction
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class ClassRef(Node):
    name: str
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Exp(Node):
    operand: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class C1(Node):
    bundle: str
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Push(Node):
    morphism: str
    operand: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Pull(Node):
    morphism: str
    operand: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Integrate(Node):
    operand: Node
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Component(Node):
    operand: Node
    codim: int
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


# Tokenizer and parser

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text, line=1, column=1):
    """
    Splits expression text into tokens with 1-based positions; ``line``/``column`` give the position of the first
    character when the text is embedded in a larger file.
    """
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise DslSyntaxError(f'unexpected character {text[position]!r}', line, column,
                                 ('NUMBER', 'NAME', '(', '-'))
        kind = match.lastgroup
        value = match.group()
        if kind == 'decimal':
            raise DslSyntaxError(f'decimal literal {value!r}; write an exact rational such as 1/2', line, column)
        if kind == 'newline':
            line, column = line + 1, 1
        else:
            if kind != 'space':
                tokens.append(Token(value if kind == 'op' else kind.upper(), value, line, column))
            column += len(value)
        position = match.end()
    tokens.append(Token('END', '', line, column))
    return tokens


def _children(node):
    return [getattr(node, f.name) for f in fields(node) if isinstance(getattr(node, f.name), Node)]


def _check_depth(node):
    """Rejects trees deeper than config.MAX_AST_DEPTH; long operator chains nest on the left."""
    stack = [(node, 1)]
    while stack:
        node, depth = stack.pop()
        if depth > config.MAX_AST_DEPTH:
            raise DslSyntaxError(f'expression deeper than {config.MAX_AST_DEPTH} operations', *node.pos)
        stack.extend((child, depth + 1) for child in _children(node))


class Parser:
    """Recursive-descent parser over a token list; one method per grammar rule."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.index = 0
        self.depth = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def peek(self, offset=1):
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self):
        token = self.current
        self.index += 1
        return token

    def error(self, expected):
        token = self.current
        found = 'end of input' if token.kind == 'END' else repr(token.text)
        raise DslSyntaxError(f'unexpected {found}', token.line, token.column, expected)

    def expect(self, kind):
        if self.current.kind != kind:
            self.error((kind,))
        return self.advance()

    def parse(self):
        node = self.expression()
        if self.current.kind != 'END':
            self.error(('+', '-', '*', '^', 'END'))
        _check_depth(node)
        return node

    def expression(self):
        node = self.term()
        while self.current.kind in ('+', '-'):
            token = self.advance()
            right = self.term()
            if token.kind == '-':
                right = Neg(right, pos=(token.line, token.column))
            node = Add(node, right, pos=(token.line, token.column))
        return node

    def term(self):
        node = self.unary()
        while self.current.kind == '*':
            token = self.advance()
            node = Mul(node, self.unary(), pos=(token.line, token.column))
        return node

    def unary(self):
        # Every open parenthesis, call and unary minus passes through here once
        if self.depth > config.MAX_NESTING:
            token = self.current
            raise DslSyntaxError(f'more than {config.MAX_NESTING} nested groups', token.line, token.column)
        self.depth += 1
        try:
            return self._unary()
        finally:
            self.depth -= 1

    def _unary(self):
        if self.current.kind == '-':
            token = self.advance()
            if self.current.kind == 'NUMBER' and self.peek().kind != '^':
                number = self.advance()
                return RationalLit(-self._rational(number), pos=(token.line, token.column))
            return Neg(self.unary(), pos=(token.line, token.column))
        return self.power()

    def power(self):
        node = self.primary()
        if self.current.kind == '^':
            token = self.advance()
            node = Pow(node, self.integer(), pos=(token.line, token.column))
        return node

    def integer(self):
        token = self.current
        if token.kind != 'NUMBER' or '/' in token.text:
            self.error(('INT',))
        self.advance()
        return int(token.text)

    @staticmethod
    def _rational(token):
        numerator, _, denominator = token.text.partition('/')
        if denominator and int(denominator) == 0:
            raise DslSyntaxError('zero denominator', token.line, token.column)
        return Fraction(int(numerator), int(denominator or 1))

    def primary(self):
        token = self.current
        pos = (token.line, token.column)
        if token.kind == 'NUMBER':
            self.advance()
            return RationalLit(self._rational(token), pos=pos)
        if token.kind == '(':
            self.advance()
            node = self.expression()
            self.expect(')')
            return node
        if token.kind == 'NAME':
            self.advance()
            if token.text not in FUNCTIONS:
                return ClassRef(token.text, pos=pos)
            self.expect('(')
            if token.text in ('push', 'pull'):
                morphism = self.expect('NAME').text
                self.expect(',')
                operand = self.expression()
                node = (Push if token.text == 'push' else Pull)(morphism, operand, pos=pos)
            elif token.text == 'c1':
                node = C1(self.expect('NAME').text, pos=pos)
            elif token.text == 'component':
                operand = self.expression()
                self.expect(',')
                node = Component(operand, self.integer(), pos=pos)
            else:
                node = (Exp if token.text == 'exp' else Integrate)(self.expression(), pos=pos)
            self.expect(')')
            return node
        self.error(('NUMBER', 'NAME', '(', '-'))


def parse(text, line=1, column=1):
    """
    Parses an expression.

    Parameters:
    text (str): Expression source.
    line (int, optional): Line of the first character, for expressions embedded in model files.
    column (int, optional): Column of the first character.

    Returns:
    Node: The AST.

    Raises:
    DslSyntaxError: With the position of the offending token and the set of acceptable tokens.
    """
    return Parser(tokenize(text, line, column)).parse()


# Formatter

_ADD, _MUL, _UNARY, _POWER, _ATOM = range(5)


def _level(node):
    if isinstance(node, Add):
        return _ADD
    if isinstance(node, Mul):
        return _MUL
    if isinstance(node, Neg) or (isinstance(node, RationalLit) and node.value < 0):
        return _UNARY
    if isinstance(node, Pow):
        return _POWER
    return _ATOM


def _wrap(node, minimum):
    text = format_ast(node)
    return f'({text})' if _level(node) < minimum else text


def _format_literal(value):
    return str(value.numerator) if value.denominator == 1 else f'{value.numerator}/{value.denominator}'


def format_ast(node):
    """Canonical text of an AST with minimal parentheses; parse(format_ast(node)) == node."""
    if isinstance(node, RationalLit):
        return _format_literal(node.value)
    if isinstance(node, ClassRef):
        return node.name
    if isinstance(node, Add):
        left = _wrap(node.left, _ADD)
        if isinstance(node.right, Neg):
            return f'{left} - {_wrap(node.right.operand, _MUL)}'
        return f'{left} + {_wrap(node.right, _MUL)}'
    if isinstance(node, Mul):
        return f'{_wrap(node.left, _MUL)} * {_wrap(node.right, _UNARY)}'
    if isinstance(node, Neg):
        operand = node.operand
        # "-2" and "-2^k" would read back as a folded literal
        if isinstance(operand, RationalLit) and operand.value >= 0:
            return f'-({format_ast(operand)})'
        if isinstance(operand, Pow) and isinstance(operand.base, RationalLit) and operand.base.value >= 0:
            return f'-({format_ast(operand)})'
        return f'-{_wrap(operand, _UNARY)}'
    if isinstance(node, Pow):
        base = node.base
        if isinstance(base, RationalLit) and base.value.denominator != 1:
            return f'({format_ast(base)})^{node.exponent}'
        return f'{_wrap(base, _ATOM)}^{node.exponent}'
    if isinstance(node, Exp):
        return f'exp({format_ast(node.operand)})'
    if isinstance(node, C1):
        return f'c1({node.bundle})'
    if isinstance(node, Push):
        return f'push({node.morphism}, {format_ast(node.operand)})'
    if isinstance(node, Pull):
        return f'pull({node.morphism}, {format_ast(node.operand)})'
    if isinstance(node, Integrate):
        return f'integrate({format_ast(node.operand)})'
    if isinstance(node, Component):
        return f'component({format_ast(node.operand)}, {node.codim})'
    raise TypeError(f'not an expression node: {node!r}')


_NAMES = ('x', 'y', 'z', 'L', 'theta_hat', 'f1', 'P_2')
_MORPHISMS = ('pi', 'p2', 'e')


def random_ast(rng, depth):
    """
    A random AST of depth at most ``depth`` drawn with a numpy Generator.
    """
    if depth <= 1 or rng.random() < 0.2:
        if rng.random() < 0.5:
            numerator = int(rng.integers(-9, 10))
            denominator = int(rng.integers(1, 5))
            return RationalLit(Fraction(numerator, denominator))
        return ClassRef(_NAMES[int(rng.integers(len(_NAMES)))])
    kind = int(rng.integers(11))
    child = depth - 1
    if kind == 0:
        return Add(random_ast(rng, child), random_ast(rng, child))
    if kind == 1:
        return Add(random_ast(rng, child), Neg(random_ast(rng, child)))
    if kind == 2:
        return Mul(random_ast(rng, child), random_ast(rng, child))
    if kind == 3:
        return Pow(random_ast(rng, child), int(rng.integers(0, 5)))
    if kind == 4:
        return Neg(random_ast(rng, child))
    if kind == 5:
        return Exp(random_ast(rng, child))
    if kind == 6:
        return C1(_NAMES[int(rng.integers(len(_NAMES)))])
    if kind in (7, 8):
        morphism = _MORPHISMS[int(rng.integers(len(_MORPHISMS)))]
        return (Push if kind == 7 else Pull)(morphism, random_ast(rng, child))
    if kind == 9:
        return Integrate(random_ast(rng, child))
    return Component(random_ast(rng, child), int(rng.integers(0, 4)))


# Evaluation

@dataclass(frozen=True)
class Environment:
    """
    Immutable snapshot of the names an expression may use.

    Class names resolve first, then basis symbols of ``default_ring``, then basis symbols that occur in exactly
    one of ``rings``. ``pending`` holds names declared later in a model file.
    """
    classes: Mapping = field(default_factory=dict)
    bundles: Mapping = field(default_factory=dict)
    morphisms: Mapping = field(default_factory=dict)
    rings: tuple = ()
    default_ring: Optional[object] = None
    pending: frozenset = frozenset()

    @classmethod
    def from_registry(cls, registry, default_ring=None, pending=frozenset()):
        return cls(
            classes=dict(registry.classes),
            bundles=dict(registry.bundles),
            morphisms=dict(registry.morphisms),
            rings=tuple(registry.rings.values()),
            default_ring=default_ring,
            pending=frozenset(pending),
        )

    def _missing(self, name, kind):
        if name in self.pending:
            return ForwardReference(name)
        return UnboundName(f'{kind} {name!r}')

    def resolve(self, name):
        if name in self.classes:
            return self.classes[name]
        if self.default_ring is not None and self.default_ring.has_symbol(name):
            return self.default_ring.basis_class(name)
        owners = {id(ring): ring for ring in self.rings if ring.has_symbol(name)}
        if len(owners) == 1:
            return next(iter(owners.values())).basis_class(name)
        if len(owners) > 1:
            names = ', '.join(sorted(ring.name for ring in owners.values()))
            raise UnboundName(f'{name!r} is ambiguous: basis symbol of {names}')
        raise self._missing(name, 'class')

    def bundle(self, name):
        if name in self.bundles:
            return self.bundles[name]
        raise self._missing(name, 'bundle')

    def morphism(self, name):
        if name in self.morphisms:
            return self.morphisms[name]
        raise self._missing(name, 'morphism')


def _as_class(value, ring):
    return value if isinstance(value, GradedClass) else value * ring.unit()


def _evaluate(node, env):
    if isinstance(node, RationalLit):
        return node.value
    if isinstance(node, ClassRef):
        return env.resolve(node.name)
    if isinstance(node, Add):
        left, right = evaluate(node.left, env), evaluate(node.right, env)
        if isinstance(left, GradedClass) or isinstance(right, GradedClass):
            ring = (left if isinstance(left, GradedClass) else right).ring
            return _as_class(left, ring) + _as_class(right, ring)
        return left + right
    if isinstance(node, Mul):
        return evaluate(node.left, env) * evaluate(node.right, env)
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        return power(base, node.exponent) if isinstance(base, GradedClass) else base ** node.exponent
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Exp):
        value = evaluate(node.operand, env)
        if not isinstance(value, GradedClass):
            raise UnsupportedModel('exp of a bare scalar has no ring')
        return exp_truncated(value)
    if isinstance(node, C1):
        return env.bundle(node.bundle)
    if isinstance(node, Push):
        morphism = env.morphism(node.morphism)
        return pushforward(morphism, _as_class(evaluate(node.operand, env), morphism.source))
    if isinstance(node, Pull):
        morphism = env.morphism(node.morphism)
        return pullback(morphism, _as_class(evaluate(node.operand, env), morphism.target))
    if isinstance(node, Integrate):
        value = evaluate(node.operand, env)
        if not isinstance(value, GradedClass):
            raise NoPointClass('integrate of a bare scalar has no ring')
        return integrate(value)
    if isinstance(node, Component):
        value = evaluate(node.operand, env)
        if isinstance(value, GradedClass):
            return component(value, node.codim)
        return value if node.codim == 0 else Fraction(0)
    raise TypeError(f'not an expression node: {node!r}')


def evaluate(node, env):
    """
    Evaluates an AST: a Fraction for integrate and scalar-only expressions, a GradedClass otherwise.

    Raises:
    EvaluationError: Wrapping UnboundName, RingMismatch, NonNilpotentInput and friends with the position of the
        innermost failing node. ForwardReference propagates unwrapped.
    """
    try:
        return _evaluate(node, env)
    except (EvaluationError, ForwardReference):
        raise
    except ChowError as e:
        raise EvaluationError(e, *node.pos) from e


def evaluate_text(text, env):
    return evaluate(parse(text), env)


# Model files

_IDENT = r'[A-Za-z_][A-Za-z0-9_]*'
_HEADERS = {
    'ring_table': re.compile(rf'ring\s+(?P<name>{_IDENT})\s+dim\s+(?P<dim>\d+)\s*$'),
    'ring_tensor': re.compile(rf'ring\s+(?P<name>{_IDENT})\s*=\s*tensor\s*\((?P<args>[^)]*)\)\s*$'),
    'morphism_table': re.compile(
        rf'morphism\s+(?P<name>{_IDENT})\s*:\s*(?P<source>{_IDENT})\s*->\s*(?P<target>{_IDENT})'
        rf'(?:\s+reldim\s+(?P<reldim>-?\d+))?\s*$'
    ),
    'morphism_derived': re.compile(
        rf'morphism\s+(?P<name>{_IDENT})\s*=\s*(?:(?P<op>tensor|compose|identity)\s*\((?P<args>[^)]*)\)'
        rf'|(?P<alias>{_IDENT}))\s*$'
    ),
    'class': re.compile(rf'(?P<kind>class|bundle)\s+(?P<name>{_IDENT})\s+on\s+(?P<ring>{_IDENT})\s*=\s*(?P<expr>.+)$'),
    'family': re.compile(rf'family\s+(?P<name>{_IDENT})\s*$'),
}
_HEADER_KEYWORDS = ('ring', 'morphism', 'class', 'bundle', 'family')
_BASIS = re.compile(r'basis\s+(?P<codim>\d+)\s*:\s*(?P<symbols>.*)$')
_PRODUCT = re.compile(rf'product\s+(?P<left>{_IDENT})\s*(?:\*\s*(?P<right>{_IDENT})|\^\s*2)\s*=\s*(?P<value>.+)$')
_POINT = re.compile(rf'point\s+(?P<symbol>{_IDENT})\s*$')
_TABLE = re.compile(rf'(?P<kind>pull|push)\s+(?P<symbol>{_IDENT})\s*=\s*(?P<value>.+)$')
_FAMILY_FIELD = re.compile(rf'(?P<key>{_IDENT})(?:\s*=\s*|\s+)(?P<value>\S.*)$')
_FAMILY_REQUIRED = ('total', 'base', 'proj', 'n', 'g', 'L', 'F', 'fiber', 'fiber_restrict')


def _linear_combination(node):
    """Reads a parsed LINCOMB (sums of rational multiples of symbols) as a dict symbol -> Fraction."""
    def terms(node, scale):
        if isinstance(node, RationalLit):
            if node.value != 0:
                raise DslSyntaxError('constant term in a linear combination', *node.pos)
            return []
        if isinstance(node, ClassRef):
            return [(node.name, scale)]
        if isinstance(node, Add):
            return terms(node.left, scale) + terms(node.right, scale)
        if isinstance(node, Neg):
            return terms(node.operand, -scale)
        if isinstance(node, Mul) and isinstance(node.left, RationalLit):
            return terms(node.right, scale * node.left.value)
        if isinstance(node, Mul) and isinstance(node.right, RationalLit):
            return terms(node.left, scale * node.right.value)
        raise DslSyntaxError('expected a linear combination of basis symbols', *node.pos)

    combination = {}
    for symbol, coefficient in terms(node, Fraction(1)):
        combination[symbol] = combination.get(symbol, Fraction(0)) + coefficient
    return {symbol: c for symbol, c in combination.items() if c}


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    match: re.Match
    body: list = field(default_factory=list)

    @property
    def header(self):
        return self.match.groupdict()

    def column(self, group):
        return self.match.start(group) + 1


def _split_args(text):
    return [arg.strip() for arg in text.split(',') if arg.strip()]


def _strip_comment(raw):
    return raw.split('#', 1)[0].rstrip()


def _read_blocks(text):
    """Groups the file into header lines and their indented bodies; body lines are (line, indent, text)."""
    blocks = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        if indent:
            if not blocks or blocks[-1].kind not in ('ring_table', 'morphism_table', 'family'):
                raise DslSyntaxError('indented line outside a ring, morphism or family block', number, indent + 1,
                                     _HEADER_KEYWORDS)
            blocks[-1].body.append((number, indent, line.strip()))
            continue
        for kind, pattern in _HEADERS.items():
            match = pattern.match(line)
            if match:
                blocks.append(_Block(kind, match.group('name'), number, match))
                break
        else:
            raise DslSyntaxError(f'cannot read declaration {line.strip()!r}', number, 1, _HEADER_KEYWORDS)
    return blocks


class ModelFileReader:
    """Single pass over a model file; each declaration may only use names declared above it."""

    def __init__(self, text):
        self.registry = Registry()
        self.blocks = _read_blocks(text)
        self.declared = {}
        for block in self.blocks:
            if block.name in self.declared:
                raise ValidationError(
                    f'{block.name!r} declared on line {self.declared[block.name]} and again'
                ).located(block.line)
            self.declared[block.name] = block.line

    def pending(self, block):
        return frozenset(name for name, line in self.declared.items() if line >= block.line)

    def lookup(self, kind, name):
        table = getattr(self.registry, kind)
        if name in table:
            return table[name]
        if name in self.declared:
            raise ForwardReference(f'{name!r} is declared on line {self.declared[name]}')
        raise UnknownModel(f'no {kind[:-1]} named {name!r}')

    def expression(self, block, text, line, column, default_ring):
        """Evaluates an expression to a class on ``default_ring``; bare scalars become multiples of the unit."""
        env = Environment.from_registry(self.registry, default_ring, self.pending(block))
        value = evaluate(parse(text, line, column), env)
        if not isinstance(value, GradedClass):
            value = value * default_ring.unit()
        if value.ring is not default_ring:
            raise ValidationError(f'{block.name} evaluates on {value.ring.name}, declared on {default_ring.name}')
        return value

    def read(self):
        for block in self.blocks:
            try:
                getattr(self, f'_read_{block.kind}')(block)
            except ChowError as e:
                raise e.located(block.line)
        registry = self.registry
        logger.info(
            f'Model file read: {len(registry.rings)} rings, {len(registry.morphisms)} morphisms, '
            f'{len(registry.families)} families, {len(registry.classes) + len(registry.bundles)} classes'
        )
        return registry

    def _read_ring_table(self, block):
        basis, products, point = {}, [], None
        for number, indent, line in block.body:
            try:
                if match := _BASIS.match(line):
                    codim = int(match.group('codim'))
                    if codim in basis:
                        raise ValidationError(f'{block.name}: codimension {codim} listed twice')
                    basis[codim] = re.findall(_IDENT, match.group('symbols'))
                elif match := _PRODUCT.match(line):
                    left = match.group('left')
                    right = match.group('right') or left
                    value = parse(match.group('value'), number, indent + match.start('value') + 1)
                    products.append((left, right, _linear_combination(value)))
                elif match := _POINT.match(line):
                    point = match.group('symbol')
                else:
                    raise DslSyntaxError(f'cannot read ring line {line!r}', number, indent + 1,
                                         ('basis', 'product', 'point'))
            except ChowError as e:
                raise e.located(number, indent + 1)
        ring = make_ring(block.name, int(block.header['dim']), basis, products, point_class=point)
        self.registry.add_ring(block.name, ring)

    def _read_ring_tensor(self, block):
        rings = [self.lookup('rings', name) for name in _split_args(block.header['args'])]
        if len(rings) < 2:
            raise ValidationError(f'{block.name}: tensor needs at least two rings')
        self.registry.add_ring(block.name, tensor_product(*rings)[0])

    def _read_morphism_table(self, block):
        source = self.lookup('rings', block.header['source'])
        target = self.lookup('rings', block.header['target'])
        tables = {'pull': {}, 'push': {}}
        for number, indent, line in block.body:
            match = _TABLE.match(line)
            if not match:
                raise DslSyntaxError(f'cannot read morphism line {line!r}', number, indent + 1, ('pull', 'push'))
            table = tables[match.group('kind')]
            if match.group('symbol') in table:
                raise ValidationError(f'{match.group("kind")} {match.group("symbol")} given twice').located(number)
            value = parse(match.group('value'), number, indent + match.start('value') + 1)
            table[match.group('symbol')] = _linear_combination(value)
        reldim = block.header.get('reldim')
        morphism = register_morphism(
            block.name, source, target, tables['pull'], tables['push'] or None,
            rel_dim=None if reldim is None else int(reldim),
        )
        self.registry.add_morphism(block.name, morphism)

    def _read_morphism_derived(self, block):
        header = block.header
        if header['alias']:
            morphism = self.lookup('morphisms', header['alias'])
        else:
            args = _split_args(header['args'])
            if header['op'] == 'identity':
                if len(args) != 1:
                    raise ValidationError('identity takes one ring')
                morphism = identity(self.lookup('rings', args[0]))
            elif header['op'] == 'compose':
                if len(args) != 2:
                    raise ValidationError('compose takes two morphisms')
                morphism = compose(*(self.lookup('morphisms', arg) for arg in args))
            else:
                morphism = tensor_morphism(*(self.lookup('morphisms', arg) for arg in args))
        self.registry.add_morphism(block.name, morphism)

    def _read_class(self, block):
        ring = self.lookup('rings', block.header['ring'])
        value = self.expression(block, block.header['expr'], block.line, block.column('expr'), ring)
        if block.header['kind'] == 'bundle':
            if not value.is_homogeneous(1):
                raise ValidationError(f'bundle {block.name} needs a codimension-1 first Chern class')
            self.registry.add_bundle(block.name, value)
        else:
            self.registry.add_class(block.name, value)

    def _read_family(self, block):
        fields = {}
        for number, indent, line in block.body:
            match = _FAMILY_FIELD.match(line)
            if not match:
                raise DslSyntaxError(f'cannot read family line {line!r}', number, indent + 1, _FAMILY_REQUIRED)
            fields[match.group('key')] = (match.group('value').strip(), number, indent + match.start('value') + 1)
        missing = [key for key in _FAMILY_REQUIRED if key not in fields]
        if missing:
            raise ValidationError(f'family {block.name} misses {", ".join(missing)}')
        unknown = set(fields) - set(_FAMILY_REQUIRED) - {'abelian', 'rank', 'trivial'}
        if unknown:
            raise ValidationError(f'family {block.name}: unknown fields {", ".join(sorted(unknown))}')

        total = self.lookup('rings', fields['total'][0])

        def integer(key):
            value, number, column = fields[key]
            if not re.fullmatch(r'\d+', value):
                raise DslSyntaxError(f'{key} must be a non-negative integer', number, column, ('INT',))
            return int(value)

        def flag(key, default):
            if key not in fields:
                return default
            value, number, column = fields[key]
            if value not in ('yes', 'no'):
                raise DslSyntaxError(f'{key} must be yes or no', number, column, ('yes', 'no'))
            return value == 'yes'

        def line_bundle(key):
            return self.expression(block, *fields[key], total)

        family = FamilyModel(
            name=block.name,
            total=total,
            base=self.lookup('rings', fields['base'][0]),
            proj=self.lookup('morphisms', fields['proj'][0]),
            n=integer('n'),
            g=integer('g'),
            cL=line_bundle('L'),
            cF=line_bundle('F'),
            fiber=self.lookup('rings', fields['fiber'][0]),
            fiber_restrict=self.lookup('morphisms', fields['fiber_restrict'][0]),
            abelian=flag('abelian', False),
            numerically_trivial=flag('trivial', True),
            rank=integer('rank') if 'rank' in fields else None,
        )
        self.registry.add_family(block.name, check_family(family))


def parse_model_file(text):
    """
    Reads a model file into a Registry of rings, morphisms, families, classes and bundles.

    Raises:
    DslSyntaxError, ValidationError, ForwardReference, UnknownModel: Located at the failing declaration.
    """
    return ModelFileReader(text).read()
