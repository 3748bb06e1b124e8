import math
from fractions import Fraction

import numpy as np
import sympy

import config
from ring_core import GradedClass

ANSI = {'green': '\033[32m', 'red': '\033[31m', 'bold': '\033[1m', 'reset': '\033[0m'}


def format_rational(value):
    """Exact text form of a rational: ``3``, ``-1/2``."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f'{value.numerator}/{value.denominator}'


def to_sympy(value):
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value):
    """
    Converts an exact sympy number back to a Fraction.

    Parameters:
    value (sympy.Rational): An exact rational, as produced by sympy's exact linear algebra.

    Returns:
    Fraction: The same number.
    """
    value = sympy.sympify(value)
    if not value.is_Rational:
        raise ValueError(f'{value} is not rational')
    return Fraction(int(value.p), int(value.q))


def binomial(n, k):
    return math.comb(n, k)


def colour(text, name, enabled=None):
    enabled = config.COLOR if enabled is None else enabled
    if not enabled:
        return text
    return f'{ANSI[name]}{text}{ANSI["reset"]}'


def make_rng(seed=config.RANDOM_SEED):
    return np.random.default_rng(seed)


def random_rational(rng, max_numerator=5, max_denominator=4):
    numerator = int(rng.integers(-max_numerator, max_numerator + 1))
    denominator = int(rng.integers(1, max_denominator + 1))
    return Fraction(numerator, denominator)


def random_class(ring, rng, density=0.4):
    """
    Draws a random sparse class on a ring.

    Parameters:
    ring (RingModel): The ring to draw from.
    rng (np.random.Generator): Seeded generator, see make_rng.
    density (float, optional): Probability that a given basis element receives a coefficient. Default is 0.4.

    Returns:
    GradedClass: A class with small random rational coefficients.
    """
    keys = ring.keys()
    mask = rng.random(len(keys)) < density
    return GradedClass(ring, {key: random_rational(rng) for key, chosen in zip(keys, mask) if chosen})
