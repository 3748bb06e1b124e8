import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from exceptions import InvalidGenus, InvalidRank, NotPositiveInteger, RingMismatch, UnsupportedModel
from geometry import Morphism, point_inclusion, pullback, pushforward, tensor_morphism, tensor_power
from library import (
    abelian_square, elliptic, elliptic_dual, elliptic_square, multiplication_map, mult_r, poincare_class
)
from logger import logger
from ring_core import GradedClass, RingModel, exp_truncated, integrate, mul, power


@dataclass(frozen=True, eq=False)
class AbelianModelPair:
    """
    Model of A x Â for A = E^g with the Poincare class, both projections and both zero sections.

    ``zero_section_a`` and ``zero_section_dual`` are inclusions of the point; ``mult`` on the product side is
    1 x [r], ``dual_mult`` is [r] on Â.
    """
    g: int
    product_model: RingModel
    p1: Morphism
    p2: Morphism
    poincare: GradedClass
    zero_section_a: Morphism
    zero_section_dual: Morphism

    @property
    def a_side(self):
        return self.p1.target

    @property
    def dual_side(self):
        return self.p2.target

    def dual_mult(self, r):
        return _power_morphism(multiplication_map(r), self.g)

    def mult(self, r):
        return _power_morphism(mult_r(r), self.g)


def _power_morphism(morphism, g):
    return morphism if g == 1 else tensor_morphism(*([morphism] * g))


@functools.lru_cache(maxsize=None)
def abelian_pair(g):
    """
    The AbelianModelPair for g >= 1: the elliptic square for g = 1, its g-th tensor power otherwise.

    Raises:
    InvalidGenus: If g < 1.
    """
    if not isinstance(g, int) or g < 1:
        raise InvalidGenus(f'abelian pairs need g >= 1, got {g}')
    _, morphisms = elliptic_square()
    a_side = elliptic() if g == 1 else tensor_power(elliptic(), g)[0]
    dual_side = elliptic_dual() if g == 1 else tensor_power(elliptic_dual(), g)[0]
    product = abelian_square(g)
    pair = AbelianModelPair(
        g=g,
        product_model=product,
        p1=_power_morphism(morphisms['p1'], g),
        p2=_power_morphism(morphisms['p2'], g),
        poincare=poincare_class(product),
        zero_section_a=point_inclusion(a_side, f'zero_a_g{g}'),
        zero_section_dual=point_inclusion(dual_side, f'zero_dual_g{g}'),
    )
    logger.debug(f'Abelian pair g={g}: {product.size} basis elements')
    return pair


def zero_section_class(morphism):
    """e_*(1): the class of the image of a section."""
    return pushforward(morphism, morphism.source.unit())


def fourier(pair, z):
    """
    Fourier transform z -> p2_*(exp(c1 P) . p1^* z) from the A side to the dual side.

    Parameters:
    pair (AbelianModelPair): The model of A x Â.
    z (GradedClass): A class on A.

    Returns:
    GradedClass: A class on Â.
    """
    if z.ring is not pair.a_side:
        raise RingMismatch(f'Fourier transform expects a class on {pair.a_side.name}, got {z.ring.name}')
    return pushforward(pair.p2, mul(exp_truncated(pair.poincare), pullback(pair.p1, z)))


def check_fourier_zero_section(pair):
    """(-1)^g F(1_A) equals the zero-section class of Â."""
    transformed = fourier(pair, pair.a_side.unit())
    return (-1) ** pair.g * transformed == zero_section_class(pair.zero_section_dual)


def check_fourier_point(pair):
    """F(e_A) equals the fundamental class of Â."""
    return fourier(pair, zero_section_class(pair.zero_section_a)) == pair.dual_side.unit()


def check_scaling(pair, r):
    """[r]^* e = r^{2g} e on the dual side."""
    e = zero_section_class(pair.zero_section_dual)
    return pullback(pair.dual_mult(r), e) == r ** (2 * pair.g) * e


def _check_rank_argument(d):
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InvalidRank(f'd = {d!r}')


def _zero_class(model, zero_class):
    if zero_class is not None:
        if zero_class.ring is not model:
            raise RingMismatch(f'zero-section class lives on {zero_class.ring.name}, expected {model.name}')
        return zero_class
    return model.point()


def poincare_formula_check(model, E_class, g, d, zero_class=None):
    """
    Checks E^g = g! d e and E^{g+1} = 0.

    Parameters:
    model (RingModel): The Jacobian model carrying E.
    E_class (GradedClass): Codimension-1 class on ``model``.
    g (int): Relative dimension.
    d (int): Candidate rank, positive.
    zero_class (GradedClass, optional): Class of the zero section; the point class when omitted.

    Returns:
    bool: Whether both identities hold exactly.
    """
    _check_rank_argument(d)
    if E_class.ring is not model:
        raise RingMismatch(f'{E_class.ring.name} vs {model.name}')
    e = _zero_class(model, zero_class)
    return (
        power(E_class, g) == math.factorial(g) * d * e
        and power(E_class, g + 1).is_zero()
    )


def polarization_rank(fiber_model, E_fiber, g):
    """
    d = deg(E^g) / g! on a g-dimensional fibre model.

    Raises:
    NotPositiveInteger: If the value is not a positive integer, so E is not a polarization of the model.
    """
    if E_fiber.ring is not fiber_model:
        raise RingMismatch(f'{E_fiber.ring.name} vs {fiber_model.name}')
    value = integrate(power(E_fiber, g)) / math.factorial(g)
    if value.denominator != 1 or value <= 0:
        raise NotPositiveInteger(f'deg(E^{g})/{g}! = {value}')
    return int(value)


def rank_by_poincare(model, E_class, g, zero_class=None):
    """
    The unique d for which poincare_formula_check passes.

    Raises:
    NotPositiveInteger: When E^g is not a positive integral multiple of g! e or E^{g+1} does not vanish.
    """
    e = _zero_class(model, zero_class)
    top = power(E_class, g)
    ratios = {top.coefficients.get(key, Fraction(0)) / c for key, c in e.coefficients.items()}
    if not ratios:
        raise UnsupportedModel('zero-section class is zero')
    if len(ratios) > 1:
        raise NotPositiveInteger(f'E^{g} is not proportional to the zero-section class in {model.name}')
    d = ratios.pop() / math.factorial(g)
    if d.denominator != 1 or d <= 0 or not poincare_formula_check(model, E_class, g, int(d), e):
        raise NotPositiveInteger(f'E^{g} is not a positive multiple of {g}! e in {model.name}')
    return int(d)


def check_symmetric(model, E_class, inv):
    """[-1]^* E = E."""
    if E_class.ring is not model or inv.target is not model:
        raise RingMismatch(f'inversion {inv.name} and E must live on {model.name}')
    return pullback(inv, E_class) == E_class


def check_rigidified(model, E_class, e_section):
    """e^* E = 0."""
    if E_class.ring is not model or e_section.target is not model:
        raise RingMismatch(f'section {e_section.name} and E must live on {model.name}')
    return pullback(e_section, E_class).is_zero()
