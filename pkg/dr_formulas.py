import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from abelian import polarization_rank
from exceptions import (
    InvalidGenus, InvalidRank, InvalidScalingFactor, NotACurveFamily, NotAbelianFamily, PreconditionError,
    RingMismatch, UnsupportedModel
)
from geometry import external_product, pullback, pushforward, truncated_polynomial_ring
from logger import logger
from ring_core import integrate, mul, power
from util import binomial, format_rational

FORMULAS = ('main', 'abelian', 'hain', 'albanese')
PRODUCT_VARIANTS = ('canonical', 'sections')


@dataclass(frozen=True, eq=False)
class DrResult:
    """A DR cycle on the base model, the formula that produced it and what went in."""
    value: object
    formula_used: str
    inputs_digest: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'formula': self.formula_used,
            'inputs': dict(self.inputs_digest),
            'class': self.value.to_dict(),
        }

    def __str__(self):
        return str(self.value)


def _warn_if_degenerate(family, formula):
    if family.g >= 1 and family.cL.is_zero():
        logger.warning(
            f'{family.name}: c1(L) = 0, {formula} returns the virtual class 0 although L is trivial on every fibre'
        )


def e_class(family, cU, p1, p2, cF=None):
    """
    E = -p2_*(c1(U)^2 . p1^* c1(F)^{n-1}) on the Jacobian side.

    Parameters:
    family (FamilyModel): Supplies n and, unless ``cF`` is given, c1(F).
    cU (GradedClass): c1 of the universal bundle on the model of X x_S J.
    p1 (Morphism): Projection to the X side.
    p2 (Morphism): Projection to the Jacobian side.
    cF (GradedClass, optional): c1(F) on p1's target, for packages built over a fibre of X.

    Returns:
    GradedClass: The class E.
    """
    if family.n < 1:
        raise PreconditionError(f'{family.name}: E needs n >= 1')
    cF = family.cF if cF is None else cF
    if cU.ring is not p1.source or p1.source is not p2.source:
        raise RingMismatch(f'c1(U) on {cU.ring.name}, projections from {p1.source.name} and {p2.source.name}')
    return -pushforward(p2, mul(power(cU, 2), power(pullback(p1, cF), family.n - 1)))


def package_e_class(family):
    package = family.package
    if package is None:
        raise UnsupportedModel(f'{family.name} carries no Picard package')
    return e_class(family, package.cU, package.p1, package.p2, cF=package.cF)


def family_rank(family):
    """
    The rank d for dr_main: 1 when g = 0, the declared rank if any, otherwise the polarization rank of E on a
    Jacobian fibre of the family's Picard package.
    """
    if family.g == 0:
        return 1
    if family.rank is not None:
        return family.rank
    package = family.package
    if package is None:
        raise UnsupportedModel(f'{family.name}: no Picard package and no declared rank')
    E_fibre = pullback(package.fibre_inclusion, package_e_class(family))
    return polarization_rank(package.fibre, E_fibre, family.g)


def _check_rank(family, d):
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InvalidRank(f'd = {d!r}')
    if family.g == 0 and d != 1:
        raise InvalidRank(f'{family.name}: g = 0 forces d = 1, got {d}')


def dr_main(family, d=None):
    """
    DR(L) = (1/d) (-pi_*(c1(L)^2 . c1(F)^{n-1}))^g / g!.

    Parameters:
    family (FamilyModel): The family.
    d (int, optional): Rank of the polarizing bundle; computed with family_rank when omitted.

    Returns:
    DrResult: Codimension-g class on the base.
    """
    if d is None:
        d = family_rank(family)
    _check_rank(family, d)
    _warn_if_degenerate(family, 'dr_main')
    x = -pushforward(family.proj, mul(power(family.cL, 2), power(family.cF, family.n - 1)))
    value = power(x, family.g) / (math.factorial(family.g) * d)
    return DrResult(value, 'main', {**family.digest(), 'd': d})


def dr_abelian(family, g=None):
    """DR(L) = (-1)^g pi_*(c1(L)^{2g}) / (2g)! for abelian fibres."""
    if not family.abelian:
        raise NotAbelianFamily(family.name)
    g = family.g if g is None else g
    _warn_if_degenerate(family, 'dr_abelian')
    value = (-1) ** g * pushforward(family.proj, power(family.cL, 2 * g)) / math.factorial(2 * g)
    return DrResult(value, 'abelian', {**family.digest(), 'g': g})


def dr_hain(family):
    """DR(L) = (-1/2 pi_*(c1(L)^2))^g / g! for families of curves."""
    if family.n != 1:
        raise NotACurveFamily(f'{family.name} has n = {family.n}')
    _warn_if_degenerate(family, 'dr_hain')
    x = Fraction(-1, 2) * pushforward(family.proj, power(family.cL, 2))
    value = power(x, family.g) / math.factorial(family.g)
    return DrResult(value, 'hain', family.digest())


def dr_albanese(alb_model, pi_bar, cLbar, g):
    """DR(L) = (-1)^g pi_bar_*(c1(Lbar)^{2g}) / (2g)! through the Albanese torsor."""
    if cLbar.ring is not alb_model or pi_bar.source is not alb_model:
        raise RingMismatch(f'c1(Lbar) on {cLbar.ring.name}, pi_bar from {pi_bar.source.name}, Alb {alb_model.name}')
    value = (-1) ** g * pushforward(pi_bar, power(cLbar, 2 * g)) / math.factorial(2 * g)
    return DrResult(value, 'albanese', {'albanese': alb_model.name, 'pi_bar': pi_bar.name, 'g': g})


def dr_albanese_family(family):
    """dr_albanese for a family with abelian fibres, which is its own Albanese torsor."""
    if not family.abelian:
        raise NotAbelianFamily(family.name)
    result = dr_albanese(family.total, family.proj, family.cL, family.g)
    return DrResult(result.value, 'albanese', {**family.digest(), **result.inputs_digest})


def dr(family, formula, d=None):
    """Routes to one of FORMULAS by name."""
    if formula == 'main':
        return dr_main(family, d)
    if formula == 'abelian':
        return dr_abelian(family)
    if formula == 'hain':
        return dr_hain(family)
    if formula == 'albanese':
        return dr_albanese_family(family)
    raise ValueError(f'unknown formula {formula!r}, expected one of {FORMULAS}')


def dr_via_sections(family):
    """
    DR(L) = sigma^* e computed directly from the global Picard package: e = e_*(1) on J, sigma the section of J
    given by L.
    """
    package = family.package
    if package is None or package.section is None:
        raise UnsupportedModel(f'{family.name} has no global Picard package with a section')
    if package.section.source is not family.base:
        raise RingMismatch(f'section {package.section.name} does not start at {family.base.name}')
    e = pushforward(package.zero_section, package.zero_section.source.unit())
    return DrResult(pullback(package.section, e), 'sections', family.digest())


def dr_scaling_check(family, d, r):
    """DR(L^r) = r^{2g} DR(L) through dr_main."""
    if r < 0:
        raise InvalidScalingFactor(r)
    scaled = dr_main(family.with_line_bundle(r * family.cL), d).value
    return scaled == r ** (2 * family.g) * dr_main(family, d).value


def check_multiplicativity(product_family, factor_families):
    """DR of a product family equals the external product of the factor DR cycles."""
    factors = [dr_main(family).value for family in factor_families]
    return dr_main(product_family).value == external_product(factors)


# Product of two curve families

def dr_product_constant(g1, g2, variant='canonical'):
    """
    Closed-form constant in front of (-pi_*(c1(L)^2 . c1(F)))^{g1+g2}/(g1+g2)! for a product of two curves.

    canonical (F = omega, needs g1, g2 >= 2): 1 / (2^{g1+g2} (2g1-2)^{g2} (2g2-2)^{g1}).
    sections (F of fibre degree one on each factor, any g1, g2 >= 0): 1 / 2^{g1+g2}.
    """
    _check_product_genera(g1, g2, variant)
    g = g1 + g2
    if variant == 'sections':
        return Fraction(1, 2 ** g)
    return Fraction(1, 2 ** g * (2 * g1 - 2) ** g2 * (2 * g2 - 2) ** g1)


def _check_product_genera(g1, g2, variant):
    if variant not in PRODUCT_VARIANTS:
        raise ValueError(f'unknown variant {variant!r}, expected one of {PRODUCT_VARIANTS}')
    lowest = 2 if variant == 'canonical' else 0
    for gi in (g1, g2):
        if isinstance(gi, bool) or not isinstance(gi, int) or gi < lowest:
            raise InvalidGenus(f'{variant} variant needs genera >= {lowest}, got ({g1}, {g2})')


@functools.lru_cache(maxsize=None)
def product_ring(g1, g2):
    """
    Q[a1, a2] / (a1^{g1+1}, a2^{g2+1}) where a_i stands for pi_{i*} L_i^2; variables with g_i = 0 are absent.
    """
    variables = [(name, 1, gi + 1) for name, gi in (('a1', g1), ('a2', g2)) if gi]
    top = '*'.join(name if gi == 1 else f'{name}^{gi}' for name, gi in (('a1', g1), ('a2', g2)) if gi) or 'one'
    return truncated_polynomial_ring(variables, g1 + g2, name=f'product_{g1}_{g2}', point_class=top)


def _variable(ring, name, gi):
    return ring.basis_class(name) if gi else ring.zero()


def product_expansion(g1, g2, variant='canonical'):
    """
    The linear form whose (g1+g2)-th power is expanded, and that power, in product_ring(g1, g2).

    canonical: (2g2-2) a1 + (2g1-2) a2, the pushforward pi_*(c1(L)^2 . c1(omega));
    sections: a1 + a2.
    """
    _check_product_genera(g1, g2, variant)
    ring = product_ring(g1, g2)
    a1, a2 = _variable(ring, 'a1', g1), _variable(ring, 'a2', g2)
    if variant == 'canonical':
        linear = (2 * g2 - 2) * a1 + (2 * g1 - 2) * a2
    else:
        linear = a1 + a2
    return linear, power(linear, g1 + g2)


def product_expansion_check(g1, g2, variant='canonical'):
    """
    Checks the binomial expansion in the truncated ring and derives the DR constant from it.

    The DR cycle of the product is the product of the two curve DR cycles, (-a1/2)^{g1}/g1! . (-a2/2)^{g2}/g2!;
    dividing its degree by the degree of (-linear)^g/g! gives the constant.

    Returns:
    tuple: (bool, Fraction) whether the expansion equals binom(g, g1) c1^{g1} c2^{g2} a1^{g1} a2^{g2} with
        (c1, c2) the linear form's coefficients, and the derived constant.
    """
    linear, expanded = product_expansion(g1, g2, variant)
    ring = linear.ring
    g = g1 + g2
    c1, c2 = (2 * g2 - 2, 2 * g1 - 2) if variant == 'canonical' else (1, 1)
    expected = binomial(g, g1) * c1 ** g1 * c2 ** g2 * ring.point()
    ok = expanded == expected

    a1, a2 = _variable(ring, 'a1', g1), _variable(ring, 'a2', g2)
    dr_product = mul(
        power(Fraction(-1, 2) * a1, g1) / math.factorial(g1),
        power(Fraction(-1, 2) * a2, g2) / math.factorial(g2),
    )
    main_shape = power(-linear, g) / math.factorial(g)
    denominator = integrate(main_shape)
    if denominator == 0:
        raise UnsupportedModel(f'({g1}, {g2}): the {variant} expansion vanishes')
    derived = integrate(dr_product) / denominator
    logger.debug(f'product ({g1}, {g2}) {variant}: expansion ok={ok}, constant {format_rational(derived)}')
    return ok, derived
