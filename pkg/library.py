"""
Built-in models: elliptic curves and their squares, the flagship family E x E^ -> E^ with its Poincare bundle,
the elliptic pair family, the projective line, and the global Picard package of the flagship family.

Coordinates on E^n follow one convention throughout: a divisor is the symmetric integer matrix of its hermitian
form, and a homomorphism E^m -> E^n is the n x m integer matrix acting on coordinates. E^ is identified with E.
"""
import functools

from exceptions import UnknownModel, UnsupportedModel
from geometry import (
    FamilyModel, PicardPackage, Registry, abelian_ring, abelian_structure, check_family, homomorphism, identity,
    point_inclusion, point_ring, pullback, register_morphism, tensor_morphism, tensor_power,
    truncated_polynomial_ring
)
from logger import logger
from ring_core import make_ring

FIBRE = [[1, 0], [0, 0]]
SECTION = [[0, 0], [0, 1]]
DIAGONAL = [[1, -1], [-1, 1]]


# Rings

@functools.lru_cache(maxsize=None)
def elliptic():
    return make_ring('elliptic', 1, {0: ['one'], 1: ['theta']}, {('theta', 'theta'): 0}, point_class='theta')


@functools.lru_cache(maxsize=None)
def elliptic_dual():
    return make_ring(
        'elliptic_dual', 1, {0: ['one'], 1: ['theta_hat']}, {('theta_hat', 'theta_hat'): 0}, point_class='theta_hat'
    )


@functools.lru_cache(maxsize=None)
def elliptic_square_ring():
    """
    E x E^: f1 = pt x E^, f2 = E x pt, delta the diagonal. Distinct curves among these meet once, each has
    self-intersection 0.
    """
    return make_ring(
        'elliptic_square', 2,
        {0: ['one'], 1: ['f1', 'f2', 'delta'], 2: ['pt']},
        {
            ('f1', 'f1'): 0, ('f2', 'f2'): 0, ('delta', 'delta'): 0,
            ('f1', 'f2'): 'pt', ('f1', 'delta'): 'pt', ('f2', 'delta'): 'pt',
        },
        point_class='pt',
    )


@functools.lru_cache(maxsize=None)
def projective_line():
    return truncated_polynomial_ring([('h', 1, 2)], 1, name='projective_line', point_class='h')


def jacobian_g2():
    return tensor_power(elliptic_dual(), 2)[0]


def elliptic_g2():
    return tensor_power(elliptic(), 2)[0]


def abelian_square(g):
    """Model of (E x E^)^g; for g = 1 the elliptic square itself."""
    if g == 1:
        return elliptic_square_ring()
    return tensor_power(elliptic_square_ring(), g)[0]


# Abelian structures (divisor matrices) on the hand-written rings

@functools.lru_cache(maxsize=None)
def elliptic_dual_model():
    return abelian_structure(elliptic_dual(), 1, {'theta_hat': [[1]]}, {'one': (), 'theta_hat': ('theta_hat',)})


@functools.lru_cache(maxsize=None)
def elliptic_square_model():
    return abelian_structure(
        elliptic_square_ring(), 2,
        {'f1': FIBRE, 'f2': SECTION, 'delta': DIAGONAL},
        {'one': (), 'f1': ('f1',), 'f2': ('f2',), 'delta': ('delta',), 'pt': ('f1', 'f2')},
    )


# Morphisms of the elliptic square

@functools.lru_cache(maxsize=None)
def _mult(r, name):
    ring = elliptic_square_ring()
    s = r * r
    return register_morphism(
        name, ring, ring,
        {'f1': 'f1', 'f2': {'f2': s}, 'delta': {'delta': r, 'f1': 1 - r, 'f2': s - r}, 'pt': {'pt': s}},
        {'one': {'one': s}, 'f1': {'f1': s}, 'f2': 'f2', 'delta': {'delta': r, 'f2': 1 - r, 'f1': s - r}, 'pt': 'pt'},
    )


def mult_r(r):
    """1 x [r] on E x E^, for any integer r."""
    return _mult(r, f'mult_{r}' if r >= 0 else f'mult_neg{-r}')


@functools.lru_cache(maxsize=None)
def _elliptic_square_morphisms():
    ring = elliptic_square_ring()
    e, e_hat = elliptic(), elliptic_dual()
    return {
        'p1': register_morphism(
            'p1', ring, e, {'theta': 'f1'}, {'f2': 'one', 'delta': 'one', 'pt': 'theta'}
        ),
        'p2': register_morphism(
            'p2', ring, e_hat, {'theta_hat': 'f2'}, {'f1': 'one', 'delta': 'one', 'pt': 'theta_hat'}
        ),
        # 0 x id and id x 0
        'e1': register_morphism(
            'e1', e_hat, ring, {'f2': 'theta_hat', 'delta': 'theta_hat'}, {'one': 'f1', 'theta_hat': 'pt'}
        ),
        'e2': register_morphism(
            'e2', e, ring, {'f1': 'theta', 'delta': 'theta'}, {'one': 'f2', 'theta': 'pt'}
        ),
        'diag': register_morphism(
            'diag', e, ring, {'f1': 'theta', 'f2': 'theta'}, {'one': 'delta', 'theta': 'pt'}
        ),
        'inv': _mult(-1, 'inv'),
    }


def elliptic_square():
    """
    The E x E^ model with its morphisms.

    Returns:
    tuple: (RingModel, dict) where the dict holds p1, p2, e1, e2, diag, inv and mult_r (a function of r).
    """
    morphisms = dict(_elliptic_square_morphisms())
    morphisms['mult_r'] = mult_r
    return elliptic_square_ring(), morphisms


def poincare_class(model):
    """
    c1 of the Poincare bundle: delta - f1 - f2 on the elliptic square, the external sum on its tensor powers.

    Raises:
    UnsupportedModel: For any other ring.
    """
    square = elliptic_square_ring()
    p = square.element({'delta': 1, 'f1': -1, 'f2': -1})
    if model is square:
        return p
    if model.factors and all(factor is square for factor in model.factors):
        power, *projections = tensor_power(square, len(model.factors))
        if power is model:
            return sum((pullback(pr, p) for pr in projections), model.zero())
    raise UnsupportedModel(f'no Poincare class on {model.name}')


@functools.lru_cache(maxsize=None)
def multiplication_map(r, dual=True):
    """[r] on a single elliptic curve: [r]^* theta = r^2 theta, [r]_* 1 = r^2."""
    ring = elliptic_dual() if dual else elliptic()
    s = r * r
    name = f'{"dual_" if dual else ""}mult_{r}' if r >= 0 else f'{"dual_" if dual else ""}mult_neg{-r}'
    return register_morphism(
        name, ring, ring, {ring.point_class: {ring.point_class: s}},
        {'one': {'one': s}, ring.point_class: ring.point_class},
    )


# The flagship family and its global Picard package

@functools.lru_cache(maxsize=None)
def flagship_universal():
    """E x J^ x S with J^ = S = E^; coordinates (E, J, S)."""
    return abelian_ring('flagship_universal', 3, {
        'fE': [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
        'fJ': [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
        'fS': [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
        'dEJ': [[1, -1, 0], [-1, 1, 0], [0, 0, 0]],
        'dES': [[1, 0, -1], [0, 0, 0], [-1, 0, 1]],
        'dJS': [[0, 0, 0], [0, 1, -1], [0, -1, 1]],
    })


@functools.lru_cache(maxsize=None)
def flagship_jacobian():
    """The relative Jacobian J^ x S over S; coordinates (J, S)."""
    return abelian_ring('flagship_jacobian', 2, {'thJ': FIBRE, 'thS': SECTION, 'dJS': DIAGONAL})


@functools.lru_cache(maxsize=None)
def flagship_package():
    universal, jacobian = flagship_universal(), flagship_jacobian()
    base, square = elliptic_dual_model(), elliptic_square_model()
    g = universal.generator_classes
    return PicardPackage(
        name='flagship_package',
        product=universal.ring,
        p1=homomorphism('pkg_p1', universal, square, [[1, 0, 0], [0, 0, 1]]),
        p2=homomorphism('pkg_p2', universal, jacobian, [[0, 1, 0], [0, 0, 1]]),
        # Universal bundle: the Poincare bundle of E x J^, rigidified along 0 x J^
        cU=g['dEJ'] - g['fE'] - g['fJ'],
        cF=elliptic_square_ring().basis_class('f1'),
        jacobian=jacobian.ring,
        zero_section=homomorphism('zero_section', base, jacobian, [[0], [1]]),
        inversion=homomorphism('jac_inv', jacobian, jacobian, [[-1, 0], [0, 1]]),
        fibre_inclusion=homomorphism('jac_fibre', base, jacobian, [[1], [0]]),
        jacobian_proj=homomorphism('jac_proj', jacobian, base, [[0, 1]]),
        # s -> (s, s): the point of J^ classifying P restricted to E x {s}
        section=homomorphism('sigma', base, jacobian, [[1], [1]]),
    )


@functools.lru_cache(maxsize=None)
def flagship_family():
    ring, morphisms = elliptic_square()
    return check_family(FamilyModel(
        name='flagship_family',
        total=ring,
        base=elliptic_dual(),
        proj=morphisms['p2'],
        n=1,
        g=1,
        cL=poincare_class(ring),
        cF=ring.basis_class('f1'),
        fiber=elliptic(),
        fiber_restrict=morphisms['e2'],
        abelian=True,
        package=flagship_package(),
    ))


@functools.lru_cache(maxsize=None)
def elliptic_pair_family():
    """The external square of the flagship family: (E x E^)^2 -> (E^)^2 with n = g = 2."""
    morphisms = _elliptic_square_morphisms()
    total, pr_1, pr_2 = tensor_power(elliptic_square_ring(), 2)
    fibre = elliptic_g2()
    jacobian = jacobian_g2()
    square_f1 = elliptic_square_ring().basis_class('f1')
    cL = poincare_class(total)
    inversion = multiplication_map(-1)
    package = PicardPackage(
        name='elliptic_pair_package',
        product=total,
        p1=tensor_morphism(morphisms['p1'], morphisms['p1']),
        p2=tensor_morphism(morphisms['p2'], morphisms['p2']),
        cU=cL,
        cF=fibre.basis_class('theta_1') + fibre.basis_class('theta_2'),
        jacobian=jacobian,
        zero_section=point_inclusion(jacobian, 'pair_zero_section'),
        inversion=tensor_morphism(inversion, inversion),
        fibre_inclusion=identity(jacobian),
    )
    return check_family(FamilyModel(
        name='elliptic_pair_family',
        total=total,
        base=jacobian,
        proj=tensor_morphism(morphisms['p2'], morphisms['p2']),
        n=2,
        g=2,
        cL=cL,
        cF=pullback(pr_1, square_f1) + pullback(pr_2, square_f1),
        fiber=fibre,
        fiber_restrict=tensor_morphism(morphisms['e2'], morphisms['e2']),
        abelian=True,
        package=package,
    ))


@functools.lru_cache(maxsize=None)
def projective_line_proj():
    return register_morphism('projective_line_proj', projective_line(), point_ring(), {}, {'h': 'one'})


@functools.lru_cache(maxsize=None)
def projective_line_family():
    ring = projective_line()
    return check_family(FamilyModel(
        name='projective_line_family',
        total=ring,
        base=point_ring(),
        proj=projective_line_proj(),
        n=1,
        g=0,
        cL=ring.zero(),
        cF=ring.basis_class('h'),
        fiber=ring,
        fiber_restrict=identity(ring),
    ))


def families():
    return {
        'flagship_family': flagship_family(),
        'elliptic_pair_family': elliptic_pair_family(),
        'projective_line_family': projective_line_family(),
    }


def curve_families():
    return {name: family for name, family in families().items() if family.n == 1}


# Catalog

def rings():
    return {
        'point': point_ring(),
        'elliptic': elliptic(),
        'elliptic_dual': elliptic_dual(),
        'elliptic_square': elliptic_square_ring(),
        'elliptic_g2': elliptic_g2(),
        'jacobian_g2': jacobian_g2(),
        'abelian_square_g2': abelian_square(2),
        'abelian_square_g3': abelian_square(3),
        'projective_line': projective_line(),
        'flagship_universal': flagship_universal().ring,
        'flagship_jacobian': flagship_jacobian().ring,
    }


def morphisms():
    package = flagship_package()
    result = dict(_elliptic_square_morphisms())
    for r in (2, 3, 5):
        result[f'mult_{r}'] = mult_r(r)
    pair = elliptic_pair_family()
    result.update({
        'pair_proj': pair.proj,
        'pair_p1': pair.package.p1,
        'pair_inv': pair.package.inversion,
        'pkg_p1': package.p1,
        'pkg_p2': package.p2,
        'zero_section': package.zero_section,
        'sigma': package.section,
        'jac_inv': package.inversion,
        'jac_fibre': package.fibre_inclusion,
        'jac_proj': package.jacobian_proj,
        'projective_line_proj': projective_line_proj(),
    })
    return result


def builtin_registry():
    """
    A fresh Registry holding every built-in ring, morphism and family, plus the bundles P (on the elliptic square),
    P_pair (on its square) and U (the flagship universal bundle).
    """
    registry = Registry()
    for name, ring in rings().items():
        registry.add_ring(name, ring)
    for name, morphism in morphisms().items():
        registry.add_morphism(name, morphism)
    for name, family in families().items():
        registry.add_family(name, family)
    registry.add_bundle('P', poincare_class(elliptic_square_ring()))
    registry.add_bundle('P_pair', poincare_class(abelian_square(2)))
    registry.add_bundle('U', flagship_package().cU)
    return registry


def catalog():
    """One row per built-in ring, morphism and family."""
    entries = []
    for name, ring in rings().items():
        entries.append({
            'name': name, 'kind': 'ring', 'dimension': ring.dimension, 'basis_size': ring.size,
            'summary': f'point class {ring.point_class}' if ring.point_class else 'no point class',
        })
    for name, morphism in morphisms().items():
        entries.append({
            'name': name, 'kind': 'morphism', 'dimension': morphism.rel_dim, 'basis_size': morphism.source.size,
            'summary': f'{morphism.source.name} -> {morphism.target.name}',
        })
    for name, family in families().items():
        entries.append({
            'name': name, 'kind': 'family', 'dimension': family.n, 'basis_size': family.total.size,
            'summary': f'{family.total.name} -> {family.base.name}, n={family.n}, g={family.g}',
        })
    return entries


def describe(name):
    """
    Full description of a built-in model.

    Raises:
    UnknownModel: If nothing is registered under ``name``.
    """
    registry = builtin_registry()
    if name in registry.rings:
        ring = registry.rings[name]
        related = {
            m_name: m.to_dict() for m_name, m in registry.morphisms.items() if ring in (m.source, m.target)
        }
        return {'kind': 'ring', 'ring': ring.to_dict(), 'morphisms': related}
    if name in registry.morphisms:
        return {'kind': 'morphism', 'morphism': registry.morphisms[name].to_dict()}
    if name in registry.families:
        family = registry.families[name]
        return {
            'kind': 'family',
            'family': {
                **family.digest(),
                'proj': family.proj.name,
                'fiber': family.fiber.name,
                'abelian': family.abelian,
                'cL': str(family.cL),
                'cF': str(family.cF),
                'package': family.package.name if family.package else None,
            },
        }
    logger.warning(f'describe: unknown model {name!r}')
    raise UnknownModel(name)
