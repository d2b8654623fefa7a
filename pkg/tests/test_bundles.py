"""
Tests for bundles.py.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import booleans, integers

import tests
from groupoid_cocycles import bundles, groupoid_core
from groupoid_cocycles.bundles import BundleAxiom
from groupoid_cocycles.utils import (
    BundleMorphismError,
    ConstructionError,
    GroupoidFormatError,
)


@settings(deadline=None, max_examples=30)
@given(integers(min_value=0, max_value=2**32), booleans())
def test_random_bundle(seed, real):
    """
    Test that random bundles and coboundaries are valid.
    """
    rng = np.random.default_rng(seed)
    for groupoid in tests.standard_groupoids():
        bundle = bundles.random_bundle(groupoid, rng, max_dim=3, real=real)
        assert bundle.is_real is real
        assert bundles.validate_bundle(bundle).ok
        unit_section = bundles.random_section(bundle, rng, over=bundles.UNITS)
        cocycle = bundles.coboundary(bundle, unit_section)
        assert bundles.validate_cocycle(bundle, cocycle).ok


@pytest.mark.parametrize("groupoid", tests.standard_groupoids())
def test_regular_and_trivial_bundles(groupoid):
    """
    Test regular and trivial bundles.
    """
    regular = bundles.regular_bundle(groupoid)
    assert bundles.validate_bundle(regular).ok
    for unit in range(groupoid.n_units):
        assert regular.dims[unit] == len(groupoid.range_fiber(unit))
    trivial = bundles.trivial_bundle(groupoid, dim=2, real=True)
    assert bundles.validate_bundle(trivial).ok
    total = bundles.direct_sum_bundle(regular, trivial.complexified())
    product = bundles.tensor_bundle(regular, trivial)
    assert bundles.validate_bundle(total).ok
    assert bundles.validate_bundle(product).ok
    assert np.array_equal(total.dims, regular.dims + 2)
    assert np.array_equal(product.dims, regular.dims * 2)


def test_validate_bundle_broken(fix_rng):
    """
    Test that a scaled matrix breaks unitarity and functoriality.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    bundle = bundles.random_bundle(groupoid, fix_rng, max_dim=2)
    matrices = list(bundle.matrices)
    matrices[1] = 2 * matrices[1]
    broken = bundles.GHilbertBundle(
        groupoid=groupoid, dims=bundle.dims, matrices=tuple(matrices)
    )
    axioms = bundles.validate_bundle(broken).axioms()
    assert BundleAxiom.UNITARITY in axioms
    assert BundleAxiom.FUNCTORIALITY in axioms


def test_validate_cocycle_broken(fix_rng):
    """
    Test that a cocycle with a value at a unit is reported.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    bundle = bundles.trivial_bundle(groupoid, dim=1)
    cocycle = bundles.zero_section(bundle)
    cocycle[groupoid.unit_arrow[0]] = 1.0
    axioms = bundles.validate_cocycle(bundle, cocycle).axioms()
    assert BundleAxiom.COCYCLE_AT_UNITS in axioms
    assert BundleAxiom.COCYCLE_IDENTITY in axioms


def test_bundle_shape_checks():
    """
    Test rejection of mismatched matrices and sections.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    bundle = bundles.trivial_bundle(groupoid, dim=2)
    with pytest.raises(GroupoidFormatError):
        bundles.GHilbertBundle(
            groupoid=groupoid,
            dims=bundle.dims,
            matrices=(np.eye(3),) + bundle.matrices[1:],
        )
    with pytest.raises(GroupoidFormatError):
        bundles.check_section(bundle, np.zeros((groupoid.n_arrows, 3)))
    with pytest.raises(GroupoidFormatError):
        bundles.section_from_vectors(
            bundle, [np.zeros(2)] * (groupoid.n_units), over=bundles.ARROWS
        )


def test_section_vectors():
    """
    Test padding and stripping of sections.
    """
    groupoid = groupoid_core.disjoint_union(
        groupoid_core.pair_groupoid(1), groupoid_core.pair_groupoid(2)
    )
    bundle = bundles.random_bundle(groupoid, np.random.default_rng(3), max_dim=3)
    vectors = [np.arange(dim, dtype=float) + 1 for dim in bundle.dims]
    section = bundles.section_from_vectors(bundle, vectors, over=bundles.UNITS)
    assert section.shape == (groupoid.n_units, bundle.max_dim)
    stripped = bundles.section_vectors(bundle, section, over=bundles.UNITS)
    for vector, expected in zip(stripped, vectors):
        assert np.array_equal(vector, expected)


def test_cohomologous_and_affine_action(fix_rng):
    """
    Test cohomologous cocycles and the affine action.
    """
    groupoid = tests.standard_groupoids()[3]
    bundle = bundles.random_bundle(groupoid, fix_rng, real=True)
    first = bundles.coboundary(
        bundle, bundles.random_section(bundle, fix_rng, over=bundles.UNITS, real=True)
    )
    shifted = bundles.cohomologous(
        bundle,
        first,
        bundles.random_section(bundle, fix_rng, over=bundles.UNITS, real=True),
    )
    assert bundles.validate_cocycle(bundle, shifted).ok

    # A(ab) = A(a) A(b)
    a, b, ab = (int(index[0]) for index in groupoid.composable_pairs)
    vector = fix_rng.standard_normal(bundle.dims[groupoid.src[b]])
    composite = bundles.affine_action(
        bundle, first, a, bundles.affine_action(bundle, first, b, vector)
    )
    assert np.allclose(composite, bundles.affine_action(bundle, first, ab, vector))


def test_morphisms(fix_rng):
    """
    Test identity, inclusion and composition of bundle maps.
    """
    groupoid = tests.standard_groupoids()[1]
    first = bundles.random_bundle(groupoid, fix_rng)
    second = bundles.random_bundle(groupoid, fix_rng)
    identity = bundles.identity_morphism(first).validate()
    inclusion = bundles.inclusion_morphism(first, second).validate()
    composite = identity.then(inclusion)
    assert composite.target is inclusion.target
    assert composite.equivariance_residuals().max() < 1e-12
    with pytest.raises(ConstructionError):
        inclusion.then(identity)

    scrambled = bundles.BundleMorphism(
        source=first,
        target=first,
        maps=tuple(
            np.diag(np.arange(1, dim + 1, dtype=float)) for dim in first.dims
        ),
    )
    if np.any(first.dims > 1):
        with pytest.raises(BundleMorphismError):
            scrambled.validate()


def test_gauge_transform(fix_rng):
    """
    Test that gauge transforms keep a bundle valid.
    """
    groupoid = tests.standard_groupoids()[5]
    bundle = bundles.regular_bundle(groupoid)
    gauged = bundles.gauge_transform(
        bundle,
        [
            np.linalg.qr(fix_rng.standard_normal((dim, dim)))[0].astype(complex)
            for dim in bundle.dims
        ],
    )
    assert bundles.validate_bundle(gauged).ok
