"""
Tests for convolution.py.
"""
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis.strategies import integers

from groupoid_cocycles import convolution, generators, groupoid_core


@settings(deadline=None, max_examples=25)
@given(integers(min_value=0, max_value=2**32))
def test_algebra_laws(seed):
    """
    Test associativity, involution and the unit on random elements.
    """
    rng = np.random.default_rng(seed)
    groupoid = groupoid_core.disjoint_union(
        groupoid_core.pair_groupoid(2),
        groupoid_core.group_groupoid(groupoid_core.cyclic_group_table(3)),
    )
    haar = groupoid_core.random_invariant_haar(groupoid, rng)
    f, g, h = (convolution.random_element(groupoid, rng) for _ in range(3))
    assert np.allclose(
        convolution.convolve(haar, convolution.convolve(haar, f, g), h),
        convolution.convolve(haar, f, convolution.convolve(haar, g, h)),
    )
    assert np.allclose(
        convolution.involution(groupoid, convolution.convolve(haar, f, g)),
        convolution.convolve(
            haar,
            convolution.involution(groupoid, g),
            convolution.involution(groupoid, f),
        ),
    )
    unit = convolution.algebra_unit(haar)
    assert np.allclose(convolution.convolve(haar, unit, f), f)
    assert np.allclose(convolution.convolve(haar, f, unit), f)


@settings(
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(seed=integers(min_value=0, max_value=2**32))
def test_regular_representation(seed, fix_haar):
    """
    Test that the regular representation is a *-homomorphism.
    """
    rng = np.random.default_rng(seed)
    groupoid = fix_haar.groupoid
    f, g = (convolution.random_element(groupoid, rng) for _ in range(2))
    product = convolution.regular_representation(
        fix_haar, convolution.convolve(fix_haar, f, g)
    )
    adjoint = convolution.regular_representation(
        fix_haar, convolution.involution(groupoid, f)
    )
    for block_f, block_g, block_product, block_adjoint in zip(
        convolution.regular_representation(fix_haar, f),
        convolution.regular_representation(fix_haar, g),
        product,
        adjoint,
    ):
        assert np.allclose(block_product, block_f @ block_g, atol=1e-12)
        assert np.allclose(block_adjoint, block_f.conj().T, atol=1e-12)


@settings(
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(seed=integers(min_value=0, max_value=2**32))
def test_cstar_identity(seed, fix_haar):
    """
    Test the C*-identity and the I-norm bound.
    """
    rng = np.random.default_rng(seed)
    f = convolution.random_element(fix_haar.groupoid, rng)
    norm = convolution.cstar_norm(fix_haar, f)
    squared = convolution.cstar_norm(
        fix_haar,
        convolution.convolve(
            fix_haar, convolution.involution(fix_haar.groupoid, f), f
        ),
    )
    assert abs(squared - norm**2) <= 1e-7 * (1 + norm**2)
    assert norm <= convolution.i_norm(fix_haar, f) * (1 + 1e-9)


def test_positive_elements(fix_haar, fix_rng):
    """
    Test that f* f is positive and -f* f is not.
    """
    groupoid = fix_haar.groupoid
    f = convolution.random_element(groupoid, fix_rng)
    square = convolution.convolve(fix_haar, convolution.involution(groupoid, f), f)
    assert convolution.is_positive_element(fix_haar, square)
    assert not convolution.is_positive_element(fix_haar, -square)
    defect, lowest = convolution.positivity_margin(fix_haar, square)
    assert defect <= 1e-9 * (1 + np.abs(square).max())
    assert lowest >= -1e-9 * (1 + np.abs(square).max())


def test_delta_norm():
    """
    Test the norm of unit indicators in the counting Haar system.
    """
    groupoid = groupoid_core.pair_groupoid(3)
    haar = groupoid_core.HaarSystem.counting(groupoid)
    unit = convolution.algebra_unit(haar)
    assert convolution.cstar_norm(haar, unit) == pytest.approx(1.0)
    arrow = convolution.delta(groupoid, 1)
    assert convolution.cstar_norm(haar, arrow) == pytest.approx(1.0)
    assert convolution.i_norm(haar, arrow) == pytest.approx(1.0)


def test_unit_multiply():
    """
    Test multiplication by functions on units through the range.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    values = np.ones(groupoid.n_arrows)
    result = convolution.unit_multiply(groupoid, np.array([2.0, 3.0]), values)
    assert np.allclose(result, [2.0, 2.0, 3.0, 3.0])
    assert np.allclose(
        convolution.pointwise_multiply(result, values), result
    )


@settings(deadline=None, max_examples=40)
@given(integers(min_value=0, max_value=2**32))
def test_schur_product_positive(seed):
    """
    Test that multiplying a positive element by a positive type function
    keeps it positive.
    """
    instance = generators.random_instance(seed)
    haar = instance.haar
    phi = instance.function(generators.PT_FUNCTION)
    h = convolution.random_element(haar.groupoid, np.random.default_rng(seed))
    positive = convolution.convolve(haar, convolution.involution(haar.groupoid, h), h)
    assert convolution.is_positive_element(haar, positive)
    assert convolution.is_positive_element(
        haar, convolution.pointwise_multiply(phi, positive)
    )
