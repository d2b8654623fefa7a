"""
Tests for functions.py.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

import tests
from groupoid_cocycles import bundles, functions, generators, groupoid_core
from groupoid_cocycles.utils import (
    KernelNotConditionallyNegativeError,
    KernelNotPositiveError,
)

Z2 = groupoid_core.group_groupoid(groupoid_core.cyclic_group_table(2))


def _random_pt(seed: int):
    rng = np.random.default_rng(seed)
    groupoid = generators.build_groupoid(generators.GeneratorKind.RANDOM, 3, rng=rng)
    bundle = bundles.random_bundle(groupoid, rng, max_dim=3)
    section = bundles.random_section(bundle, rng, over=bundles.UNITS)
    return groupoid, functions.matrix_coefficient(bundle, section)


def _random_cnt(seed: int):
    rng = np.random.default_rng(seed)
    groupoid = generators.build_groupoid(generators.GeneratorKind.RANDOM, 3, rng=rng)
    bundle = bundles.random_bundle(groupoid, rng, max_dim=3, real=True)
    section = bundles.random_section(bundle, rng, over=bundles.UNITS, real=True)
    return groupoid, functions.coboundary_norm_function(bundle, section)


@settings(deadline=None, max_examples=40)
@given(integers(min_value=0, max_value=2**32))
def test_gns_pt_function(seed):
    """
    Test that the GNS bundle reproduces a positive type function.
    """
    groupoid, values = _random_pt(seed)
    assert functions.is_pt_function(groupoid, values)
    representation = functions.gns_pt_function(groupoid, values)
    assert bundles.validate_bundle(representation.bundle).ok
    reconstruction = functions.matrix_coefficient(
        representation.bundle, representation.section
    )
    assert np.abs(reconstruction - values).max() <= 1e-9 * (
        1 + np.abs(values).max()
    )


@settings(deadline=None, max_examples=40)
@given(integers(min_value=0, max_value=2**32))
def test_gns_cnt_function(seed):
    """
    Test that the GNS cocycle reproduces a coboundary norm.
    """
    groupoid, values = _random_cnt(seed)
    assert functions.is_cnt_function(groupoid, values)
    representation = functions.gns_cnt_function(groupoid, values)
    assert representation.bundle.is_real
    assert bundles.validate_cocycle(
        representation.bundle, representation.cocycle
    ).ok
    assert np.allclose(
        functions.cocycle_norm_function(representation.cocycle), values, atol=1e-9
    )


@settings(deadline=None, max_examples=20)
@given(integers(min_value=0, max_value=2**32))
def test_gns_uniqueness_basepoints(seed):
    """
    Test the isometry between GNS cocycles of two basepoint conventions.
    """
    groupoid, values = _random_cnt(seed)
    first = functions.gns_cnt_function(
        groupoid, values, basepoint=functions.BASEPOINT_UNIT
    )
    second = functions.gns_cnt_function(
        groupoid, values, basepoint=functions.BASEPOINT_FIRST
    )
    result = functions.gns_uniqueness_check(first, second, tol=1e-8)
    assert result.success
    assert result.residual <= 1e-8 * (1 + np.abs(values).max())


def test_gns_uniqueness_mismatch():
    """
    Test that different functions report a mismatched inner product.
    """
    first = functions.gns_cnt_function(Z2, np.array([0.0, 1.0]))
    second = functions.gns_cnt_function(Z2, np.array([0.0, 4.0]))
    result = functions.gns_uniqueness_check(first, second)
    assert not result.success
    assert result.mismatch is not None
    assert result.maps is None
    with pytest.raises(ValueError):
        functions.gns_uniqueness_check(
            first, functions.gns_pt_function(Z2, np.array([1.0, 0.5]))
        )


def test_check_pt_z2_witness():
    """
    Test that phi(0)=1, phi(1)=2 fails with eigenvalue witness -1.
    """
    values = np.array([1.0, 2.0])
    _, lowest, worst = functions.pt_function_margin(Z2, values)
    assert np.isclose(lowest, -1.0)
    assert worst == 0
    with pytest.raises(KernelNotPositiveError) as exc_info:
        functions.gns_pt_function(Z2, values)
    assert np.isclose(exc_info.value.witness, -1.0)


def test_cnt_function_failures():
    """
    Test functions that are not conditionally negative.
    """
    assert not functions.is_cnt_function(Z2, np.array([1.0, 1.0]))
    assert not functions.is_cnt_function(Z2, np.array([0.0, -1.0]))
    assert not functions.is_cnt_function(Z2, np.array([0.0, 1j]))
    with pytest.raises(KernelNotConditionallyNegativeError):
        functions.gns_cnt_function(Z2, np.array([0.0, -1.0]))
    with pytest.raises(ValueError):
        functions.gns_cnt_function(Z2, np.array([0.0, 1.0]), basepoint="middle")


@settings(deadline=None, max_examples=40)
@given(integers(min_value=0, max_value=2**32))
def test_schoenberg(seed):
    """
    Test that exp(-t psi) is of positive type for conditionally negative psi.
    """
    groupoid, values = _random_cnt(seed)
    for t in (0.1, 1.0, 10.0):
        phi = functions.schoenberg(values, t)
        _, lowest, _ = functions.pt_function_margin(groupoid, phi)
        assert lowest >= -1e-9


@settings(deadline=None, max_examples=20)
@given(integers(min_value=0, max_value=2**32))
def test_schoenberg_non_cnt(seed):
    """
    Test that a negative symmetric value breaks positive type for large t.
    """
    rng = np.random.default_rng(seed)
    groupoid = groupoid_core.pair_groupoid(3)
    values = generators.random_non_cnt_function(groupoid, rng)
    assert not functions.is_cnt_function(groupoid, values)
    failures = [
        not functions.is_pt_function(groupoid, functions.schoenberg(values, t))
        for t in (0.1, 1.0, 10.0)
    ]
    assert any(failures)


def test_schoenberg_converse():
    """
    Test recovery of psi from the semigroup on Z/2.
    """
    values = np.array([0.0, 1.0])
    result = functions.schoenberg_converse(Z2, values)
    assert result.all_positive
    assert result.limit_is_cnt
    assert result.limit_residual <= 1e-5
    with pytest.raises(ValueError):
        functions.schoenberg_converse(Z2, values, times=(0.1,))


def test_schoenberg_converse_repeated_times():
    """
    Test that repeated times are merged before extrapolating the limit.
    """
    values = np.array([0.0, 1.0])
    repeated = functions.schoenberg_converse(Z2, values, times=(0.01, 0.01, 0.02))
    distinct = functions.schoenberg_converse(Z2, values, times=(0.02, 0.01))
    assert repeated.times == (0.01, 0.02)
    assert np.all(np.isfinite(repeated.limit))
    assert np.allclose(repeated.limit, distinct.limit)
    with pytest.raises(ValueError):
        functions.schoenberg_converse(Z2, values, times=(0.1, 0.1))


def test_schoenberg_negative_time():
    """
    Test schoenberg with negative time.
    """
    with pytest.raises(ValueError):
        functions.schoenberg(np.zeros(2), -1.0)


@pytest.mark.parametrize("groupoid", tests.standard_groupoids())
def test_per_unit_kernel_regular(groupoid):
    """
    Test that the indicator of units is of positive type.
    """
    values = np.zeros(groupoid.n_arrows)
    values[groupoid.unit_arrow] = 1.0
    for unit in range(groupoid.n_units):
        kernel = functions.per_unit_kernel(groupoid, values, unit)
        assert np.allclose(kernel, np.eye(len(groupoid.range_fiber(unit))))
    representation = functions.gns_pt_function(groupoid, values)
    assert np.array_equal(
        representation.bundle.dims,
        [len(groupoid.range_fiber(unit)) for unit in range(groupoid.n_units)],
    )
