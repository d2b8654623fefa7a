"""
Tests for generators.py.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

import tests
from groupoid_cocycles import bundles, document, functions, generators, groupoid_core
from groupoid_cocycles.utils import ConstructionError, UsageError


@pytest.mark.parametrize(
    "text,kind,size,will_fail", tests.test_parse_generator_spec_params()
)
def test_parse_generator_spec(text, kind, size, will_fail):
    """
    Test parse_generator_spec.
    """
    if will_fail:
        with pytest.raises(UsageError):
            generators.parse_generator_spec(text)
        return
    spec = generators.parse_generator_spec(text)
    assert spec.kind == kind
    assert spec.size == size


@pytest.mark.parametrize(
    "kind,size,n_units,n_arrows",
    [
        (generators.GeneratorKind.PAIR, 4, 4, 16),
        (generators.GeneratorKind.GROUP, 5, 1, 5),
        (generators.GeneratorKind.TRANSFORMATION, 3, 3, 9),
        (generators.GeneratorKind.DISJOINT, 2, 3, 6),
    ],
)
def test_build_groupoid(kind, size, n_units, n_arrows):
    """
    Test sizes of generated groupoids.
    """
    groupoid = generators.build_groupoid(kind, size)
    assert groupoid.n_units == n_units
    assert groupoid.n_arrows == n_arrows
    assert groupoid_core.validate_groupoid(groupoid).ok


def test_build_groupoid_random_needs_rng():
    """
    Test that the random kind needs a generator.
    """
    with pytest.raises(UsageError):
        generators.build_groupoid(generators.GeneratorKind.RANDOM, 2)
    groupoid = generators.build_groupoid(
        generators.GeneratorKind.RANDOM, 2, rng=np.random.default_rng(0)
    )
    assert groupoid_core.validate_groupoid(groupoid).ok


def test_generate_deterministic():
    """
    Test that equal seeds give identical documents.
    """
    first = generators.generate_random(generators.GeneratorKind.PAIR, 4, seed=7)
    second = generators.generate_random(generators.GeneratorKind.PAIR, 4, seed=7)
    assert document.serialize(first) == document.serialize(second)
    other = generators.generate_random(generators.GeneratorKind.PAIR, 4, seed=9)
    assert document.serialize(first) != document.serialize(other)
    with pytest.raises(UsageError):
        generators.generate_random(
            generators.GeneratorKind.PAIR, 4, seed=7, weights="uniform"
        )


@settings(deadline=None, max_examples=30)
@given(integers(min_value=0, max_value=2**32))
def test_random_instance(seed):
    """
    Test that sweep instances are valid and hold functions of both types.
    """
    doc = generators.random_instance(seed)
    groupoid = doc.groupoid
    assert groupoid.n_arrows <= 30
    assert groupoid_core.validate_groupoid(groupoid).ok
    assert groupoid_core.check_haar(doc.haar).ok
    for bundle in doc.bundles.values():
        assert bundles.validate_bundle(bundle).ok
    bundle, cocycle = doc.cocycle(generators.COCYCLE)
    assert bundles.validate_cocycle(bundle, cocycle).ok
    assert functions.is_cnt_function(groupoid, doc.function(generators.CNT_FUNCTION))
    assert functions.is_pt_function(groupoid, doc.function(generators.PT_FUNCTION))


def test_random_non_cnt_function(fix_rng):
    """
    Test the negative value of a non conditionally negative function.
    """
    groupoid = groupoid_core.pair_groupoid(3)
    values = generators.random_non_cnt_function(groupoid, fix_rng)
    assert np.allclose(values, values[groupoid.inverse])
    assert np.all(values[groupoid.unit_arrow] == 0.0)
    assert values.min() < 0
    with pytest.raises(ConstructionError):
        generators.random_non_cnt_function(groupoid_core.pair_groupoid(1), fix_rng)
