"""
Tests for groupoid_core.py.
"""
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

import tests
from groupoid_cocycles import groupoid_core
from groupoid_cocycles.groupoid_core import Axiom
from groupoid_cocycles.utils import ConstructionError, GroupoidFormatError


@pytest.mark.parametrize(
    "kind,params,n_units,n_arrows", tests.test_standard_groupoid_params()
)
def test_standard_groupoid(kind, params, n_units, n_arrows):
    """
    Test make_standard.
    """
    groupoid, haar = groupoid_core.make_standard(kind, **params)
    assert groupoid.n_units == n_units
    assert groupoid.n_arrows == n_arrows
    assert groupoid_core.validate_groupoid(groupoid).ok
    assert groupoid_core.check_haar(haar).ok


def test_make_standard_unknown():
    """
    Test make_standard with unknown kind.
    """
    with pytest.raises(ConstructionError):
        groupoid_core.make_standard("torus", n=2)


@pytest.mark.parametrize("groupoid", tests.standard_groupoids())
def test_standard_groupoids_valid(groupoid):
    """
    Test that standard constructions satisfy the axioms.
    """
    assert groupoid_core.validate_groupoid(groupoid).ok
    for unit in range(groupoid.n_units):
        fiber = groupoid.range_fiber(unit)
        assert groupoid.unit_arrow[unit] in fiber
        assert len(fiber) == len(groupoid.source_fiber(unit))
    assert sum(len(orbit) for orbit in groupoid.orbits()) == groupoid.n_units


def test_pair_groupoid_composition():
    """
    Test composition in the pair groupoid.
    """
    groupoid = groupoid_core.pair_groupoid(3)
    assert groupoid.compose("(0,1)", "(1,2)") == "(0,2)"
    assert groupoid.compose("(0,1)", "(0,2)") is None
    assert len(groupoid.orbits()) == 1


def test_transformation_groupoid_orbits():
    """
    Test orbits of rotation and trivial actions.
    """
    table = groupoid_core.cyclic_group_table(3)
    rotation = groupoid_core.transformation_groupoid(
        table, groupoid_core.cyclic_rotation_action(3)
    )
    trivial = groupoid_core.transformation_groupoid(
        table, np.tile(np.arange(2), (3, 1))
    )
    assert rotation.n_arrows == 9
    assert len(rotation.orbits()) == 1
    assert len(trivial.orbits()) == 2


def test_validate_groupoid_missing_product():
    """
    Test that a removed product is reported.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    table = groupoid.compose_table.copy()
    table[0, 0] = groupoid_core.NOT_COMPOSABLE
    report = groupoid_core.validate_groupoid(replace(groupoid, compose_table=table))
    assert not report.ok
    assert Axiom.MISSING_PRODUCT in report.axioms()


def test_validate_groupoid_wrong_inverse():
    """
    Test that identity as inverse breaks the inverse law.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    broken = replace(groupoid, inverse=np.arange(groupoid.n_arrows))
    report = groupoid_core.validate_groupoid(broken)
    assert Axiom.INVERSE_LAW in report.axioms()
    assert Axiom.INVERSE_ENDPOINTS in report.axioms()


def test_from_records_missing_inverse():
    """
    Test from_records without an inverse.
    """
    with pytest.raises(GroupoidFormatError, match="No inverse given for arrow: 1"):
        groupoid_core.FiniteGroupoid.from_records(
            units=["u"],
            arrows=[("0", "u", "u"), ("1", "u", "u")],
            unit_arrows={"u": "0"},
            compose=[
                ("0", "0", "0"),
                ("0", "1", "1"),
                ("1", "0", "1"),
                ("1", "1", "0"),
            ],
            inverse={"0": "0"},
        )


def test_finite_groupoid_shapes():
    """
    Test table shape checks.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    with pytest.raises(GroupoidFormatError):
        replace(groupoid, src=groupoid.src[:-1])
    with pytest.raises(GroupoidFormatError):
        replace(groupoid, inverse=groupoid.inverse + groupoid.n_arrows)


def test_group_groupoid_bad_table():
    """
    Test rejection of a table without inverses.
    """
    with pytest.raises(ConstructionError):
        groupoid_core.group_groupoid(np.zeros((2, 2), dtype=int))


def test_check_haar_violations():
    """
    Test Haar weights that are not invariant or not positive.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    weights = np.ones(groupoid.n_arrows)
    weights[1] = 2.0
    report = groupoid_core.check_haar(
        groupoid_core.HaarSystem(groupoid=groupoid, weights=weights)
    )
    assert Axiom.LEFT_INVARIANCE in report.axioms()
    weights[1] = -1.0
    report = groupoid_core.check_haar(
        groupoid_core.HaarSystem(groupoid=groupoid, weights=weights)
    )
    assert Axiom.POSITIVE_WEIGHT in report.axioms()


@settings(deadline=None, max_examples=25)
@given(integers(min_value=0, max_value=2**32))
def test_random_invariant_haar(seed):
    """
    Test that random invariant Haar systems are invariant.
    """
    groupoid = tests.standard_groupoids()[-1]
    haar = groupoid_core.random_invariant_haar(groupoid, np.random.default_rng(seed))
    assert groupoid_core.check_haar(haar).ok
    assert np.all(haar.unit_weights > 0)
