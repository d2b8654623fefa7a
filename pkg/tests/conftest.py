"""
Global pytest fixtures.
"""
from pathlib import Path

import numpy as np
import pytest

import tests
from groupoid_cocycles import bundles, generators, groupoid_core


@pytest.fixture
def fix_rng():
    """
    Seeded random generator.
    """
    yield np.random.default_rng(1234)


@pytest.fixture(
    params=[generators.WeightsChoice.COUNTING, generators.WeightsChoice.RANDOM]
)
def fix_haar(request):
    """
    Counting and random invariant Haar systems on a disjoint union.
    """
    groupoid = groupoid_core.disjoint_union(
        groupoid_core.pair_groupoid(2),
        groupoid_core.transformation_groupoid(
            groupoid_core.cyclic_group_table(3),
            groupoid_core.cyclic_rotation_action(3),
        ),
    )
    if request.param == generators.WeightsChoice.COUNTING:
        yield groupoid_core.HaarSystem.counting(groupoid)
    else:
        yield groupoid_core.random_invariant_haar(groupoid, np.random.default_rng(5))


@pytest.fixture
def fix_bundle(fix_haar, fix_rng):
    """
    Random complex bundle on the groupoid of fix_haar.
    """
    yield bundles.random_bundle(fix_haar.groupoid, fix_rng, max_dim=3, real=False)


@pytest.fixture
def fix_real_bundle(fix_haar, fix_rng):
    """
    Random real bundle on the groupoid of fix_haar.
    """
    yield bundles.random_bundle(fix_haar.groupoid, fix_rng, max_dim=3, real=True)


@pytest.fixture
def fix_cocycle(fix_real_bundle, fix_rng):
    """
    Coboundary of a random real unit section.
    """
    unit_section = bundles.random_section(
        fix_real_bundle, fix_rng, over=bundles.UNITS, real=True
    )
    yield bundles.coboundary(fix_real_bundle, unit_section)


@pytest.fixture
def fix_z2_path(tmp_path: Path):
    """
    Z/2 instance document file.
    """
    path = tmp_path / "z2.json"
    path.write_text(tests.z2_text(), encoding="utf-8")
    yield path


@pytest.fixture
def fix_generated():
    """
    Generated instance on a pair groupoid.
    """
    yield generators.generate_random(generators.GeneratorKind.PAIR, 3, seed=7)
