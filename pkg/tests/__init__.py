"""
Tests for groupoid-cocycles.
"""

import json
from copy import deepcopy
from functools import lru_cache
from typing import Any, Dict

import numpy as np

from groupoid_cocycles import groupoid_core
from groupoid_cocycles.generators import GeneratorKind

Z2_DOCUMENT: Dict[str, Any] = {
    "format": "groupoid-instance/1",
    "groupoid": {
        "units": ["u"],
        "arrows": [["0", "u", "u"], ["1", "u", "u"]],
        "unit_arrows": {"u": "0"},
        "compose": [
            ["0", "0", "0"],
            ["0", "1", "1"],
            ["1", "0", "1"],
            ["1", "1", "0"],
        ],
        "inverse": [["0", "0"], ["1", "1"]],
    },
    "haar": "counting",
    "functions": {
        "psi": {"0": 0.0, "1": 1.0},
        "phi": {"0": 1.0, "1": 2.0},
    },
}


def z2_document(**changes) -> Dict[str, Any]:
    """
    Copy of the Z/2 document with top-level blocks replaced.
    """
    data = deepcopy(Z2_DOCUMENT)
    data.update(changes)
    return data


def z2_text(**changes) -> str:
    """
    Z/2 document as JSON text.
    """
    return json.dumps(z2_document(**changes))


def standard_groupoids():
    """
    Small groupoids of every standard kind.
    """
    table = groupoid_core.cyclic_group_table(3)
    return [
        groupoid_core.pair_groupoid(1),
        groupoid_core.pair_groupoid(3),
        groupoid_core.group_groupoid(groupoid_core.cyclic_group_table(4)),
        groupoid_core.transformation_groupoid(
            table, groupoid_core.cyclic_rotation_action(3)
        ),
        groupoid_core.transformation_groupoid(table, np.tile(np.arange(2), (3, 1))),
        groupoid_core.disjoint_union(
            groupoid_core.pair_groupoid(2),
            groupoid_core.group_groupoid(groupoid_core.cyclic_group_table(2)),
        ),
    ]


@lru_cache(maxsize=None)
def test_standard_groupoid_params():
    """
    Params for test_standard_groupoid.
    """
    return [
        (groupoid_core.StandardKind.PAIR, dict(n=3), 3, 9),
        (
            groupoid_core.StandardKind.GROUP,
            dict(table=groupoid_core.cyclic_group_table(5)),
            1,
            5,
        ),
        (
            groupoid_core.StandardKind.TRANSFORMATION,
            dict(
                table=groupoid_core.cyclic_group_table(3),
                action=groupoid_core.cyclic_rotation_action(3),
            ),
            3,
            9,
        ),
        (
            groupoid_core.StandardKind.DISJOINT_UNION,
            dict(
                first=groupoid_core.pair_groupoid(2),
                second=groupoid_core.pair_groupoid(1),
            ),
            3,
            5,
        ),
    ]


@lru_cache(maxsize=None)
def test_is_pt_kernel_params():
    """
    Params for test_is_pt_kernel.
    """
    return [
        (np.eye(3), True),
        (np.ones((2, 2)), True),
        (np.array([[1.0, 2.0], [2.0, 1.0]]), False),
        (np.array([[1.0, 1j], [-1j, 1.0]]), True),
        (np.array([[1.0, 1.0], [0.0, 1.0]]), False),
        (np.zeros((0, 0)), True),
    ]


@lru_cache(maxsize=None)
def test_is_cnt_kernel_params():
    """
    Params for test_is_cnt_kernel.
    """
    line = np.subtract.outer(np.arange(4.0), np.arange(4.0)) ** 2
    return [
        (line, True),
        (np.zeros((3, 3)), True),
        (np.array([[0.0, -1.0], [-1.0, 0.0]]), False),
        (np.array([[1.0, 1.0], [1.0, 1.0]]), False),
        (np.array([[0.0, 1.0], [2.0, 0.0]]), False),
        (np.zeros((1, 1)), True),
    ]


@lru_cache(maxsize=None)
def test_parse_generator_spec_params():
    """
    Params for test_parse_generator_spec.
    """
    return [
        ("pair:4", GeneratorKind.PAIR, 4, False),
        ("group:1", GeneratorKind.GROUP, 1, False),
        (" transformation:3 ", GeneratorKind.TRANSFORMATION, 3, False),
        ("random:2", GeneratorKind.RANDOM, 2, False),
        ("pair:0", None, None, True),
        ("torus:3", None, None, True),
        ("pair", None, None, True),
        ("pair:-1", None, None, True),
    ]


@lru_cache(maxsize=None)
def test_read_config_params():
    """
    Params for test_read_config.
    """
    return [
        ("", dict()),
        ("[tolerances]\ntol = 1e-6\n", dict(tol=1e-6)),
        (
            "[sampling]\nseed = 11\nrandom_samples = 2\nschoenberg_times = 0.5, 2\n",
            dict(seed=11, random_samples=2, schoenberg_times=(0.5, 2.0)),
        ),
        ("[tolerances]\ntol = tiny\nleibniz_tol = 1e-8\n", dict(leibniz_tol=1e-8)),
    ]


@lru_cache(maxsize=None)
def test__setup_logging_params():
    """
    Params for test__setup_logging.
    """
    return [
        ("DEBUG", False),
        ("INFO", False),
        ("WARNING", False),
        ("ERROR", False),
        ("CRITICAL", False),
    ]


@lru_cache(maxsize=None)
def test_kernel_schoenberg_params():
    """
    Times of the exponentiated kernels.
    """
    return (0.1, 1.0, 10.0)
