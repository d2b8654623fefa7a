"""
Tests for utils.py.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

import tests
from groupoid_cocycles import utils


@pytest.mark.parametrize("config_text,overrides", tests.test_read_config_params())
def test_read_config(config_text, overrides, tmp_path):
    """
    Test read_config.
    """
    config_path = tmp_path / "gpd.ini"
    config_path.write_text(config_text, encoding="utf-8")
    config = utils.read_config(config_path)
    default = utils.VerifyConfig()
    for key, value in default.__dict__.items():
        assert getattr(config, key) == overrides.get(key, value)


def test_read_config_missing(tmp_path):
    """
    Test read_config without a file.
    """
    assert utils.read_config(None) == utils.VerifyConfig()
    assert utils.read_config(tmp_path / "missing.ini") == utils.VerifyConfig()


@pytest.mark.parametrize("seed", [0, 7, 2**64 - 1])
def test_check_seed_bounds(seed):
    """
    Test check_seed at the bounds.
    """
    assert utils.check_seed(seed) == seed
    for invalid in (-1, 2**64, 1.5):
        with pytest.raises(ValueError):
            utils.check_seed(invalid)


def test_validation_report():
    """
    Test collecting violations.
    """
    report = utils.ValidationReport(max_witnesses=2)
    assert report.ok
    for arrow in "abc":
        report.add("closure", [arrow])
    report.add("inverse", ["a"], "no inverse")
    assert len(report) == 3
    assert report.count("closure") == 2
    assert report.axioms() == ["closure", "inverse"]
    other = utils.ValidationReport()
    other.extend(report)
    assert not other.ok
    assert other.violations[-1].detail == "no inverse"


def test_eigenvalues():
    """
    Test eigenvalue helpers.
    """
    assert utils.min_eigenvalue(np.zeros((0, 0))) == np.inf
    assert np.isclose(utils.min_eigenvalue(np.array([[1.0, 2.0], [2.0, 1.0]])), -1.0)
    with pytest.raises(ValueError):
        utils.check_square(np.zeros((2, 3)))
    assert np.allclose(
        utils.hermitian_part(np.array([[0.0, 2.0], [0.0, 0.0]])),
        [[0.0, 1.0], [1.0, 0.0]],
    )


@settings(deadline=None, max_examples=30)
@given(integers(min_value=1, max_value=4), integers(min_value=0, max_value=2**32))
def test_solve_intertwiner(dim, seed):
    """
    Test recovery of a random unitary from its action on rows.
    """
    rng = np.random.default_rng(seed)
    unitary = utils.random_unitary(rng, dim, real=False)
    assert np.allclose(unitary.conj().T @ unitary, np.eye(dim))
    source_rows = rng.standard_normal((dim + 2, dim))
    target_rows = source_rows @ unitary.T
    matrix, residual = utils.solve_intertwiner(source_rows, target_rows)
    assert residual <= 1e-9 * (1 + utils.scale_of(target_rows))
    assert np.allclose(matrix, unitary)
