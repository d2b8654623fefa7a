"""
Tests for document.py.
"""
import json

import numpy as np
import pytest

import tests
from groupoid_cocycles import document, generators, groupoid_core
from groupoid_cocycles.utils import (
    DocumentReferenceError,
    DocumentShapeError,
    DocumentSyntaxError,
    UsageError,
)


def _z2_groupoid(**changes):
    block = dict(tests.Z2_DOCUMENT["groupoid"])
    block.update(changes)
    return block


def test_parse_z2():
    """
    Test parsing the Z/2 document.
    """
    parsed = document.parse(tests.z2_text())
    assert parsed.groupoid.n_units == 1
    assert parsed.groupoid.n_arrows == 2
    assert parsed.counting
    assert np.array_equal(parsed.function("psi"), [0.0, 1.0])
    assert np.array_equal(parsed.function("phi"), [1.0, 2.0])
    assert groupoid_core.validate_groupoid(parsed.groupoid).ok


def test_read_document(fix_z2_path):
    """
    Test reading a document file.
    """
    parsed = document.read_document(fix_z2_path)
    assert parsed.groupoid.compose("1", "1") == "0"
    broken = fix_z2_path.with_name("broken.json")
    broken.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(DocumentSyntaxError):
        document.read_document(broken)


def test_round_trip_pair():
    """
    Test that a pair groupoid document serializes identically after parsing.
    """
    groupoid = groupoid_core.pair_groupoid(2)
    doc = document.InstanceDocument(
        groupoid=groupoid, haar=groupoid_core.HaarSystem.counting(groupoid)
    )
    text = document.serialize(doc)
    assert document.serialize(document.parse(text)) == text
    assert text.endswith("\n")


@pytest.mark.parametrize(
    "weights", [generators.WeightsChoice.COUNTING, generators.WeightsChoice.RANDOM]
)
def test_round_trip_generated(weights):
    """
    Test round trip of generated documents with every block kind.
    """
    doc = generators.generate_random(
        generators.GeneratorKind.DISJOINT, 2, seed=3, weights=weights
    )
    text = document.serialize(doc)
    parsed = document.parse(text)
    assert document.serialize(parsed) == text
    assert document.instance_hash(parsed) == document.instance_hash(doc)
    assert parsed.counting is (weights == generators.WeightsChoice.COUNTING)
    assert np.allclose(parsed.haar.weights, doc.haar.weights)
    bundle, cocycle = parsed.cocycle(generators.COCYCLE)
    assert bundle.is_real
    assert np.allclose(cocycle, doc.cocycles[generators.COCYCLE].values)


def test_instance_hash(fix_generated):
    """
    Test that the hash is stable and sensitive to content.
    """
    first = document.instance_hash(fix_generated)
    assert len(first) == 64
    assert first == document.instance_hash(fix_generated)
    other = generators.generate_random(generators.GeneratorKind.PAIR, 3, seed=8)
    assert document.instance_hash(other) != first


def test_missing_inverse():
    """
    Test that a missing inverse names the arrow.
    """
    text = tests.z2_text(groupoid=_z2_groupoid(inverse=[["0", "0"]]))
    with pytest.raises(DocumentReferenceError, match="No inverse given for arrow: 1"):
        document.parse(text)


def test_unresolved_unit():
    """
    Test an arrow with an unknown endpoint.
    """
    text = tests.z2_text(
        groupoid=_z2_groupoid(arrows=[["0", "u", "u"], ["1", "v", "u"]])
    )
    with pytest.raises(DocumentReferenceError):
        document.parse(text)


def test_unlisted_composable_pair():
    """
    Test that every composable pair must have a product.
    """
    compose = tests.Z2_DOCUMENT["groupoid"]["compose"][:3]
    text = tests.z2_text(groupoid=_z2_groupoid(compose=compose))
    with pytest.raises(DocumentReferenceError, match="without product"):
        document.parse(text)


def test_wrong_matrix_shape():
    """
    Test a bundle matrix that does not match the fiber dimensions.
    """
    bundles = {
        "E": {
            "dims": {"u": 1},
            "matrices": {"0": [[1.0]], "1": [[1.0, 0.0]]},
        }
    }
    with pytest.raises(DocumentShapeError):
        document.parse(tests.z2_text(bundles=bundles))


def test_malformed_json():
    """
    Test that malformed JSON reports line and column.
    """
    with pytest.raises(DocumentSyntaxError, match="line 2, column"):
        document.parse('{\n"format": }')
    with pytest.raises(DocumentSyntaxError):
        document.parse(json.dumps([1, 2]))
    with pytest.raises(DocumentSyntaxError):
        document.parse(tests.z2_text(format="other/1"))


def test_section_blocks():
    """
    Test unit sections and cocycles of a named bundle.
    """
    bundles = {
        "R": {
            "dims": {"u": 1},
            "matrices": {"0": [[1.0]], "1": [[-1.0]]},
        }
    }
    cocycles = {"c": {"bundle": "R", "values": {"0": [0.0], "1": [2.0]}}}
    sections = {
        "xi": {"bundle": "R", "over": "units", "values": {"u": [[1.0, 1.0]]}}
    }
    parsed = document.parse(
        tests.z2_text(bundles=bundles, cocycles=cocycles, sections=sections)
    )
    _, cocycle = parsed.cocycle("c")
    assert np.array_equal(cocycle, [[0.0], [2.0]])
    _, section = parsed.section("xi")
    assert np.allclose(section, [[1.0 + 1.0j]])
    with pytest.raises(DocumentReferenceError):
        document.parse(
            tests.z2_text(
                bundles=bundles,
                cocycles={"c": {"bundle": "F", "values": {"0": [0.0], "1": [2.0]}}},
            )
        )
    with pytest.raises(DocumentSyntaxError):
        document.parse(
            tests.z2_text(
                bundles=bundles,
                sections={"xi": {"bundle": "R", "over": "fibers", "values": {}}},
            )
        )


def test_missing_blocks():
    """
    Test accessors of blocks that are not in the document.
    """
    parsed = document.parse(tests.z2_text())
    with pytest.raises(UsageError):
        parsed.function("chi")
    with pytest.raises(UsageError):
        parsed.bundle("E")
    with pytest.raises(UsageError):
        parsed.cocycle("c")
    with pytest.raises(UsageError):
        parsed.section("xi")


def test_haar_weights():
    """
    Test explicit Haar weights.
    """
    parsed = document.parse(tests.z2_text(haar={"weights": {"0": 2.0, "1": 2.0}}))
    assert not parsed.counting
    assert np.array_equal(parsed.haar.weights, [2.0, 2.0])
    with pytest.raises(DocumentShapeError):
        document.parse(
            tests.z2_text(haar={"weights": {"0": [2.0, 1.0], "1": 2.0}})
        )
    with pytest.raises(DocumentReferenceError):
        document.parse(tests.z2_text(haar={"weights": {"0": 2.0}}))
