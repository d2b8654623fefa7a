"""
JSON instance documents.

A document holds a groupoid, its Haar system and optional named functions,
bundles, cocycles and unit or arrow sections. Complex numbers are written as
``[re, im]`` pairs and matrices as row-major nested lists. Identifier tables
are validated with pandera before the groupoid is built.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd
import pandera as pa

from groupoid_cocycles.bundles import ARROWS, UNITS, GHilbertBundle, section_vectors
from groupoid_cocycles.groupoid_core import NOT_COMPOSABLE, FiniteGroupoid, HaarSystem
from groupoid_cocycles.utils import (
    DocumentReferenceError,
    DocumentShapeError,
    DocumentSyntaxError,
    UsageError,
)

FORMAT = "groupoid-instance/1"


class Keys:

    """
    Keys of the JSON document.
    """

    FORMAT = "format"
    GROUPOID = "groupoid"
    UNITS = "units"
    ARROWS = "arrows"
    UNIT_ARROWS = "unit_arrows"
    COMPOSE = "compose"
    INVERSE = "inverse"
    HAAR = "haar"
    COUNTING = "counting"
    WEIGHTS = "weights"
    FUNCTIONS = "functions"
    BUNDLES = "bundles"
    DIMS = "dims"
    MATRICES = "matrices"
    COCYCLES = "cocycles"
    SECTIONS = "sections"
    BUNDLE = "bundle"
    OVER = "over"
    VALUES = "values"


class Columns:

    """
    Column names of the identifier tables.
    """

    ID = "id"
    SRC = "src"
    DST = "dst"
    FIRST = "first"
    SECOND = "second"
    PRODUCT = "product"
    ARROW = "arrow"
    INVERSE = "inverse"


def arrows_schema(units: Sequence[str]) -> pa.DataFrameSchema:
    """
    Arrow table with endpoints among the units.
    """
    return pa.DataFrameSchema(
        columns={
            Columns.ID: pa.Column(str, unique=True),
            Columns.SRC: pa.Column(str, pa.Check.isin(list(units))),
            Columns.DST: pa.Column(str, pa.Check.isin(list(units))),
        }
    )


def compose_schema(arrows: Sequence[str]) -> pa.DataFrameSchema:
    """
    Composition table listing each pair once.
    """
    return pa.DataFrameSchema(
        columns={
            column: pa.Column(str, pa.Check.isin(list(arrows)))
            for column in (Columns.FIRST, Columns.SECOND, Columns.PRODUCT)
        },
        unique=[Columns.FIRST, Columns.SECOND],
    )


def inverse_schema(arrows: Sequence[str]) -> pa.DataFrameSchema:
    """
    Inverse table with one row per arrow.
    """
    return pa.DataFrameSchema(
        columns={
            Columns.ARROW: pa.Column(str, pa.Check.isin(list(arrows)), unique=True),
            Columns.INVERSE: pa.Column(str, pa.Check.isin(list(arrows))),
        }
    )


@dataclass(frozen=True, eq=False)
class CocycleBlock:

    """
    Named cocycle of a named bundle.
    """

    bundle: str
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class SectionBlock:

    """
    Named section of a named bundle over units or arrows.
    """

    bundle: str
    over: str
    values: np.ndarray


@dataclass(eq=False)
class InstanceDocument:

    """
    Parsed instance document.
    """

    groupoid: FiniteGroupoid
    haar: HaarSystem
    counting: bool = True
    functions: Dict[str, np.ndarray] = field(default_factory=dict)
    bundles: Dict[str, GHilbertBundle] = field(default_factory=dict)
    cocycles: Dict[str, CocycleBlock] = field(default_factory=dict)
    sections: Dict[str, SectionBlock] = field(default_factory=dict)

    def function(self, name: str) -> np.ndarray:
        """
        Get named function.
        """
        if name not in self.functions:
            raise UsageError(
                f"Expected function block '{name}'."
                f" Available: {sorted(self.functions)}."
            )
        return self.functions[name]

    def bundle(self, name: str) -> GHilbertBundle:
        """
        Get named bundle.
        """
        if name not in self.bundles:
            raise UsageError(
                f"Expected bundle block '{name}'. Available: {sorted(self.bundles)}."
            )
        return self.bundles[name]

    def cocycle(self, name: str) -> Tuple[GHilbertBundle, np.ndarray]:
        """
        Get named cocycle with its bundle.
        """
        if name not in self.cocycles:
            raise UsageError(
                f"Expected cocycle block '{name}'."
                f" Available: {sorted(self.cocycles)}."
            )
        block = self.cocycles[name]
        return self.bundle(block.bundle), block.values

    def section(self, name: str) -> Tuple[GHilbertBundle, np.ndarray]:
        """
        Get named section with its bundle.
        """
        if name not in self.sections:
            raise UsageError(
                f"Expected section block '{name}'."
                f" Available: {sorted(self.sections)}."
            )
        block = self.sections[name]
        return self.bundle(block.bundle), block.values


def _expect(mapping: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise DocumentSyntaxError(f"Expected key '{key}' in {where}.")
    value = mapping[key]
    if not isinstance(value, kind):
        raise DocumentSyntaxError(
            f"Expected {kind.__name__} under '{key}' in {where}."
            f" Got: {type(value).__name__}."
        )
    return value


def _expect_records(
    records: Any, width: int, where: str, columns: Sequence[str]
) -> pd.DataFrame:
    if not isinstance(records, list) or not all(
        isinstance(record, list)
        and len(record) == width
        and all(isinstance(item, str) for item in record)
        for record in records
    ):
        raise DocumentSyntaxError(
            f"Expected list of {width} identifier records in {where}."
        )
    return pd.DataFrame(records, columns=list(columns), dtype=object)


def _validate_table(schema: pa.DataFrameSchema, table: pd.DataFrame, where: str):
    """
    Validate identifier table, raising with the failure cases.
    """
    try:
        schema.validate(table, lazy=True)
    except pa.errors.SchemaErrors as schema_errors:
        logging.error(f"Failure cases for {where}:\n{schema_errors.failure_cases}")
        cases = sorted(
            set(schema_errors.failure_cases["failure_case"].astype(str).tolist())
        )
        raise DocumentReferenceError(
            f"Unresolved or repeated identifiers in {where}: {cases}."
        ) from schema_errors


def _check_complete(mapping: Mapping[str, Any], ids: Sequence[str], where: str):
    unknown = sorted(set(mapping) - set(ids))
    if unknown:
        raise DocumentReferenceError(f"Unresolved identifiers in {where}: {unknown}.")
    missing = [key for key in ids if key not in mapping]
    if missing:
        raise DocumentReferenceError(f"Missing {where} for: {missing}.")


def decode_array(obj: Any, shape: Tuple[int, ...], where: str) -> np.ndarray:
    """
    Decode nested lists of numbers or ``[re, im]`` pairs.

    >>> decode_array([[1.0, 2.0]], (1,), "v")
    array([1.+2.j])
    >>> decode_array([1.0, 2.0], (2,), "v")
    array([1., 2.])
    """
    try:
        array = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentShapeError(f"Expected numeric array at {where}.") from exc
    if int(np.prod(shape)) == 0 and array.size == 0:
        return np.zeros(shape)
    if array.shape == shape:
        return array
    if array.shape == (*shape, 2):
        return array[..., 0] + 1j * array[..., 1]
    raise DocumentShapeError(
        f"Expected array of shape {shape} at {where}. Got: {array.shape}."
    )


def encode_array(values: np.ndarray) -> Any:
    """
    Encode array, complex entries as ``[re, im]`` pairs.

    >>> encode_array(np.array([1.0 + 2.0j]))
    [[1.0, 2.0]]
    """
    values = np.asarray(values)
    if np.iscomplexobj(values) and np.any(np.imag(values) != 0):
        return np.stack([np.real(values), np.imag(values)], axis=-1).tolist()
    return np.real(values).astype(float).tolist()


def _parse_groupoid(block: Dict[str, Any]) -> FiniteGroupoid:
    units = _expect(block, Keys.UNITS, list, Keys.GROUPOID)
    if not all(isinstance(unit, str) for unit in units):
        raise DocumentSyntaxError("Expected string unit identifiers.")
    if len(set(units)) != len(units):
        raise DocumentReferenceError("Expected unique unit identifiers.")
    arrows = _expect_records(
        _expect(block, Keys.ARROWS, list, Keys.GROUPOID),
        3,
        Keys.ARROWS,
        (Columns.ID, Columns.SRC, Columns.DST),
    )
    _validate_table(arrows_schema(units), arrows, Keys.ARROWS)
    arrow_ids = arrows[Columns.ID].tolist()

    compose = _expect_records(
        _expect(block, Keys.COMPOSE, list, Keys.GROUPOID),
        3,
        Keys.COMPOSE,
        (Columns.FIRST, Columns.SECOND, Columns.PRODUCT),
    )
    _validate_table(compose_schema(arrow_ids), compose, Keys.COMPOSE)
    inverse = _expect_records(
        _expect(block, Keys.INVERSE, list, Keys.GROUPOID),
        2,
        Keys.INVERSE,
        (Columns.ARROW, Columns.INVERSE),
    )
    _validate_table(inverse_schema(arrow_ids), inverse, Keys.INVERSE)
    missing_inverse = sorted(set(arrow_ids) - set(inverse[Columns.ARROW]))
    if missing_inverse:
        raise DocumentReferenceError(
            f"No inverse given for arrow: {missing_inverse[0]}."
        )

    unit_arrows = _expect(block, Keys.UNIT_ARROWS, dict, Keys.GROUPOID)
    _check_complete(unit_arrows, units, Keys.UNIT_ARROWS)
    if not all(isinstance(arrow, str) for arrow in unit_arrows.values()):
        raise DocumentSyntaxError("Expected string unit arrow identifiers.")
    unresolved = sorted(
        arrow for arrow in unit_arrows.values() if arrow not in set(arrow_ids)
    )
    if unresolved:
        raise DocumentReferenceError(f"Unresolved unit arrows: {unresolved}.")

    src = dict(zip(arrows[Columns.ID], arrows[Columns.SRC]))
    dst = dict(zip(arrows[Columns.ID], arrows[Columns.DST]))
    listed = set(zip(compose[Columns.FIRST], compose[Columns.SECOND]))
    not_composable = sorted(pair for pair in listed if src[pair[0]] != dst[pair[1]])
    if not_composable:
        raise DocumentReferenceError(
            f"Listed pairs are not composable: {not_composable}."
        )
    unlisted = [
        (first, second)
        for first in arrow_ids
        for second in arrow_ids
        if src[first] == dst[second] and (first, second) not in listed
    ]
    if unlisted:
        raise DocumentReferenceError(f"Composable pairs without product: {unlisted}.")

    return FiniteGroupoid.from_records(
        units=units,
        arrows=list(arrows.itertuples(index=False, name=None)),
        unit_arrows=unit_arrows,
        compose=compose.itertuples(index=False, name=None),
        inverse=dict(zip(inverse[Columns.ARROW], inverse[Columns.INVERSE])),
    )


def _parse_haar(block: Any, groupoid: FiniteGroupoid) -> Tuple[HaarSystem, bool]:
    if block == Keys.COUNTING:
        return HaarSystem.counting(groupoid), True
    weights = _expect(block, Keys.WEIGHTS, dict, Keys.HAAR)
    _check_complete(weights, groupoid.arrows, Keys.WEIGHTS)
    values = np.array(
        [
            decode_array(weights[arrow], (), f"{Keys.WEIGHTS}.{arrow}")
            for arrow in groupoid.arrows
        ]
    )
    if np.iscomplexobj(values):
        raise DocumentShapeError("Expected real Haar weights.")
    return HaarSystem(groupoid=groupoid, weights=values.astype(float)), False


def _parse_function(name: str, block: Any, groupoid: FiniteGroupoid) -> np.ndarray:
    if not isinstance(block, dict):
        raise DocumentSyntaxError(f"Expected arrow value mapping for function {name}.")
    _check_complete(block, groupoid.arrows, f"function {name}")
    values = [
        decode_array(block[arrow], (), f"{name}.{arrow}") for arrow in groupoid.arrows
    ]
    return np.array(values)


def _parse_bundle(name: str, block: Any, groupoid: FiniteGroupoid) -> GHilbertBundle:
    where = f"bundle {name}"
    dims_block = _expect(block, Keys.DIMS, dict, where)
    _check_complete(dims_block, groupoid.units, f"{where} dims")
    if not all(
        isinstance(dims_block[unit], int) and dims_block[unit] >= 0
        for unit in groupoid.units
    ):
        raise DocumentSyntaxError(f"Expected nonnegative integer dims in {where}.")
    dims = np.array([dims_block[unit] for unit in groupoid.units], dtype=int)
    matrices_block = _expect(block, Keys.MATRICES, dict, where)
    _check_complete(matrices_block, groupoid.arrows, f"{where} matrices")
    matrices = tuple(
        decode_array(
            matrices_block[arrow],
            (int(dims[groupoid.dst[idx]]), int(dims[groupoid.src[idx]])),
            f"{name}.{arrow}",
        )
        for idx, arrow in enumerate(groupoid.arrows)
    )
    return GHilbertBundle(groupoid=groupoid, dims=dims, matrices=matrices)


def _parse_section(
    name: str, block: Any, bundles: Dict[str, GHilbertBundle], over: str
) -> Tuple[str, np.ndarray]:
    where = f"section {name}"
    bundle_name = _expect(block, Keys.BUNDLE, str, where)
    if bundle_name not in bundles:
        raise DocumentReferenceError(f"Unresolved bundle '{bundle_name}' in {where}.")
    bundle = bundles[bundle_name]
    g = bundle.groupoid
    ids = g.arrows if over == ARROWS else g.units
    dims = bundle.range_dims if over == ARROWS else bundle.dims
    values = _expect(block, Keys.VALUES, dict, where)
    _check_complete(values, ids, where)
    vectors = [
        decode_array(values[key], (int(dim),), f"{name}.{key}")
        for key, dim in zip(ids, dims)
    ]
    section = np.zeros(
        (len(ids), bundle.max_dim),
        dtype=np.result_type(float, *vectors),
    )
    for idx, vector in enumerate(vectors):
        section[idx, : len(vector)] = vector
    return bundle_name, section


def from_dict(data: Any) -> InstanceDocument:
    """
    Build an instance document from decoded JSON.
    """
    if not isinstance(data, dict):
        raise DocumentSyntaxError("Expected JSON object at document root.")
    doc_format = data.get(Keys.FORMAT, FORMAT)
    if doc_format != FORMAT:
        raise DocumentSyntaxError(f"Expected format {FORMAT}. Got: {doc_format}.")
    groupoid = _parse_groupoid(_expect(data, Keys.GROUPOID, dict, "document"))
    haar, counting = _parse_haar(data.get(Keys.HAAR, Keys.COUNTING), groupoid)
    functions = {
        name: _parse_function(name, block, groupoid)
        for name, block in sorted(data.get(Keys.FUNCTIONS, dict()).items())
    }
    bundles = {
        name: _parse_bundle(name, block, groupoid)
        for name, block in sorted(data.get(Keys.BUNDLES, dict()).items())
    }
    cocycles = dict()
    for name, block in sorted(data.get(Keys.COCYCLES, dict()).items()):
        bundle_name, values = _parse_section(name, block, bundles, over=ARROWS)
        cocycles[name] = CocycleBlock(bundle=bundle_name, values=values)
    sections = dict()
    for name, block in sorted(data.get(Keys.SECTIONS, dict()).items()):
        over = block.get(Keys.OVER, UNITS) if isinstance(block, dict) else UNITS
        if over not in (ARROWS, UNITS):
            raise DocumentSyntaxError(
                f"Expected '{ARROWS}' or '{UNITS}' for section {name}. Got: {over}."
            )
        bundle_name, values = _parse_section(name, block, bundles, over=over)
        sections[name] = SectionBlock(bundle=bundle_name, over=over, values=values)
    return InstanceDocument(
        groupoid=groupoid,
        haar=haar,
        counting=counting,
        functions=functions,
        bundles=bundles,
        cocycles=cocycles,
        sections=sections,
    )


def parse(text: str) -> InstanceDocument:
    """
    Parse document text.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(
            f"Malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}."
        ) from exc
    return from_dict(data)


def read_document(path: Path) -> InstanceDocument:
    """
    Read and parse a document file.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentSyntaxError(f"Expected UTF-8 text in {path}.") from exc
    document = parse(text)
    logging.info(
        "Read instance document.",
        extra=dict(
            path=str(path),
            n_units=document.groupoid.n_units,
            n_arrows=document.groupoid.n_arrows,
        ),
    )
    return document


def _groupoid_dict(groupoid: FiniteGroupoid) -> Dict[str, Any]:
    first, second, product = groupoid.composable_pairs
    arrows, units = groupoid.arrows, groupoid.units
    return {
        Keys.UNITS: list(units),
        Keys.ARROWS: [
            [arrow, units[groupoid.src[idx]], units[groupoid.dst[idx]]]
            for idx, arrow in enumerate(arrows)
        ],
        Keys.UNIT_ARROWS: {
            unit: arrows[groupoid.unit_arrow[idx]] for idx, unit in enumerate(units)
        },
        Keys.COMPOSE: [
            [arrows[a], arrows[b], arrows[ab]]
            for a, b, ab in zip(first, second, product)
            if ab != NOT_COMPOSABLE
        ],
        Keys.INVERSE: [
            [arrow, arrows[groupoid.inverse[idx]]] for idx, arrow in enumerate(arrows)
        ],
    }


def _section_dict(
    bundle_name: str, bundle: GHilbertBundle, values: np.ndarray, over: str
) -> Dict[str, Any]:
    g = bundle.groupoid
    ids = g.arrows if over == ARROWS else g.units
    return {
        Keys.BUNDLE: bundle_name,
        Keys.VALUES: {
            key: encode_array(vector)
            for key, vector in zip(ids, section_vectors(bundle, values, over=over))
        },
    }


def to_dict(document: InstanceDocument) -> Dict[str, Any]:
    """
    Canonical JSON-ready form of a document.
    """
    g = document.groupoid
    data: Dict[str, Any] = {
        Keys.FORMAT: FORMAT,
        Keys.GROUPOID: _groupoid_dict(g),
        Keys.HAAR: Keys.COUNTING
        if document.counting
        else {
            Keys.WEIGHTS: dict(zip(g.arrows, encode_array(document.haar.weights)))
        },
    }
    if document.functions:
        data[Keys.FUNCTIONS] = {
            name: dict(zip(g.arrows, encode_array(values)))
            for name, values in document.functions.items()
        }
    if document.bundles:
        data[Keys.BUNDLES] = {
            name: {
                Keys.DIMS: dict(zip(g.units, (int(dim) for dim in bundle.dims))),
                Keys.MATRICES: {
                    arrow: encode_array(matrix)
                    for arrow, matrix in zip(g.arrows, bundle.matrices)
                },
            }
            for name, bundle in document.bundles.items()
        }
    if document.cocycles:
        data[Keys.COCYCLES] = {
            name: _section_dict(
                block.bundle, document.bundles[block.bundle], block.values, ARROWS
            )
            for name, block in document.cocycles.items()
        }
    if document.sections:
        data[Keys.SECTIONS] = {
            name: {
                Keys.OVER: block.over,
                **_section_dict(
                    block.bundle,
                    document.bundles[block.bundle],
                    block.values,
                    block.over,
                ),
            }
            for name, block in document.sections.items()
        }
    return data


def serialize(document: InstanceDocument) -> str:
    """
    Canonical document text with sorted keys.
    """
    return json.dumps(to_dict(document), sort_keys=True, indent=2) + "\n"


def instance_hash(document: InstanceDocument) -> str:
    """
    SHA-256 of the canonical document text.
    """
    return hashlib.sha256(serialize(document).encode("utf-8")).hexdigest()
