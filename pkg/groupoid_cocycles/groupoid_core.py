"""
Finite groupoids, Haar systems and standard constructions.

Composition follows ``compose(a, b) = ab`` which is defined exactly when
``src(a) == dst(b)``. The product has ``dst(ab) == dst(a)`` and
``src(ab) == src(b)``. Range fibers ``G^x`` collect arrows with ``dst == x``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from groupoid_cocycles.utils import (
    ConstructionError,
    GroupoidFormatError,
    ValidationReport,
)

# Composition table marker for pairs without product
NOT_COMPOSABLE = -1


class Axiom:

    """
    Names of groupoid and Haar system axioms used in reports.
    """

    UNIT_ARROW = "unit arrow"
    COMPOSABILITY = "composability"
    MISSING_PRODUCT = "missing product"
    RANGE_OF_PRODUCT = "range of product"
    SOURCE_OF_PRODUCT = "source of product"
    LEFT_NEUTRAL = "left neutral"
    RIGHT_NEUTRAL = "right neutral"
    INVERSE_ENDPOINTS = "inverse endpoints"
    INVERSE_LAW = "inverse law"
    INVERSE_INVOLUTION = "inverse involution"
    ASSOCIATIVITY = "associativity"
    POSITIVE_WEIGHT = "positive weight"
    LEFT_INVARIANCE = "left invariance"


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:

    """
    Finite groupoid with dense composition table.

    Arrays hold indices: ``src`` and ``dst`` index into ``units``,
    ``unit_arrow`` maps a unit index to an arrow index, ``compose_table``
    is an arrows by arrows table with ``NOT_COMPOSABLE`` where no product
    is defined and ``inverse`` maps arrow indices to arrow indices.
    """

    units: Tuple[str, ...]
    arrows: Tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    unit_arrow: np.ndarray
    compose_table: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        """
        Check table shapes.
        """
        n_units, n_arrows = len(self.units), len(self.arrows)
        expected = dict(
            src=(n_arrows,),
            dst=(n_arrows,),
            unit_arrow=(n_units,),
            compose_table=(n_arrows, n_arrows),
            inverse=(n_arrows,),
        )
        for name, shape in expected.items():
            actual = np.shape(getattr(self, name))
            if actual != shape:
                raise GroupoidFormatError(
                    f"Expected {name} table of shape {shape}. Got: {actual}."
                )
        if len(set(self.units)) != n_units or len(set(self.arrows)) != n_arrows:
            raise GroupoidFormatError("Expected unique unit and arrow identifiers.")
        for name, bound in (
            ("src", n_units),
            ("dst", n_units),
            ("unit_arrow", n_arrows),
            ("inverse", n_arrows),
        ):
            table = getattr(self, name)
            if np.any((table < 0) | (table >= bound)):
                raise GroupoidFormatError(f"Unresolved index in {name} table.")
        table = self.compose_table
        if np.any((table < NOT_COMPOSABLE) | (table >= n_arrows)):
            raise GroupoidFormatError("Unresolved index in composition table.")

    @classmethod
    def from_records(
        cls,
        units: Sequence[str],
        arrows: Sequence[Tuple[str, str, str]],
        unit_arrows: Mapping[str, str],
        compose: Iterable[Tuple[str, str, str]],
        inverse: Mapping[str, str],
    ) -> "FiniteGroupoid":
        """
        Build from identifier records.

        ``arrows`` are ``(id, src, dst)`` triples and ``compose`` lists
        ``(a, b, ab)`` triples.
        """
        unit_index = {unit: idx for idx, unit in enumerate(units)}
        arrow_index = {arrow[0]: idx for idx, arrow in enumerate(arrows)}

        def resolve(index: Dict[str, int], key: str, kind: str) -> int:
            try:
                return index[key]
            except KeyError as exc:
                raise GroupoidFormatError(
                    f"Unresolved {kind} identifier: {key}."
                ) from exc

        n_arrows = len(arrows)
        compose_table = np.full((n_arrows, n_arrows), NOT_COMPOSABLE, dtype=int)
        for first, second, product in compose:
            row = resolve(arrow_index, first, "arrow")
            col = resolve(arrow_index, second, "arrow")
            compose_table[row, col] = resolve(arrow_index, product, "arrow")
        inverse_table = np.full(n_arrows, NOT_COMPOSABLE, dtype=int)
        for arrow, arrow_inverse in inverse.items():
            inverse_table[resolve(arrow_index, arrow, "arrow")] = resolve(
                arrow_index, arrow_inverse, "arrow"
            )
        if np.any(inverse_table == NOT_COMPOSABLE):
            missing = arrows[int(np.flatnonzero(inverse_table == NOT_COMPOSABLE)[0])][0]
            raise GroupoidFormatError(f"No inverse given for arrow: {missing}.")
        unit_arrow = np.array(
            [
                resolve(arrow_index, unit_arrows.get(unit, ""), "unit arrow")
                for unit in units
            ],
            dtype=int,
        )
        return cls(
            units=tuple(units),
            arrows=tuple(arrow[0] for arrow in arrows),
            src=np.array(
                [resolve(unit_index, arrow[1], "unit") for arrow in arrows], dtype=int
            ),
            dst=np.array(
                [resolve(unit_index, arrow[2], "unit") for arrow in arrows], dtype=int
            ),
            unit_arrow=unit_arrow,
            compose_table=compose_table,
            inverse=inverse_table,
        )

    @property
    def n_units(self) -> int:
        """
        Number of units.
        """
        return len(self.units)

    @property
    def n_arrows(self) -> int:
        """
        Number of arrows.
        """
        return len(self.arrows)

    @cached_property
    def arrow_index(self) -> Dict[str, int]:
        """
        Arrow identifier to index.
        """
        return {arrow: idx for idx, arrow in enumerate(self.arrows)}

    @cached_property
    def unit_index(self) -> Dict[str, int]:
        """
        Unit identifier to index.
        """
        return {unit: idx for idx, unit in enumerate(self.units)}

    @cached_property
    def is_unit_arrow(self) -> np.ndarray:
        """
        Boolean mask of unit arrows.
        """
        mask = np.zeros(self.n_arrows, dtype=bool)
        mask[self.unit_arrow] = True
        return mask

    @cached_property
    def composable_pairs(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Index arrays ``(a, b, ab)`` over all defined products.
        """
        first, second = np.nonzero(self.compose_table != NOT_COMPOSABLE)
        return first, second, self.compose_table[first, second]

    def range_fiber(self, unit: int) -> np.ndarray:
        """
        Sorted arrow indices with dst equal to unit.
        """
        return np.flatnonzero(self.dst == unit)

    def source_fiber(self, unit: int) -> np.ndarray:
        """
        Sorted arrow indices with src equal to unit.
        """
        return np.flatnonzero(self.src == unit)

    @cached_property
    def orbit_labels(self) -> np.ndarray:
        """
        Orbit label per unit.
        """
        if self.n_units == 0:
            return np.zeros(0, dtype=int)
        adjacency = coo_matrix(
            (np.ones(self.n_arrows), (self.dst, self.src)),
            shape=(self.n_units, self.n_units),
        )
        _, labels = connected_components(adjacency, directed=False)
        return labels

    def orbits(self) -> List[np.ndarray]:
        """
        Unit indices grouped by orbit.
        """
        labels = self.orbit_labels
        return [np.flatnonzero(labels == label) for label in np.unique(labels)]

    def compose(self, first: str, second: str) -> Optional[str]:
        """
        Compose arrows by identifier.

        >>> pair_groupoid(2).compose("(0,1)", "(1,0)")
        '(0,0)'
        """
        product = self.compose_table[self.arrow_index[first], self.arrow_index[second]]
        return None if product == NOT_COMPOSABLE else self.arrows[product]


@dataclass(frozen=True, eq=False)
class HaarSystem:

    """
    Weighted counting measures on the range fibers.
    """

    groupoid: FiniteGroupoid
    weights: np.ndarray

    def __post_init__(self):
        """
        Check weight table shape.
        """
        if np.shape(self.weights) != (self.groupoid.n_arrows,):
            raise GroupoidFormatError(
                f"Expected {self.groupoid.n_arrows} weights."
                f" Got shape: {np.shape(self.weights)}."
            )

    @classmethod
    def counting(cls, groupoid: FiniteGroupoid) -> "HaarSystem":
        """
        Counting Haar system.
        """
        return cls(groupoid=groupoid, weights=np.ones(groupoid.n_arrows))

    @classmethod
    def from_unit_weights(
        cls, groupoid: FiniteGroupoid, unit_weights: np.ndarray
    ) -> "HaarSystem":
        """
        Left invariant system with ``weight(a) = unit_weights[src(a)]``.
        """
        unit_weights = np.asarray(unit_weights, dtype=float)
        return cls(groupoid=groupoid, weights=unit_weights[groupoid.src])

    @property
    def unit_weights(self) -> np.ndarray:
        """
        Weight of the unit arrow per unit.
        """
        return self.weights[self.groupoid.unit_arrow]


def random_invariant_haar(
    groupoid: FiniteGroupoid,
    rng: np.random.Generator,
    low: float = 0.5,
    high: float = 2.0,
) -> HaarSystem:
    """
    Random left invariant Haar system.

    Every left invariant system on a finite groupoid weights an arrow by a
    positive function of its source.
    """
    return HaarSystem.from_unit_weights(
        groupoid, rng.uniform(low, high, size=groupoid.n_units)
    )


def validate_groupoid(groupoid: FiniteGroupoid) -> ValidationReport:
    """
    Check groupoid axioms.

    >>> validate_groupoid(pair_groupoid(3)).ok
    True
    """
    report = ValidationReport()
    g = groupoid
    names = g.arrows
    table = g.compose_table

    for unit, arrow in enumerate(g.unit_arrow):
        if g.src[arrow] != unit or g.dst[arrow] != unit:
            report.add(Axiom.UNIT_ARROW, [names[arrow]], f"unit {g.units[unit]}")

    composable = g.src[:, np.newaxis] == g.dst[np.newaxis, :]
    defined = table != NOT_COMPOSABLE
    for first, second in zip(*np.nonzero(composable & ~defined)):
        report.add(Axiom.MISSING_PRODUCT, [names[first], names[second]])
    for first, second in zip(*np.nonzero(~composable & defined)):
        report.add(Axiom.COMPOSABILITY, [names[first], names[second]])

    first, second, product = g.composable_pairs
    for idx in np.flatnonzero(g.dst[product] != g.dst[first]):
        report.add(
            Axiom.RANGE_OF_PRODUCT,
            [names[first[idx]], names[second[idx]], names[product[idx]]],
        )
    for idx in np.flatnonzero(g.src[product] != g.src[second]):
        report.add(
            Axiom.SOURCE_OF_PRODUCT,
            [names[first[idx]], names[second[idx]], names[product[idx]]],
        )

    arrows = np.arange(g.n_arrows)
    left_units = g.unit_arrow[g.dst]
    right_units = g.unit_arrow[g.src]
    for arrow in np.flatnonzero(table[left_units, arrows] != arrows):
        report.add(Axiom.LEFT_NEUTRAL, [names[arrow]])
    for arrow in np.flatnonzero(table[arrows, right_units] != arrows):
        report.add(Axiom.RIGHT_NEUTRAL, [names[arrow]])

    inverse = g.inverse
    for arrow in np.flatnonzero(
        (g.src[inverse] != g.dst) | (g.dst[inverse] != g.src)
    ):
        report.add(Axiom.INVERSE_ENDPOINTS, [names[arrow]])
    bad_inverse = (table[arrows, inverse] != left_units) | (
        table[inverse, arrows] != right_units
    )
    for arrow in np.flatnonzero(bad_inverse):
        report.add(Axiom.INVERSE_LAW, [names[arrow]])
    for arrow in np.flatnonzero(inverse[inverse] != arrows):
        report.add(Axiom.INVERSE_INVOLUTION, [names[arrow]])

    if report.count(Axiom.MISSING_PRODUCT) > 0:
        logging.info(
            "Skipping associativity check on incomplete composition table.",
            extra=dict(missing_products=report.count(Axiom.MISSING_PRODUCT)),
        )
        return report
    _check_associativity(g, report)
    return report


def _check_associativity(groupoid: FiniteGroupoid, report: ValidationReport):
    """
    Check ``(ab)c == a(bc)`` on all composable triples.
    """
    table = groupoid.compose_table
    names = groupoid.arrows
    for middle in range(groupoid.n_arrows):
        lefts = np.flatnonzero(table[:, middle] != NOT_COMPOSABLE)
        rights = np.flatnonzero(table[middle, :] != NOT_COMPOSABLE)
        if len(lefts) == 0 or len(rights) == 0:
            continue
        left_products = table[lefts, middle]
        right_products = table[middle, rights]
        lhs = table[left_products[:, np.newaxis], rights[np.newaxis, :]]
        rhs = table[lefts[:, np.newaxis], right_products[np.newaxis, :]]
        for row, col in zip(*np.nonzero(lhs != rhs)):
            report.add(
                Axiom.ASSOCIATIVITY,
                [names[lefts[row]], names[middle], names[rights[col]]],
            )


def check_haar(haar: HaarSystem, rtol: float = 1e-12) -> ValidationReport:
    """
    Check positivity and left invariance of Haar weights.

    Left invariance requires ``weight(ab) == weight(b)`` for every composable
    pair since ``b -> ab`` translates ``G^{src(a)}`` onto ``G^{dst(a)}``.
    """
    report = ValidationReport()
    names = haar.groupoid.arrows
    weights = np.asarray(haar.weights, dtype=float)
    for arrow in np.flatnonzero(~(weights > 0)):
        report.add(Axiom.POSITIVE_WEIGHT, [names[arrow]], f"weight {weights[arrow]}")
    first, second, product = haar.groupoid.composable_pairs
    for idx in np.flatnonzero(
        ~np.isclose(weights[product], weights[second], rtol=rtol, atol=0.0)
    ):
        report.add(
            Axiom.LEFT_INVARIANCE,
            [names[first[idx]], names[second[idx]]],
            f"weight {weights[product[idx]]} != {weights[second[idx]]}",
        )
    return report


def pair_groupoid(n: int) -> FiniteGroupoid:
    """
    Pair groupoid on ``n`` points with arrows ``(x,y)`` from y to x.

    >>> pair_groupoid(2).n_arrows
    4
    """
    if n < 1:
        raise ConstructionError(f"Expected at least one point. Got: {n}.")
    points = np.arange(n)
    dst, src = [axis.ravel() for axis in np.meshgrid(points, points, indexing="ij")]
    compose_table = np.full((n * n, n * n), NOT_COMPOSABLE, dtype=int)
    composable = src[:, np.newaxis] == dst[np.newaxis, :]
    rows, cols = np.nonzero(composable)
    compose_table[rows, cols] = dst[rows] * n + src[cols]
    return FiniteGroupoid(
        units=tuple(str(x) for x in points),
        arrows=tuple(f"({x},{y})" for x, y in zip(dst, src)),
        src=src,
        dst=dst,
        unit_arrow=points * n + points,
        compose_table=compose_table,
        inverse=src * n + dst,
    )


def cyclic_group_table(n: int) -> np.ndarray:
    """
    Multiplication table of Z/n.

    >>> cyclic_group_table(3)[2, 2]
    1
    """
    elements = np.arange(n)
    return (elements[:, np.newaxis] + elements[np.newaxis, :]) % n


def _check_group_table(table: np.ndarray) -> Tuple[int, np.ndarray]:
    """
    Check group axioms and return the identity and inverses.
    """
    table = np.asarray(table)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise ConstructionError(f"Expected square group table. Got: {table.shape}.")
    order = table.shape[0]
    elements = np.arange(order)
    if np.any((table < 0) | (table >= order)):
        raise ConstructionError("Group table is not closed.")
    identities = [
        e
        for e in elements
        if np.array_equal(table[e], elements) and np.array_equal(table[:, e], elements)
    ]
    if len(identities) != 1:
        raise ConstructionError("Group table has no identity element.")
    identity = identities[0]
    inverses = np.argmax(table == identity, axis=1)
    if not np.all(table[elements, inverses] == identity) or not np.all(
        table[inverses, elements] == identity
    ):
        raise ConstructionError("Group table has elements without inverse.")
    left = table[table[:, :, np.newaxis], elements[np.newaxis, np.newaxis, :]]
    right = table[elements[:, np.newaxis, np.newaxis], table[np.newaxis, :, :]]
    if not np.array_equal(left, right):
        raise ConstructionError("Group table is not associative.")
    return int(identity), inverses


def group_groupoid(
    table: np.ndarray, labels: Optional[Sequence[str]] = None
) -> FiniteGroupoid:
    """
    Group as a groupoid with the single unit ``u``.
    """
    identity, inverses = _check_group_table(table)
    order = len(inverses)
    labels = [str(g) for g in range(order)] if labels is None else list(labels)
    return FiniteGroupoid(
        units=("u",),
        arrows=tuple(labels),
        src=np.zeros(order, dtype=int),
        dst=np.zeros(order, dtype=int),
        unit_arrow=np.array([identity]),
        compose_table=np.asarray(table, dtype=int).copy(),
        inverse=inverses,
    )


def transformation_groupoid(table: np.ndarray, action: np.ndarray) -> FiniteGroupoid:
    """
    Transformation groupoid of a left action.

    ``action[g, x]`` is ``g.x``. Arrow ``(x,g)`` goes from ``g^-1.x`` to
    ``x`` and ``(x,g)(g^-1.x,h) = (x,gh)``.
    """
    identity, inverses = _check_group_table(table)
    table = np.asarray(table)
    action = np.asarray(action)
    order = table.shape[0]
    if action.ndim != 2 or action.shape[0] != order or action.shape[1] == 0:
        raise ConstructionError(
            f"Expected action table of shape ({order}, n_points). Got: {action.shape}."
        )
    n_points = action.shape[1]
    points = np.arange(n_points)
    if np.any((action < 0) | (action >= n_points)):
        raise ConstructionError("Action does not map points to points.")
    if not np.array_equal(action[identity], points):
        raise ConstructionError("Identity does not act trivially.")
    composed = action[table, :]
    successive = action[
        np.arange(order)[:, np.newaxis, np.newaxis], action[np.newaxis, :, :]
    ]
    if not np.array_equal(composed, successive):
        raise ConstructionError("Action is not compatible with the group law.")

    # arrow (x, g) has index x * order + g
    xs, gs = [
        axis.ravel()
        for axis in np.meshgrid(points, np.arange(order), indexing="ij")
    ]
    n_arrows = n_points * order
    src = action[inverses[gs], xs]
    compose_table = np.full((n_arrows, n_arrows), NOT_COMPOSABLE, dtype=int)
    rows, cols = np.nonzero(src[:, np.newaxis] == xs[np.newaxis, :])
    compose_table[rows, cols] = xs[rows] * order + table[gs[rows], gs[cols]]
    return FiniteGroupoid(
        units=tuple(str(x) for x in points),
        arrows=tuple(f"({x},{g})" for x, g in zip(xs, gs)),
        src=src,
        dst=xs.copy(),
        unit_arrow=points * order + identity,
        compose_table=compose_table,
        inverse=src * order + inverses[gs],
    )


def disjoint_union(first: FiniteGroupoid, second: FiniteGroupoid) -> FiniteGroupoid:
    """
    Disjoint union with identifiers prefixed by ``0.`` and ``1.``.
    """
    offset_units, offset_arrows = first.n_units, first.n_arrows
    n_arrows = first.n_arrows + second.n_arrows
    compose_table = np.full((n_arrows, n_arrows), NOT_COMPOSABLE, dtype=int)
    compose_table[:offset_arrows, :offset_arrows] = first.compose_table
    shifted = np.where(
        second.compose_table == NOT_COMPOSABLE,
        NOT_COMPOSABLE,
        second.compose_table + offset_arrows,
    )
    compose_table[offset_arrows:, offset_arrows:] = shifted
    return FiniteGroupoid(
        units=tuple(f"0.{unit}" for unit in first.units)
        + tuple(f"1.{unit}" for unit in second.units),
        arrows=tuple(f"0.{arrow}" for arrow in first.arrows)
        + tuple(f"1.{arrow}" for arrow in second.arrows),
        src=np.concatenate([first.src, second.src + offset_units]),
        dst=np.concatenate([first.dst, second.dst + offset_units]),
        unit_arrow=np.concatenate(
            [first.unit_arrow, second.unit_arrow + offset_arrows]
        ),
        compose_table=compose_table,
        inverse=np.concatenate([first.inverse, second.inverse + offset_arrows]),
    )


def cyclic_rotation_action(n: int) -> np.ndarray:
    """
    Z/n acting on itself by rotation.
    """
    return cyclic_group_table(n)


class StandardKind:

    """
    Kinds accepted by make_standard.
    """

    PAIR = "pair"
    GROUP = "group"
    TRANSFORMATION = "transformation"
    DISJOINT_UNION = "disjoint_union"


def make_standard(kind: str, **params) -> Tuple[FiniteGroupoid, HaarSystem]:
    """
    Standard groupoid with counting Haar system.

    Parameters per kind: ``pair(n)``, ``group(table)``,
    ``transformation(table, action)`` and ``disjoint_union(first, second)``
    where ``first`` and ``second`` are groupoids.

    >>> groupoid, haar = make_standard("group", table=cyclic_group_table(3))
    >>> groupoid.n_arrows, groupoid.n_units
    (3, 1)
    """
    builders = {
        StandardKind.PAIR: pair_groupoid,
        StandardKind.GROUP: group_groupoid,
        StandardKind.TRANSFORMATION: transformation_groupoid,
        StandardKind.DISJOINT_UNION: disjoint_union,
    }
    if kind not in builders:
        raise ConstructionError(
            f"Expected kind to be one of {tuple(builders)}. Got: {kind}."
        )
    groupoid = builders[kind](**params)
    return groupoid, HaarSystem.counting(groupoid)
