"""
Deterministic random instances.

Every instance is drawn from ``numpy.random.default_rng(seed)``. Positive type
functions are matrix coefficients of random bundles and conditionally
negative type functions are squared norms of coboundaries, so both hold by
construction.
"""

import logging
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from groupoid_cocycles.bundles import (
    UNITS,
    coboundary,
    random_bundle,
    random_section,
)
from groupoid_cocycles.document import CocycleBlock, InstanceDocument, SectionBlock
from groupoid_cocycles.functions import cocycle_norm_function, matrix_coefficient
from groupoid_cocycles.groupoid_core import (
    FiniteGroupoid,
    HaarSystem,
    cyclic_group_table,
    cyclic_rotation_action,
    disjoint_union,
    group_groupoid,
    pair_groupoid,
    random_invariant_haar,
    transformation_groupoid,
)
from groupoid_cocycles.utils import ConstructionError, UsageError, check_seed


class GeneratorKind:

    """
    Groupoid families of generated instances.
    """

    PAIR = "pair"
    GROUP = "group"
    TRANSFORMATION = "transformation"
    DISJOINT = "disjoint"
    RANDOM = "random"


class WeightsChoice:

    """
    Haar systems of generated instances.
    """

    COUNTING = "counting"
    RANDOM = "random"


# Kinds the random kind chooses from
CONCRETE_KINDS = (
    GeneratorKind.PAIR,
    GeneratorKind.GROUP,
    GeneratorKind.TRANSFORMATION,
    GeneratorKind.DISJOINT,
)

# Largest size per kind keeping sweep instances at 30 arrows or fewer
SWEEP_SIZES = {
    GeneratorKind.PAIR: 5,
    GeneratorKind.GROUP: 8,
    GeneratorKind.TRANSFORMATION: 5,
    GeneratorKind.DISJOINT: 4,
}

# Names of generated blocks
PT_FUNCTION = "phi"
CNT_FUNCTION = "psi"
COMPLEX_BUNDLE = "E"
REAL_BUNDLE = "R"
UNIT_SECTION = "xi"
COCYCLE = "c"

SPEC_PATTERN = re.compile(r"^(?P<kind>[a-z]+):(?P<size>\d+)$")


@dataclass(frozen=True)
class GeneratorSpec:

    """
    Kind and size of a generated instance.
    """

    kind: str
    size: int


def parse_generator_spec(text: str) -> GeneratorSpec:
    """
    Parse ``kind:size``.

    >>> parse_generator_spec("pair:4")
    GeneratorSpec(kind='pair', size=4)
    """
    match = SPEC_PATTERN.match(text.strip())
    if match is None:
        raise UsageError(f"Expected generator spec as kind:size. Got: {text}.")
    kind, size = match.group("kind"), int(match.group("size"))
    if kind not in (*CONCRETE_KINDS, GeneratorKind.RANDOM):
        raise UsageError(
            f"Expected kind to be one of {(*CONCRETE_KINDS, GeneratorKind.RANDOM)}."
            f" Got: {kind}."
        )
    if size < 1:
        raise UsageError(f"Expected positive size. Got: {size}.")
    return GeneratorSpec(kind=kind, size=size)


def build_groupoid(
    kind: str, size: int, rng: Optional[np.random.Generator] = None
) -> FiniteGroupoid:
    """
    Groupoid of the given kind and size.

    ``random`` picks one of the other kinds with ``rng``.
    """
    if kind == GeneratorKind.RANDOM:
        if rng is None:
            raise UsageError("Expected random generator for the random kind.")
        kind = CONCRETE_KINDS[int(rng.integers(len(CONCRETE_KINDS)))]
    if kind == GeneratorKind.PAIR:
        return pair_groupoid(size)
    if kind == GeneratorKind.GROUP:
        return group_groupoid(cyclic_group_table(size))
    if kind == GeneratorKind.TRANSFORMATION:
        return transformation_groupoid(
            cyclic_group_table(size), cyclic_rotation_action(size)
        )
    if kind == GeneratorKind.DISJOINT:
        return disjoint_union(
            pair_groupoid(size), group_groupoid(cyclic_group_table(size))
        )
    raise UsageError(f"Unsupported generator kind: {kind}.")


def populate(
    groupoid: FiniteGroupoid,
    haar: HaarSystem,
    rng: np.random.Generator,
    counting: bool = True,
    max_dim: int = 3,
) -> InstanceDocument:
    """
    Document with random bundles, section, cocycle and the functions they
    induce.
    """
    complex_bundle = random_bundle(groupoid, rng, max_dim=max_dim, real=False)
    real_bundle = random_bundle(groupoid, rng, max_dim=max_dim, real=True)
    unit_section = random_section(complex_bundle, rng, over=UNITS)
    cocycle = coboundary(
        real_bundle, random_section(real_bundle, rng, over=UNITS, real=True)
    )
    return InstanceDocument(
        groupoid=groupoid,
        haar=haar,
        counting=counting,
        functions={
            CNT_FUNCTION: cocycle_norm_function(cocycle),
            PT_FUNCTION: matrix_coefficient(complex_bundle, unit_section),
        },
        bundles={COMPLEX_BUNDLE: complex_bundle, REAL_BUNDLE: real_bundle},
        cocycles={COCYCLE: CocycleBlock(bundle=REAL_BUNDLE, values=cocycle)},
        sections={
            UNIT_SECTION: SectionBlock(
                bundle=COMPLEX_BUNDLE, over=UNITS, values=unit_section
            )
        },
    )


def generate_random(
    kind: str,
    size: int,
    seed: int = 0,
    weights: str = WeightsChoice.COUNTING,
    max_dim: int = 3,
) -> InstanceDocument:
    """
    Generate an instance document deterministically from ``seed``.
    """
    rng = np.random.default_rng(check_seed(seed))
    if weights not in (WeightsChoice.COUNTING, WeightsChoice.RANDOM):
        raise UsageError(f"Expected weights counting or random. Got: {weights}.")
    groupoid = build_groupoid(kind, size, rng=rng)
    counting = weights == WeightsChoice.COUNTING
    haar = HaarSystem.counting(groupoid) if counting else random_invariant_haar(
        groupoid, rng
    )
    document = populate(groupoid, haar, rng, counting=counting, max_dim=max_dim)
    logging.info(
        "Generated instance.",
        extra=dict(kind=kind, size=size, seed=seed, n_arrows=groupoid.n_arrows),
    )
    return document


def random_instance(seed: int, max_dim: int = 3) -> InstanceDocument:
    """
    Sweep instance with at most 30 arrows.

    Kind, size and Haar system are all drawn from ``seed``.
    """
    rng = np.random.default_rng(check_seed(seed))
    kind = CONCRETE_KINDS[int(rng.integers(len(CONCRETE_KINDS)))]
    size = int(rng.integers(1, SWEEP_SIZES[kind] + 1))
    groupoid = build_groupoid(kind, size)
    counting = bool(rng.random() < 0.5)
    haar = HaarSystem.counting(groupoid) if counting else random_invariant_haar(
        groupoid, rng
    )
    return populate(groupoid, haar, rng, counting=counting, max_dim=max_dim)


def random_non_cnt_function(
    groupoid: FiniteGroupoid, rng: np.random.Generator
) -> np.ndarray:
    """
    Symmetric function vanishing at units with a negative value.

    A negative value ``psi(a)`` makes the sum-zero vector ``e_x - e_a`` a
    witness against conditionally negative type.
    """
    candidates = np.flatnonzero(~groupoid.is_unit_arrow)
    if len(candidates) == 0:
        raise ConstructionError("Expected an arrow that is not a unit.")
    values = rng.uniform(0.1, 1.0, size=groupoid.n_arrows)
    values = (values + values[groupoid.inverse]) / 2
    values[groupoid.unit_arrow] = 0.0
    negated = int(rng.choice(candidates))
    values[[negated, groupoid.inverse[negated]]] *= -1
    return values
