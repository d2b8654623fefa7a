"""
The correspondence of sections of the pulled back bundle.

Sections of ``r*E`` are padded arrow sections. Formulas follow the
convolution conventions of the algebra:

* ``(f xi)(a) = sum_{b in G^{dst a}} w(b) f(b) L(b) xi(b^-1 a)``
* ``(xi g)(a) = sum_{b in G^{src a}} w(b) xi(ab) g(b^-1)``
* ``<xi, eta>(a) = sum_{b in G^{dst a}} w(b) (xi(b^-1) | eta(b^-1 a))``
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from groupoid_cocycles import convolution
from groupoid_cocycles.bundles import (
    ARROWS,
    UNITS,
    BundleMorphism,
    GHilbertBundle,
    check_section,
    tensor_bundle,
    zero_section,
)
from groupoid_cocycles.groupoid_core import HaarSystem
from groupoid_cocycles.utils import ConstructionError, min_eigenvalue, scale_of


def _check_haar(haar: HaarSystem, bundle: GHilbertBundle):
    if haar.groupoid is not bundle.groupoid:
        raise ConstructionError("Expected Haar system and bundle on one groupoid.")


def left_action(
    haar: HaarSystem, bundle: GHilbertBundle, values: np.ndarray, section: np.ndarray
) -> np.ndarray:
    """
    Left action of the convolution algebra on sections.
    """
    _check_haar(haar, bundle)
    section = check_section(bundle, section)
    a, b, ab = haar.groupoid.composable_pairs
    terms = (haar.weights[a] * np.asarray(values)[a])[:, np.newaxis] * np.einsum(
        "pij,pj->pi", bundle.padded[a], section[b]
    )
    result = zero_section(bundle)
    np.add.at(result, ab, terms)
    return result


def right_action(
    haar: HaarSystem, bundle: GHilbertBundle, section: np.ndarray, values: np.ndarray
) -> np.ndarray:
    """
    Right action of the convolution algebra on sections.
    """
    _check_haar(haar, bundle)
    section = check_section(bundle, section)
    g = haar.groupoid
    a, b, ab = g.composable_pairs
    terms = (haar.weights[b] * np.asarray(values)[g.inverse[b]])[
        :, np.newaxis
    ] * section[ab]
    result = zero_section(bundle)
    np.add.at(result, a, terms)
    return result


def right_action_at(
    haar: HaarSystem, section: np.ndarray, values: np.ndarray, arrow: int
) -> np.ndarray:
    """
    Value of the right action at a single arrow.
    """
    g = haar.groupoid
    fiber = g.range_fiber(g.src[arrow])
    products = g.compose_table[arrow, fiber]
    coefficients = haar.weights[fiber] * np.asarray(values)[g.inverse[fiber]]
    return coefficients @ np.asarray(section)[products]


def inner_product(
    haar: HaarSystem, bundle: GHilbertBundle, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    """
    Algebra valued inner product, conjugate linear in the first slot.
    """
    _check_haar(haar, bundle)
    first = check_section(bundle, first)
    second = check_section(bundle, second)
    g = haar.groupoid
    a, b, ab = g.composable_pairs
    pairings = np.einsum("pi,pi->p", np.conj(first[g.inverse[a]]), second[b])
    result = np.zeros(g.n_arrows, dtype=complex)
    np.add.at(result, ab, haar.weights[a] * pairings)
    return result


def unit_inner_product(
    bundle: GHilbertBundle, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    """
    Fiberwise inner product of two unit sections.
    """
    first = check_section(bundle, first, over=UNITS)
    second = check_section(bundle, second, over=UNITS)
    return np.einsum("pi,pi->p", np.conj(first), second)


def section_norm(
    haar: HaarSystem, bundle: GHilbertBundle, section: np.ndarray
) -> float:
    """
    Norm ``|<xi, xi>|^(1/2)`` of a section.
    """
    pairing = inner_product(haar, bundle, section, section)
    return float(np.sqrt(convolution.cstar_norm(haar, pairing)))


@dataclass
class BoundedActionResult:

    """
    Smallest eigenvalue of ``|f|^2 pi(<xi,xi>) - pi(<f xi, f xi>)`` over units.
    """

    passed: bool
    margin: float


def bounded_action_check(
    haar: HaarSystem,
    bundle: GHilbertBundle,
    values: np.ndarray,
    section: np.ndarray,
    tol: float = 1e-9,
) -> BoundedActionResult:
    """
    Check the operator inequality bounding the left action.
    """
    norm = convolution.cstar_norm(haar, values)
    acted = left_action(haar, bundle, values, section)
    before = convolution.regular_representation(
        haar, inner_product(haar, bundle, section, section)
    )
    after = convolution.regular_representation(
        haar, inner_product(haar, bundle, acted, acted)
    )
    margin = min(
        (
            min_eigenvalue(norm**2 * block_before - block_after)
            for block_before, block_after in zip(before, after)
        ),
        default=0.0,
    )
    scale = 1.0 + norm**2 * max(
        (float(np.abs(block).max(initial=0.0)) for block in before), default=0.0
    )
    passed = margin >= -tol * scale
    if not passed:
        logging.warning(
            "Left action exceeds its bound.", extra=dict(margin=margin, norm=norm)
        )
    return BoundedActionResult(passed=passed, margin=margin)


def le_gall_map(
    bundle: GHilbertBundle, unit_section: np.ndarray, values: np.ndarray
) -> np.ndarray:
    """
    Section ``j(xi (x) f)(a) = xi(dst a) f(a)``.
    """
    unit_section = check_section(bundle, unit_section, over=UNITS)
    return unit_section[bundle.groupoid.dst] * np.asarray(values)[:, np.newaxis]


def compose_correspondences(
    haar: HaarSystem,
    first_bundle: GHilbertBundle,
    second_bundle: GHilbertBundle,
    first: np.ndarray,
    second: np.ndarray,
) -> np.ndarray:
    """
    Section ``j_c(xi (x) eta)`` of the tensor product bundle.

    ``j_c(xi (x) eta)(a) = sum_{b in G^{dst a}} w(b) xi(b) (x) L_F(b) eta(b^-1 a)``
    """
    _check_haar(haar, first_bundle)
    _check_haar(haar, second_bundle)
    first = check_section(first_bundle, first)
    second = check_section(second_bundle, second)
    g = haar.groupoid
    product_bundle = tensor_bundle(first_bundle, second_bundle)
    result = zero_section(product_bundle)
    a, b, ab = g.composable_pairs
    transported = np.einsum("pij,pj->pi", second_bundle.padded[a], second[b])
    for unit in range(g.n_units):
        selected = g.dst[a] == unit
        dim_first = int(first_bundle.dims[unit])
        dim_second = int(second_bundle.dims[unit])
        if dim_first * dim_second == 0 or not selected.any():
            continue
        terms = np.einsum(
            "pi,pj->pij",
            first[a[selected], :dim_first],
            transported[selected, :dim_second],
        ).reshape(-1, dim_first * dim_second)
        terms = haar.weights[a[selected]][:, np.newaxis] * terms
        np.add.at(result[:, : dim_first * dim_second], ab[selected], terms)
    return result


def basis_section(
    bundle: GHilbertBundle, position: int, index: int, over: str = ARROWS
) -> np.ndarray:
    """
    Section with a single basis vector at one arrow or unit.
    """
    section = zero_section(bundle, over=over)
    section[position, index] = 1.0
    return section


def span_deficit(
    bundle: GHilbertBundle, sections: Iterable[np.ndarray], tol: float = 1e-9
) -> int:
    """
    Codimension of the span of sections in all sections of the bundle.

    >>> from groupoid_cocycles.groupoid_core import pair_groupoid
    >>> from groupoid_cocycles.bundles import trivial_bundle
    >>> bundle = trivial_bundle(pair_groupoid(2), 1)
    >>> span_deficit(bundle, [basis_section(bundle, 0, 0)])
    3
    """
    mask = bundle.fiber_mask()
    total = int(mask.sum())
    rows = [np.asarray(section)[mask] for section in sections]
    if total == 0:
        return 0
    if not rows:
        return total
    matrix = np.array(rows)
    rank = int(np.linalg.matrix_rank(matrix, tol=tol * (1.0 + scale_of(matrix))))
    if rank < total:
        logging.warning("Sections do not span.", extra=dict(total=total, rank=rank))
    return total - rank


def le_gall_span_deficit(
    haar: HaarSystem, bundle: GHilbertBundle, tol: float = 1e-9
) -> int:
    """
    Codimension of the span of ``j(xi (x) f)`` in the sections of the bundle.

    ``j(delta_(dst a) e (x) delta_a)`` is supported on ``a``, so unit basis
    vectors against arrow indicators suffice.
    """
    _check_haar(haar, bundle)
    g = haar.groupoid
    sections = (
        le_gall_map(
            bundle,
            basis_section(bundle, int(g.dst[arrow]), index, over=UNITS),
            np.eye(g.n_arrows)[arrow],
        )
        for arrow in range(g.n_arrows)
        for index in range(int(bundle.dims[g.dst[arrow]]))
    )
    return span_deficit(bundle, sections, tol=tol)


def composition_span_deficit(
    haar: HaarSystem,
    first_bundle: GHilbertBundle,
    second_bundle: GHilbertBundle,
    tol: float = 1e-9,
) -> int:
    """
    Codimension of the span of ``j_c(xi (x) eta)`` in the sections of the
    tensor product bundle.

    Basis sections supported on composable pairs suffice since
    ``j_c(delta_b e (x) delta_(b^-1 a) e')`` is supported on ``a``.
    """
    g = haar.groupoid
    a, b, _ = g.composable_pairs
    sections = (
        compose_correspondences(
            haar,
            first_bundle,
            second_bundle,
            basis_section(first_bundle, first_arrow, i),
            basis_section(second_bundle, second_arrow, j),
        )
        for first_arrow, second_arrow in zip(a, b)
        for i in range(int(first_bundle.dims[g.dst[first_arrow]]))
        for j in range(int(second_bundle.dims[g.dst[second_arrow]]))
    )
    return span_deficit(tensor_bundle(first_bundle, second_bundle), sections, tol=tol)


def associativity_residual(
    haar: HaarSystem,
    bundles: Tuple[GHilbertBundle, GHilbertBundle, GHilbertBundle],
    sections: Tuple[np.ndarray, np.ndarray, np.ndarray],
) -> float:
    """
    Max residual between ``j_c(j_c(xi (x) eta) (x) zeta)`` and
    ``j_c(xi (x) j_c(eta (x) zeta))``.

    Kronecker products are associative so both sides live in the same
    padded fibers.
    """
    first_bundle, second_bundle, third_bundle = bundles
    xi, eta, zeta = sections
    left_joined = compose_correspondences(
        haar,
        tensor_bundle(first_bundle, second_bundle),
        third_bundle,
        compose_correspondences(haar, first_bundle, second_bundle, xi, eta),
        zeta,
    )
    right_joined = compose_correspondences(
        haar,
        first_bundle,
        tensor_bundle(second_bundle, third_bundle),
        xi,
        compose_correspondences(haar, second_bundle, third_bundle, eta, zeta),
    )
    return scale_of(left_joined - right_joined)


def pushforward(
    morphism: BundleMorphism, section: np.ndarray, tol: float = 1e-9
) -> np.ndarray:
    """
    Section ``phi(dst a) xi(a)`` of the target bundle.

    The morphism is validated for equivariance first.
    """
    morphism.validate(tol=tol)
    section = check_section(morphism.source, section)
    g = morphism.source.groupoid
    result = zero_section(morphism.target)
    for arrow in range(g.n_arrows):
        unit = g.dst[arrow]
        source_dim = int(morphism.source.dims[unit])
        target_dim = int(morphism.target.dims[unit])
        result[arrow, :target_dim] = morphism.maps[unit] @ section[arrow, :source_dim]
    return result
