"""
Convolution algebra of a finite groupoid with Haar system.

``(f * g)(a) = sum over b in G^{dst a} of weight(b) f(b) g(b^-1 a)`` and
``f*(a) = conj(f(a^-1))``.
"""

from typing import List, Tuple

import numpy as np
from scipy import linalg

from groupoid_cocycles.groupoid_core import FiniteGroupoid, HaarSystem
from groupoid_cocycles.utils import hermitian_part, min_eigenvalue, scale_of


def delta(groupoid: FiniteGroupoid, arrow: int) -> np.ndarray:
    """
    Indicator function of one arrow.
    """
    values = np.zeros(groupoid.n_arrows, dtype=complex)
    values[arrow] = 1.0
    return values


def convolve(haar: HaarSystem, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Convolution product.
    """
    a, b, ab = haar.groupoid.composable_pairs
    result = np.zeros(haar.groupoid.n_arrows, dtype=complex)
    terms = haar.weights[a] * np.asarray(first)[a] * np.asarray(second)[b]
    np.add.at(result, ab, terms)
    return result


def involution(groupoid: FiniteGroupoid, values: np.ndarray) -> np.ndarray:
    """
    Adjoint ``f*(a) = conj(f(a^-1))``.
    """
    return np.conj(np.asarray(values)[groupoid.inverse])


def algebra_unit(haar: HaarSystem) -> np.ndarray:
    """
    Unit of the convolution algebra, ``1 / weight`` on unit arrows.
    """
    values = np.zeros(haar.groupoid.n_arrows, dtype=complex)
    units = haar.groupoid.unit_arrow
    values[units] = 1.0 / haar.weights[units]
    return values


def pointwise_multiply(multiplier: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Schur product of two functions on arrows.
    """
    return np.asarray(multiplier) * np.asarray(values)


def unit_multiply(groupoid: FiniteGroupoid, unit_values, values) -> np.ndarray:
    """
    Multiply by a function on units acting through the range.
    """
    return np.asarray(unit_values)[groupoid.dst] * np.asarray(values)


def regular_representation(haar: HaarSystem, values: np.ndarray) -> List[np.ndarray]:
    """
    Left regular representation at every unit.

    The block at ``x`` acts on functions on the source fiber ``G_x`` by
    ``(pi(f) xi)(a) = sum over b in G^{dst a} of weight(b) f(b) xi(b^-1 a)``.
    It is written in the orthonormal basis of ``l2(G_x)`` weighted by
    ``weight`` at the range, where ``pi(f*)`` is the conjugate transpose of
    ``pi(f)``.
    """
    g = haar.groupoid
    values = np.asarray(values)
    scaling = np.sqrt(haar.unit_weights)
    blocks = []
    for unit in range(g.n_units):
        fiber = g.source_fiber(unit)
        quotients = g.compose_table[
            fiber[:, np.newaxis], g.inverse[fiber][np.newaxis, :]
        ]
        raw = haar.weights[quotients] * values[quotients]
        ranges = scaling[g.dst[fiber]]
        blocks.append(ranges[:, np.newaxis] * raw / ranges[np.newaxis, :])
    return blocks


def cstar_norm(haar: HaarSystem, values: np.ndarray) -> float:
    """
    Norm of the regular representation.
    """
    return max(
        (
            float(linalg.norm(block, 2)) if block.size > 0 else 0.0
            for block in regular_representation(haar, values)
        ),
        default=0.0,
    )


def i_norm(haar: HaarSystem, values: np.ndarray) -> float:
    """
    Norm ``max(sup_x sum_{G^x} w|f|, sup_x sum_{G_x} w(a^-1)|f(a)|)``.

    Bounds the C*-norm from above.
    """
    g = haar.groupoid
    magnitudes = np.abs(np.asarray(values))
    range_sums = np.bincount(
        g.dst, weights=haar.weights * magnitudes, minlength=g.n_units
    )
    source_sums = np.bincount(
        g.src, weights=haar.weights[g.inverse] * magnitudes, minlength=g.n_units
    )
    return float(max(range_sums.max(initial=0.0), source_sums.max(initial=0.0)))


def positivity_margin(haar: HaarSystem, values: np.ndarray) -> Tuple[float, float]:
    """
    Hermitian defect and smallest eigenvalue over all representation blocks.
    """
    defect, lowest = 0.0, float(np.inf)
    for block in regular_representation(haar, values):
        defect = max(defect, scale_of(block - block.conj().T))
        lowest = min(lowest, min_eigenvalue(hermitian_part(block)))
    return defect, lowest


def is_positive_element(
    haar: HaarSystem, values: np.ndarray, tol: float = 1e-9
) -> bool:
    """
    Test that every representation block is Hermitian positive semidefinite.
    """
    defect, lowest = positivity_margin(haar, values)
    scale = 1.0 + cstar_norm(haar, values)
    return bool(defect <= tol * scale and lowest >= -tol * scale)


def random_element(
    groupoid: FiniteGroupoid, rng: np.random.Generator, real: bool = False
) -> np.ndarray:
    """
    Gaussian function on arrows.
    """
    values = rng.standard_normal(groupoid.n_arrows)
    if real:
        return values.astype(complex)
    return values + 1j * rng.standard_normal(groupoid.n_arrows)
