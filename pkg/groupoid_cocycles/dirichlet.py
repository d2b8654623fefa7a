"""
Cocycle derivation, heat semigroup and Dirichlet form of a conditionally
negative type function.

The generator acts pointwise, ``Delta f = psi f``, and the Dirichlet form is

``L(f, g) = (f* * psi g + (psi f*) * g - psi (f* * g)) / 2``.

Expanding the convolutions gives, for composable ``(a, b)``, the coefficient
``kappa(a, b) = (psi(b) + psi(a) - psi(ab)) / 2`` on
``w(a) conj(f(a^-1)) g(b)``, and the cocycle identity turns it into
``(c(a^-1) | c(b))``.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from groupoid_cocycles import convolution, correspondence
from groupoid_cocycles.bundles import GHilbertBundle, check_section
from groupoid_cocycles.functions import (
    BASEPOINT_UNIT,
    CNTRepresentation,
    cocycle_norm_function,
    gns_cnt_function,
)
from groupoid_cocycles.groupoid_core import HaarSystem
from groupoid_cocycles.utils import ConstructionError, min_eigenvalue, scale_of

CLOSABILITY_NOTE = "not applicable at finite scale"


def _real_function(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    if np.iscomplexobj(psi):
        if scale_of(np.imag(psi)) > 0:
            raise ValueError("Expected real function.")
        psi = np.real(psi)
    return psi.astype(float)


def derivation(values: np.ndarray, cocycle: np.ndarray) -> np.ndarray:
    """
    Section ``i f(a) c(a)``.

    >>> derivation(np.array([0.0, 1.0]), np.array([[0.0], [2.0]]))
    array([[0.+0.j],
           [0.+2.j]])
    """
    return 1j * np.asarray(values)[:, np.newaxis] * np.asarray(cocycle)


def leibniz_residual(
    haar: HaarSystem,
    bundle: GHilbertBundle,
    cocycle: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
) -> float:
    """
    Max residual of ``d(f * g) = f d(g) + d(f) g``.
    """
    cocycle = check_section(bundle, cocycle)
    product = derivation(convolution.convolve(haar, first, second), cocycle)
    expanded = correspondence.left_action(
        haar, bundle, first, derivation(second, cocycle)
    ) + correspondence.right_action(
        haar, bundle, derivation(first, cocycle), second
    )
    return scale_of(product - expanded)


def generator(psi: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Pointwise multiplication by ``psi``.
    """
    return _real_function(psi) * np.asarray(values)


def semigroup(psi: np.ndarray, values: np.ndarray, t: float) -> np.ndarray:
    """
    Heat semigroup ``T_t f = exp(-t psi) f``.

    >>> semigroup(np.array([0.0, 1.0]), np.array([2.0, 3.0]), 0.0)
    array([2., 3.])
    """
    if t < 0:
        raise ConstructionError(f"Expected nonnegative time. Got: {t}.")
    return np.exp(-t * _real_function(psi)) * np.asarray(values)


def semigroup_law_residual(
    psi: np.ndarray, values: np.ndarray, first_time: float, second_time: float
) -> float:
    """
    Max residual of ``T_s T_t f = T_(s+t) f``.
    """
    return scale_of(
        semigroup(psi, semigroup(psi, values, second_time), first_time)
        - semigroup(psi, values, first_time + second_time)
    )


def contraction_margin(
    haar: HaarSystem, psi: np.ndarray, values: np.ndarray, t: float
) -> float:
    """
    ``|f| - |T_t f|`` in the C*-norm, nonnegative for conditionally negative
    type ``psi``.
    """
    return convolution.cstar_norm(haar, values) - convolution.cstar_norm(
        haar, semigroup(psi, values, t)
    )


def generator_residual(
    psi: np.ndarray, values: np.ndarray, t: float
) -> Tuple[float, float]:
    """
    Finite difference residual ``|(f - T_t f) / t - Delta f|`` and its bound
    ``t max(psi^2) max|f|``.
    """
    if t <= 0:
        raise ConstructionError(f"Expected positive time. Got: {t}.")
    psi = _real_function(psi)
    difference = (np.asarray(values) - semigroup(psi, values, t)) / t
    residual = scale_of(difference - generator(psi, values))
    bound = t * scale_of(psi**2) * scale_of(values)
    return residual, bound


def dirichlet_form(
    haar: HaarSystem, psi: np.ndarray, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    """
    Dirichlet form from convolutions and the generator.
    """
    g = haar.groupoid
    adjoint = convolution.involution(g, first)
    return (
        convolution.convolve(haar, adjoint, generator(psi, second))
        + convolution.convolve(haar, generator(psi, adjoint), second)
        - generator(psi, convolution.convolve(haar, adjoint, second))
    ) / 2


def kappa(haar: HaarSystem, psi: np.ndarray) -> np.ndarray:
    """
    Coefficient ``(psi(b) + psi(a) - psi(ab)) / 2`` per composable pair.
    """
    psi = _real_function(psi)
    a, b, ab = haar.groupoid.composable_pairs
    return (psi[b] + psi[a] - psi[ab]) / 2


def dirichlet_explicit(
    haar: HaarSystem,
    psi: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    sign: int = 1,
) -> np.ndarray:
    """
    Dirichlet form summed directly with the kernel coefficient.

    ``sign=-1`` uses the negated coefficient, which does not reproduce the
    form unless the form vanishes.
    """
    if sign not in (1, -1):
        raise ValueError(f"Expected sign 1 or -1. Got: {sign}.")
    g = haar.groupoid
    a, b, ab = g.composable_pairs
    terms = (
        sign
        * kappa(haar, psi)
        * haar.weights[a]
        * np.conj(np.asarray(first)[g.inverse[a]])
        * np.asarray(second)[b]
    )
    result = np.zeros(g.n_arrows, dtype=complex)
    np.add.at(result, ab, terms)
    return result


def kappa_residual(
    haar: HaarSystem, psi: np.ndarray, bundle: GHilbertBundle, cocycle: np.ndarray
) -> float:
    """
    Max residual of ``kappa(a, b) = (c(a^-1) | c(b))`` over composable pairs.
    """
    cocycle = check_section(bundle, cocycle)
    g = haar.groupoid
    a, b, _ = g.composable_pairs
    pairings = np.einsum("pi,pi->p", np.conj(cocycle[g.inverse[a]]), cocycle[b])
    return scale_of(kappa(haar, psi) - pairings)


def cp_block_margin(
    haar: HaarSystem, psi: np.ndarray, elements: Sequence[np.ndarray]
) -> float:
    """
    Smallest eigenvalue of the block matrices ``[pi_x(L(f_i, f_j))]``.
    """
    blocks = [
        [
            convolution.regular_representation(
                haar, dirichlet_form(haar, psi, left, right)
            )
            for right in elements
        ]
        for left in elements
    ]
    margin = float(np.inf)
    for unit in range(haar.groupoid.n_units):
        matrix = np.block([[row[unit] for row in rows] for rows in blocks])
        margin = min(margin, min_eigenvalue(matrix))
    return margin


@dataclass
class CyclicityResult:

    """
    Rank of the evaluations ``((f c) g)(a)`` against the fiber dimension at
    ``dst a``.
    """

    passed: bool
    deficits: Dict[str, int]


def evaluation_vectors(
    haar: HaarSystem, cocycle: np.ndarray, arrow: int
) -> np.ndarray:
    """
    Values ``((delta_(ab) c) delta_(b^-1))(a)`` for ``b`` in ``G^(src a)``.
    """
    g = haar.groupoid
    rows = []
    for second in g.range_fiber(g.src[arrow]):
        product = g.compose_table[arrow, second]
        rows.append(
            correspondence.right_action_at(
                haar,
                derivation(convolution.delta(g, product), cocycle),
                convolution.delta(g, g.inverse[second]),
                arrow,
            )
        )
    return np.array(rows)


def cyclicity_check(
    haar: HaarSystem, bundle: GHilbertBundle, cocycle: np.ndarray, tol: float = 1e-9
) -> CyclicityResult:
    """
    Check that the range of the derivation generates every fiber.
    """
    cocycle = check_section(bundle, cocycle)
    g = haar.groupoid
    deficits = dict()
    for arrow in range(g.n_arrows):
        dim = int(bundle.dims[g.dst[arrow]])
        if dim == 0:
            continue
        rows = evaluation_vectors(haar, cocycle, arrow)[:, :dim]
        rank = np.linalg.matrix_rank(rows, tol=tol * (1.0 + scale_of(rows)))
        if rank < dim:
            deficits[g.arrows[arrow]] = dim - int(rank)
    return CyclicityResult(passed=len(deficits) == 0, deficits=deficits)


@dataclass
class DerivationBound:

    """
    Section norm of ``d(f)`` against ``max|c| |f|_I``.
    """

    passed: bool
    norm: float
    bound: float


def derivation_bound_check(
    haar: HaarSystem,
    bundle: GHilbertBundle,
    cocycle: np.ndarray,
    values: np.ndarray,
    rtol: float = 1e-7,
) -> DerivationBound:
    """
    Check ``|d(f)| <= max|c(a)| |f|_I``.
    """
    cocycle = check_section(bundle, cocycle)
    norm = correspondence.section_norm(haar, bundle, derivation(values, cocycle))
    largest = float(np.sqrt(cocycle_norm_function(cocycle).max(initial=0.0)))
    bound = largest * convolution.i_norm(haar, values)
    return DerivationBound(
        passed=norm <= bound * (1.0 + rtol) + rtol, norm=norm, bound=bound
    )


@dataclass
class SauvageotReport:

    """
    Verification of the derivation ``d`` as a Sauvageot pair for ``psi``.

    Residuals are absolute sup-norms. ``kappa_tol`` and ``form_tol`` are
    ``tol`` scaled by the magnitude of the compared values.
    """

    representation: CNTRepresentation
    kappa_residual: float
    form_residual: float
    cyclicity: CyclicityResult
    tol: float
    kappa_tol: float
    form_tol: float
    closability: str = CLOSABILITY_NOTE
    form_residuals: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        """
        All three checks within tolerance.
        """
        return (
            self.kappa_residual <= self.kappa_tol
            and self.form_residual <= self.form_tol
            and self.cyclicity.passed
        )


def sauvageot_verify(
    haar: HaarSystem,
    psi: np.ndarray,
    tol: float = 1e-9,
    rng: Optional[np.random.Generator] = None,
    samples: int = 5,
    basepoint: str = BASEPOINT_UNIT,
) -> SauvageotReport:
    """
    Build the GNS cocycle of ``psi`` and check ``L(f, g) = <d f, d g>``.

    The kernel coefficient identity is checked pointwise, the form identity on
    ``samples`` random pairs and cyclicity by evaluation ranks.
    """
    psi = _real_function(psi)
    rng = np.random.default_rng(0) if rng is None else rng
    representation = gns_cnt_function(
        haar.groupoid, psi, tol=tol, basepoint=basepoint
    )
    bundle, cocycle = representation.bundle, representation.cocycle
    residuals, tols = [], []
    for _ in range(samples):
        first = convolution.random_element(haar.groupoid, rng)
        second = convolution.random_element(haar.groupoid, rng)
        form = dirichlet_form(haar, psi, first, second)
        pairing = correspondence.inner_product(
            haar, bundle, derivation(first, cocycle), derivation(second, cocycle)
        )
        residuals.append(scale_of(form - pairing))
        tols.append(tol * (1.0 + scale_of(form)))
    # Failing samples first, then the largest residual
    worst = max(
        range(len(residuals)),
        key=lambda i: (residuals[i] > tols[i], residuals[i]),
        default=None,
    )
    report = SauvageotReport(
        representation=representation,
        kappa_residual=kappa_residual(haar, psi, bundle, cocycle),
        form_residual=0.0 if worst is None else residuals[worst],
        cyclicity=cyclicity_check(haar, bundle, cocycle, tol=tol),
        tol=tol,
        kappa_tol=tol * (1.0 + scale_of(psi)),
        form_tol=tol if worst is None else tols[worst],
        form_residuals=tuple(residuals),
    )
    log = logging.info if report.passed else logging.warning
    log(
        "Verified Sauvageot pair.",
        extra=dict(
            passed=report.passed,
            kappa_residual=report.kappa_residual,
            form_residual=report.form_residual,
            cyclicity_deficits=report.cyclicity.deficits,
        ),
    )
    return report
