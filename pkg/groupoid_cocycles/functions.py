"""
Positive type and conditionally negative type functions on a groupoid.

A function is an array over arrows. Its kernel at unit ``x`` is indexed by
the sorted range fiber ``G^x`` and has entries ``f(a^-1 b)``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from groupoid_cocycles import kernels
from groupoid_cocycles.bundles import (
    UNITS,
    GHilbertBundle,
    check_section,
    cocycle_residuals,
    coboundary,
    section_from_vectors,
)
from groupoid_cocycles.groupoid_core import FiniteGroupoid
from groupoid_cocycles.utils import (
    GNSError,
    KernelNotConditionallyNegativeError,
    KernelNotPositiveError,
    max_residual,
    scale_of,
    solve_intertwiner,
)

BASEPOINT_UNIT = "unit"
BASEPOINT_FIRST = "first"

# Default time grid of the converse Schoenberg oracle
CONVERSE_TIMES = tuple(np.logspace(-3, 1, 9))


@dataclass(frozen=True, eq=False)
class PTRepresentation:

    """
    Bundle and unit section with ``phi(a) = (e(dst a) | L(a) e(src a))``.
    """

    bundle: GHilbertBundle
    section: np.ndarray


@dataclass(frozen=True, eq=False)
class CNTRepresentation:

    """
    Bundle and cocycle with ``psi(a) = |c(a)|^2``.
    """

    bundle: GHilbertBundle
    cocycle: np.ndarray


Representation = Union[PTRepresentation, CNTRepresentation]


def fiber_positions(groupoid: FiniteGroupoid) -> np.ndarray:
    """
    Position of each arrow inside its sorted range fiber.
    """
    positions = np.zeros(groupoid.n_arrows, dtype=int)
    for unit in range(groupoid.n_units):
        fiber = groupoid.range_fiber(unit)
        positions[fiber] = np.arange(len(fiber))
    return positions


def per_unit_kernel(
    groupoid: FiniteGroupoid, values: np.ndarray, unit: int
) -> np.ndarray:
    """
    Kernel ``[f(a^-1 b)]`` over the range fiber of unit.
    """
    fiber = groupoid.range_fiber(unit)
    products = groupoid.compose_table[
        groupoid.inverse[fiber][:, np.newaxis], fiber[np.newaxis, :]
    ]
    return np.asarray(values)[products]


def pt_function_margin(
    groupoid: FiniteGroupoid, values: np.ndarray
) -> Tuple[float, float, int]:
    """
    Hermitian defect, smallest kernel eigenvalue and the unit attaining it.
    """
    defect, lowest, worst = 0.0, float(np.inf), 0
    for unit in range(groupoid.n_units):
        unit_defect, unit_lowest = kernels.pt_kernel_margin(
            per_unit_kernel(groupoid, values, unit)
        )
        defect = max(defect, unit_defect)
        if unit_lowest < lowest:
            lowest, worst = unit_lowest, unit
    return defect, lowest, worst


def is_pt_function(
    groupoid: FiniteGroupoid, values: np.ndarray, tol: float = 1e-9
) -> bool:
    """
    Test every per-unit kernel for positive type.
    """
    return all(
        kernels.is_pt_kernel(per_unit_kernel(groupoid, values, unit), tol=tol)
        for unit in range(groupoid.n_units)
    )


def cnt_function_defects(
    groupoid: FiniteGroupoid, values: np.ndarray, tol: float = 1e-9
) -> Tuple[float, float, float]:
    """
    Defect at units, inverse symmetry defect and largest per-unit eigenvalue
    on sum-zero vectors.
    """
    values = np.asarray(values)
    if np.iscomplexobj(values):
        if scale_of(np.imag(values)) > tol:
            raise ValueError("Expected real function.")
        values = np.real(values)
    highest = max(
        [
            kernels.cnt_kernel_margin(per_unit_kernel(groupoid, values, unit), tol)[1]
            for unit in range(groupoid.n_units)
        ],
        default=0.0,
    )
    return (
        scale_of(values[groupoid.unit_arrow]),
        max_residual(values[groupoid.inverse], values),
        highest,
    )


def is_cnt_function(
    groupoid: FiniteGroupoid, values: np.ndarray, tol: float = 1e-9
) -> bool:
    """
    Test for conditionally negative type.

    Requires vanishing at units, symmetry under inverse and conditionally
    negative type per-unit kernels.
    """
    try:
        defects = cnt_function_defects(groupoid, values, tol=tol)
    except ValueError:
        return False
    scale = 1.0 + scale_of(np.real(values))
    return all(defect <= tol * scale for defect in defects)


def matrix_coefficient(bundle: GHilbertBundle, unit_section: np.ndarray) -> np.ndarray:
    """
    Function ``(e(dst a) | L(a) e(src a))``.
    """
    g = bundle.groupoid
    unit_section = check_section(bundle, unit_section, over=UNITS)
    transported = np.einsum("pij,pj->pi", bundle.padded, unit_section[g.src])
    return np.einsum("pi,pi->p", unit_section[g.dst].conj(), transported)


def cocycle_norm_function(cocycle: np.ndarray) -> np.ndarray:
    """
    Function ``|c(a)|^2``.
    """
    return np.real(np.einsum("pi,pi->p", np.conj(cocycle), cocycle))


def coboundary_norm_function(
    bundle: GHilbertBundle, unit_section: np.ndarray
) -> np.ndarray:
    """
    Function ``|xi(dst a) - L(a) xi(src a)|^2``.
    """
    return cocycle_norm_function(coboundary(bundle, unit_section))


def _check_orbit_ranks(groupoid: FiniteGroupoid, dims: Sequence[int]):
    dims = np.asarray(dims)
    for orbit in groupoid.orbits():
        if len(np.unique(dims[orbit])) > 1:
            units = [groupoid.units[unit] for unit in orbit]
            raise GNSError(
                f"Expected equal GNS ranks within orbit {units}."
                f" Got: {dims[orbit].tolist()}."
            )


def _raise_if_worse(
    residuals: np.ndarray, bound: float, groupoid: FiniteGroupoid, message: str
):
    if len(residuals) == 0 or residuals.max() <= bound:
        return
    worst = int(np.argmax(residuals))
    arrow = groupoid.arrows[worst]
    logging.warning(
        message, extra=dict(arrow=arrow, residual=float(residuals[worst]), bound=bound)
    )
    raise GNSError(
        f"{message} Residual {residuals[worst]:.3e} at arrow {arrow}.", arrow=arrow
    )


def _intertwiners(
    groupoid: FiniteGroupoid,
    rows: Sequence[np.ndarray],
    positions: np.ndarray,
    affine: bool,
) -> Tuple[Tuple[np.ndarray, ...], np.ndarray]:
    """
    Solve ``L(a) v_x(b) = v_y(ab)``, or ``v_y(ab) - v_y(a)`` when affine.
    """
    matrices = []
    residuals = np.zeros(groupoid.n_arrows)
    for arrow in range(groupoid.n_arrows):
        source_rows = rows[groupoid.src[arrow]]
        target_all = rows[groupoid.dst[arrow]]
        fiber = groupoid.range_fiber(groupoid.src[arrow])
        target_rows = target_all[positions[groupoid.compose_table[arrow, fiber]]]
        if affine:
            target_rows = target_rows - target_all[positions[arrow]]
        matrix, residuals[arrow] = solve_intertwiner(source_rows, target_rows)
        matrices.append(matrix)
    return tuple(matrices), residuals


def gns_pt_function(
    groupoid: FiniteGroupoid, values: np.ndarray, tol: float = 1e-9
) -> PTRepresentation:
    """
    GNS bundle and section of a positive type function.

    The fiber at ``x`` is the GNS space of the kernel at ``x`` spanned by
    vectors ``e_x(b)`` and ``L(a)`` is the unitary with
    ``L(a) e_x(b) = e_y(ab)``.
    """
    values = np.asarray(values)
    if not is_pt_function(groupoid, values, tol=tol):
        _, witness, unit = pt_function_margin(groupoid, values)
        raise KernelNotPositiveError(
            f"Expected positive type function. Minimum eigenvalue {witness}"
            f" at unit {groupoid.units[unit]}.",
            witness=witness,
        )
    positions = fiber_positions(groupoid)
    embeddings = [
        kernels.gns_kernel(per_unit_kernel(groupoid, values, unit), tol=tol)
        for unit in range(groupoid.n_units)
    ]
    dims = [embedding.dim for embedding in embeddings]
    _check_orbit_ranks(groupoid, dims)
    rows = [embedding.vectors for embedding in embeddings]
    matrices, residuals = _intertwiners(groupoid, rows, positions, affine=False)
    bound = tol * (1.0 + scale_of(values))
    _raise_if_worse(residuals, bound, groupoid, "Inconsistent GNS transport.")

    bundle = GHilbertBundle(
        groupoid=groupoid, dims=np.array(dims, dtype=int), matrices=matrices
    )
    section = section_from_vectors(
        bundle,
        [rows[unit][positions[groupoid.unit_arrow[unit]]] for unit in range(len(rows))],
        over=UNITS,
    )
    reconstruction = np.abs(matrix_coefficient(bundle, section) - values)
    _raise_if_worse(reconstruction, bound, groupoid, "GNS reconstruction failed.")
    logging.info(
        "Built GNS bundle of positive type function.",
        extra=dict(dims=dims, transport_residual=float(residuals.max(initial=0.0))),
    )
    return PTRepresentation(bundle=bundle, section=section)


def gns_cnt_function(
    groupoid: FiniteGroupoid,
    values: np.ndarray,
    tol: float = 1e-9,
    basepoint: str = BASEPOINT_UNIT,
) -> CNTRepresentation:
    """
    Real GNS bundle and cocycle of a conditionally negative type function.

    The kernel at ``x`` is embedded affinely with the chosen basepoint, either
    the unit arrow or the first arrow of the range fiber, and translated so
    that the unit arrow sits at the origin. Then ``c(a) = v_y(a)`` and
    ``L(a) v_x(b) = v_y(ab) - c(a)``.
    """
    if basepoint not in (BASEPOINT_UNIT, BASEPOINT_FIRST):
        raise ValueError(f"Expected basepoint 'unit' or 'first'. Got: {basepoint}.")
    if not is_cnt_function(groupoid, values, tol=tol):
        defects = cnt_function_defects(groupoid, values, tol=tol)
        raise KernelNotConditionallyNegativeError(
            "Expected conditionally negative type function."
            f" Defects (units, symmetry, eigenvalue): {defects}.",
            witness=defects[2],
        )
    values = np.real(np.asarray(values)).astype(float)
    positions = fiber_positions(groupoid)
    rows = []
    for unit in range(groupoid.n_units):
        unit_position = positions[groupoid.unit_arrow[unit]]
        embedding = kernels.gns_cnt_kernel(
            per_unit_kernel(groupoid, values, unit),
            basepoint=unit_position if basepoint == BASEPOINT_UNIT else 0,
            tol=tol,
        )
        rows.append(embedding.vectors - embedding.vectors[unit_position])
    dims = [unit_rows.shape[1] for unit_rows in rows]
    _check_orbit_ranks(groupoid, dims)
    matrices, residuals = _intertwiners(groupoid, rows, positions, affine=True)
    bound = tol * (1.0 + scale_of(values))
    _raise_if_worse(residuals, bound, groupoid, "Inconsistent affine GNS transport.")

    bundle = GHilbertBundle(
        groupoid=groupoid, dims=np.array(dims, dtype=int), matrices=matrices
    )
    cocycle = section_from_vectors(
        bundle,
        [
            rows[groupoid.dst[arrow]][positions[arrow]]
            for arrow in range(len(positions))
        ],
    )
    norm_residuals = np.abs(cocycle_norm_function(cocycle) - values)
    _raise_if_worse(norm_residuals, bound, groupoid, "Cocycle norm does not match.")
    identity_residual = cocycle_residuals(bundle, cocycle)
    for name, residual in identity_residual.items():
        if len(residual) > 0 and residual.max() > bound:
            raise GNSError(f"GNS cocycle fails {name}. Residual {residual.max():.3e}.")
    logging.info(
        "Built GNS cocycle of conditionally negative type function.",
        extra=dict(dims=dims, basepoint=basepoint),
    )
    return CNTRepresentation(bundle=bundle, cocycle=cocycle)


def spanning_family(representation: Representation) -> np.ndarray:
    """
    Arrow section ``L(a) e(src a)`` or ``c(a)`` spanning each fiber.
    """
    bundle = representation.bundle
    if isinstance(representation, PTRepresentation):
        section = check_section(bundle, representation.section, over=UNITS)
        return np.einsum(
            "pij,pj->pi", bundle.padded, section[bundle.groupoid.src]
        )
    return check_section(bundle, representation.cocycle)


@dataclass
class UniquenessResult:

    """
    Equivariant isometry between two representations, or the first
    mismatched inner product.
    """

    success: bool
    maps: Optional[Tuple[np.ndarray, ...]]
    residual: float
    mismatch: Optional[Tuple[str, str, str]] = None
    mismatch_value: float = 0.0


def gns_uniqueness_check(
    first: Representation, second: Representation, tol: float = 1e-9
) -> UniquenessResult:
    """
    Match two representations of the same function by per-unit isometries.

    Gram matrices of the spanning families are compared unit by unit and the
    isometries ``u_x`` solved from them. The residual covers both
    ``u c = c'`` and ``u(dst a) L(a) = L'(a) u(src a)``.
    """
    if type(first) is not type(second):
        raise ValueError("Expected two representations of the same kind.")
    g = first.bundle.groupoid
    if second.bundle.groupoid is not g:
        raise ValueError("Expected representations over the same groupoid.")
    family_first, family_second = spanning_family(first), spanning_family(second)
    scale = 1.0 + scale_of(family_first, family_second) ** 2
    maps = []
    residual = 0.0
    for unit in range(g.n_units):
        fiber = g.range_fiber(unit)
        rows_first = family_first[fiber, : first.bundle.dims[unit]]
        rows_second = family_second[fiber, : second.bundle.dims[unit]]
        difference = np.abs(kernels.gram(rows_first) - kernels.gram(rows_second))
        mismatched = np.argwhere(difference > tol * scale)
        if len(mismatched) > 0:
            row, col = mismatched[0]
            mismatch = (g.units[unit], g.arrows[fiber[row]], g.arrows[fiber[col]])
            logging.info(
                "Inner products differ.",
                extra=dict(mismatch=mismatch, value=float(difference[row, col])),
            )
            return UniquenessResult(
                success=False,
                maps=None,
                residual=float(difference.max()),
                mismatch=mismatch,
                mismatch_value=float(difference[row, col]),
            )
        matrix, _ = solve_intertwiner(rows_first, rows_second)
        residual = max(residual, max_residual(rows_first @ matrix.T, rows_second))
        maps.append(matrix)
    for arrow in range(g.n_arrows):
        residual = max(
            residual,
            max_residual(
                maps[g.dst[arrow]] @ first.bundle.matrices[arrow],
                second.bundle.matrices[arrow] @ maps[g.src[arrow]],
            ),
        )
    return UniquenessResult(
        success=residual <= tol * (1.0 + scale_of(family_second)),
        maps=tuple(maps),
        residual=residual,
    )


def schoenberg(values: np.ndarray, t: float) -> np.ndarray:
    """
    Function ``exp(-t psi)``.

    >>> schoenberg(np.array([0.0, 2.0]), 0.0)
    array([1., 1.])
    """
    if t < 0:
        raise ValueError(f"Expected nonnegative time. Got: {t}.")
    values = np.asarray(values)
    if np.iscomplexobj(values):
        if scale_of(np.imag(values)) > 0:
            raise ValueError("Expected real function.")
        values = np.real(values)
    return np.exp(-t * values)


@dataclass
class ConverseResult:

    """
    Desk-scale check of the converse Schoenberg direction.
    """

    times: Tuple[float, ...]
    margins: Tuple[float, ...]
    all_positive: bool
    limit: np.ndarray
    limit_residual: float
    limit_is_cnt: bool


def schoenberg_converse(
    groupoid: FiniteGroupoid,
    values: np.ndarray,
    times: Sequence[float] = CONVERSE_TIMES,
    tol: float = 1e-9,
    limit_tol: float = 1e-4,
) -> ConverseResult:
    """
    Recover ``psi`` from the family ``exp(-t psi)``.

    Positive type is tested at every time and the derivative at zero is
    estimated from ``(1 - phi_t) / t`` at the two smallest times with
    Richardson extrapolation.
    """
    times = tuple(sorted({float(t) for t in times}))
    if len(times) < 2 or times[0] <= 0:
        raise ValueError("Expected at least two distinct positive times.")
    families = [schoenberg(values, t) for t in times]
    margins = tuple(pt_function_margin(groupoid, phi)[1] for phi in families)
    all_positive = all(is_pt_function(groupoid, phi, tol=tol) for phi in families)
    (short, longer), (phi_short, phi_longer) = times[:2], families[:2]
    quotient_short = (1.0 - phi_short) / short
    quotient_longer = (1.0 - phi_longer) / longer
    limit = (longer * quotient_short - short * quotient_longer) / (longer - short)
    return ConverseResult(
        times=times,
        margins=margins,
        all_positive=all_positive,
        limit=limit,
        limit_residual=max_residual(limit, np.real(values)),
        limit_is_cnt=is_cnt_function(groupoid, limit, tol=limit_tol),
    )
