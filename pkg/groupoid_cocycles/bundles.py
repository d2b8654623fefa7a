"""
G-Hilbert bundles, cocycles and sections.

Sections are stored as zero padded arrays. An arrow section has shape
``(n_arrows, max_dim)`` and row ``a`` holds a vector of the fiber at
``dst(a)`` followed by zeros. A unit section has shape ``(n_units, max_dim)``.
Cocycles are arrow sections.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from groupoid_cocycles.groupoid_core import FiniteGroupoid
from groupoid_cocycles.utils import (
    BundleMorphismError,
    ConstructionError,
    GroupoidFormatError,
    ValidationReport,
    random_unitary,
    scale_of,
)

ARROWS = "arrows"
UNITS = "units"


class BundleAxiom:

    """
    Names of bundle and cocycle axioms used in reports.
    """

    UNIT_IDENTITY = "unit identity"
    FUNCTORIALITY = "functoriality"
    UNITARITY = "unitarity"
    INVERSE_LAW = "inverse law"
    ORBIT_DIMENSION = "orbit dimension"
    COCYCLE_IDENTITY = "cocycle identity"
    COCYCLE_AT_UNITS = "cocycle at units"
    COCYCLE_INVERSE = "cocycle inverse"


@dataclass(frozen=True, eq=False)
class GHilbertBundle:

    """
    Finite dimensional G-Hilbert bundle.

    ``matrices[a]`` maps the fiber at ``src(a)`` to the fiber at ``dst(a)``.
    """

    groupoid: FiniteGroupoid
    dims: np.ndarray
    matrices: Tuple[np.ndarray, ...]

    def __post_init__(self):
        """
        Check fiber dimensions against matrix shapes.
        """
        g = self.groupoid
        if np.shape(self.dims) != (g.n_units,):
            raise GroupoidFormatError(
                f"Expected {g.n_units} fiber dimensions. Got: {np.shape(self.dims)}."
            )
        if np.any(np.asarray(self.dims) < 0):
            raise GroupoidFormatError("Expected nonnegative fiber dimensions.")
        if len(self.matrices) != g.n_arrows:
            raise GroupoidFormatError(
                f"Expected {g.n_arrows} matrices. Got: {len(self.matrices)}."
            )
        for arrow, matrix in enumerate(self.matrices):
            expected = (int(self.dims[g.dst[arrow]]), int(self.dims[g.src[arrow]]))
            if np.shape(matrix) != expected:
                raise GroupoidFormatError(
                    f"Expected matrix of shape {expected} at arrow {g.arrows[arrow]}."
                    f" Got: {np.shape(matrix)}."
                )

    @property
    def max_dim(self) -> int:
        """
        Largest fiber dimension.
        """
        return int(np.max(self.dims)) if len(self.dims) > 0 else 0

    @property
    def is_real(self) -> bool:
        """
        Are all matrices real.
        """
        return not any(np.iscomplexobj(matrix) for matrix in self.matrices)

    @property
    def range_dims(self) -> np.ndarray:
        """
        Fiber dimension at the range of each arrow.
        """
        return self.dims[self.groupoid.dst]

    @cached_property
    def padded(self) -> np.ndarray:
        """
        Matrices zero padded to ``(n_arrows, max_dim, max_dim)``.
        """
        dim = self.max_dim
        padded = np.zeros(
            (self.groupoid.n_arrows, dim, dim), dtype=float if self.is_real else complex
        )
        for arrow, matrix in enumerate(self.matrices):
            rows, cols = matrix.shape
            padded[arrow, :rows, :cols] = matrix
        return padded

    def fiber_mask(self, over: str = ARROWS) -> np.ndarray:
        """
        Mask of meaningful section entries.
        """
        dims = self.range_dims if over == ARROWS else self.dims
        return np.arange(self.max_dim)[np.newaxis, :] < dims[:, np.newaxis]

    def padded_identity(self, dims: np.ndarray) -> np.ndarray:
        """
        Zero padded identities of the given sizes.
        """
        mask = (np.arange(self.max_dim)[np.newaxis, :] < dims[:, np.newaxis]).astype(
            float
        )
        return mask[:, :, np.newaxis] * np.eye(self.max_dim)[np.newaxis, :, :]

    def complexified(self) -> "GHilbertBundle":
        """
        Same bundle with complex matrices.
        """
        return GHilbertBundle(
            groupoid=self.groupoid,
            dims=self.dims,
            matrices=tuple(matrix.astype(complex) for matrix in self.matrices),
        )


def zero_section(
    bundle: GHilbertBundle, over: str = ARROWS, dtype=complex
) -> np.ndarray:
    """
    Zero section over arrows or units.
    """
    count = bundle.groupoid.n_arrows if over == ARROWS else bundle.groupoid.n_units
    return np.zeros((count, bundle.max_dim), dtype=dtype)


def check_section(
    bundle: GHilbertBundle, section: np.ndarray, over: str = ARROWS
) -> np.ndarray:
    """
    Check that a padded section fits the bundle.
    """
    section = np.asarray(section)
    count = bundle.groupoid.n_arrows if over == ARROWS else bundle.groupoid.n_units
    if section.shape != (count, bundle.max_dim):
        raise GroupoidFormatError(
            f"Expected section of shape {(count, bundle.max_dim)} over {over}."
            f" Got: {section.shape}."
        )
    if scale_of(section[~bundle.fiber_mask(over)]) > 0:
        raise GroupoidFormatError("Section has entries outside its fibers.")
    return section


def section_from_vectors(
    bundle: GHilbertBundle, vectors: Sequence[np.ndarray], over: str = ARROWS
) -> np.ndarray:
    """
    Pad per-arrow or per-unit vectors into a section.
    """
    dims = bundle.range_dims if over == ARROWS else bundle.dims
    ids = bundle.groupoid.arrows if over == ARROWS else bundle.groupoid.units
    if len(vectors) != len(dims):
        raise GroupoidFormatError(f"Expected {len(dims)} vectors. Got: {len(vectors)}.")
    dtype = np.result_type(float, *[np.asarray(vector) for vector in vectors])
    section = zero_section(bundle, over=over, dtype=dtype)
    for idx, vector in enumerate(vectors):
        vector = np.asarray(vector)
        if vector.shape != (dims[idx],):
            raise GroupoidFormatError(
                f"Expected vector of length {dims[idx]} at {ids[idx]}."
                f" Got shape: {vector.shape}."
            )
        section[idx, : dims[idx]] = vector
    return section


def section_vectors(
    bundle: GHilbertBundle, section: np.ndarray, over: str = ARROWS
) -> List[np.ndarray]:
    """
    Strip padding from a section.
    """
    dims = bundle.range_dims if over == ARROWS else bundle.dims
    return [np.asarray(section[idx, :dim]) for idx, dim in enumerate(dims)]


def _pairwise_max(values: np.ndarray) -> np.ndarray:
    """
    Max absolute value over all but the first axis.
    """
    if values.size == 0:
        return np.zeros(values.shape[0])
    return np.abs(values).reshape(values.shape[0], -1).max(axis=1)


def bundle_residuals(bundle: GHilbertBundle) -> Dict[str, np.ndarray]:
    """
    Residual of every bundle axiom.

    Functoriality residuals are indexed like ``groupoid.composable_pairs``,
    the others by arrow.
    """
    g = bundle.groupoid
    padded = bundle.padded
    adjoint = np.conj(np.transpose(padded, (0, 2, 1)))
    first, second, product = g.composable_pairs
    return {
        BundleAxiom.UNIT_IDENTITY: _pairwise_max(
            padded[g.unit_arrow] - bundle.padded_identity(bundle.dims)
        ),
        BundleAxiom.FUNCTORIALITY: _pairwise_max(
            padded[product] - padded[first] @ padded[second]
        ),
        BundleAxiom.UNITARITY: np.maximum(
            _pairwise_max(
                adjoint @ padded - bundle.padded_identity(bundle.dims[g.src])
            ),
            _pairwise_max(
                padded @ adjoint - bundle.padded_identity(bundle.dims[g.dst])
            ),
        ),
        BundleAxiom.INVERSE_LAW: _pairwise_max(padded[g.inverse] - adjoint),
    }


def validate_bundle(bundle: GHilbertBundle, tol: float = 1e-9) -> ValidationReport:
    """
    Check unit, functoriality, unitarity and inverse laws.
    """
    g = bundle.groupoid
    report = ValidationReport()
    for arrow in np.flatnonzero(bundle.dims[g.src] != bundle.dims[g.dst]):
        report.add(BundleAxiom.ORBIT_DIMENSION, [g.arrows[arrow]])
    residuals = bundle_residuals(bundle)
    first, second, _ = g.composable_pairs
    for axiom, values in residuals.items():
        for idx in np.flatnonzero(values > tol):
            if axiom == BundleAxiom.FUNCTORIALITY:
                arrows = [g.arrows[first[idx]], g.arrows[second[idx]]]
            elif axiom == BundleAxiom.UNIT_IDENTITY:
                arrows = [g.arrows[g.unit_arrow[idx]]]
            else:
                arrows = [g.arrows[idx]]
            report.add(axiom, arrows, f"residual {values[idx]:.3e}")
    return report


def cocycle_residuals(
    bundle: GHilbertBundle, cocycle: np.ndarray
) -> Dict[str, np.ndarray]:
    """
    Residual of the cocycle identity and its consequences.
    """
    g = bundle.groupoid
    cocycle = check_section(bundle, cocycle)
    padded = bundle.padded
    first, second, product = g.composable_pairs
    transported = np.einsum("pij,pj->pi", padded[first], cocycle[second])
    return {
        BundleAxiom.COCYCLE_IDENTITY: _pairwise_max(
            cocycle[product] - cocycle[first] - transported
        ),
        BundleAxiom.COCYCLE_AT_UNITS: _pairwise_max(cocycle[g.unit_arrow]),
        BundleAxiom.COCYCLE_INVERSE: _pairwise_max(
            cocycle[g.inverse]
            + np.einsum("pij,pj->pi", padded[g.inverse], cocycle)
        ),
    }


def validate_cocycle(
    bundle: GHilbertBundle, cocycle: np.ndarray, tol: float = 1e-9
) -> ValidationReport:
    """
    Check ``c(ab) = c(a) + L(a)c(b)``, vanishing at units and the inverse law.
    """
    g = bundle.groupoid
    report = ValidationReport()
    first, second, _ = g.composable_pairs
    for axiom, values in cocycle_residuals(bundle, cocycle).items():
        for idx in np.flatnonzero(values > tol):
            if axiom == BundleAxiom.COCYCLE_IDENTITY:
                arrows = [g.arrows[first[idx]], g.arrows[second[idx]]]
            elif axiom == BundleAxiom.COCYCLE_AT_UNITS:
                arrows = [g.arrows[g.unit_arrow[idx]]]
            else:
                arrows = [g.arrows[idx]]
            report.add(axiom, arrows, f"residual {values[idx]:.3e}")
    return report


def _same_groupoid(first: GHilbertBundle, second: GHilbertBundle):
    if first.groupoid is not second.groupoid:
        raise ConstructionError("Expected bundles over the same groupoid.")


def trivial_bundle(
    groupoid: FiniteGroupoid, dim: int = 1, real: bool = False
) -> GHilbertBundle:
    """
    Constant fiber with identity action.
    """
    dtype = float if real else complex
    return GHilbertBundle(
        groupoid=groupoid,
        dims=np.full(groupoid.n_units, dim, dtype=int),
        matrices=tuple(np.eye(dim, dtype=dtype) for _ in range(groupoid.n_arrows)),
    )


def regular_bundle(groupoid: FiniteGroupoid, real: bool = False) -> GHilbertBundle:
    """
    Fibers spanned by range fibers with left translation as action.
    """
    fibers = [groupoid.range_fiber(unit) for unit in range(groupoid.n_units)]
    positions = np.zeros(groupoid.n_arrows, dtype=int)
    for fiber in fibers:
        positions[fiber] = np.arange(len(fiber))
    dims = np.array([len(fiber) for fiber in fibers], dtype=int)
    matrices = []
    for arrow in range(groupoid.n_arrows):
        source_fiber = fibers[groupoid.src[arrow]]
        products = groupoid.compose_table[arrow, source_fiber]
        matrix = np.zeros(
            (dims[groupoid.dst[arrow]], len(source_fiber)),
            dtype=float if real else complex,
        )
        matrix[positions[products], np.arange(len(source_fiber))] = 1.0
        matrices.append(matrix)
    return GHilbertBundle(groupoid=groupoid, dims=dims, matrices=tuple(matrices))


def tensor_bundle(first: GHilbertBundle, second: GHilbertBundle) -> GHilbertBundle:
    """
    Fiberwise tensor product with Kronecker product action.
    """
    _same_groupoid(first, second)
    return GHilbertBundle(
        groupoid=first.groupoid,
        dims=first.dims * second.dims,
        matrices=tuple(
            np.kron(left, right) for left, right in zip(first.matrices, second.matrices)
        ),
    )


def direct_sum_bundle(first: GHilbertBundle, second: GHilbertBundle) -> GHilbertBundle:
    """
    Fiberwise direct sum with block diagonal action.
    """
    _same_groupoid(first, second)
    return GHilbertBundle(
        groupoid=first.groupoid,
        dims=first.dims + second.dims,
        matrices=tuple(
            linalg.block_diag(left, right)
            for left, right in zip(first.matrices, second.matrices)
        ),
    )


def gauge_transform(
    bundle: GHilbertBundle, unitaries: Sequence[np.ndarray]
) -> GHilbertBundle:
    """
    Conjugate the action by a unitary per unit.

    ``L'(a) = U[dst(a)] L(a) U[src(a)]^*``
    """
    g = bundle.groupoid
    return GHilbertBundle(
        groupoid=g,
        dims=bundle.dims,
        matrices=tuple(
            unitaries[g.dst[arrow]] @ matrix @ unitaries[g.src[arrow]].conj().T
            for arrow, matrix in enumerate(bundle.matrices)
        ),
    )


def random_bundle(
    groupoid: FiniteGroupoid,
    rng: np.random.Generator,
    max_dim: int = 3,
    real: bool = False,
) -> GHilbertBundle:
    """
    Random G-Hilbert bundle.

    Each orbit gets the regular bundle when its range fibers are small
    enough, padded with trivial summands, and the result is gauged by random
    unitaries.
    """
    labels = groupoid.orbit_labels
    regular = regular_bundle(groupoid, real=real)
    dims = np.zeros(groupoid.n_units, dtype=int)
    use_regular = dict()
    for orbit in groupoid.orbits():
        fiber_size = int(regular.dims[orbit[0]])
        label = int(labels[orbit[0]])
        use_regular[label] = fiber_size <= max_dim and rng.random() < 0.75
        low = fiber_size if use_regular[label] else 1
        dims[orbit] = rng.integers(low, max_dim + 1)
    dtype = float if real else complex
    matrices = []
    for arrow in range(groupoid.n_arrows):
        dim = int(dims[groupoid.dst[arrow]])
        if use_regular[int(labels[groupoid.dst[arrow]])]:
            block = regular.matrices[arrow]
            matrix = linalg.block_diag(
                block, np.eye(dim - block.shape[0], dtype=dtype)
            ).astype(dtype)
        else:
            matrix = np.eye(dim, dtype=dtype)
        matrices.append(matrix)
    plain = GHilbertBundle(groupoid=groupoid, dims=dims, matrices=tuple(matrices))
    unitaries = [random_unitary(rng, int(dim), real=real) for dim in dims]
    return gauge_transform(plain, unitaries)


def random_section(
    bundle: GHilbertBundle,
    rng: np.random.Generator,
    over: str = ARROWS,
    real: bool = False,
) -> np.ndarray:
    """
    Gaussian section over arrows or units.
    """
    shape = zero_section(bundle, over=over).shape
    values = rng.standard_normal(shape)
    if not real:
        values = values + 1j * rng.standard_normal(shape)
    return values * bundle.fiber_mask(over)


def coboundary(bundle: GHilbertBundle, unit_section: np.ndarray) -> np.ndarray:
    """
    Cocycle ``c(a) = xi(dst a) - L(a) xi(src a)`` of a unit section.
    """
    g = bundle.groupoid
    unit_section = check_section(bundle, unit_section, over=UNITS)
    transported = np.einsum("pij,pj->pi", bundle.padded, unit_section[g.src])
    return unit_section[g.dst] - transported


def cohomologous(
    bundle: GHilbertBundle, cocycle: np.ndarray, unit_section: np.ndarray
) -> np.ndarray:
    """
    Modify a cocycle by the coboundary of a unit section.
    """
    return check_section(bundle, cocycle) + coboundary(bundle, unit_section)


def affine_action(
    bundle: GHilbertBundle, cocycle: np.ndarray, arrow: int, vector: np.ndarray
) -> np.ndarray:
    """
    Affine isometry ``A(a)u = c(a) + L(a)u`` from the fiber at ``src(a)``.
    """
    g = bundle.groupoid
    vector = np.asarray(vector)
    source_dim = int(bundle.dims[g.src[arrow]])
    if vector.shape != (source_dim,):
        raise GroupoidFormatError(
            f"Expected vector of length {source_dim} at the source of"
            f" {g.arrows[arrow]}. Got shape: {vector.shape}."
        )
    range_dim = int(bundle.dims[g.dst[arrow]])
    return cocycle[arrow, :range_dim] + bundle.matrices[arrow] @ vector


@dataclass(frozen=True, eq=False)
class BundleMorphism:

    """
    Fiberwise linear map between bundles over the same groupoid.
    """

    source: GHilbertBundle
    target: GHilbertBundle
    maps: Tuple[np.ndarray, ...]

    def __post_init__(self):
        """
        Check shapes of the fiber maps.
        """
        _same_groupoid(self.source, self.target)
        for unit, matrix in enumerate(self.maps):
            expected = (int(self.target.dims[unit]), int(self.source.dims[unit]))
            if np.shape(matrix) != expected:
                raise GroupoidFormatError(
                    f"Expected fiber map of shape {expected} at unit"
                    f" {self.source.groupoid.units[unit]}. Got: {np.shape(matrix)}."
                )

    def equivariance_residuals(self) -> np.ndarray:
        """
        Residual of ``phi(dst a) L_E(a) = L_F(a) phi(src a)`` per arrow.
        """
        g = self.source.groupoid
        return np.array(
            [
                scale_of(
                    self.maps[g.dst[arrow]] @ self.source.matrices[arrow]
                    - self.target.matrices[arrow] @ self.maps[g.src[arrow]]
                )
                for arrow in range(g.n_arrows)
            ]
        )

    def validate(self, tol: float = 1e-9) -> "BundleMorphism":
        """
        Raise if the morphism is not equivariant.
        """
        residuals = self.equivariance_residuals()
        if len(residuals) > 0 and residuals.max() > tol:
            worst = int(np.argmax(residuals))
            arrow = self.source.groupoid.arrows[worst]
            logging.warning(
                "Bundle map is not equivariant.",
                extra=dict(arrow=arrow, residual=float(residuals[worst])),
            )
            raise BundleMorphismError(
                f"Expected equivariant bundle map. Residual {residuals[worst]:.3e}"
                f" at arrow {arrow}."
            )
        return self

    def then(self, other: "BundleMorphism") -> "BundleMorphism":
        """
        Composite ``other`` after ``self``.
        """
        if other.source is not self.target:
            raise ConstructionError("Expected composable bundle morphisms.")
        return BundleMorphism(
            source=self.source,
            target=other.target,
            maps=tuple(after @ before for before, after in zip(self.maps, other.maps)),
        )


def identity_morphism(bundle: GHilbertBundle) -> BundleMorphism:
    """
    Identity bundle map.
    """
    return BundleMorphism(
        source=bundle,
        target=bundle,
        maps=tuple(np.eye(int(dim)) for dim in bundle.dims),
    )


def inclusion_morphism(first: GHilbertBundle, second: GHilbertBundle) -> BundleMorphism:
    """
    Inclusion of ``first`` as the first summand of its sum with ``second``.
    """
    total = direct_sum_bundle(first, second)
    return BundleMorphism(
        source=first,
        target=total,
        maps=tuple(
            np.eye(int(total_dim), int(dim))
            for dim, total_dim in zip(first.dims, total.dims)
        ),
    )
