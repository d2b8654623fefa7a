"""
Positive type and conditionally negative type kernels on finite sets.

Inner products are conjugate linear in the first slot, ``(u|v) = vdot(u, v)``,
so a factorization satisfies ``kernel[x, y] == vdot(e(x), e(y))``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from groupoid_cocycles.utils import (
    KernelNotConditionallyNegativeError,
    KernelNotPositiveError,
    check_square,
    hermitian_part,
    max_residual,
    min_eigenvalue,
    scale_of,
    solve_intertwiner,
)


@dataclass
class Embedding:

    """
    Points of a finite set mapped to vectors.

    Affine embeddings carry the index of the point placed at the origin.
    """

    vectors: np.ndarray
    basepoint: Optional[int] = None

    @property
    def dim(self) -> int:
        """
        Dimension of the target space.
        """
        return self.vectors.shape[1]

    @property
    def n_points(self) -> int:
        """
        Number of embedded points.
        """
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        """
        Gram matrix ``vdot(e(x), e(y))``.
        """
        return gram(self.vectors)

    def squared_distances(self) -> np.ndarray:
        """
        Squared distances ``|e(x) - e(y)|^2``.
        """
        return squared_distances(self.vectors)


def gram(vectors: np.ndarray) -> np.ndarray:
    """
    Gram matrix of row vectors.

    >>> gram(np.array([[1.0, 0.0], [1.0, 1.0]]))
    array([[1., 1.],
           [1., 2.]])
    """
    vectors = np.asarray(vectors)
    return vectors.conj() @ vectors.T


def squared_distances(vectors: np.ndarray) -> np.ndarray:
    """
    Squared distance matrix of row vectors.
    """
    vectors = np.asarray(vectors)
    norms = np.real(np.einsum("ij,ij->i", vectors.conj(), vectors))
    return np.real(
        norms[:, np.newaxis] + norms[np.newaxis, :] - 2 * np.real(gram(vectors))
    )


def _kernel_scale(kernel: np.ndarray) -> float:
    return 1.0 + scale_of(kernel)


def pt_kernel_margin(kernel: np.ndarray) -> Tuple[float, float]:
    """
    Hermitian defect and minimum eigenvalue of a kernel.
    """
    kernel = check_square(kernel)
    return max_residual(kernel, kernel.conj().T), min_eigenvalue(kernel)


def is_pt_kernel(kernel: np.ndarray, tol: float = 1e-9) -> bool:
    """
    Test for positive type.

    >>> is_pt_kernel(np.ones((3, 3)))
    True
    >>> is_pt_kernel(np.array([[1.0, 2.0], [2.0, 1.0]]))
    False
    """
    hermitian_defect, lowest = pt_kernel_margin(kernel)
    scale = _kernel_scale(kernel)
    return bool(hermitian_defect <= tol * scale and lowest >= -tol * scale)


def _require_real(kernel: np.ndarray, tol: float) -> np.ndarray:
    kernel = check_square(kernel)
    if np.iscomplexobj(kernel):
        if scale_of(np.imag(kernel)) > tol:
            raise ValueError("Expected real kernel for conditionally negative type.")
        kernel = np.real(kernel)
    return kernel.astype(float)


def sum_zero_projector(n_points: int) -> np.ndarray:
    """
    Orthogonal projector onto coefficient vectors summing to zero.
    """
    return np.eye(n_points) - np.full((n_points, n_points), 1.0 / max(n_points, 1))


def cnt_kernel_margin(kernel: np.ndarray, tol: float = 1e-9) -> Tuple[float, float]:
    """
    Diagonal and symmetry defect together with the largest eigenvalue on the
    sum-zero subspace.
    """
    kernel = _require_real(kernel, tol=tol)
    n_points = kernel.shape[0]
    defect = max(scale_of(np.diag(kernel)), max_residual(kernel, kernel.T))
    if n_points < 2:
        return defect, 0.0
    projector = sum_zero_projector(n_points)
    compressed = projector @ hermitian_part(kernel) @ projector
    return defect, float(linalg.eigvalsh(compressed)[-1])


def is_cnt_kernel(kernel: np.ndarray, tol: float = 1e-9) -> bool:
    """
    Test for conditionally negative type.

    >>> is_cnt_kernel(np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]))
    True
    >>> is_cnt_kernel(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    False
    """
    defect, highest = cnt_kernel_margin(kernel, tol=tol)
    scale = _kernel_scale(np.real(kernel))
    return bool(defect <= tol * scale and highest <= tol * scale)


def basepoint_kernel(kernel: np.ndarray, basepoint: int) -> np.ndarray:
    """
    Positive type kernel attached to a conditionally negative one.

    ``phi(x, y) = (psi(x, x0) + psi(x0, y) - psi(x, y)) / 2``
    """
    kernel = check_square(kernel)
    return (
        kernel[:, basepoint][:, np.newaxis]
        + kernel[basepoint, :][np.newaxis, :]
        - kernel
    ) / 2


def gns_kernel(kernel: np.ndarray, tol: float = 1e-9) -> Embedding:
    """
    Factor a positive type kernel as a Gram matrix.

    Eigenvalues are sorted descending and those at most ``tol`` times the
    largest are dropped. The largest entry of each eigenvector is made real
    and positive so that the embedding is canonical.
    """
    kernel = check_square(kernel)
    if not is_pt_kernel(kernel, tol=tol):
        witness = min_eigenvalue(kernel)
        raise KernelNotPositiveError(
            f"Expected positive type kernel. Minimum eigenvalue: {witness}.",
            witness=witness,
        )
    n_points = kernel.shape[0]
    dtype = complex if np.iscomplexobj(kernel) else float
    if n_points == 0:
        return Embedding(vectors=np.zeros((0, 0), dtype=dtype))
    eigenvalues, eigenvectors = linalg.eigh(hermitian_part(kernel))
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
    largest = max(float(eigenvalues[0]), 0.0)
    keep = eigenvalues > tol * largest
    eigenvalues, eigenvectors = eigenvalues[keep], eigenvectors[:, keep]

    # Fix phases
    if eigenvectors.shape[1] > 0:
        pivots = np.argmax(np.abs(eigenvectors), axis=0)
        pivot_values = eigenvectors[pivots, np.arange(eigenvectors.shape[1])]
        eigenvectors = eigenvectors * (np.abs(pivot_values) / pivot_values)

    vectors = eigenvectors.conj() * np.sqrt(eigenvalues)[np.newaxis, :]
    logging.debug(
        "Factored kernel.",
        extra=dict(n_points=n_points, rank=int(keep.sum()), largest=largest),
    )
    return Embedding(vectors=vectors.astype(dtype, copy=False))


def gns_cnt_kernel(
    kernel: np.ndarray, basepoint: int = 0, tol: float = 1e-9
) -> Embedding:
    """
    Embed a conditionally negative type kernel in a real affine space.

    The basepoint is placed at the origin and ``|e(x) - e(y)|^2`` reproduces
    the kernel.
    """
    real_kernel = _require_real(kernel, tol=tol)
    if not is_cnt_kernel(real_kernel, tol=tol):
        _, witness = cnt_kernel_margin(real_kernel, tol=tol)
        raise KernelNotConditionallyNegativeError(
            "Expected conditionally negative type kernel."
            f" Largest eigenvalue on sum-zero vectors: {witness}.",
            witness=witness,
        )
    if not 0 <= basepoint < real_kernel.shape[0]:
        raise ValueError(f"Expected basepoint inside the point set. Got: {basepoint}.")
    symmetric = (real_kernel + real_kernel.T) / 2
    np.fill_diagonal(symmetric, 0.0)
    embedding = gns_kernel(basepoint_kernel(symmetric, basepoint), tol=tol)
    vectors = np.real(embedding.vectors).copy()
    vectors[basepoint] = 0.0
    return Embedding(vectors=vectors, basepoint=basepoint)


@dataclass
class IsometryResult:

    """
    Outcome of matching two embeddings.

    The map sends ``a`` to ``b`` as ``matrix @ a + offset``.
    """

    success: bool
    matrix: Optional[np.ndarray]
    offset: Optional[np.ndarray]
    residual: float
    mismatch: Optional[Tuple[int, int]] = None
    mismatch_value: float = 0.0

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """
        Apply the map to a vector.
        """
        if self.matrix is None:
            raise ValueError("Matching failed, no map to apply.")
        image = self.matrix @ vector
        return image if self.offset is None else image + self.offset


def kernel_isometry(
    first: Embedding, second: Embedding, tol: float = 1e-9, affine: bool = False
) -> IsometryResult:
    """
    Find the isometry carrying one embedding onto another.

    Linear embeddings are compared through their Gram matrices and affine
    embeddings through their squared distances. The first mismatched pair is
    reported when the comparison fails.
    """
    if first.n_points != second.n_points:
        raise ValueError(
            "Expected embeddings of the same point set."
            f" Got {first.n_points} and {second.n_points} points."
        )
    if affine:
        invariant_first, invariant_second = (
            first.squared_distances(),
            second.squared_distances(),
        )
    else:
        invariant_first, invariant_second = first.gram(), second.gram()
    difference = np.abs(invariant_first - invariant_second)
    scale = 1.0 + scale_of(invariant_first, invariant_second)
    if np.size(difference) > 0 and difference.max() > tol * scale:
        row, col = np.unravel_index(
            int(np.argmax(difference > tol * scale)), difference.shape
        )
        logging.info(
            "Embeddings do not match.",
            extra=dict(pair=(int(row), int(col)), value=float(difference[row, col])),
        )
        return IsometryResult(
            success=False,
            matrix=None,
            offset=None,
            residual=float(difference.max()),
            mismatch=(int(row), int(col)),
            mismatch_value=float(difference[row, col]),
        )

    if affine:
        origin = 0 if first.basepoint is None else first.basepoint
        source = first.vectors - first.vectors[origin]
        target = second.vectors - second.vectors[origin]
    else:
        source, target = first.vectors, second.vectors
    matrix, _ = solve_intertwiner(source, target)
    offset = None
    if affine:
        offset = second.vectors[origin] - matrix @ first.vectors[origin]
        image = first.vectors @ matrix.T + offset
    else:
        image = first.vectors @ matrix.T
    residual = max_residual(image, second.vectors)
    vector_scale = 1.0 + scale_of(second.vectors)
    return IsometryResult(
        success=residual <= tol * vector_scale,
        matrix=matrix,
        offset=offset,
        residual=residual,
    )
