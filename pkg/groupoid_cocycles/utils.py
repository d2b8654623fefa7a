"""
General utilities for groupoid-cocycles.
"""

import configparser
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

# Sections and keys of the verification config file
TOLERANCES = "tolerances"
SAMPLING = "sampling"
TOL = "tol"
NORM_RTOL = "norm_rtol"
LEIBNIZ_TOL = "leibniz_tol"
SEED = "seed"
RANDOM_SAMPLES = "random_samples"
SCHOENBERG_TIMES = "schoenberg_times"

# Largest accepted seed, exclusive
SEED_LIMIT = 2**64


class GroupoidFormatError(ValueError):

    """
    Tables or fibers do not fit together structurally.
    """


class ConstructionError(ValueError):

    """
    Standard construction received invalid input.
    """


class KernelNotPositiveError(ValueError):

    """
    Kernel failed the positive type test.
    """

    def __init__(self, message: str, witness: float):
        """
        Store minimum eigenvalue witness.
        """
        super().__init__(message)
        self.witness = witness


class KernelNotConditionallyNegativeError(ValueError):

    """
    Kernel failed the conditionally negative type test.
    """

    def __init__(self, message: str, witness: float):
        """
        Store maximum eigenvalue witness on the sum-zero subspace.
        """
        super().__init__(message)
        self.witness = witness


class GNSError(ValueError):

    """
    GNS factorization could not be made consistent.
    """

    def __init__(self, message: str, arrow: Optional[str] = None):
        """
        Store worst arrow.
        """
        super().__init__(message)
        self.arrow = arrow


class BundleMorphismError(ValueError):

    """
    Bundle map does not intertwine the groupoid actions.
    """


class DocumentError(ValueError):

    """
    Instance document could not be read.
    """


class DocumentSyntaxError(DocumentError):

    """
    Malformed document text or structure.
    """


class DocumentReferenceError(DocumentError):

    """
    Identifier in a document does not resolve.
    """


class DocumentShapeError(DocumentError):

    """
    Matrix or vector in a document has wrong dimensions.
    """


class UsageError(ValueError):

    """
    Command cannot run on the given input.
    """


@dataclass
class VerifyConfig:

    """
    Configuration from a verification ini file.
    """

    tol: float = 1e-9
    norm_rtol: float = 1e-7
    leibniz_tol: float = 1e-10
    seed: int = 0
    random_samples: int = 5
    schoenberg_times: Tuple[float, ...] = (0.1, 1.0, 10.0)

    def tolerances(self) -> Dict[str, float]:
        """
        Tolerances for reports.
        """
        return dict(
            tol=self.tol, norm_rtol=self.norm_rtol, leibniz_tol=self.leibniz_tol
        )


def check_seed(seed: int) -> int:
    """
    Check that seed fits in 64 bits.

    >>> check_seed(7)
    7
    """
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"Expected seed to be a 64-bit unsigned integer. Got: {seed}.")
    return int(seed)


def read_config(config_path: Optional[Path]) -> VerifyConfig:
    """
    Read verification config if it exists.
    """
    logging.info(
        "Reading config.",
        extra=dict(
            config_path_absolute=config_path
            if config_path is None
            else config_path.absolute()
        ),
    )
    default = VerifyConfig()
    if (config_path is None) or (not config_path.exists()):
        return default

    config_parser = configparser.ConfigParser()
    config_parser.read(config_path)

    values = dict()
    if TOLERANCES in config_parser:
        section = config_parser[TOLERANCES]
        for key in (TOL, NORM_RTOL, LEIBNIZ_TOL):
            if key not in section:
                continue
            try:
                values[key] = float(section[key])
            except ValueError:
                logging.error(
                    "Failed to parse tolerance.",
                    extra=dict(key=key, value=section[key]),
                )
    if SAMPLING in config_parser:
        section = config_parser[SAMPLING]
        try:
            if SEED in section:
                values[SEED] = check_seed(int(section[SEED]))
            if RANDOM_SAMPLES in section:
                values[RANDOM_SAMPLES] = int(section[RANDOM_SAMPLES])
            if SCHOENBERG_TIMES in section:
                values[SCHOENBERG_TIMES] = tuple(
                    float(value) for value in section[SCHOENBERG_TIMES].split(",")
                )
        except ValueError:
            logging.error(
                "Failed to parse sampling section.",
                extra=dict(sampling_section=dict(section.items())),
            )

    return VerifyConfig(**{**default.__dict__, **values})


@dataclass(frozen=True)
class Violation:

    """
    Violated axiom with witnessing arrows.
    """

    axiom: str
    arrows: Tuple[str, ...]
    detail: str = ""


@dataclass
class ValidationReport:

    """
    Collection of axiom violations, empty iff valid.
    """

    violations: List[Violation] = field(default_factory=list)
    max_witnesses: int = 20

    def add(self, axiom: str, arrows: Sequence[str], detail: str = ""):
        """
        Add violation unless the axiom already has enough witnesses.
        """
        if self.count(axiom) >= self.max_witnesses:
            return
        self.violations.append(
            Violation(axiom=axiom, arrows=tuple(arrows), detail=detail)
        )

    def count(self, axiom: str) -> int:
        """
        Count violations of axiom.
        """
        return sum(violation.axiom == axiom for violation in self.violations)

    def axioms(self) -> List[str]:
        """
        Violated axioms in first occurrence order.
        """
        return list(dict.fromkeys(violation.axiom for violation in self.violations))

    def extend(self, other: "ValidationReport"):
        """
        Add all violations of other report.
        """
        for violation in other.violations:
            self.add(violation.axiom, violation.arrows, violation.detail)

    @property
    def ok(self) -> bool:
        """
        Is the report empty.
        """
        return len(self.violations) == 0

    def __len__(self) -> int:
        """
        Number of violations.
        """
        return len(self.violations)


def scale_of(*arrays: np.ndarray) -> float:
    """
    Largest absolute entry over arrays, 0.0 for empty ones.

    >>> scale_of(np.array([1.0, -3.0]), np.array([]))
    3.0
    """
    return max(
        [float(np.max(np.abs(array))) for array in arrays if np.size(array) > 0],
        default=0.0,
    )


def max_residual(left: np.ndarray, right: np.ndarray) -> float:
    """
    Max-norm of difference, 0.0 for empty arrays.
    """
    return scale_of(np.asarray(left) - np.asarray(right))


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """
    Hermitian part of a square matrix.
    """
    matrix = np.asarray(matrix)
    return (matrix + matrix.conj().T) / 2


def check_square(matrix: np.ndarray) -> np.ndarray:
    """
    Check that matrix is square.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected square matrix. Got shape: {matrix.shape}.")
    return matrix


def min_eigenvalue(matrix: np.ndarray) -> float:
    """
    Smallest eigenvalue of the Hermitian part, inf for empty matrix.
    """
    matrix = check_square(matrix)
    if matrix.shape[0] == 0:
        return float(np.inf)
    return float(linalg.eigvalsh(hermitian_part(matrix))[0])


def solve_intertwiner(
    source_rows: np.ndarray, target_rows: np.ndarray
) -> Tuple[np.ndarray, float]:
    """
    Find u with u @ source_rows[i] = target_rows[i] for every row i.

    Solved in least squares and then replaced by the nearest isometry from
    the polar decomposition when u is square. Returns u and the residual of
    the least-squares solution.
    """
    source_rows = np.asarray(source_rows)
    target_rows = np.asarray(target_rows)
    dim_in, dim_out = source_rows.shape[1], target_rows.shape[1]
    dtype = np.result_type(source_rows, target_rows, float)
    if dim_in == 0 or dim_out == 0 or source_rows.shape[0] == 0:
        return np.zeros((dim_out, dim_in), dtype=dtype), scale_of(target_rows)
    solution, *_ = linalg.lstsq(source_rows, target_rows)
    matrix = solution.T
    residual = max_residual(source_rows @ solution, target_rows)
    if dim_in == dim_out:
        matrix, _ = linalg.polar(matrix)
    return matrix, residual


def random_unitary(rng: np.random.Generator, dim: int, real: bool) -> np.ndarray:
    """
    Haar random unitary, or orthogonal when real, matrix.
    """
    if dim == 0:
        return np.zeros((0, 0), dtype=float if real else complex)
    gaussian = rng.standard_normal((dim, dim))
    if not real:
        gaussian = gaussian + 1j * rng.standard_normal((dim, dim))
    q, r = linalg.qr(gaussian)
    diagonal = np.diag(r)
    phases = diagonal / np.where(np.abs(diagonal) > 0, np.abs(diagonal), 1.0)
    return q * phases[np.newaxis, :]
