"""
Verification commands over instance documents and their reports.

Every check reports a nonnegative residual against a tolerance. Identities
use residuals relative to ``1 + max|entry|`` of the compared values and
positivity checks report how far the smallest eigenvalue falls below zero.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from groupoid_cocycles import (
    __version__,
    bundles,
    convolution,
    correspondence,
    dirichlet,
    functions,
)
from groupoid_cocycles.document import InstanceDocument, instance_hash
from groupoid_cocycles.generators import (
    CNT_FUNCTION,
    COCYCLE,
    COMPLEX_BUNDLE,
    PT_FUNCTION,
    REAL_BUNDLE,
)
from groupoid_cocycles.groupoid_core import check_haar, validate_groupoid
from groupoid_cocycles.utils import (
    BundleMorphismError,
    GNSError,
    KernelNotConditionallyNegativeError,
    KernelNotPositiveError,
    UsageError,
    ValidationReport,
    VerifyConfig,
    scale_of,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2

# Uniqueness isometries are solved by least squares and checked more loosely
UNIQUENESS_TOL_FACTOR = 10.0

# Relative tolerance of the extrapolated Schoenberg limit per (1 + max psi)^3
CONVERSE_TOL = 1e-5

# Small time of the finite difference generator check
GENERATOR_TIME = 1e-3

# Number of elements in the complete positivity block check
CP_ELEMENTS = 3

# Residual of checks that fail without a measured residual
FAILED = 1.0


class Command:

    """
    Names of suite commands.
    """

    VALIDATE = "validate"
    CHECK_PT = "check-pt"
    CHECK_CNT = "check-cnt"
    GNS_PT = "gns-pt"
    GNS_CNT = "gns-cnt"
    SCHOENBERG = "schoenberg"
    NORM = "norm"
    CORRESPONDENCE = "correspondence-verify"
    FUNCTOR = "functor-verify"
    SAUVAGEOT = "sauvageot-verify"
    ALL = "all"


@dataclass
class CheckResult:

    """
    Outcome of one checked identity.
    """

    name: str
    residual: float
    tol: float
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """
        Residual within tolerance.
        """
        return bool(self.residual <= self.tol)

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-ready form.
        """
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tol": float(self.tol),
            "pass": self.passed,
            **self.detail,
        }


@dataclass
class SuiteContext:

    """
    Inputs shared by the commands of one run.
    """

    document: InstanceDocument
    config: VerifyConfig
    pt_function: str = PT_FUNCTION
    cnt_function: str = CNT_FUNCTION

    def rng(self) -> np.random.Generator:
        """
        Fresh generator so each command draws the same samples on its own or
        inside ``all``.
        """
        return np.random.default_rng(self.config.seed)

    def real_function(self, name: str) -> np.ndarray:
        """
        Named function that must be real.
        """
        values = self.document.function(name)
        if np.iscomplexobj(values):
            if scale_of(np.imag(values)) > self.config.tol:
                raise UsageError(f"Expected real function '{name}'.")
            values = np.real(values)
        return values

    def first_bundle(self) -> str:
        """
        Name of the complex bundle or else the first bundle.
        """
        names = self.document.bundles
        if COMPLEX_BUNDLE in names:
            return COMPLEX_BUNDLE
        if not names:
            raise UsageError("Expected at least one bundle block.")
        return sorted(names)[0]

    def second_bundle(self) -> str:
        """
        Name of the real bundle or else the last bundle.
        """
        names = self.document.bundles
        if REAL_BUNDLE in names:
            return REAL_BUNDLE
        if not names:
            raise UsageError("Expected at least one bundle block.")
        return sorted(names)[-1]


def relative_residual(left: np.ndarray, right: np.ndarray) -> float:
    """
    ``max|left - right|`` relative to ``1 + max(|left|, |right|)``.

    >>> relative_residual(np.array([1.0]), np.array([1.0]))
    0.0
    """
    return scale_of(np.asarray(left) - np.asarray(right)) / (
        1.0 + scale_of(left, right)
    )


def _below_zero(margin: float) -> float:
    return max(0.0, -float(margin))


def _report_check(name: str, report: ValidationReport) -> CheckResult:
    return CheckResult(
        name=name,
        residual=float(len(report)),
        tol=0.0,
        detail=dict(
            axioms=report.axioms(),
            violations=[
                f"{violation.axiom}: {', '.join(violation.arrows)}"
                for violation in report.violations[:5]
            ],
        ),
    )


def _is_total(representation: functions.Representation) -> bool:
    family = functions.spanning_family(representation)
    bundle = representation.bundle
    g = bundle.groupoid
    for unit in range(g.n_units):
        dim = int(bundle.dims[unit])
        rows = family[g.range_fiber(unit), :dim]
        if dim > 0 and np.linalg.matrix_rank(rows) < dim:
            return False
    return True


def _max_check(name: str, residuals: Sequence[float], tol: float) -> CheckResult:
    return CheckResult(name=name, residual=max(residuals, default=0.0), tol=tol)


def validate(context: SuiteContext) -> List[CheckResult]:
    """
    Groupoid axioms, Haar invariance, bundles and cocycles.
    """
    document = context.document
    checks = [
        _report_check("groupoid axioms", validate_groupoid(document.groupoid)),
        _report_check("haar system", check_haar(document.haar)),
    ]
    for name, bundle in sorted(document.bundles.items()):
        checks.append(
            _report_check(
                f"bundle {name}",
                bundles.validate_bundle(bundle, tol=context.config.tol),
            )
        )
    for name in sorted(document.cocycles):
        bundle, cocycle = document.cocycle(name)
        checks.append(
            _report_check(
                f"cocycle {name}",
                bundles.validate_cocycle(bundle, cocycle, tol=context.config.tol),
            )
        )
    return checks


def check_pt(context: SuiteContext) -> List[CheckResult]:
    """
    Positive type test of a function.
    """
    g = context.document.groupoid
    values = context.document.function(context.pt_function)
    defect, lowest, worst = functions.pt_function_margin(g, values)
    tol = context.config.tol * (1.0 + scale_of(values))
    return [
        CheckResult(name="hermitian kernels", residual=defect, tol=tol),
        CheckResult(
            name="kernel positivity",
            residual=_below_zero(lowest),
            tol=tol,
            detail=dict(witness=float(lowest), unit=g.units[worst]),
        ),
    ]


def check_cnt(context: SuiteContext) -> List[CheckResult]:
    """
    Conditionally negative type test of a function.
    """
    g = context.document.groupoid
    values = context.document.function(context.cnt_function)
    tol = context.config.tol * (1.0 + scale_of(np.real(values)))
    imaginary = scale_of(np.imag(values))
    checks = [CheckResult(name="real values", residual=imaginary, tol=tol)]
    if imaginary > tol:
        return checks
    at_units, symmetry, highest = functions.cnt_function_defects(
        g, np.real(values), tol=context.config.tol
    )
    checks.extend(
        [
            CheckResult(name="vanishes at units", residual=at_units, tol=tol),
            CheckResult(name="inverse symmetry", residual=symmetry, tol=tol),
            CheckResult(
                name="negative on sum-zero vectors",
                residual=max(0.0, highest),
                tol=tol,
                detail=dict(witness=float(highest)),
            ),
        ]
    )
    return checks


def gns_pt(context: SuiteContext) -> List[CheckResult]:
    """
    GNS bundle of a positive type function and its uniqueness.
    """
    document, tol = context.document, context.config.tol
    g = document.groupoid
    values = document.function(context.pt_function)
    try:
        representation = functions.gns_pt_function(g, values, tol=tol)
    except KernelNotPositiveError as exc:
        return [
            CheckResult(
                name="positive type",
                residual=_below_zero(exc.witness),
                tol=tol,
                detail=dict(witness=float(exc.witness)),
            )
        ]
    except GNSError as exc:
        return [
            CheckResult(
                name="consistent transport",
                residual=FAILED,
                tol=tol,
                detail=dict(arrow=exc.arrow, error=str(exc)),
            )
        ]
    reconstruction = functions.matrix_coefficient(
        representation.bundle, representation.section
    )
    checks = [
        CheckResult(
            name="reconstruction",
            residual=scale_of(reconstruction - values),
            tol=tol * (1.0 + scale_of(values)),
            detail=dict(dims=[int(dim) for dim in representation.bundle.dims]),
        ),
        _report_check(
            "gns bundle axioms",
            bundles.validate_bundle(representation.bundle, tol=tol),
        ),
    ]
    for name, block in sorted(document.sections.items()):
        bundle, section = document.section(name)
        if block.over != bundles.UNITS:
            continue
        coefficient = functions.matrix_coefficient(bundle, section)
        other = functions.PTRepresentation(bundle=bundle, section=section)
        if scale_of(coefficient - values) > tol * (1.0 + scale_of(values)):
            continue
        if not _is_total(other):
            continue
        result = functions.gns_uniqueness_check(
            representation,
            other,
            tol=tol * UNIQUENESS_TOL_FACTOR,
        )
        checks.append(
            CheckResult(
                name=f"uniqueness against section {name}",
                residual=(
                    result.residual
                    if result.success
                    else max(result.residual, FAILED)
                ),
                tol=tol * UNIQUENESS_TOL_FACTOR,
                detail=dict(mismatch=result.mismatch),
            )
        )
    return checks


def gns_cnt(context: SuiteContext) -> List[CheckResult]:
    """
    GNS cocycle of a conditionally negative type function under both basepoint
    conventions.
    """
    document, tol = context.document, context.config.tol
    g = document.groupoid
    values = context.real_function(context.cnt_function)
    scaled = tol * (1.0 + scale_of(values))
    try:
        representations = [
            functions.gns_cnt_function(g, values, tol=tol, basepoint=basepoint)
            for basepoint in (functions.BASEPOINT_UNIT, functions.BASEPOINT_FIRST)
        ]
    except KernelNotConditionallyNegativeError as exc:
        return [
            CheckResult(
                name="conditionally negative type",
                residual=max(0.0, float(exc.witness)),
                tol=scaled,
                detail=dict(witness=float(exc.witness)),
            )
        ]
    except (GNSError, ValueError) as exc:
        return [
            CheckResult(
                name="consistent transport",
                residual=FAILED,
                tol=scaled,
                detail=dict(error=str(exc)),
            )
        ]
    checks = []
    for basepoint, representation in zip(
        (functions.BASEPOINT_UNIT, functions.BASEPOINT_FIRST), representations
    ):
        residuals = bundles.cocycle_residuals(
            representation.bundle, representation.cocycle
        )
        checks.extend(
            [
                CheckResult(
                    name=f"norm reconstruction ({basepoint})",
                    residual=scale_of(
                        functions.cocycle_norm_function(representation.cocycle)
                        - values
                    ),
                    tol=scaled,
                ),
                CheckResult(
                    name=f"cocycle identity ({basepoint})",
                    residual=max(
                        (float(part.max(initial=0.0)) for part in residuals.values()),
                        default=0.0,
                    ),
                    tol=tol * (1.0 + np.sqrt(scale_of(values))),
                ),
            ]
        )
    candidates = [("basepoint conventions", representations[1])]
    for name in sorted(document.cocycles):
        bundle, cocycle = document.cocycle(name)
        other = functions.CNTRepresentation(bundle, cocycle)
        norms = functions.cocycle_norm_function(cocycle)
        if (
            bundle.is_real
            and scale_of(norms - values) <= scaled
            and _is_total(other)
        ):
            candidates.append((f"cocycle {name}", other))
    for label, other in candidates:
        result = functions.gns_uniqueness_check(
            representations[0], other, tol=tol * UNIQUENESS_TOL_FACTOR
        )
        checks.append(
            CheckResult(
                name=f"uniqueness against {label}",
                residual=(
                    result.residual
                    if result.success
                    else max(result.residual, FAILED)
                ),
                tol=tol * UNIQUENESS_TOL_FACTOR,
                detail=dict(mismatch=result.mismatch),
            )
        )
    return checks


def schoenberg(context: SuiteContext) -> List[CheckResult]:
    """
    Positive type of ``exp(-t psi)`` and the extrapolated converse.
    """
    g = context.document.groupoid
    values = context.real_function(context.cnt_function)
    tol = context.config.tol
    checks = []
    for t in context.config.schoenberg_times:
        phi = functions.schoenberg(values, t)
        _, lowest, worst = functions.pt_function_margin(g, phi)
        checks.append(
            CheckResult(
                name=f"exp(-t psi) positive type (t={t:g})",
                residual=_below_zero(lowest),
                tol=tol * (1.0 + scale_of(phi)),
                detail=dict(witness=float(lowest), unit=g.units[worst]),
            )
        )
    converse = functions.schoenberg_converse(g, values, tol=tol)
    checks.append(
        CheckResult(
            name="derivative at zero recovers psi",
            residual=converse.limit_residual / (1.0 + scale_of(values)) ** 3,
            tol=CONVERSE_TOL,
            detail=dict(limit_is_cnt=converse.limit_is_cnt),
        )
    )
    return checks


def norm(context: SuiteContext) -> List[CheckResult]:
    """
    C*-identity, representation homomorphism and the I-norm bound.
    """
    haar, config = context.document.haar, context.config
    g = haar.groupoid
    rng = context.rng()
    identity, homomorphism, adjoint, bound = [], [], [], []
    for _ in range(config.random_samples):
        first = convolution.random_element(g, rng)
        second = convolution.random_element(g, rng)
        norm_value = convolution.cstar_norm(haar, first)
        product_norm = convolution.cstar_norm(
            haar, convolution.convolve(haar, convolution.involution(g, first), first)
        )
        identity.append(abs(product_norm - norm_value**2) / (1.0 + norm_value**2))
        blocks_first = convolution.regular_representation(haar, first)
        blocks_second = convolution.regular_representation(haar, second)
        blocks_product = convolution.regular_representation(
            haar, convolution.convolve(haar, first, second)
        )
        blocks_adjoint = convolution.regular_representation(
            haar, convolution.involution(g, first)
        )
        for left, right, product, star in zip(
            blocks_first, blocks_second, blocks_product, blocks_adjoint
        ):
            homomorphism.append(relative_residual(product, left @ right))
            adjoint.append(relative_residual(star, left.conj().T))
        i_norm = convolution.i_norm(haar, first)
        bound.append(max(0.0, norm_value - i_norm) / (1.0 + i_norm))
    return [
        _max_check("C*-identity", identity, config.norm_rtol),
        _max_check("representation multiplicative", homomorphism, config.tol),
        _max_check("representation adjoint", adjoint, config.tol),
        _max_check("bounded by I-norm", bound, config.tol),
    ]


def correspondence_verify(context: SuiteContext) -> List[CheckResult]:
    """
    Bimodule axioms, inner product identities and the unit section module.
    """
    haar, config = context.document.haar, context.config
    g = haar.groupoid
    bundle = context.document.bundle(context.first_bundle())
    rng = context.rng()
    names = (
        "left module",
        "right module",
        "bimodule",
        "inner product right linear",
        "inner product hermitian",
        "adjointable left action",
        "unit section inner product",
        "unit section module map",
    )
    residuals: Dict[str, List[float]] = {name: [] for name in names}
    positivity, bounded = [], []
    for _ in range(config.random_samples):
        f, g_, h = (convolution.random_element(g, rng) for _ in range(3))
        xi, eta = (bundles.random_section(bundle, rng) for _ in range(2))
        left = correspondence.left_action
        right = correspondence.right_action
        inner = correspondence.inner_product
        residuals["left module"].append(
            relative_residual(
                left(haar, bundle, convolution.convolve(haar, f, g_), xi),
                left(haar, bundle, f, left(haar, bundle, g_, xi)),
            )
        )
        residuals["right module"].append(
            relative_residual(
                right(haar, bundle, xi, convolution.convolve(haar, g_, h)),
                right(haar, bundle, right(haar, bundle, xi, g_), h),
            )
        )
        residuals["bimodule"].append(
            relative_residual(
                right(haar, bundle, left(haar, bundle, f, xi), g_),
                left(haar, bundle, f, right(haar, bundle, xi, g_)),
            )
        )
        residuals["inner product right linear"].append(
            relative_residual(
                inner(haar, bundle, xi, right(haar, bundle, eta, g_)),
                convolution.convolve(haar, inner(haar, bundle, xi, eta), g_),
            )
        )
        residuals["inner product hermitian"].append(
            relative_residual(
                convolution.involution(g, inner(haar, bundle, xi, eta)),
                inner(haar, bundle, eta, xi),
            )
        )
        residuals["adjointable left action"].append(
            relative_residual(
                inner(haar, bundle, left(haar, bundle, f, xi), eta),
                inner(
                    haar,
                    bundle,
                    xi,
                    left(haar, bundle, convolution.involution(g, f), eta),
                ),
            )
        )
        pairing = inner(haar, bundle, xi, xi)
        _, lowest = convolution.positivity_margin(haar, pairing)
        positivity.append(_below_zero(lowest) / (1.0 + scale_of(pairing)))
        result = correspondence.bounded_action_check(
            haar, bundle, f, xi, tol=config.tol
        )
        bounded.append(_below_zero(result.margin) / (1.0 + scale_of(pairing)))

        unit_first = bundles.random_section(bundle, rng, over=bundles.UNITS)
        unit_second = bundles.random_section(bundle, rng, over=bundles.UNITS)
        joined_first = correspondence.le_gall_map(bundle, unit_first, f)
        joined_second = correspondence.le_gall_map(bundle, unit_second, g_)
        residuals["unit section inner product"].append(
            relative_residual(
                inner(haar, bundle, joined_first, joined_second),
                convolution.convolve(
                    haar,
                    convolution.involution(g, f),
                    convolution.unit_multiply(
                        g,
                        correspondence.unit_inner_product(
                            bundle, unit_first, unit_second
                        ),
                        g_,
                    ),
                ),
            )
        )
        residuals["unit section module map"].append(
            relative_residual(
                correspondence.le_gall_map(
                    bundle, unit_first, convolution.convolve(haar, f, g_)
                ),
                right(haar, bundle, joined_first, g_),
            )
        )
    checks = [_max_check(name, residuals[name], config.tol) for name in names]
    checks.append(_max_check("inner product positive", positivity, config.tol))
    checks.append(_max_check("bounded left action", bounded, config.tol))
    deficit = correspondence.le_gall_span_deficit(haar, bundle, tol=config.tol)
    checks.append(
        CheckResult(name="unit section span", residual=float(deficit), tol=0.0)
    )
    return checks


def functor_verify(context: SuiteContext) -> List[CheckResult]:
    """
    Composition of correspondences and pushforward along bundle maps.
    """
    haar, config = context.document.haar, context.config
    g = haar.groupoid
    first_bundle = context.document.bundle(context.first_bundle())
    second_bundle = context.document.bundle(context.second_bundle())
    product_bundle = bundles.tensor_bundle(first_bundle, second_bundle)
    compose = correspondence.compose_correspondences
    left = correspondence.left_action
    right = correspondence.right_action
    inner = correspondence.inner_product
    rng = context.rng()
    names = (
        "composed inner product",
        "composition left equivariant",
        "composition right equivariant",
        "composition associative",
        "pushforward identity",
        "pushforward inner product",
        "pushforward actions",
        "pushforward functorial",
        "equivariance enforced",
    )
    residuals: Dict[str, List[float]] = {name: [] for name in names}
    inclusion = bundles.inclusion_morphism(first_bundle, second_bundle)
    onward = bundles.inclusion_morphism(inclusion.target, first_bundle)
    for _ in range(config.random_samples):
        f, h = (convolution.random_element(g, rng) for _ in range(2))
        xi, xi_other = (bundles.random_section(first_bundle, rng) for _ in range(2))
        eta, eta_other = (bundles.random_section(second_bundle, rng) for _ in range(2))
        joined = compose(haar, first_bundle, second_bundle, xi, eta)
        joined_other = compose(haar, first_bundle, second_bundle, xi_other, eta_other)
        residuals["composed inner product"].append(
            relative_residual(
                inner(haar, product_bundle, joined, joined_other),
                inner(
                    haar,
                    second_bundle,
                    eta,
                    left(
                        haar,
                        second_bundle,
                        inner(haar, first_bundle, xi, xi_other),
                        eta_other,
                    ),
                ),
            )
        )
        residuals["composition left equivariant"].append(
            relative_residual(
                compose(
                    haar,
                    first_bundle,
                    second_bundle,
                    left(haar, first_bundle, f, xi),
                    eta,
                ),
                left(haar, product_bundle, f, joined),
            )
        )
        residuals["composition right equivariant"].append(
            relative_residual(
                compose(
                    haar,
                    first_bundle,
                    second_bundle,
                    xi,
                    right(haar, second_bundle, eta, h),
                ),
                right(haar, product_bundle, joined, h),
            )
        )
        zeta = bundles.random_section(second_bundle, rng)
        residuals["composition associative"].append(
            correspondence.associativity_residual(
                haar,
                (first_bundle, second_bundle, second_bundle),
                (xi, eta, zeta),
            )
            / (1.0 + scale_of(xi) * scale_of(eta) * scale_of(zeta))
        )

        identity = bundles.identity_morphism(first_bundle)
        residuals["pushforward identity"].append(
            relative_residual(correspondence.pushforward(identity, xi), xi)
        )
        pushed, pushed_other = (
            correspondence.pushforward(inclusion, section, tol=config.tol)
            for section in (xi, xi_other)
        )
        residuals["pushforward inner product"].append(
            relative_residual(
                inner(haar, inclusion.target, pushed, pushed_other),
                inner(haar, first_bundle, xi, xi_other),
            )
        )
        acted = right(haar, first_bundle, left(haar, first_bundle, f, xi), h)
        residuals["pushforward actions"].append(
            relative_residual(
                correspondence.pushforward(inclusion, acted, tol=config.tol),
                right(
                    haar,
                    inclusion.target,
                    left(haar, inclusion.target, f, pushed),
                    h,
                ),
            )
        )
        residuals["pushforward functorial"].append(
            relative_residual(
                correspondence.pushforward(inclusion.then(onward), xi, tol=config.tol),
                correspondence.pushforward(onward, pushed, tol=config.tol),
            )
        )

        scrambled = bundles.BundleMorphism(
            source=first_bundle,
            target=first_bundle,
            maps=tuple(
                rng.standard_normal((int(dim), int(dim))) for dim in first_bundle.dims
            ),
        )
        equivariant = bool(
            scrambled.equivariance_residuals().max(initial=0.0) <= config.tol
        )
        try:
            correspondence.pushforward(scrambled, xi, tol=config.tol)
            rejected = False
        except BundleMorphismError:
            rejected = True
        residuals["equivariance enforced"].append(
            0.0 if rejected != equivariant else 1.0
        )
    deficit = correspondence.composition_span_deficit(
        haar, first_bundle, second_bundle, tol=config.tol
    )
    tols = dict.fromkeys(names, config.tol)
    tols["equivariance enforced"] = 0.0
    return [_max_check(name, residuals[name], tols[name]) for name in names] + [
        CheckResult(name="composition span", residual=float(deficit), tol=0.0)
    ]


def sauvageot(context: SuiteContext) -> List[CheckResult]:
    """
    Sauvageot pair, Leibniz rule, Dirichlet form and heat semigroup checks.
    """
    document, config = context.document, context.config
    haar = document.haar
    g = haar.groupoid
    values = context.real_function(context.cnt_function)
    tol = config.tol
    rng = context.rng()
    try:
        report = dirichlet.sauvageot_verify(
            haar, values, tol=tol, rng=rng, samples=config.random_samples
        )
    except KernelNotConditionallyNegativeError as exc:
        return [
            CheckResult(
                name="conditionally negative type",
                residual=max(0.0, float(exc.witness)),
                tol=tol * (1.0 + scale_of(values)),
                detail=dict(witness=float(exc.witness)),
            )
        ]
    bundle = report.representation.bundle
    cocycle = report.representation.cocycle
    if COCYCLE in document.cocycles:
        leibniz_bundle, leibniz_cocycle = document.cocycle(COCYCLE)
    else:
        leibniz_bundle, leibniz_cocycle = bundle, cocycle

    leibniz, explicit, negated, bound = [], [], [], []
    law, contraction, finite_difference = [], [], []
    for _ in range(config.random_samples):
        f, h = (convolution.random_element(g, rng) for _ in range(2))
        residual = dirichlet.leibniz_residual(
            haar, leibniz_bundle, leibniz_cocycle, f, h
        )
        scale = 1.0 + scale_of(f) * scale_of(h) * scale_of(leibniz_cocycle)
        leibniz.append(residual / scale)

        form = dirichlet.dirichlet_form(haar, values, f, h)
        explicit.append(
            relative_residual(dirichlet.dirichlet_explicit(haar, values, f, h), form)
        )
        flipped = dirichlet.dirichlet_explicit(haar, values, f, h, sign=-1)
        vanishing = scale_of(form) <= tol * (1.0 + scale_of(values))
        negated.append(
            0.0 if vanishing or relative_residual(flipped, form) > tol else 1.0
        )
        result = dirichlet.derivation_bound_check(
            haar, bundle, cocycle, f, rtol=config.norm_rtol
        )
        bound.append(0.0 if result.passed else result.norm - result.bound)

        for t in config.schoenberg_times:
            law.append(
                dirichlet.semigroup_law_residual(values, f, t, t)
                / (1.0 + scale_of(f))
            )
            contraction.append(
                _below_zero(dirichlet.contraction_margin(haar, values, f, t))
                / (1.0 + convolution.cstar_norm(haar, f))
            )
        difference, difference_bound = dirichlet.generator_residual(
            values, f, GENERATOR_TIME
        )
        finite_difference.append(
            max(0.0, difference - difference_bound) / (1.0 + scale_of(f))
        )

    elements = [convolution.random_element(g, rng) for _ in range(CP_ELEMENTS)]
    cp_margin = dirichlet.cp_block_margin(haar, values, elements)
    cp_scale = 1.0 + scale_of(values) * max(scale_of(f) for f in elements) ** 2
    return [
        CheckResult(
            name="kernel coefficient identity",
            residual=report.kappa_residual,
            tol=report.kappa_tol,
        ),
        CheckResult(
            name="form equals derivation inner product",
            residual=report.form_residual,
            tol=report.form_tol,
        ),
        CheckResult(
            name="derivation range generates fibers",
            residual=float(sum(report.cyclicity.deficits.values())),
            tol=0.0,
            detail=dict(deficits=report.cyclicity.deficits),
        ),
        _max_check("leibniz rule", leibniz, config.leibniz_tol),
        _max_check("explicit form", explicit, tol),
        _max_check("negated coefficient rejected", negated, 0.0),
        _max_check("complete positivity", [_below_zero(cp_margin) / cp_scale], tol),
        _max_check("semigroup law", law, tol),
        _max_check("contraction", contraction, tol),
        _max_check("generator finite difference", finite_difference, tol),
        _max_check("derivation bound", bound, tol),
    ]


COMMANDS: Dict[str, Callable[[SuiteContext], List[CheckResult]]] = {
    Command.VALIDATE: validate,
    Command.CHECK_PT: check_pt,
    Command.CHECK_CNT: check_cnt,
    Command.GNS_PT: gns_pt,
    Command.GNS_CNT: gns_cnt,
    Command.SCHOENBERG: schoenberg,
    Command.NORM: norm,
    Command.CORRESPONDENCE: correspondence_verify,
    Command.FUNCTOR: functor_verify,
    Command.SAUVAGEOT: sauvageot,
}


def run_checks(command: str, context: SuiteContext) -> List[CheckResult]:
    """
    Run one command or all of them in order.

    Check names of ``all`` are prefixed by their command.
    """
    if command == Command.ALL:
        checks = []
        for name, runner in COMMANDS.items():
            for check in runner(context):
                check.name = f"{name}: {check.name}"
                checks.append(check)
        return checks
    if command not in COMMANDS:
        raise UsageError(
            f"Expected command to be one of {(*COMMANDS, Command.ALL)}. Got: {command}."
        )
    return COMMANDS[command](context)


def _severity(check: CheckResult) -> Tuple[bool, float]:
    """
    Failing checks first, then residual relative to tolerance.
    """
    if np.isnan(check.residual):
        ratio = np.inf
    elif check.tol > 0:
        ratio = check.residual / check.tol
    else:
        ratio = np.inf if check.residual > 0 else 0.0
    return (not check.passed, float(ratio))


def merge_checks(runs: Sequence[List[CheckResult]]) -> List[CheckResult]:
    """
    Worst run per check name over several instances, in first-seen order.

    A failing run always wins over a passing one. Among runs that agree,
    the largest residual to tolerance ratio is kept.
    """
    merged: Dict[str, CheckResult] = dict()
    for checks in runs:
        for check in checks:
            current = merged.get(check.name)
            if current is None or _severity(check) > _severity(current):
                merged[check.name] = check
    return list(merged.values())


@dataclass
class Report:

    """
    Machine-readable verification report.
    """

    command: str
    seed: int
    tolerances: Dict[str, float]
    instance_hash: str
    checks: List[CheckResult]
    instances: int = 1
    version: str = __version__
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """
        All checks passed.
        """
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        """
        Process exit status of the report.
        """
        return EXIT_PASS if self.passed else EXIT_FAIL

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-ready form.
        """
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "instance_hash": self.instance_hash,
            "instances": self.instances,
            "checks": [check.to_dict() for check in self.checks],
            "notes": self.notes,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        """
        Canonical JSON text.
        """
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        """
        Markdown table of the checks with a summary line.
        """
        table = pd.DataFrame(
            [
                {
                    "check": check.name,
                    "residual": f"{check.residual:.3e}",
                    "tol": f"{check.tol:.1e}",
                    "pass": "yes" if check.passed else "NO",
                }
                for check in self.checks
            ],
            columns=["check", "residual", "tol", "pass"],
        )
        summary = "PASS" if self.passed else "FAIL"
        return (
            f"{self.command} {summary} (instance {self.instance_hash[:12]},"
            f" seed {self.seed})\n\n{table.to_markdown(index=False)}"
        )


def run_suite(
    command: str,
    documents: Sequence[InstanceDocument],
    config: Optional[VerifyConfig] = None,
    pt_function: str = PT_FUNCTION,
    cnt_function: str = CNT_FUNCTION,
) -> Report:
    """
    Run a command over one or more documents and assemble the report.
    """
    config = VerifyConfig() if config is None else config
    if len(documents) == 0:
        raise UsageError("Expected at least one instance document.")
    runs = [
        run_checks(
            command,
            SuiteContext(
                document=document,
                config=config,
                pt_function=pt_function,
                cnt_function=cnt_function,
            ),
        )
        for document in documents
    ]
    hashes = [instance_hash(document) for document in documents]
    combined_hash = (
        hashes[0]
        if len(hashes) == 1
        else hashlib.sha256("".join(hashes).encode("utf-8")).hexdigest()
    )
    notes = dict()
    if command in (Command.SAUVAGEOT, Command.ALL):
        notes["closability"] = dirichlet.CLOSABILITY_NOTE
    report = Report(
        command=command,
        seed=config.seed,
        tolerances=config.tolerances(),
        instance_hash=combined_hash,
        checks=merge_checks(runs),
        instances=len(documents),
        notes=notes,
    )
    log = logging.info if report.passed else logging.warning
    log(
        "Ran verification suite.",
        extra=dict(
            command=command,
            passed=report.passed,
            failed=[check.name for check in report.checks if not check.passed],
        ),
    )
    return report
