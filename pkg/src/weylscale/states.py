"""Generating functionals on the Weyl algebra and Gram-kernel positivity.

A state is represented by its generating functional ``phi(f)``; positivity of
the state at scale ``h`` is positive semidefiniteness of every finite kernel
``M_jk = exp(-i/2 * h * sigma(f_j, f_k)) * phi(f_j - f_k)``.  The kernel is
stored exactly in that index order; it is Hermitian for every functional here
because ``phi(-f) = conj(phi(f))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    CovarianceBelowIdentity,
    DimensionMismatch,
    NonPositiveScale,
    SpectrumBelowOne,
)
from .spectral import OperatorSpec, apply_function, inf_spectrum, quadratic_form, scalar_value
from .weyl import KEY_GRID, WeylWord, sigma

#: Default relative tolerance for the PSD verdict of a Gram kernel.
GRAM_PSD_TOL = 1e-10

#: Eigenvalue threshold under which the witness scan reports a violation.
WITNESS_EIG_THRESHOLD = -1e-8

#: Scales swept by the deterministic negative-witness scan.
WITNESS_SCALES = (0.25, 0.5, 1.0, 2.0, 4.0)

_COVARIANCE_SLACK = 1e-12


class StateFunctional:
    """Base class: a generating functional with a tagged closed form.

    Subclasses implement :meth:`value`; every functional satisfies
    ``value(0) == 1`` and ``value(-f) == conj(value(f))``.
    """

    tag = "abstract"
    #: space dimension the functional is tied to, or None when it only
    #: depends on rotation-invariant data such as the norm of f.
    dimension: int | None = None

    def value(self, f) -> complex:
        raise NotImplementedError

    def __call__(self, f) -> complex:
        return self.value(f)


class QuasiFreeState(StateFunctional):
    """Gaussian functional phi(f) = exp(-<f, A f> / 4) for a covariance A."""

    tag = "quasi_free"

    def __init__(self, covariance: OperatorSpec):
        self.covariance = covariance
        self.dimension = covariance.matrix.shape[0] if covariance.is_matrix else None

    def form(self, f) -> float:
        """The quadratic form <f, A f> (real for Hermitian A)."""
        if self.covariance.is_matrix:
            return quadratic_form(self.covariance, f, f).real
        lam = scalar_value(self.covariance)
        f = np.asarray(f, dtype=complex)
        return lam * float(np.vdot(f, f).real)

    def value(self, f) -> complex:
        return complex(np.exp(-0.25 * self.form(f)))


class RescaledFockState(StateFunctional):
    """The Fock functional pushed to scale h: phi(f) = exp(-||f||^2 / (4h))."""

    tag = "rescaled_fock"

    def __init__(self, h: float):
        if h <= 0:
            raise NonPositiveScale(f"scale parameter {h} must be positive")
        self.h = float(h)

    def value(self, f) -> complex:
        f = np.asarray(f, dtype=complex)
        return complex(np.exp(-float(np.vdot(f, f).real) / (4.0 * self.h)))


class TraceState(StateFunctional):
    """Indicator of the identity generator: 1 at f = 0, else 0."""

    tag = "trace"

    def value(self, f) -> complex:
        f = np.asarray(f, dtype=complex)
        # zero test on the same grid that canonicalizes word keys
        if np.all(np.round(f.real / KEY_GRID) == 0) and np.all(np.round(f.imag / KEY_GRID) == 0):
            return 1.0
        return 0.0


class _RescaledFunctional(StateFunctional):
    """Generic rescaling wrapper: phi_h(f) = phi(f / sqrt(h))."""

    tag = "rescaled"

    def __init__(self, base: StateFunctional, h: float):
        self.base = base
        self.h = float(h)
        self.dimension = base.dimension

    def value(self, f) -> complex:
        f = np.asarray(f, dtype=complex)
        return self.base.value(f / np.sqrt(self.h))


def quasi_free_functional(covariance: OperatorSpec, checked: bool = True) -> QuasiFreeState:
    """Gaussian functional for a covariance operator.

    With ``checked`` (the default) the covariance must satisfy A >= I, the
    condition for the functional to be a state on the unscaled algebra.  Pass
    ``checked=False`` to build a sub-vacuum functional for negative testing.
    """
    if checked and inf_spectrum(covariance) < 1 - _COVARIANCE_SLACK:
        raise CovarianceBelowIdentity(
            f"covariance spectrum reaches {inf_spectrum(covariance)} < 1"
        )
    return QuasiFreeState(covariance)


def rescale_functional(phi: StateFunctional, h: float) -> StateFunctional:
    """The functional f -> phi(f / sqrt(h)).

    Closed forms are preserved where they exist: a Gaussian with covariance A
    becomes the Gaussian with covariance A / h (no positivity check), and a
    rescaled Fock functional composes multiplicatively in h.
    """
    if h <= 0:
        raise NonPositiveScale(f"scale parameter {h} must be positive")
    if isinstance(phi, QuasiFreeState):
        return QuasiFreeState(apply_function(phi.covariance, lambda lam: lam / h))
    if isinstance(phi, RescaledFockState):
        return RescaledFockState(phi.h * h)
    if isinstance(phi, TraceState):
        return phi
    return _RescaledFunctional(phi, h)


def evaluate_state(phi: StateFunctional, u: WeylWord) -> complex:
    """Linear extension of the generating functional to a word."""
    if phi.dimension is not None and phi.dimension != u.dim:
        raise DimensionMismatch(f"functional over C^{phi.dimension}, word over C^{u.dim}")
    total = 0.0 + 0.0j
    for vec, coeff in u.items():
        total += coeff * phi.value(vec)
    return complex(total)


def gram_matrix(phi: StateFunctional, vectors: Sequence, h: float) -> np.ndarray:
    """Positivity kernel M_jk = exp(-i/2 h sigma(f_j, f_k)) phi(f_j - f_k)."""
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    if phi.dimension is not None:
        for v in vecs:
            if v.shape != (phi.dimension,):
                raise DimensionMismatch(
                    f"vector of shape {v.shape} against functional over C^{phi.dimension}"
                )
    n = len(vecs)
    kernel = np.empty((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            phase = np.exp(-0.5j * h * sigma(vecs[j], vecs[k]))
            kernel[j, k] = phase * phi.value(vecs[j] - vecs[k])
    return kernel


@dataclass(frozen=True)
class GramReport:
    """Outcome of a kernel positivity check at a given scale parameter."""

    vectors: tuple
    h: float
    kernel: np.ndarray
    min_eigenvalue: float
    verdict: bool
    tol: float


def check_sigma_h_positivity(
    phi: StateFunctional, vectors: Sequence, h: float, tol: float = GRAM_PSD_TOL
) -> GramReport:
    """PSD verdict for the positivity kernel of phi at scale h.

    The verdict allows eigensolver noise scaling with the kernel size and
    magnitude: pass iff ``min eig >= -tol * n * max |M_jk|``.
    """
    kernel = gram_matrix(phi, vectors, h)
    eigenvalues = np.linalg.eigvalsh(kernel)
    min_eig = float(eigenvalues[0])
    floor = -tol * kernel.shape[0] * float(np.max(np.abs(kernel)))
    return GramReport(
        vectors=tuple(np.asarray(v, dtype=complex) for v in vectors),
        h=float(h),
        kernel=kernel,
        min_eigenvalue=min_eig,
        verdict=min_eig >= floor,
        tol=tol,
    )


class TwoPointCheck(NamedTuple):
    lhs: float
    rhs: float
    verdict: bool


def two_point_criterion(covariance: OperatorSpec, f, g, h: float) -> TwoPointCheck:
    """Necessary positivity condition |sigma(f,g)|^2 <= S(f,f) S(g,g), S from A/h."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    lhs = sigma(f, g) ** 2
    sff = quadratic_form(covariance, f, f).real / h
    sgg = quadratic_form(covariance, g, g).real / h
    rhs = sff * sgg
    return TwoPointCheck(lhs=lhs, rhs=rhs, verdict=lhs <= rhs + 1e-12)


def h_max(covariance: OperatorSpec) -> float:
    """Largest admissible scale parameter: the bottom of the covariance spectrum."""
    bottom = inf_spectrum(covariance)
    if bottom < 1 - _COVARIANCE_SLACK:
        raise SpectrumBelowOne(f"covariance spectrum reaches {bottom} < 1")
    return bottom


@dataclass(frozen=True)
class GramViolationWitness:
    """A finite vector family on which the positivity kernel fails."""

    scale: float
    vectors: tuple
    min_eigenvalue: float
    report: GramReport


def scan_for_gram_violation(
    covariance: OperatorSpec, h: float, threshold: float = WITNESS_EIG_THRESHOLD
) -> GramViolationWitness | None:
    """Deterministic search for a Gram kernel with a clearly negative eigenvalue.

    Sweeps the coherent family {0, s e, s ie, s (e + ie)/sqrt(2), 2s e, 2s ie}
    over s in WITNESS_SCALES, with e the lowest eigenvector of the covariance.
    For h above the bottom of the spectrum the Gaussian is sub-vacuum along e
    and small coherent configurations expose a negative kernel eigenvalue.
    Returns the first witness found, or None.
    """
    phi = QuasiFreeState(covariance)
    if covariance.is_matrix:
        e = covariance.eigenvectors[:, 0]
    else:
        e = np.ones(1, dtype=complex)
    for s in WITNESS_SCALES:
        family = (
            0.0 * e,
            s * e,
            s * 1j * e,
            s * (e + 1j * e) / np.sqrt(2),
            2 * s * e,
            2 * s * 1j * e,
        )
        report = check_sigma_h_positivity(phi, family, h)
        if report.min_eigenvalue < threshold:
            return GramViolationWitness(
                scale=s,
                vectors=family,
                min_eigenvalue=report.min_eigenvalue,
                report=report,
            )
    return None
