"""Truncated Fock-space GNS simulator for Gaussian states.

The GNS representation of a Gaussian state with covariance ``A >= I`` lives
on a doubled Fock space: ``pi(W_f) = W(T1 f) (x) W(J T2 f)`` with
``T1 = ((A+I)/2)^{1/2}``, ``T2 = ((A-I)/2)^{1/2}`` and ``J`` the componentwise
conjugation in the eigenbasis of ``A``.  The antiunitary twist on the second
slot is what makes the doubled map multiplicative for the original symplectic
form (T1^2 - T2^2 = I enters with a relative sign) and makes the swapped map
``W(J T2 g) (x) W(T1 g)`` commute with it; without it neither holds once the
vectors are genuinely complex.

Weyl generators are realized as displacement operators with amplitude
``alpha = i f / sqrt(2)`` per mode, the unique normalization that reproduces
both the vacuum value ``exp(-||f||^2/4)`` and the product phase
``exp(-i sigma(f,g)/2)``.  Displacements are built as ``expm`` of the
truncated generator, so they are exactly unitary; truncation shows up only
near the top of the ladder, which is why relation residuals are measured on
the block of occupation numbers up to half the cutoff.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    CovarianceBelowIdentity,
    CutoffTooSmall,
    DimensionMismatch,
    InvalidMeasure,
    NonUnitary,
    OutOfRange,
    SpectrumBelowOne,
)
from .spectral import (
    OperatorSpec,
    inf_spectrum,
    is_trace_class_minus_identity,
    quadratic_form,
    scalar_value,
)
from .states import StateFunctional
from .weyl import WeylWord, sigma

#: Hard floor on the per-mode occupation cutoff.
CUTOFF_FLOOR = 4

#: Cap on the doubled-space axis length (cutoff+1)^(2*modes).
DOUBLED_DIM_CAP = 10_000


@dataclass(frozen=True)
class TruncatedFockOp:
    """Matrix on a truncated (multi-mode) Fock space with a role tag."""

    matrix: np.ndarray
    cutoff: int
    modes: int
    role: str
    unitarity_defect: float | None = None


def _ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)


def _mode_generator(alpha: complex, cutoff: int) -> np.ndarray:
    """Anti-Hermitian generator alpha a* - conj(alpha) a on the truncated ladder."""
    a = _ladder(cutoff)
    return alpha * a.conj().T - np.conj(alpha) * a


def _mode_displacement(alpha: complex, cutoff: int) -> np.ndarray:
    return expm(_mode_generator(alpha, cutoff))


def truncated_displacement(alpha, cutoff: int) -> TruncatedFockOp:
    """Displacement operator D(alpha) on the truncated Fock space.

    ``alpha`` is one complex amplitude per mode; several modes combine by
    tensor product.  Built as the exponential of the truncated generator, so
    the matrix is unitary to machine precision and ``<0|D(alpha)|0>`` matches
    ``exp(-|alpha|^2/2)`` up to truncation leakage.
    """
    amplitudes = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if cutoff < CUTOFF_FLOOR:
        raise CutoffTooSmall(f"cutoff {cutoff} below hard floor {CUTOFF_FLOOR}")
    recommended = 8 * max(1.0, float(np.max(np.abs(amplitudes)) ** 2))
    if cutoff < recommended:
        warnings.warn(
            f"cutoff {cutoff} below recommended {recommended:.0f} for |alpha| up to "
            f"{np.max(np.abs(amplitudes)):.3g}; expect visible truncation error",
            stacklevel=2,
        )
    matrix = _mode_displacement(amplitudes[0], cutoff)
    for amp in amplitudes[1:]:
        matrix = np.kron(matrix, _mode_displacement(amp, cutoff))
    defect = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))
    return TruncatedFockOp(
        matrix=matrix,
        cutoff=cutoff,
        modes=len(amplitudes),
        role="displacement",
        unitarity_defect=defect,
    )


class GnsModel:
    """Doubled truncated Fock space carrying a Gaussian state's representation."""

    def __init__(self, covariance: OperatorSpec, cutoff: int = 40):
        matrix = covariance.require_matrix()
        if cutoff < CUTOFF_FLOOR:
            raise CutoffTooSmall(f"cutoff {cutoff} below hard floor {CUTOFF_FLOOR}")
        if inf_spectrum(covariance) < 1 - 1e-12:
            raise CovarianceBelowIdentity(
                f"GNS doubling needs A >= I, spectrum reaches {inf_spectrum(covariance)}"
            )
        self.covariance = covariance
        self.cutoff = int(cutoff)
        self.modes = matrix.shape[0]
        self._basis = covariance.eigenvectors
        eigs = covariance.eigenvalues
        self._t1 = np.sqrt((eigs + 1.0) / 2.0)
        self._t2 = np.sqrt(np.maximum(eigs - 1.0, 0.0) / 2.0)
        self.T1 = self._basis @ np.diag(self._t1).astype(complex) @ self._basis.conj().T
        self.T2 = self._basis @ np.diag(self._t2).astype(complex) @ self._basis.conj().T

    @property
    def slot_dimension(self) -> int:
        return (self.cutoff + 1) ** self.modes

    def _coords(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex).ravel()
        if f.shape != (self.modes,):
            raise DimensionMismatch(f"vector of shape {f.shape} against {self.modes} modes")
        return self._basis.conj().T @ f

    def slot_amplitudes(self, f) -> tuple[np.ndarray, np.ndarray]:
        """Per-mode displacement amplitudes of the two tensor slots of pi(W_f)."""
        coords = self._coords(f)
        first = 1j * (self._t1 * coords) / np.sqrt(2)
        second = 1j * np.conj(self._t2 * coords) / np.sqrt(2)
        return first, second

    def commutant_slot_amplitudes(self, f) -> tuple[np.ndarray, np.ndarray]:
        """Amplitudes of the swapped (commutant) map, T2-and-conjugation first."""
        coords = self._coords(f)
        first = 1j * np.conj(self._t2 * coords) / np.sqrt(2)
        second = 1j * (self._t1 * coords) / np.sqrt(2)
        return first, second


def _slot_matrix(amplitudes: np.ndarray, cutoff: int) -> np.ndarray:
    matrix = _mode_displacement(amplitudes[0], cutoff)
    for amp in amplitudes[1:]:
        matrix = np.kron(matrix, _mode_displacement(amp, cutoff))
    return matrix


def _check_doubled_cap(model: GnsModel):
    dim = model.slot_dimension ** 2
    if dim > DOUBLED_DIM_CAP:
        raise OutOfRange(
            f"doubled Fock space axis {dim} exceeds cap {DOUBLED_DIM_CAP}; "
            f"lower the cutoff or the mode count"
        )


def gns_weyl_operator(model: GnsModel, f) -> np.ndarray:
    """The doubled-space matrix representing the generator W_f."""
    _check_doubled_cap(model)
    first, second = model.slot_amplitudes(f)
    return np.kron(_slot_matrix(first, model.cutoff), _slot_matrix(second, model.cutoff))


def gns_commutant_weyl_operator(model: GnsModel, f) -> np.ndarray:
    """The swapped-slot matrix that commutes with every gns_weyl_operator."""
    _check_doubled_cap(model)
    first, second = model.commutant_slot_amplitudes(f)
    return np.kron(_slot_matrix(first, model.cutoff), _slot_matrix(second, model.cutoff))


def gns_expectation(model: GnsModel, u: WeylWord) -> complex:
    """Vacuum-pair expectation <Omega, pi(u) Omega> of a word.

    The doubled vacuum matrix element of a generator factorizes over tensor
    slots and modes, so only per-mode truncated matrices are ever built; this
    keeps two-mode models at cutoff 40 cheap while remaining a genuinely
    truncated computation (no closed forms are consulted).
    """
    if u.dim != model.modes:
        raise DimensionMismatch(f"word over C^{u.dim} against {model.modes} modes")
    total = 0.0 + 0.0j
    for vec, coeff in u.items():
        first, second = model.slot_amplitudes(vec)
        value = 1.0 + 0.0j
        for amp in np.concatenate([first, second]):
            value *= _mode_displacement(amp, model.cutoff)[0, 0]
        total += coeff * value
    return complex(total)


def _reliable_block(model: GnsModel) -> np.ndarray:
    """Doubled-space indices with every mode occupation <= cutoff // 2.

    Entries of truncated operators are only faithful to the untruncated ones
    away from the top of the ladder; max-norm contracts are evaluated on this
    block.
    """
    keep = model.cutoff // 2
    per_slot = [
        i
        for i in range(model.slot_dimension)
        if all(
            (i // (model.cutoff + 1) ** m) % (model.cutoff + 1) <= keep
            for m in range(model.modes)
        )
    ]
    slot = np.asarray(per_slot)
    return (slot[:, None] * model.slot_dimension + slot[None, :]).ravel()


def weyl_relation_residual(model: GnsModel, f, g) -> float:
    """Max-norm defect of pi(W_f) pi(W_g) = exp(-i sigma(f,g)/2) pi(W_{f+g}).

    Measured on the reliable occupation block (see _reliable_block).
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    lhs = gns_weyl_operator(model, f) @ gns_weyl_operator(model, g)
    rhs = np.exp(-0.5j * sigma(f, g)) * gns_weyl_operator(model, f + g)
    idx = _reliable_block(model)
    diff = (lhs - rhs).ravel()[idx[:, None] * lhs.shape[0] + idx[None, :]]
    return float(np.max(np.abs(diff)))


def commutant_residual(model: GnsModel, f, g) -> float:
    """Max-norm of [pi(W_f), pi~(W_g)] on the reliable occupation block."""
    a = gns_weyl_operator(model, f)
    b = gns_commutant_weyl_operator(model, g)
    comm = a @ b - b @ a
    idx = _reliable_block(model)
    block = comm.ravel()[idx[:, None] * comm.shape[0] + idx[None, :]]
    return float(np.max(np.abs(block)))


def _embed_mode(matrix: np.ndarray, mode: int, modes: int, cutoff: int) -> np.ndarray:
    dim = cutoff + 1
    out = np.eye(1, dtype=complex)
    for m in range(modes):
        out = np.kron(out, matrix if m == mode else np.eye(dim, dtype=complex))
    return out


def _slot_generator(amplitudes: np.ndarray, cutoff: int) -> np.ndarray:
    modes = len(amplitudes)
    total = np.zeros(((cutoff + 1) ** modes,) * 2, dtype=complex)
    for m, amp in enumerate(amplitudes):
        total += _embed_mode(_mode_generator(amp, cutoff), m, modes, cutoff)
    return total


def gns_field_operator(model: GnsModel, f) -> TruncatedFockOp:
    """Truncated field operator: the generator of t -> pi(W_{t f})."""
    _check_doubled_cap(model)
    first, second = model.slot_amplitudes(f)
    k1 = _slot_generator(first, model.cutoff)
    k2 = _slot_generator(second, model.cutoff)
    eye = np.eye(model.slot_dimension, dtype=complex)
    matrix = -1j * (np.kron(k1, eye) + np.kron(eye, k2))
    return TruncatedFockOp(matrix=matrix, cutoff=model.cutoff, modes=model.modes, role="field")


def gns_annihilation(model: GnsModel, f) -> TruncatedFockOp:
    """a(f) = (Phi(f) + i Phi(if)) / sqrt(2) on the doubled space."""
    f = np.asarray(f, dtype=complex)
    phi_f = gns_field_operator(model, f).matrix
    phi_if = gns_field_operator(model, 1j * f).matrix
    matrix = (phi_f + 1j * phi_if) / np.sqrt(2)
    return TruncatedFockOp(matrix=matrix, cutoff=model.cutoff, modes=model.modes, role="annihilation")


def gns_creation(model: GnsModel, f) -> TruncatedFockOp:
    op = gns_annihilation(model, f)
    return TruncatedFockOp(
        matrix=op.matrix.conj().T, cutoff=op.cutoff, modes=op.modes, role="creation"
    )


def gns_number_operator(model: GnsModel, f) -> TruncatedFockOp:
    """N_f = a*(f) a(f) on the doubled space."""
    a = gns_annihilation(model, f).matrix
    return TruncatedFockOp(
        matrix=a.conj().T @ a, cutoff=model.cutoff, modes=model.modes, role="number"
    )


def vacuum_expectation(op: TruncatedFockOp | np.ndarray) -> complex:
    matrix = op.matrix if isinstance(op, TruncatedFockOp) else op
    return complex(matrix[0, 0])


def one_particle_number_expectation(covariance: OperatorSpec, f) -> float:
    """Closed form <N_f> = (1/2) <f, (A - I) f> in the Gaussian state."""
    if inf_spectrum(covariance) < 1 - 1e-12:
        raise SpectrumBelowOne(f"covariance spectrum reaches {inf_spectrum(covariance)} < 1")
    f = np.asarray(f, dtype=complex)
    if covariance.is_matrix:
        return 0.5 * (quadratic_form(covariance, f, f).real - float(np.vdot(f, f).real))
    lam = scalar_value(covariance)
    return 0.5 * (lam - 1.0) * float(np.vdot(f, f).real)


def is_quasi_equivalent_to_fock(covariance: OperatorSpec) -> bool:
    """Whether the Gaussian state is quasi-equivalent to the Fock state."""
    return is_trace_class_minus_identity(covariance)


def c_parameter(h: float) -> float:
    """Mixture coordinate of the rescaled Fock state: c = (1 - h) / (1 + h)."""
    if not 0 < h <= 1:
        raise OutOfRange(f"scale parameter {h} outside (0, 1]")
    return (1.0 - h) / (1.0 + h)


def h_of_c(c: float) -> float:
    """Inverse of c_parameter: h = (1 - c) / (1 + c)."""
    if not 0 <= c < 1:
        raise OutOfRange(f"mixture coordinate {c} outside [0, 1)")
    return (1.0 - c) / (1.0 + c)


@dataclass(frozen=True)
class MixtureMeasure:
    """Finite probability measure on the mixture coordinate c in [0, 1)."""

    points: tuple[tuple[float, float], ...]  # (c, weight)

    def __post_init__(self):
        if not self.points:
            raise InvalidMeasure("measure needs at least one support point")
        total = 0.0
        for c, w in self.points:
            if not 0 <= c < 1:
                raise InvalidMeasure(f"support point {c} outside [0, 1)")
            if w <= 0:
                raise InvalidMeasure(f"weight {w} is not positive")
            total += w
        if abs(total - 1.0) > 1e-12:
            raise InvalidMeasure(f"weights sum to {total}, expected 1")


class MixtureState(StateFunctional):
    """Rotation-invariant mixture of the one-parameter Gaussian family.

    phi(f) = sum_i w_i exp(-||f||^2 (1 + c_i) / (4 (1 - c_i))).
    """

    tag = "mixture"

    def __init__(self, measure: MixtureMeasure):
        self.measure = measure

    def value(self, f) -> complex:
        norm_sq = float(np.vdot(np.asarray(f, dtype=complex), np.asarray(f, dtype=complex)).real)
        total = 0.0
        for c, w in self.measure.points:
            total += w * math.exp(-norm_sq * (1.0 + c) / (4.0 * (1.0 - c)))
        return complex(total)


def universally_invariant_functional(measure: MixtureMeasure) -> MixtureState:
    """State functional of a finite mixture over the gauge-invariant family."""
    return MixtureState(measure)


@dataclass(frozen=True)
class UnitaryMap:
    """Gauge transformation W_f -> W_{U f} for a unitary U on the one-particle space."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise NonUnitary(f"expected a square matrix, got shape {u.shape}")
        defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if defect > 1e-10:
            raise NonUnitary(f"U*U - I residual {defect:.3e} exceeds 1e-10")
        object.__setattr__(self, "matrix", u)

    def apply(self, f) -> np.ndarray:
        return self.matrix @ np.asarray(f, dtype=complex)


def check_universal_invariance(phi: StateFunctional, unitary: UnitaryMap, vectors) -> float:
    """Max deviation |phi(U f) - phi(f)| over the sample vectors."""
    deviation = 0.0
    for f in vectors:
        deviation = max(deviation, abs(phi.value(unitary.apply(f)) - phi.value(f)))
    return deviation
