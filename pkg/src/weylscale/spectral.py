"""Spectral representation of positive operators and exact functional calculus.

Operators come in two variants.  A *matrix* operator is a finite Hermitian
matrix with a cached eigendecomposition and is used whenever concrete vectors
are needed.  A *spectral* operator is a sorted list of atoms (eigenvalue,
multiplicity), where the multiplicity may be the distinguished value ``INF``;
it retains statements about infinite-dimensional spectra (trace-class tests,
admissibility bounds) that only depend on spectral data.

Eigenvalues are canonicalized: values closer than ``ATOM_MERGE_TOL`` are
merged into one atom, and matrix eigenvalues are snapped to their atom
representative.  Interval selections in :func:`spectral_projection` therefore
compare spectral values exactly, with no endpoint tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    NonHermitian,
    NonPositiveAtom,
    SpectralVariantHasNoVectors,
    SpectrumBelowOne,
)

#: Distinguished infinite multiplicity marker.
INF = math.inf

#: Atoms closer than this are merged into one spectral point.
ATOM_MERGE_TOL = 1e-12

#: Allowed conjugate-symmetry residual of matrix input.
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Atom:
    """One spectral point: a real eigenvalue with its multiplicity."""

    value: float
    multiplicity: float  # positive integer, or INF

    @property
    def infinite(self) -> bool:
        return self.multiplicity == INF


@dataclass(frozen=True)
class Interval:
    """Real interval with explicit endpoint-inclusion flags."""

    lower: float
    upper: float
    include_lower: bool = False
    include_upper: bool = True

    def contains(self, x: float) -> bool:
        if self.include_lower:
            if x < self.lower:
                return False
        elif x <= self.lower:
            return False
        if self.include_upper:
            return x <= self.upper
        return x < self.upper

    def __str__(self) -> str:
        left = "[" if self.include_lower else "("
        right = "]" if self.include_upper else ")"
        return f"{left}{self.lower}, {self.upper}{right}"


def _merge_sorted_values(values: Sequence[float], counts: Sequence[float]) -> tuple[Atom, ...]:
    """Group sorted values into atoms, merging points within ATOM_MERGE_TOL."""
    atoms: list[Atom] = []
    group: list[float] = []
    group_count = 0.0
    for value, count in zip(values, counts):
        if group and value - group[0] > ATOM_MERGE_TOL:
            atoms.append(Atom(float(np.mean(group)), group_count))
            group, group_count = [], 0.0
        group.append(value)
        group_count += count
    if group:
        atoms.append(Atom(float(np.mean(group)), group_count))
    return tuple(atoms)


class OperatorSpec:
    """A positive operator given by a Hermitian matrix or by spectral atoms.

    Instances are immutable; build them through :func:`make_operator` (or the
    ``from_matrix`` / ``from_atoms`` constructors) so the canonical spectral
    form is always in place.
    """

    __slots__ = (
        "variant",
        "matrix",
        "eigenvalues",
        "eigenvectors",
        "atoms",
        "declared_infimum",
        "declared_supremum",
    )

    def __init__(
        self,
        variant: str,
        matrix: np.ndarray | None,
        eigenvalues: np.ndarray | None,
        eigenvectors: np.ndarray | None,
        atoms: tuple[Atom, ...],
        declared_infimum: float | None = None,
        declared_supremum: float | None = None,
    ):
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "eigenvectors", eigenvectors)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "declared_infimum", declared_infimum)
        object.__setattr__(self, "declared_supremum", declared_supremum)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSpec is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_matrix(cls, entries) -> "OperatorSpec":
        m = np.atleast_2d(np.asarray(entries, dtype=complex))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"matrix input must be square, got shape {m.shape}")
        residual = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if residual > HERMITICITY_TOL:
            raise NonHermitian(f"conjugate-symmetry residual {residual:.3e} exceeds {HERMITICITY_TOL}")
        m = (m + m.conj().T) / 2
        eigvals, eigvecs = np.linalg.eigh(m)
        atoms = _merge_sorted_values(eigvals.tolist(), [1.0] * len(eigvals))
        # snap eigenvalues to their atom representative so interval tests are exact
        snapped = np.empty_like(eigvals)
        i = 0
        for atom in atoms:
            k = int(atom.multiplicity)
            snapped[i : i + k] = atom.value
            i += k
        m.flags.writeable = False
        snapped.flags.writeable = False
        eigvecs.flags.writeable = False
        return cls("matrix", m, snapped, eigvecs, atoms)

    @classmethod
    def from_atoms(
        cls,
        pairs: Iterable[tuple[float, float]],
        declared_infimum: float | None = None,
        declared_supremum: float | None = None,
    ) -> "OperatorSpec":
        cleaned: list[tuple[float, float]] = []
        for value, mult in pairs:
            value = float(value)
            if not value > 0:
                raise NonPositiveAtom(f"atom value {value} is not strictly positive")
            if mult != INF:
                if mult != int(mult) or mult <= 0:
                    raise NonPositiveAtom(
                        f"atom multiplicity {mult} is not a positive integer"
                    )
                mult = int(mult)
            cleaned.append((value, mult))
        cleaned.sort(key=lambda p: p[0])
        atoms = _merge_sorted_values([p[0] for p in cleaned], [p[1] for p in cleaned])
        return cls("spectral", None, None, None, atoms, declared_infimum, declared_supremum)

    # -- basic queries -----------------------------------------------------

    @property
    def is_matrix(self) -> bool:
        return self.variant == "matrix"

    @property
    def dimension(self) -> float:
        """Total dimension: matrix size, or sum of multiplicities (may be INF)."""
        if self.is_matrix:
            return self.matrix.shape[0]
        return sum(a.multiplicity for a in self.atoms)

    def require_matrix(self) -> np.ndarray:
        if not self.is_matrix:
            raise SpectralVariantHasNoVectors("operation needs concrete eigenvectors")
        return self.matrix

    def with_declared_bounds(
        self, infimum: float | None = None, supremum: float | None = None
    ) -> "OperatorSpec":
        """Copy with declared spectral bounds (side data for unbounded models)."""
        return OperatorSpec(
            self.variant,
            self.matrix,
            self.eigenvalues,
            self.eigenvectors,
            self.atoms,
            infimum if infimum is not None else self.declared_infimum,
            supremum if supremum is not None else self.declared_supremum,
        )

    def __repr__(self) -> str:
        if self.is_matrix:
            return f"OperatorSpec(matrix {self.matrix.shape[0]}x{self.matrix.shape[0]}, spectrum {[a.value for a in self.atoms]})"
        spec = ", ".join(
            f"({a.value}, {'INF' if a.infinite else int(a.multiplicity)})" for a in self.atoms
        )
        return f"OperatorSpec(atoms [{spec}])"


@dataclass(frozen=True)
class ProjectionSpec:
    """Spectral projection of an operator onto an interval of its spectrum."""

    source: OperatorSpec
    interval: Interval
    selected_indices: tuple[int, ...]  # matrix variant: eigenvector columns
    selected_atoms: tuple[Atom, ...]

    @property
    def dimension(self) -> float:
        if self.source.is_matrix:
            return len(self.selected_indices)
        return sum(a.multiplicity for a in self.selected_atoms)

    @property
    def is_zero(self) -> bool:
        return self.dimension == 0

    def basis(self) -> np.ndarray:
        """Orthonormal columns spanning the range (matrix variant only)."""
        self.source.require_matrix()
        return self.source.eigenvectors[:, list(self.selected_indices)]

    def as_matrix(self) -> np.ndarray:
        v = self.basis()
        return v @ v.conj().T

    def apply(self, f: np.ndarray) -> np.ndarray:
        v = self.basis()
        return v @ (v.conj().T @ np.asarray(f, dtype=complex))

    def residual(self, f: np.ndarray) -> float:
        """Distance of f from the range of the projection."""
        f = np.asarray(f, dtype=complex)
        return float(np.linalg.norm(f - self.apply(f)))

    def contains_vector(self, f: np.ndarray, tol: float = 1e-12) -> bool:
        return self.residual(f) <= tol


def make_operator(data, **declared_bounds) -> OperatorSpec:
    """Build an operator from square matrix entries or an atom list.

    A sequence of ``(eigenvalue, multiplicity)`` tuples (or Atom instances)
    yields the spectral variant; any 2-d array-like (nested lists, ndarray)
    yields the matrix variant.  The tuple/list distinction settles inputs
    that would otherwise be ambiguous, e.g. an n x 2 real matrix.
    """
    if isinstance(data, OperatorSpec):
        return data
    if isinstance(data, (list, tuple)) and data and all(
        isinstance(item, (tuple, Atom)) for item in data
    ):
        pairs = [(item.value, item.multiplicity) if isinstance(item, Atom) else item for item in data]
        return OperatorSpec.from_atoms(pairs, **declared_bounds)
    if declared_bounds:
        raise DimensionMismatch("declared bounds are only supported on the spectral variant")
    return OperatorSpec.from_matrix(data)


def apply_function(op: OperatorSpec, fn: Callable[[float], float]) -> OperatorSpec:
    """Functional calculus: same eigenvectors/atoms, eigenvalues mapped by fn.

    Raises DomainViolation when fn is singular, undefined or non-finite at a
    spectral point.  Declared bounds do not survive the map (they are side
    data about parts of the spectrum the atoms do not carry).
    """

    def evaluate(x: float) -> float:
        try:
            y = fn(float(x))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainViolation(f"map undefined at spectral point {x}: {exc}") from exc
        y = complex(y)
        if abs(y.imag) > 1e-12 * max(1.0, abs(y.real)):
            raise DomainViolation(f"map is not real at spectral point {x}: {y}")
        y = y.real
        if not math.isfinite(y):
            raise DomainViolation(f"map is singular at spectral point {x}")
        return y

    if op.is_matrix:
        mapped = np.array([evaluate(v) for v in op.eigenvalues])
        order = np.argsort(mapped, kind="stable")
        eigvals = mapped[order]
        eigvecs = op.eigenvectors[:, order]
        atoms = _merge_sorted_values(eigvals.tolist(), [1.0] * len(eigvals))
        snapped = np.empty_like(eigvals)
        i = 0
        for atom in atoms:
            k = int(atom.multiplicity)
            snapped[i : i + k] = atom.value
            i += k
        matrix = eigvecs @ np.diag(snapped).astype(complex) @ eigvecs.conj().T
        matrix = (matrix + matrix.conj().T) / 2
        for a in (matrix, snapped, eigvecs):
            a.flags.writeable = False
        return OperatorSpec("matrix", matrix, snapped, eigvecs, atoms)

    mapped_pairs = sorted(
        ((evaluate(a.value), a.multiplicity) for a in op.atoms), key=lambda p: p[0]
    )
    atoms = _merge_sorted_values([p[0] for p in mapped_pairs], [p[1] for p in mapped_pairs])
    return OperatorSpec("spectral", None, None, None, atoms)


def inf_spectrum(op: OperatorSpec) -> float:
    """Bottom of the spectrum (declared infimum wins when present)."""
    if op.declared_infimum is not None:
        return op.declared_infimum
    return op.atoms[0].value


def op_norm(op: OperatorSpec) -> float:
    """Top of the spectrum; INF when a supremum is declared unbounded."""
    if op.declared_supremum is not None:
        return op.declared_supremum
    return op.atoms[-1].value


def is_trace_class_minus_identity(op: OperatorSpec) -> bool:
    """Whether sum of multiplicity * (eigenvalue - 1) is finite.

    Requires spectrum >= 1.  Finite matrices always qualify; a spectral atom
    strictly above 1 with infinite multiplicity does not.
    """
    if inf_spectrum(op) < 1 - ATOM_MERGE_TOL:
        raise SpectrumBelowOne(f"spectrum reaches {inf_spectrum(op)} < 1")
    if op.is_matrix:
        return True
    for atom in op.atoms:
        if atom.infinite and atom.value > 1 + ATOM_MERGE_TOL:
            return False
    return True


def spectral_projection(op: OperatorSpec, interval: Interval) -> ProjectionSpec:
    """Projection onto eigenvectors/atoms with eigenvalue in the interval.

    Endpoint tests are exact on canonicalized spectral values; an empty
    selection is allowed.
    """
    if op.is_matrix:
        idx = tuple(i for i, v in enumerate(op.eigenvalues) if interval.contains(float(v)))
        atoms = tuple(a for a in op.atoms if interval.contains(a.value))
        return ProjectionSpec(op, interval, idx, atoms)
    atoms = tuple(a for a in op.atoms if interval.contains(a.value))
    return ProjectionSpec(op, interval, (), atoms)


def quadratic_form(op: OperatorSpec, f, g) -> complex:
    """<f, op g> with the inner product conjugate-linear in the first slot."""
    m = op.require_matrix()
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (m.shape[0],) or g.shape != (m.shape[0],):
        raise DimensionMismatch(
            f"vectors of shape {f.shape}, {g.shape} against operator of dimension {m.shape[0]}"
        )
    return complex(np.vdot(f, m @ g))


def scalar_value(op: OperatorSpec) -> float:
    """The single spectral value of an operator acting as a scalar."""
    if len(op.atoms) == 1:
        return op.atoms[0].value
    raise SpectralVariantHasNoVectors("operator with several spectral points is not a scalar")


def spectral_distance(a: OperatorSpec, b: OperatorSpec) -> float:
    """Max distance between the two canonical spectra (paired in order).

    Compares atom values and multiplicities; returns INF when the atom
    patterns are incompatible.
    """
    if len(a.atoms) != len(b.atoms):
        return INF
    dist = 0.0
    for x, y in zip(a.atoms, b.atoms):
        if x.multiplicity != y.multiplicity:
            return INF
        dist = max(dist, abs(x.value - y.value))
    return dist
