"""
Reduced states, partial transposition, negativity and entropy.

The reduced density matrix is indexed by ``(a, i)`` where ``a`` is the
occupation of the transposed mode (Alice) and ``i`` the occupation bits of the
kept modes, read left to right in the state's ordering.  Row index is
``a * 2**n_kept + i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalValidityError
from .fock_algebra import ALICE, SparseState, ModeOrdering, reorder_basis
from .rindler_states import FieldSpec, JointStateSpec, build_joint_state, check_squeeze

NEG_TOL = 1e-12
PSD_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14


@dataclass(frozen=True)
class PartitionSpec:
    """Ordering positions: one transposed mode, kept modes and traced modes."""

    kept_a: int
    kept_b: tuple[int, ...]
    traced: tuple[int, ...]

    def check(self, n_modes: int):
        everything = [self.kept_a, *self.kept_b, *self.traced]
        if sorted(everything) != list(range(n_modes)):
            raise DomainError(
                f"partition {self} does not cover positions 0..{n_modes - 1} exactly once"
            )


def rob_partition(ordering: ModeOrdering) -> PartitionSpec:
    """Alice transposed, region I kept, region II traced."""
    kept_b = tuple(k for k, m in enumerate(ordering) if m.region == "I")
    traced = tuple(k for k, m in enumerate(ordering) if m.region == "II")
    return PartitionSpec(ordering.index(ALICE), kept_b, traced)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    n_kept: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class NegativityCurve:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape:
            raise DomainError("grid and values must have the same length")
        if not np.all(np.isfinite(values)):
            raise DomainError("negativity values must be finite")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def partial_trace(psi: SparseState, part: PartitionSpec) -> DensityMatrix:
    m = psi.n_modes
    part.check(m)
    nb = len(part.kept_b)

    def bits_at(key, positions):
        out = 0
        for p in positions:
            out = (out << 1) | ((key >> (m - 1 - p)) & 1)
        return out

    columns: dict[int, dict[int, complex]] = {}
    for key, amp in psi.terms.items():
        row = (bits_at(key, (part.kept_a,)) << nb) | bits_at(key, part.kept_b)
        col = bits_at(key, part.traced)
        columns.setdefault(col, {})[row] = amp
    dim = 2 << nb
    rho = np.zeros((dim, dim), dtype=complex)
    for entries in columns.values():
        rows = np.fromiter(entries.keys(), dtype=np.int64)
        vec = np.fromiter(entries.values(), dtype=complex)
        rho[np.ix_(rows, rows)] += np.outer(vec, vec.conj())
    return DensityMatrix(rho, nb)


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose on the leading (Alice) qubit."""
    half = rho.dim // 2
    blocks = rho.matrix.reshape(2, half, 2, half)
    return blocks.transpose(2, 1, 0, 3).reshape(rho.dim, rho.dim)


def negativity_from_pt(pt: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(pt)
    return float(-ev[ev < -NEG_TOL].sum()) + 0.0


def negativity(rho: DensityMatrix) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    return negativity_from_pt(partial_transpose(rho))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits."""
    ev = rho.eigenvalues()
    if ev.min() < -PSD_TOL:
        raise NumericalValidityError(f"density matrix has eigenvalue {ev.min():.3e}")
    ev = ev[ev > ENTROPY_CUTOFF]
    return float(-(ev * np.log2(ev)).sum()) + 0.0


def negativity_curve(
    spec: JointStateSpec, field: FieldSpec, ordering: ModeOrdering, grid: Sequence[float]
) -> NegativityCurve:
    """Reference (one state at a time) negativity curve for one ordering."""
    if ordering[0] != ALICE or not ordering.same_modes(field.canonical_ordering()):
        raise DomainError("ordering must contain the field's modes with Alice leftmost")
    part = rob_partition(ordering)
    values = []
    for r in grid:
        psi = build_joint_state(spec, field, check_squeeze(r))
        values.append(negativity(partial_trace(reorder_basis(psi, ordering), part)))
    return NegativityCurve(np.asarray(grid, dtype=float), np.asarray(values))
