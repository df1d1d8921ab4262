"""
Finite fermionic Fock spaces with an explicit operator ordering.

A basis ket is labelled by an occupation bitstring relative to a
:class:`ModeOrdering`.  The ket ``|b_0 b_1 ... b_{M-1}>`` stands for

    (f_0^dag)^{b_0} (f_1^dag)^{b_1} ... (f_{M-1}^dag)^{b_{M-1}} |0>

where ``f_k`` is the mode at ordering position ``k``.  Changing the ordering
changes the sign of some basis kets, which is the whole point of this package.

Occupation keys are packed into Python ints with position ``k`` stored at bit
``M - 1 - k``, so ``format(key, f"0{M}b")`` prints the bitstring in ordering
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError

PRUNE = 1e-15

SPECIES = ("particle", "antiparticle")
REGIONS = ("A", "I", "II")

_ARROWS = {Fraction(1, 2): "↑", Fraction(-1, 2): "↓"}


@dataclass(frozen=True)
class ModeId:
    """Identity of one fermionic mode.

    ``spin_z`` is ``None`` for modes without spin (the Grassmann scalar and
    Alice's mode).  ``sector`` records the Unruh sector (``"R"``/``"L"``) the
    mode belongs to in the canonical ordering; it does not take part in
    equality.  ``name`` overrides the generated label and is meant for small
    abstract systems (``ModeId.named("a")``).
    """

    species: str
    region: str
    spin_z: Fraction | None = None
    sector: str | None = field(default=None, compare=False)
    name: str | None = None

    @classmethod
    def named(cls, name: str) -> "ModeId":
        return cls("particle", "I", None, None, name)

    def __post_init__(self):
        if self.species not in SPECIES:
            raise DomainError(f"unknown species {self.species!r}")
        if self.region not in REGIONS:
            raise DomainError(f"unknown region {self.region!r}")
        if self.spin_z is not None:
            object.__setattr__(self, "spin_z", Fraction(self.spin_z))

    @property
    def label(self) -> str:
        if self.name is not None:
            return self.name
        if self.region == "A":
            return "A"
        op = "c†" if self.species == "particle" else "d†"
        if self.spin_z is None:
            spin = ""
        elif self.spin_z in _ARROWS:
            spin = _ARROWS[self.spin_z]
        else:
            sign = "+" if self.spin_z > 0 else "-" if self.spin_z < 0 else ""
            spin = f"({sign}{abs(self.spin_z)})"
        return f"{op}{spin}{self.region}"

    def __repr__(self):
        return self.label


ALICE = ModeId("particle", "A")


class ModeOrdering:
    """An ordered tuple of distinct modes; immutable and hashable."""

    __slots__ = ("modes", "positions")

    def __init__(self, modes: Iterable[ModeId]):
        modes = tuple(modes)
        positions = {m: k for k, m in enumerate(modes)}
        if len(positions) != len(modes):
            raise DomainError("ordering contains repeated modes")
        if ALICE in positions and positions[ALICE] != 0:
            raise DomainError("Alice's mode must sit at index 0")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "positions", positions)

    def __setattr__(self, name, value):
        raise AttributeError("ModeOrdering is immutable")

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, k):
        return self.modes[k]

    def __eq__(self, other):
        return isinstance(other, ModeOrdering) and self.modes == other.modes

    def __hash__(self):
        return hash(self.modes)

    def __repr__(self):
        return "ModeOrdering(" + " ".join(m.label for m in self.modes) + ")"

    def index(self, mode: ModeId) -> int:
        try:
            return self.positions[mode]
        except KeyError:
            raise DomainError(f"mode {mode.label} is not part of {self!r}") from None

    def same_modes(self, other: "ModeOrdering") -> bool:
        return len(self) == len(other) and set(self.positions) == set(other.positions)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.modes]


@dataclass(frozen=True)
class SparseState:
    """Superposition of occupation keys; ``terms`` must not be mutated."""

    terms: Mapping[int, complex]
    ordering: ModeOrdering

    @property
    def n_modes(self) -> int:
        return len(self.ordering)

    def bit(self, key: int, position: int) -> int:
        return (key >> (self.n_modes - 1 - position)) & 1

    def bitstring(self, key: int) -> str:
        return format(key, f"0{self.n_modes}b")

    def amplitude(self, bits: str | int) -> complex:
        key = int(bits, 2) if isinstance(bits, str) else bits
        return self.terms.get(key, 0.0)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.terms.values())))

    def is_zero(self) -> bool:
        return not self.terms

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(2**self.n_modes, dtype=complex)
        for key, amp in self.terms.items():
            vec[key] = amp
        return vec

    def __repr__(self):
        parts = [f"{amp:+.6g}|{self.bitstring(k)}>" for k, amp in sorted(self.terms.items())]
        return f"SparseState({' '.join(parts) or '0'}; {self.ordering!r})"


def _pruned(terms: Mapping[int, complex]) -> dict[int, complex]:
    return {k: v for k, v in terms.items() if abs(v) >= PRUNE}


def make_state(ordering: ModeOrdering, terms: Mapping[str | int, complex]) -> SparseState:
    """Build a state from ``{bitstring or key: amplitude}``."""
    m = len(ordering)
    packed: dict[int, complex] = {}
    for bits, amp in terms.items():
        if isinstance(bits, str):
            if len(bits) != m or set(bits) - {"0", "1"}:
                raise DomainError(f"bad occupation string {bits!r} for {m} modes")
            key = int(bits, 2)
        else:
            key = int(bits)
            if key < 0 or key >= 1 << m:
                raise DomainError(f"occupation key {key} out of range")
        packed[key] = packed.get(key, 0) + complex(amp)
    return SparseState(_pruned(packed), ordering)


def vacuum(ordering: ModeOrdering) -> SparseState:
    return SparseState({0: 1.0 + 0j}, ordering)


def zero_state(ordering: ModeOrdering) -> SparseState:
    return SparseState({}, ordering)


def normalize(psi: SparseState) -> SparseState:
    nrm = psi.norm()
    if nrm == 0.0:
        raise DomainError("cannot normalize the zero state")
    return SparseState({k: v / nrm for k, v in psi.terms.items()}, psi.ordering)


def scale(psi: SparseState, c: complex) -> SparseState:
    return SparseState(_pruned({k: c * v for k, v in psi.terms.items()}), psi.ordering)


def add_states(*pairs: tuple[complex, SparseState]) -> SparseState:
    """Linear combination ``sum(c_i * psi_i)``; all states share one ordering."""
    if not pairs:
        raise DomainError("nothing to add")
    ordering = pairs[0][1].ordering
    out: dict[int, complex] = {}
    for c, psi in pairs:
        if psi.ordering != ordering:
            raise DomainError("cannot add states written in different orderings")
        for k, v in psi.terms.items():
            out[k] = out.get(k, 0) + c * v
    return SparseState(_pruned(out), ordering)


def _parity_left(key: int, position: int, n_modes: int) -> int:
    """(-1)^(occupied positions strictly left of ``position``)."""
    return -1 if (key >> (n_modes - position)).bit_count() & 1 else 1


def apply_creation(mode: ModeId, psi: SparseState) -> SparseState:
    m = psi.n_modes
    pos = psi.ordering.index(mode)
    mask = 1 << (m - 1 - pos)
    out: dict[int, complex] = {}
    for key, amp in psi.terms.items():
        if key & mask:
            continue
        out[key | mask] = _parity_left(key, pos, m) * amp
    return SparseState(out, psi.ordering)


def apply_annihilation(mode: ModeId, psi: SparseState) -> SparseState:
    m = psi.n_modes
    pos = psi.ordering.index(mode)
    mask = 1 << (m - 1 - pos)
    out: dict[int, complex] = {}
    for key, amp in psi.terms.items():
        if not key & mask:
            continue
        out[key ^ mask] = _parity_left(key, pos, m) * amp
    return SparseState(out, psi.ordering)


def inner_product(phi: SparseState, psi: SparseState) -> complex:
    """<phi|psi>, antilinear in ``phi``."""
    if phi.ordering != psi.ordering:
        raise DomainError("inner product needs both states in the same ordering; reorder first")
    small, big = (phi, psi) if len(phi.terms) <= len(psi.terms) else (psi, phi)
    total = 0j
    for k in small.terms:
        if k in big.terms:
            total += np.conj(phi.terms[k]) * psi.terms[k]
    return complex(total)


def permutation_sign(positions: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``positions`` (distinct ints)."""
    inversions = 0
    for i in range(len(positions)):
        pi = positions[i]
        for j in range(i + 1, len(positions)):
            if pi > positions[j]:
                inversions += 1
    return -1 if inversions & 1 else 1


def reorder_basis(psi: SparseState, target: ModeOrdering) -> SparseState:
    """Re-express ``psi`` in the basis attached to ``target``.

    A key whose occupied modes appear in source order ``(m_1, ..., m_k)`` is the
    ket ``m_1^dag ... m_k^dag |0>``; sorting those creators into ``target``
    order costs the sign of that permutation.
    """
    source = psi.ordering
    if not source.same_modes(target):
        raise DomainError("target ordering must be a permutation of the same modes")
    if source == target:
        return psi
    m = len(source)
    dest = [target.positions[mode] for mode in source.modes]
    out: dict[int, complex] = {}
    for key, amp in psi.terms.items():
        occupied = [dest[p] for p in range(m) if (key >> (m - 1 - p)) & 1]
        new_key = 0
        for q in occupied:
            new_key |= 1 << (m - 1 - q)
        out[new_key] = permutation_sign(occupied) * amp
    return SparseState(out, target)


def tensor_product(left: SparseState, right: SparseState) -> SparseState:
    """Juxtapose two states: every mode of ``left`` precedes every mode of ``right``.

    With the left block's creators written first, the product ket carries no
    extra sign.
    """
    overlap = set(left.ordering.positions) & set(right.ordering.positions)
    if overlap:
        raise DomainError(f"modes {sorted(m.label for m in overlap)} appear on both sides")
    ordering = ModeOrdering(left.ordering.modes + right.ordering.modes)
    shift = right.n_modes
    out = {
        (kl << shift) | kr: al * ar
        for kl, al in left.terms.items()
        for kr, ar in right.terms.items()
    }
    return SparseState(_pruned(out), ordering)


def expectation(psi: SparseState, string: Sequence[tuple[str, ModeId]]) -> complex:
    """<psi| O_1 O_2 ... O_n |psi> for ``string = [("+" or "-", mode), ...]``.

    ``"+"`` is a creator and ``"-"`` an annihilator; the rightmost factor acts first.
    """
    phi = psi
    for kind, mode in reversed(string):
        if kind == "+":
            phi = apply_creation(mode, phi)
        elif kind == "-":
            phi = apply_annihilation(mode, phi)
        else:
            raise DomainError(f"operator kind must be '+' or '-', got {kind!r}")
    return inner_product(psi, phi)
