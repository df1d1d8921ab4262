"""
Unruh vacuum, Unruh excitations and Alice-Rob states written in the Rindler basis.

Rob's modes for a field with chain length ``n`` (``n = 2s + 1`` for spin ``s``,
``n = 1`` for the Grassmann scalar) are arranged canonically as

    right sector:  c†_{σ,I} (σ descending)   d†_{σ,II} (σ descending)
    left sector:   d†_{σ,I} (σ descending)   c†_{σ,II} (σ descending)

and Alice's single mode is prepended at index 0.  The Unruh creators are

    C†_{σ,R} = cos r c†_{σ,I}  - sin r d_{-σ,II}
    C†_{σ,L} = cos r c†_{σ,II} - sin r d_{-σ,I}

and a general Unruh excitation is ``q_R C†_{σ,R} + q_L C†_{σ,L}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateSpecError, DomainError
from .fock_algebra import (
    ALICE,
    ModeId,
    ModeOrdering,
    SparseState,
    add_states,
    apply_annihilation,
    apply_creation,
    make_state,
    normalize,
    tensor_product,
    vacuum,
)

R_MAX = math.pi / 4
_R_SLACK = 1e-12


@dataclass(frozen=True)
class FieldSpec:
    """A fermionic field: Grassmann scalar (``spin=None``) or spin ``s``."""

    spin: Fraction | None = Fraction(1, 2)

    def __post_init__(self):
        if self.spin is not None:
            s = Fraction(self.spin)
            if s <= 0 or s.denominator != 2:
                raise DomainError(f"spin must be a positive half-integer, got {self.spin}")
            object.__setattr__(self, "spin", s)

    @classmethod
    def grassmann(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def dirac(cls) -> "FieldSpec":
        return cls(Fraction(1, 2))

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """``grassmann``, ``dirac`` or ``spin:<s>`` (e.g. ``spin:3/2``)."""
        text = text.strip().lower()
        if text == "grassmann":
            return cls.grassmann()
        if text == "dirac":
            return cls.dirac()
        if text.startswith("spin:"):
            try:
                return cls(Fraction(text[5:]))
            except (ValueError, ZeroDivisionError):
                pass
        raise DomainError(f"unrecognised field {text!r}")

    @property
    def name(self) -> str:
        if self.spin is None:
            return "grassmann"
        if self.spin == Fraction(1, 2):
            return "dirac"
        return f"spin:{self.spin}"

    @property
    def is_grassmann(self) -> bool:
        return self.spin is None

    @property
    def chain_length(self) -> int:
        return 1 if self.spin is None else int(2 * self.spin + 1)

    @property
    def spins(self) -> tuple[Fraction | None, ...]:
        """Spin-z values, highest first."""
        if self.spin is None:
            return (None,)
        return tuple(self.spin - k for k in range(self.chain_length))

    def check_spin(self, sigma) -> Fraction | None:
        if self.spin is None:
            if sigma not in (None, 0):
                raise DomainError("the Grassmann field has no spin label")
            return None
        try:
            s = Fraction(sigma)
        except (TypeError, ValueError):
            raise DomainError(f"bad spin label {sigma!r}") from None
        if s not in self.spins:
            raise DomainError(f"spin-z {s} outside the range of spin {self.spin}")
        return s

    def _neg(self, sigma):
        return None if sigma is None else -sigma

    def particle(self, sigma, region: str) -> ModeId:
        sector = "R" if region == "I" else "L"
        return ModeId("particle", region, sigma, sector)

    def antiparticle(self, sigma, region: str) -> ModeId:
        sector = "R" if region == "II" else "L"
        return ModeId("antiparticle", region, sigma, sector)

    def sector_modes(self, sector: str) -> tuple[ModeId, ...]:
        if sector == "R":
            return tuple(self.particle(s, "I") for s in self.spins) + tuple(
                self.antiparticle(s, "II") for s in self.spins
            )
        if sector == "L":
            return tuple(self.antiparticle(s, "I") for s in self.spins) + tuple(
                self.particle(s, "II") for s in self.spins
            )
        raise DomainError(f"sector must be 'R' or 'L', got {sector!r}")

    @property
    def rob_modes(self) -> tuple[ModeId, ...]:
        return self.sector_modes("R") + self.sector_modes("L")

    def canonical_ordering(self, with_alice: bool = True) -> ModeOrdering:
        return ModeOrdering(((ALICE,) if with_alice else ()) + self.rob_modes)

    def region_modes(self, region: str) -> tuple[ModeId, ...]:
        return tuple(m for m in self.rob_modes if m.region == region)

    def mode_by_label(self, label: str) -> ModeId:
        for m in (ALICE,) + self.rob_modes:
            if m.label == label or m.label.replace("†", "") == label.replace("†", ""):
                return m
        raise DomainError(f"no mode labelled {label!r} in the {self.name} field")

    def ordering_from_labels(self, labels: Sequence[str]) -> ModeOrdering:
        """Full ordering (Alice first) from the labels of Rob's modes."""
        modes = [self.mode_by_label(x) for x in labels]
        if modes and modes[0] == ALICE:
            modes = modes[1:]
        ordering = ModeOrdering((ALICE,) + tuple(modes))
        if not ordering.same_modes(self.canonical_ordering()):
            raise DomainError("ordering must list every Rob mode exactly once")
        return ordering


def check_squeeze(r: float) -> float:
    """Validate a squeezing angle, clamping round-off just outside [0, π/4]."""
    r = float(r)
    if not (-_R_SLACK <= r <= R_MAX + _R_SLACK):
        raise DomainError(f"squeeze parameter {r} outside [0, pi/4]")
    return min(max(r, 0.0), R_MAX)


def acceleration_to_squeeze(omega: float, a: float, c: float = 1.0) -> float:
    """Squeezing angle ``r`` with ``tan r = exp(-pi omega c / a)``."""
    if omega <= 0 or a <= 0 or c <= 0:
        raise DomainError("frequency, acceleration and c must all be positive")
    return math.atan(math.exp(-math.pi * omega * c / a))


@dataclass(frozen=True)
class UnruhWeights:
    q_r: complex = 1.0
    q_l: complex = 0.0

    def __post_init__(self):
        if abs(abs(self.q_r) ** 2 + abs(self.q_l) ** 2 - 1) > 1e-12:
            raise DomainError("Unruh weights must satisfy |q_R|^2 + |q_L|^2 = 1")

    @classmethod
    def from_qr(cls, q_r: float) -> "UnruhWeights":
        """Real weights with ``q_L = sqrt(1 - q_R^2)``, tolerating round-off in ``q_R``."""
        q_r = float(q_r)
        if not -1 - 1e-9 <= q_r <= 1 + 1e-9:
            raise DomainError(f"q_R = {q_r} must lie in [-1, 1]")
        q_r = min(max(q_r, -1.0), 1.0)
        return cls(q_r, math.sqrt(max(0.0, 1.0 - q_r * q_r)))


# --- binary chains -------------------------------------------------------


@dataclass(frozen=True)
class ChainStats:
    chi: int
    reversed: str
    bits: str

    def prefix_chi(self, k: int) -> int:
        """Number of ones strictly before the ``k``-th digit (1-indexed)."""
        if not 1 <= k <= len(self.bits) + 1:
            raise DomainError(f"position {k} outside chain of length {len(self.bits)}")
        return self.bits[: k - 1].count("1")


def chain_stats(alpha: str) -> ChainStats:
    if set(alpha) - {"0", "1"}:
        raise DomainError(f"chain must be a binary string, got {alpha!r}")
    return ChainStats(alpha.count("1"), alpha[::-1], alpha)


def chains(n: int) -> list[str]:
    return [format(v, f"0{n}b") for v in range(2**n)]


# --- vacua and excitations ----------------------------------------------


def build_sector_vacuum(field: FieldSpec, r: float, sector: str) -> SparseState:
    """Right or left Unruh-sector vacuum over that sector's ``2n`` modes."""
    r = check_squeeze(r)
    n = field.chain_length
    cr, sr = math.cos(r), math.sin(r)
    ordering = ModeOrdering(field.sector_modes(sector))
    sign = -1 if sector == "L" else 1
    terms = {}
    for alpha in chains(n):
        st = chain_stats(alpha)
        terms[alpha + st.reversed] = sign**st.chi * cr ** (n - st.chi) * sr**st.chi
    return make_state(ordering, terms)


def build_unruh_vacuum(field: FieldSpec, r: float) -> SparseState:
    """|0>_U = |0>_R ⊗ |0>_L over Rob's modes in canonical order."""
    return tensor_product(build_sector_vacuum(field, r, "R"), build_sector_vacuum(field, r, "L"))


def apply_sector_creation(
    field: FieldSpec, sigma, sector: str, r: float, psi: SparseState
) -> SparseState:
    """C†_{σ,R} or C†_{σ,L} acting on ``psi``."""
    sigma = field.check_spin(sigma)
    r = check_squeeze(r)
    if sector == "R":
        create, destroy = field.particle(sigma, "I"), field.antiparticle(field._neg(sigma), "II")
    elif sector == "L":
        create, destroy = field.particle(sigma, "II"), field.antiparticle(field._neg(sigma), "I")
    else:
        raise DomainError(f"sector must be 'R' or 'L', got {sector!r}")
    return add_states(
        (math.cos(r), apply_creation(create, psi)),
        (-math.sin(r), apply_annihilation(destroy, psi)),
    )


def apply_sector_annihilation(
    field: FieldSpec, sigma, sector: str, r: float, psi: SparseState
) -> SparseState:
    """C_{σ,R} = cos r c_{σ,I} - sin r d†_{-σ,II} (and the mirror for L)."""
    sigma = field.check_spin(sigma)
    r = check_squeeze(r)
    if sector == "R":
        destroy, create = field.particle(sigma, "I"), field.antiparticle(field._neg(sigma), "II")
    elif sector == "L":
        destroy, create = field.particle(sigma, "II"), field.antiparticle(field._neg(sigma), "I")
    else:
        raise DomainError(f"sector must be 'R' or 'L', got {sector!r}")
    return add_states(
        (math.cos(r), apply_annihilation(destroy, psi)),
        (-math.sin(r), apply_creation(create, psi)),
    )


def apply_unruh_creation(
    field: FieldSpec, sigma, weights: UnruhWeights, r: float, psi: SparseState
) -> SparseState:
    """(q_R C†_{σ,R} + q_L C†_{σ,L}) psi."""
    parts = []
    if weights.q_r != 0:
        parts.append((weights.q_r, apply_sector_creation(field, sigma, "R", r, psi)))
    if weights.q_l != 0:
        parts.append((weights.q_l, apply_sector_creation(field, sigma, "L", r, psi)))
    return add_states(*parts)


# --- joint Alice-Rob states ----------------------------------------------

Monomial = tuple[complex, tuple]


@dataclass(frozen=True)
class JointStateSpec:
    """P|0>_A (A_U|0>_U) + Q|1>_A (B_U|0>_U).

    ``branch_a`` and ``branch_b`` are polynomials in the Unruh creators: each
    monomial ``(coef, (σ_1, ..., σ_k))`` means ``coef C†_{σ_1} ... C†_{σ_k}``.
    The empty tuple is the identity.  Branches are normalized after acting on
    the vacuum.
    """

    p: complex
    q: complex
    branch_a: tuple[Monomial, ...]
    branch_b: tuple[Monomial, ...]
    weights: UnruhWeights = field(default_factory=UnruhWeights)
    name: str = "custom"

    def __post_init__(self):
        if abs(abs(self.p) ** 2 + abs(self.q) ** 2 - 1) > 1e-12:
            raise DomainError("|P|^2 + |Q|^2 must equal 1")
        object.__setattr__(self, "branch_a", _freeze(self.branch_a))
        object.__setattr__(self, "branch_b", _freeze(self.branch_b))

    def with_weights(self, weights: UnruhWeights) -> "JointStateSpec":
        return replace(self, weights=weights)


def _freeze(poly) -> tuple[Monomial, ...]:
    out = []
    for coef, sigmas in poly:
        sigmas = tuple(None if s is None else Fraction(s) for s in sigmas)
        out.append((complex(coef), sigmas))
    return tuple(out)


def branch_state(field: FieldSpec, poly, weights: UnruhWeights, r: float) -> SparseState:
    """Normalized ``A_U |0>_U`` over Rob's modes."""
    vac = build_unruh_vacuum(field, r)
    parts = []
    for coef, sigmas in poly:
        if coef == 0:
            continue
        psi = vac
        for sigma in reversed(sigmas):
            psi = apply_unruh_creation(field, sigma, weights, r, psi)
        parts.append((coef, psi))
    total = add_states(*parts) if parts else None
    if total is None or total.norm() < 1e-12:
        raise DegenerateSpecError("branch polynomial annihilates the Unruh vacuum")
    return normalize(total)


def build_joint_state(spec: JointStateSpec, field: FieldSpec, r: float) -> SparseState:
    """The joint state in the canonical ordering, Alice's bit leftmost."""
    alice = ModeOrdering((ALICE,))
    empty = vacuum(alice)
    full = apply_creation(ALICE, empty)
    branches = []
    if spec.p != 0:
        branches.append((spec.p, tensor_product(empty, branch_state(field, spec.branch_a, spec.weights, r))))
    if spec.q != 0:
        branches.append((spec.q, tensor_product(full, branch_state(field, spec.branch_b, spec.weights, r))))
    return add_states(*branches)


# --- named states ---------------------------------------------------------

UP, DOWN = Fraction(1, 2), Fraction(-1, 2)
_SQRT_HALF = math.sqrt(0.5)


def grassmann_state(p, a1, b1, a2, b2, weights=UnruhWeights(), name="grassmann") -> JointStateSpec:
    """P|0>_A (a1|0>_U + b1|1>_U) + Q|1>_A (a2|0>_U + b2|1>_U)."""
    q = math.sqrt(max(0.0, 1 - abs(p) ** 2))
    return JointStateSpec(
        p, q, ((a1, ()), (b1, (None,))), ((a2, ()), (b2, (None,))), weights, name
    )


def dirac_state(p, first, second, weights=UnruhWeights(), name="dirac") -> JointStateSpec:
    """``first = (a1, b1, c1, d1)`` multiplies |0>, |↑>, |↓>, |p> = C†_↑C†_↓|0>."""
    q = math.sqrt(max(0.0, 1 - abs(p) ** 2))
    words = ((), (UP,), (DOWN,), (UP, DOWN))
    return JointStateSpec(
        p, q, tuple(zip(first, words)), tuple(zip(second, words)), weights, name
    )


def dirac_singlet(weights=UnruhWeights()) -> JointStateSpec:
    return dirac_state(_SQRT_HALF, (0, 1, 0, 0), (0, 0, 1, 0), weights, "dirac-singlet")


def grassmann_fig_state(weights=UnruhWeights()) -> JointStateSpec:
    """P = 1/sqrt(2), a1 = b2 = 1, a2 = b1 = 0."""
    return grassmann_state(_SQRT_HALF, 1, 0, 0, 1, weights, "grassmann-fig2")


def spin32_singlet_analogue(weights=UnruhWeights()) -> JointStateSpec:
    """A_U = C†_{+3/2} + C†_{+1/2},  B_U = C†_{-1/2} + C†_{-3/2}."""
    h = Fraction(1, 2)
    return JointStateSpec(
        _SQRT_HALF,
        _SQRT_HALF,
        ((1, (3 * h,)), (1, (h,))),
        ((1, (-h,)), (1, (-3 * h,))),
        weights,
        "spin32-singlet",
    )


def generic_dirac_state(seed: int, pairs: bool = True, weights=UnruhWeights()) -> JointStateSpec:
    """Dirac state with seeded pseudo-random complex coefficients.

    With ``pairs=False`` the pair amplitudes ``d1, d2`` are zero.
    """
    rng = np.random.default_rng(seed)
    k = 4 if pairs else 3

    def unit():
        v = rng.normal(size=k) + 1j * rng.normal(size=k)
        return tuple(complex(x) for x in v / np.linalg.norm(v)) + (0j,) * (4 - k)

    first, second = unit(), unit()
    p = float(rng.uniform(0.3, 0.9))
    name = f"dirac-generic{'' if pairs else '-nopair'}-seed{seed}"
    return dirac_state(p, first, second, weights, name)


# --- Dirac shorthand --------------------------------------------------------

_DIRAC_GROUP = {"0": "00", "↓": "01", "↑": "10", "p": "11"}


def dirac_ket(symbols: str, alice: int | None = None) -> str:
    """Expand the four-symbol Dirac shorthand (``0 ↑ ↓ p``) into a bitstring.

    Groups follow the canonical order c_I, d_II, d_I, c_II.  With ``alice``
    given, her bit is prepended.
    """
    symbols = symbols.replace(" ", "")
    if len(symbols) != 4 or set(symbols) - set(_DIRAC_GROUP):
        raise DomainError(f"bad Dirac shorthand {symbols!r}")
    bits = "".join(_DIRAC_GROUP[c] for c in symbols)
    return bits if alice is None else str(alice) + bits
