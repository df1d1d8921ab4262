import math
from fractions import Fraction

import numpy as np
import pytest

from fermiorder.errors import DegenerateSpecError, DomainError
from fermiorder.fock_algebra import ALICE, inner_product
from fermiorder.rindler_states import (
    DOWN,
    UP,
    FieldSpec,
    JointStateSpec,
    UnruhWeights,
    acceleration_to_squeeze,
    apply_sector_annihilation,
    apply_sector_creation,
    apply_unruh_creation,
    build_joint_state,
    build_sector_vacuum,
    build_unruh_vacuum,
    chain_stats,
    chains,
    check_squeeze,
    dirac_singlet,
    grassmann_state,
)
from goldens import (
    dirac_excitation_golden,
    dirac_pair_golden,
    dirac_vacuum_golden,
    grassmann_excitation_golden,
    grassmann_vacuum_golden,
)

GRASSMANN, DIRAC, SPIN32 = FieldSpec.grassmann(), FieldSpec.dirac(), FieldSpec.parse("spin:3/2")
NINE_R = np.linspace(0, math.pi / 4, 9)
RANDOM_R = np.random.default_rng(7).uniform(0, math.pi / 4, 5)


def _close(psi, golden, tol=1e-12):
    keys = set(golden) | set(psi.terms)
    return max(abs(psi.terms.get(k, 0) - golden.get(k, 0)) for k in keys) < tol


@pytest.mark.parametrize("r", RANDOM_R)
def test_grassmann_goldens(r):
    vac = build_unruh_vacuum(GRASSMANN, r)
    assert _close(vac, grassmann_vacuum_golden(r))
    w = UnruhWeights.from_qr(0.3)
    exc = apply_unruh_creation(GRASSMANN, None, w, r, vac)
    assert _close(exc, grassmann_excitation_golden(r, w.q_r, w.q_l))


@pytest.mark.parametrize("r", RANDOM_R)
def test_dirac_goldens(r):
    w = UnruhWeights.from_qr(0.6)
    vac = build_unruh_vacuum(DIRAC, r)
    assert _close(vac, dirac_vacuum_golden(r))
    for sigma, sym in ((UP, "↑"), (DOWN, "↓")):
        exc = apply_unruh_creation(DIRAC, sigma, w, r, vac)
        assert _close(exc, dirac_excitation_golden(r, w.q_r, w.q_l, sym))
    pair = apply_unruh_creation(DIRAC, UP, w, r, apply_unruh_creation(DIRAC, DOWN, w, r, vac))
    assert _close(pair, dirac_pair_golden(r, w.q_r, w.q_l))


@pytest.mark.parametrize("field", [GRASSMANN, DIRAC, SPIN32], ids=lambda f: f.name)
@pytest.mark.parametrize("sector", ["R", "L"])
def test_vacuum_annihilation(field, sector):
    for r in NINE_R:
        vac = build_sector_vacuum(field, r, sector)
        assert abs(vac.norm() - 1) < 1e-12
        for sigma in field.spins:
            out = apply_sector_annihilation(field, sigma, sector, r, vac)
            assert max((abs(v) for v in out.terms.values()), default=0.0) < 1e-12


@pytest.mark.parametrize("field", [GRASSMANN, DIRAC, SPIN32], ids=lambda f: f.name)
def test_excitations_are_normalized_and_orthogonal(field):
    r = 0.5
    vac = build_unruh_vacuum(field, r)
    w = UnruhWeights.from_qr(0.8)
    excited = [apply_unruh_creation(field, s, w, r, vac) for s in field.spins]
    for i, a in enumerate(excited):
        assert abs(a.norm() - 1) < 1e-12
        assert abs(inner_product(vac, a)) < 1e-12
        for b in excited[i + 1:]:
            assert abs(inner_product(a, b)) < 1e-12


def test_creation_is_exclusive():
    vac = build_unruh_vacuum(DIRAC, 0.0)
    w = UnruhWeights.from_qr(1.0)
    once = apply_unruh_creation(DIRAC, UP, w, 0.0, vac)
    assert apply_unruh_creation(DIRAC, UP, w, 0.0, once).is_zero()


def test_sector_creation_inverts_annihilation():
    # C_R C†_R |0>_R = |0>_R
    for r in NINE_R:
        vac = build_sector_vacuum(DIRAC, r, "R")
        out = apply_sector_annihilation(DIRAC, UP, "R", r, apply_sector_creation(DIRAC, UP, "R", r, vac))
        assert abs(inner_product(vac, out) - 1) < 1e-12


@pytest.mark.parametrize(
    "alpha, chi, rev, prefix",
    [("0", 0, "0", [0, 0]), ("101", 2, "101", [0, 1, 1, 2]), ("0011", 2, "1100", [0, 0, 0, 1, 2])],
)
def test_chain_stats(alpha, chi, rev, prefix):
    st = chain_stats(alpha)
    assert (st.chi, st.reversed) == (chi, rev)
    assert [st.prefix_chi(k) for k in range(1, len(alpha) + 2)] == prefix


def test_chains():
    assert chains(2) == ["00", "01", "10", "11"]
    assert len(chains(4)) == 16
    with pytest.raises(DomainError):
        chain_stats("102")


def test_mode_counts_and_canonical_layout():
    assert [len(f.rob_modes) for f in (GRASSMANN, DIRAC, SPIN32)] == [4, 8, 16]
    assert DIRAC.canonical_ordering().labels == [
        "A", "c†↑I", "c†↓I", "d†↑II", "d†↓II", "d†↑I", "d†↓I", "c†↑II", "c†↓II",
    ]
    assert GRASSMANN.canonical_ordering().labels == ["A", "c†I", "d†II", "d†I", "c†II"]
    assert SPIN32.spins == tuple(Fraction(k, 2) for k in (3, 1, -1, -3))


def test_labels_round_trip():
    ordering = DIRAC.ordering_from_labels(["c↑I", "d†↓II", "d↓I", "c↑II", "c↓I", "d↑II", "d↑I", "c↓II"])
    assert ordering[0] == ALICE
    assert DIRAC.ordering_from_labels(ordering.labels[1:]) == ordering
    with pytest.raises(DomainError):
        DIRAC.ordering_from_labels(["c↑I"])
    with pytest.raises(DomainError):
        DIRAC.mode_by_label("x")


@pytest.mark.parametrize("text", ["spin:1", "spin:0", "spin:-1/2", "bosonic", "spin:x"])
def test_bad_fields(text):
    with pytest.raises(DomainError):
        FieldSpec.parse(text)


def test_squeeze_domain():
    assert check_squeeze(-1e-13) == 0.0
    assert check_squeeze(math.pi / 4 + 1e-13) == math.pi / 4
    for r in (-0.01, 0.8, float("inf")):
        with pytest.raises(DomainError):
            check_squeeze(r)


def test_acceleration_to_squeeze():
    assert acceleration_to_squeeze(1.0, 1e12) == pytest.approx(math.pi / 4, abs=1e-9)
    assert acceleration_to_squeeze(1.0, 1e-3) == pytest.approx(0.0, abs=1e-12)
    r = acceleration_to_squeeze(2.0, 3.0)
    assert math.tan(r) == pytest.approx(math.exp(-2 * math.pi / 3))
    with pytest.raises(DomainError):
        acceleration_to_squeeze(1.0, 0.0)


def test_weights_and_spec_validation():
    with pytest.raises(DomainError):
        UnruhWeights(0.5, 0.5)
    with pytest.raises(DomainError):
        UnruhWeights.from_qr(1.5)
    with pytest.raises(DomainError):
        JointStateSpec(0.5, 0.5, ((1, ()),), ((1, ()),))
    spec = JointStateSpec(1.0, 0.0, ((1, (UP,)), (1, (UP,))), ((1, ()),), UnruhWeights.from_qr(1.0))
    psi = build_joint_state(spec, DIRAC, 0.2)
    assert abs(psi.norm() - 1) < 1e-12


def test_degenerate_branch():
    spec = JointStateSpec(1.0, 0.0, ((1, (UP, UP)),), ((1, ()),), UnruhWeights.from_qr(1.0))
    with pytest.raises(DegenerateSpecError):
        build_joint_state(spec, DIRAC, 0.3)


@pytest.mark.parametrize("r", NINE_R)
def test_joint_states_are_normalized(r):
    assert abs(build_joint_state(dirac_singlet(UnruhWeights.from_qr(0.5)), DIRAC, r).norm() - 1) < 1e-12
    spec = grassmann_state(0.6, 0.3, 0.9539392014169456, 1.0, 0.0, UnruhWeights.from_qr(0.7))
    assert abs(build_joint_state(spec, GRASSMANN, r).norm() - 1) < 1e-12
