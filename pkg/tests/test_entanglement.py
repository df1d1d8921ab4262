import math

import numpy as np
import pytest

from fermiorder.entanglement import (
    DensityMatrix,
    NegativityCurve,
    PartitionSpec,
    negativity,
    negativity_curve,
    partial_trace,
    partial_transpose,
    rob_partition,
    von_neumann_entropy,
)
from fermiorder.errors import DomainError, NumericalValidityError
from fermiorder.fock_algebra import ModeId, ModeOrdering, make_state, reorder_basis
from fermiorder.rindler_states import (
    FieldSpec,
    UnruhWeights,
    build_joint_state,
    dirac_singlet,
    grassmann_fig_state,
)
from oracle import jw_annihilators

a, b, c = (ModeId.named(x) for x in "abc")
GRID = np.linspace(0, math.pi / 4, 9)


def dense_rob_negativity(psi, ordering):
    """Negativity via dense Jordan-Wigner kets, independent of the sparse code."""
    m = len(ordering)
    source = list(psi.ordering)
    ads = [x.T for x in jw_annihilators(m)]
    dense = psi.to_dense()
    amps = np.zeros(2**m, dtype=complex)
    for key in range(2**m):
        v = np.zeros(2**m)
        v[0] = 1.0
        for pos in reversed(range(m)):
            if (key >> (m - 1 - pos)) & 1:
                v = ads[source.index(ordering[pos])] @ v
        amps[key] = v @ dense
    kept = [k for k, x in enumerate(ordering) if x.region == "I"]
    traced = [k for k, x in enumerate(ordering) if x.region == "II"]
    axes = [0] + kept + traced
    t = amps.reshape([2] * m).transpose(axes).reshape(2 ** (1 + len(kept)), 2 ** len(traced))
    rho = t @ t.conj().T
    h = rho.shape[0] // 2
    pt = rho.reshape(2, h, 2, h).transpose(2, 1, 0, 3).reshape(2 * h, 2 * h)
    ev = np.linalg.eigvalsh(pt)
    return -ev[ev < -1e-12].sum()


def test_product_state_becomes_bell_pair():
    psi = make_state(ModeOrdering([a, b]), {"00": 0.5, "01": 0.5, "10": 0.5, "11": 0.5})
    assert von_neumann_entropy(partial_trace(psi, PartitionSpec(0, (), (1,)))) == pytest.approx(0, abs=1e-10)
    flipped = reorder_basis(psi, ModeOrdering([b, a]))
    assert flipped.amplitude("11") == -0.5
    assert von_neumann_entropy(partial_trace(flipped, PartitionSpec(1, (), (0,)))) == pytest.approx(1, abs=1e-10)


def test_traced_mode_position_changes_negativity():
    phi = make_state(ModeOrdering([a, b, c]), {"100": 0.5, "010": 0.5, "101": 0.5, "011": 0.5})
    assert negativity(partial_trace(phi, PartitionSpec(0, (1,), (2,)))) == pytest.approx(0.5, abs=1e-10)
    moved = reorder_basis(phi, ModeOrdering([a, c, b]))
    rho = partial_trace(moved, PartitionSpec(0, (2,), (1,)))
    np.testing.assert_allclose(rho.matrix, np.diag([0, 0.5, 0.5, 0]), atol=1e-15)
    assert negativity(rho) == pytest.approx(0.0, abs=1e-10)


def test_bell_state_negativity():
    bell = make_state(ModeOrdering([a, b]), {"00": 2**-0.5, "11": 2**-0.5})
    rho = partial_trace(bell, PartitionSpec(0, (1,), ()))
    assert np.linalg.eigvalsh(partial_transpose(rho)).min() == pytest.approx(-0.5)
    assert negativity(rho) == pytest.approx(0.5)


def test_partial_trace_is_a_state(rng):
    ordering = ModeOrdering([a, b, c])
    vec = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi = make_state(ordering, dict(enumerate(vec / np.linalg.norm(vec))))
    rho = partial_trace(psi, PartitionSpec(1, (2,), (0,)))
    assert rho.dim == 4
    assert rho.trace() == pytest.approx(1)
    np.testing.assert_allclose(rho.matrix, rho.matrix.conj().T, atol=1e-15)
    assert rho.eigenvalues().min() > -1e-12


@pytest.mark.parametrize(
    "part", [PartitionSpec(0, (), ()), PartitionSpec(0, (0,), (1,)), PartitionSpec(3, (1,), (0,))]
)
def test_bad_partitions(part):
    psi = make_state(ModeOrdering([a, b]), {"00": 1.0})
    with pytest.raises(DomainError):
        partial_trace(psi, part)


def test_entropy_rejects_non_psd():
    with pytest.raises(NumericalValidityError):
        von_neumann_entropy(DensityMatrix(np.diag([1.5, -0.5]).astype(complex), 0))


def test_curve_validation():
    with pytest.raises(DomainError):
        NegativityCurve(np.array([0.0, 0.0]), np.array([0.1, 0.1]))
    with pytest.raises(DomainError):
        NegativityCurve(np.array([0.0, 0.1]), np.array([0.1]))
    with pytest.raises(DomainError):
        NegativityCurve(np.array([0.0, 0.1]), np.array([0.1, np.nan]))


def test_rob_partition_follows_regions():
    ordering = FieldSpec.grassmann().ordering_from_labels(["c†I", "d†I", "d†II", "c†II"])
    assert rob_partition(ordering) == PartitionSpec(0, (1, 2), (3, 4))


@pytest.mark.parametrize(
    "field, spec, labels",
    [
        (FieldSpec.grassmann(), grassmann_fig_state, ["c†I", "d†II", "d†I", "c†II"]),
        (FieldSpec.grassmann(), grassmann_fig_state, ["c†I", "d†I", "d†II", "c†II"]),
        (FieldSpec.grassmann(), grassmann_fig_state, ["c†II", "d†I", "c†I", "d†II"]),
        (FieldSpec.dirac(), dirac_singlet, None),
        (FieldSpec.dirac(), dirac_singlet, ["c↑I", "d↓II", "d↓I", "c↑II", "c↓I", "d↑II", "d↑I", "c↓II"]),
        (FieldSpec.dirac(), dirac_singlet, ["d↑II", "c↓II", "c↑I", "d↓I", "c↓I", "d↑I", "c↑II", "d↓II"]),
    ],
)
def test_curve_matches_dense_oracle(field, spec, labels):
    ordering = field.canonical_ordering() if labels is None else field.ordering_from_labels(labels)
    s = spec(UnruhWeights.from_qr(2**-0.5))
    curve = negativity_curve(s, field, ordering, GRID)
    for r, v in zip(GRID, curve.values):
        assert v == pytest.approx(dense_rob_negativity(build_joint_state(s, field, r), ordering), abs=1e-12)


def test_grassmann_region_one_only_at_zero_squeeze():
    # no acceleration: Rob's state is a qubit in region I and the ordering cannot matter
    field = FieldSpec.grassmann()
    s = grassmann_fig_state(UnruhWeights.from_qr(2**-0.5))
    values = {
        negativity_curve(s, field, field.ordering_from_labels(lab), [0.0]).values[0]
        for lab in (["c†I", "d†II", "d†I", "c†II"], ["d†II", "c†II", "d†I", "c†I"])
    }
    assert max(values) - min(values) < 1e-14


def test_curve_requires_alice_first():
    field = FieldSpec.grassmann()
    with pytest.raises(DomainError):
        negativity_curve(grassmann_fig_state(), field, field.canonical_ordering(with_alice=False), GRID)
