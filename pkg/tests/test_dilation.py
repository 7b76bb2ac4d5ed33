"""Channel dilations: isometry construction, completion, evolution, verification."""

import numpy as np
import pytest

import qdilate as q

from conftest import IDENTITY2, P0, P1


def identity_decomposition():
    return q.canonical_decompose(q.map_from_kraus([(1.0, IDENTITY2)], 2))


def dephasing_map():
    return q.map_from_kraus([(1.0, P0), (1.0, P1)], 2)


def amplitude_damping_map():
    k0 = np.diag([1.0, np.sqrt(0.5)]).astype(complex)
    k1 = np.array([[0.0, np.sqrt(0.5)], [0.0, 0.0]], dtype=complex)
    return q.map_from_kraus([(1.0, k0), (1.0, k1)], 2)


def test_identity_channel_isometry_is_identity():
    iso = q.build_dilation_isometry(identity_decomposition())
    assert iso.shape == (2, 2)
    assert q.max_abs(iso - IDENTITY2) < 1e-12


def test_identity_channel_unitary_is_identity():
    du = q.build_dilation_unitary(identity_decomposition())
    assert du.anc_dim == 1
    assert q.max_abs(du.u - IDENTITY2) < 1e-12


def test_dephasing_isometry_copies_basis_index():
    dec = q.canonical_decompose(dephasing_map())
    iso = q.build_dilation_isometry(dec)
    conv = q.CompositeIndexConvention(dim_sys=2, dim_anc=2)
    expected = np.zeros((4, 2), dtype=complex)
    expected[conv.flat(0, 0), 0] = 1.0
    expected[conv.flat(1, 1), 1] = 1.0
    assert q.max_abs(iso - expected) < 1e-12


def test_dephasing_unitary_kills_off_diagonals(plus_state):
    dec = q.canonical_decompose(dephasing_map())
    du = q.build_dilation_unitary(dec)
    assert du.u.shape == (4, 4)
    assert q.max_abs(q.dagger(du.u) @ du.u - np.eye(4)) < 1e-10
    _, reduced = q.simulate_via_dilation(du, plus_state)
    assert q.max_abs(reduced - np.diag([0.5, 0.5])) < 1e-10


def test_transpose_map_rejected_as_not_completely_positive():
    swap = np.zeros((4, 4))
    for r in range(2):
        for rp in range(2):
            swap[r * 2 + rp, rp * 2 + r] = 1.0
    dec = q.canonical_decompose(q.DynamicalMap(swap))
    with pytest.raises(q.NotCompletelyPositive):
        q.build_dilation_isometry(dec)


def test_non_trace_preserving_map_rejected():
    dec = q.canonical_decompose(q.map_from_kraus([(1.0, P0)], 2))
    with pytest.raises(q.NotTracePreserving):
        q.build_dilation_isometry(dec)


def test_isometry_columns_are_orthonormal_for_random_channels():
    for seed, (dim, rank) in enumerate([(2, 3), (3, 4), (4, 7), (3, 9)]):
        dec = q.canonical_decompose(q.random_cptp(dim, rank, 4000 + seed))
        iso = q.build_dilation_isometry(dec)
        assert q.max_abs(q.dagger(iso) @ iso - np.eye(dim)) < 1e-9


def test_unitary_first_slot_columns_match_isometry():
    dec = q.canonical_decompose(q.random_cptp(3, 5, 51))
    iso = q.build_dilation_isometry(dec)
    du = q.build_dilation_unitary(dec)
    for rp in range(3):
        col = du.u[:, du.conv.flat(rp, 0)]
        assert q.max_abs(col - iso[:, rp]) < 1e-12


def test_amplitude_damping_reduced_state_matches_direct_route(excited_state):
    dmap = amplitude_damping_map()
    du = q.build_dilation_unitary(q.canonical_decompose(dmap))
    _, reduced = q.simulate_via_dilation(du, excited_state)
    assert q.max_abs(reduced - np.diag([0.5, 0.5])) < 1e-10
    assert q.max_abs(reduced - q.apply_map(dmap, excited_state)) < 1e-10


def test_dilation_reproduces_random_channels():
    worst = 0.0
    for case in range(12):
        dim = 2 + case % 3
        rank = 1 + case % (dim * dim)
        dmap = q.random_cptp(dim, rank, 5000 + case)
        du = q.build_dilation_unitary(q.canonical_decompose(dmap))
        assert du.anc_dim <= dim * dim
        for t in range(3):
            rho = q.random_density(dim, 6000 + 10 * case + t)
            _, reduced = q.simulate_via_dilation(du, rho)
            worst = max(worst, q.max_abs(reduced - q.apply_map(dmap, rho)))
    assert worst < 1e-9


def test_joint_state_purity_is_preserved():
    dmap = q.random_cptp(3, 6, 52)
    du = q.build_dilation_unitary(q.canonical_decompose(dmap))
    rho = q.random_density(3, 53)
    joint, _ = q.simulate_via_dilation(du, rho)
    anc0 = np.zeros((du.anc_dim, du.anc_dim), dtype=complex)
    anc0[0, 0] = 1.0
    initial = q.kron(rho.mat, anc0)
    assert abs(np.trace(joint @ joint) - np.trace(initial @ initial)) < 1e-9
    assert abs(np.trace(joint) - 1.0) < 1e-10


def test_completion_choice_does_not_affect_reduced_state():
    for case in range(6):
        dim = 2 + case % 2
        rank = 2 + case % (dim * dim - 1)
        dmap = q.random_cptp(dim, rank, 7000 + case)
        dec = q.canonical_decompose(dmap)
        du_det = q.build_dilation_unitary(dec)
        du_rnd = q.build_dilation_unitary(dec, rng=np.random.default_rng(8000 + case))
        # With more than one term the isometry is rectangular, so the two
        # completion rules genuinely pick different free columns.
        assert q.max_abs(du_det.u - du_rnd.u) > 1e-6
        rho = q.random_density(dim, 9000 + case)
        _, red_det = q.simulate_via_dilation(du_det, rho)
        _, red_rnd = q.simulate_via_dilation(du_rnd, rho)
        assert q.max_abs(red_det - red_rnd) < 1e-10


def test_simulate_rejects_wrong_state_dimension():
    du = q.build_dilation_unitary(identity_decomposition())
    with pytest.raises(q.DimensionMismatch):
        q.simulate_via_dilation(du, np.eye(3) / 3)


def test_verify_dilation_identity_channel_is_exact():
    dmap = q.map_from_kraus([(1.0, IDENTITY2)], 2)
    report = q.verify_dilation(dmap, trials=5, seed=3)
    assert report.trials == 5
    assert report.max_error <= 1e-12


def test_verify_dilation_deterministic_under_seed():
    dmap = q.random_cptp(3, 4, 54)
    a = q.verify_dilation(dmap, trials=4, seed=9)
    b = q.verify_dilation(dmap, trials=4, seed=9)
    assert a == b
    assert a.max_error <= 1e-9


def test_dilation_unitary_type_rejects_non_unitary():
    conv = q.CompositeIndexConvention(dim_sys=2, dim_anc=1)
    with pytest.raises(q.NotIsometry):
        q.DilationUnitary(sys_dim=2, anc_dim=1, u=np.ones((2, 2)), conv=conv, iso_cols=2)


def test_dilation_unitary_type_rejects_oversized_ancilla():
    conv = q.CompositeIndexConvention(dim_sys=2, dim_anc=5)
    with pytest.raises(q.ValidationError):
        q.DilationUnitary(sys_dim=2, anc_dim=5, u=np.eye(10), conv=conv, iso_cols=2)
