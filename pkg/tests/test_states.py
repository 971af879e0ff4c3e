import json
import math

import numpy as np
import pytest

from ksep import (
    ProductState,
    ValidationError,
    apply_local_unitaries,
    basis_product_state,
    build_unitary,
    computational_pair,
    density_matrix_from_dict,
    density_matrix_to_dict,
    family_state,
    ghz_state,
    ghz_w_qubit_family,
    ghz_xi_qutrit_family,
    isotropic_ghz_family,
    load_density_matrix,
    load_product_state,
    make_density_matrix,
    pack_index,
    product_state_from_dict,
    product_state_to_dict,
    projector,
    save_density_matrix,
    save_product_state,
    unpack_index,
    w_state,
    xi_state,
)

from helpers import random_density, random_product_state, random_unitary


def test_index_convention_is_big_endian():
    assert pack_index([1, 0, 0], (2, 2, 2)) == 4
    assert pack_index([0, 1, 2], (3, 3, 3)) == 5
    assert unpack_index(13, (3, 3, 3)) == (1, 1, 1)
    for idx in range(12):
        assert pack_index(unpack_index(idx, (2, 3, 2)), (2, 3, 2)) == idx


def test_make_density_matrix_accepts_pure_projector():
    state = make_density_matrix([2], [[1, 0], [0, 0]])
    assert state.dims == (2,)
    assert np.array_equal(state.matrix, np.array([[1, 0], [0, 0]], dtype=complex))


def test_make_density_matrix_accepts_maximally_mixed():
    state = make_density_matrix([2, 2], np.eye(4) / 4)
    assert state.dim == 4
    assert state.n == 2


def test_psd_check_rejects_indefinite_matrix():
    # eigenvalues are 1.1 and -0.1
    mat = [[0.5, 0.6], [0.6, 0.5]]
    make_density_matrix([2], mat)  # fine without the flag
    with pytest.raises(ValidationError, match="positive semidefinite"):
        make_density_matrix([2], mat, check_psd=True)


def test_validation_errors():
    with pytest.raises(ValidationError, match="shape"):
        make_density_matrix([2, 2], np.eye(3) / 3)
    with pytest.raises(ValidationError, match="Hermitian"):
        make_density_matrix([2], [[0.5, 0.5], [0.2, 0.5]])
    with pytest.raises(ValidationError, match="trace"):
        make_density_matrix([2], np.eye(2))
    with pytest.raises(ValidationError, match="dimensions"):
        make_density_matrix([1, 4], np.eye(4) / 4)


def test_ghz_state_qubits():
    vec = ghz_state(3, 2)
    amp = 1 / math.sqrt(2)
    assert abs(vec[0] - amp) < 1e-15
    assert abs(vec[7] - amp) < 1e-15
    assert np.count_nonzero(vec) == 2
    assert abs(np.linalg.norm(vec) - 1) < 1e-12


def test_ghz_state_qutrits():
    vec = ghz_state(3, 3)
    amp = 1 / math.sqrt(3)
    for i in (0, 13, 26):
        assert abs(vec[i] - amp) < 1e-15
    assert np.count_nonzero(vec) == 3


def test_ghz_state_two_parties_is_bell():
    vec = ghz_state(2, 2)
    expected = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.max(np.abs(vec - expected)) < 1e-15


def test_w_state_three_qubits():
    vec = w_state(3)
    amp = 1 / math.sqrt(3)
    for i in (1, 2, 4):
        assert abs(vec[i] - amp) < 1e-15
    assert np.count_nonzero(vec) == 3


def test_w_state_two_qubits():
    vec = w_state(2)
    expected = np.array([0, 1, 1, 0]) / math.sqrt(2)
    assert np.max(np.abs(vec - expected)) < 1e-15


def test_w_state_support_matches_direct_construction():
    # independent reconstruction: one-hot strings of length 4
    n = 4
    expected = np.zeros(16, dtype=complex)
    for j in range(n):
        digits = [0] * n
        digits[j] = 1
        expected[int("".join(map(str, digits)), 2)] = 1 / math.sqrt(n)
    vec = w_state(n)
    assert np.max(np.abs(vec - expected)) < 1e-15
    assert abs(np.linalg.norm(vec) - 1) < 1e-12


def test_xi_state_amplitudes():
    vec = xi_state()
    assert abs(vec[5] - 1 / math.sqrt(6)) < 1e-15  # |012>
    assert vec[0] == 0  # |000>
    assert abs(np.linalg.norm(vec) - 1) < 1e-12
    assert np.count_nonzero(vec) == 6


def test_family_endpoints():
    pure_ghz = family_state(ghz_w_qubit_family(1.0, 0.0))
    assert np.max(np.abs(pure_ghz.matrix - projector(ghz_state(3, 2)))) < 1e-15
    mixed = family_state(ghz_w_qubit_family(0.0, 0.0))
    assert np.max(np.abs(mixed.matrix - np.eye(8) / 8)) < 1e-15


def test_isotropic_family_diagonal_element():
    state = family_state(isotropic_ghz_family(0.5, 3, 2))
    assert abs(state.matrix[0, 0] - 0.3125) < 1e-15


def test_family_parameter_ranges():
    with pytest.raises(ValidationError):
        ghz_w_qubit_family(0.7, 0.5)
    with pytest.raises(ValidationError):
        ghz_xi_qutrit_family(-0.1, 0.2)
    with pytest.raises(ValidationError):
        isotropic_ghz_family(1.5, 3, 2)


def test_families_are_affine_in_their_parameters():
    rng = np.random.default_rng(7)
    for ctor in (ghz_w_qubit_family, ghz_xi_qutrit_family):
        for _ in range(5):
            a1, b1 = rng.random(2) / 2
            a2, b2 = rng.random(2) / 2
            lam = rng.random()
            mixed_point = family_state(
                ctor(lam * a1 + (1 - lam) * a2, lam * b1 + (1 - lam) * b2)
            )
            combo = lam * family_state(ctor(a1, b1)).matrix + (1 - lam) * family_state(
                ctor(a2, b2)
            ).matrix
            assert np.max(np.abs(mixed_point.matrix - combo)) < 1e-12
    for _ in range(5):
        p1, p2, lam = rng.random(3)
        mixed_point = family_state(isotropic_ghz_family(lam * p1 + (1 - lam) * p2, 3, 2))
        combo = lam * family_state(isotropic_ghz_family(p1, 3, 2)).matrix + (
            1 - lam
        ) * family_state(isotropic_ghz_family(p2, 3, 2)).matrix
        assert np.max(np.abs(mixed_point.matrix - combo)) < 1e-12


def test_apply_identity_leaves_state_unchanged():
    state = random_product_state(np.random.default_rng(3), (2, 3, 2))
    rotated = apply_local_unitaries(state, [np.eye(2), np.eye(3), np.eye(2)])
    for original, new in zip(state.factors, rotated.factors):
        assert np.max(np.abs(original - new)) < 1e-15


def test_apply_bit_flip():
    state = basis_product_state((2, 2, 2), [0, 0, 0])
    flip = np.array([[0, 1], [1, 0]])
    rotated = apply_local_unitaries(state, [flip, np.eye(2), np.eye(2)])
    assert np.max(np.abs(rotated.full_vector() - basis_product_state((2, 2, 2), [1, 0, 0]).full_vector())) < 1e-15


def test_quarter_rotation_convention():
    # a rotation by pi/4 on the Bloch sphere is theta = pi/8 with lambda = pi
    gate = build_unitary([math.pi / 8, math.pi, 0.0, 0.0], 2)
    state = apply_local_unitaries(basis_product_state((2, 2), [0, 0]), [gate, np.eye(2)])
    assert abs(state.factors[0][0] - math.cos(math.pi / 8)) < 1e-12
    assert abs(state.factors[0][1] - math.sin(math.pi / 8)) < 1e-12


def test_unitaries_preserve_overlaps():
    rng = np.random.default_rng(11)
    dims = (2, 3, 2)
    for _ in range(10):
        phi1 = random_product_state(rng, dims)
        phi2 = random_product_state(rng, dims)
        gates = [random_unitary(rng, d) for d in dims]
        before = np.vdot(phi1.full_vector(), phi2.full_vector())
        rotated1 = apply_local_unitaries(phi1, gates)
        rotated2 = apply_local_unitaries(phi2, gates)
        after = np.vdot(rotated1.full_vector(), rotated2.full_vector())
        assert abs(before - after) < 1e-10
        for state in (rotated1, rotated2):
            for factor in state.factors:
                assert abs(np.linalg.norm(factor) - 1) < 1e-12


def test_apply_rejects_bad_input():
    state = basis_product_state((2, 2), [0, 0])
    with pytest.raises(ValidationError, match="unitary"):
        apply_local_unitaries(state, [np.array([[1, 1], [0, 1]]), np.eye(2)])
    with pytest.raises(ValidationError, match="shape"):
        apply_local_unitaries(state, [np.eye(3), np.eye(2)])
    with pytest.raises(ValidationError, match="expected 2"):
        apply_local_unitaries(state, [np.eye(2)])


def test_product_state_requires_normalized_factors():
    with pytest.raises(ValidationError, match="norm"):
        ProductState((np.array([1.0, 1.0]), np.array([1.0, 0.0])))


def test_density_matrix_json_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(5)
    state = random_density(rng, (2, 3))
    path = tmp_path / "state.json"
    save_density_matrix(path, state)
    loaded = load_density_matrix(path)
    assert loaded.dims == state.dims
    assert np.array_equal(loaded.matrix, state.matrix)


def test_product_state_json_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(6)
    state = random_product_state(rng, (2, 2, 3))
    path = tmp_path / "phi.json"
    save_product_state(path, state)
    loaded = load_product_state(path)
    assert loaded.dims == state.dims
    for original, new in zip(state.factors, loaded.factors):
        assert np.array_equal(original, new)


def test_dict_parsers_reject_malformed_input():
    with pytest.raises(ValidationError):
        density_matrix_from_dict({"dims": [2]})
    with pytest.raises(ValidationError):
        density_matrix_from_dict({"dims": [2], "data": [[1, 0]]})
    with pytest.raises(ValidationError):
        product_state_from_dict({"dims": [2, 2], "factors": [[[1, 0], [0, 0]]]})
    good = product_state_to_dict(computational_pair((2, 2))[0])
    assert product_state_from_dict(good).dims == (2, 2)
    round_tripped = density_matrix_from_dict(
        json.loads(json.dumps(density_matrix_to_dict(make_density_matrix([2], np.eye(2) / 2))))
    )
    assert np.array_equal(round_tripped.matrix, np.eye(2) / 2)
