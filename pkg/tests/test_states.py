import math

import numpy as np
import pytest

from entdetect import (
    DensityMatrix,
    DimensionMismatch,
    DomainError,
    LocalFrame,
    PureState,
    ZeroProjection,
    apply_frame,
    bell_phi_plus,
    full_tensor,
    ket,
    make_colored,
    make_dicke,
    make_g,
    make_w,
    make_werner,
    mat_equal,
    project_first_qubit,
    purity,
    random_frame,
    random_mixed,
    random_pure,
    singlet,
    state_from_dict,
    state_to_dict,
)
from entdetect.states import load_state, save_state


def test_werner_extremes():
    assert mat_equal(make_werner(1.0).matrix, singlet().density().matrix)
    assert mat_equal(make_werner(0.0).matrix, np.eye(4) / 4)


def test_werner_correlation_tensor():
    ft = full_tensor(make_werner(0.7))
    assert abs(ft["zz"] + 0.7) < 1e-9
    for p in np.linspace(0.0, 1.0, 20):
        ft = full_tensor(make_werner(p))
        for idx, value in ft.items():
            target = -p if idx[0] == idx[1] else 0.0
            assert abs(value - target) < 1e-9


def test_werner_domain():
    with pytest.raises(DomainError):
        make_werner(1.2)
    with pytest.raises(DomainError):
        make_werner(-0.1)


def test_colored_extremes_and_tensor():
    assert mat_equal(make_colored(0.0).matrix, ket("01").density().matrix)
    assert mat_equal(make_colored(1.0).matrix, singlet().density().matrix)
    ft = full_tensor(make_colored(0.3))
    assert abs(ft["xx"] + 0.3) < 1e-9
    assert abs(ft["yy"] + 0.3) < 1e-9
    assert abs(ft["zz"] + 1.0) < 1e-9
    assert abs(full_tensor(make_colored(0.0))["zz"] + 1.0) < 1e-9


def test_dicke_states():
    w = make_dicke(3, 1)
    expect = np.zeros(8)
    expect[[1, 2, 4]] = 1 / math.sqrt(3)
    assert np.allclose(w.amplitudes, expect)
    d21 = make_dicke(2, 1)
    assert np.allclose(d21.amplitudes, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    d42 = make_dicke(4, 2)
    nonzero = np.flatnonzero(np.abs(d42.amplitudes) > 1e-12)
    assert len(nonzero) == 6
    assert np.allclose(d42.amplitudes[nonzero], 1 / math.sqrt(6))


def test_dicke_domain():
    with pytest.raises(DomainError):
        make_dicke(3, 4)
    with pytest.raises(DomainError):
        make_dicke(5, 1)


def test_projection_gives_w_and_g():
    d42 = make_dicke(4, 2)
    w = project_first_qubit(d42, ket("1"))
    assert mat_equal(w.amplitudes.reshape(-1, 1), make_dicke(3, 1).amplitudes.reshape(-1, 1))
    assert abs(np.linalg.norm(w.amplitudes) - 1) < 1e-9
    g = project_first_qubit(d42, np.array([1, 1]) / math.sqrt(2))
    # equal weight on every string of weight 1 or 2
    weights = [bin(i).count("1") for i in range(8)]
    for i, a in enumerate(g.amplitudes):
        assert abs(abs(a) - (1 / math.sqrt(6) if weights[i] in (1, 2) else 0.0)) < 1e-9
    assert mat_equal(make_w().amplitudes.reshape(-1, 1), w.amplitudes.reshape(-1, 1))
    assert mat_equal(make_g().amplitudes.reshape(-1, 1), g.amplitudes.reshape(-1, 1))


def test_projection_bell_on_zero():
    out = project_first_qubit(bell_phi_plus(), ket("0"))
    assert np.allclose(out.amplitudes, [1, 0])


def test_projection_zero_norm():
    with pytest.raises(ZeroProjection):
        project_first_qubit(ket("00"), ket("1"))


def test_random_pure_normalized_and_deterministic():
    for seed in range(5):
        psi = random_pure(2, seed)
        assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-9
    a = random_pure(3, 42).amplitudes
    b = random_pure(3, 42).amplitudes
    assert np.array_equal(a, b)


def test_random_mixed_valid_and_deterministic():
    for seed in range(5):
        rho = random_mixed(2, seed)
        assert abs(np.trace(rho.matrix) - 1) < 1e-9
        assert np.linalg.eigvalsh(rho.matrix)[0] > -1e-9
    assert np.array_equal(random_mixed(2, 7).matrix, random_mixed(2, 7).matrix)
    assert abs(purity(random_mixed(2, 3, rank=1)) - 1) < 1e-9


def test_random_frame_deterministic_and_unitary():
    f = random_frame(2, 9)
    g = random_frame(2, 9)
    for u, v in zip(f.unitaries, g.unitaries):
        assert np.array_equal(u, v)
        assert mat_equal(u @ u.conj().T, np.eye(2))


def test_apply_frame_identity():
    rho = make_werner(0.6)
    frame = LocalFrame((np.eye(2), np.eye(2)))
    assert mat_equal(apply_frame(rho, frame).matrix, rho.matrix)


def test_apply_frame_preserves_purity_and_sum():
    rng = np.random.default_rng(13)
    for seed in range(10):
        rho = random_mixed(2, rng)
        frame = random_frame(2, rng)
        rotated = apply_frame(rho, frame)
        assert abs(purity(rotated) - purity(rho)) < 1e-9
        assert abs(full_tensor(rotated).sum_squares() - full_tensor(rho).sum_squares()) < 1e-8


def test_apply_frame_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_frame(make_werner(0.5), random_frame(3, 0))


def test_purity_values():
    assert abs(purity(bell_phi_plus().density()) - 1) < 1e-9
    assert abs(purity(DensityMatrix(2, np.eye(4) / 4)) - 0.25) < 1e-12
    # direct matrix computation for Werner p = 0.5 gives (1 + 3 p^2)/4
    rho = make_werner(0.5)
    direct = float(np.trace(rho.matrix @ rho.matrix).real)
    assert abs(direct - 0.4375) < 1e-12
    assert abs(purity(rho) - direct) < 1e-12


def test_density_matrix_invariants_enforced():
    with pytest.raises(DomainError):
        DensityMatrix(1, np.diag([0.6, 0.6]))  # trace 1.2
    with pytest.raises(DomainError):
        DensityMatrix(1, np.diag([1.5, -0.5]))  # negative eigenvalue
    with pytest.raises(DomainError):
        PureState(1, np.array([1.0, 1.0]))  # norm sqrt(2)


def test_state_json_roundtrip(tmp_path):
    rho = make_werner(0.37)
    d = state_to_dict(rho)
    back = state_from_dict(d)
    assert mat_equal(back.matrix, rho.matrix, 1e-15)
    psi = random_pure(3, 5)
    path = tmp_path / "state.json"
    save_state(psi, path)
    loaded = load_state(path)
    assert isinstance(loaded, PureState)
    assert np.allclose(loaded.amplitudes, psi.amplitudes, atol=1e-15)
