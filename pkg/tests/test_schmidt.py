import math

import numpy as np
import pytest

from conftest import protocol_target_theta
from entdetect import (
    DegenerateDenominator,
    DegenerateDirection,
    DomainError,
    FilterOp,
    MeasurementSource,
    ProtocolConfig,
    PureState,
    ZeroSuccess,
    apply_filter,
    apply_frame,
    basis_from_angles,
    bell_phi_plus,
    bloch_to_basis,
    bloch_vector,
    ket,
    make_werner,
    pair_directions,
    purity,
    random_frame,
    random_pure,
    relative_phase,
    run_protocol,
    schmidt_oracle,
)


def diag_state(theta, phase=0.0):
    return PureState(
        2, np.array([math.cos(theta), 0, 0, math.sin(theta) * np.exp(1j * phase)])
    )


def test_schmidt_oracle_product():
    theta, _, _ = schmidt_oracle(ket("00"))
    assert theta < 1e-9


def test_schmidt_oracle_bell():
    theta, _, _ = schmidt_oracle(bell_phi_plus())
    assert abs(theta - math.pi / 4) < 1e-9


def test_schmidt_oracle_diagonal():
    theta, (a, a_perp), (b, b_perp) = schmidt_oracle(diag_state(math.pi / 8))
    assert abs(theta - math.pi / 8) < 1e-9
    assert abs(abs(a[0]) - 1) < 1e-9 and abs(abs(b[0]) - 1) < 1e-9


def test_schmidt_oracle_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(50):
        psi = random_pure(2, rng)
        theta, (a, a_perp), (b, b_perp) = schmidt_oracle(psi)
        rebuilt = math.cos(theta) * np.kron(a, b) + math.sin(theta) * np.kron(a_perp, b_perp)
        assert np.max(np.abs(rebuilt - psi.amplitudes)) < 1e-8
        assert abs(np.vdot(a, a_perp)) < 1e-9
        assert abs(np.vdot(b, b_perp)) < 1e-9


def test_bloch_to_basis_conventions():
    assert np.allclose(bloch_to_basis([0, 0, 1]), (0.0, 0.0))
    xi, phi = bloch_to_basis([1, 0, 0])
    assert abs(xi - math.pi / 4) < 1e-12 and abs(phi) < 1e-12
    xi, phi = bloch_to_basis([0, 1, 0])
    assert abs(xi - math.pi / 4) < 1e-12 and abs(phi - math.pi / 2) < 1e-12


def test_bloch_to_basis_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(100):
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        xi, phi = bloch_to_basis(v)
        back = np.array(
            [
                math.sin(2 * xi) * math.cos(phi),
                math.sin(2 * xi) * math.sin(phi),
                math.cos(2 * xi),
            ]
        )
        assert np.max(np.abs(back - v)) < 1e-9
        assert 0 <= xi <= math.pi / 2 and 0 <= phi < 2 * math.pi


def test_bloch_to_basis_degenerate():
    with pytest.raises(DegenerateDirection):
        bloch_to_basis([0, 0, 0])


def test_basis_pair_orthonormal_and_directions():
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        xi, phi = bloch_to_basis(v)
        a, a_perp = basis_from_angles(xi, phi)
        assert abs(np.vdot(a, a) - 1) < 1e-12
        assert abs(np.vdot(a_perp, a_perp) - 1) < 1e-12
        assert abs(np.vdot(a, a_perp)) < 1e-12
        dirs = pair_directions(a, a_perp)
        assert np.allclose(dirs["z"], v, atol=1e-9)
        for axis in ("x", "y", "z"):
            assert abs(np.linalg.norm(dirs[axis]) - 1) < 1e-9
        assert abs(dirs["z"] @ dirs["y"]) < 1e-9
        assert abs(dirs["z"] @ dirs["x"]) < 1e-9


def test_filter_identity_strength():
    rho = bell_phi_plus().density()
    out, p = apply_filter(rho, FilterOp(1, 1.0))
    assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-12
    assert abs(p - 1.0) < 1e-12


def test_filter_small_eps_limit():
    rho = apply_frame(bell_phi_plus(), random_frame(2, 3)).density()
    out, p = apply_filter(rho, FilterOp(1, 1e-4))
    # Alice marginal approaches a pure state
    assert abs(np.linalg.norm(bloch_vector(out, 0)) - 1) < 1e-6
    assert abs(purity(out) - 1) < 1e-9


def test_filter_bloch_norm_formula():
    for eps in (0.25, 0.5, 0.9):
        rho = apply_frame(bell_phi_plus(), random_frame(2, 4)).density()
        out, p = apply_filter(rho, FilterOp(1, eps))
        expect = (1 - eps**2) / (1 + eps**2)
        assert abs(np.linalg.norm(bloch_vector(out, 0)) - expect) < 1e-9
        assert abs(p - (1 + eps**2) / 2) < 1e-9
        assert 0 < p <= 1


def test_filter_validation():
    with pytest.raises(DomainError):
        FilterOp(1, 0.0)
    with pytest.raises(DomainError):
        FilterOp(1, 1.5)
    with pytest.raises(ZeroSuccess):
        apply_filter(ket("01").density(), FilterOp(1, 1e-7))


def test_relative_phase_cases():
    assert relative_phase(0.0, [0.3, 0.1, 0.2]) == 0.0
    # diagonal state with phase 0: T_y'y'' = -sin(2 theta), denominator sin(2 theta)
    theta = math.pi / 8
    psi = diag_state(theta)
    rho = psi.density()
    t_yy = float(
        np.einsum(
            "ij,ji->",
            rho.matrix,
            np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]),
        ).real
    )
    bloch = bloch_vector(rho, 0)
    assert abs(abs(relative_phase(t_yy, bloch)) - 1.0) < 1e-9
    with pytest.raises(DegenerateDenominator):
        relative_phase(0.1, [0, 0, 1 - 1e-8])


def test_protocol_known_theta():
    psi = diag_state(math.pi / 6)
    for seed in range(5):
        framed = apply_frame(psi, random_frame(2, seed))
        result = run_protocol(MeasurementSource(framed.density()))
        assert result.detected
        assert abs(result.sum_of_squares - 1.75) < 1e-6


def test_protocol_maximally_entangled_filters():
    framed = apply_frame(bell_phi_plus(), random_frame(2, 17))
    result = run_protocol(MeasurementSource(framed.density()))
    assert result.details.get("filter") is not None
    assert result.detected
    # filtered state has theta = arctan(eps): sum = 1 + (2 eps/(1+eps^2))^2
    assert abs(result.sum_of_squares - 1.64) < 1e-9


def test_protocol_product_not_detected():
    prod = PureState(2, np.kron([1, 0], [0, 1]).astype(complex))
    framed = apply_frame(prod, random_frame(2, 23))
    result = run_protocol(MeasurementSource(framed.density()))
    assert not result.detected
    assert result.sum_of_squares <= 1 + 1e-9


def test_protocol_detects_entangled_pure_states():
    # 1000 seeded entangled states in random frames: 100% detection and the
    # sum matches 1 + sin^2(2 theta) to 1e-6
    rng = np.random.default_rng(20260808)
    count = 0
    while count < 1000:
        psi = random_pure(2, rng)
        theta = schmidt_oracle(psi)[0]
        if theta < 0.05:
            continue
        count += 1
        framed = apply_frame(psi, random_frame(2, rng))
        rho = framed.density()
        result = run_protocol(MeasurementSource(rho))
        assert result.detected
        target_theta = protocol_target_theta(result, psi, rho)
        assert abs(result.sum_of_squares - (1 + math.sin(2 * target_theta) ** 2)) < 1e-6


def test_protocol_convention_independent():
    rng = np.random.default_rng(9)
    for seed in range(10):
        psi = random_pure(2, rng)
        framed = apply_frame(psi, random_frame(2, rng))
        rho = framed.density()
        sums = []
        for perp_phase in (0.0, math.pi, 1.3):
            result = run_protocol(
                MeasurementSource(rho), ProtocolConfig(perp_phase=perp_phase)
            )
            sums.append(result.sum_of_squares)
        assert max(sums) - min(sums) < 1e-9


def test_protocol_transcript_structure():
    framed = apply_frame(diag_state(0.5), random_frame(2, 31))
    result = run_protocol(MeasurementSource(framed.density()))
    local = [r for r in result.records if "0" in r.index]
    assert len(local) == 6  # one Bloch stage, no filter
    assert [r.index for r in result.full_records][:2] == [("z", "z"), ("y", "y")]
    assert result.steps == len(result.full_records)


def test_protocol_phase_gated_mode():
    # phase near pi/2 makes T_y'y'' vanish; the gated variant needs the extra pair
    psi = diag_state(0.5, phase=math.pi / 2)
    result = run_protocol(
        MeasurementSource(psi.density()), ProtocolConfig(always_extra=False)
    )
    assert result.detected
    assert ("x", "y") in [r.index for r in result.full_records]
    # with a plain phase the gated variant stops after two measurements
    result2 = run_protocol(
        MeasurementSource(diag_state(0.5).density()), ProtocolConfig(always_extra=False)
    )
    assert result2.detected and result2.steps == 2


def test_protocol_mixed_state_graceful():
    # one-sided Bloch degeneracy cannot be calibrated; run reports not-detected
    rho = make_werner(0.2)
    result = run_protocol(MeasurementSource(rho))
    assert not result.detected
