import numpy as np
import pytest

from entdetect import (
    DensityMatrix,
    PureState,
    UnsupportedDimension,
    bell_phi_plus,
    brute_force_criterion,
    make_werner,
    ppt_verdict,
    random_mixed,
    random_pure,
    schmidt_oracle,
)


def test_ppt_werner_threshold():
    # Werner states are entangled iff p > 1/3
    assert ppt_verdict(make_werner(0.4)).entangled
    assert not ppt_verdict(make_werner(0.3)).entangled
    assert not ppt_verdict(make_werner(1 / 3)).entangled


def test_ppt_product_state_separable():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        amps = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        verdict = ppt_verdict(PureState(2, amps).density())
        assert not verdict.entangled
        assert verdict.min_pt_eigenvalue > -1e-10


def test_ppt_dimension_guard():
    with pytest.raises(UnsupportedDimension):
        ppt_verdict(DensityMatrix(1, np.eye(2) / 2))


def test_brute_force_examples():
    total, detected = brute_force_criterion(bell_phi_plus().density())
    assert abs(total - 3.0) < 1e-9 and detected
    total, detected = brute_force_criterion(make_werner(0.6))
    assert abs(total - 1.08) < 1e-9 and detected
    total, detected = brute_force_criterion(DensityMatrix(2, np.eye(4) / 4))
    assert abs(total) < 1e-12 and not detected


def test_criterion_implies_ppt_entangled():
    # detection by the criterion is sufficient for entanglement, never beyond PPT
    rng = np.random.default_rng(1)
    detected_count = 0
    for _ in range(10**4):
        rho = random_mixed(2, rng)
        _, detected = brute_force_criterion(rho)
        if detected:
            detected_count += 1
            assert ppt_verdict(rho).entangled
    assert detected_count > 0


def test_pure_state_equivalence():
    # for pure states: criterion detects <=> PPT-entangled <=> theta > 0
    rng = np.random.default_rng(2)
    for _ in range(10**4):
        psi = random_pure(2, rng)
        theta = schmidt_oracle(psi)[0]
        rho = psi.density()
        _, detected = brute_force_criterion(rho)
        entangled = ppt_verdict(rho).entangled
        assert detected == entangled
        if theta > 1e-6:
            assert detected
        elif theta < 1e-9:
            assert not detected
