import numpy as np
import pytest
from hypothesis import given, strategies as st

from mbsim.circuits import uyx_double_cnot, uyx_scaled
from mbsim.gates import Circuit, circuit_to_unitary, cx, rx, ry
from mbsim.noise import NoiseModel
from mbsim.simcore import ValidationError
from mbsim.tomo import (
    average_gate_fidelity,
    choi_process_fidelity,
    default_thetas,
    error_reduction_curve,
    process_fidelity,
    ptm_of_unitary,
    qpt,
    qpt_uyx,
)


@given(st.floats(0.01, np.pi))
def test_unitary_ptm_is_orthogonal_and_unital(theta):
    r = ptm_of_unitary(circuit_to_unitary(uyx_double_cnot(theta)))
    assert np.allclose(r @ r.T, np.eye(16), atol=1e-10)
    assert r[0, 0] == pytest.approx(1.0)
    assert np.allclose(r[0, 1:], 0) and np.allclose(r[1:, 0], 0)


@pytest.mark.parametrize("circ", [Circuit(2, [cx(0, 1)]), Circuit(2, [rx(0, 0.3), ry(1, 1.2), cx(1, 0)]), uyx_scaled(0.8)])
def test_exact_reconstruction_of_unitary(circ):
    r, bad = qpt(circ)
    assert not bad
    assert np.allclose(r, ptm_of_unitary(circuit_to_unitary(circ)), atol=1e-10)
    assert process_fidelity(r, circ) == pytest.approx(1.0, abs=1e-10)


def test_reconstruction_agrees_with_choi_fidelity_under_noise():
    noise = NoiseModel(eps_1q=1e-3, eps_cnot=2e-2)
    circ = uyx_double_cnot(1.0)
    r, _ = qpt(circ, noise)
    assert process_fidelity(r, circ) == pytest.approx(choi_process_fidelity(circ, circuit_to_unitary(circ), noise), abs=1e-10)


def test_trace_preservation_row_of_noisy_ptm():
    r, _ = qpt(uyx_scaled(0.5), NoiseModel(eps_cnot=0.02, readout=(0.02, 0.04)))
    assert np.allclose(r[0], np.eye(16)[0], atol=1e-9)


def test_finite_shots_are_seeded_and_flag_tiny_runs():
    noise = NoiseModel(readout=(0.02, 0.03))
    a, _ = qpt(uyx_scaled(0.5), noise, shots=256, seed=4)
    b, _ = qpt(uyx_scaled(0.5), noise, shots=256, seed=4)
    assert np.array_equal(a, b)
    _, bad = qpt(uyx_scaled(0.5), noise, shots=50, seed=4)
    assert bad


def test_average_gate_fidelity_formula():
    assert average_gate_fidelity(1.0) == 1.0
    assert average_gate_fidelity(0.0) == pytest.approx(0.2)


def test_qpt_input_validation():
    with pytest.raises(ValidationError):
        qpt(Circuit(3, []))
    with pytest.raises(ValidationError):
        qpt_uyx(0.3, "triple_cnot")
    with pytest.raises(ValidationError):
        error_reduction_curve([])
    with pytest.raises(ValidationError):
        error_reduction_curve([4.0])


def test_default_sweep_has_fifteen_angles():
    th = default_thetas()
    assert len(th) == 15
    assert th[-1] == pytest.approx(np.pi) and th[0] > 0


def test_noiseless_reduction_is_undefined():
    (theta, red, ra, rb), = error_reduction_curve([0.5])
    assert np.isnan(red)
    assert ra.fidelity == pytest.approx(1.0) and rb.fidelity == pytest.approx(1.0)
