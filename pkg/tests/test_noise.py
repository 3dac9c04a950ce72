import numpy as np
import pytest
from hypothesis import given, strategies as st

from mbsim.gates import Circuit, cx, delay, rx, rz, zx
from mbsim.noise import (
    NoiseModel,
    apply_channel,
    apply_readout,
    bitflip_channel,
    build_confusion,
    choi_matrix,
    epsilon_for_angle,
    gate_error,
    is_cptp,
    mitigate_readout,
    noisy_apply,
)
from mbsim.simcore import QuantumState, ValidationError

from conftest import random_state

probs = st.floats(0, 0.5)


@given(probs, st.sampled_from([1, 2]))
def test_bitflip_channel_is_cptp(eps, arity):
    assert is_cptp(bitflip_channel(eps, arity))


def test_non_cptp_map_is_detected():
    assert not is_cptp([np.eye(2) * 1.1])


def test_choi_of_identity_is_bell_projector():
    choi = choi_matrix([np.eye(2)])
    v = np.array([1, 0, 0, 1])
    assert np.allclose(choi, np.outer(v, v))


@given(probs, st.integers(0, 2))
def test_channel_preserves_trace_and_positivity(eps, q):
    rho = random_state(3, np.random.default_rng(3), density=True)
    out = apply_channel(rho, bitflip_channel(eps), (q,))
    out.validate()


def test_bitflip_flips_population():
    out = apply_channel(QuantumState.zero(1, density=True), bitflip_channel(0.1), (0,))
    assert np.allclose(np.diag(out.data).real, [0.9, 0.1])


def test_rate_validation():
    with pytest.raises(ValidationError):
        NoiseModel(eps_cnot=0.7)
    with pytest.raises(ValidationError):
        NoiseModel(delay_rate=-1)
    with pytest.raises(ValidationError):
        epsilon_for_angle(4.0, 0.01)


@given(st.floats(0, np.pi))
def test_zx_error_is_linear_in_angle(phi):
    assert epsilon_for_angle(phi, 0.008) == pytest.approx(phi / np.pi * 0.008)
    assert gate_error(zx(0, 1, -phi), NoiseModel()) == pytest.approx(phi / np.pi * 0.008)


def test_gate_error_rules():
    m = NoiseModel(eps_1q=1e-3, eps_cnot=1e-2, delay_rate=1e-4)
    assert gate_error(rx(0, 0.3), m) == 1e-3
    assert gate_error(rz(0, 0.3), m) == 1e-3
    assert gate_error(cx(0, 1), m) == 1e-2
    assert gate_error(delay((0,), 100.0), m) == pytest.approx(1e-2)
    assert gate_error(zx(0, 1, np.pi), m) == pytest.approx(1e-2)


def test_ideal_model_reproduces_unitary_evolution(rng):
    c = Circuit(3, [rx(0, 0.4), cx(0, 1), zx(1, 2, 0.9)])
    psi = random_state(3, rng)
    ideal = c.apply(psi)
    noisy = noisy_apply(psi, c, NoiseModel.ideal())
    assert np.allclose(noisy.data, np.outer(ideal.data, ideal.data.conj()))


def test_delay_noise_reduces_purity():
    c = Circuit(2, [rx(0, np.pi / 2), cx(0, 1), delay((0, 1), 100.0)])
    m = NoiseModel(eps_1q=0, eps_cnot=0, delay_rate=1e-3)
    rho = noisy_apply(QuantumState.zero(2), c, m).data
    assert np.real(np.trace(rho @ rho)) < 0.99


@given(st.lists(st.tuples(st.floats(0, 0.2), st.floats(0, 0.2)), min_size=3, max_size=3))
def test_confusion_is_column_stochastic(pairs):
    m = build_confusion(NoiseModel(readout=tuple(pairs)), 3)
    assert np.allclose(m.sum(axis=0), 1)
    assert (m >= 0).all()


@given(st.floats(0, 0.2), st.floats(0, 0.2))
def test_mitigation_inverts_exact_frequencies(p01, p10):
    p = random_state(3, np.random.default_rng(11)).probabilities()
    m = build_confusion(NoiseModel(readout=(p01, p10)), 3)
    assert np.allclose(mitigate_readout(apply_readout(p, m), m), p, atol=1e-9)


def test_mitigation_accepts_histograms():
    m = build_confusion(NoiseModel(readout=(0.05, 0.1)), 1)
    out = mitigate_readout({"0": 95, "1": 5}, m)
    assert out == pytest.approx([1.0, 0.0])


def test_mitigation_rejects_singular_and_empty():
    with pytest.raises(ValidationError):
        mitigate_readout(np.zeros(2), np.eye(2))
    with pytest.raises(ValidationError):
        mitigate_readout(np.array([1.0, 0.0]), np.full((2, 2), 0.5))
