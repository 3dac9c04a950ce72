import numpy as np
import pytest
from hypothesis import given, strategies as st

from mbsim.gates import Circuit, Gate, circuit_to_unitary, cx, cy, cz, merge_rotations, rz, zx, delay
from mbsim.simcore import PauliTerm, ValidationError, evolution_operator, pauli_to_dense

gate_st = st.one_of(
    st.builds(lambda k, q, a: Gate(k, (q,), a), st.sampled_from(["rx", "ry", "rz"]), st.integers(0, 2), st.floats(-4, 4)),
    st.builds(lambda k, p: Gate(k, p), st.sampled_from(["cx", "cy", "cz"]), st.permutations([0, 1, 2]).map(lambda x: tuple(x[:2]))),
    st.builds(lambda p, a: zx(p[0], p[1], a), st.permutations([0, 1, 2]).map(lambda x: tuple(x[:2])), st.floats(-3, 3)),
)


def test_rotation_convention():
    for kind, axis in (("rx", "X"), ("ry", "Y"), ("rz", "Z")):
        u = Gate(kind, (0,), 0.7).matrix()
        assert np.allclose(u, evolution_operator(pauli_to_dense(PauliTerm(0.5, {0: axis}), 1), 0.7))


def test_zx_is_exponential_of_z_control_x_target():
    u = circuit_to_unitary(Circuit(2, [zx(0, 1, 1.1)]))
    assert np.allclose(u, evolution_operator(pauli_to_dense(PauliTerm(0.5, {0: "Z", 1: "X"}), 2), 1.1))


def test_controlled_gates_act_on_target_when_control_set():
    for g, p in ((cx(0, 1), "X"), (cy(0, 1), "Y"), (cz(0, 1), "Z")):
        u = circuit_to_unitary(Circuit(2, [g]))
        from mbsim.simcore import PAULI_MATRICES

        assert np.allclose(u[2:, 2:], PAULI_MATRICES[p])
        assert np.allclose(u[:2, :2], np.eye(2))


@given(st.lists(gate_st, max_size=8))
def test_inverse_circuit_undoes_circuit(gates):
    c = Circuit(3, gates)
    assert np.allclose(circuit_to_unitary(c + c.inverse()), np.eye(8), atol=1e-10)


@given(st.lists(gate_st, max_size=10))
def test_merge_rotations_preserves_unitary(gates):
    c = Circuit(3, gates)
    m = merge_rotations(c)
    assert len(m) <= len(c)
    assert np.allclose(circuit_to_unitary(m), circuit_to_unitary(c), atol=1e-10)


@given(st.lists(gate_st, max_size=6))
def test_text_round_trip(gates):
    c = Circuit(3, gates)
    back = Circuit.from_text(3, c.to_text())
    assert np.allclose(circuit_to_unitary(back), circuit_to_unitary(c), atol=1e-12)


def test_gate_validation():
    with pytest.raises(ValidationError):
        Gate("cx", (1, 1))
    with pytest.raises(ValidationError):
        Gate("hadamard", (0,))
    with pytest.raises(ValidationError):
        Circuit(2, [cx(0, 2)])


def test_delay_is_identity_and_counts():
    c = Circuit(2, [cx(0, 1), delay((0, 1), 50.0), rz(1, 0.3)])
    assert c.two_qubit_count() == 1
    assert c.count("delay") == 1
    assert np.allclose(circuit_to_unitary(Circuit(2, [delay((0, 1), 50.0)])), np.eye(4))
