import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from mbsim.circuits import (
    DecompositionError,
    braid_circuit,
    chain_init,
    doublet_states,
    evolution_circuit,
    exp_pauli_basis,
    exp_pauli_scaled,
    hamiltonian_at,
    init_pm,
    prepare,
    rotated_init,
    trotter_step_basis,
    trotter_step_scaled,
    unwind_gates,
    uyx_double_cnot,
    uyx_scaled,
)
from mbsim.gates import Circuit, circuit_to_unitary
from mbsim.models import (
    ChainModelParams,
    TriJunctionParams,
    build_chain_hamiltonian,
    build_qubit_hamiltonian,
    exact_protocol_unitary,
    low_energy_pair,
    rotation_unitary,
)
from mbsim.simcore import PauliTerm, QuantumState, ValidationError, pauli_to_dense

weight_two = st.builds(
    lambda q, a, b: {q[0]: a, q[1]: b},
    st.permutations([0, 1, 2]).map(lambda x: x[:2]),
    st.sampled_from("XYZ"),
    st.sampled_from("XYZ"),
)
any_term = st.dictionaries(st.integers(0, 2), st.sampled_from("XYZ"), min_size=1, max_size=3)


def _reference(term, dt):
    return expm(-1j * dt * pauli_to_dense(term, 3))


@given(any_term, st.floats(-2, 2), st.floats(0.01, 1.5))
def test_basis_exponential_is_exact(ops, c, dt):
    t = PauliTerm(c, ops)
    assert np.allclose(circuit_to_unitary(Circuit(3, exp_pauli_basis(t, dt))), _reference(t, dt), atol=1e-10)


@given(weight_two, st.floats(-2, 2), st.floats(0.01, 1.5))
def test_scaled_exponential_is_exact_with_one_zx(ops, c, dt):
    t = PauliTerm(c, ops)
    gates = exp_pauli_scaled(t, dt)
    assert np.allclose(circuit_to_unitary(Circuit(3, gates)), _reference(t, dt), atol=1e-10)
    assert sum(g.kind == "zx" for g in gates) == 1
    assert sum(g.is_two_qubit for g in gates) == 1


def test_scaled_lowering_rejects_three_body_terms():
    with pytest.raises(DecompositionError):
        exp_pauli_scaled(PauliTerm(1.0, {0: "Y", 1: "Z", 2: "X"}), 0.1)


def test_basis_two_qubit_costs():
    assert sum(g.is_two_qubit for g in exp_pauli_basis(PauliTerm(1.0, {0: "Y", 1: "X"}), 0.3)) == 2
    assert sum(g.is_two_qubit for g in exp_pauli_basis(PauliTerm(1.0, {0: "Y", 1: "Z", 2: "X"}), 0.3)) == 4


@pytest.mark.parametrize("sign", [1, -1])
def test_initializers_land_in_low_energy_subspace(sign):
    # at alpha -> 0 the initializer states are exact doublet members
    # the span of both initializer states is invariant under H(0)
    p = TriJunctionParams(alpha=1e-6)
    h = pauli_to_dense(build_qubit_hamiltonian(p, (1.0, 0.0, 0.0)), 3)
    pair = np.stack([circuit_to_unitary(init_pm(s))[:, 0] for s in (1, -1)], axis=1)
    out = h @ pair[:, 0 if sign > 0 else 1]
    assert np.linalg.norm(out - pair @ (pair.conj().T @ out)) < 1e-5


def test_initializers_are_orthogonal():
    a = circuit_to_unitary(init_pm(1))[:, 0]
    b = circuit_to_unitary(init_pm(-1))[:, 0]
    assert abs(np.vdot(a, b)) < 1e-12


@pytest.mark.parametrize("sign", [1, -1])
def test_rotated_initializer_is_rotated_state(sign):
    a = circuit_to_unitary(init_pm(sign))[:, 0]
    b = circuit_to_unitary(rotated_init(sign))[:, 0]
    assert abs(np.vdot(rotation_unitary() @ a, b)) == pytest.approx(1.0, abs=1e-12)


def test_doublet_states_are_orthonormal_eigenstates():
    p = TriJunctionParams()
    plus, minus = doublet_states(p)
    circ = np.stack([circuit_to_unitary(init_pm(s))[:, 0] for s in (1, -1)], axis=1)
    _, v = low_energy_pair(p, reference=circ)
    assert abs(np.vdot(plus, minus)) < 1e-12
    for s in (plus, minus):
        assert np.linalg.norm(v.conj().T @ s) == pytest.approx(1.0)
    rp, rm = doublet_states(p, "scaled")
    assert np.allclose(rotation_unitary() @ plus, rp)


@pytest.mark.parametrize("flavor", ["basis", "scaled"])
def test_step_one_uses_twelve_or_fewer_two_qubit_gates(flavor):
    c = evolution_circuit(TriJunctionParams(), flavor, steps=[0], couplings_override=lambda j: (j[0], j[1], 0.0))
    assert c.two_qubit_count() == (12 if flavor == "basis" else 9)


def test_full_basis_braid_gate_count():
    assert evolution_circuit(TriJunctionParams(), "basis").two_qubit_count() == 96


@pytest.mark.parametrize("lower", [trotter_step_basis, trotter_step_scaled])
def test_symmetric_slice_is_palindromic_second_order(lower):
    p = TriJunctionParams()
    flavor = "basis" if lower is trotter_step_basis else "scaled"
    h = hamiltonian_at(p, flavor, (0.6, 0.4, 0.0))
    hd = pauli_to_dense(h, 3)
    errs = []
    for dt in (0.2, 0.1):
        u = circuit_to_unitary(lower(h, dt, symmetric=True))
        errs.append(np.linalg.norm(u - expm(-1j * dt * hd), 2))
    assert errs[0] / errs[1] == pytest.approx(8.0, rel=0.1)


@pytest.mark.parametrize("flavor", ["basis", "scaled"])
def test_trotter_circuit_converges_to_exact(flavor):
    p = TriJunctionParams()
    exact = exact_protocol_unitary(p, steps=[0], rotated=(flavor == "scaled"))
    u = circuit_to_unitary(evolution_circuit(p, flavor, steps=[0], slices_per_step=48))
    assert np.linalg.norm(u - exact, 2) < 5e-3


def test_delays_follow_two_qubit_gates():
    c = evolution_circuit(TriJunctionParams(), "scaled", steps=[0], delay_ns=20.0)
    kinds = [g.kind for g in c]
    assert kinds.count("delay") == c.two_qubit_count()
    for i, g in enumerate(c):
        if g.is_two_qubit:
            assert kinds[i + 1] == "delay"


@pytest.mark.parametrize("flavor", ["basis", "scaled"])
def test_braid_of_nothing_is_identity_on_same_sign(flavor):
    c = braid_circuit(TriJunctionParams(), flavor, sign=1, target_sign=1, steps=[])
    assert np.allclose(circuit_to_unitary(c), np.eye(8), atol=1e-12)


def test_prepare_rejects_unknown_flavor():
    with pytest.raises(ValidationError):
        prepare(1, "pulse")
    with pytest.raises(ValidationError):
        init_pm(0)


@given(st.floats(0.01, np.pi))
def test_uyx_constructions_agree(theta):
    a = circuit_to_unitary(uyx_double_cnot(theta))
    b = circuit_to_unitary(uyx_scaled(theta))
    assert np.allclose(a, b, atol=1e-10)
    ref = expm(-0.5j * theta * pauli_to_dense(PauliTerm(1.0, {0: "Y", 1: "X"}), 2))
    assert np.allclose(a, ref, atol=1e-10)


@pytest.mark.parametrize("step", [1, 2, 3])
def test_unwind_gates_are_single_qubit(step):
    assert unwind_gates(step).two_qubit_count() == 0


def test_unwind_gates_errors():
    with pytest.raises(NotImplementedError):
        unwind_gates(4)
    with pytest.raises(ValidationError):
        unwind_gates(0)


@pytest.mark.parametrize("sign", [1, -1])
def test_chain_initializer_is_a_ground_state(sign):
    c = ChainModelParams()
    h = pauli_to_dense(build_chain_hamiltonian(c), c.n_qubits)
    psi = chain_init(sign, c).apply(QuantumState.zero(c.n_qubits)).data
    assert np.real(np.vdot(psi, h @ psi)) == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-8)


def test_chain_initializers_are_orthogonal():
    c = ChainModelParams()
    a = chain_init(1, c).apply(QuantumState.zero(10)).data
    b = chain_init(-1, c).apply(QuantumState.zero(10)).data
    assert abs(np.vdot(a, b)) < 1e-12


def test_chain_initializer_length_limit():
    with pytest.raises(NotImplementedError):
        chain_init(1, ChainModelParams(arm_length=2))
