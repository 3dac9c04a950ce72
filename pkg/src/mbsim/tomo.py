"""Two-qubit process tomography by linear inversion.

Inputs are the 16 products of ``|0>, |1>, |+>, |+i>``. Each output is
measured in the 9 product Pauli bases. The Pauli transfer matrix (PTM)
``R_ij = Tr(P_i E(P_j)) / 4`` is recovered by inverting the known input
Pauli vectors. With ``shots=0`` the outcome probabilities are exact, which
makes the reconstruction exact for any CPTP map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuits import circuit_to_unitary, uyx_double_cnot, uyx_scaled
from .gates import Circuit, Gate, rx, ry
from .noise import NoiseModel, apply_readout, build_confusion, mitigate_readout, noisy_apply
from .simcore import PAULI_MATRICES, QuantumState, ValidationError

LABELS = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
_PAULIS = [np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b]) for a, b in LABELS]

# single-qubit preparations from |0>
_PREP = {
    "0": [],
    "1": [rx(0, np.pi)],
    "+": [ry(0, np.pi / 2)],
    "+i": [rx(0, -np.pi / 2)],
}
# rotations taking the measured axis onto Z
_MEAS = {"X": [ry(0, -np.pi / 2)], "Y": [rx(0, np.pi / 2)], "Z": []}

FLAVOR_CIRCUITS = {"double_cnot": uyx_double_cnot, "scaled": uyx_scaled}


def _on(gates, q):
    return [Gate(g.kind, (q,), g.angle) for g in gates]


def ptm_of_unitary(u: np.ndarray) -> np.ndarray:
    """PTM of ``rho -> U rho U^dagger`` on two qubits."""
    return np.array([[np.real(np.trace(pi @ u @ pj @ u.conj().T)) / 4 for pj in _PAULIS] for pi in _PAULIS])


def _input_states():
    out = []
    for a, b in itertools.product(_PREP, repeat=2):
        c = Circuit(2, _on(_PREP[a], 0) + _on(_PREP[b], 1))
        out.append(c.apply(QuantumState.zero(2)).data)
    return out


def _pauli_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([np.real(np.trace(p @ rho)) for p in _PAULIS])


_INPUTS = _input_states()
_INPUT_MATRIX = np.array([_pauli_vector(np.outer(v, v.conj())) for v in _INPUTS]).T  # (16 Paulis, 16 inputs)


@dataclass
class QPTResult:
    theta: float
    flavor: str
    fidelity: float
    shots: int
    seed: int
    ptm: np.ndarray | None = None
    ill_conditioned: bool = False

    @property
    def error(self) -> float:
        return 1.0 - self.fidelity

    @property
    def average_gate_fidelity(self) -> float:
        return average_gate_fidelity(self.fidelity)


def _expectations_from_setting(probs: np.ndarray, axes: str) -> dict[str, float]:
    """Pauli expectations available from one product-basis setting."""
    p = probs.reshape(2, 2)
    out = {}
    for lab in ("II", "I" + axes[1], axes[0] + "I", axes):
        s0 = np.array([1, -1]) if lab[0] != "I" else np.array([1, 1])
        s1 = np.array([1, -1]) if lab[1] != "I" else np.array([1, 1])
        out[lab] = float(np.sum(p * np.outer(s0, s1)))
    return out


def qpt(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    shots: int = 0,
    seed: int | np.random.SeedSequence = 0,
    mitigate: bool = True,
) -> tuple[np.ndarray, bool]:
    """Reconstruct the PTM of a two-qubit circuit.

    Args:
        circuit: the process under test, on two qubits.
        noise: gate and readout errors; ``None`` means ideal.
        shots: shots per measurement setting; ``0`` uses exact probabilities.
        seed: seed for the multinomial draws.
        mitigate: apply readout mitigation with the model's confusion matrix.

    Returns:
        ``(ptm, ill_conditioned)`` where the flag marks shot counts too small
        for a trustworthy inversion.
    """
    if circuit.n != 2:
        raise ValidationError("process tomography is implemented for two qubits")
    noise = noise or NoiseModel.ideal()
    rng = np.random.default_rng(seed)
    conf = build_confusion(noise, 2)
    outputs = [noisy_apply(QuantumState(2, np.outer(v, v.conj())), circuit, noise) for v in _INPUTS]
    measured = np.zeros((16, 16))
    for k, rho in enumerate(outputs):
        sums = {lab: [] for lab in LABELS}
        for axes in itertools.product("XYZ", repeat=2):
            axes = "".join(axes)
            rot = Circuit(2, _on(_MEAS[axes[0]], 0) + _on(_MEAS[axes[1]], 1))
            probs = np.clip(np.real(np.diag(rot.apply(rho).data)), 0, None)
            probs = apply_readout(probs / probs.sum(), conf)
            if shots:
                counts = rng.multinomial(shots, probs / probs.sum())
                probs = counts / shots
            if mitigate:
                probs = mitigate_readout(probs, conf)
            for lab, val in _expectations_from_setting(probs, axes).items():
                sums[lab].append(val)
        measured[:, k] = [np.mean(sums[lab]) for lab in LABELS]
    ptm = measured @ np.linalg.inv(_INPUT_MATRIX)
    # fewer than ~100 shots per setting leaves O(0.1) noise on each entry
    return ptm, bool(shots and shots < 100)


def process_fidelity(measured: np.ndarray, ideal: Circuit | np.ndarray) -> float:
    """``Tr(R_ideal^T R) / 16``; ``ideal`` is a circuit, a unitary or a PTM."""
    if isinstance(ideal, Circuit):
        ideal = ptm_of_unitary(circuit_to_unitary(ideal))
    elif ideal.shape == (4, 4):
        ideal = ptm_of_unitary(ideal)
    if ideal.shape != measured.shape:
        raise ValidationError("PTM dimensions differ")
    return float(np.trace(ideal.T @ measured) / 16)


def average_gate_fidelity(f_pro: float, d: int = 4) -> float:
    return (d * f_pro + 1) / (d + 1)


def choi_process_fidelity(circuit: Circuit, ideal: np.ndarray, noise: NoiseModel | None = None) -> float:
    """Process fidelity from the Choi state, ``<Phi_U| J(E) |Phi_U>``.

    The channel acts on qubits 2 and 3 of a maximally entangled four-qubit
    state; qubits 0 and 1 are the reference.
    """
    noise = noise or NoiseModel.ideal()
    phi = np.zeros(16, dtype=complex)
    for i in range(4):
        phi[i * 4 + i] = 0.5
    shifted = Circuit(4, [Gate(g.kind, tuple(q + 2 for q in g.qubits), g.angle, g.duration) for g in circuit])
    rho = noisy_apply(QuantumState(4, np.outer(phi, phi.conj())), shifted, noise)
    target = np.kron(np.eye(4), ideal) @ phi
    return float(np.real(target.conj() @ rho.data @ target))


def qpt_uyx(theta: float, flavor: str, noise=None, shots=0, trials=1, seed=0) -> QPTResult:
    """Tomography of ``U_yx(theta)`` in one of its two constructions."""
    if flavor not in FLAVOR_CIRCUITS:
        raise ValidationError(f"unknown construction {flavor!r}")
    circ = FLAVOR_CIRCUITS[flavor](theta)
    ideal = uyx_double_cnot(theta)  # same unitary; used as the reference
    seeds = np.random.SeedSequence(seed).spawn(trials)
    fids, ptms, flag = [], [], False
    for s in seeds:
        r, bad = qpt(circ, noise, shots, s)
        fids.append(process_fidelity(r, ideal))
        ptms.append(r)
        flag |= bad
    return QPTResult(theta, flavor, float(np.mean(fids)), shots, int(seed), np.mean(ptms, axis=0), flag)


def error_reduction_curve(thetas, noise=None, shots=0, seed=0, trials=1):
    """Relative error reduction ``1 - E_scaled / E_double_cnot`` per angle.

    Flavors are evaluated interleaved per angle. Returns a list of
    ``(theta, reduction, result_double_cnot, result_scaled)``; ``reduction``
    is ``nan`` when the double-CNOT error vanishes.
    """
    thetas = list(thetas)
    if not thetas:
        raise ValidationError("need at least one angle")
    seq = np.random.SeedSequence(seed)
    out = []
    for theta, child in zip(thetas, seq.spawn(len(thetas))):
        if not 0 < theta <= np.pi + 1e-12:
            raise ValidationError(f"theta={theta} outside (0, pi]")
        sa, sb = child.generate_state(2)
        ra = qpt_uyx(theta, "double_cnot", noise, shots, trials, int(sa))
        rb = qpt_uyx(theta, "scaled", noise, shots, trials, int(sb))
        red = 1 - rb.error / ra.error if ra.error > 1e-12 else float("nan")
        out.append((float(theta), red, ra, rb))
    return out


def default_thetas(n: int = 15) -> np.ndarray:
    """``n`` angles evenly spaced on ``(0, pi]``."""
    return np.linspace(0, np.pi, n + 1)[1:]


def qpt_rows(results) -> list[dict]:
    """CSV rows ``theta, flavor, shots, seed, fidelity, error``."""
    return [
        {"theta": r.theta, "flavor": r.flavor, "shots": r.shots, "seed": r.seed, "fidelity": r.fidelity, "error": r.error}
        for r in results
    ]
