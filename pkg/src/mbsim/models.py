"""Tri-junction Hamiltonians and the braiding coupling schedule.

Three equivalent forms of the minimal three-qubit model are provided: the
Majorana (fermionic) form, the Jordan-Wigner qubit form and the rotated
form in which every term acts on at most two qubits. The longer-arm chain
model with an auxiliary qubit lives here as well.

Arms are indexed 0, 1, 2 throughout; coupling triples are ordered
``(J01, J12, J20)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .simcore import (
    PAULI_MATRICES,
    PauliSum,
    PauliTerm,
    ValidationError,
    check_capacity,
    pauli_to_dense,
    time_ordered_evolution,
)

PAIRS = ((0, 1), (1, 2), (2, 0))


@dataclass(frozen=True)
class TriJunctionParams:
    """Parameters of the three-qubit tri-junction.

    ``alpha`` may be a scalar (same intra-arm coupling on every arm) or a
    triple of per-arm values. Energies are in units of ``j_max`` and times in
    units of ``1/j_max``.

    The defaults are the braiding working point: ``alpha = 0.2`` with
    ``tau = 3.3`` and three Trotter slices per protocol step.
    """

    alpha: float | tuple[float, float, float] = 0.2
    j_max: float = 1.0
    tau: float = 3.3
    trotter_steps_per_swap: int = 3

    def __post_init__(self):
        if self.j_max <= 0:
            raise ValidationError("j_max must be positive")
        if self.tau <= 0:
            raise ValidationError("tau must be positive")
        if int(self.trotter_steps_per_swap) < 1:
            raise ValidationError("need at least one Trotter slice per protocol step")
        if np.ndim(self.alpha) not in (0, 1) or (np.ndim(self.alpha) == 1 and len(self.alpha) != 3):
            raise ValidationError("alpha must be a scalar or one value per arm")

    @property
    def alphas(self) -> tuple[float, float, float]:
        if np.ndim(self.alpha) == 0:
            return (float(self.alpha),) * 3
        return tuple(float(a) for a in self.alpha)

    @property
    def schedule(self) -> "CouplingSchedule":
        return CouplingSchedule(self.j_max, self.tau)


# Strong intra-arm coupling, alpha = 3 J_max. It does not give an
# isolated low-energy doublet; see TriJunctionParams for the working point.
STRONG_ALPHA_PARAMS = TriJunctionParams(alpha=3.0, j_max=1.0, tau=3.3)


@dataclass(frozen=True)
class CouplingSchedule:
    """Piecewise-linear junction couplings over the six protocol steps.

    Step ``k`` (0-based) ramps coupling ``k mod 3`` down from ``j_max`` to 0
    while ramping coupling ``(k + 1) mod 3`` up, over ``[k tau, (k+1) tau]``.
    """

    j_max: float = 1.0
    tau: float = 3.3
    n_steps: int = 6

    @property
    def duration(self) -> float:
        return self.n_steps * self.tau

    def __call__(self, t: float) -> tuple[float, float, float]:
        return schedule_eval(self, t)


def schedule_eval(s: CouplingSchedule, t: float) -> tuple[float, float, float]:
    """Couplings ``(J01, J12, J20)`` at time ``t``."""
    eps = 1e-12 * max(1.0, s.duration)
    if t < -eps or t > s.duration + eps:
        raise ValidationError(f"t={t} outside the protocol window [0, {s.duration}]")
    t = min(max(t, 0.0), s.duration)
    k = min(int(t // s.tau), s.n_steps - 1)
    f = t / s.tau - k
    j = [0.0, 0.0, 0.0]
    j[k % 3] = s.j_max * (1 - f)
    j[(k + 1) % 3] = s.j_max * f
    return tuple(j)


def _z(q):
    return {q: "Z"}


def build_qubit_hamiltonian(p: TriJunctionParams, couplings) -> PauliSum:
    """Jordan-Wigner image of the tri-junction on three qubits."""
    j01, j12, j20 = couplings
    terms = [PauliTerm(a, _z(q)) for q, a in enumerate(p.alphas)]
    terms += [
        PauliTerm(j01, {0: "Y", 1: "X"}),
        PauliTerm(j12, {1: "Y", 2: "X"}),
        PauliTerm(j20, {0: "Y", 1: "Z", 2: "X"}),
    ]
    return PauliSum(terms)


def rotation_unitary() -> np.ndarray:
    """``(Z_1 + Y_0 X_1)/sqrt(2)``: Hermitian, unitary and self-inverse."""
    a = pauli_to_dense(PauliTerm(1.0, {1: "Z"}), 3)
    b = pauli_to_dense(PauliTerm(1.0, {0: "Y", 1: "X"}), 3)
    return (a + b) / np.sqrt(2)


def build_rotated_hamiltonian(p: TriJunctionParams, couplings) -> PauliSum:
    """Qubit Hamiltonian conjugated by :func:`rotation_unitary`.

    The three-qubit junction term becomes the two-qubit ``X_1 X_2``. The
    conjugation flips the sign of ``Y_1 X_2``, which is kept here so that the
    result is exactly ``U H U^dagger``. Per-arm ``alpha`` values are honoured:
    arm 0 and arm 1 map onto ``X_0 Y_1`` and ``Y_0 X_1`` respectively.
    """
    a0, a1, a2 = p.alphas
    j01, j12, j20 = couplings
    return PauliSum(
        [
            PauliTerm(a0, {0: "X", 1: "Y"}),
            PauliTerm(a1, {0: "Y", 1: "X"}),
            PauliTerm(a2, {2: "Z"}),
            PauliTerm(j01, {1: "Z"}),
            PauliTerm(-j12, {1: "Y", 2: "X"}),
            PauliTerm(j20, {1: "X", 2: "X"}),
        ]
    )


def _string(n: int, ops: dict[int, str]) -> np.ndarray:
    return reduce(np.kron, [PAULI_MATRICES[ops.get(q, "I")] for q in range(n)])


def majorana_operators(n: int = 3) -> dict[tuple[int, str], np.ndarray]:
    """Dense Majorana operators ``gamma_a^x``, ``gamma_a^y`` for ``n`` sites.

    ``gamma_a^x = Z_0 ... Z_{a-1} X_a`` and ``gamma_a^y = -Z_0 ... Z_{a-1} Y_a``,
    so that ``i gamma_a^x gamma_a^y = Z_a``.
    """
    out = {}
    for a in range(n):
        string = {q: "Z" for q in range(a)}
        out[a, "x"] = _string(n, {**string, a: "X"})
        out[a, "y"] = -_string(n, {**string, a: "Y"})
    return out


def build_fermion_hamiltonian(p: TriJunctionParams, couplings) -> np.ndarray:
    """Dense Majorana-form Hamiltonian of the tri-junction.

    Built as ``i sum_a alpha_a g_a^x g_a^y + (i/2) sum_{a != b} J_ab g_a^x g_b^x``
    with ``J_ab = -J_ba``. With this string convention the loop coupling
    ``J20`` enters with the opposite sign to the qubit form; the spectra agree
    because reversing the sign of the whole single-particle matrix and
    re-gauging the Majoranas removes that sign.
    """
    g = majorana_operators(3)
    j = np.zeros((3, 3))
    for (a, b), val in zip(PAIRS, couplings):
        j[a, b] = val
        j[b, a] = -val
    h = np.zeros((8, 8), dtype=complex)
    for a, al in enumerate(p.alphas):
        h += 1j * al * g[a, "x"] @ g[a, "y"]
    for a in range(3):
        for b in range(3):
            if a != b:
                h += 0.5j * j[a, b] * g[a, "x"] @ g[b, "x"]
    return h


def parity_operator(n: int) -> np.ndarray:
    return _string(n, {q: "Z" for q in range(n)})


def low_energy_pair(p: TriJunctionParams, couplings=None, reference=None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpair (energies, vectors) of the isolated MZM doublet.

    The doublet is the pair of eigenvectors of the qubit Hamiltonian with the
    largest weight on ``reference`` (a ``(8, k)`` array spanning a trial
    subspace); without a reference, the two lowest eigenvectors are returned.
    """
    if couplings is None:
        couplings = (p.j_max, 0.0, 0.0)
    h = pauli_to_dense(build_qubit_hamiltonian(p, couplings), 3)
    w, v = np.linalg.eigh(h)
    if reference is None:
        idx = np.array([0, 1])
    else:
        q, _ = np.linalg.qr(np.asarray(reference))
        weight = np.linalg.norm(q.conj().T @ v, axis=0)
        idx = np.sort(np.argsort(-weight)[:2])
    return w[idx], v[:, idx]


# --------------------------------------------------------------------------
# chain model with an auxiliary qubit

AUX_PAULI = ("X", "Y", "Z")


@dataclass(frozen=True)
class ChainModelParams:
    """Three Kitaev chains of ``arm_length`` sites meeting at a junction.

    Qubit 0 is the auxiliary qubit; site ``i`` of arm ``a`` is qubit
    ``1 + a * arm_length + i``. ``couplings`` holds the static
    ``(J01, J12, J20)``; time-dependent runs pass couplings explicitly.
    """

    mu: float = 0.0
    delta: float = 1.0
    arm_length: int = 3
    couplings: tuple[float, float, float] = field(default=(1.0, 0.0, 0.0))

    def __post_init__(self):
        if self.arm_length < 1:
            raise ValidationError("arm_length must be at least 1")

    @property
    def n_qubits(self) -> int:
        return 3 * self.arm_length + 1

    def site(self, i: int, arm: int) -> int:
        return 1 + arm * self.arm_length + i


def build_chain_hamiltonian(c: ChainModelParams, couplings=None) -> PauliSum:
    """Spin form of the chain tri-junction on ``3L + 1`` qubits.

    ``mu Z`` on every site, ``delta X X`` on every intra-arm bond and, for
    each arm pair ``(a, b)``, ``J_ab X_{0a} X_{0b}`` times the auxiliary
    Pauli of the third arm.
    """
    check_capacity(c.n_qubits)
    if couplings is None:
        couplings = c.couplings
    terms = []
    for a in range(3):
        for i in range(c.arm_length):
            terms.append(PauliTerm(c.mu, {c.site(i, a): "Z"}))
        for i in range(c.arm_length - 1):
            terms.append(PauliTerm(c.delta, {c.site(i, a): "X", c.site(i + 1, a): "X"}))
    for (a, b), j in zip(PAIRS, couplings):
        third = 3 - a - b
        terms.append(PauliTerm(j, {c.site(0, a): "X", c.site(0, b): "X", 0: AUX_PAULI[third]}))
    return PauliSum(terms)


def chain_majorana_operators(c: ChainModelParams) -> dict[tuple[int, int, str], np.ndarray]:
    """Dense ``gamma_{ia}^{x,y}`` for the chain, with the auxiliary-qubit string.

    ``gamma_{ia}^x = s_a Z_{0a} ... Z_{(i-1)a} X_{ia}`` where ``s_a`` is the
    auxiliary Pauli assigned to arm ``a``; ``gamma^y`` carries ``Y_{ia}``.
    """
    n = c.n_qubits
    check_capacity(n)
    out = {}
    for a in range(3):
        for i in range(c.arm_length):
            ops = {0: AUX_PAULI[a]}
            ops.update({c.site(j, a): "Z" for j in range(i)})
            out[i, a, "x"] = _string(n, {**ops, c.site(i, a): "X"})
            out[i, a, "y"] = _string(n, {**ops, c.site(i, a): "Y"})
    return out


def build_chain_fermion_hamiltonian(c: ChainModelParams, couplings=None) -> np.ndarray:
    """Majorana form of the chain model (dense), used as an oracle.

    ``i sum (mu g^y_{ia} g^x_{ia} - delta g^y_{ia} g^x_{(i+1)a})
    - (i/2) sum_{abc} J_ab eps_abc g^x_{0a} g^x_{0b}``. The two minus signs
    fix the Majorana phase convention so that the operator equals the spin
    form term by term.
    """
    if couplings is None:
        couplings = c.couplings
    g = chain_majorana_operators(c)
    n = c.n_qubits
    h = np.zeros((2**n, 2**n), dtype=complex)
    for a in range(3):
        for i in range(c.arm_length):
            h += 1j * c.mu * g[i, a, "y"] @ g[i, a, "x"]
        for i in range(c.arm_length - 1):
            h -= 1j * c.delta * g[i, a, "y"] @ g[i + 1, a, "x"]
    jm = np.zeros((3, 3))
    for (a, b), val in zip(PAIRS, couplings):
        jm[a, b] = jm[b, a] = val
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            cc = 3 - a - b
            eps = np.sign(np.linalg.det(np.eye(3)[[a, b, cc]]))
            h -= 0.5j * jm[a, b] * eps * g[0, a, "x"] @ g[0, b, "x"]
    return h


# --------------------------------------------------------------------------
# exact reference evolution over the protocol


def dense_protocol_hamiltonian(p: TriJunctionParams, rotated: bool = False):
    """Callable ``t -> dense H(t)`` for the coupling schedule of ``p``.

    The coupling-independent part and the three coupling terms are built once,
    so each call is a cheap linear combination.
    """
    build = build_rotated_hamiltonian if rotated else build_qubit_hamiltonian
    base = pauli_to_dense(build(p, (0.0, 0.0, 0.0)), 3)
    unit = TriJunctionParams(alpha=0.0, j_max=p.j_max, tau=p.tau)
    parts = [pauli_to_dense(build(unit, j), 3) for j in ((1.0, 0, 0), (0, 1.0, 0), (0, 0, 1.0))]
    sched = p.schedule

    def h(t: float) -> np.ndarray:
        j = sched(t)
        return base + j[0] * parts[0] + j[1] * parts[1] + j[2] * parts[2]

    return h


def exact_protocol_unitary(
    p: TriJunctionParams,
    steps=range(6),
    substeps_per_unit: float = 12.0,
    rotated: bool = False,
) -> np.ndarray:
    """Time-ordered propagator through consecutive protocol steps (0-based).

    ``substeps_per_unit`` sets the Magnus substep density per unit time.
    """
    steps = list(steps)
    if not steps or steps != list(range(steps[0], steps[-1] + 1)):
        raise ValidationError("steps must be a non-empty consecutive range")
    h = dense_protocol_hamiltonian(p, rotated)
    n = max(8, int(np.ceil(p.tau * substeps_per_unit)))
    u = np.eye(8, dtype=complex)
    # one segment per step keeps the ramp kinks on substep boundaries
    for k in steps:
        u = time_ordered_evolution(h, k * p.tau, (k + 1) * p.tau, n) @ u
    return u
