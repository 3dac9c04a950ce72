"""State initializers and Trotter circuit builders for both gate flavors.

The *basis* flavor evolves the qubit Hamiltonian with CNOT-style controlled
gates and single-qubit rotations. The *scaled* flavor evolves the rotated
Hamiltonian, lowering every two-qubit exponential onto one ``ZX(phi)`` gate
dressed by single-qubit basis changes.

Trotter slices sample ``H(t)`` at the slice midpoint. A single slice applies
each term once; over a protocol, consecutive slices alternate the term order
(``order="alternating"``), so every pair of slices is a symmetric
second-order product while each slice keeps the minimal two-qubit gate count.
``order="symmetric"`` instead builds every slice as its own palindrome.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .gates import (
    Circuit,
    Gate,
    circuit_to_unitary,
    cx,
    cy,
    delay,
    merge_rotations,
    rx,
    ry,
    rz,
    zx,
)
from .models import (
    ChainModelParams,
    CouplingSchedule,
    TriJunctionParams,
    build_qubit_hamiltonian,
    build_rotated_hamiltonian,
    low_energy_pair,
    rotation_unitary,
    schedule_eval,
)
from .simcore import PauliSum, PauliTerm, ValidationError

__all__ = [
    "DecompositionError",
    "FLAVORS",
    "braid_circuit",
    "chain_init",
    "circuit_to_unitary",
    "doublet_states",
    "group_by_pair",
    "evolution_circuit",
    "exp_pauli_basis",
    "exp_pauli_scaled",
    "hamiltonian_at",
    "init_pm",
    "prepare",
    "rotated_init",
    "trotter_step_basis",
    "trotter_step_scaled",
    "unwind_gates",
    "uyx_double_cnot",
    "uyx_scaled",
]

FLAVORS = ("basis", "scaled")


class DecompositionError(ValueError):
    """A Pauli exponential has no lowering in the requested gate flavor."""


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValidationError(f"sign must be + or -, got {sign!r}")


def init_pm(sign) -> Circuit:
    """Prepare ``psi_+`` or ``psi_-`` from ``|000>``.

    Gate order (first applied first): ``Rx_0(-pi/2)``, ``CX_01``,
    ``Ry_0(-+pi/2)``, ``Ry_2(pi)``.
    """
    s = _sign(sign)
    return Circuit(3, [rx(0, -np.pi / 2), cx(0, 1), ry(0, -s * np.pi / 2), ry(2, np.pi)])


def rotated_init(sign) -> Circuit:
    """:func:`init_pm` followed by the basis rotation onto the two-local frame."""
    return init_pm(sign) + Circuit(3, [cy(0, 1), ry(0, -np.pi / 2), cy(0, 1), rz(1, np.pi)])


def prepare(sign, flavor: str = "basis") -> Circuit:
    if flavor == "basis":
        return init_pm(sign)
    if flavor == "scaled":
        return rotated_init(sign)
    raise ValidationError(f"unknown flavor {flavor!r}")


# --------------------------------------------------------------------------
# Pauli exponentials


def exp_pauli_basis(term: PauliTerm, dt: float) -> list[Gate]:
    """Gates for ``exp(-i c P dt)`` using controlled-Pauli conjugation.

    A pivot qubit carrying X or Y holds the rotation; every other qubit of
    the string is attached with a controlled gate of its own axis. Two-qubit
    terms cost two controlled gates, three-qubit terms four.
    """
    if abs(term.coefficient.imag) > 1e-12:
        raise DecompositionError("complex coefficient in a Hamiltonian term")
    theta = 2 * term.coefficient.real * dt
    factors = dict(term.factors)
    if not factors:
        return []
    if len(factors) == 1:
        (q, a), = factors.items()
        return [Gate("r" + a.lower(), (q,), theta)]
    pivots = [q for q, a in term.factors if a in "XY"]
    if pivots:
        pivot = pivots[0]
        ladder = [Gate("c" + a.lower(), (pivot, q)) for q, a in term.factors if q != pivot]
        core = Gate("r" + factors[pivot].lower(), (pivot,), theta)
    else:
        # all-Z string: CNOTs onto the last qubit, Rz there
        last = term.qubits[-1]
        ladder = [cx(q, last) for q in term.qubits[:-1]]
        core = rz(last, theta)
    # ladder[::-1] ... ladder keeps the nesting symmetric
    return ladder[::-1] + [core] + ladder


_TO_Z = {"Z": [], "X": [("ry", np.pi / 2)], "Y": [("rx", -np.pi / 2)]}
_TO_X = {"X": [], "Y": [("rz", np.pi / 2)], "Z": [("ry", -np.pi / 2)]}


def exp_pauli_scaled(term: PauliTerm, dt: float) -> list[Gate]:
    """Gates for ``exp(-i c P dt)`` with at most one ``ZX`` rotation.

    ``exp(-i phi P_i Q_j / 2) = (V (x) W) ZX(phi) (V (x) W)^dagger`` where
    ``V Z V^dagger = P`` and ``W X W^dagger = Q``.
    """
    if term.weight > 2:
        raise DecompositionError(
            f"{term!r} acts on {term.weight} qubits; rotate to the two-local frame first"
        )
    if abs(term.coefficient.imag) > 1e-12:
        raise DecompositionError("complex coefficient in a Hamiltonian term")
    theta = 2 * term.coefficient.real * dt
    if term.weight == 0:
        return []
    if term.weight == 1:
        (q, a), = term.factors
        return [Gate("r" + a.lower(), (q,), theta)]
    (i, p), (j, q) = term.factors
    frame = [Gate(k, (i,), ang) for k, ang in _TO_Z[p]] + [Gate(k, (j,), ang) for k, ang in _TO_X[q]]
    undo = [g.inverse() for g in frame]
    return undo + [zx(i, j, theta)] + frame


def _active(h: PauliSum) -> list[PauliTerm]:
    return [t for t in h.terms if abs(t.coefficient) > 0]


def _slice(h: PauliSum, dt: float, lower, reverse: bool, symmetric: bool, n: int) -> Circuit:
    terms = _active(h)
    if reverse:
        terms = terms[::-1]
    gates: list[Gate] = []
    if symmetric and len(terms) > 1:
        for t in terms[:-1]:
            gates += lower(t, dt / 2)
        gates += lower(terms[-1], dt)
        for t in terms[-2::-1]:
            gates += lower(t, dt / 2)
    else:
        for t in terms:
            gates += lower(t, dt)
    return merge_rotations(Circuit(n, gates))


def trotter_step_basis(h: PauliSum, dt: float, reverse: bool = False, symmetric: bool = False) -> Circuit:
    """One Trotter slice of the qubit Hamiltonian with controlled gates.

    Terms are applied in the order of ``h`` (reversed when ``reverse``);
    ``symmetric`` builds the palindromic second-order slice instead.
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    return _slice(h, dt, exp_pauli_basis, reverse, symmetric, max(3, h.max_qubit() + 1))


def trotter_step_scaled(h: PauliSum, dt: float, reverse: bool = False, symmetric: bool = False) -> Circuit:
    """One Trotter slice of a two-local Hamiltonian with ``ZX`` rotations."""
    if dt <= 0:
        raise ValidationError("dt must be positive")
    return _slice(h, dt, exp_pauli_scaled, reverse, symmetric, max(3, h.max_qubit() + 1))


def group_by_pair(h: PauliSum) -> PauliSum:
    """Reorder terms so that those sharing a qubit pair are adjacent.

    Two-qubit terms are grouped by their pair, in order of first
    appearance. A single-qubit term joins the first pair containing its
    qubit and is placed after that pair's two-qubit terms. Adjacent terms
    on the same pair share basis-change rotations that the peephole pass
    can then fuse.
    """
    pairs = []
    for t in h.terms:
        if t.weight == 2 and t.qubits not in pairs:
            pairs.append(t.qubits)

    def key(item):
        i, t = item
        if t.weight == 2:
            return (pairs.index(t.qubits), 0, i)
        owner = next((k for k, pq in enumerate(pairs) if t.qubits[0] in pq), len(pairs))
        return (owner, 1, i)

    return PauliSum([t for _, t in sorted(enumerate(h.terms), key=key)])


def hamiltonian_at(p: TriJunctionParams, flavor: str, couplings) -> PauliSum:
    """Hamiltonian in the frame and term order used by ``flavor``."""
    if flavor == "basis":
        return build_qubit_hamiltonian(p, couplings)
    if flavor == "scaled":
        return group_by_pair(build_rotated_hamiltonian(p, couplings))
    raise ValidationError(f"unknown flavor {flavor!r}")


def slice_times(p: TriJunctionParams, steps: Iterable[int], slices_per_step: int | None = None):
    """Midpoint times and widths of the Trotter slices covering ``steps``."""
    m = slices_per_step or p.trotter_steps_per_swap
    dt = p.tau / m
    return [((k + (i + 0.5) / m) * p.tau, dt) for k in steps for i in range(m)]


def evolution_circuit(
    p: TriJunctionParams,
    flavor: str,
    steps: Iterable[int] = range(6),
    slices_per_step: int | None = None,
    order: str = "alternating",
    delay_ns: float = 0.0,
    couplings_override=None,
) -> Circuit:
    """Trotterized evolution through the listed protocol steps (0-based).

    ``couplings_override`` maps a coupling triple to a modified one (used,
    for instance, to pin ``J20 = 0``). ``delay_ns > 0`` appends an idle of
    that length after every two-qubit gate.
    """
    if order not in ("alternating", "symmetric", "forward"):
        raise ValidationError(f"unknown slice ordering {order!r}")
    steps = list(steps)
    sched = CouplingSchedule(p.j_max, p.tau, n_steps=max(6, max(steps, default=0) + 1))
    lower = trotter_step_basis if flavor == "basis" else trotter_step_scaled
    out = Circuit(3)
    for idx, (t, dt) in enumerate(slice_times(p, steps, slices_per_step)):
        j = schedule_eval(sched, t)
        if couplings_override is not None:
            j = couplings_override(j)
        h = hamiltonian_at(p, flavor, j)
        out = out + lower(
            h,
            dt,
            reverse=(order == "alternating" and idx % 2 == 1),
            symmetric=(order == "symmetric"),
        )
    out = merge_rotations(out)
    if delay_ns > 0:
        padded = []
        for g in out:
            padded.append(g)
            if g.is_two_qubit:
                padded.append(delay(g.qubits, delay_ns))
        out = Circuit(3, padded)
    return out


def braid_circuit(
    p: TriJunctionParams,
    flavor: str,
    sign=+1,
    target_sign=None,
    steps: Iterable[int] = range(6),
    **kwargs,
) -> Circuit:
    """Initializer, Trotter evolution and inverse of the target initializer.

    By default the target is the opposite sign, so the all-zeros outcome
    marks a successful braid.
    """
    s = _sign(sign)
    target = -s if target_sign is None else _sign(target_sign)
    return prepare(s, flavor) + evolution_circuit(p, flavor, steps, **kwargs) + prepare(target, flavor).inverse()


_UNWIND = {
    1: [ry(0, np.pi / 2), rx(1, np.pi / 2), ry(2, np.pi / 2)],
    2: [rx(0, np.pi / 2), ry(1, np.pi / 2), ry(2, np.pi / 2)],
    3: [ry(0, np.pi / 2)],
}


def unwind_gates(step: int) -> Circuit:
    """Single-qubit gates that map the step-``k`` target onto a basis state."""
    if step in (4, 5, 6):
        raise NotImplementedError("unwinding after steps 4-6 needs entangling gates")
    if step not in _UNWIND:
        raise ValidationError(f"step must be 1, 2 or 3, got {step!r}")
    return Circuit(3, list(_UNWIND[step]))


def uyx_double_cnot(theta: float) -> Circuit:
    """``exp(-i theta Y_0 X_1 / 2)`` as ``CX_01 Ry_0(theta) CX_01``."""
    return Circuit(2, exp_pauli_basis(PauliTerm(0.5, {0: "Y", 1: "X"}), theta))


def uyx_scaled(theta: float) -> Circuit:
    """``exp(-i theta Y_0 X_1 / 2)`` as one ``ZX(theta)`` between X rotations."""
    return Circuit(2, exp_pauli_scaled(PauliTerm(0.5, {0: "Y", 1: "X"}), theta))


def doublet_states(p: TriJunctionParams, flavor: str = "basis") -> tuple[np.ndarray, np.ndarray]:
    """Exact ``psi_+`` and ``psi_-`` of ``H(0)`` as ``(8,)`` vectors.

    The circuit initializers only approximate ``|e> +- |g>`` when ``alpha``
    is nonzero. This projects both circuit states onto the low-energy
    doublet of ``H(0)`` and orthonormalizes them (closest orthonormal pair),
    which keeps the phase convention of the circuits. In the scaled flavor
    the states are returned in the rotated frame.
    """
    circ = np.stack([circuit_to_unitary(init_pm(s))[:, 0] for s in (1, -1)], axis=1)
    _, v = low_energy_pair(p, reference=circ)
    proj = v @ (v.conj().T @ circ)
    u, _, vh = np.linalg.svd(proj, full_matrices=False)
    pair = u @ vh
    if flavor == "scaled":
        pair = rotation_unitary() @ pair
    return pair[:, 0], pair[:, 1]


def chain_init(sign, c: ChainModelParams) -> Circuit:
    """Ground-state initializer of the three-arm chain at ``mu = 0``, ``J01 = delta``.

    The auxiliary qubit is set to ``|1>``. The uncoupled third arm is put in
    the equal superposition of its two antiferromagnetic X-basis patterns
    (same for both signs). Arms 0 and 1 get the X-basis pattern
    ``+-+`` (``sign = +``) or ``-+-`` (``sign = -``) along the chain.
    Only ``arm_length = 3`` is supported.
    """
    s = _sign(sign)
    if c.arm_length != 3:
        raise NotImplementedError("chain initializer is only defined for three sites per arm")
    q = c.site
    gates = [rx(0, np.pi)]
    # GHZ on the third arm, flip odd sites, then rotate into the X basis
    gates += [ry(q(0, 2), np.pi / 2), cx(q(0, 2), q(1, 2)), cx(q(1, 2), q(2, 2)), rx(q(1, 2), np.pi)]
    gates += [ry(q(i, 2), np.pi / 2) for i in range(3)]
    for arm in (0, 1):
        gates += [ry(q(i, arm), s * (-1) ** i * np.pi / 2) for i in range(3)]
    return Circuit(c.n_qubits, gates)
