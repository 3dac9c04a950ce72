"""Gate and circuit containers.

Rotations follow ``R_v(theta) = exp(-i theta sigma_v / 2)`` and
``ZX(theta) = exp(-i theta Z (x) X / 2)`` with the first qubit carrying Z.
Controlled gates list the control first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

import numpy as np

from .simcore import (
    PAULI_MATRICES,
    QuantumState,
    ValidationError,
    apply_gate,
    check_capacity,
)

ROTATIONS = ("rx", "ry", "rz")
CONTROLLED = ("cx", "cy", "cz")
KINDS = ROTATIONS + CONTROLLED + ("zx", "delay")

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)


def _rotation(axis: str, theta: float) -> np.ndarray:
    p = PAULI_MATRICES[axis.upper()]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * p


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    # delay length in ns; only meaningful for kind == "delay"
    duration: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 1 if self.kind in ROTATIONS else 2
        if self.kind != "delay" and len(self.qubits) != arity:
            raise ValidationError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"repeated qubit in {self.kind}{self.qubits}")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in CONTROLLED or self.kind == "zx"

    def matrix(self) -> np.ndarray:
        k = self.kind
        if k in ROTATIONS:
            return _rotation(k[1], self.angle)
        if k in CONTROLLED:
            return np.kron(_P0, np.eye(2)) + np.kron(_P1, PAULI_MATRICES[k[1].upper()])
        if k == "zx":
            zx = np.kron(PAULI_MATRICES["Z"], PAULI_MATRICES["X"])
            return np.cos(self.angle / 2) * np.eye(4) - 1j * np.sin(self.angle / 2) * zx
        return np.eye(2 ** len(self.qubits), dtype=complex)

    def inverse(self) -> "Gate":
        if self.kind in ROTATIONS or self.kind == "zx":
            return replace(self, angle=-self.angle)
        return self

    def __str__(self) -> str:
        qs = ",".join(map(str, self.qubits))
        if self.kind == "delay":
            return f"delay {qs} {self.duration!r}"
        if self.kind in CONTROLLED:
            return f"{self.kind} {qs}"
        return f"{self.kind} {qs} {self.angle!r}"


def rx(q: int, theta: float) -> Gate:
    return Gate("rx", (q,), theta)


def ry(q: int, theta: float) -> Gate:
    return Gate("ry", (q,), theta)


def rz(q: int, theta: float) -> Gate:
    return Gate("rz", (q,), theta)


def cx(c: int, t: int) -> Gate:
    return Gate("cx", (c, t))


def cy(c: int, t: int) -> Gate:
    return Gate("cy", (c, t))


def cz(c: int, t: int) -> Gate:
    return Gate("cz", (c, t))


def zx(c: int, t: int, theta: float) -> Gate:
    return Gate("zx", (c, t), theta)


def delay(qubits: Iterable[int], ns: float) -> Gate:
    return Gate("delay", tuple(qubits), duration=float(ns))


@dataclass
class Circuit:
    """Ordered gate list on an ``n``-qubit register."""

    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        check_capacity(self.n)
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(q >= self.n or q < 0 for q in g.qubits):
            raise ValidationError(f"{g} does not fit an {self.n}-qubit register")

    def append(self, g: Gate) -> "Circuit":
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise ValidationError("cannot concatenate circuits on different registers")
        return Circuit(self.n, self.gates + other.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [g.inverse() for g in reversed(self.gates)])

    def count(self, *kinds: str) -> int:
        return sum(1 for g in self.gates if g.kind in kinds)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def apply(self, state: QuantumState) -> QuantumState:
        for g in self.gates:
            state = apply_gate(state, g)
        return state

    def to_text(self) -> str:
        return "".join(f"{g}\n" for g in self.gates)

    @classmethod
    def from_text(cls, n: int, text: str) -> "Circuit":
        gates = []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            kind, qs = parts[0], tuple(int(q) for q in parts[1].split(","))
            if kind == "delay":
                gates.append(delay(qs, float(parts[2])))
            elif kind in CONTROLLED:
                gates.append(Gate(kind, qs))
            else:
                gates.append(Gate(kind, qs, float(parts[2])))
        return cls(n, gates)


def circuit_to_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of a circuit (gates applied left to right)."""
    check_capacity(c.n)
    dim = 2**c.n
    # evolve the identity column block as a batch of statevectors
    u = np.eye(dim, dtype=complex).reshape((2,) * c.n + (dim,))
    for g in c.gates:
        k = len(g.qubits)
        op = g.matrix().reshape((2,) * (2 * k))
        u = np.tensordot(op, u, axes=(list(range(k, 2 * k)), list(g.qubits)))
        u = np.moveaxis(u, list(range(k)), list(g.qubits))
    return u.reshape(dim, dim)


def merge_rotations(c: Circuit, atol: float = 1e-12) -> Circuit:
    """Peephole pass: fuse same-axis rotations that meet on a qubit, drop null ones.

    A rotation only fuses with the latest gate touching its qubit, so the
    pass never reorders non-commuting operations.
    """
    out: list[Gate | None] = []
    last_on: dict[int, int] = {}
    for g in c.gates:
        if g.kind in ROTATIONS:
            q = g.qubits[0]
            j = last_on.get(q)
            if j is not None and out[j] is not None and out[j].kind == g.kind:
                merged = out[j].angle + g.angle
                out[j] = replace(g, angle=merged)
                continue
            out.append(g)
            last_on[q] = len(out) - 1
        else:
            out.append(g)
            for q in g.qubits:
                last_on[q] = len(out) - 1
    kept = []
    for g in out:
        # R(2pi k) is +-identity: a global phase for the whole circuit
        if g.kind in ROTATIONS and abs(np.sin(g.angle / 2)) < atol:
            continue
        kept.append(g)
    return Circuit(c.n, kept)
