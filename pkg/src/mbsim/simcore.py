"""Dense linear algebra for small qubit registers.

Pauli strings and sums, statevectors and density matrices, an exact
time-evolution oracle and seeded computational-basis sampling.

Qubit 0 is the leftmost character of every bitstring and the most
significant tensor factor. Every module in the package uses this ordering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

MAX_QUBITS = 12

ATOL = 1e-10

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-site products: (a, b) -> (phase, c) with a*b = phase*c
_PAULI_PRODUCT = {}
for _a, _b in itertools.product("IXYZ", repeat=2):
    _m = PAULI_MATRICES[_a] @ PAULI_MATRICES[_b]
    for _c in "IXYZ":
        _ph = np.trace(PAULI_MATRICES[_c].conj().T @ _m) / 2
        if abs(_ph) > 0.5:
            _PAULI_PRODUCT[_a, _b] = (complex(np.round(_ph)), _c)


class CapacityError(ValueError):
    """Raised when a register exceeds :data:`MAX_QUBITS`."""


class ValidationError(ValueError):
    """Raised for malformed inputs (non-Hermitian Hamiltonians, bad shots, ...)."""


def check_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    if n < 1:
        raise ValidationError("register needs at least one qubit")


@dataclass(frozen=True)
class PauliTerm:
    """A coefficient times a tensor product of Pauli matrices.

    ``factors`` maps qubit index to an axis in ``"XYZ"``; unlisted qubits carry
    the identity.
    """

    coefficient: complex
    factors: tuple[tuple[int, str], ...] = ()

    def __init__(self, coefficient: complex = 1.0, factors: Mapping[int, str] | Iterable = ()):
        if isinstance(factors, Mapping):
            items = factors.items()
        else:
            items = list(factors)
        norm = {}
        for q, axis in items:
            q = int(q)
            axis = axis.upper()
            if axis not in "XYZ" or len(axis) != 1:
                if axis == "I":
                    continue
                raise ValidationError(f"unknown Pauli axis {axis!r}")
            if q < 0:
                raise ValidationError(f"negative qubit index {q}")
            if q in norm:
                raise ValidationError(f"qubit {q} listed twice")
            norm[q] = axis
        object.__setattr__(self, "coefficient", complex(coefficient))
        object.__setattr__(self, "factors", tuple(sorted(norm.items())))

    @classmethod
    def from_label(cls, label: str, coefficient: complex = 1.0) -> "PauliTerm":
        """Build from a dense label such as ``"YXI"`` (qubit 0 first)."""
        return cls(coefficient, {q: c for q, c in enumerate(label) if c != "I"})

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def label(self, n: int) -> str:
        chars = ["I"] * n
        for q, a in self.factors:
            chars[q] = a
        return "".join(chars)

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            mine = dict(self.factors)
            theirs = dict(other.factors)
            phase = self.coefficient * other.coefficient
            out = {}
            for q in set(mine) | set(theirs):
                ph, c = _PAULI_PRODUCT[mine.get(q, "I"), theirs.get(q, "I")]
                phase *= ph
                if c != "I":
                    out[q] = c
            return PauliTerm(phase, out)
        return PauliTerm(self.coefficient * other, self.factors)

    __rmul__ = __mul__

    def commutes_with(self, other: "PauliTerm") -> bool:
        mine = dict(self.factors)
        clashes = sum(1 for q, a in other.factors if q in mine and mine[q] != a)
        return clashes % 2 == 0

    def __repr__(self) -> str:
        body = "".join(f"{a}{q}" for q, a in self.factors) or "I"
        return f"PauliTerm({self.coefficient:.6g}*{body})"


@dataclass
class PauliSum:
    """A list of :class:`PauliTerm`; the Hamiltonian/observable container."""

    terms: list[PauliTerm] = field(default_factory=list)

    def __add__(self, other: "PauliSum | PauliTerm") -> "PauliSum":
        if isinstance(other, PauliTerm):
            return PauliSum(self.terms + [other])
        return PauliSum(self.terms + other.terms)

    def __mul__(self, scalar) -> "PauliSum":
        if isinstance(scalar, PauliSum):
            return PauliSum([a * b for a in self.terms for b in scalar.terms]).simplify()
        return PauliSum([t * scalar for t in self.terms])

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def simplify(self, atol: float = 1e-14) -> "PauliSum":
        """Merge terms with equal Pauli strings and drop vanishing ones."""
        acc: dict[tuple, complex] = {}
        for t in self.terms:
            acc[t.factors] = acc.get(t.factors, 0) + t.coefficient
        return PauliSum([PauliTerm(c, f) for f, c in acc.items() if abs(c) > atol])

    def max_qubit(self) -> int:
        return max((q for t in self.terms for q in t.qubits), default=-1)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return all(abs(t.coefficient.imag) <= atol for t in self.simplify().terms)


def hermitian_check(h: PauliSum, atol: float = 1e-12) -> None:
    if not h.is_hermitian(atol):
        raise ValidationError("Hamiltonian has non-real Pauli coefficients")


def pauli_to_dense(p: PauliSum | PauliTerm, n: int) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a Pauli sum."""
    check_capacity(n)
    if isinstance(p, PauliTerm):
        p = PauliSum([p])
    if p.max_qubit() >= n:
        raise ValidationError(f"qubit index {p.max_qubit()} outside an {n}-qubit register")
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for t in p.terms:
        # Pauli strings are signed permutations: row r has one entry at column r ^ flip
        flip = 0
        phase = np.full(dim, t.coefficient, dtype=complex)
        for q, a in t.factors:
            bit = (idx >> (n - 1 - q)) & 1
            if a in "XY":
                flip |= 1 << (n - 1 - q)
            if a == "Z":
                phase *= 1 - 2 * bit
            elif a == "Y":
                # <r|Y|c>: r=0 -> -i, r=1 -> +i
                phase *= np.where(bit, 1j, -1j)
        out[idx, idx ^ flip] += phase
    return out


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol)


@dataclass(frozen=True)
class QuantumState:
    """Statevector (1-D) or density matrix (2-D) on ``n`` qubits."""

    n: int
    data: np.ndarray

    def __post_init__(self):
        check_capacity(self.n)
        dim = 2**self.n
        if self.data.shape not in ((dim,), (dim, dim)):
            raise ValidationError(f"data shape {self.data.shape} does not fit {self.n} qubits")

    @property
    def is_density(self) -> bool:
        return self.data.ndim == 2

    @classmethod
    def zero(cls, n: int, density: bool = False) -> "QuantumState":
        return cls.basis(n, 0, density)

    @classmethod
    def basis(cls, n: int, index: int | str, density: bool = False) -> "QuantumState":
        if isinstance(index, str):
            index = int(index, 2)
        v = np.zeros(2**n, dtype=complex)
        v[index] = 1
        st = cls(n, v)
        return st.to_density() if density else st

    @classmethod
    def from_vector(cls, vec: Sequence[complex]) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        n = int(round(np.log2(vec.size)))
        return cls(n, vec / np.linalg.norm(vec))

    def to_density(self) -> "QuantumState":
        if self.is_density:
            return self
        return QuantumState(self.n, np.outer(self.data, self.data.conj()))

    def probabilities(self) -> np.ndarray:
        if self.is_density:
            p = np.real(np.diag(self.data)).copy()
        else:
            p = np.abs(self.data) ** 2
        p[p < 0] = 0
        return p / p.sum()

    def expectation(self, op: np.ndarray | PauliSum) -> float:
        if not isinstance(op, np.ndarray):
            op = pauli_to_dense(op, self.n)
        if self.is_density:
            return float(np.real(np.trace(op @ self.data)))
        return float(np.real(self.data.conj() @ op @ self.data))

    def validate(self, atol: float = ATOL) -> None:
        if self.is_density:
            rho = self.data
            if abs(np.trace(rho) - 1) > atol:
                raise ValidationError("density matrix trace differs from 1")
            if not np.allclose(rho, rho.conj().T, atol=atol):
                raise ValidationError("density matrix is not Hermitian")
            if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -1e-9:
                raise ValidationError("density matrix has negative eigenvalues")
        elif abs(np.linalg.norm(self.data) - 1) > atol:
            raise ValidationError("statevector is not normalized")


def apply_matrix(state: QuantumState, mat: np.ndarray, qubits: Sequence[int]) -> QuantumState:
    """Apply a ``2**k`` square matrix on the listed qubits (in the listed order)."""
    n = state.n
    k = len(qubits)
    if any(q < 0 or q >= n for q in qubits):
        raise ValidationError(f"qubits {tuple(qubits)} outside an {n}-qubit register")
    if len(set(qubits)) != k:
        raise ValidationError("repeated qubit in gate")
    op = mat.reshape((2,) * (2 * k))
    in_axes = list(range(k, 2 * k))

    def left(t: np.ndarray, offset: int) -> np.ndarray:
        axes = [offset + q for q in qubits]
        t = np.tensordot(op, t, axes=(in_axes, axes))
        return np.moveaxis(t, list(range(k)), axes)

    if state.is_density:
        t = state.data.reshape((2,) * (2 * n))
        t = left(t, 0)
        # right multiplication by U^dagger acts as conj(U) on the column indices
        t = np.conj(left(np.conj(t), n))
        return QuantumState(n, t.reshape(2**n, 2**n))
    t = left(state.data.reshape((2,) * n), 0)
    return QuantumState(n, t.reshape(2**n))


def apply_operator(state: QuantumState, u: np.ndarray) -> QuantumState:
    """Apply a full-register operator."""
    if state.is_density:
        return QuantumState(state.n, u @ state.data @ u.conj().T)
    return QuantumState(state.n, u @ state.data)


def apply_gate(state: QuantumState, gate) -> QuantumState:
    """Apply a :class:`mbsim.gates.Gate` (anything with ``matrix()`` and ``qubits``)."""
    return apply_matrix(state, gate.matrix(), gate.qubits)


def evolution_operator(h: PauliSum | np.ndarray, dt: float, n: int | None = None) -> np.ndarray:
    """``exp(-i H dt)`` from the Hermitian eigendecomposition of ``H``."""
    if isinstance(h, np.ndarray):
        dense = h
        if not np.allclose(dense, dense.conj().T, atol=1e-12):
            raise ValidationError("Hamiltonian matrix is not Hermitian")
    else:
        hermitian_check(h)
        dense = pauli_to_dense(h, n if n is not None else h.max_qubit() + 1)
    if not np.isfinite(dt):
        raise ValidationError("time step must be finite")
    w, v = np.linalg.eigh(dense)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def exact_evolve(h: PauliSum | np.ndarray, dt: float, state: QuantumState) -> QuantumState:
    """Evolve ``state`` under a time-independent Hamiltonian for time ``dt``."""
    return apply_operator(state, evolution_operator(h, dt, state.n))


def time_ordered_evolution(
    h_of_t: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    substeps: int = 200,
) -> np.ndarray:
    """Propagator of ``i d/dt U = H(t) U`` from ``t0`` to ``t1``.

    Uses the fourth-order Magnus expansion with two Gauss-Legendre nodes per
    substep. ``h_of_t`` returns the dense Hermitian matrix at time ``t``.
    Serves as the reference for time-dependent schedules; the local error is
    ``O(h^5)`` in the substep length ``h``.
    """
    if substeps < 1:
        raise ValidationError("substeps must be positive")
    h = (t1 - t0) / substeps
    c = np.sqrt(3) / 6
    u = None
    for k in range(substeps):
        ta = t0 + k * h
        a1 = h_of_t(ta + (0.5 - c) * h)
        a2 = h_of_t(ta + (0.5 + c) * h)
        # Omega = -i h (A1+A2)/2 - sqrt(3) h^2/12 [A2, A1] (note (-i)^2 = -1)
        gen = h * (a1 + a2) / 2 - 1j * np.sqrt(3) * h**2 / 12 * (a2 @ a1 - a1 @ a2)
        step = evolution_operator(gen, 1.0)
        u = step if u is None else step @ u
    return u


def sample_counts(state: QuantumState, shots: int, seed: int | np.random.Generator) -> dict[str, int]:
    """Multinomial computational-basis histogram, keyed by bitstring."""
    if shots <= 0:
        raise ValidationError("shots must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = state.probabilities()
    draws = rng.multinomial(shots, p)
    return {format(i, f"0{state.n}b"): int(c) for i, c in enumerate(draws) if c}


def counts_to_probs(counts: Mapping[str, int], n: int) -> np.ndarray:
    p = np.zeros(2**n)
    for k, v in counts.items():
        p[int(k, 2)] += v
    return p / p.sum()


def state_fidelity(a: QuantumState, b: QuantumState) -> float:
    """Overlap ``|<a|b>|^2`` for vectors; Uhlmann fidelity otherwise."""
    if a.n != b.n:
        raise ValidationError("states live on different registers")
    if not a.is_density and not b.is_density:
        return float(min(1.0, abs(np.vdot(a.data, b.data)) ** 2))
    if not a.is_density:
        a, b = b, a
    if not b.is_density:
        return float(np.clip(np.real(b.data.conj() @ a.data @ b.data), 0, 1))
    w, v = np.linalg.eigh(a.data)
    sqrt_a = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    m = sqrt_a @ b.data @ sqrt_a
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return float(np.clip(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2, 0, 1))
