"""Bit-flip gate errors, delay noise and readout assignment errors.

Every gate is followed by an uncorrelated bit flip on each qubit it touches.
Single-qubit gates use ``eps_1q``. Controlled gates use ``eps_cnot``. A
``ZX(phi)`` rotation uses an error proportional to its angle,
``(|phi| / pi) * eps_cnot``. A delay of ``t`` ns flips each idle qubit with
probability ``delay_rate * t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .gates import CONTROLLED, ROTATIONS, Circuit
from .simcore import (
    PAULI_MATRICES,
    QuantumState,
    ValidationError,
    apply_gate,
    check_capacity,
)

# Device ranges used for the "shaded" error band.
EPS_CNOT_RANGE = (6.9e-3, 9.4e-3)
EPS_1Q_RANGE = (2.2e-4, 2.8e-4)


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 0.5:
        raise ValidationError(f"{name}={p} must lie in [0, 0.5]")
    return p


@dataclass(frozen=True)
class NoiseModel:
    """Error rates for :func:`noisy_apply` and readout.

    Attributes:
        eps_1q: bit-flip probability after each single-qubit gate.
        eps_cnot: per-qubit bit-flip probability after a controlled gate.
        delay_rate: bit-flip probability per ns of inserted idle time. The
            default is tuned so that the braid bias of the scaled circuit
            vanishes for delays of about 150 ns; it is not a device value.
        readout: per-qubit ``(p(1|0), p(0|1))``; a single pair is shared by
            all qubits.
    """

    eps_1q: float = 2.5e-4
    eps_cnot: float = 8.0e-3
    delay_rate: float = 2.0e-4
    readout: tuple = (0.0, 0.0)

    def __post_init__(self):
        _check_prob("eps_1q", self.eps_1q)
        _check_prob("eps_cnot", self.eps_cnot)
        if self.delay_rate < 0:
            raise ValidationError("delay_rate must be non-negative")
        ro = self.readout
        pairs = [ro] if np.ndim(ro) == 1 else list(ro)
        for p01, p10 in pairs:
            _check_prob("readout p(1|0)", p01)
            _check_prob("readout p(0|1)", p10)
        object.__setattr__(self, "readout", tuple(ro) if np.ndim(ro) == 1 else tuple(map(tuple, ro)))

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0, (0.0, 0.0))

    @property
    def is_ideal(self) -> bool:
        return self.eps_1q == 0 and self.eps_cnot == 0 and self.delay_rate == 0

    def readout_pair(self, q: int) -> tuple[float, float]:
        if np.ndim(self.readout) == 1:
            return self.readout
        return self.readout[q]


def bitflip_channel(eps: float, arity: int = 1) -> list[np.ndarray]:
    """Kraus operators of ``(1-eps) I + eps X`` on each of ``arity`` qubits."""
    eps = _check_prob("eps", eps)
    if arity not in (1, 2):
        raise ValidationError("arity must be 1 or 2")
    single = [np.sqrt(1 - eps) * np.eye(2, dtype=complex), np.sqrt(eps) * PAULI_MATRICES["X"]]
    if arity == 1:
        return single
    return [np.kron(a, b) for a in single for b in single]


def apply_channel(state: QuantumState, kraus: Sequence[np.ndarray], qubits: Sequence[int]) -> QuantumState:
    """Apply a Kraus map on ``qubits`` of a density matrix."""
    rho = state.to_density()
    n = rho.n
    k = len(qubits)
    dims = (2,) * n
    mat = rho.data.reshape(dims + dims)
    out = np.zeros_like(mat)
    row_axes = list(qubits)
    col_axes = [n + q for q in qubits]
    for op in kraus:
        o = op.reshape((2,) * (2 * k))
        t = np.tensordot(o, mat, axes=(list(range(k, 2 * k)), row_axes))
        t = np.moveaxis(t, list(range(k)), row_axes)
        t = np.tensordot(o.conj(), t, axes=(list(range(k, 2 * k)), col_axes))
        t = np.moveaxis(t, list(range(k)), col_axes)
        out += t
    return QuantumState(n, out.reshape(2**n, 2**n))


def choi_matrix(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| (x) K(|i><j|)``."""
    d = kraus[0].shape[1]
    choi = np.zeros((d * d, d * d), dtype=complex)
    for op in kraus:
        v = op.reshape(-1, order="F")  # column-stacked vec(K) = sum_i |i> (x) K|i>
        choi += np.outer(v, v.conj())
    return choi


def is_cptp(kraus: Sequence[np.ndarray], atol: float = 1e-10) -> bool:
    d = kraus[0].shape[1]
    tp = sum(k.conj().T @ k for k in kraus)
    if not np.allclose(tp, np.eye(d), atol=atol):
        return False
    return bool(np.linalg.eigvalsh(choi_matrix(kraus)).min() >= -atol)


def epsilon_for_angle(phi: float, eps_cnot: float) -> float:
    """Error of a ``ZX(phi)`` rotation, linear in ``phi`` with ``ZX(pi) ~ CNOT``."""
    if not 0.0 <= phi <= np.pi + 1e-12:
        raise ValidationError(f"phi={phi} outside [0, pi]")
    return min(phi, np.pi) / np.pi * eps_cnot


def _wrapped_magnitude(phi: float) -> float:
    """``|phi|`` after folding into ``(-pi, pi]``."""
    return abs((phi + np.pi) % (2 * np.pi) - np.pi)


def gate_error(g, model: NoiseModel) -> float:
    """Bit-flip probability applied after gate ``g``."""
    if g.kind in ROTATIONS:
        return model.eps_1q
    if g.kind in CONTROLLED:
        return model.eps_cnot
    if g.kind == "zx":
        return epsilon_for_angle(_wrapped_magnitude(g.angle), model.eps_cnot)
    if g.kind == "delay":
        return min(0.5, model.delay_rate * g.duration)
    raise ValidationError(f"no error rule for {g.kind}")


def noisy_apply(state: QuantumState, circuit: Circuit, model: NoiseModel) -> QuantumState:
    """Run ``circuit`` on a density matrix with a bit flip after every gate."""
    check_capacity(circuit.n)
    rho = state.to_density()
    for g in circuit:
        if g.kind != "delay":
            rho = apply_gate(rho, g)
        eps = gate_error(g, model)
        if eps > 0:
            kraus = bitflip_channel(eps, 1)
            for q in g.qubits:
                rho = apply_channel(rho, kraus, (q,))
    return rho


def build_confusion(model: NoiseModel, n: int) -> np.ndarray:
    """Column-stochastic ``M[observed, prepared]`` from per-qubit assignment errors."""
    check_capacity(n)
    mats = []
    for q in range(n):
        p01, p10 = model.readout_pair(q)
        mats.append(np.array([[1 - p01, p10], [p01, 1 - p10]]))
    return reduce(np.kron, mats)


def apply_readout(probs: np.ndarray, m: np.ndarray) -> np.ndarray:
    return m @ np.asarray(probs, dtype=float)


def mitigate_readout(counts: Mapping[str, int] | np.ndarray, m: np.ndarray) -> np.ndarray:
    """Undo assignment errors: solve ``M p = f``, clip negatives, renormalize.

    ``counts`` is either a bitstring histogram or a frequency vector.
    """
    dim = m.shape[0]
    if isinstance(counts, Mapping):
        f = np.zeros(dim)
        for k, v in counts.items():
            f[int(k, 2)] += v
    else:
        f = np.asarray(counts, dtype=float).copy()
    total = f.sum()
    if total <= 0:
        raise ValidationError("empty histogram")
    f = f / total
    if abs(np.linalg.det(m)) < 1e-12:
        raise ValidationError("confusion matrix is singular")
    p = np.linalg.solve(m, f)
    p = np.clip(p, 0.0, None)
    return p / p.sum()
