"""Config-driven experiment runners with reproducible CSV output.

Every runner takes a validated :class:`ExperimentConfig` and returns a
:class:`RunRecord`. The rows of a record depend only on the config and its
seed: each sweep point draws from its own stream
``SeedSequence([seed, point_index])``.

Probabilities are exact density-matrix values when ``shots == 0``;
otherwise they are estimated from seeded multinomial draws, with readout
errors applied and then mitigated.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import jsonschema
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import expm_multiply

from . import __version__
from .circuits import (
    FLAVORS,
    braid_circuit,
    chain_init,
    circuit_to_unitary,
    doublet_states,
    evolution_circuit,
    init_pm,
    prepare,
    rotated_init,
    unwind_gates,
)
from .gates import Circuit
from .models import (
    ChainModelParams,
    CouplingSchedule,
    TriJunctionParams,
    build_chain_hamiltonian,
    exact_protocol_unitary,
    rotation_unitary,
)
from .noise import EPS_CNOT_RANGE, NoiseModel, build_confusion, mitigate_readout, noisy_apply
from .pulses import DEFAULT_CALIBRATION, compare_schedules, compile_circuit
from .circuits import hamiltonian_at, trotter_step_basis, trotter_step_scaled
from .simcore import QuantumState, check_capacity, ValidationError, pauli_to_dense
from .tomo import default_thetas, error_reduction_curve

EXPERIMENTS = ("move", "braid", "track", "protect", "errorsweep", "qpt", "pulse_compile")
CSV_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The experiment config is malformed or inconsistent."""


_PROB = {"type": "number", "minimum": 0, "maximum": 0.5}
CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mbsim experiment config",
    "type": "object",
    "required": ["experiment"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": {
                    "oneOf": [
                        {"type": "number"},
                        {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                    ]
                },
                "j_max": {"type": "number", "exclusiveMinimum": 0},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "trotter_steps_per_swap": {"type": "integer", "minimum": 1},
                "n_qubits": {"type": "integer", "minimum": 1},
                "arm_length": {"type": "integer", "minimum": 1},
            },
        },
        "flavor": {"enum": ["basis", "scaled", "both"]},
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps_1q": _PROB,
                "eps_cnot": _PROB,
                "delay_rate": {"type": "number", "minimum": 0},
                "readout": {"type": "array", "items": _PROB, "minItems": 2, "maxItems": 2},
            },
        },
        "shots": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "sweep": {
            "type": "object",
            "required": ["values"],
            "additionalProperties": False,
            "properties": {
                "axis": {"type": "string"},
                "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
        },
        "options": {"type": "object"},
        "output": {"type": "string"},
    },
}

_DEFAULT_SHOTS = {"move": 1024, "braid": 8192, "qpt": 2048}
_DEFAULT_TRIALS = {"braid": 4, "qpt": 4}
_DEFAULT_AXIS = {"braid": "delay_ns", "errorsweep": "eps_cnot", "protect": "tau", "qpt": "theta"}


def _default_sweep(experiment: str) -> list[float]:
    if experiment == "braid":
        return [float(x) for x in np.arange(0, 301, 25)]
    if experiment == "errorsweep":
        return sorted(set(np.round(np.linspace(0, 0.012, 13), 6)) | {6.9e-3, 8.15e-3, 9.4e-3})
    if experiment == "protect":
        return [3.3, 6.6, 13.2]
    if experiment == "qpt":
        return [float(x) for x in default_thetas(15)]
    return []


@dataclass
class ExperimentConfig:
    experiment: str
    model: TriJunctionParams
    flavor: str
    noise: NoiseModel
    shots: int
    trials: int
    seed: int
    sweep_axis: str | None
    sweep_values: list[float]
    options: dict
    output: str | None = None
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def flavors(self) -> tuple[str, ...]:
        return FLAVORS if self.flavor == "both" else (self.flavor,)

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), default=_json_default)
        return hashlib.sha256(blob.encode()).hexdigest()

    def point_seed(self, index: int) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.seed, index])


def load_config(doc: dict | str | os.PathLike, seed: int | None = None) -> ExperimentConfig:
    """Validate a config document (dict or JSON path) and fill defaults."""
    if not isinstance(doc, dict):
        try:
            with open(doc) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    doc = dict(doc)
    if seed is not None:
        doc["seed"] = int(seed)
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match the schema: {exc.message}") from exc
    exp = doc["experiment"]
    m = dict(doc.get("model", {}))
    n_qubits = m.pop("n_qubits", 3)
    if "arm_length" in m:
        n_qubits = ChainModelParams(arm_length=m.pop("arm_length")).n_qubits
    if n_qubits != 3:
        # larger registers only exist for the chain model, which has no runner
        check_capacity(n_qubits)
        raise ConfigError("experiments run on the three-qubit model")
    if isinstance(m.get("alpha"), list):
        m["alpha"] = tuple(m["alpha"])
    try:
        model = TriJunctionParams(**m)
        noise_doc = dict(doc.get("noise", {}))
        if "readout" in noise_doc:
            noise_doc["readout"] = tuple(noise_doc["readout"])
        noise = NoiseModel(**noise_doc)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    default_flavor = {"braid": "scaled", "track": "basis", "protect": "basis"}.get(exp, "both")
    sweep = doc.get("sweep", {})
    return ExperimentConfig(
        experiment=exp,
        model=model,
        flavor=doc.get("flavor", default_flavor),
        noise=noise,
        shots=int(doc.get("shots", _DEFAULT_SHOTS.get(exp, 0))),
        trials=int(doc.get("trials", _DEFAULT_TRIALS.get(exp, 1))),
        seed=int(doc.get("seed", 0)),
        sweep_axis=sweep.get("axis", _DEFAULT_AXIS.get(exp)),
        sweep_values=[float(v) for v in sweep.get("values", _default_sweep(exp))],
        options=dict(doc.get("options", {})),
        output=doc.get("output"),
        raw=doc,
    )


@dataclass
class RunRecord:
    experiment: str
    config_hash: str
    columns: list[str]
    rows: list[dict]
    wall_time: float = 0.0
    version: str = __version__
    summary: dict = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "csv_schema_version": CSV_SCHEMA_VERSION,
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
            "wall_time_s": self.wall_time,
            "version": self.version,
        }
        return json.dumps(doc, sort_keys=True, indent=1, default=_json_default)

    def write(self, out_dir: str | os.PathLike) -> None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "results.csv"), "w", newline="") as fh:
            fh.write(self.csv_text())
        with open(os.path.join(out_dir, "run.json"), "w") as fh:
            fh.write(self.to_json())
        for name, text in sorted(self.artifacts.items()):
            with open(os.path.join(out_dir, name), "w") as fh:
                fh.write(text)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


# --------------------------------------------------------------------------
# shared measurement helpers


def _estimate(probs: np.ndarray, noise: NoiseModel, shots: int, trials: int, rng) -> np.ndarray:
    """Exact distribution, or the mean of ``trials`` mitigated histograms."""
    probs = np.clip(np.real(probs), 0, None)
    probs = probs / probs.sum()
    if shots == 0:
        return probs
    n = int(np.log2(len(probs)))
    conf = build_confusion(noise, n)
    observed = conf @ probs
    est = [mitigate_readout(rng.multinomial(shots, observed / observed.sum()), conf) for _ in range(trials)]
    return np.mean(est, axis=0)


def braid_probabilities(
    p: TriJunctionParams,
    flavor: str,
    sign: int,
    noise: NoiseModel,
    delay_ns: float = 0.0,
    shots: int = 0,
    trials: int = 1,
    rng=None,
    steps=range(6),
) -> dict[int, float]:
    """Probability of ending in ``psi_+1`` and ``psi_-1`` after the protocol.

    Each probability is the all-zeros frequency after undoing the matching
    initializer, as one would measure it on hardware.
    """
    out = {}
    for target in (1, -1):
        c = braid_circuit(p, flavor, sign=sign, target_sign=target, steps=steps, delay_ns=delay_ns)
        rho = noisy_apply(QuantumState.zero(3), c, noise)
        out[target] = float(_estimate(np.diag(rho.data), noise, shots, trials, rng)[0])
    return out


def braid_bias(probs: dict[int, float], sign: int) -> float:
    """``(P_opposite - P_same) / (P_opposite + P_same)``; +1 is a perfect braid."""
    same, opp = probs[sign], probs[-sign]
    total = same + opp
    return (opp - same) / total if total > 0 else 0.0


def exact_braid_probabilities(p: TriJunctionParams, sign: int = 1, substeps_per_unit: float = 12.0) -> dict[int, float]:
    """Noiseless, Trotter-free reference with the circuit initializers."""
    u = exact_protocol_unitary(p, substeps_per_unit=substeps_per_unit)
    psi = {s: circuit_to_unitary(init_pm(s))[:, 0] for s in (1, -1)}
    out = u @ psi[sign]
    return {t: float(abs(np.vdot(psi[t], out)) ** 2) for t in (1, -1)}


def braid_fidelity(p: TriJunctionParams, states=None, substeps_per_unit: float = 12.0) -> float:
    """``|<psi_-| U_braid |psi_+>|^2`` with exact evolution.

    ``states`` defaults to the exact doublet states of ``p``.
    """
    plus, minus = states if states is not None else doublet_states(p)
    u = exact_protocol_unitary(p, substeps_per_unit=substeps_per_unit)
    return float(abs(np.vdot(minus, u @ plus)) ** 2)


def optimize_alpha(
    tau: float,
    grid=None,
    j_max: float = 1.0,
    substeps_per_unit: float = 12.0,
) -> tuple[float, float]:
    """Intra-arm coupling maximizing the exact braid fidelity at ``tau``.

    Coarse grid search followed by a bounded scalar refinement around the
    best grid point. Returns ``(alpha, fidelity)``.
    """
    grid = np.arange(0.02, 0.6, 0.005) if grid is None else np.asarray(grid, dtype=float)

    def fid(a: float) -> float:
        return braid_fidelity(TriJunctionParams(alpha=float(a), j_max=j_max, tau=tau), substeps_per_unit=substeps_per_unit)

    vals = [fid(a) for a in grid]
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi <= lo:
        return float(grid[i]), float(vals[i])
    res = minimize_scalar(lambda a: -fid(a), bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])


# --------------------------------------------------------------------------
# runners


def _pin_j20(j):
    return (j[0], j[1], 0.0)


def run_move(cfg: ExperimentConfig) -> RunRecord:
    """First protocol step with ``J20 = 0``, scored against exact targets.

    The targets ``psi_+-(tau)`` are the initializer states evolved exactly
    through the step. Leakage is the weight outside both targets.
    """
    p = cfg.model
    u = exact_protocol_unitary(p, steps=[0])
    start = np.stack([circuit_to_unitary(init_pm(s))[:, 0] for s in (1, -1)], axis=1)
    targets = u @ start
    rot = rotation_unitary()
    rows = []
    rows.append(_move_row("exact", "ideal", 0, 0, 1.0, 0.0))
    models = [("ideal", NoiseModel.ideal()), ("noisy", cfg.noise)]
    idx = 0
    for flavor in cfg.flavors:
        tg = rot @ targets if flavor == "scaled" else targets
        circ = prepare(1, flavor) + evolution_circuit(p, flavor, steps=[0], couplings_override=_pin_j20)
        n2 = evolution_circuit(p, flavor, steps=[0], couplings_override=_pin_j20).two_qubit_count()
        for label, model in models:
            rho = noisy_apply(QuantumState.zero(3), circ, model).data
            pp = float(np.real(tg[:, 0].conj() @ rho @ tg[:, 0]))
            pm = float(np.real(tg[:, 1].conj() @ rho @ tg[:, 1]))
            if cfg.shots:
                rng = np.random.default_rng(cfg.point_seed(idx))
                draws = rng.multinomial(cfg.shots, np.clip([pp, pm, 1 - pp - pm], 0, None) / max(1e-300, pp + pm + max(0, 1 - pp - pm)))
                pp, pm = draws[0] / cfg.shots, draws[1] / cfg.shots
            idx += 1
            rows.append(_move_row(flavor, label, cfg.shots, n2, pp, pm))
    cols = ["flavor", "noise", "shots", "two_qubit_gates", "p_plus_raw", "p_minus_raw", "leakage", "p_plus", "p_minus", "bias"]
    return RunRecord("move", cfg.config_hash, cols, rows)


def _move_row(flavor, noise, shots, n2, pp, pm):
    total = pp + pm
    return {
        "flavor": flavor,
        "noise": noise,
        "shots": shots,
        "two_qubit_gates": n2,
        "p_plus_raw": pp,
        "p_minus_raw": pm,
        "leakage": 1 - total,
        "p_plus": pp / total if total else 0.0,
        "p_minus": pm / total if total else 0.0,
        "bias": (pp - pm) / total if total else 0.0,
    }


def run_braid(cfg: ExperimentConfig) -> RunRecord:
    """Full braid for both initial signs over a sweep of inserted delays."""
    p = cfg.model
    exact = {s: braid_bias(exact_braid_probabilities(p, s), s) for s in (1, -1)}
    rows = []
    idx = 0
    for flavor in cfg.flavors:
        for delay in cfg.sweep_values:
            for sign in (1, -1):
                rng = np.random.default_rng(cfg.point_seed(idx))
                idx += 1
                probs = braid_probabilities(p, flavor, sign, cfg.noise, delay, cfg.shots, cfg.trials, rng)
                rows.append(
                    {
                        "flavor": flavor,
                        "delay_ns": delay,
                        "sign": "+" if sign > 0 else "-",
                        "shots": cfg.shots,
                        "trials": cfg.trials,
                        "p_plus": probs[1],
                        "p_minus": probs[-1],
                        "subspace": probs[1] + probs[-1],
                        "bias": braid_bias(probs, sign),
                        "exact_bias": exact[sign],
                    }
                )
    cols = ["flavor", "delay_ns", "sign", "shots", "trials", "p_plus", "p_minus", "subspace", "bias", "exact_bias"]
    return RunRecord("braid", cfg.config_hash, cols, rows)


_UNROTATE = rotated_init(1).gates[len(init_pm(1).gates):]


def run_track(cfg: ExperimentConfig) -> RunRecord:
    """Distributions after steps 1-3 with the per-step unwinding gates."""
    p = cfg.model
    steps = cfg.options.get("steps", [1, 2, 3])
    if any(k not in (1, 2, 3) for k in steps):
        raise ConfigError("tracking is available after steps 1, 2 and 3 only")
    rows = []
    idx = 0
    for flavor in cfg.flavors:
        for k in steps:
            for sign in (1, -1):
                circ = prepare(sign, flavor) + evolution_circuit(p, flavor, steps=range(k))
                if flavor == "scaled":
                    circ = circ + Circuit(3, list(_UNROTATE)).inverse()
                circ = circ + unwind_gates(k)
                rho = noisy_apply(QuantumState.zero(3), circ, cfg.noise)
                rng = np.random.default_rng(cfg.point_seed(idx))
                idx += 1
                probs = _estimate(np.diag(rho.data), cfg.noise, cfg.shots, cfg.trials, rng)
                for b in range(8):
                    rows.append(
                        {
                            "flavor": flavor,
                            "step": k,
                            "sign": "+" if sign > 0 else "-",
                            "bitstring": format(b, "03b"),
                            "probability": float(probs[b]),
                        }
                    )
    return RunRecord("track", cfg.config_hash, ["flavor", "step", "sign", "bitstring", "probability"], rows)


def plateau_width(x, y, frac: float = 0.9) -> float:
    """Length of the connected region around the peak where ``y > frac * max``.

    Crossings are located by linear interpolation between samples.
    """
    x, y = np.asarray(x, float), np.asarray(y, float)
    i = int(np.argmax(y))
    level = frac * y[i]
    lo = i
    while lo > 0 and y[lo - 1] > level:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi + 1] > level:
        hi += 1
    left = x[lo] if lo == 0 else x[lo - 1] + (level - y[lo - 1]) / (y[lo] - y[lo - 1]) * (x[lo] - x[lo - 1])
    right = x[hi] if hi == len(y) - 1 else x[hi] + (y[hi] - level) / (y[hi] - y[hi + 1]) * (x[hi + 1] - x[hi])
    return float(right - left)


def run_protect(cfg: ExperimentConfig) -> RunRecord:
    """Braid fidelity against a shift of the arm-0 coupling, per protocol time."""
    if not cfg.sweep_values:
        raise ConfigError("protect needs at least one tau")
    dalphas = cfg.options.get("dalpha", [float(x) for x in np.round(np.linspace(-0.1, 0.1, 41), 6)])
    grid = cfg.options.get("alpha_grid")
    grid = None if grid is None else np.arange(*grid)
    rows, widths = [], {}
    for tau in cfg.sweep_values:
        alpha, _ = optimize_alpha(tau, grid, cfg.model.j_max)
        base = TriJunctionParams(alpha=alpha, j_max=cfg.model.j_max, tau=tau)
        states = doublet_states(base)
        curve = []
        for d in dalphas:
            pert = TriJunctionParams(alpha=(alpha + d, alpha, alpha), j_max=cfg.model.j_max, tau=tau)
            pm = braid_fidelity(pert, states)
            curve.append(pm)
            rows.append({"tau": tau, "alpha": alpha, "dalpha0": float(d), "p_minus": pm})
        widths[repr(float(tau))] = plateau_width(dalphas, curve)
    rec = RunRecord("protect", cfg.config_hash, ["tau", "alpha", "dalpha0", "p_minus"], rows)
    rec.summary["plateau_width"] = widths
    return rec


def run_errorsweep(cfg: ExperimentConfig) -> RunRecord:
    """Braid bias and subspace weight against the two-qubit error rate."""
    p = cfg.model
    rows = []
    idx = 0
    for eps in cfg.sweep_values:
        model = NoiseModel(cfg.noise.eps_1q, eps, 0.0, cfg.noise.readout)
        for flavor in cfg.flavors:
            rng = np.random.default_rng(cfg.point_seed(idx))
            idx += 1
            probs = braid_probabilities(p, flavor, 1, model, 0.0, cfg.shots, cfg.trials, rng)
            rows.append(
                {
                    "eps_cnot": eps,
                    "flavor": flavor,
                    "p_plus": probs[1],
                    "p_minus": probs[-1],
                    "bias": braid_bias(probs, 1),
                    "subspace": probs[1] + probs[-1],
                    "device_band": bool(EPS_CNOT_RANGE[0] - 1e-12 <= eps <= EPS_CNOT_RANGE[1] + 1e-12),
                }
            )
    cols = ["eps_cnot", "flavor", "p_plus", "p_minus", "bias", "subspace", "device_band"]
    return RunRecord("errorsweep", cfg.config_hash, cols, rows)


def run_qpt(cfg: ExperimentConfig) -> RunRecord:
    """Process fidelity of both ``U_yx`` constructions over an angle sweep."""
    curve = error_reduction_curve(cfg.sweep_values, cfg.noise, cfg.shots, cfg.seed, cfg.trials)
    rows = []
    for theta, red, ra, rb in curve:
        for r in (ra, rb):
            rows.append(
                {
                    "theta": theta,
                    "flavor": r.flavor,
                    "shots": r.shots,
                    "seed": r.seed,
                    "fidelity": r.fidelity,
                    "error": r.error,
                    "average_gate_fidelity": r.average_gate_fidelity,
                    "reduction": red,
                }
            )
    cols = ["theta", "flavor", "shots", "seed", "fidelity", "error", "average_gate_fidelity", "reduction"]
    return RunRecord("qpt", cfg.config_hash, cols, rows)


def trotter_slice_circuits(p: TriJunctionParams, t: float | None = None):
    """One Trotter slice of each flavor at time ``t`` (first slice midpoint by default)."""
    dt = p.tau / p.trotter_steps_per_swap
    t = dt / 2 if t is None else t
    j = CouplingSchedule(p.j_max, p.tau)(t)
    return {
        "basis": trotter_step_basis(hamiltonian_at(p, "basis", j), dt),
        "scaled": trotter_step_scaled(hamiltonian_at(p, "scaled", j), dt),
    }


def run_pulse_compile(cfg: ExperimentConfig) -> RunRecord:
    """Compile one Trotter slice in both flavors and compare the schedules."""
    cal = DEFAULT_CALIBRATION
    circuits = trotter_slice_circuits(cfg.model, cfg.options.get("time"))
    scheds = {k: compile_circuit(c, cal) for k, c in circuits.items()}
    ratios = compare_schedules(scheds["scaled"], scheds["basis"])
    rows = [
        {
            "schedule": k,
            "duration_samples": s.duration,
            "duration_ns": s.duration * cal.sample_ns,
            "cr_area": s.cr_area(),
            "two_qubit_gates": circuits[k].two_qubit_count(),
        }
        for k, s in sorted(scheds.items())
    ]
    rec = RunRecord("pulse_compile", cfg.config_hash, ["schedule", "duration_samples", "duration_ns", "cr_area", "two_qubit_gates"], rows)
    rec.summary.update(ratios)
    rec.artifacts = {f"schedule_{k}.json": s.to_json() for k, s in sorted(scheds.items())}
    return rec


RUNNERS: dict[str, Callable[[ExperimentConfig], RunRecord]] = {
    "move": run_move,
    "braid": run_braid,
    "track": run_track,
    "protect": run_protect,
    "errorsweep": run_errorsweep,
    "qpt": run_qpt,
    "pulse_compile": run_pulse_compile,
}


def run(cfg: ExperimentConfig) -> RunRecord:
    t0 = time.perf_counter()
    rec = RUNNERS[cfg.experiment](cfg)
    rec.wall_time = time.perf_counter() - t0
    return rec


# --------------------------------------------------------------------------
# chain model braid (exact, sparse)


def chain_braid_overlaps(
    c: ChainModelParams,
    tau: float,
    substeps_per_unit: float = 4.0,
) -> dict[str, float]:
    """Evolve the ``+`` chain initializer through the six-step protocol.

    Returns the overlaps with both chain initializers. Uses the fourth-order
    Magnus step on sparse matrices, one segment per protocol step.
    """
    n = c.n_qubits
    base = sp.csr_matrix(pauli_to_dense(build_chain_hamiltonian(c, (0.0, 0.0, 0.0)), n))
    bare = ChainModelParams(mu=0.0, delta=0.0, arm_length=c.arm_length)
    parts = [sp.csr_matrix(pauli_to_dense(build_chain_hamiltonian(bare, j), n)) for j in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    sched = CouplingSchedule(c.couplings[0] if c.couplings[0] else 1.0, tau)

    def h(t):
        j = sched(t)
        return base + j[0] * parts[0] + j[1] * parts[1] + j[2] * parts[2]

    psi = {s: chain_init(s, c).apply(QuantumState.zero(n)).data for s in (1, -1)}
    state = psi[1].copy()
    m = max(8, int(np.ceil(tau * substeps_per_unit)))
    dt = tau / m
    g = np.sqrt(3) / 6
    for k in range(6):
        for i in range(m):
            t = (k + i / m) * tau
            a1, a2 = h(t + (0.5 - g) * dt), h(t + (0.5 + g) * dt)
            gen = dt * (a1 + a2) / 2 - 1j * np.sqrt(3) * dt**2 / 12 * (a2 @ a1 - a1 @ a2)
            state = expm_multiply(-1j * gen, state)
    return {"plus": float(abs(np.vdot(psi[1], state)) ** 2), "minus": float(abs(np.vdot(psi[-1], state)) ** 2)}
