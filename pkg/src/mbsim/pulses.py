"""Pulse schedules for cross-resonance gates and their area-based scaling.

Pulses are flat-top Gaussians. A pulse of width ``w`` has Gaussian flanks
truncated at ``sqrt(2) * n_sigma * sigma`` on each side of the flat top. With
that truncation the area is exactly

    area = |A| * w + |A| * sigma * sqrt(2 pi) * erf(n_sigma)

and the duration is the total support rounded up to a multiple of 16
samples. A ``ZX(theta)`` rotation is obtained from the calibrated
``CR(pi/4)`` pulse of area ``alpha*`` by targeting area
``(theta / (pi/2)) * alpha*``. Long pulses shorten the flat top. Once the
flat top is gone, the amplitude is reduced instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import ceil, erf, sqrt

import numpy as np
from scipy.integrate import quad

from .gates import Circuit
from .simcore import ValidationError

GRANULARITY = 16
SAMPLE_NS = 0.222


class CalibrationError(ValueError):
    """The requested rotation needs an amplitude beyond the AWG range."""


@dataclass(frozen=True)
class GaussianSquarePulse:
    """Flat-top Gaussian envelope on the sample grid.

    Attributes:
        duration: total length in samples (multiple of 16).
        amplitude: complex amplitude, ``|A| <= 1``.
        sigma: Gaussian width in samples.
        width: flat-top length in samples (may be fractional).
        n_sigma: flank truncation parameter.
    """

    duration: int
    amplitude: complex
    sigma: float
    width: float = 0.0
    n_sigma: float = 2.0

    def __post_init__(self):
        if self.width < 0:
            raise ValidationError("pulse width must be non-negative")
        if abs(self.amplitude) > 1 + 1e-12:
            raise ValidationError(f"|A|={abs(self.amplitude)} exceeds 1")
        if self.sigma <= 0 or self.n_sigma <= 0:
            raise ValidationError("sigma and n_sigma must be positive")
        if self.duration % GRANULARITY:
            raise ValidationError(f"duration {self.duration} is not a multiple of {GRANULARITY}")
        if self.duration < self.support - 1e-9:
            raise ValidationError("duration shorter than the pulse support")

    @property
    def flank(self) -> float:
        return sqrt(2) * self.n_sigma * self.sigma

    @property
    def support(self) -> float:
        return self.width + 2 * self.flank

    def envelope(self, t) -> np.ndarray:
        """Envelope magnitude at sample time(s) ``t``, centred in the window."""
        t = np.asarray(t, dtype=float)
        off = np.abs(t - self.duration / 2) - self.width / 2
        gauss = np.exp(-(off**2) / (2 * self.sigma**2))
        val = np.where(off <= 0, 1.0, np.where(off <= self.flank, gauss, 0.0))
        return abs(self.amplitude) * val

    def samples(self) -> np.ndarray:
        """Complex samples evaluated at the sample midpoints."""
        phase = np.exp(1j * np.angle(self.amplitude))
        return self.envelope(np.arange(self.duration) + 0.5) * phase

    def scaled(self, factor: float) -> "GaussianSquarePulse":
        return GaussianSquarePulse(self.duration, self.amplitude * factor, self.sigma, self.width, self.n_sigma)


def gaussian_area(amp: float, sigma: float, n_sigma: float) -> float:
    return amp * sigma * sqrt(2 * np.pi) * erf(n_sigma)


def pulse_area(p: GaussianSquarePulse) -> float:
    """Closed-form area ``|A| w + |A| sigma sqrt(2 pi) erf(n_sigma)``."""
    return abs(p.amplitude) * p.width + gaussian_area(abs(p.amplitude), p.sigma, p.n_sigma)


def numeric_area(p: GaussianSquarePulse) -> float:
    """Adaptive quadrature of the continuous envelope, split at the flank edges."""
    mid = p.duration / 2
    edges = [mid - p.width / 2 - p.flank, mid - p.width / 2, mid + p.width / 2, mid + p.width / 2 + p.flank]
    return float(sum(quad(lambda t: float(p.envelope(t)), a, b, epsabs=1e-12)[0] for a, b in zip(edges, edges[1:]) if b > a))


def sampled_area(p: GaussianSquarePulse) -> float:
    """Sum of the played samples; differs from the area by the sampling error."""
    return float(np.sum(np.abs(p.samples())))


def quantized_duration(width: float, sigma: float, n_sigma: float) -> int:
    support = width + 2 * sqrt(2) * n_sigma * sigma
    return int(ceil(support / GRANULARITY - 1e-12) * GRANULARITY)


def make_pulse(amplitude: complex, sigma: float, width: float = 0.0, n_sigma: float = 2.0) -> GaussianSquarePulse:
    return GaussianSquarePulse(quantized_duration(width, sigma, n_sigma), complex(amplitude), sigma, width, n_sigma)


@dataclass(frozen=True)
class CRCalibration:
    """Calibrated pulses for one control-target pair.

    The default values are a self-consistent fixture, not device data.
    ``cr`` is the ``CR(pi/4)`` pulse (half of the echoed ``ZX(pi/2)``);
    ``rotary`` is the target tone played alongside it.
    """

    cr_amp: complex = 0.25 * np.exp(0.5j)
    rotary_amp: complex = 0.05 + 0j
    sigma: float = 64.0
    width: float = 368.0
    n_sigma: float = 2.0
    x90_amp: float = 0.1
    x180_amp: float = 0.2
    sq_sigma: float = 40.0
    sq_n_sigma: float = 2.0
    sample_ns: float = SAMPLE_NS

    def __post_init__(self):
        if self.sample_ns <= 0:
            raise ValidationError("sample time must be positive")
        if self.reference_area <= 0:
            raise ValidationError("reference area must be positive")

    @property
    def cr(self) -> GaussianSquarePulse:
        return make_pulse(self.cr_amp, self.sigma, self.width, self.n_sigma)

    @property
    def rotary(self) -> GaussianSquarePulse:
        return make_pulse(self.rotary_amp, self.sigma, self.width, self.n_sigma)

    @property
    def reference_area(self) -> float:
        return abs(self.cr_amp) * self.width + gaussian_area(abs(self.cr_amp), self.sigma, self.n_sigma)

    def single_qubit(self, angle: float, phase: float = 0.0) -> GaussianSquarePulse:
        """Gaussian ``R(angle)`` pulse about an axis at ``phase`` in the XY plane."""
        amp = self.x180_amp * abs(angle) / np.pi * np.exp(1j * (phase + (np.pi if angle < 0 else 0.0)))
        return make_pulse(amp, self.sq_sigma, 0.0, self.sq_n_sigma)


DEFAULT_CALIBRATION = CRCalibration()


def _scaled_shape(theta: float, cal: CRCalibration, amp: complex) -> GaussianSquarePulse:
    target = theta / (np.pi / 2) * cal.reference_area
    flanks = gaussian_area(abs(cal.cr_amp), cal.sigma, cal.n_sigma)
    ratio = amp / cal.cr_amp  # rotary follows the CR pulse
    if target > flanks:
        width = (target - flanks) / abs(cal.cr_amp)
        return make_pulse(cal.cr_amp * ratio, cal.sigma, width, cal.n_sigma)
    mag = target / (cal.sigma * sqrt(2 * np.pi) * erf(cal.n_sigma))
    new = mag * np.exp(1j * np.angle(cal.cr_amp)) * ratio
    if abs(new) > 1:
        raise CalibrationError(f"|A|={abs(new):.3f} exceeds 1")
    return make_pulse(new, cal.sigma, 0.0, cal.n_sigma)


def scale_cr(theta: float, cal: CRCalibration = DEFAULT_CALIBRATION) -> GaussianSquarePulse:
    """CR pulse whose area is ``(theta / (pi/2))`` times the calibrated area.

    Phase of the amplitude is kept. ``theta = pi/2`` returns the calibrated
    pulse itself.
    """
    if not 0 < theta <= np.pi + 1e-12:
        raise ValidationError(f"theta={theta} outside (0, pi]")
    return _scaled_shape(theta, cal, cal.cr_amp)


def scale_rotary(theta: float, cal: CRCalibration = DEFAULT_CALIBRATION) -> GaussianSquarePulse:
    if not 0 < theta <= np.pi + 1e-12:
        raise ValidationError(f"theta={theta} outside (0, pi]")
    return _scaled_shape(theta, cal, cal.rotary_amp)


# --------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Play:
    start: int
    pulse: GaussianSquarePulse

    @property
    def end(self) -> int:
        return self.start + self.pulse.duration


@dataclass(frozen=True)
class ShiftPhase:
    start: int
    phase: float

    @property
    def end(self) -> int:
        return self.start


@dataclass
class PulseSchedule:
    """Per-channel, time-ordered instructions.

    Channel names: ``d<q>`` drives qubit ``q``; ``u<c><t>`` is the
    cross-resonance control channel for control ``c`` and target ``t``.
    """

    channels: dict[str, list] = field(default_factory=dict)

    def add(self, channel: str, inst) -> None:
        lst = self.channels.setdefault(channel, [])
        if isinstance(inst, Play) and lst:
            last_end = max(i.end for i in lst)
            if inst.start < last_end:
                raise ValidationError(f"overlapping pulses on {channel}")
        lst.append(inst)

    def end(self, channel: str) -> int:
        return max((i.end for i in self.channels.get(channel, [])), default=0)

    @property
    def duration(self) -> int:
        return max((self.end(ch) for ch in self.channels), default=0)

    def plays(self, prefix: str = ""):
        for ch, insts in sorted(self.channels.items()):
            if ch.startswith(prefix):
                for i in insts:
                    if isinstance(i, Play):
                        yield ch, i

    def cr_area(self) -> float:
        return sum(pulse_area(i.pulse) for _, i in self.plays("u"))

    def single_qubit_pulse_count(self) -> int:
        return sum(1 for _ in self.plays("d")) - self._rotary_count()

    def _rotary_count(self) -> int:
        return getattr(self, "_rotaries", 0)

    def to_dict(self) -> dict:
        out = {}
        for ch in sorted(self.channels):
            rows = []
            for i in self.channels[ch]:
                if isinstance(i, Play):
                    p = i.pulse
                    rows.append(
                        {
                            "start": i.start,
                            "kind": "play",
                            "d": p.duration,
                            "A_re": float(np.real(p.amplitude)),
                            "A_im": float(np.imag(p.amplitude)),
                            "sigma": float(p.sigma),
                            "w": float(p.width),
                        }
                    )
                else:
                    rows.append({"start": i.start, "kind": "shift_phase", "phase": float(i.phase)})
            out[ch] = rows
        return {"duration": self.duration, "channels": out}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_text(self) -> str:
        lines = []
        for ch, rows in self.to_dict()["channels"].items():
            for r in rows:
                if r["kind"] == "play":
                    lines.append(f"{ch} {r['start']} play {r['d']} {r['A_re']!r} {r['A_im']!r} {r['sigma']!r} {r['w']!r}")
                else:
                    lines.append(f"{ch} {r['start']} shift_phase {r['phase']!r}")
        return "\n".join(lines) + "\n"


class _Builder:
    """ASAP scheduler tracking the next free sample of every qubit."""

    def __init__(self, n: int, cal: CRCalibration):
        self.cal = cal
        self.free = [0] * n
        self.sched = PulseSchedule()
        self.sched._rotaries = 0
        # frame phase of every drive channel, advanced by virtual Z
        self.frame = [0.0] * n

    def rz(self, q: int, angle: float):
        # a Z rotation shifts the frame of later drives on this qubit
        self.frame[q] -= angle
        self.sched.add(f"d{q}", ShiftPhase(self.free[q], -angle))

    def rot(self, q: int, angle: float, axis_phase: float):
        p = self.cal.single_qubit(angle, axis_phase)
        self.sched.add(f"d{q}", Play(self.free[q], p))
        self.free[q] += p.duration

    def echoed_cr(self, c: int, t: int, theta: float):
        """``ZX(theta)``: CR(+), X180 echo on the control, CR(-)."""
        sign = 1.0 if theta >= 0 else -1.0
        mag = min(abs(theta), np.pi)
        cr = scale_cr(mag, self.cal)
        rot = scale_rotary(mag, self.cal)
        start = max(self.free[c], self.free[t])
        ch = f"u{c}{t}"
        self.sched.add(ch, Play(start, cr.scaled(sign)))
        self.sched.add(f"d{t}", Play(start, rot.scaled(sign)))
        mid = start + cr.duration
        echo = self.cal.single_qubit(np.pi)
        self.sched.add(f"d{c}", Play(mid, echo))
        second = mid + echo.duration
        self.sched.add(ch, Play(second, cr.scaled(-sign)))
        self.sched.add(f"d{t}", Play(second, rot.scaled(-sign)))
        self.sched._rotaries += 2
        end = second + cr.duration
        self.free[c] = self.free[t] = end


def build_zx_schedule(theta: float, cal: CRCalibration = DEFAULT_CALIBRATION) -> PulseSchedule:
    """Pulse-efficient ``Y_0 X_1`` rotation on qubits (0, 1).

    ``X90`` on the control, echoed CR scaled to ``theta``, and the closing
    ``X90`` merged with the echo frame: three single-qubit pulses in total.
    """
    if not 0 < theta <= np.pi + 1e-12:
        raise ValidationError(f"theta={theta} outside (0, pi]")
    b = _Builder(2, cal)
    b.rot(0, np.pi / 2, 0.0)
    b.echoed_cr(0, 1, theta)
    b.rot(0, -np.pi / 2, 0.0)
    return b.sched


def compile_circuit(circuit: Circuit, cal: CRCalibration = DEFAULT_CALIBRATION) -> PulseSchedule:
    """Lower a circuit to pulses.

    ``rz`` becomes a frame shift. ``rx`` and ``ry`` become one Gaussian
    pulse each. ``zx(theta)`` becomes a scaled echoed CR. Controlled gates
    become an unscaled echoed CR (``ZX(pi/2)``) plus a ``-pi/2`` X pulse on
    the target and frame shifts; the Y and Z variants add basis-change
    frame shifts or pulses on the target.
    """
    b = _Builder(circuit.n, cal)
    for g in circuit:
        k = g.kind
        if k == "rz":
            b.rz(g.qubits[0], g.angle)
        elif k == "rx":
            b.rot(g.qubits[0], g.angle, 0.0)
        elif k == "ry":
            b.rot(g.qubits[0], g.angle, np.pi / 2)
        elif k == "zx":
            if abs(g.angle) > 1e-12:
                b.echoed_cr(*g.qubits, g.angle)
        elif k in ("cx", "cy", "cz"):
            c, t = g.qubits
            if k == "cy":
                b.rz(t, -np.pi / 2)
            elif k == "cz":
                b.rot(t, np.pi / 2, np.pi / 2)
            b.rz(c, -np.pi / 2)
            b.echoed_cr(c, t, np.pi / 2)
            b.rot(t, -np.pi / 2, 0.0)
            if k == "cy":
                b.rz(t, np.pi / 2)
            elif k == "cz":
                b.rot(t, -np.pi / 2, np.pi / 2)
        elif k == "delay":
            for q in g.qubits:
                b.free[q] += int(ceil(g.duration / cal.sample_ns))
        else:
            raise ValidationError(f"cannot compile {k}")
    return b.sched


def compare_schedules(a: PulseSchedule, b: PulseSchedule) -> dict[str, float]:
    """Duration ratio and control-channel area ratio ``a / b``."""
    if b.duration == 0:
        raise ValidationError("reference schedule has zero duration")
    area_b = b.cr_area()
    return {
        "duration_ratio": float(a.duration / b.duration),
        "cr_area_ratio": float(a.cr_area() / area_b) if area_b > 0 else float("nan"),
    }
