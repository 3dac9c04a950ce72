import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mbsim.circuits import uyx_double_cnot
from mbsim.gates import Circuit, cx, cy, cz, delay, rx, rz, zx
from mbsim.pulses import (
    DEFAULT_CALIBRATION,
    GRANULARITY,
    GaussianSquarePulse,
    build_zx_schedule,
    compare_schedules,
    compile_circuit,
    gaussian_area,
    make_pulse,
    numeric_area,
    pulse_area,
    sampled_area,
    scale_cr,
    scale_rotary,
)
from mbsim.simcore import ValidationError

pulse_st = st.builds(
    make_pulse,
    st.floats(0.01, 1.0),
    st.floats(8.0, 80.0),
    st.floats(0.0, 600.0),
    st.sampled_from([1.0, 2.0, 3.0]),
)


@given(pulse_st)
def test_closed_form_area_matches_samples(p):
    assert numeric_area(p) == pytest.approx(pulse_area(p), rel=5e-3)


@given(st.builds(make_pulse, st.floats(0.01, 1.0), st.floats(32.0, 128.0), st.floats(0.0, 600.0), st.just(2.0)))
def test_played_samples_carry_the_area(p):
    assert sampled_area(p) == pytest.approx(pulse_area(p), rel=5e-3)


@given(pulse_st)
def test_durations_are_quantized_and_cover_the_support(p):
    assert p.duration % GRANULARITY == 0
    assert p.support <= p.duration < p.support + GRANULARITY


@given(st.floats(0.05, np.pi))
def test_scaled_area_is_proportional_to_angle(theta):
    cal = DEFAULT_CALIBRATION
    p = scale_cr(theta, cal)
    assert pulse_area(p) == pytest.approx(theta / (np.pi / 2) * cal.reference_area, rel=1e-9)
    assert np.angle(p.amplitude) == pytest.approx(np.angle(cal.cr_amp))


def test_calibrated_angle_returns_calibrated_pulse():
    assert scale_cr(np.pi / 2) == DEFAULT_CALIBRATION.cr


def test_width_and_amplitude_branches_meet():
    cal = DEFAULT_CALIBRATION
    flanks = gaussian_area(abs(cal.cr_amp), cal.sigma, cal.n_sigma)
    theta_b = flanks / cal.reference_area * np.pi / 2
    below, above = scale_cr(theta_b * (1 - 1e-12)), scale_cr(theta_b * (1 + 1e-12))
    assert abs(below.amplitude) == pytest.approx(abs(above.amplitude), abs=1e-9)
    assert above.width == pytest.approx(0.0, abs=1e-9)
    assert pulse_area(below) == pytest.approx(pulse_area(above), rel=1e-9)


def test_rotary_follows_cr_shape():
    cr, rot = scale_cr(0.4), scale_rotary(0.4)
    assert cr.width == rot.width and cr.duration == rot.duration
    assert abs(rot.amplitude) / abs(cr.amplitude) == pytest.approx(abs(DEFAULT_CALIBRATION.rotary_amp) / abs(DEFAULT_CALIBRATION.cr_amp))


def test_pulse_validation():
    with pytest.raises(ValidationError):
        GaussianSquarePulse(100, 0.1, 10.0)
    with pytest.raises(ValidationError):
        make_pulse(1.5, 10.0)
    with pytest.raises(ValidationError):
        scale_cr(0.0)


def test_zx_schedule_structure():
    s = build_zx_schedule(0.7)
    assert s.single_qubit_pulse_count() == 3
    assert len(list(s.plays("u"))) == 2
    assert s.duration % GRANULARITY == 0


def test_pulse_efficient_uyx_is_shorter_than_double_cnot():
    theta = 0.7
    a = build_zx_schedule(theta)
    b = compile_circuit(uyx_double_cnot(theta))
    r = compare_schedules(a, b)
    assert r["duration_ratio"] < 1 and r["cr_area_ratio"] < 1


def test_compile_handles_every_gate_kind():
    c = Circuit(2, [rx(0, 0.3), rz(1, 0.2), cx(0, 1), cy(1, 0), cz(0, 1), zx(0, 1, -0.4), delay((0,), 10.0)])
    s = compile_circuit(c)
    assert s.duration > 0
    doc = json.loads(s.to_json())
    assert set(doc["channels"]) >= {"d0", "d1", "u01", "u10"}
    assert s.to_text().count("play") == sum(len([r for r in v if r["kind"] == "play"]) for v in doc["channels"].values())


def test_channels_never_overlap():
    s = compile_circuit(uyx_double_cnot(1.2) + uyx_double_cnot(0.3))
    for ch, insts in s.channels.items():
        plays = sorted((i.start, i.end) for i in insts if hasattr(i, "pulse"))
        for (a0, a1), (b0, b1) in zip(plays, plays[1:]):
            assert b0 >= a1
