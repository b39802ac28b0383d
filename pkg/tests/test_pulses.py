import csv
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freqmux.pulses import (
    GaussianEnvelope,
    apply_gvd,
    carved_pump,
    dump_envelope_csv,
    gate,
    heralded_photon,
    make_gaussian,
    moments,
    multiply,
    overlap,
    pump_after_carve,
    shift_carrier,
    signal_after_herald,
)
from freqmux.quantities import ParameterError
from oracles import fft_dispersion, moments_close, numeric_moments, quad_overlap, sample, time_grid

G = 8000.0
TAU = 10.0
DT_E = 80.0
OMEGA_E = 2400.0
OMEGA_P = 1200.0


def assert_env_close(e1, e2, rtol):
    for x, y in ((e1.a, e2.a), (e1.b, e2.b)):
        assert abs(x - y) <= rtol * max(abs(y), abs(e2.a) * 1e-3)
    assert e1.omega0 == e2.omega0


# -- construction ----------------------------------------------------------

def test_make_gaussian():
    env = make_gaussian(80.0, 0.0, 0.0, OMEGA_E / 2)
    assert env.a == pytest.approx(7.8125e-5, rel=1e-15)
    assert env.b == 0
    chirped = make_gaussian(80.0, 0.0, 1 / 8000.0)
    # quadratic phase exp(-i C t^2/2) => Im(a) = C/2
    assert np.imag(chirped.a) == pytest.approx(6.25e-5, rel=1e-15)
    assert chirped.chirp == pytest.approx(1 / 8000.0, rel=1e-15)


@given(st.floats(1e-3, 1e6), st.floats(-1e3, 1e3), st.floats(-1.0, 1.0))
def test_make_gaussian_round_trip(width, t0, chirp):
    env = make_gaussian(width, t0, chirp / width**2)
    assert env.amp_width == pytest.approx(width, rel=1e-12)
    m = moments(env)
    assert m.center_time == pytest.approx(t0, rel=1e-9, abs=1e-9 * width)
    assert m.intensity_std_time == pytest.approx(width / math.sqrt(2), rel=1e-12)


@pytest.mark.parametrize("width", [0.0, -1.0])
def test_make_gaussian_rejects_bad_width(width):
    with pytest.raises(ParameterError):
        make_gaussian(width)


def test_envelope_must_be_normalizable():
    with pytest.raises(ParameterError):
        GaussianEnvelope(a=-1e-3 + 0j)
    with pytest.raises(ParameterError):
        GaussianEnvelope(a=1j)


# -- dispersion ------------------------------------------------------------

def test_gvd_zero_is_identity():
    env = make_gaussian(80.0, 12.0, 3e-5, 5.0)
    out = apply_gvd(env, 0.0)
    assert out.a == env.a and out.b == env.b and out.omega0 == env.omega0


def test_gvd_inverse_pair():
    env = make_gaussian(80.0, 37.0, 1e-4, 5.0)
    back = apply_gvd(apply_gvd(env, G), -G)
    assert_env_close(back, env, 1e-12)


def test_gvd_on_80ps_against_fft():
    env = make_gaussian(80.0)
    out = apply_gvd(env, G)
    assert out.amp_width == pytest.approx(128.06, abs=0.01)
    assert abs(np.imag(out.a)) == pytest.approx(3.811e-5, rel=1e-3)

    t, dt = time_grid(2000.0)
    psi = fft_dispersion(sample(env.a, env.b, t), dt, G)
    ok, errs = moments_close(moments(out), numeric_moments(t, psi), 1e-6)
    assert ok, errs
    # pointwise shape as well, up to the untracked normalisation
    ref = out.envelope(t)
    scale = psi[t.size // 2] / ref[t.size // 2]
    np.testing.assert_allclose(psi, scale * ref, atol=1e-9 * abs(scale))


def test_gvd_leaves_spectrum_alone():
    env = make_gaussian(50.0, 10.0, 2e-4, 0.0)
    before, after = moments(env), moments(apply_gvd(env, 3000.0))
    assert after.intensity_std_freq == pytest.approx(before.intensity_std_freq, rel=1e-12)
    assert after.center_freq == pytest.approx(before.center_freq, rel=1e-12, abs=1e-15)


# -- gating ----------------------------------------------------------------

def test_gate_narrow_window_dominates():
    wide = make_gaussian(1e7 * TAU)
    assert gate(wide, 5.0, TAU).amp_width == pytest.approx(TAU, rel=1e-5)


def test_gate_infinite_window_is_noop():
    env = make_gaussian(80.0, 3.0, 1e-4)
    out = gate(env, 17.0, math.inf)
    assert out.a == env.a and out.b == env.b


def test_gate_rejects_bad_tau():
    with pytest.raises(ParameterError):
        gate(make_gaussian(80.0), 0.0, 0.0)


def test_carved_chirped_pump():
    pump = carved_pump(0.0, TAU, G, 0.0)
    m = moments(pump)
    want = math.sqrt(0.5 * (TAU**2 / G**2 + 1 / TAU**2))
    assert m.center_freq == pytest.approx(0.0, abs=1e-15)
    assert m.intensity_std_freq == pytest.approx(want, rel=1e-12)
    assert m.intensity_std_freq == pytest.approx(0.0707, abs=1e-4)

    # FFT of the sampled chirp times window
    t, _ = time_grid(80.0)
    psi = np.exp(-1j * t**2 / (2 * G)) * np.exp(-(t**2) / (2 * TAU**2))
    ok, errs = moments_close(m, numeric_moments(t, psi), 1e-6)
    assert ok, errs


def test_gate_matches_carving_of_a_very_long_chirped_pulse():
    long_pump = make_gaussian(1e9, 0.0, 1 / G)
    via_gate = gate(long_pump, 40.0, TAU)
    direct = carved_pump(40.0, TAU, G, 0.0)
    assert via_gate.a == pytest.approx(direct.a, rel=1e-12)
    assert via_gate.b == pytest.approx(direct.b, rel=1e-12)


# -- products --------------------------------------------------------------

def test_multiply_identity_element():
    env = make_gaussian(80.0, 3.0, 1e-4, 7.0)
    unit = GaussianEnvelope(a=1e-300 + 0j)
    out = multiply(env, unit)
    assert out.a == env.a and out.b == env.b and out.omega0 == env.omega0


def test_multiply_equal_widths():
    out = multiply(make_gaussian(80.0), make_gaussian(80.0))
    assert out.amp_width == pytest.approx(80.0 / math.sqrt(2), rel=1e-14)


def test_chirps_cancel_in_conversion():
    sig = signal_after_herald(0.0, DT_E, G, OMEGA_E)
    pump = pump_after_carve(0.0, TAU, G, OMEGA_P)
    assert abs(np.imag(multiply(sig, pump).a)) < 1e-15


# -- heralding -------------------------------------------------------------

def test_signal_after_herald():
    m = moments(signal_after_herald(0.0, DT_E, G, OMEGA_E))
    assert m.center_freq == pytest.approx(OMEGA_E / 2, abs=1e-12)
    assert m.chirp == pytest.approx(1 / G, rel=1e-12)

    m80 = moments(signal_after_herald(80.0, DT_E, G, OMEGA_E))
    assert m80.center_freq - OMEGA_E / 2 == pytest.approx(-0.01, rel=1e-9)
    for t1 in (-300.0, 0.0, 80.0, 1234.0):
        m = moments(signal_after_herald(t1, DT_E, G, OMEGA_E))
        assert m.intensity_std_time == pytest.approx(80 / math.sqrt(2), rel=1e-12)


def test_signal_after_herald_validation():
    with pytest.raises(ParameterError):
        signal_after_herald(0.0, 0.0, G, OMEGA_E)
    with pytest.raises(ParameterError):
        signal_after_herald(0.0, DT_E, 0.0, OMEGA_E)


def test_pump_after_carve():
    pump = pump_after_carve(123.0, TAU, G, OMEGA_P)
    m = moments(pump)
    assert pump.amp_width == pytest.approx(G / TAU, rel=1e-12)
    assert m.intensity_std_time == pytest.approx(565.685, abs=1e-3)
    assert m.intensity_std_time == pytest.approx(570, rel=0.01)
    assert moments(pump_after_carve(80.0, TAU, G, OMEGA_P)).center_freq - OMEGA_P == pytest.approx(0.01, rel=1e-9)
    assert pump.chirp == pytest.approx(-1 / G, rel=1e-12)


def test_pump_after_carve_matches_closed_form():
    # A exp(-i(wp + t1/G) t) exp(-t^2 tau^2/(2G^2)) exp(i t^2/(2G))
    t1 = 55.0
    pump = pump_after_carve(t1, TAU, G, OMEGA_P)
    assert pump.a == pytest.approx(TAU**2 / (2 * G**2) - 0.5j / G, rel=1e-12)
    assert pump.b == pytest.approx(-1j * t1 / G, rel=1e-12)


def test_heralded_photon_design_point():
    env = heralded_photon(0.0, DT_E, TAU, G, OMEGA_E, OMEGA_P)
    kappa = 2 * np.real(env.a)
    assert kappa == pytest.approx(1.578125e-4, rel=1e-12)
    assert env.amp_width == pytest.approx(79.61, abs=0.01)
    assert 1 / (2 * env.amp_width) == pytest.approx(6.281e-3, abs=1e-6)
    assert env.omega0 == OMEGA_E / 2 + OMEGA_P


def test_heralded_photon_fft_cross_check():
    # sample signal and recompressed pump separately, multiply, compare moments
    sig = signal_after_herald(0.0, DT_E, G, 0.0)
    t, dt = time_grid(8 * 600.0)
    carved = np.exp(-1j * t**2 / (2 * G)) * np.exp(-(t**2) / (2 * TAU**2))
    pump = fft_dispersion(carved, dt, -G)
    psi = sample(sig.a, sig.b, t) * pump
    env = heralded_photon(0.0, DT_E, TAU, G, 0.0, 0.0)
    ok, errs = moments_close(moments(env), numeric_moments(t, psi), 1e-6)
    assert ok, errs


def test_heralded_photon_independent_of_t1():
    ref = heralded_photon(0.0, DT_E, TAU, G, OMEGA_E, OMEGA_P)
    for t1 in (-100.0, 137.0):
        env = heralded_photon(t1, DT_E, TAU, G, OMEGA_E, OMEGA_P)
        assert env.a == pytest.approx(ref.a, rel=1e-12)
        assert env.omega0 == ref.omega0
        assert moments(env).center_freq == pytest.approx(moments(ref).center_freq, rel=1e-12)


def test_heralding_mismatch_shifts_frequency():
    env = heralded_photon(50.0, DT_E, TAU, G, OMEGA_E, OMEGA_P, t_meas=62.0)
    assert moments(env).center_freq - (OMEGA_E / 2 + OMEGA_P) == pytest.approx(12.0 / G, rel=1e-9)


# -- moments and overlaps --------------------------------------------------

def test_moments_fourier_limited():
    m = moments(make_gaussian(80.0))
    assert m.intensity_std_time == pytest.approx(56.5685, abs=1e-4)
    assert m.intensity_std_freq == pytest.approx(8.839e-3, abs=1e-6)
    assert m.time_bandwidth == pytest.approx(0.5, rel=1e-14)


def test_pump_spectral_width():
    m = moments(pump_after_carve(0.0, TAU, G, OMEGA_P))
    assert m.intensity_std_freq == pytest.approx(0.07071, abs=1e-5)


@given(st.floats(1.0, 1e3), st.floats(1e-6, 10.0))
def test_chirped_tbp_exceeds_half(width, c):
    m = moments(make_gaussian(width, 0.0, c / width**2))
    assert m.time_bandwidth > 0.5


def test_overlap_self():
    env = heralded_photon(0.0, DT_E, TAU, G, OMEGA_E, OMEGA_P)
    assert overlap(env, env) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("dw", [0.0, 0.002, 0.01, 0.03])
def test_overlap_detuned_against_quadrature(dw):
    env = heralded_photon(0.0, DT_E, TAU, G, 0.0, 0.0)
    other = shift_carrier(env, dw)
    width = env.amp_width
    assert abs(overlap(env, other)) == pytest.approx(math.exp(-(dw**2) * width**2 / 4), rel=1e-12)
    t, _ = time_grid(8 * width)
    q = quad_overlap(t, env(t), other(t))
    assert abs(overlap(env, other)) == pytest.approx(abs(q), rel=1e-9, abs=1e-14)


def test_overlap_general_against_quadrature():
    e1 = make_gaussian(60.0, 10.0, 2e-4, 0.01)
    e2 = replace(make_gaussian(90.0, -25.0, -1e-4, 0.0), phase=0.4)
    t, _ = time_grid(8 * 90.0 + 40)
    assert overlap(e1, e2) == pytest.approx(quad_overlap(t, e1(t), e2(t)), rel=1e-9)


def test_overlap_orthogonal_limit():
    env = make_gaussian(80.0)
    assert abs(overlap(env, shift_carrier(env, 10.0))) < 1e-300


# -- properties ------------------------------------------------------------

def _detuned(width, chirp, t0, detune):
    """Width-scaled envelope; ``detune`` shifts the spectrum by detune/width."""
    env = make_gaussian(width, t0 * width, chirp / width**2)
    return replace(env, b=env.b - 1j * detune / width)


envelopes = st.builds(
    _detuned,
    st.floats(20.0, 200.0),
    st.floats(-10.0, 10.0),
    st.floats(-1.0, 1.0),
    st.floats(-3.0, 3.0),
)


@settings(max_examples=40, deadline=None)
@given(envelopes, st.floats(-0.5, 0.5), st.floats(0.1, 3.0))
def test_closure_and_inverse(env, g_scale, tau_scale):
    G_ = g_scale / np.real(env.a)
    for out in (apply_gvd(env, G_), gate(env, 1.0, tau_scale * env.amp_width), multiply(env, env)):
        assert np.real(out.a) > 0
        assert moments(out).time_bandwidth >= 0.5 * (1 - 1e-12)
    assert_env_close(apply_gvd(apply_gvd(env, G_), -G_), env, 1e-12)


@settings(max_examples=20, deadline=None)
@given(envelopes, st.floats(-0.5, 0.5))
def test_gvd_against_fft(env, g_scale):
    G_ = g_scale / np.real(env.a)
    out = apply_gvd(env, G_)
    m0, m1 = moments(env), moments(out)
    t, dt = time_grid(8 * max(env.amp_width, out.amp_width) + abs(m0.center_time) + abs(m1.center_time))
    psi = fft_dispersion(sample(env.a, env.b, t), dt, G_)
    ok, errs = moments_close(m1, numeric_moments(t, psi), 1e-6)
    assert ok, errs
    # spectral intensity is untouched by dispersion
    num_before = numeric_moments(t, sample(env.a, env.b, t))
    assert m1.intensity_std_freq == pytest.approx(num_before[3], rel=1e-9)


def test_batched_envelopes_broadcast():
    t1 = np.array([-100.0, 0.0, 137.0])
    env = heralded_photon(t1, DT_E, TAU, G, OMEGA_E, OMEGA_P, t_meas=t1 + np.array([1.0, 0.0, -2.0]))
    m = moments(env)
    np.testing.assert_allclose(m.center_freq - env.omega0, np.array([1.0, 0.0, -2.0]) / G, rtol=1e-9, atol=1e-15)


def test_dump_envelope_csv(tmp_path):
    env = heralded_photon(0.0, DT_E, TAU, G, OMEGA_E, OMEGA_P)
    path = dump_envelope_csv(env, tmp_path / "env.csv", n_points=101)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["t_ps", "intensity", "phase_rad"]
    assert len(rows) == 102
    peak = rows[51]
    assert float(peak[0]) == pytest.approx(0.0, abs=1e-9)
    assert float(peak[1]) == pytest.approx(1.0)
