"""Closed-form algebra on chirped Gaussian wavepackets.

An envelope stands for

    psi(t) = exp(-a t^2 + b t) * exp(-i omega0 t) * exp(i phase)

with complex ``a`` (Re a > 0), complex ``b``, real carrier ``omega0`` and a
real global phase.  Normalisation is never tracked.  The spectral convention
is ``psi~(W) = int psi(t) exp(+i W t) dt``, so with the ``exp(-i omega0 t)``
carrier, an envelope factor ``exp(-i d t)`` raises the frequency by ``d``.

Width conventions used throughout:

* ``amp_width`` -- amplitude ~ exp(-t^2 / (2 amp_width^2)) (unchirped part);
* ``intensity_std`` -- standard deviation of |psi(t)|^2 = amp_width / sqrt(2).

Fields may be numpy arrays; every operation broadcasts, which is how the
Monte-Carlo code builds thousands of envelopes at once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .quantities import ParameterError

__all__ = [
    "GaussianEnvelope",
    "Moments",
    "make_gaussian",
    "apply_gvd",
    "gate",
    "multiply",
    "shift_carrier",
    "signal_after_herald",
    "carved_pump",
    "pump_after_carve",
    "heralded_photon",
    "moments",
    "overlap",
    "dump_envelope_csv",
]


@dataclass(frozen=True)
class GaussianEnvelope:
    a: complex
    b: complex = 0j
    omega0: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not np.all(np.real(self.a) > 0):
            raise ParameterError(f"envelope is not normalizable: Re(a) = {np.real(self.a)}")

    @property
    def amp_width(self):
        return 1.0 / np.sqrt(2.0 * np.real(self.a))

    @property
    def chirp(self):
        """Linear chirp C such that the quadratic phase reads exp(-i C t^2 / 2)."""
        return 2.0 * np.imag(self.a)

    def envelope(self, t):
        """Slowly varying part exp(-a t^2 + b t + i phase), carrier excluded."""
        t = np.asarray(t)
        return np.exp(-self.a * t**2 + self.b * t + 1j * self.phase)

    def __call__(self, t):
        t = np.asarray(t)
        return self.envelope(t) * np.exp(-1j * self.omega0 * t)


@dataclass(frozen=True)
class Moments:
    center_time: float
    intensity_std_time: float
    center_freq: float
    intensity_std_freq: float
    chirp: float

    @property
    def time_bandwidth(self):
        return self.intensity_std_time * self.intensity_std_freq


def make_gaussian(amp_width, center_time=0.0, chirp=0.0, carrier=0.0) -> GaussianEnvelope:
    """exp(-(t-t0)^2/(2 w^2)) * exp(-i chirp (t-t0)^2 / 2) on a carrier."""
    if np.any(~(np.asarray(amp_width) > 0)):
        raise ParameterError(f"amp_width must be positive, got {amp_width}")
    a = 1.0 / (2.0 * np.asarray(amp_width) ** 2) + 0.5j * np.asarray(chirp)
    t0 = np.asarray(center_time, dtype=float)
    # the -a t0^2 constant only contributes scale and a global phase
    return GaussianEnvelope(a=a, b=2.0 * a * t0, omega0=carrier, phase=-np.imag(a) * t0**2)


def apply_gvd(env: GaussianEnvelope, G) -> GaussianEnvelope:
    """Propagate through a dispersive element with GVD ``G`` (ps^2).

    The spectrum about the carrier picks up exp(i G W^2 / 2).
    """
    denom = 1.0 - 2j * G * env.a
    a = env.a / denom
    b = env.b / denom
    # constant term b^2/(4a) (1 - 1/denom) and the prefactor denom^(-1/2)
    const = env.b**2 / (4.0 * env.a) * (1.0 - 1.0 / denom) - 0.5 * np.log(denom)
    return GaussianEnvelope(a=a, b=b, omega0=env.omega0, phase=env.phase + np.imag(const))


def gate(env: GaussianEnvelope, t1, tau) -> GaussianEnvelope:
    """Multiply by the real carving window exp(-(t - t1)^2 / (2 tau^2))."""
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise ParameterError(f"gate duration tau must be positive, got {tau}")
    inv = 1.0 / (2.0 * tau**2)
    return GaussianEnvelope(
        a=env.a + inv, b=env.b + 2.0 * inv * np.asarray(t1), omega0=env.omega0, phase=env.phase
    )


def multiply(env1: GaussianEnvelope, env2: GaussianEnvelope) -> GaussianEnvelope:
    """Pointwise product; carriers add (sum-frequency generation)."""
    return GaussianEnvelope(
        a=env1.a + env2.a,
        b=env1.b + env2.b,
        omega0=env1.omega0 + env2.omega0,
        phase=env1.phase + env2.phase,
    )


def shift_carrier(env: GaussianEnvelope, delta) -> GaussianEnvelope:
    return replace(env, omega0=env.omega0 + delta)


def _check_herald_args(G, **positive):
    if np.any(np.asarray(G) == 0):
        raise ParameterError("dispersion G must be non-zero")
    for name, value in positive.items():
        if np.any(~(np.asarray(value) > 0)):
            raise ParameterError(f"{name} must be positive, got {value}")


def signal_after_herald(t1, dt_e, G, omega_e) -> GaussianEnvelope:
    """Signal photon conditioned on an idler detection at ``t1``.

    exp(-t^2/(2 dt_e^2)) exp(-i (t-t1)^2/(2G)) exp(-i omega_e (t+t1)/2):
    centred on omega_e/2 - t1/G with chirp 1/G.
    """
    _check_herald_args(G, dt_e=dt_e)
    t1 = np.asarray(t1, dtype=float)
    a = 1.0 / (2.0 * np.asarray(dt_e) ** 2) + 0.5j / G
    b = 1j * t1 / G
    phase = -(t1**2) / (2.0 * G) - omega_e * t1 / 2.0
    return GaussianEnvelope(a=a, b=b, omega0=omega_e / 2.0, phase=phase)


def carved_pump(t1, tau, G, omega_p) -> GaussianEnvelope:
    """Dispersed pump exp(-i omega_p t) exp(-i t^2/(2G)) carved around ``t1``.

    The dispersed pump alone is a pure chirp and not normalizable, so the
    window is applied in closed form rather than through :func:`gate`.
    """
    _check_herald_args(G, tau=tau)
    inv = 1.0 / (2.0 * np.asarray(tau, dtype=float) ** 2)
    t1 = np.asarray(t1, dtype=float)
    return GaussianEnvelope(a=inv + 0.5j / G, b=2.0 * inv * t1, omega0=omega_p, phase=0.0 * t1)


def pump_after_carve(t1, tau, G, omega_p) -> GaussianEnvelope:
    """Carved pump after the opposite-GVD element.

    Amplitude width G/tau, chirp -1/G, centred on omega_p + t1/G.
    """
    return apply_gvd(carved_pump(t1, tau, G, omega_p), -G)


def heralded_photon(t1, dt_e, tau, G, omega_e, omega_p, t_meas=None) -> GaussianEnvelope:
    """Converted photon: signal heralded at ``t1`` times the recompressed pump.

    ``t_meas`` is the detector's reported time used to carve the pump
    (defaults to ``t1``); a mismatch shifts the output frequency by
    (t_meas - t1)/G.
    """
    if t_meas is None:
        t_meas = t1
    sig = signal_after_herald(t1, dt_e, G, omega_e)
    pump = pump_after_carve(t_meas, tau, G, omega_p)
    return multiply(sig, pump)


def moments(env: GaussianEnvelope) -> Moments:
    """Analytic first and second moments of |psi(t)|^2 and |psi~(omega)|^2."""
    ar = np.real(env.a)
    c = 1.0 / (4.0 * env.a)
    cr = np.real(c)
    return Moments(
        center_time=np.real(env.b) / (2.0 * ar),
        intensity_std_time=0.5 / np.sqrt(ar),
        center_freq=env.omega0 - np.imag(env.b * c) / cr,
        intensity_std_freq=0.5 / np.sqrt(cr),
        chirp=env.chirp,
    )


def _log_norm(env):
    ar = np.real(env.a)
    br = np.real(env.b)
    return 0.5 * np.log(np.pi / (2.0 * ar)) + br**2 / (2.0 * ar)


def overlap(env1: GaussianEnvelope, env2: GaussianEnvelope):
    """Normalized inner product <psi1|psi2>."""
    A = np.conj(env1.a) + env2.a
    B = np.conj(env1.b) + env2.b + 1j * (env1.omega0 - env2.omega0)
    log_ip = 0.5 * np.log(np.pi / A) + B**2 / (4.0 * A) + 1j * (env2.phase - env1.phase)
    return np.exp(log_ip - 0.5 * (_log_norm(env1) + _log_norm(env2)))


def dump_envelope_csv(env: GaussianEnvelope, path, n_points: int = 2001, span: float = 8.0) -> Path:
    """Write |psi(t)|^2 and the envelope phase (carrier removed) to CSV.

    The grid covers ``center_time +- span * amp_width``; intensity is scaled
    to a peak of 1.
    """
    m = moments(env)
    half = span * float(env.amp_width)
    t = np.linspace(m.center_time - half, m.center_time + half, n_points)
    psi = env.envelope(t)
    intensity = np.abs(psi) ** 2
    intensity /= intensity.max()
    phase = np.unwrap(np.angle(psi))
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ps", "intensity", "phase_rad"])
        for row in zip(t, intensity, phase):
            writer.writerow([f"{v:.10g}" for v in row])
    return path
