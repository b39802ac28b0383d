"""Heralding statistics of a frequency-multiplexed pair source.

Per bin and clock cycle the pair number is geometric, ``P(n) = (1-lam) lam**n``.
A threshold idler detector clicks with probability ``1 - (1-eta_i)**n``; each
signal photon independently reaches the output with probability ``eta_s``.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quantities import ParameterError

__all__ = [
    "SourceParams",
    "pair_pmf",
    "p_click",
    "p_trig_mux",
    "p_trig_approx",
    "p_single",
    "purity_p1",
]


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~(lam >= 0.0)) or np.any(lam >= 1.0):
        raise ParameterError(f"squeezing lambda must lie in [0, 1), got {lam}")
    return lam


def _check_eff(name, eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(~(eta >= 0.0)) or np.any(eta > 1.0):
        raise ParameterError(f"{name} must lie in [0, 1], got {eta}")
    return eta


def _check_bins(n_bins):
    n = np.asarray(n_bins)
    if np.any(n < 1) or np.any(n != np.floor(n)):
        raise ParameterError(f"n_bins must be a positive integer, got {n_bins}")
    return n.astype(float)


@dataclass(frozen=True)
class SourceParams:
    """Statistical source parameters.

    ``lam`` is the per-bin squeezing |xi|^2, ``eta_i`` the global idler
    collection efficiency, ``eta_s`` the signal-arm transmission (any
    conversion efficiency already folded in) and ``n_bins`` the number of
    frequency bins N.
    """

    lam: float
    eta_i: float
    eta_s: float
    n_bins: int

    def __post_init__(self):
        _check_lambda(self.lam)
        _check_eff("eta_i", self.eta_i)
        _check_eff("eta_s", self.eta_s)
        _check_bins(self.n_bins)


def pair_pmf(lam, n):
    """Geometric pair-number law (1 - lam) * lam**n."""
    lam = _check_lambda(lam)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ParameterError("pair number must be non-negative")
    return (1.0 - lam) * lam**n


def p_click(lam, eta_i):
    """Probability that a single bin's threshold idler detector fires."""
    lam = _check_lambda(lam)
    eta_i = _check_eff("eta_i", eta_i)
    # == 1 - (1-lam)/(1-(1-eta_i)*lam), written without cancellation
    return lam * eta_i / (1.0 - (1.0 - eta_i) * lam)


def p_trig_mux(params: SourceParams):
    """Probability that at least one of the N bins heralds."""
    pc = p_click(params.lam, params.eta_i)
    n = _check_bins(params.n_bins)
    return -np.expm1(n * np.log1p(-pc))


def p_trig_approx(params: SourceParams):
    """Large-N, small-eta_i approximation 1 - exp(-N eta_i lam)."""
    lam = _check_lambda(params.lam)
    eta_i = _check_eff("eta_i", params.eta_i)
    n = _check_bins(params.n_bins)
    return -np.expm1(-n * eta_i * lam)


def p_single(lam, eta_i, eta_s):
    """Probability that exactly one signal photon exits, given a herald.

    Closed-form sum of ``pmf(n) * (1-(1-eta_i)**n) * n*eta_s*(1-eta_s)**(n-1)``
    over n, divided by :func:`p_click`.  Undefined (raises) when no herald
    is possible.
    """
    lam = _check_lambda(lam)
    eta_i = _check_eff("eta_i", eta_i)
    eta_s = _check_eff("eta_s", eta_s)
    pc = p_click(lam, eta_i)
    if np.any(pc == 0.0):
        raise ParameterError("p_single is undefined when p_click = 0 (lambda = 0 or eta_i = 0)")
    loss_s = 1.0 - eta_s
    joint = (1.0 - lam) * eta_s * lam * (
        (1.0 - lam * loss_s) ** -2
        - (1.0 - eta_i) * (1.0 - lam * (1.0 - eta_i) * loss_s) ** -2
    )
    return joint / pc


def purity_p1(params: SourceParams):
    """Probability per clock cycle of delivering exactly one photon.

    Returns 0 where no herald is possible (lam = 0 or eta_i = 0), the limit
    of the product since p_single stays bounded.
    """
    lam = _check_lambda(params.lam)
    eta_i = _check_eff("eta_i", params.eta_i)
    eta_s = _check_eff("eta_s", params.eta_s)
    live = p_click(lam, eta_i) > 0.0
    trig = p_trig_mux(params)
    if np.all(live):
        return p_single(lam, eta_i, eta_s) * trig
    lam_b, eta_i_b, eta_s_b, trig_b, live_b = np.broadcast_arrays(lam, eta_i, eta_s, trig, live)
    out = np.zeros(lam_b.shape)
    out[live_b] = p_single(lam_b[live_b], eta_i_b[live_b], eta_s_b[live_b]) * trig_b[live_b]
    return out if out.ndim else float(out)
