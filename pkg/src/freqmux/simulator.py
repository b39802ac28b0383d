"""Event-level Monte-Carlo of the frequency-multiplexed heralded source.

Each clock cycle: geometric pair numbers in N frequency bins, threshold
detection of the dispersed idlers (arrival ``G * bin_offset`` plus Gaussian
jitter), the earliest detection heralds and carves the pump, later
detections are swallowed by the detector deadtime, and the heralded bin's
signal photons survive to the output with probability ``eta_s * eta_c``.

:func:`simulate_cycle` runs that recipe literally, one cycle at a time.
:func:`sample_batch` draws the same distribution for many cycles at once:
only bins whose detector fires are materialised (each fires with the
single-bin click probability, and its detected-photon count is a thinned
geometric conditioned on >= 1).  The undetected partners of the winning bin
are drawn afterwards from their exact conditional law.  Campaigns use the
batch path.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy.stats import binomtest

from .pulses import GaussianEnvelope, heralded_photon
from .quantities import ParameterError
from .rng import chunk_generator, chunk_sizes, shard_ranges
from .stats import SourceParams, p_click

__all__ = [
    "HardwareParams",
    "CycleOutcome",
    "CycleBatch",
    "SimStats",
    "bin_layout",
    "simulate_cycle",
    "sample_batch",
    "iter_batches",
    "run_campaign",
    "write_trace_csv",
]


@dataclass(frozen=True)
class HardwareParams:
    """Physical parameters in canonical units (ps, rad/ps, ps^2).

    ``dt_d`` is the jitter standard deviation, ``dt_e`` the excitation
    amplitude-width parameter, ``delta_omega`` the full usable bandwidth.
    Deadtime is one herald per clock cycle.
    """

    G: float = 8000.0
    delta_omega: float = 2.0 * math.pi
    dt_d: float = 10.0
    tau: float = 10.0
    dt_e: float = 80.0
    omega_e: float = 0.0
    omega_p: float = 0.0
    eta_c: float = 1.0

    def __post_init__(self):
        for name in ("G", "delta_omega", "tau", "dt_e"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value}")
        if not (math.isfinite(self.dt_d) and self.dt_d >= 0):
            raise ParameterError(f"dt_d must be >= 0, got {self.dt_d}")
        for name in ("omega_e", "omega_p"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not 0.0 <= self.eta_c <= 1.0:
            raise ParameterError(f"eta_c must lie in [0, 1], got {self.eta_c}")


@dataclass(frozen=True)
class CycleOutcome:
    triggered: bool
    herald_bin: Optional[int] = None
    herald_time: Optional[float] = None
    pump_center_freq: Optional[float] = None
    output_photons: int = 0
    output_envelope: Optional[GaussianEnvelope] = None

    def __post_init__(self):
        fields_set = [self.herald_bin is not None, self.herald_time is not None]
        if self.triggered != all(fields_set) or any(fields_set) != all(fields_set):
            raise ValueError("herald fields must be present iff the cycle triggered")
        if not self.triggered and self.output_photons:
            raise ValueError("untriggered cycle cannot emit photons")


def bin_layout(delta_omega, n_bins: int) -> np.ndarray:
    """Bin centre offsets (k - (N-1)/2) * delta_omega / N, k = 0..N-1."""
    if int(n_bins) != n_bins or n_bins < 1:
        raise ParameterError(f"n_bins must be a positive integer, got {n_bins}")
    k = np.arange(n_bins)
    return (k - (n_bins - 1) / 2.0) * (delta_omega / n_bins)


def _herald_envelope(hw: HardwareParams, bin_offset, t1):
    """Signal born at the bin's true idler time, pump carved at measured t1."""
    return heralded_photon(
        hw.G * bin_offset, hw.dt_e, hw.tau, hw.G, hw.omega_e, hw.omega_p, t_meas=t1
    )


def simulate_cycle(source: SourceParams, hw: HardwareParams, rng: np.random.Generator) -> CycleOutcome:
    """One clock cycle, drawn bin by bin."""
    offsets = bin_layout(hw.delta_omega, source.n_bins)
    pairs = rng.geometric(1.0 - source.lam, size=source.n_bins) - 1
    detected = rng.binomial(pairs, source.eta_i)
    hit = np.flatnonzero(detected)
    if hit.size == 0:
        return CycleOutcome(triggered=False)
    bins = np.repeat(hit, detected[hit])
    arrivals = hw.G * offsets[bins] + hw.dt_d * rng.standard_normal(bins.size)
    first = np.lexsort((bins, arrivals))[0]
    k, t1 = int(bins[first]), float(arrivals[first])
    photons = int(rng.binomial(pairs[k], source.eta_s * hw.eta_c))
    return CycleOutcome(
        triggered=True,
        herald_bin=k,
        herald_time=t1,
        pump_center_freq=hw.omega_p + t1 / hw.G,
        output_photons=photons,
        output_envelope=_herald_envelope(hw, offsets[k], t1),
    )


@dataclass
class CycleBatch:
    """Per-cycle arrays for a block of cycles; herald fields are NaN / -1 when idle."""

    start: int
    triggered: np.ndarray
    herald_bin: np.ndarray
    herald_time: np.ndarray
    output_photons: np.ndarray
    hw: HardwareParams = field(repr=False)
    n_bins: int = 0

    def __len__(self):
        return self.triggered.size

    def output_envelopes(self) -> GaussianEnvelope:
        """Batched envelope of the triggered cycles' output photons."""
        sel = self.triggered
        offsets = bin_layout(self.hw.delta_omega, self.n_bins)[self.herald_bin[sel]]
        return _herald_envelope(self.hw, offsets, self.herald_time[sel])


DENSE_CLICK_PROB = 0.02
DENSE_MAX_BINS = 32


def _firing_bins(rng, size, n_bins, pc):
    """Bins whose idler detector fires, as (cycle, bin) pairs sorted by cycle.

    Dense regime: one Bernoulli(pc) per bin.  Sparse regime: a binomial
    count per cycle, then that many distinct bins drawn uniformly.
    """
    if pc > DENSE_CLICK_PROB or n_bins <= DENSE_MAX_BINS:
        owner, bins = np.nonzero(rng.random((size, n_bins)) < pc)
        return owner, bins
    counts = rng.binomial(n_bins, pc, size=size)
    owner = np.repeat(np.arange(size), counts)
    bins = rng.integers(n_bins, size=owner.size)
    # redraw collisions; the rule only tests equality, so by label symmetry
    # every k-subset is equally likely
    while bins.size:
        key = owner * n_bins + bins
        order = np.argsort(key, kind="stable")
        dup = np.zeros(key.size, dtype=bool)
        dup[order[1:]] = key[order[1:]] == key[order[:-1]]
        if not dup.any():
            break
        bins[dup] = rng.integers(n_bins, size=int(dup.sum()))
    return owner, bins


def sample_batch(
    source: SourceParams, hw: HardwareParams, size: int, rng: np.random.Generator, start: int = 0
) -> CycleBatch:
    """Draw ``size`` independent cycles with the same law as :func:`simulate_cycle`."""
    n = source.n_bins
    offsets = bin_layout(hw.delta_omega, n)
    pc = float(p_click(source.lam, source.eta_i))

    triggered = np.zeros(size, dtype=bool)
    herald_bin = np.full(size, -1, dtype=np.int64)
    herald_time = np.full(size, np.nan)
    photons = np.zeros(size, dtype=np.int64)
    if pc == 0.0:
        return CycleBatch(start, triggered, herald_bin, herald_time, photons, hw, n)

    owner, bins = _firing_bins(rng, size, n, pc)
    # detected photons in a firing bin: geometric thinned by eta_i, conditioned >= 1
    m = rng.geometric(1.0 - pc, size=owner.size)
    det = np.repeat(np.arange(owner.size), m)
    arrivals = hw.G * offsets[bins[det]] + hw.dt_d * rng.standard_normal(det.size)
    first = np.minimum.reduceat(arrivals, np.r_[0, np.cumsum(m)[:-1]]) if owner.size else arrivals

    order = np.lexsort((bins, first, owner))
    cyc_sorted = owner[order]
    lead = np.r_[True, cyc_sorted[1:] != cyc_sorted[:-1]] if order.size else np.zeros(0, bool)
    win = order[lead]
    cyc = owner[win]

    m_win = m[win]
    q = source.lam * (1.0 - source.eta_i)
    undetected = rng.negative_binomial(m_win + 1, 1.0 - q) if q > 0 else np.zeros_like(m_win)
    survivors = rng.binomial(m_win + undetected, source.eta_s * hw.eta_c)

    triggered[cyc] = True
    herald_bin[cyc] = bins[win]
    herald_time[cyc] = first[win]
    photons[cyc] = survivors
    return CycleBatch(start, triggered, herald_bin, herald_time, photons, hw, n)


def iter_batches(
    source: SourceParams, hw: HardwareParams, n_cycles: int, seed: int, chunks: Optional[range] = None
) -> Iterator[CycleBatch]:
    sizes = chunk_sizes(n_cycles)
    starts = np.r_[0, np.cumsum(sizes)]
    for c in chunks if chunks is not None else range(len(sizes)):
        yield sample_batch(source, hw, sizes[c], chunk_generator(seed, c), start=int(starts[c]))


def _wilson(k: int, n: int) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=0.95, method="wilson")
    return (float(ci.low), float(ci.high))


@dataclass(frozen=True)
class SimStats:
    n_cycles: int
    seed: int
    p_trig_hat: float
    p_trig_ci: tuple[float, float]
    p1_hat: float
    p1_ci: tuple[float, float]
    multi_photon_rate: float
    multi_photon_ci: tuple[float, float]
    mean_output_photons: float

    @classmethod
    def from_counts(cls, n_cycles, seed, triggered, single, multi, photons):
        return cls(
            n_cycles=n_cycles,
            seed=seed,
            p_trig_hat=triggered / n_cycles,
            p_trig_ci=_wilson(triggered, n_cycles),
            p1_hat=single / n_cycles,
            p1_ci=_wilson(single, n_cycles),
            multi_photon_rate=multi / n_cycles,
            multi_photon_ci=_wilson(multi, n_cycles),
            mean_output_photons=photons / n_cycles,
        )

    @staticmethod
    def half_width(ci) -> float:
        return (ci[1] - ci[0]) / 2.0

    def to_json(self) -> str:
        d = asdict(self)
        for key in ("p_trig_ci", "p1_ci", "multi_photon_ci"):
            d[key] = list(d[key])
        return json.dumps(d, indent=2) + "\n"


def _count(batches):
    totals = np.zeros(4, dtype=np.int64)
    for b in batches:
        totals += (
            int(b.triggered.sum()),
            int((b.output_photons == 1).sum()),
            int((b.output_photons >= 2).sum()),
            int(b.output_photons.sum()),
        )
    return totals


def run_campaign(
    source: SourceParams, hw: HardwareParams, n_cycles: int, seed: int, shards: int = 1
) -> SimStats:
    """Aggregate ``n_cycles`` cycles; the result depends only on (seed, n_cycles)."""
    if n_cycles < 1:
        raise ParameterError(f"n_cycles must be >= 1, got {n_cycles}")
    if shards < 1:
        raise ParameterError(f"shards must be >= 1, got {shards}")
    ranges = shard_ranges(len(chunk_sizes(n_cycles)), shards)
    with ThreadPoolExecutor(max_workers=shards) as pool:
        parts = pool.map(lambda r: _count(iter_batches(source, hw, n_cycles, seed, r)), ranges)
        totals = sum(parts, np.zeros(4, dtype=np.int64))
    return SimStats.from_counts(n_cycles, seed, *(int(t) for t in totals))


def write_trace_csv(source: SourceParams, hw: HardwareParams, n_cycles: int, seed: int, path) -> Path:
    """Per-cycle trace: cycle, triggered, herald_bin, t1_ps, output_photons."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "triggered", "herald_bin", "t1_ps", "output_photons"])
        for b in iter_batches(source, hw, n_cycles, seed):
            for i in range(len(b)):
                trig = bool(b.triggered[i])
                writer.writerow([
                    b.start + i,
                    int(trig),
                    int(b.herald_bin[i]) if trig else "",
                    f"{b.herald_time[i]:.6f}" if trig else "",
                    int(b.output_photons[i]),
                ])
    return path
