"""Simulation and design tools for frequency-multiplexed heralded single-photon sources."""

from .design import design_report, optimize_squeezing
from .pulses import GaussianEnvelope, heralded_photon, moments, overlap
from .quantities import ParameterError, Quantity, UnitError, convert, parse_quantity
from .simulator import HardwareParams, run_campaign
from .stats import SourceParams, p_single, p_trig_mux, purity_p1
from .visibility import JitterModel, visibility_analytic, visibility_mc

__version__ = "0.1.0"
