"""Monte Carlo simulation of the binning schemes."""

from .codebook import Codebook, build_codebook
from .coding import decode_y, decode_z, encode, state_encode, transmit
from .config import SimConfig, config_from_json, load_config
from .trials import TrialReport, run_trials

__all__ = [
    "Codebook", "SimConfig", "TrialReport", "build_codebook", "config_from_json",
    "decode_y", "decode_z", "encode", "load_config", "run_trials", "state_encode", "transmit",
]
