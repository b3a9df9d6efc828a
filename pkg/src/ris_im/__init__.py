"""Hybrid-RIS over-the-air index modulation link simulator."""

from .codec import Codebook, State, eota_codebook, ota_codebook, rgb_codebook, spectral_efficiency
from .constellation import Constellation, build
from .engine import (BerResult, Experiment, StoppingRule, SweepSpec, figure_preset, run_point,
                     run_sweep)
from .params import (ConfigError, ConstellationKind, InactiveMode, NoisePlacement, Scheme,
                     SystemConfig, from_db, from_dbm, validate)

__version__ = "0.1.0"
