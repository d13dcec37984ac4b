"""Link-level simulator for full-duplex MIMO joint data transmission
and uplink channel estimation."""

from .cancellation import CancellerConfig, PlacementStrategy
from .channel import ChannelSet, draw_channel_set
from .link import RateSample
from .montecarlo import Scheme, SweepSpec, SweepVariable, run_single, run_sweep
from .params import SystemParams, validate
from .precoder import DesignOutput, design

__all__ = [
    "CancellerConfig",
    "ChannelSet",
    "DesignOutput",
    "PlacementStrategy",
    "RateSample",
    "Scheme",
    "SweepSpec",
    "SweepVariable",
    "SystemParams",
    "design",
    "draw_channel_set",
    "run_single",
    "run_sweep",
    "validate",
]
