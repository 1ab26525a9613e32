"""List-decoding laboratory: codes, channels, decoders, sorter and crossbar models."""

from .channel import ChannelConfig, noiseless_llrs, transmit, transmit_batch
from .costmodel import (
    cost_report,
    crossbar_widths,
    estimate_lut_gain,
    latency_cycles,
)
from .crossbar import (
    CrossbarSpec,
    RoutingViolation,
    allowed_sources,
    mux_input_totals,
    parent_of,
    route,
    verify_proposition,
)
from .decoder import (
    Candidate,
    PathState,
    SclDecoder,
    decode_sc,
    decode_scl,
    f_op,
    g_op,
    metric_update,
)
from .harness import SimConfig, run_equivalence, run_fer
from .polar import PolarCode, construct, encode
from .pruning import (
    CompareExchangeNetwork,
    SurvivorAssignment,
    build_bitonic,
    build_mvf,
    make_design_sorter,
    prune_conventional,
    prune_proposed,
    radix_select,
    verify_zero_one,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "CompareExchangeNetwork",
    "Candidate",
    "CrossbarSpec",
    "PathState",
    "PolarCode",
    "RoutingViolation",
    "SclDecoder",
    "SimConfig",
    "SurvivorAssignment",
    "allowed_sources",
    "build_bitonic",
    "build_mvf",
    "construct",
    "cost_report",
    "crossbar_widths",
    "decode_sc",
    "decode_scl",
    "encode",
    "estimate_lut_gain",
    "f_op",
    "g_op",
    "latency_cycles",
    "make_design_sorter",
    "metric_update",
    "mux_input_totals",
    "noiseless_llrs",
    "parent_of",
    "prune_conventional",
    "prune_proposed",
    "radix_select",
    "route",
    "run_equivalence",
    "run_fer",
    "transmit",
    "transmit_batch",
    "verify_proposition",
    "verify_zero_one",
]
