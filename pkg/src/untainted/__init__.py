"""Untainted puncturing of LDPC codes: pattern generation, recovery analysis
and frame-error-rate simulation."""

__version__ = "0.1.0"

from .channels import CLAMP, ChannelModel, parse_channel, sample_llr, snr_to_sigma
from .decoder import DecodeResult, EdgeLayout, decode_batch, sum_product_decode, syndrome
from .graph import (
    AlistError,
    Kind,
    NodeRef,
    TannerGraph,
    degree,
    neighborhood,
    parse_alist,
    read_alist,
    to_alist,
    write_alist,
)
from .puncturing import PuncturePattern, pattern_run_stats, random_puncture, untainted_puncture
from .recovery import (
    RecoveryClassification,
    RecoveryTree,
    bec_tree_erasure,
    build_recovery_tree,
    check_extra_check_ordering,
    classify_recovery,
    mc_tree_error,
)
from .sim import ExperimentConfig, FerPoint, run_fer, table1_stats
