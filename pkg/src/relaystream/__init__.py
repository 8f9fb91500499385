"""Streaming codes for three-node relay networks under burst erasures."""

from .params import (
    CodeParams,
    Regime,
    RegimeTag,
    ZeroRateError,
    classify,
    constraint_divisible,
    constraint_extended,
    constraint_sr2,
    constraint_sr2_sufficient,
    derive,
    infeasible_region,
    optimal_rate,
)
from .gf2 import BitMatrix, IncrementalEliminator
from .constructions import (
    DelayProfile,
    ExtendedDelayProfile,
    SubmatrixFamily,
    assemble_recovery_matrix,
    build_rd,
    build_sr,
    build_sr2,
    claimed_rd_profile,
    claimed_sr2_profile,
    claimed_sr_profile,
    family_dump,
    reduced_lemma4_block,
    reduced_lemma6_block,
)
from .channel import ErasurePattern, enumerate_single_bursts, single_burst, validate
from .codec import (
    ConstructionUnavailable,
    RelayPlan,
    TransmissionTrace,
    encode,
    oracle_recovery_times,
    plan_code,
    simulate,
)
from .verifier import coverage_scan, sweep_reports, verify_end_to_end, verify_triple

__version__ = "0.1.0"
