"""Capacity regions and timing codes for noise-free half-duplex line
networks with two sources."""

from .model import (
    IDLE,
    Alphabet,
    BlockInput,
    InvalidInputError,
    NetworkTopology,
    Symbol,
    evaluate_block,
    link_output,
    sink_output,
    tx,
)
from .entropy import (
    ConditionalPmf,
    Pmf,
    binary_entropy,
    conditional_output_entropy,
    entropy,
    sink_entropy,
)
from .regions import (
    ChainDistributionT1,
    ChainDistributionT2,
    ConstraintPoint,
    RateRegion,
    SearchConfig,
    example_region_point,
    frontier,
    maximize_t1_region,
    maximize_t2_region,
    t1_constraints,
    t2_constraints,
    time_sharing_region_example,
)
from .codec import (
    AmbiguityError,
    DecodeError,
    ErasureCodebook,
    InfeasibleError,
    PatternCodebook,
    PipelineCodec,
    PipelineTrace,
    TxPattern,
    asymptotic_rate_target,
    build_adapted_codebook,
    build_last_relay_codebook,
    codebook_rate,
    erasure_failure_rate,
    run_pipeline,
)

__all__ = [name for name in dir() if not name.startswith("_")]
