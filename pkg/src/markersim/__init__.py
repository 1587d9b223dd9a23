"""Marker and half-marker codes over 4-ary IDS channels.

Encoders, exact and banded forward-backward soft decoding, LDPC
concatenation, and Monte Carlo estimation of achievable rates and error
rates.
"""

from .alphabet import (
    ALPHABET_SIZE,
    bases_to_symbols,
    bits_to_symbols,
    parse_symbols,
    symbols_to_bases,
    symbols_to_bits,
)
from .channel import ChannelParams, RngSeed, transmit
from .fb import (
    APOSTERIORI,
    EXTRINSIC,
    LLR_MAX,
    DecodeFailure,
    FbResult,
    LatticeConfig,
    bit_posteriors,
    fb_decode,
    fb_decode_full,
    lattice_posteriors,
    posteriors_to_llrs,
    priors_from_layout,
)
from .ldpc import (
    BpResult,
    LdpcCode,
    bp_decode,
    gallager_construct,
    ldpc_encode,
    load_code,
    save_code,
)
from .marker import (
    HALF,
    STANDARD,
    CodewordLayout,
    MarkerSpec,
    build_layout,
    encode,
    rate,
)
from .metrics import (
    DEFAULT_FRAME_BITS,
    HistogramSpec,
    LabeledLlrSamples,
    RateEstimate,
    achievable_rate,
    estimate_mi,
    histogram_entropy,
    mi_campaign,
)
from .pipeline import (
    ErrorRates,
    Schedule,
    TrialResult,
    estimate_error_rates,
    parse_schedule,
    run_ber_point,
    run_concatenated_trial,
    run_ser_point,
    run_uncoded_trial,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABET_SIZE",
    "APOSTERIORI",
    "BpResult",
    "ChannelParams",
    "CodewordLayout",
    "DEFAULT_FRAME_BITS",
    "DecodeFailure",
    "ErrorRates",
    "EXTRINSIC",
    "FbResult",
    "HALF",
    "HistogramSpec",
    "LabeledLlrSamples",
    "LatticeConfig",
    "LdpcCode",
    "LLR_MAX",
    "MarkerSpec",
    "RateEstimate",
    "RngSeed",
    "STANDARD",
    "Schedule",
    "TrialResult",
    "achievable_rate",
    "bases_to_symbols",
    "bit_posteriors",
    "bits_to_symbols",
    "bp_decode",
    "build_layout",
    "encode",
    "estimate_error_rates",
    "estimate_mi",
    "fb_decode",
    "fb_decode_full",
    "gallager_construct",
    "histogram_entropy",
    "lattice_posteriors",
    "ldpc_encode",
    "load_code",
    "mi_campaign",
    "parse_symbols",
    "posteriors_to_llrs",
    "priors_from_layout",
    "rate",
    "run_ber_point",
    "run_concatenated_trial",
    "run_ser_point",
    "run_uncoded_trial",
    "save_code",
    "symbols_to_bases",
    "symbols_to_bits",
    "transmit",
]
