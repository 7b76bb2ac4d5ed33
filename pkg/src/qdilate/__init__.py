"""Realize quantum channels and instruments as unitaries on system + ancilla.

The library represents a dynamical map through its Hermitian dynamical
matrix, eigen-decomposes it into weighted operators, builds the corresponding
isometry on a minimal ancilla, completes it to a unitary, and verifies the
construction numerically against direct application. Instruments (labeled
sets of CP maps) get a joint unitary with sector-labeled ancilla readout,
padding for incomplete sets, and seeded outcome sampling.
"""

from .channel import (
    CanonicalDecomposition,
    DensityMatrix,
    DynamicalMap,
    KrausTerm,
    MapProperties,
    TRUNCATION_TOL,
    apply_map,
    canonical_decompose,
    check_properties,
    map_from_kraus,
    povm_effect,
    random_cptp,
    random_density,
)
from .dilation import (
    DilationUnitary,
    VerificationReport,
    build_dilation_isometry,
    build_dilation_unitary,
    simulate_via_dilation,
    verify_dilation,
)
from .errors import (
    BadRank,
    DimensionMismatch,
    Incomplete,
    NotCompletelyPositive,
    NotHermitian,
    NotIsometry,
    NotPSD,
    NotTracePreserving,
    OverComplete,
    ParseError,
    QDilateError,
    RankDeficient,
    ValidationError,
)
from .instrument import (
    COMPLETENESS_TOL,
    Instrument,
    InstrumentDilation,
    OutcomeResult,
    POST_STATE_THRESHOLD,
    Sector,
    build_instrument_dilation,
    check_completeness,
    measure_via_dilation,
    outcome_statistics,
    pad_to_complete,
    sample_outcomes,
)
from .io import (
    FORMAT_VERSION,
    decode_matrix,
    encode_matrix,
    load_channel,
    load_instrument,
    load_state,
    save_channel_spec,
    save_instrument_spec,
    save_state_spec,
)
from .linalg import (
    DEFAULT_TOL,
    CompositeIndexConvention,
    complete_to_unitary,
    dagger,
    hermitian_eig,
    kron,
    max_abs,
    partial_trace_ancilla,
    psd_sqrt,
)

__version__ = "0.1.0"

__all__ = [
    "BadRank",
    "COMPLETENESS_TOL",
    "CanonicalDecomposition",
    "CompositeIndexConvention",
    "DEFAULT_TOL",
    "DensityMatrix",
    "DilationUnitary",
    "DimensionMismatch",
    "DynamicalMap",
    "FORMAT_VERSION",
    "Incomplete",
    "Instrument",
    "InstrumentDilation",
    "KrausTerm",
    "MapProperties",
    "NotCompletelyPositive",
    "NotHermitian",
    "NotIsometry",
    "NotPSD",
    "NotTracePreserving",
    "OutcomeResult",
    "OverComplete",
    "POST_STATE_THRESHOLD",
    "ParseError",
    "QDilateError",
    "RankDeficient",
    "Sector",
    "TRUNCATION_TOL",
    "ValidationError",
    "VerificationReport",
    "apply_map",
    "build_dilation_isometry",
    "build_dilation_unitary",
    "build_instrument_dilation",
    "canonical_decompose",
    "check_completeness",
    "check_properties",
    "complete_to_unitary",
    "dagger",
    "decode_matrix",
    "encode_matrix",
    "hermitian_eig",
    "kron",
    "load_channel",
    "load_instrument",
    "load_state",
    "map_from_kraus",
    "max_abs",
    "measure_via_dilation",
    "outcome_statistics",
    "pad_to_complete",
    "partial_trace_ancilla",
    "povm_effect",
    "psd_sqrt",
    "random_cptp",
    "random_density",
    "sample_outcomes",
    "save_channel_spec",
    "save_instrument_spec",
    "save_state_spec",
    "simulate_via_dilation",
    "verify_dilation",
]
