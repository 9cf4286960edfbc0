"""skalab: a secret-key-agreement protocol laboratory.

Simulates hash-based information reconciliation, Toeplitz privacy
amplification, and multi-party omniscience over a public broadcast channel
with a recording eavesdropper, next to the exact rate-region optimization
and entropy audits that certify the sessions' accounting.
"""

from .channel import Channel, Transcript, TranscriptRecord
from .entropy import (
    JointDistribution,
    LogExpr,
    exact_profile,
    transcript_inequality_audit,
)
from .gf2 import (
    BitVec,
    FieldElem,
    Gf2Matrix,
    field_add,
    field_div,
    field_inv,
    field_mul,
    irreducible_poly,
    matvec,
    rank,
    toeplitz_from_seed,
)
from .hashext import ExtractorSpec, HashSpec, ceil_log2_inv, extract, hash_bits, tv_distance
from .profiles import (
    ComplexityProfile,
    cond,
    is_polymatroid,
    multi_j,
    mutual,
    parse_profile,
    random_polymatroid,
)
from .protocols import (
    Margins,
    SessionConfig,
    SessionOutcome,
    run_light,
    run_omniscience,
    run_session,
    run_two_phase,
)
from .rateregion import RateRegion, RateTuple, co_formula3, co_lp, key_capacity, sw_constraints
from .reconcile import (
    DecodeResult,
    Fingerprint,
    decode,
    encode,
    multi_decode,
    syndrome_decode,
    syndrome_encode,
)
from .rng import SeedStream
from .sources import (
    CorrelatedInstance,
    CorrelationModel,
    analytic_profile,
    enumerate_candidates,
    parse_model_spec,
    sample,
)

__version__ = "0.1.0"
