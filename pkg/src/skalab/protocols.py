"""Executable secret-key-agreement sessions over the public channel.

Three protocols, all one message/broadcast round:

* ``light``      linear-hash reconciliation plus a linear-hash key: the
  sender draws one Toeplitz matrix H with C(x) + ceil(log2(1/eps)) rows,
  sends the top block applied to x, and both sides keep the bottom block
  applied to x as the key.
* ``two_phase``  fingerprint reconciliation sized from the profile, then a
  hashed key material string and a seeded strong extractor squeeze the
  shared secret down to its near-uniform core.
* ``omniscience``three parties broadcast fingerprints at the canonical
  optimal Slepian-Wolf rates, jointly decode the full tuple, and distill
  the key from the tuple with the same hash-then-extract pipeline.

Every asymptotic O(log(n/eps)) term from the analysis is pinned to an
explicit, config-visible margin (see Margins).  Each party's post-decode
computation reads only (own input, transcript), so the transcript is a
complete record of everything shared; the session asserts that no
transcript payload ever equals a party input, the key material, or the key.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .channel import Channel, Transcript
from .gf2 import BitVec, matvec
from .hashext import (
    ExtractorSpec,
    HashSpec,
    ceil_log2_inv,
    extract,
    fresh_toeplitz,
    hash_bits,
)
from .profiles import cond, mutual
from .rateregion import co_lp, sw_constraints
from .reconcile import (
    STATUS_UNIQUE,
    Fingerprint,
    decode,
    encode,
    joint_candidates,
    multi_decode,
)
from .rng import SeedStream
from .sources import CorrelationModel, enumerate_candidates, sample

LIGHT = "light"
TWO_PHASE = "two_phase"
OMNISCIENCE = "omniscience"
PROTOCOLS = (LIGHT, TWO_PHASE, OMNISCIENCE)


def ceil_log2_ratio(num: int, eps) -> int:
    """Exact ceil(log2(num / eps)) for integer num >= 1, rational eps."""
    eps = Fraction(eps)
    c = 0
    while (eps.numerator << c) < num * eps.denominator:
        c += 1
    return c


@dataclass(frozen=True)
class Margins:
    """Explicit slack bits standing in for the analysis' O(log(n/eps)) terms.

    k_slack:    added to C(x,y) - C(x) when sizing the reconciliation
                fingerprint (the "+ 4 log n" of the two-phase step 1).
    phase1:     key-material length above the key target (the c' log(n/eps)
                slack of phase 1).
    deficiency: subtracted from the key-material length to get the
                extractor's min-entropy parameter (the residual deficiency
                the extractor must absorb).
    extractor_eps: error bound of the extractor itself; defaults to the
                session eps.  The extractor then loses a further
                2*ceil(log2(1/extractor_eps)) bits.
    profile_sigma: approximate-profile allowance; sessions size messages
                by C(x|y) + sigma and keys by I(x:y) - sigma.
    """

    k_slack: int
    phase1: int
    deficiency: int
    extractor_eps: Fraction | None = None
    profile_sigma: int = 0

    @staticmethod
    def defaults(n: int, eps) -> "Margins":
        return Margins(
            k_slack=(n**4 - 1).bit_length(),  # ceil(4 log2 n)
            phase1=ceil_log2_ratio(n, eps),  # ceil(log2(n/eps))
            deficiency=2 * ceil_log2_inv(eps),
        )


@dataclass(frozen=True)
class SessionConfig:
    model: CorrelationModel
    protocol: str
    eps: Fraction
    seed: int
    margins: Margins | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", Fraction(self.eps))
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must be in (0,1), got {self.eps}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        two_party = self.model.parties == 2
        if self.protocol == OMNISCIENCE:
            if two_party:
                raise ValueError("omniscience needs a three-party model")
        elif not two_party:
            raise ValueError(f"{self.protocol} needs a two-party model")
        if self.margins is None:
            object.__setattr__(self, "margins", Margins.defaults(self.model.n, self.eps))

    def extractor_eps(self) -> Fraction:
        return Fraction(self.margins.extractor_eps or self.eps)


@dataclass
class SessionOutcome:
    keys: tuple
    transcript: Transcript
    agreed: bool
    key_len: int
    comm_bits: int
    target_key_len: Fraction
    target_comm: Fraction
    decode_status: str
    payload_bits: int
    overhead_bits: int


_LEAK_CHECK_MIN_BITS = 16


def _forbid_secret_payloads(transcript: Transcript, secrets) -> None:
    # Structural guard against broadcasting a secret verbatim.  Secrets
    # shorter than 16 bits are skipped: at toy sizes a hash value can
    # coincide with an input by chance, which is not a leak.
    for rec in transcript.records:
        for s in secrets:
            if s is not None and s.n >= _LEAK_CHECK_MIN_BITS and rec.payload == s:
                raise AssertionError(
                    f"transcript record {rec.kind!r} leaks a secret verbatim"
                )


# ---------------------------------------------------------------------------
# Light protocol
# ---------------------------------------------------------------------------


def light_dimensions(config: SessionConfig, profile):
    """(n1, k_used, q_rows, key_rows) for the light protocol."""
    sigma = config.margins.profile_sigma
    xlen = config.model.input_len
    n1 = int(profile.c({1}))
    k_true = int(cond(profile, {1}, {2}))
    k_used = min(k_true + sigma, n1)
    q_rows = k_used + ceil_log2_inv(config.eps) if k_used > 0 else 0
    key_rows = n1 - k_used
    if key_rows < 1:
        raise ValueError("light protocol margins leave no key bits")
    if n1 > xlen:
        raise ValueError("profile claims more complexity than input bits")
    return n1, k_used, q_rows, key_rows


def light_party_key(config: SessionConfig, party: int, own: BitVec, transcript: Transcript):
    """Party's post-decode computation from its input and the transcript."""
    profile = _analytic(config)
    _n1, k_used, q_rows, key_rows = light_dimensions(config, profile)
    xlen = config.model.input_len
    seed = transcript.one("hash_spec", sender=1).payload
    h = HashSpec("toeplitz", q_rows + key_rows, xlen, seed).matrix()
    h2 = h.row_block(q_rows, q_rows + key_rows)
    q = transcript.one("fingerprint", sender=1).payload
    if party == 1:
        return matvec(h2, own), STATUS_UNIQUE
    candidates = enumerate_candidates(config.model, party, own)
    if q_rows == 0:
        found = list(candidates)
        if len(found) != 1:
            return None, "ambiguous" if found else "not_found"
        return matvec(h2, found[0]), STATUS_UNIQUE
    h1 = HashSpec("toeplitz", q_rows, xlen, seed.slice(0, q_rows + xlen - 1))
    fp = Fingerprint(h1, q, k_used, config.eps)
    res = decode(fp, candidates)
    if res.status != STATUS_UNIQUE:
        return None, res.status
    return matvec(h2, res.value), STATUS_UNIQUE


def _analytic(config: SessionConfig):
    from .sources import analytic_profile

    return analytic_profile(config.model)


def run_light(config: SessionConfig, input_stream: SeedStream | None, public_stream: SeedStream, instance=None) -> SessionOutcome:
    inst = instance if instance is not None else sample(config.model, input_stream)
    x, y = inst.inputs
    profile = inst.profile
    n1, k_used, q_rows, key_rows = light_dimensions(config, profile)
    xlen = config.model.input_len

    channel = Channel()
    channel.next_round()
    spec = fresh_toeplitz(q_rows + key_rows, xlen, public_stream.child("light", "H"))
    q = matvec(spec.matrix().row_block(0, q_rows), x) if q_rows else BitVec(0, 0)
    channel.broadcast(1, "hash_spec", spec.seed)
    channel.broadcast(1, "fingerprint", q)
    transcript = channel.close()

    key_a, status_a = light_party_key(config, 1, x, transcript)
    key_b, status_b = light_party_key(config, 2, y, transcript)
    agreed = status_a == status_b == STATUS_UNIQUE and key_a == key_b
    _forbid_secret_payloads(transcript, (x, y, key_a, key_b))

    k_true = int(cond(profile, {1}, {2}))
    return SessionOutcome(
        keys=(key_a, key_b),
        transcript=transcript,
        agreed=agreed,
        key_len=key_rows,
        comm_bits=transcript.total_bits(),
        target_key_len=mutual(profile, {1}, {2}),
        target_comm=Fraction(k_true + (ceil_log2_inv(config.eps) if k_true else 0)),
        decode_status=status_b,
        payload_bits=transcript.payload_bits(),
        overhead_bits=transcript.overhead_bits(),
    )


# ---------------------------------------------------------------------------
# Two-phase protocol
# ---------------------------------------------------------------------------


def two_phase_dimensions(config: SessionConfig, profile):
    """(k_fp, k_material, extractor spec) for the two-phase protocol."""
    m = config.margins
    xlen = config.model.input_len
    c_xy = profile.c({1, 2})
    c_x = profile.c({1})
    i_xy = mutual(profile, {1}, {2})
    k_fp = int(c_xy - c_x) + m.k_slack + m.profile_sigma
    k_fp = max(0, min(k_fp, xlen))
    k_material = int(i_xy) - m.profile_sigma + m.phase1
    if k_material < 1:
        raise ValueError("two-phase margins leave no key material")
    ext = ExtractorSpec(
        input_len=k_material,
        min_entropy=k_material - m.deficiency,
        eps=config.extractor_eps(),
    )
    return k_fp, k_material, ext


def two_phase_party_key(config: SessionConfig, party: int, own: BitVec, transcript: Transcript):
    profile = _analytic(config)
    k_fp, k_material, ext = two_phase_dimensions(config, profile)
    xlen = config.model.input_len
    fp_seed = transcript.one("fp_spec", sender=1).payload
    fp_value = transcript.one("fingerprint", sender=1).payload
    keymat_seed = transcript.one("keymat_spec", sender=1).payload
    ext_seed = transcript.one("ext_seed", sender=1).payload

    if party == 1:
        x = own
        status = STATUS_UNIQUE
    else:
        fp = Fingerprint(
            HashSpec("toeplitz", fp_value.n, xlen, fp_seed), fp_value, k_fp, config.eps
        )
        res = decode(fp, enumerate_candidates(config.model, party, own))
        if res.status != STATUS_UNIQUE:
            return None, res.status, None
        x = res.value
        status = STATUS_UNIQUE
    keymat_spec = HashSpec("toeplitz", k_material, xlen, keymat_seed)
    z_tilde = hash_bits(keymat_spec, x)
    z = extract(z_tilde, ext, ext_seed)
    return z, status, z_tilde


def run_two_phase(config: SessionConfig, input_stream: SeedStream | None, public_stream: SeedStream, instance=None) -> SessionOutcome:
    inst = instance if instance is not None else sample(config.model, input_stream)
    x, y = inst.inputs
    profile = inst.profile
    k_fp, k_material, ext = two_phase_dimensions(config, profile)
    xlen = config.model.input_len

    channel = Channel()
    channel.next_round()
    fp = encode(x, k_fp, config.eps, public_stream.child("two_phase", "fp"))
    channel.broadcast(1, "fp_spec", fp.spec.seed)
    channel.broadcast(1, "fingerprint", fp.value)
    keymat = fresh_toeplitz(k_material, xlen, public_stream.child("two_phase", "keymat"))
    channel.broadcast(1, "keymat_spec", keymat.seed)
    s = public_stream.child("two_phase", "ext").bitvec(ext.seed_len)
    channel.broadcast(1, "ext_seed", s)
    transcript = channel.close()

    key_a, status_a, zt_a = two_phase_party_key(config, 1, x, transcript)
    key_b, status_b, _zt_b = two_phase_party_key(config, 2, y, transcript)
    agreed = status_a == status_b == STATUS_UNIQUE and key_a == key_b
    _forbid_secret_payloads(transcript, (x, y, zt_a, key_a, key_b))

    return SessionOutcome(
        keys=(key_a, key_b),
        transcript=transcript,
        agreed=agreed,
        key_len=ext.output_len,
        comm_bits=transcript.total_bits(),
        target_key_len=mutual(profile, {1}, {2}),
        target_comm=cond(profile, {1}, {2}),
        decode_status=status_b,
        payload_bits=transcript.payload_bits(),
        overhead_bits=transcript.overhead_bits(),
    )


# ---------------------------------------------------------------------------
# Omniscience protocol
# ---------------------------------------------------------------------------


def omniscience_dimensions(config: SessionConfig, profile):
    """(per-party rates, CO, key capacity, key-material len, extractor)."""
    m = config.margins
    region = sw_constraints(profile)
    co_total, rates = co_lp(region)
    ints = rates.ceil()
    key_cap = profile.c(profile.full()) - co_total
    k_material = int(key_cap) + m.phase1  # key capacities here are integral
    if k_material < 1:
        raise ValueError("omniscience margins leave no key material")
    ext = ExtractorSpec(
        input_len=k_material,
        min_entropy=k_material - m.deficiency,
        eps=config.extractor_eps(),
    )
    return ints, co_total, key_cap, k_material, ext


def omniscience_party_key(config: SessionConfig, party: int, own: BitVec, transcript: Transcript):
    profile = _analytic(config)
    ints, _co, _cap, k_material, ext = omniscience_dimensions(config, profile)
    xlen = config.model.input_len
    c = ceil_log2_inv(config.eps)
    fps = []
    for i in range(1, config.model.parties + 1):
        seed = transcript.one("fp_spec", sender=i).payload
        value = transcript.one("fingerprint", sender=i).payload
        fps.append(
            Fingerprint(HashSpec("toeplitz", ints[i - 1] + c, xlen, seed), value, ints[i - 1], config.eps)
        )
    res = multi_decode(own, party, fps, joint_candidates(config.model, party, own, fps))
    if res.status != STATUS_UNIQUE:
        return None, res.status, None
    packed = res.value[0]
    for comp in res.value[1:]:
        packed = packed.concat(comp)
    keymat_seed = transcript.one("keymat_spec", sender=1).payload
    keymat = HashSpec("toeplitz", k_material, packed.n, keymat_seed)
    z_tilde = hash_bits(keymat, packed)
    z = extract(z_tilde, ext, transcript.one("ext_seed", sender=1).payload)
    return z, STATUS_UNIQUE, z_tilde


def run_omniscience(config: SessionConfig, input_stream: SeedStream | None, public_stream: SeedStream, instance=None) -> SessionOutcome:
    inst = instance if instance is not None else sample(config.model, input_stream)
    profile = inst.profile
    ints, co_total, key_cap, k_material, ext = omniscience_dimensions(config, profile)
    xlen = config.model.input_len
    parties = config.model.parties

    channel = Channel()
    channel.next_round()
    for i in range(1, parties + 1):
        fp = encode(inst.inputs[i - 1], ints[i - 1], config.eps, public_stream.child("omni", "fp", i))
        channel.broadcast(i, "fp_spec", fp.spec.seed)
        channel.broadcast(i, "fingerprint", fp.value)
    keymat = fresh_toeplitz(k_material, parties * xlen, public_stream.child("omni", "keymat"))
    channel.broadcast(1, "keymat_spec", keymat.seed)
    s = public_stream.child("omni", "ext").bitvec(ext.seed_len)
    channel.broadcast(1, "ext_seed", s)
    transcript = channel.close()

    keys = []
    statuses = []
    z_tildes = []
    for i in range(1, parties + 1):
        key, status, zt = omniscience_party_key(config, i, inst.inputs[i - 1], transcript)
        keys.append(key)
        statuses.append(status)
        z_tildes.append(zt)
    agreed = all(s == STATUS_UNIQUE for s in statuses) and len(
        {k.v for k in keys if k is not None}
    ) == 1 and all(k is not None for k in keys)
    _forbid_secret_payloads(transcript, tuple(inst.inputs) + tuple(z_tildes) + tuple(keys))

    bad = next((s for s in statuses if s != STATUS_UNIQUE), STATUS_UNIQUE)
    return SessionOutcome(
        keys=tuple(keys),
        transcript=transcript,
        agreed=agreed,
        key_len=ext.output_len,
        comm_bits=transcript.total_bits(),
        target_key_len=key_cap,
        target_comm=co_total,
        decode_status=bad,
        payload_bits=transcript.payload_bits(),
        overhead_bits=transcript.overhead_bits(),
    )


# ---------------------------------------------------------------------------
# Session driver
# ---------------------------------------------------------------------------

_RUNNERS = {LIGHT: run_light, TWO_PHASE: run_two_phase, OMNISCIENCE: run_omniscience}
_PARTY_KEYS = {LIGHT: light_party_key, TWO_PHASE: two_phase_party_key, OMNISCIENCE: omniscience_party_key}


def session_streams(config: SessionConfig, trial: int, fresh_public_seeds: bool = True):
    """Per-trial sub-streams: inputs always vary by trial; public hash and
    extractor seeds either vary too (default) or stay fixed across trials
    (secrecy audits condition on the input-dependent payloads only)."""
    master = SeedStream("skalab", config.seed)
    input_stream = master.child("session", trial, "input")
    if fresh_public_seeds:
        public_stream = master.child("session", trial, "public")
    else:
        public_stream = master.child("public", "fixed")
    return input_stream, public_stream


def run_session(config: SessionConfig, trial: int = 0, fresh_public_seeds: bool = True) -> SessionOutcome:
    input_stream, public_stream = session_streams(config, trial, fresh_public_seeds)
    return _RUNNERS[config.protocol](config, input_stream, public_stream)


def party_key_from_transcript(config: SessionConfig, party: int, own: BitVec, transcript: Transcript):
    """Recompute a party's key from (own input, transcript) alone."""
    out = _PARTY_KEYS[config.protocol](config, party, own, transcript)
    return out[0], out[1]


def with_margins(config: SessionConfig, **kwargs) -> SessionConfig:
    return replace(config, margins=replace(config.margins, **kwargs))
