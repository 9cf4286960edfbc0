"""Universal linear hashing and the seeded strong extractor.

Fingerprinting and privacy amplification both reduce to one primitive: a
seeded GF(2)-linear map.  Dense seeds give the textbook universal family;
Toeplitz seeds give the same universality with rows + cols - 1 seed bits,
which is what every protocol here sends on the public channel.

The extractor is the Toeplitz / leftover-hash construction: for min-entropy
k and error eps it outputs m = k - 2*ceil(log2(1/eps)) bits from a seed of
input_len + m - 1 bits.  The (k, eps) strong-extractor guarantee is the
leftover hash lemma; the price relative to optimal constructions is only
the longer (public) seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gf2 import BitVec, Gf2Matrix, matvec, toeplitz_from_seed
from .rng import SeedStream


def ceil_log2_inv(eps) -> int:
    """Exact ceil(log2(1/eps)) for rational eps in (0, 1]."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    c = 0
    while (eps.numerator << c) < eps.denominator:
        c += 1
    return c


@dataclass(frozen=True)
class HashSpec:
    """Seeded linear hash: kind/shape plus the seed that fixes the matrix."""

    kind: str
    rows: int
    cols: int
    seed: BitVec

    def __post_init__(self) -> None:
        Gf2Matrix(self.kind, self.rows, self.cols, self.seed)  # validates seed length

    def matrix(self) -> Gf2Matrix:
        return Gf2Matrix(self.kind, self.rows, self.cols, self.seed)

    def serialize(self) -> str:
        return f"{self.kind}:{self.rows}:{self.cols}:{self.seed.to_hex()}"

    @staticmethod
    def deserialize(text: str) -> "HashSpec":
        kind, rows, cols, payload = text.split(":", 3)
        return HashSpec(kind, int(rows), int(cols), BitVec.from_hex(payload))


def hash_bits(spec: HashSpec, x: BitVec) -> BitVec:
    """Apply the seeded hash; output length = spec.rows."""
    return matvec(spec.matrix(), x)


def fresh_toeplitz(rows: int, cols: int, stream: SeedStream) -> HashSpec:
    seed_len = rows + cols - 1 if rows and cols else 0
    return HashSpec("toeplitz", rows, cols, stream.bitvec(seed_len))


def fresh_dense(rows: int, cols: int, stream: SeedStream) -> HashSpec:
    return HashSpec("dense", rows, cols, stream.bitvec(rows * cols))


@dataclass(frozen=True)
class ExtractorSpec:
    """(k, eps) strong extractor via Toeplitz hashing.

    m = k - 2*ceil(log2(1/eps)) and seed_len = input_len + m - 1; m must
    come out >= 1 or the parameters are rejected.
    """

    input_len: int
    min_entropy: int
    eps: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.min_entropy < 0 or self.min_entropy > self.input_len:
            raise ValueError(
                f"min-entropy {self.min_entropy} outside [0, {self.input_len}]"
            )
        if self.output_len < 1:
            raise ValueError(
                f"extractor output m = {self.output_len} < 1 "
                f"(k={self.min_entropy}, eps={self.eps})"
            )

    @property
    def output_len(self) -> int:
        return self.min_entropy - 2 * ceil_log2_inv(self.eps)

    @property
    def seed_len(self) -> int:
        return self.input_len + self.output_len - 1


def extract(x: BitVec, spec: ExtractorSpec, seed: BitVec) -> BitVec:
    """z = E(x, seed): Toeplitz-hash x down to spec.output_len bits."""
    if x.n != spec.input_len:
        raise ValueError(f"input has {x.n} bits, extractor wants {spec.input_len}")
    if seed.n != spec.seed_len:
        raise ValueError(f"seed has {seed.n} bits, extractor wants {spec.seed_len}")
    return matvec(toeplitz_from_seed(seed, spec.output_len, spec.input_len), x)


def tv_distance(samples, m: int) -> float:
    """Total-variation distance of the empirical distribution from uniform
    on m-bit strings.  Tabulates all 2^m cells, so m is capped at 24."""
    if m > 24:
        raise ValueError(f"m={m} too large to tabulate (cap 24)")
    counts = [0] * (1 << m)
    total = 0
    for s in samples:
        if s.n != m:
            raise ValueError(f"sample of length {s.n}, want {m}")
        counts[s.v] += 1
        total += 1
    if total == 0:
        raise ValueError("no samples")
    target = total / (1 << m)
    return sum(abs(c - target) for c in counts) / (2 * total)
