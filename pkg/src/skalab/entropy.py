"""Exact Shannon-entropy computations on enumerable joint distributions.

Probabilities are exact rationals, so every entropy here is a value of the
form  q + sum_i c_i * log2(m_i)  with rational q, c_i and odd integers m_i.
``LogExpr`` keeps that form symbolically, which lets the audit suites decide
entropy identities and inequalities *exactly*: a LogExpr is zero iff its
rational part vanishes and the prime-exponent combination of its log terms
vanishes (unique factorization), and otherwise its sign is certified
numerically with generous precision headroom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import profiles
from .gf2 import BitVec
from .profiles import ComplexityProfile, all_nonempty_subsets

_FLOAT_SIGN_CUTOFF = 1e-6
_MP_DPS = 80
_MP_SIGN_CUTOFF = mpmath.mpf("1e-50")


def _factor_odd(m: int) -> dict:
    out: dict[int, int] = {}
    d = 3
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


class LogExpr:
    """Exact value  rat + sum c * log2(m)  with odd integer m >= 3."""

    __slots__ = ("rat", "terms")

    def __init__(self, rat=0, terms=None) -> None:
        self.rat = Fraction(rat)
        self.terms: dict[int, Fraction] = dict(terms) if terms else {}

    def add_log(self, m: int, coeff: Fraction) -> None:
        """Accumulate coeff * log2(m) for a positive integer m."""
        if m <= 0:
            raise ValueError(f"log2 of non-positive integer {m}")
        if coeff == 0 or m == 1:
            return
        twos = (m & -m).bit_length() - 1
        if twos:
            self.rat += coeff * twos
            m >>= twos
        if m > 1:
            c = self.terms.get(m, Fraction(0)) + coeff
            if c:
                self.terms[m] = c
            else:
                self.terms.pop(m, None)

    def __add__(self, other: "LogExpr") -> "LogExpr":
        r = LogExpr(self.rat + other.rat, self.terms)
        for m, c in other.terms.items():
            r.add_log(m, c)
        return r

    def __sub__(self, other: "LogExpr") -> "LogExpr":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "LogExpr":
        f = Fraction(factor)
        return LogExpr(self.rat * f, {m: c * f for m, c in self.terms.items()})

    def to_float(self) -> float:
        return float(self.rat) + sum(float(c) * math.log2(m) for m, c in self.terms.items())

    def is_zero(self) -> bool:
        """Exact zero test via unique factorization of the log arguments."""
        if not self.terms:
            return self.rat == 0
        if self.rat != 0:
            # rat + sum over odd primes is never 0 unless all prime weights
            # vanish, in which case terms would have to cancel exactly.
            pass
        primes: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            for p, e in _factor_odd(m).items():
                primes[p] = primes.get(p, Fraction(0)) + c * e
        return self.rat == 0 and all(w == 0 for w in primes.values())

    def sign(self) -> int:
        """Certified sign: -1, 0, or +1."""
        v = self.to_float()
        if abs(v) > _FLOAT_SIGN_CUTOFF:
            return 1 if v > 0 else -1
        if self.is_zero():
            return 0
        with mpmath.workdps(_MP_DPS):
            hv = mpmath.mpf(self.rat.numerator) / self.rat.denominator
            for m, c in self.terms.items():
                hv += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(m, 2)
            if abs(hv) > _MP_SIGN_CUTOFF:
                return 1 if hv > 0 else -1
        raise ArithmeticError("sign of LogExpr too close to zero to certify")

    def __repr__(self) -> str:
        return f"LogExpr({self.rat}, {self.terms})"


def entropy_expr(probs) -> LogExpr:
    """Exact Shannon entropy (bits) of rational point masses."""
    h = LogExpr()
    for p in probs:
        p = Fraction(p)
        if p < 0:
            raise ValueError("negative probability")
        if p == 0:
            continue
        # p * log2(1/p) = p * (log2 den - log2 num)
        h.add_log(p.denominator, p)
        h.add_log(p.numerator, -p)
    return h


@dataclass(frozen=True)
class JointDistribution:
    """Finite joint distribution of ell bit-vector variables."""

    ell: int
    support: tuple

    def __post_init__(self) -> None:
        total = Fraction(0)
        seen = set()
        for inputs, p in self.support:
            if len(inputs) != self.ell:
                raise ValueError(f"support tuple has arity {len(inputs)}, want {self.ell}")
            if not all(isinstance(b, BitVec) for b in inputs):
                raise ValueError("support entries must be BitVec tuples")
            if inputs in seen:
                raise ValueError(f"duplicate support entry {inputs}")
            seen.add(inputs)
            p = Fraction(p)
            if p <= 0:
                raise ValueError("support probabilities must be positive")
            total += p
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @staticmethod
    def from_atoms(ell: int, atoms) -> "JointDistribution":
        """Build from (inputs, prob) pairs, merging duplicate inputs."""
        acc: dict[tuple, Fraction] = {}
        for inputs, p in atoms:
            key = tuple(inputs)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(p)
        support = tuple(sorted(acc.items(), key=lambda kv: tuple((b.n, b.v) for b in kv[0])))
        return JointDistribution(ell, support)

    @staticmethod
    def uniform(ell: int, tuples) -> "JointDistribution":
        tuples = list(tuples)
        p = Fraction(1, len(tuples))
        return JointDistribution.from_atoms(ell, ((t, p) for t in tuples))

    def marginal(self, proj) -> dict:
        """Distribution of proj(inputs) as a value -> Fraction map."""
        out: dict = {}
        for inputs, p in self.support:
            key = proj(inputs)
            out[key] = out.get(key, Fraction(0)) + p
        return out

    def entropy_of(self, proj) -> LogExpr:
        return entropy_expr(self.marginal(proj).values())

    def subset_entropy(self, v) -> LogExpr:
        """Entropy of the components with (1-based) indices in v."""
        idx = sorted(v)
        if not idx:
            return LogExpr()
        return self.entropy_of(lambda t: tuple(t[i - 1] for i in idx))


def exact_profile_symbolic(dist: JointDistribution) -> dict:
    """Subset -> LogExpr entropy map (the exact entropy profile)."""
    return {s: dist.subset_entropy(s) for s in all_nonempty_subsets(dist.ell)}


def exact_profile(dist: JointDistribution) -> ComplexityProfile:
    """Shannon-entropy profile of the joint distribution.

    Subsets with exactly-rational entropy (e.g. uniform marginals on a
    power-of-two support) are stored exactly; irrational entropies are
    stored as the nearest double (well inside the documented 1e-12
    equality tolerance for float-backed values).
    """
    values = {}
    for s, expr in exact_profile_symbolic(dist).items():
        values[s] = expr.rat if not expr.terms else Fraction(expr.to_float())
    return ComplexityProfile(dist.ell, values)


def profile_is_polymatroid_exact(dist: JointDistribution) -> bool:
    """Polymatroid axioms decided exactly on the symbolic entropy profile."""
    sym = exact_profile_symbolic(dist)
    sym[frozenset()] = LogExpr()
    subsets = list(sym)
    for a in subsets:
        for b in subsets:
            if a < b and (sym[b] - sym[a]).sign() < 0:
                return False
            gap = sym[a] + sym[b] - sym[a | b] - sym[a & b]
            if gap.sign() < 0:
                return False
    return True


@dataclass
class TranscriptAudit:
    """Result of the transcript-like inequality audit."""

    residual_i: LogExpr
    residual_j: LogExpr | None
    rectangle_ok: bool
    rectangle_violations: list

    @property
    def residual_i_bits(self) -> float:
        return self.residual_i.to_float()


def transcript_inequality_audit(dist: JointDistribution, f) -> TranscriptAudit:
    """Audit I(a:b) - I(a:b|T) (and J - J(.|T) for ell=3) for T = f(inputs).

    The map f must be total on the support.  Its preimages are verified to
    be combinatorial rectangles (parallelepipeds for three parties)
    relative to the support; a failed check is reported alongside the
    residuals, which are computed either way.
    """
    if dist.ell not in (2, 3):
        raise ValueError("transcript audit supports 2 or 3 parties")
    t_of = {inputs: f(*inputs) for inputs, _ in dist.support}

    # Preimage rectangle check: the box spanned by each preimage's
    # per-coordinate projections must not capture support points mapping
    # to a different transcript.
    boxes: dict = {}
    for inputs, t in t_of.items():
        box = boxes.setdefault(t, [set() for _ in range(dist.ell)])
        for k, comp in enumerate(inputs):
            box[k].add(comp)
    violations = []
    for inputs, t in t_of.items():
        for t2, box in boxes.items():
            if t2 != t and all(comp in box[k] for k, comp in enumerate(inputs)):
                violations.append((inputs, t2))
    rectangle_ok = not violations

    def h(proj) -> LogExpr:
        return dist.entropy_of(proj)

    if dist.ell == 2:
        h_a = h(lambda tup: tup[0])
        h_b = h(lambda tup: tup[1])
        h_t = h(lambda tup: t_of[tup])
        h_at = h(lambda tup: (tup[0], t_of[tup]))
        h_bt = h(lambda tup: (tup[1], t_of[tup]))
        residual_i = h_a + h_b + h_t - h_at - h_bt
        residual_j = None
    else:
        h_a = h(lambda tup: tup[0])
        h_b = h(lambda tup: tup[1])
        h_c = h(lambda tup: tup[2])
        h_t = h(lambda tup: t_of[tup])
        h_at = h(lambda tup: (tup[0], t_of[tup]))
        h_bt = h(lambda tup: (tup[1], t_of[tup]))
        h_ct = h(lambda tup: (tup[2], t_of[tup]))
        # I(a : bc) - I(a : bc | T), grouping the last two parties.
        h_bc = h(lambda tup: (tup[1], tup[2]))
        h_bct = h(lambda tup: (tup[1], tup[2], t_of[tup]))
        residual_i = h_a + h_bc + h_t - h_at - h_bct
        residual_j = (h_a + h_b + h_c + h_t.scaled(2) - h_at - h_bt - h_ct).scaled(Fraction(1, 2))
    return TranscriptAudit(residual_i, residual_j, rectangle_ok, violations)


def conditional_entropy_bits(joint_counts: dict) -> float:
    """H(Z | T) in bits from integer counts keyed by (t, z)."""
    total = sum(joint_counts.values())
    by_t: dict = {}
    for (t, _z), c in joint_counts.items():
        by_t[t] = by_t.get(t, 0) + c
    h = 0.0
    for (t, _z), c in joint_counts.items():
        h -= (c / total) * math.log2(c / by_t[t])
    return h


def make_profile(ell: int, values: dict) -> ComplexityProfile:
    """Convenience: build a profile from {tuple-of-parties: bits}."""
    return ComplexityProfile(ell, {frozenset(k): Fraction(v) for k, v in values.items()})


__all__ = [
    "JointDistribution",
    "LogExpr",
    "TranscriptAudit",
    "conditional_entropy_bits",
    "entropy_expr",
    "exact_profile",
    "exact_profile_symbolic",
    "make_profile",
    "profile_is_polymatroid_exact",
    "transcript_inequality_audit",
]
