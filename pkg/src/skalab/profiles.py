"""Complexity profiles and the information quantities derived from them.

A profile assigns a bit count C(V) to every nonempty subset V of the
parties [ell] = {1, ..., ell}; C of the empty set is 0 by convention.
Values are exact rationals (fractions.Fraction) so that half-integral
quantities such as the 1.5n omniscience rates stay exact end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .rng import SeedStream

Subset = frozenset


def all_nonempty_subsets(ell: int) -> list[frozenset]:
    out = []
    for r in range(1, ell + 1):
        out.extend(frozenset(c) for c in combinations(range(1, ell + 1), r))
    return out


def _as_subset(v, ell: int) -> frozenset:
    s = frozenset(v)
    if not all(isinstance(i, int) and 1 <= i <= ell for i in s):
        raise ValueError(f"subset {sorted(s)} out of range for ell={ell}")
    return s


@dataclass(frozen=True)
class ComplexityProfile:
    """C(x_V) for every nonempty V, in bits (exact rationals)."""

    ell: int
    values: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("need at least one party")
        want = {s for s in all_nonempty_subsets(self.ell)}
        have = set(self.values)
        if have != want:
            missing = sorted(tuple(sorted(s)) for s in want - have)
            extra = sorted(tuple(sorted(s)) for s in have - want)
            raise ValueError(f"profile subsets wrong: missing={missing} extra={extra}")
        object.__setattr__(
            self, "values", {s: Fraction(v) for s, v in self.values.items()}
        )

    def c(self, v) -> Fraction:
        """C(x_V); the empty set has complexity 0."""
        s = _as_subset(v, self.ell)
        if not s:
            return Fraction(0)
        return self.values[s]

    def full(self) -> frozenset:
        return frozenset(range(1, self.ell + 1))

    def scale(self, factor) -> "ComplexityProfile":
        f = Fraction(factor)
        return ComplexityProfile(self.ell, {s: v * f for s, v in self.values.items()})


def cond(profile: ComplexityProfile, v, w) -> Fraction:
    """Conditional complexity C(x_V | x_W) = C(x_{V u W}) - C(x_W)."""
    vs = _as_subset(v, profile.ell)
    ws = _as_subset(w, profile.ell)
    if not vs:
        raise ValueError("conditional complexity of the empty set is not defined")
    return profile.c(vs | ws) - profile.c(ws)


def mutual(profile: ComplexityProfile, v, w, given=()) -> Fraction:
    """Mutual information I(x_V : x_W | x_given) = C(V|g) + C(W|g) - C(VuW|g)."""
    vs = _as_subset(v, profile.ell)
    ws = _as_subset(w, profile.ell)
    gs = _as_subset(given, profile.ell)
    if not vs or not ws:
        raise ValueError("mutual information needs two nonempty subsets")
    if (vs | ws) & gs:
        raise ValueError("subsets must be disjoint from the conditioning set")
    return cond(profile, vs, gs) + cond(profile, ws, gs) - cond(profile, vs | ws, gs)


def multi_j(profile: ComplexityProfile, partition) -> Fraction:
    """J over a splitting: (sum_i C(x_{J_i}) - C(x_[ell])) / (s - 1)."""
    parts = [_as_subset(p, profile.ell) for p in partition]
    if len(parts) < 2:
        raise ValueError("a splitting needs at least two parts")
    if any(not p for p in parts):
        raise ValueError("splitting parts must be nonempty")
    union = frozenset().union(*parts)
    if union != profile.full() or sum(len(p) for p in parts) != profile.ell:
        raise ValueError("parts must be disjoint and cover all parties")
    s = len(parts)
    return (sum((profile.c(p) for p in parts), Fraction(0)) - profile.c(profile.full())) / (s - 1)


def is_polymatroid(profile: ComplexityProfile, tol=Fraction(0)) -> bool:
    """Monotone + submodular check (with C(empty) = 0), within tol."""
    tol = Fraction(tol) if not isinstance(tol, float) else tol
    subsets = all_nonempty_subsets(profile.ell)
    for s in subsets:
        if profile.c(s) < -tol:
            return False
    for s in subsets:
        for i in range(1, profile.ell + 1):
            if i not in s:
                if profile.c(s | {i}) < profile.c(s) - tol:
                    return False
    for a in subsets:
        for b in subsets:
            if profile.c(a) + profile.c(b) < profile.c(a | b) + profile.c(a & b) - tol:
                return False
    return True


def all_partitions(items: tuple) -> list[list[frozenset]]:
    """All set partitions of items (Bell enumeration; fine for ell <= 8)."""
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for sub in all_partitions(rest):
        for i in range(len(sub)):
            out.append(sub[:i] + [sub[i] | {first}] + sub[i + 1 :])
        out.append(sub + [frozenset({first})])
    return out


# ---------------------------------------------------------------------------
# Profile file format: one `1,2=48` line per subset, rationals as p/q.
# ---------------------------------------------------------------------------


def format_profile(profile: ComplexityProfile) -> str:
    lines = []
    for s in all_nonempty_subsets(profile.ell):
        key = ",".join(str(i) for i in sorted(s))
        v = profile.values[s]
        lines.append(f"{key}={v.numerator}/{v.denominator}" if v.denominator != 1 else f"{key}={v}")
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> ComplexityProfile:
    values = {}
    max_party = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        if not val:
            raise ValueError(f"line {lineno}: expected subset=value, got {raw!r}")
        try:
            parties = frozenset(int(p) for p in key.split(","))
            bits = Fraction(val.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if not parties or min(parties) < 1:
            raise ValueError(f"line {lineno}: invalid subset {key!r}")
        if parties in values:
            raise ValueError(f"line {lineno}: duplicate subset {key!r}")
        values[parties] = bits
        max_party = max(max_party, max(parties))
    if not values:
        raise ValueError("empty profile")
    return ComplexityProfile(max_party, values)


# ---------------------------------------------------------------------------
# Random valid profiles for property tests and corpus sweeps.
# ---------------------------------------------------------------------------


def random_polymatroid(ell: int, stream: SeedStream) -> ComplexityProfile:
    """Random polymatroid profile: weighted coverage plus an additive part.

    Each party owns a random subset of weighted ground elements; C(V) is
    the total weight covered by V plus the additive weights of V.  Both
    pieces are entropic (coverage = joint entropy of revealed uniform
    bits), so the result is always a valid profile.  Weights use small
    denominators to exercise fractional optima downstream.
    """
    if ell < 1:
        raise ValueError("need at least one party")
    n_ground = 2 + stream.randrange(2 * ell + 2)
    denom = stream.choice([1, 1, 2, 4])
    weights = [Fraction(1 + stream.randrange(12), denom) for _ in range(n_ground)]
    owners: list[set[int]] = []
    for _ in range(n_ground):
        mask = stream.bits(ell)
        if mask == 0:
            mask = 1 << stream.randrange(ell)
        owners.append({i + 1 for i in range(ell) if (mask >> i) & 1})
    additive = [Fraction(stream.randrange(8), denom) for _ in range(ell)]
    values = {}
    for s in all_nonempty_subsets(ell):
        cover = sum((w for w, o in zip(weights, owners) if o & s), Fraction(0))
        values[s] = cover + sum((additive[i - 1] for i in s), Fraction(0))
    return ComplexityProfile(ell, values)
