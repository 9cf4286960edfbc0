"""Slepian-Wolf rate region, communication for omniscience, key capacity.

The region S is cut out by one constraint per splitting (I, J) of the
parties into two nonempty sets:  sum_{i in I} n_i >= C(x_I | x_J).  CO is
the minimum total rate over S, computed by exhaustive vertex enumeration
with exact rational arithmetic: every subset of ell constraints whose
indicator matrix is nonsingular contributes one candidate vertex, and the
feasible candidate with the smallest total (ties broken by
lexicographically smallest rate tuple) is the canonical optimum every
party agrees on.

Because the constraint matrix depends only on ell, the adjugates and
determinants of all candidate bases are precomputed once per ell; per
profile only integer matrix-vector products remain, batched through
int64 numpy (with overflow guards, so the arithmetic stays exact).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd

import numpy as np

from .profiles import (
    ComplexityProfile,
    all_nonempty_subsets,
    all_partitions,
    cond,
    is_polymatroid,
    multi_j,
)

_MAX_PARTIES_PARTITION = 8
_MAX_PARTIES_LP = 6
_INT64_GUARD = 1 << 55


@dataclass(frozen=True)
class RateTuple:
    rates: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(Fraction(r) for r in self.rates))
        if any(r < 0 for r in self.rates):
            raise ValueError("rates must be non-negative")

    def total(self) -> Fraction:
        return sum(self.rates, Fraction(0))

    def ceil(self) -> tuple:
        """Whole-bit broadcast lengths (sessions round rates up)."""
        from math import ceil

        return tuple(int(ceil(r)) for r in self.rates)


@dataclass(frozen=True)
class RateRegion:
    profile: ComplexityProfile
    constraints: tuple  # ((frozenset I, Fraction bound), ...)

    def satisfied_by(self, rates: RateTuple) -> bool:
        for subset, bound in self.constraints:
            if sum((rates.rates[i - 1] for i in subset), Fraction(0)) < bound:
                return False
        return True


def proper_splittings(ell: int) -> list[frozenset]:
    """All I with both I and its complement nonempty (2^ell - 2 subsets)."""
    return [s for s in all_nonempty_subsets(ell) if len(s) < ell]


def sw_constraints(profile: ComplexityProfile) -> RateRegion:
    """The Slepian-Wolf constraint region of a (polymatroid) profile."""
    if not is_polymatroid(profile):
        raise ValueError("profile is not a valid polymatroid")
    ell = profile.ell
    full = profile.full()
    constraints = tuple(
        (s, cond(profile, s, full - s)) for s in proper_splittings(ell)
    )
    return RateRegion(profile, constraints)


@lru_cache(maxsize=8)
def _basis_tables(ell: int):
    """Precomputed vertex-enumeration tables for the canonical constraint
    order at a given ell: sign-normalized adjugates, |det|, and the
    feasibility products A_all @ adj for every nonsingular basis."""
    subsets = proper_splittings(ell)
    a_all = np.array(
        [[1 if i in s else 0 for i in range(1, ell + 1)] for s in subsets],
        dtype=np.int64,
    )
    idxs, adjs, dets = [], [], []
    for combo in combinations(range(len(subsets)), ell):
        sub = a_all[list(combo), :]
        det, adj = _int_det_adj(sub)
        if det == 0:
            continue
        if det < 0:
            det, adj = -det, -adj
        idxs.append(combo)
        adjs.append(adj)
        dets.append(det)
    idx_arr = np.array(idxs, dtype=np.intp)
    adj_arr = np.array(adjs, dtype=np.int64)
    det_arr = np.array(dets, dtype=np.int64)
    # feas[b] = A_all @ adj[b]: (n_cons, ell) per basis.
    feas = np.einsum("ck,bkj->bcj", a_all, adj_arr)
    return subsets, a_all, idx_arr, adj_arr, det_arr, feas


def _int_det_adj(m: np.ndarray):
    """Exact determinant and adjugate of a small integer matrix."""
    n = m.shape[0]
    mi = [[int(v) for v in row] for row in m]

    def det(mat) -> int:
        if len(mat) == 1:
            return mat[0][0]
        if len(mat) == 2:
            return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
        total = 0
        for j, v in enumerate(mat[0]):
            if v:
                minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
                total += (-1) ** j * v * det(minor)
        return total

    d = det(mi)
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            minor = [
                [mi[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = det(minor) if minor else 1
            adj[j][i] = (-1) ** (i + j) * cof
    return d, adj


def co_lp(region: RateRegion):
    """Exact CO minimum and the canonical optimal rate tuple.

    Returns (total bits, RateTuple); the tuple is the lexicographically
    smallest point of the optimal face, so all parties derive the same
    rates independently.
    """
    ell = region.profile.ell
    if ell > _MAX_PARTIES_LP:
        raise ValueError(f"vertex enumeration supports up to {_MAX_PARTIES_LP} parties")
    subsets, _a_all, idx_arr, adj_arr, det_arr, feas = _basis_tables(ell)
    order = {s: i for i, s in enumerate(subsets)}
    bounds = [None] * len(subsets)
    for s, b in region.constraints:
        bounds[order[s]] = Fraction(b)
    if any(b is None for b in bounds):
        raise ValueError("region is missing Slepian-Wolf constraints")

    denom = 1
    for b in bounds:
        denom = denom * b.denominator // gcd(denom, b.denominator)
    scaled = [int(b * denom) for b in bounds]
    if max(abs(v) for v in scaled) < _INT64_GUARD // (64 * ell):
        b_arr = np.array(scaled, dtype=np.int64)
        verts = np.einsum("bkj,bj->bk", adj_arr, b_arr[idx_arr])  # ell per basis
        lhs = np.einsum("bcj,bj->bc", feas, b_arr[idx_arr])
        rhs = det_arr[:, None] * b_arr[None, :]
        feasible = np.all(lhs >= rhs, axis=1) & np.all(verts >= 0, axis=1)
        candidates = [
            tuple(
                Fraction(int(v), int(det_arr[b]) * denom) for v in verts[b]
            )
            for b in np.nonzero(feasible)[0]
        ]
    else:  # big numbers: do everything in Fractions
        candidates = _vertices_fractions(region, subsets, idx_arr)

    if not candidates:
        raise RuntimeError("Slepian-Wolf region produced no feasible vertex")
    best = min(candidates, key=lambda v: (sum(v, Fraction(0)), v))
    total = sum(best, Fraction(0))
    return total, RateTuple(best)


def _vertices_fractions(region: RateRegion, subsets, idx_arr) -> list:
    ell = region.profile.ell
    bound_of = dict(region.constraints)
    rows = [[Fraction(1 if i in s else 0) for i in range(1, ell + 1)] for s in subsets]
    rhs = [Fraction(bound_of[s]) for s in subsets]
    out = []
    for combo in idx_arr:
        a = [rows[i][:] for i in combo]
        b = [rhs[i] for i in combo]
        x = _solve_fractions(a, b)
        if x is None or any(v < 0 for v in x):
            continue
        if all(
            sum(r * v for r, v in zip(row, x)) >= bb for row, bb in zip(rows, rhs)
        ):
            out.append(tuple(x))
    return out


def _solve_fractions(a: list, b: list):
    n = len(a)
    m = [row[:] + [bb] for row, bb in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def co_formula3(profile: ComplexityProfile) -> Fraction:
    """Closed-form CO for three parties: the maximum of four quantities."""
    if profile.ell != 3:
        raise ValueError("closed form applies to exactly three parties")
    c = lambda v, w: cond(profile, v, w)  # noqa: E731
    return max(
        c({1}, {2, 3}) + c({2, 3}, {1}),
        c({2}, {1, 3}) + c({1, 3}, {2}),
        c({3}, {1, 2}) + c({1, 2}, {3}),
        (c({1, 2}, {3}) + c({1, 3}, {2}) + c({2, 3}, {1})) / 2,
    )


def key_capacity(profile: ComplexityProfile) -> Fraction:
    """Secret-key capacity C(all) - CO, via the splitting formula.

    Evaluates min over all partitions (>= 2 parts) of
    (sum_i C(x_{J_i}) - C(all)) / (s - 1); Bell enumeration, ell <= 8.
    This route is independent of the LP and is cross-checked against it.
    """
    if profile.ell > _MAX_PARTIES_PARTITION:
        raise ValueError(f"partition enumeration capped at {_MAX_PARTIES_PARTITION} parties")
    if not is_polymatroid(profile):
        raise ValueError("profile is not a valid polymatroid")
    parties = tuple(range(1, profile.ell + 1))
    best = None
    for partition in all_partitions(parties):
        if len(partition) < 2:
            continue
        j = multi_j(profile, partition)
        if best is None or j < best:
            best = j
    return best
