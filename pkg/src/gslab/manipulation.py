"""Manipulation points, censuses, and the quantitative lower-bound evaluators.

A profile x is a manipulation point of f if some voter can replace her ranking
so that the new winner is ranked higher by her *original* ranking.  An
r-manipulation point is one reachable by permuting a block of at most r
adjacent positions in one coordinate.  Exact censuses count over the full
profile space with the winner table; sampled censuses use seeded, blockwise
random streams so results are reproducible and independent of worker count.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Optional, Union

import numpy as np

from . import rankings as rk
from . import scf as scf_mod
from .errors import DomainError, TheoremViolation
from .rankings import Profile, Ranking
from .scf import SocialChoiceFn

_SAMPLE_BLOCK = 4096


@dataclass(frozen=True)
class ManipulationWitness:
    """A manipulation pair (x, y) differing only in `voter`'s coordinate.

    r, when present, is the size of the smallest adjacent block whose
    permutation turns x into y.
    """

    x: Profile
    y: Profile
    voter: int
    r: Optional[int] = None


# ---------------------------------------------------------------------------
# Lookup tables


@lru_cache(maxsize=None)
def rank_table(q: int) -> np.ndarray:
    """R[s, a] = position (1-based) of alternative a under ranking index s."""
    m = math.factorial(q)
    out = np.zeros((m, q + 1), dtype=np.int64)
    for s, x in enumerate(rk.enumerate_rankings(q)):
        for pos, a in enumerate(x):
            out[s, a] = pos + 1
    return out


@lru_cache(maxsize=None)
def window_neighbor_mask(q: int, r: int) -> np.ndarray:
    """M[s, t]: ranking t is reachable from s by permuting one adjacent block of size <= r."""
    if r < 2:
        raise DomainError("window size must be at least 2")
    m = math.factorial(q)
    mask = np.zeros((m, m), dtype=bool)
    for s, x in enumerate(rk.enumerate_rankings(q)):
        for y in _window_neighbors(x, r):
            mask[s, rk.encode(y)] = True
    return mask


def _window_neighbors(x: Ranking, r: int) -> Iterator[Ranking]:
    """Distinct rankings obtained by permuting one adjacent block of size <= r.

    Deterministic order: window start, then window length, then Lehmer order
    of the block permutation; duplicates are suppressed.
    """
    q = len(x)
    seen = {x}
    for start in range(q):
        for w in range(2, r + 1):
            if start + w > q:
                break
            block = x[start : start + w]
            for perm in permutations(block):
                if perm == block:
                    continue
                y = x[:start] + perm + x[start + w :]
                if y not in seen:
                    seen.add(y)
                    yield y


def block_span(x: Ranking, y: Ranking) -> Optional[int]:
    """Size of the smallest adjacent block turning x into y, or None.

    None is returned when x == y or when the differing positions are not a
    permutation of one contiguous block.
    """
    diffs = [k for k in range(len(x)) if x[k] != y[k]]
    if not diffs:
        return None
    lo, hi = diffs[0], diffs[-1]
    if sorted(x[lo : hi + 1]) != sorted(y[lo : hi + 1]):
        return None
    return hi - lo + 1


# ---------------------------------------------------------------------------
# Point checks


def is_manipulation_pair(f: SocialChoiceFn, x: Profile, y: Profile) -> bool:
    """True iff x, y differ in exactly one coordinate whose owner prefers f(y)."""
    if len(x) != f.n or len(y) != f.n:
        raise DomainError("profile size does not match the rule")
    diff = [k for k in range(f.n) if x[k] != y[k]]
    if len(diff) != 1:
        return False
    i = diff[0]
    return rk.rank_of(x[i], f.fn(y)) < rk.rank_of(x[i], f.fn(x))


def find_manipulation(f: SocialChoiceFn, x: Profile) -> Optional[ManipulationWitness]:
    """Full neighbor scan: every coordinate, every replacement ranking in encode order."""
    wx = f.fn(x)
    for i in range(f.n):
        base_rank = rk.rank_of(x[i], wx)
        for yi in rk.enumerate_rankings(f.q):
            if yi == x[i]:
                continue
            y = x[:i] + (yi,) + x[i + 1 :]
            if rk.rank_of(x[i], f.fn(y)) < base_rank:
                return ManipulationWitness(x, y, i + 1, block_span(x[i], yi))
    return None


def is_r_manipulation_point(f: SocialChoiceFn, x: Profile, r: int) -> Optional[ManipulationWitness]:
    """Windowed scan for a manipulation using one adjacent block of size <= r."""
    if not 2 <= r <= f.q:
        raise DomainError(f"block size {r} outside 2..{f.q}")
    wx = f.fn(x)
    for i in range(f.n):
        base_rank = rk.rank_of(x[i], wx)
        for yi in _window_neighbors(x[i], r):
            y = x[:i] + (yi,) + x[i + 1 :]
            if rk.rank_of(x[i], f.fn(y)) < base_rank:
                return ManipulationWitness(x, y, i + 1, block_span(x[i], yi))
    return None


def oracle_r_manipulation_point(f: SocialChoiceFn, x: Profile, r: int) -> bool:
    """Independent check: enumerate all rankings and test block reachability directly."""
    wx = f.fn(x)
    for i in range(f.n):
        base_rank = rk.rank_of(x[i], wx)
        for yi in rk.enumerate_rankings(f.q):
            span = block_span(x[i], yi)
            if span is None or span > r:
                continue
            y = x[:i] + (yi,) + x[i + 1 :]
            if rk.rank_of(x[i], f.fn(y)) < base_rank:
                return True
    return False


# ---------------------------------------------------------------------------
# Exact flag arrays


def manipulation_flags(f: SocialChoiceFn, r: Optional[int] = None, cap=None) -> np.ndarray:
    """Boolean per profile (encode order): is it an (r-)manipulation point?

    r=None means manipulation by an arbitrary change of one coordinate.
    """
    q, n = f.q, f.n
    m = math.factorial(q)
    table = f.table(cap).reshape((m,) * n)
    pr = rank_table(q)
    mask = window_neighbor_mask(q, r) if r is not None else None
    flags = np.zeros((m,) * n, dtype=bool)
    rows_idx = np.arange(m)
    for i in range(n):
        winners = np.moveaxis(table, i, -1).reshape(-1, m)
        # Accumulate separately: reshaping the moved view of `flags` would
        # copy for i < n-1 and silently drop the in-place updates.
        acc = np.zeros_like(winners, dtype=bool)
        for rest in range(winners.shape[0]):
            w = winners[rest]
            ranks = pr[rows_idx[:, None], w[None, :]]  # ranks[s, t]
            better = ranks < ranks[rows_idx, rows_idx][:, None]
            if mask is not None:
                better &= mask
            acc[rest] = better.any(axis=1)
        flags |= np.moveaxis(acc.reshape((m,) * n), -1, i)
    return flags.reshape(-1)


def all_r_manipulation_points(f: SocialChoiceFn, r: int, cap=None) -> list[Profile]:
    flags = manipulation_flags(f, r, cap)
    return [rk.decode_profile(int(c), f.q, f.n) for c in np.nonzero(flags)[0]]


# ---------------------------------------------------------------------------
# Bounds


def bound_thm13(eps: Fraction, n: int, q: int) -> Fraction:
    """Coarse lower bound on the manipulation-point fraction: eps^2 / (2 n^3 q^6 (q!)^2)."""
    return Fraction(eps) ** 2 / (2 * n**3 * q**6 * math.factorial(q) ** 2)


def bound_thm16(eps: Fraction, n: int, q: int) -> Fraction:
    """Refined lower bound on the 4-manipulation-point fraction: eps^2 / (10^4 n^3 q^30)."""
    return Fraction(eps) ** 2 / (10**4 * n**3 * q**30)


# ---------------------------------------------------------------------------
# Census


@dataclass(frozen=True)
class ManipulationCensus:
    rule: str
    q: int
    n: int
    mode: str
    total_profiles: int
    fractions: dict  # keys "manip", "r2", "r3", ... ; Fraction or (est, stderr)
    epsilon: Optional[Fraction]
    bounds: Optional[dict]
    passes: Optional[dict]
    seed: Optional[int] = None
    samples: Optional[int] = None

    def to_json_dict(self) -> dict:
        def frac(v):
            if isinstance(v, Fraction):
                return {"num": v.numerator, "den": v.denominator}
            est, se = v
            return {"estimate": est, "stderr": se}

        out = {
            "rule": self.rule,
            "q": self.q,
            "n": self.n,
            "mode": self.mode,
            "epsilon": frac(self.epsilon) if self.epsilon is not None else None,
            "fractions": {k: frac(v) for k, v in self.fractions.items()},
            "bounds": {k: frac(v) for k, v in self.bounds.items()} if self.bounds else None,
            "pass": self.passes,
            "formulas": {
                "thm13": "eps^2 / (2 n^3 q^6 (q!)^2)",
                "thm16": "eps^2 / (10^4 n^3 q^30)",
            },
        }
        if self.mode == "sampled":
            out["seed"] = self.seed
            out["samples"] = self.samples
        return out


def census(
    f: SocialChoiceFn,
    mode: str = "exact",
    rs: tuple[int, ...] = (2, 3, 4),
    samples: int = 10**5,
    seed: int = 0,
    cap=None,
    rule_name: Optional[str] = None,
) -> ManipulationCensus:
    """Count (r-)manipulation points and evaluate both lower bounds.

    Exact mode produces rational fractions and PASS/FAIL flags for the bounds
    (flags are None when q < 4, where the bounds do not apply); sampled mode
    reports estimates with standard errors and never asserts the bounds.
    """
    rs = tuple(r for r in rs if 2 <= r <= f.q)
    total = rk.profile_count(f.q, f.n)
    rule = rule_name or f.kind

    if mode == "exact":
        rk.check_cap(f.q, f.n, cap)
        fractions = {"manip": Fraction(int(manipulation_flags(f, None, cap).sum()), total)}
        for r in rs:
            fractions[f"r{r}"] = Fraction(int(manipulation_flags(f, r, cap).sum()), total)
        eps = scf_mod.dist_to_dict(f, cap)
        bounds = {"thm13": bound_thm13(eps, f.n, f.q), "thm16": bound_thm16(eps, f.n, f.q)}
        if f.q >= 4:
            passes = {
                "thm13": fractions["manip"] >= bounds["thm13"],
                "thm16": fractions.get("r4", Fraction(0)) >= bounds["thm16"],
            }
        else:
            passes = {"thm13": None, "thm16": None}
        return ManipulationCensus(rule, f.q, f.n, mode, total, fractions, eps, bounds, passes)

    if mode == "sampled":
        hits = {"manip": 0, **{f"r{r}": 0 for r in rs}}
        done = 0
        while done < samples:
            block = min(_SAMPLE_BLOCK, samples - done)
            rng = np.random.default_rng([seed, done // _SAMPLE_BLOCK])
            for _ in range(block):
                x = rk.random_profile(rng, f.q, f.n)
                if find_manipulation(f, x) is not None:
                    hits["manip"] += 1
                    for r in rs:
                        if is_r_manipulation_point(f, x, r) is not None:
                            hits[f"r{r}"] += 1
            done += block
        fractions = {}
        for k, h in hits.items():
            p = h / samples
            fractions[k] = (p, math.sqrt(p * (1 - p) / samples))
        try:
            eps = scf_mod.dist_to_dict(f, cap)
            bounds = {"thm13": bound_thm13(eps, f.n, f.q), "thm16": bound_thm16(eps, f.n, f.q)}
        except rk.ProfileCapExceeded:
            eps, bounds = None, None
        return ManipulationCensus(
            rule, f.q, f.n, mode, total, fractions, eps, bounds, None, seed=seed, samples=samples
        )
    raise DomainError(f"unknown census mode {mode!r}")


def census_to_json(c: ManipulationCensus) -> str:
    return json.dumps(c.to_json_dict(), sort_keys=True, indent=2) + "\n"


def export_flags_csv(f: SocialChoiceFn, path: str, rs: tuple[int, ...] = (2, 3, 4), cap=None) -> None:
    """Per-profile manipulation flags in encode order (exact mode only)."""
    rs = tuple(r for r in rs if 2 <= r <= f.q)
    flags = {"manip": manipulation_flags(f, None, cap)}
    for r in rs:
        flags[f"r{r}"] = manipulation_flags(f, r, cap)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "profile"] + list(flags))
        for idx, x in enumerate(rk.enumerate_profiles(f.q, f.n, cap)):
            w.writerow([idx, rk.format_profile(x)] + [int(flags[k][idx]) for k in flags])


# ---------------------------------------------------------------------------
# Manipulation-pair probability (two random-attack flavors)


@dataclass(frozen=True)
class PairEstimate:
    flavor: str
    estimate: float
    stderr: float
    samples: int
    seed: int


def _block4_maps(q: int) -> list[np.ndarray]:
    """Ranking-index maps for each (window of 4 positions, block permutation)."""
    maps = []
    rankings = list(rk.enumerate_rankings(q))
    for start in range(q - 3):
        for perm in permutations(range(4)):
            mp = np.empty(len(rankings), dtype=np.int64)
            for s, x in enumerate(rankings):
                block = x[start : start + 4]
                y = x[:start] + tuple(block[p] for p in perm) + x[start + 4 :]
                mp[s] = rk.encode(y)
            maps.append(mp)
    return maps


def estimate_pair_probability(
    f: SocialChoiceFn, flavor: str, k: int, seed: int = 0
) -> PairEstimate:
    """Monte Carlo estimate of P((X, Y) is a manipulation pair).

    flavor "reset_coordinate": Y resets a uniform coordinate to a fresh
    uniform ranking (draws with Y = X count as non-pairs).  flavor
    "adjacent_block4": Y permutes a uniform block of 4 adjacent positions of
    a uniform coordinate (requires q >= 4).
    """
    if flavor not in ("reset_coordinate", "adjacent_block4"):
        raise DomainError(f"unknown flavor {flavor!r}")
    if flavor == "adjacent_block4" and f.q < 4:
        raise DomainError("adjacent_block4 needs q >= 4")
    if k < 1:
        raise DomainError("need at least one sample")
    hits = 0
    done = 0
    while done < k:
        block = min(_SAMPLE_BLOCK, k - done)
        rng = np.random.default_rng([seed, done // _SAMPLE_BLOCK])
        for _ in range(block):
            x = rk.random_profile(rng, f.q, f.n)
            i = int(rng.integers(f.n))
            if flavor == "reset_coordinate":
                yi = rk.random_ranking(rng, f.q)
            else:
                start = int(rng.integers(f.q - 3))
                perm = tuple(int(v) for v in rng.permutation(4))
                blk = x[i][start : start + 4]
                yi = x[i][:start] + tuple(blk[p] for p in perm) + x[i][start + 4 :]
            if yi != x[i]:
                y = x[:i] + (yi,) + x[i + 1 :]
                if rk.rank_of(x[i], f.fn(y)) < rk.rank_of(x[i], f.fn(x)):
                    hits += 1
        done += block
    p = hits / k
    return PairEstimate(flavor, p, math.sqrt(p * (1 - p) / k), k, seed)


def exact_pair_probability(f: SocialChoiceFn, flavor: str, cap=None) -> Fraction:
    """Exact value of the pair probability by enumerating the (X, Y) law."""
    q, n = f.q, f.n
    m = math.factorial(q)
    pr = rank_table(q)
    rows_idx = np.arange(m)
    count = 0
    if flavor == "reset_coordinate":
        denom = n * m ** (n + 1)
        from .influence import _coord_slices

        for i in range(1, n + 1):
            for w in _coord_slices(f, i, cap):
                ranks = pr[rows_idx[:, None], w[None, :]]
                count += int((ranks < ranks[rows_idx, rows_idx][:, None]).sum())
        return Fraction(count, denom)
    if flavor == "adjacent_block4":
        if q < 4:
            raise DomainError("adjacent_block4 needs q >= 4")
        maps = _block4_maps(q)
        denom = n * len(maps) * m**n
        from .influence import _coord_slices

        for i in range(1, n + 1):
            for w in _coord_slices(f, i, cap):
                own = pr[rows_idx, w]
                for mp in maps:
                    moved = mp != rows_idx
                    count += int((pr[rows_idx, w[mp]][moved] < own[moved]).sum())
        return Fraction(count, denom)
    raise DomainError(f"unknown flavor {flavor!r}")


# ---------------------------------------------------------------------------
# Brute-force witness for the classical theorem


def gs_witness(f: SocialChoiceFn, cap=None) -> Optional[ManipulationWitness]:
    """Exhaustive manipulation witness for any >=3-valued non-dictator rule.

    Returns None (not applicable) when f takes fewer than three values or is a
    function of one coordinate; raises TheoremViolation if no witness exists
    despite the preconditions holding, which would indicate a bug.
    """
    if len(scf_mod.values_taken(f, cap)) < 3:
        return None
    if scf_mod.dist_to_dict(f, cap) == 0:
        return None
    flags = manipulation_flags(f, None, cap)
    idx = np.nonzero(flags)[0]
    if idx.size == 0:
        raise TheoremViolation("rule takes >=3 values and is no dictator, yet no manipulation found")
    x = rk.decode_profile(int(idx[0]), f.q, f.n)
    w = find_manipulation(f, x)
    assert w is not None
    return w


# ---------------------------------------------------------------------------
# Plurality scaling experiment


def _plurality_manip_fraction_block(q: int, n: int, rng: np.random.Generator, block: int):
    """Vectorized manipulation-point indicator for `block` uniform profiles."""
    m = math.factorial(q)
    rankings = list(rk.enumerate_rankings(q))
    top_lut = np.array([x[0] for x in rankings], dtype=np.int64)
    pr = rank_table(q)
    idx = rng.integers(m, size=(block, n))
    tops = top_lut[idx]
    scores = np.zeros((block, q + 1), dtype=np.int64)
    rows = np.arange(block)
    for v in range(n):
        scores[rows, tops[:, v]] += 1

    def winner(sc, tp):
        best = sc[:, 1:].max(axis=1)
        has_max = sc[rows, tp.T].T == best[:, None]  # (block, n)
        first = has_max.argmax(axis=1)
        return tp[rows, first]

    base_w = winner(scores, tops)
    # A single vote change shifts every score by at most one, so profiles
    # where the leader is two ahead of everyone else cannot be manipulated.
    srt = np.sort(scores[:, 1:], axis=1)
    candidates = np.nonzero(srt[:, -1] - srt[:, -2] <= 1)[0]
    manip = np.zeros(block, dtype=bool)
    if candidates.size == 0:
        return manip
    c_scores = scores[candidates]
    c_tops = tops[candidates]
    c_idx = idx[candidates]
    c_rows = np.arange(candidates.size)
    c_base = base_w[candidates]
    for i in range(n):
        own = c_tops[:, i]
        own_rank_base = pr[c_idx[:, i], c_base]
        for v in range(1, q + 1):
            sc = c_scores.copy()
            sc[c_rows, own] -= 1
            sc[c_rows, v] += 1
            tp = c_tops.copy()
            tp[:, i] = v
            best = sc[:, 1:].max(axis=1)
            has_max = sc[c_rows, tp.T].T == best[:, None]
            first = has_max.argmax(axis=1)
            new_w = tp[c_rows, first]
            manip[candidates] |= (v != own) & (pr[c_idx[:, i], new_w] < own_rank_base)
    return manip


def plurality_scaling_experiment(
    q: int, ns: tuple[int, ...], k: int, seed: int = 0
) -> list[dict]:
    """Monte Carlo manipulation-point fraction of leftmost-tie-break plurality.

    One row per n with (estimate, stderr, samples, seed); the fraction shrinks
    with n because manipulation requires a near-tie in first-place votes.
    """
    rows = []
    for n in ns:
        hits = 0
        done = 0
        while done < k:
            block = min(_SAMPLE_BLOCK, k - done)
            rng = np.random.default_rng([seed, n, done // _SAMPLE_BLOCK])
            hits += int(_plurality_manip_fraction_block(q, n, rng, block).sum())
            done += block
        p = hits / k
        rows.append(
            {"n": n, "estimate": p, "stderr": math.sqrt(p * (1 - p) / k), "samples": k, "seed": seed}
        )
    return rows
