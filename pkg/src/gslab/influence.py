"""Coordinate influences, boundary edges, and the large-boundary witness search.

The influence of coordinate i is the probability that the winner changes when
voter i's ranking is re-randomized.  The refined variants restrict the
re-randomization to a single adjacent transposition z applied lazily (kept
with probability 1/2).  All exact values are computed by integer counting
over the winner table and returned as Fractions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import rankings as rk
from . import scf as scf_mod
from .errors import DomainError, TheoremViolation
from .rankings import AdjTransposition, Profile
from .scf import SocialChoiceFn


@dataclass(frozen=True)
class InfluenceKind:
    """Which influence quantity to compute.

    variant is one of ``total``, ``single``, ``pair``, ``pair_refined``,
    ``single_refined``, ``pair_refined_total``; a, b and z are required by the
    variants that mention them.
    """

    variant: str
    a: Optional[int] = None
    b: Optional[int] = None
    z: Optional[AdjTransposition] = None

    def __post_init__(self):
        needs = {
            "total": (),
            "single": ("a",),
            "pair": ("a", "b"),
            "pair_refined": ("a", "b", "z"),
            "single_refined": ("a", "z"),
            "pair_refined_total": ("a", "b"),
        }
        if self.variant not in needs:
            raise DomainError(f"unknown influence variant {self.variant!r}")
        for fieldname in needs[self.variant]:
            if getattr(self, fieldname) is None:
                raise DomainError(f"influence variant {self.variant!r} needs {fieldname}")
        if self.a is not None and self.b is not None and self.a == self.b:
            raise DomainError("pair influence needs two distinct alternatives")


@dataclass(frozen=True)
class SampledValue:
    estimate: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class BoundaryEdge:
    """Profiles x, y differing only in coordinate i, with f(x)=a and f(y)=b.

    For refined edges, z is the adjacent transposition with x_i = z y_i.
    """

    x: Profile
    y: Profile
    i: int
    z: Optional[AdjTransposition] = None


# ---------------------------------------------------------------------------
# Exact computation helpers


def _coord_slices(f: SocialChoiceFn, i: int, cap=None) -> np.ndarray:
    """Winner table as (rest, m): rows share all coordinates except i."""
    m = math.factorial(f.q)
    table = f.table(cap).reshape((m,) * f.n)
    return np.moveaxis(table, i - 1, -1).reshape(-1, m)


def _swap_perm(q: int, z: AdjTransposition) -> np.ndarray:
    """Ranking-index permutation realizing the adjacent transposition z."""
    out = np.empty(math.factorial(q), dtype=np.int64)
    for s, x in enumerate(rk.enumerate_rankings(q)):
        out[s] = rk.encode(rk.apply_adjacent(z, x))
    return out


def _check_coord(f: SocialChoiceFn, i: int) -> None:
    if not 1 <= i <= f.n:
        raise DomainError(f"coordinate {i} outside 1..{f.n}")


def influence_total(f: SocialChoiceFn, i: int, cap=None) -> Fraction:
    """P(winner changes when coordinate i is re-randomized)."""
    _check_coord(f, i)
    m = math.factorial(f.q)
    rows = _coord_slices(f, i, cap)
    count = 0
    for row in rows:
        c = np.bincount(row, minlength=f.q + 1)[1:]
        count += m * m - int((c * c).sum())
    return Fraction(count, m ** (f.n + 1))


def influence_single(f: SocialChoiceFn, i: int, a: int, cap=None) -> Fraction:
    """P(f(X) = a and the re-randomized coordinate moves the winner off a)."""
    _check_coord(f, i)
    m = math.factorial(f.q)
    rows = _coord_slices(f, i, cap)
    count = 0
    for row in rows:
        ca = int(np.count_nonzero(row == a))
        count += ca * (m - ca)
    return Fraction(count, m ** (f.n + 1))


def influence_pair(f: SocialChoiceFn, i: int, a: int, b: int, cap=None) -> Fraction:
    """P(f(X) = a and the re-randomized winner is b)."""
    _check_coord(f, i)
    if a == b:
        raise DomainError("pair influence needs a != b")
    m = math.factorial(f.q)
    rows = _coord_slices(f, i, cap)
    count = 0
    for row in rows:
        count += int(np.count_nonzero(row == a)) * int(np.count_nonzero(row == b))
    return Fraction(count, m ** (f.n + 1))


def influence_pair_refined(
    f: SocialChoiceFn, i: int, a: int, b: int, z: AdjTransposition, cap=None
) -> Fraction:
    """Half the probability that f(X) = a while applying z to coordinate i gives b."""
    _check_coord(f, i)
    if a == b:
        raise DomainError("pair influence needs a != b")
    rows = _coord_slices(f, i, cap)
    zrows = rows[:, _swap_perm(f.q, z)]
    count = int(np.count_nonzero((rows == a) & (zrows == b)))
    return Fraction(count, 2 * rk.profile_count(f.q, f.n))


def influence_single_refined(
    f: SocialChoiceFn, i: int, a: int, z: AdjTransposition, cap=None
) -> Fraction:
    _check_coord(f, i)
    rows = _coord_slices(f, i, cap)
    zrows = rows[:, _swap_perm(f.q, z)]
    count = int(np.count_nonzero((rows == a) & (zrows != a)))
    return Fraction(count, 2 * rk.profile_count(f.q, f.n))


def influence_pair_refined_total(f: SocialChoiceFn, i: int, a: int, b: int, cap=None) -> Fraction:
    """Sum of the refined pair influence over every adjacent transposition."""
    return sum(
        (influence_pair_refined(f, i, a, b, z, cap) for z in rk.all_adjacent_transpositions(f.q)),
        Fraction(0),
    )


def influence(
    f: SocialChoiceFn,
    i: int,
    kind: InfluenceKind,
    mode: str = "exact",
    samples: int = 10**4,
    seed: int = 0,
    cap=None,
) -> Union[Fraction, SampledValue]:
    """Dispatch on the influence variant; exact or Monte Carlo."""
    if mode == "exact":
        match kind.variant:
            case "total":
                return influence_total(f, i, cap)
            case "single":
                return influence_single(f, i, kind.a, cap)
            case "pair":
                return influence_pair(f, i, kind.a, kind.b, cap)
            case "pair_refined":
                return influence_pair_refined(f, i, kind.a, kind.b, kind.z, cap)
            case "single_refined":
                return influence_single_refined(f, i, kind.a, kind.z, cap)
            case "pair_refined_total":
                return influence_pair_refined_total(f, i, kind.a, kind.b, cap)
    if mode == "sampled":
        return _influence_sampled(f, i, kind, samples, seed)
    raise DomainError(f"unknown influence mode {mode!r}")


def _influence_sampled(f: SocialChoiceFn, i: int, kind: InfluenceKind, samples: int, seed: int) -> SampledValue:
    _check_coord(f, i)
    rng = np.random.default_rng(seed)
    hits = 0
    refined = kind.variant in ("pair_refined", "single_refined")
    for _ in range(samples):
        x = rk.random_profile(rng, f.q, f.n)
        if refined:
            # Lazy single-transposition re-randomization.
            if rng.integers(2) == 0:
                xi2 = x[i - 1]
            else:
                xi2 = rk.apply_adjacent(kind.z, x[i - 1])
        else:
            xi2 = rk.random_ranking(rng, f.q)
        y = x[: i - 1] + (xi2,) + x[i:]
        wx, wy = f.fn(x), f.fn(y)
        match kind.variant:
            case "total":
                hit = wx != wy
            case "single" | "single_refined":
                hit = wx == kind.a and wy != kind.a
            case "pair" | "pair_refined":
                hit = wx == kind.a and wy == kind.b
            case "pair_refined_total":
                raise DomainError("pair_refined_total has no sampled mode; sum exact terms")
            case _:
                raise DomainError(kind.variant)
        hits += hit
    p = hits / samples
    return SampledValue(p, math.sqrt(p * (1 - p) / samples), samples, seed)


def variance_indicator(f: SocialChoiceFn, a: int, cap=None) -> Fraction:
    """Variance of the indicator that a wins: mu_a (1 - mu_a)."""
    mu = scf_mod.distribution(f, cap=cap)[a - 1]
    return mu * (1 - mu)


# ---------------------------------------------------------------------------
# Boundary edges


def boundary_edges(
    f: SocialChoiceFn,
    i: int,
    a: int,
    b: int,
    refined: Optional[Union[AdjTransposition, str]] = None,
    cap=None,
) -> list[BoundaryEdge]:
    """All ordered profile pairs on the (i, a, b) boundary.

    refined=None gives the plain boundary (any change of coordinate i);
    refined=z keeps only pairs with x_i = z y_i; refined="all_z" unions over
    every adjacent transposition, tagging each edge with its z.
    """
    _check_coord(f, i)
    if a == b:
        raise DomainError("boundary needs a != b")
    m = math.factorial(f.q)
    all_rankings = list(rk.enumerate_rankings(f.q))
    rows = _coord_slices(f, i, cap)
    if refined is None:
        zs = [None]
    elif refined == "all_z":
        zs = rk.all_adjacent_transpositions(f.q)
    else:
        zs = [refined]

    # Rebuild the profile for a (rest, s) cell: rest indexes all coordinates
    # except i in encode order with coordinate 1 most significant.
    other = [k for k in range(f.n) if k != i - 1]

    def build(rest: int, s: int) -> Profile:
        coords = [0] * f.n
        for k in reversed(other):
            coords[k] = rest % m
            rest //= m
        coords[i - 1] = s
        return tuple(all_rankings[c] for c in coords)

    edges: list[BoundaryEdge] = []
    for z in zs:
        if z is None:
            r3 = (rows == a)[:, :, None] & (rows == b)[:, None, :]
            rests, s_idx, t_idx = np.nonzero(r3)
            for rest, s, t in zip(rests.tolist(), s_idx.tolist(), t_idx.tolist()):
                edges.append(BoundaryEdge(build(rest, s), build(rest, t), i, None))
        else:
            perm = _swap_perm(f.q, z)
            zrows = rows[:, perm]
            rests, s_idx = np.nonzero((rows == a) & (zrows == b))
            for rest, s in zip(rests.tolist(), s_idx.tolist()):
                # x has coordinate value s with f(x)=a; y = z x has f(y)=b,
                # and x_i = z y_i since z is an involution.
                edges.append(BoundaryEdge(build(rest, s), build(rest, int(perm[s])), i, z))
    return edges


# ---------------------------------------------------------------------------
# Large-boundary witness search


@dataclass(frozen=True)
class BoundaryPairWitness:
    """Two boundaries in distinct coordinates, both meeting the threshold."""

    i: int
    a: int
    b: int
    j: int
    c: int
    d: int
    threshold: Fraction
    value_first: Fraction
    value_second: Fraction
    refined: bool = False


@dataclass(frozen=True)
class TwoManipOutcome:
    """Alternative branch of the refined dichotomy: many 2-manipulation points."""

    fraction: Fraction
    threshold: Fraction
    points: tuple[Profile, ...]


def find_large_boundary_pair(
    f: SocialChoiceFn,
    eps: Optional[Fraction] = None,
    refined: bool = False,
    neutral: bool = False,
    cap=None,
) -> Union[BoundaryPairWitness, TwoManipOutcome]:
    """Locate two high-influence boundaries in distinct coordinates.

    Plain mode uses the threshold 2*eps/(n q^2 (q-1)) with eps the distance to
    the dictators-or-two-valued class, and requires c outside {a, b}; with
    neutral=True the threshold halves (eps is the distance to dictators) and
    all four alternatives must be distinct.  Refined mode uses transposition
    boundaries with thresholds 2*eps/(n q^7) (plain) or eps/(n q^7) (neutral)
    and may instead return the guaranteed set of 2-manipulation points.

    Scans (i, a, b) lexicographically and returns the first qualifying pair.
    A failure on a rule meeting the preconditions raises TheoremViolation.
    """
    from . import manipulation as manip_mod

    q, n = f.q, f.n
    if eps is None:
        eps = scf_mod.dist_to_dict(f, cap) if neutral else scf_mod.dist_to_nonmanip(f, cap)
    if refined:
        threshold = (Fraction(1, 1) if neutral else Fraction(2, 1)) * eps / (n * q**7)
    else:
        threshold = (Fraction(1, 1) if neutral else Fraction(2, 1)) * eps / (n * q**2 * (q - 1))

    pairs = [(a, b) for a in range(1, q + 1) for b in range(1, q + 1) if a != b]
    qualifying: list[tuple[int, int, int, Fraction]] = []
    for i in range(1, n + 1):
        for a, b in pairs:
            if refined:
                v = influence_pair_refined(f, i, a, b, rk.adj(a, b), cap)
            else:
                v = influence_pair(f, i, a, b, cap)
            if v >= threshold:
                qualifying.append((i, a, b, v))

    for idx, (i, a, b, v1) in enumerate(qualifying):
        for j, c, d, v2 in qualifying:
            if j == i:
                continue
            if neutral:
                ok = len({a, b, c, d}) == 4
            else:
                ok = c not in (a, b)
            if ok:
                return BoundaryPairWitness(i, a, b, j, c, d, threshold, v1, v2, refined)

    if refined:
        # Dichotomy fallback: a constant fraction of 2-manipulation points.
        frac_threshold = (Fraction(2, 1) if neutral else Fraction(4, 1)) * eps / (n * q**7)
        points = manip_mod.all_r_manipulation_points(f, 2, cap)
        fraction = Fraction(len(points), rk.profile_count(q, n))
        if fraction >= frac_threshold:
            return TwoManipOutcome(fraction, frac_threshold, tuple(points))
    raise TheoremViolation(
        "no qualifying boundary pair found although the preconditions hold; "
        "this indicates an implementation bug"
    )


# ---------------------------------------------------------------------------
# CSV export


def export_influence_csv(f: SocialChoiceFn, path: str, cap=None) -> None:
    """Write plain and refined pair influences as (i, a, b, z, num, den) rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "a", "b", "z", "value_num", "value_den"])
        for i in range(1, f.n + 1):
            for a in range(1, f.q + 1):
                for b in range(1, f.q + 1):
                    if a == b:
                        continue
                    v = influence_pair(f, i, a, b, cap)
                    w.writerow([i, a, b, "", v.numerator, v.denominator])
                    for z in rk.all_adjacent_transpositions(f.q):
                        v = influence_pair_refined(f, i, a, b, z, cap)
                        w.writerow([i, a, b, f"{z[0]}:{z[1]}", v.numerator, v.denominator])
