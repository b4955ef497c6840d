"""Social choice functions: built-in rules, neutrality, distances to function classes.

A social choice function maps a profile of n rankings over q alternatives to a
single winning alternative in 1..q.  Distances to the classes CONST (constant
functions), DICT (functions of a single coordinate) and the class of functions
taking at most two values are computed with exact integer counting over the
full profile space, so they are rationals, never floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import rankings as rk
from .errors import DomainError
from .rankings import Profile, Ranking


@dataclass(frozen=True)
class SocialChoiceFn:
    """A deterministic, total evaluator Profile -> alternative."""

    q: int
    n: int
    kind: str
    fn: Callable[[Profile], int]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, x: Profile) -> int:
        return self.fn(x)

    def table(self, cap: Optional[int] = None) -> np.ndarray:
        """Winner per profile in encode order, cached after first use."""
        if "table" not in self._cache:
            rk.check_cap(self.q, self.n, cap)
            t = np.fromiter(
                (self.fn(x) for x in rk.enumerate_profiles(self.q, self.n, cap)),
                dtype=np.int64,
                count=rk.profile_count(self.q, self.n),
            )
            self._cache["table"] = t
        return self._cache["table"]


def evaluate(f: SocialChoiceFn, x: Profile) -> int:
    """Evaluate with dimension checking."""
    if len(x) != f.n:
        raise DomainError(f"profile has {len(x)} voters, rule expects {f.n}")
    for xi in x:
        if len(xi) != f.q:
            raise DomainError(f"ranking has {len(xi)} alternatives, rule expects {f.q}")
    w = f.fn(x)
    if not 1 <= w <= f.q:
        raise DomainError(f"rule returned {w}, outside 1..{f.q}")
    return w


# ---------------------------------------------------------------------------
# Built-in rules


def constant(a: int, q: int, n: int) -> SocialChoiceFn:
    if not 1 <= a <= q:
        raise DomainError(f"constant winner {a} outside 1..{q}")
    return SocialChoiceFn(q, n, f"constant:{a}", lambda x: a)


def dictator_top(i: int, q: int, n: int) -> SocialChoiceFn:
    """Winner is the top choice of voter i (1-based)."""
    if not 1 <= i <= n:
        raise DomainError(f"dictator voter {i} outside 1..{n}")
    return SocialChoiceFn(q, n, f"dictator:{i}", lambda x: x[i - 1][0])


def _plurality_winner(x: Profile, q: int) -> int:
    scores = [0] * (q + 1)
    for xi in x:
        scores[xi[0]] += 1
    best = max(scores[1:])
    tied = {a for a in range(1, q + 1) if scores[a] == best}
    if len(tied) == 1:
        return next(iter(tied))
    # Scan voters left to right for the first top choice among the tied set.
    for xi in x:
        if xi[0] in tied:
            return xi[0]
    # Unreachable for plurality ties with at least one vote; fall back to
    # voter 1's preference among the tied alternatives.
    return min(tied, key=lambda a: x[0].index(a))


def plurality_leftmost(q: int, n: int) -> SocialChoiceFn:
    """Plurality; score ties go to the leftmost voter's top choice among the tied."""
    return SocialChoiceFn(q, n, "plurality", lambda x: _plurality_winner(x, q))


def _borda_winner(x: Profile, q: int) -> int:
    scores = [0] * (q + 1)
    for xi in x:
        for pos, a in enumerate(xi):
            scores[a] += q - pos - 1
    best = max(scores[1:])
    tied = [a for a in range(1, q + 1) if scores[a] == best]
    return min(tied, key=lambda a: x[0].index(a))


def borda_voter1_tiebreak(q: int, n: int) -> SocialChoiceFn:
    """Borda count (position k earns q-k points); ties broken by voter 1's ranking."""
    return SocialChoiceFn(q, n, "borda", lambda x: _borda_winner(x, q))


def tabular(table, q: int, n: int, kind: str = "tabular") -> SocialChoiceFn:
    """Explicit rule backed by a winner table in profile encode order."""
    arr = np.asarray(table, dtype=np.int64)
    expected = rk.profile_count(q, n)
    if arr.shape != (expected,):
        raise DomainError(f"table has length {arr.shape}, expected ({expected},)")
    if arr.size and (arr.min() < 1 or arr.max() > q):
        raise DomainError("table entries must lie in 1..q")
    f = SocialChoiceFn(q, n, kind, lambda x: int(arr[rk.encode_profile(x)]))
    f._cache["table"] = arr
    return f


def random_tabular(rng: np.random.Generator, q: int, n: int) -> SocialChoiceFn:
    """A uniformly random tabular rule."""
    size = rk.profile_count(q, n)
    return tabular(rng.integers(1, q + 1, size=size), q, n, kind="tabular:random")


def table_of(f: SocialChoiceFn, cap: Optional[int] = None) -> list[int]:
    return [int(v) for v in f.table(cap)]


def values_taken(f: SocialChoiceFn, cap: Optional[int] = None) -> set[int]:
    return {int(v) for v in np.unique(f.table(cap))}


# ---------------------------------------------------------------------------
# Neutrality


@dataclass(frozen=True)
class NeutralityVerdict:
    passed: bool
    mode: str
    checked: int
    witness: Optional[tuple[Ranking, Profile]] = None  # (relabeling, profile)

    def __bool__(self) -> bool:
        return self.passed


def is_neutral(
    f: SocialChoiceFn,
    mode: str = "exhaustive",
    samples: int = 10**4,
    seed: int = 0,
    cap: Optional[int] = None,
) -> NeutralityVerdict:
    """Check that relabeling the alternatives commutes with the rule.

    Exhaustive mode checks every (relabeling, profile) pair; sampled mode draws
    `samples` seeded random pairs as a cheap screen.
    """
    if mode == "exhaustive":
        count = rk.check_cap(f.q, f.n, cap)
        if count * math.factorial(f.q) > (rk.DEFAULT_PROFILE_CAP if cap is None else cap):
            raise rk.ProfileCapExceeded(count * math.factorial(f.q), rk.DEFAULT_PROFILE_CAP if cap is None else cap)
        checked = 0
        for y in rk.enumerate_rankings(f.q):
            for x in rk.enumerate_profiles(f.q, f.n, cap):
                checked += 1
                if y[f.fn(x) - 1] != f.fn(rk.relabel_profile(y, x)):
                    return NeutralityVerdict(False, mode, checked, (y, x))
        return NeutralityVerdict(True, mode, checked)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        for k in range(samples):
            y = rk.random_ranking(rng, f.q)
            x = rk.random_profile(rng, f.q, f.n)
            if y[f.fn(x) - 1] != f.fn(rk.relabel_profile(y, x)):
                return NeutralityVerdict(False, mode, k + 1, (y, x))
        return NeutralityVerdict(True, mode, samples)
    raise DomainError(f"unknown neutrality mode {mode!r}")


# ---------------------------------------------------------------------------
# Winner distribution and distances


@dataclass(frozen=True)
class SampledDistribution:
    estimates: tuple[float, ...]
    stderr: tuple[float, ...]
    samples: int
    seed: int


def distribution(
    f: SocialChoiceFn,
    mode: str = "exact",
    samples: int = 10**4,
    seed: int = 0,
    cap: Optional[int] = None,
):
    """Winner frequencies: exact rationals, or sampled estimates with stderr."""
    if mode == "exact":
        counts = np.bincount(f.table(cap), minlength=f.q + 1)[1:]
        total = rk.profile_count(f.q, f.n)
        return [Fraction(int(c), total) for c in counts]
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        counts = np.zeros(f.q + 1, dtype=np.int64)
        for _ in range(samples):
            counts[f.fn(rk.random_profile(rng, f.q, f.n))] += 1
        p = counts[1:] / samples
        se = np.sqrt(p * (1 - p) / samples)
        return SampledDistribution(tuple(p.tolist()), tuple(se.tolist()), samples, seed)
    raise DomainError(f"unknown distribution mode {mode!r}")


def dist(f: SocialChoiceFn, g: SocialChoiceFn, cap: Optional[int] = None) -> Fraction:
    """Fraction of profiles on which f and g disagree."""
    if (f.q, f.n) != (g.q, g.n):
        raise DomainError("dist: rules have different (q, n)")
    diff = int(np.count_nonzero(f.table(cap) != g.table(cap)))
    return Fraction(diff, rk.profile_count(f.q, f.n))


def dist_to_const(f: SocialChoiceFn, cap: Optional[int] = None) -> Fraction:
    mu = distribution(f, cap=cap)
    return 1 - max(mu)


def dist_to_two_valued(f: SocialChoiceFn, cap: Optional[int] = None) -> Fraction:
    mu = sorted(distribution(f, cap=cap), reverse=True)
    return 1 - (mu[0] + mu[1]) if f.q >= 2 else Fraction(0)


def dist_to_dict(f: SocialChoiceFn, cap: Optional[int] = None) -> Fraction:
    """Distance to the class of functions depending on a single coordinate.

    For each coordinate the closest such function is the pointwise conditional
    mode, so the distance is 1 - sum over rankings of the modal winner count,
    minimized over coordinates.
    """
    m = math.factorial(f.q)
    total = rk.profile_count(f.q, f.n)
    table = f.table(cap).reshape((m,) * f.n)
    best_agree = 0
    for i in range(f.n):
        per_sigma = np.moveaxis(table, i, 0).reshape(m, -1)
        agree = 0
        for s in range(m):
            agree += int(np.bincount(per_sigma[s], minlength=f.q + 1)[1:].max())
        best_agree = max(best_agree, agree)
    return 1 - Fraction(best_agree, total)


def dist_to_nonmanip(f: SocialChoiceFn, cap: Optional[int] = None) -> Fraction:
    """Distance to the class of dictators-or-at-most-two-valued functions."""
    return min(dist_to_dict(f, cap), dist_to_two_valued(f, cap))


# ---------------------------------------------------------------------------
# Restriction


def restrict(f: SocialChoiceFn, fixed: dict[int, Ranking]) -> SocialChoiceFn:
    """Plug fixed rankings into the given coordinates (1-based), reducing n."""
    for i, sigma in fixed.items():
        if not 1 <= i <= f.n:
            raise DomainError(f"fixed coordinate {i} outside 1..{f.n}")
        rk.check_ranking(sigma, f.q)
    free = [i for i in range(1, f.n + 1) if i not in fixed]
    if not free:
        raise DomainError("restrict: all coordinates fixed, zero voters left")

    def ev(x: Profile) -> int:
        full = []
        it = iter(x)
        for i in range(1, f.n + 1):
            full.append(fixed[i] if i in fixed else next(it))
        return f.fn(tuple(full))

    return SocialChoiceFn(f.q, len(free), f"{f.kind}|restricted", ev)


# ---------------------------------------------------------------------------
# Tabular file formats


def save_tabular_text(f: SocialChoiceFn, path: str, cap: Optional[int] = None) -> None:
    """Header "q=<q> n=<n>" followed by one winner per line in encode order."""
    with open(path, "w") as fh:
        fh.write(f"q={f.q} n={f.n}\n")
        for w in f.table(cap):
            fh.write(f"{int(w)}\n")


def load_tabular_text(path: str) -> SocialChoiceFn:
    with open(path) as fh:
        header = fh.readline().split()
        try:
            q = int(header[0].removeprefix("q="))
            n = int(header[1].removeprefix("n="))
        except (IndexError, ValueError) as exc:
            raise DomainError(f"bad tabular header in {path}") from exc
        table = [int(line) for line in fh if line.strip()]
    return tabular(table, q, n)


def save_tabular_json(f: SocialChoiceFn, path: str, cap: Optional[int] = None) -> None:
    with open(path, "w") as fh:
        json.dump({"q": f.q, "n": f.n, "table": table_of(f, cap)}, fh)
        fh.write("\n")


def load_tabular_json(path: str) -> SocialChoiceFn:
    with open(path) as fh:
        obj = json.load(fh)
    return tabular(obj["table"], obj["q"], obj["n"])
