"""Rankings, adjacent transpositions and profile enumeration.

A ranking of q alternatives is a tuple of the alternatives 1..q in preference
order: ``x[0]`` is the top choice, ``x[k-1]`` is the alternative ranked at
position k.  A profile is an n-tuple of rankings, one per voter.  Everything
here is an immutable value and every function is pure.

Rankings are indexed densely by their Lehmer code (identity -> 0,
lexicographic order), and profiles by the mixed-radix number over the
per-coordinate codes with coordinate 1 most significant.  This indexing is
what makes tabular social choice functions and exhaustive enumeration cheap.
"""

from __future__ import annotations

import math
from itertools import permutations
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DomainError, ProfileCapExceeded

Ranking = tuple[int, ...]
Profile = tuple[Ranking, ...]
# An adjacent transposition [a:b]; stored as (min, max).
AdjTransposition = tuple[int, int]

DEFAULT_PROFILE_CAP = 10**8


def is_ranking(x: Sequence[int], q: Optional[int] = None) -> bool:
    if q is not None and len(x) != q:
        return False
    return sorted(x) == list(range(1, len(x) + 1))


def check_ranking(x: Sequence[int], q: Optional[int] = None) -> Ranking:
    if not is_ranking(x, q):
        raise DomainError(f"not a ranking of {{1..{q or len(x)}}}: {x!r}")
    return tuple(x)


def identity_ranking(q: int) -> Ranking:
    return tuple(range(1, q + 1))


def rank_of(x: Ranking, a: int) -> int:
    """Position (1-based) at which alternative a is ranked by x."""
    return x.index(a) + 1


def prefers(x: Ranking, a: int, b: int) -> bool:
    """True iff x ranks a above b."""
    return x.index(a) < x.index(b)


def compose(y: Ranking, x: Ranking) -> Ranking:
    """Group composition: the ranking placing y(x(k)) at position k."""
    if len(y) != len(x):
        raise DomainError("compose: rankings have different q")
    return tuple(y[v - 1] for v in x)


def inverse(x: Ranking) -> Ranking:
    q = len(x)
    inv = [0] * q
    for pos, a in enumerate(x):
        inv[a - 1] = pos + 1
    return tuple(inv)


def relabel_profile(y: Ranking, x: Profile) -> Profile:
    """Apply the alternative relabeling y to every coordinate of the profile."""
    return tuple(compose(y, xi) for xi in x)


# ---------------------------------------------------------------------------
# Adjacent transpositions


def adj(a: int, b: int) -> AdjTransposition:
    if a == b:
        raise DomainError("adjacent transposition needs two distinct alternatives")
    return (a, b) if a < b else (b, a)


def all_adjacent_transpositions(q: int) -> list[AdjTransposition]:
    """The set T of all q(q-1)/2 adjacent transpositions."""
    return [(a, b) for a in range(1, q + 1) for b in range(a + 1, q + 1)]


def apply_adjacent(t: AdjTransposition, x: Ranking) -> Ranking:
    """Swap t's two alternatives in x if they occupy neighboring positions.

    If they are not adjacent in x, x is returned unchanged.
    """
    a, b = t
    pa = x.index(a)
    pb = x.index(b)
    if abs(pa - pb) != 1:
        return x
    lst = list(x)
    lst[pa], lst[pb] = lst[pb], lst[pa]
    return tuple(lst)


def apply_adjacent_profile(t: AdjTransposition, x: Profile, i: int) -> Profile:
    """Apply the adjacent transposition t to coordinate i (1-based) of x."""
    return x[: i - 1] + (apply_adjacent(t, x[i - 1]),) + x[i:]


def adjacent_swap_between(x: Ranking, y: Ranking) -> Optional[AdjTransposition]:
    """The transposition t with y = t x, if x and y differ by one adjacent swap."""
    if len(x) != len(y):
        raise DomainError("adjacent_swap_between: rankings have different q")
    diffs = [k for k in range(len(x)) if x[k] != y[k]]
    if len(diffs) != 2:
        return None
    k1, k2 = diffs
    if k2 - k1 != 1:
        return None
    if x[k1] != y[k2] or x[k2] != y[k1]:
        return None
    return adj(x[k1], x[k2])


def bubble_path(x: Ranking, a: int, target_pos: int) -> list[Ranking]:
    """Move alternative a to target_pos by successive adjacent swaps.

    Returns the vertex sequence from x to the result; consecutive vertices
    differ by one adjacent transposition involving a, and the relative order
    of all other alternatives is untouched.  Length is |rank_of(x,a) - target_pos|.
    """
    q = len(x)
    if not 1 <= target_pos <= q:
        raise DomainError(f"target position {target_pos} out of range 1..{q}")
    path = [x]
    cur = list(x)
    pos = cur.index(a)  # 0-based
    tgt = target_pos - 1
    step = -1 if tgt < pos else 1
    while pos != tgt:
        cur[pos], cur[pos + step] = cur[pos + step], cur[pos]
        pos += step
        path.append(tuple(cur))
    return path


# ---------------------------------------------------------------------------
# Dense indexing (Lehmer code) and enumeration


def encode(x: Ranking) -> int:
    """Lehmer index of x in [0, q!-1]; identity maps to 0."""
    q = len(x)
    code = 0
    for i in range(q):
        smaller = sum(1 for j in range(i + 1, q) if x[j] < x[i])
        code = code * (q - i) + smaller
    return code


def decode(code: int, q: int) -> Ranking:
    """Inverse of :func:`encode`."""
    if not 0 <= code < math.factorial(q):
        raise DomainError(f"ranking index {code} out of range for q={q}")
    digits = []
    for base in range(1, q + 1):
        digits.append(code % base)
        code //= base
    digits.reverse()
    pool = list(range(1, q + 1))
    return tuple(pool.pop(d) for d in digits)


def encode_profile(x: Profile) -> int:
    """Mixed-radix profile index, coordinate 1 most significant."""
    m = math.factorial(len(x[0]))
    code = 0
    for xi in x:
        code = code * m + encode(xi)
    return code


def decode_profile(code: int, q: int, n: int) -> Profile:
    m = math.factorial(q)
    if not 0 <= code < m**n:
        raise DomainError(f"profile index {code} out of range for q={q}, n={n}")
    coords = []
    for _ in range(n):
        coords.append(code % m)
        code //= m
    coords.reverse()
    return tuple(decode(c, q) for c in coords)


def profile_count(q: int, n: int) -> int:
    return math.factorial(q) ** n


def check_cap(q: int, n: int, cap: Optional[int] = None) -> int:
    """Number of profiles, raising ProfileCapExceeded if it is above the cap."""
    count = profile_count(q, n)
    cap = DEFAULT_PROFILE_CAP if cap is None else cap
    if count > cap:
        raise ProfileCapExceeded(count, cap)
    return count


def enumerate_rankings(q: int) -> Iterator[Ranking]:
    """All q! rankings in encode order."""
    return iter(permutations(range(1, q + 1)))


def enumerate_profiles(q: int, n: int, cap: Optional[int] = None) -> Iterator[Profile]:
    """All (q!)^n profiles in encode order (coordinate 1 most significant)."""
    check_cap(q, n, cap)
    rankings = list(enumerate_rankings(q))

    def gen() -> Iterator[Profile]:
        idx = [0] * n
        while True:
            yield tuple(rankings[i] for i in idx)
            k = n - 1
            while k >= 0 and idx[k] == len(rankings) - 1:
                idx[k] = 0
                k -= 1
            if k < 0:
                return
            idx[k] += 1

    return gen()


def random_ranking(rng: np.random.Generator, q: int) -> Ranking:
    """A uniform ranking, reproducible from the generator's seed."""
    return tuple(int(v) for v in rng.permutation(q) + 1)


def random_profile(rng: np.random.Generator, q: int, n: int) -> Profile:
    return tuple(random_ranking(rng, q) for _ in range(n))


# ---------------------------------------------------------------------------
# Text form


def format_ranking(x: Ranking) -> str:
    """Alternatives top-to-bottom separated by '>', e.g. "3>1>2"."""
    return ">".join(str(a) for a in x)


def parse_ranking(s: str, q: Optional[int] = None) -> Ranking:
    try:
        parts = tuple(int(p) for p in s.strip().split(">"))
    except ValueError as exc:
        raise DomainError(f"cannot parse ranking {s!r}") from exc
    return check_ranking(parts, q)


def format_profile(x: Profile) -> str:
    """Rankings joined by '|', e.g. "3>1>2|1>2>3"."""
    return "|".join(format_ranking(xi) for xi in x)


def parse_profile(s: str, q: Optional[int] = None) -> Profile:
    parts = s.strip().split("|")
    prof = tuple(parse_ranking(p, q) for p in parts)
    if len({len(xi) for xi in prof}) != 1:
        raise DomainError("profile mixes rankings of different q")
    return prof
