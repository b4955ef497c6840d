"""Canonical path maps, group-action counting, and manipulation extraction.

A canonical path map assigns every (source, target) pair a bounded-length
path; counting how many paths cross any one vertex (the inverse-image census)
turns large boundaries into many manipulation points.  This module ships the
concrete constructions on rankings and profiles, the group actions that make
the symmetric counting bound work, and the extraction maps that walk a path
and return a verified manipulation witness.

Everything here is deterministic: bubbling ties resolve upward (toward
position 1), and brute-force sub-searches scan profiles in encode order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import manipulation as manip
from . import rankings as rk
from . import scf as scf_mod
from .errors import DomainError, TheoremViolation
from .influence import BoundaryEdge
from .manipulation import ManipulationWitness
from .rankings import Profile, Ranking
from .scf import SocialChoiceFn

# Vertices are rankings, profiles, or (profile, profile) pairs.
PairVertex = tuple[Profile, Profile]


@dataclass(frozen=True)
class Path:
    """A vertex sequence with named, possibly single-vertex parts.

    parts is a tuple of (label, first_index, last_index); consecutive parts
    share their junction vertex unless the part boundary is itself an edge
    (then last_index of one part + 1 = first_index of the next).
    """

    vertices: tuple
    parts: tuple[tuple[str, int, int], ...] = ()

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def part(self, label: str) -> tuple:
        for name, lo, hi in self.parts:
            if name == label:
                return self.vertices[lo : hi + 1]
        raise DomainError(f"path has no part {label!r}")

    def part_bounds(self, label: str) -> tuple[int, int]:
        for name, lo, hi in self.parts:
            if name == label:
                return lo, hi
        raise DomainError(f"path has no part {label!r}")

    def edges(self):
        return list(zip(self.vertices, self.vertices[1:]))


@dataclass(frozen=True)
class PathMap:
    """A canonical path map from L1 to L2 with a declared maximum length."""

    name: str
    L1: tuple
    L2: tuple
    generator: Callable
    max_length: int

    def __call__(self, x, y) -> Path:
        p = self.generator(x, y)
        if p.vertices[0] != x or p.vertices[-1] != y:
            raise TheoremViolation(f"path map {self.name} missed its endpoints")
        return p


@dataclass(frozen=True)
class GroupAction:
    """A finite transformation group; elements are (key, callable) pairs."""

    name: str
    elements: tuple[tuple[object, Callable], ...]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class InvarianceVerdict:
    passed: bool
    mode: str
    checked: int
    witness: Optional[tuple] = None  # (h key, x, y)

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class InverseImageCensus:
    map_name: str
    bound: Union[int, Fraction]
    max_total: int
    max_per_index: int
    lengths_ok: bool
    passed: bool
    per_index: dict  # (i, vertex) -> count
    totals: dict  # vertex -> count of distinct (x, y) pairs visiting it


# ---------------------------------------------------------------------------
# Group actions


def left_composition_group(q: int) -> GroupAction:
    """All q! relabelings p acting on rankings by x -> p x."""
    els = tuple((p, (lambda p: lambda x: rk.compose(p, x))(p)) for p in rk.enumerate_rankings(q))
    return GroupAction(f"left_composition(q={q})", els)


def relabeling_group_fixing(q: int, fixed: Sequence[int]) -> GroupAction:
    """Relabelings that fix every alternative in `fixed`, acting by x -> p x."""
    fixed_set = set(fixed)
    els = []
    for p in rk.enumerate_rankings(q):
        if all(p[e - 1] == e for e in fixed_set):
            els.append((p, (lambda p: lambda x: rk.compose(p, x))(p)))
    return GroupAction(f"relabeling_fixing({sorted(fixed_set)},q={q})", tuple(els))


def identity_group() -> GroupAction:
    return GroupAction("identity", ((None, lambda v: v),))


# ---------------------------------------------------------------------------
# Ranking-level constructions


def _swap_seq(cur: list, pos: int, target: int, out: list) -> int:
    """Move the element at `pos` to `target` by adjacent swaps, appending vertices."""
    step = 1 if target > pos else -1
    while pos != target:
        cur[pos], cur[pos + step] = cur[pos + step], cur[pos]
        pos += step
        out.append(tuple(cur))
    return pos


def sort_path(x: Ranking, y: Ranking) -> Path:
    """Bubble-sort path: place y's top element, then its second, and so on.

    Length at most q(q-1)/2; every edge is one adjacent transposition.
    """
    q = len(x)
    cur = list(x)
    verts = [tuple(cur)]
    for t in range(q):
        _swap_seq(cur, cur.index(y[t]), t, verts)
    return Path(tuple(verts), (("path", 0, len(verts) - 1),))


def order_preserving_path(x: Ranking, z: Ranking, a: int, b: int) -> Path:
    """Adjacent-transposition path from x to z that never swaps a with b.

    Requires a, b in the same relative order in x and z; every vertex keeps
    that order.  Non-a,b elements are bubbled to z's order first (pushing a, b
    to the bottom), then a and b are bubbled to their final positions.
    Length at most q(q-1)/2 + 2(q-1) <= q^2.
    """
    if rk.prefers(x, a, b) != rk.prefers(z, a, b):
        raise DomainError("order-preserving path needs a,b in the same order at both ends")
    cur = list(x)
    verts = [tuple(cur)]
    others = [e for e in z if e not in (a, b)]
    for t, e in enumerate(others):
        _swap_seq(cur, cur.index(e), t, verts)
    # Now positions 1..q-2 match z's non-a,b order; a and b sit at the bottom
    # in their preserved relative order.
    first, second = (a, b) if rk.prefers(z, a, b) else (b, a)
    _swap_seq(cur, cur.index(first), rk.rank_of(z, first) - 1, verts)
    _swap_seq(cur, cur.index(second), rk.rank_of(z, second) - 1, verts)
    if tuple(cur) != z:
        raise TheoremViolation("order-preserving path missed its endpoint")
    return Path(tuple(verts), (("path", 0, len(verts) - 1),))


def sim_canon_path(a: int, b: int, x: Ranking, z: Ranking) -> Path:
    """Three-vertex path x, y, z with y = z, a,b-swapped iff their order differs from x.

    The step x -> y preserves the order of a and b (Type I); y -> z preserves
    the order of every other pair (Type II).  When the orders already agree the
    middle vertex degenerates to z.
    """
    if a == b:
        raise DomainError("sim_canon_path needs two distinct alternatives")
    if rk.prefers(x, a, b) == rk.prefers(z, a, b):
        y = z
    else:
        lst = list(z)
        pa, pb = lst.index(a), lst.index(b)
        lst[pa], lst[pb] = lst[pb], lst[pa]
        y = tuple(lst)
    return Path((x, y, z), (("I", 0, 1), ("II", 1, 2)))


def refined_coord_path_generic(a: int, b: int, c: int, d: int, x: Ranking, z: Ranking) -> Path:
    """Two-part adjacent-transposition path: part I fixes a,b's order, part Pi fixes c,d's.

    Part I aligns c,d's relative order with z (bubbling c to d's position and
    d back) and never swaps a with b; part Pi is the order-preserving path on
    (c, d).  Length at most q^2 + 2q; for each junction value there are
    exactly q! source pairs.
    """
    if len({a, b, c, d}) != 4:
        raise DomainError("refined_coord_path_generic needs four distinct alternatives")
    cur = list(x)
    verts = [tuple(cur)]
    if rk.prefers(x, c, d) != rk.prefers(z, c, d):
        pc, pd = cur.index(c), cur.index(d)
        _swap_seq(cur, pc, pd, verts)
        _swap_seq(cur, cur.index(d), pc, verts)
    junction = len(verts) - 1
    tail = order_preserving_path(tuple(cur), z, c, d)
    verts.extend(tail.vertices[1:])
    return Path(tuple(verts), (("I", 0, junction), ("Π", junction, len(verts) - 1)))


def _block_positions(x: Ranking, elems: set) -> tuple[int, int]:
    """(lo, hi) 0-based positions of a contiguous block holding exactly `elems`."""
    pos = sorted(k for k, v in enumerate(x) if v in elems)
    if pos[-1] - pos[0] != len(pos) - 1:
        raise DomainError(f"elements {sorted(elems)} not contiguous in {x}")
    return pos[0], pos[-1]


def _bubble_toward_block(cur: list, e: int, block: set, out: list) -> None:
    """Bubble e until adjacent to the contiguous block, never entering it."""
    lo, hi = _block_positions(tuple(cur), block)
    pos = cur.index(e)
    if pos < lo - 1:
        _swap_seq(cur, pos, lo - 1, out)
    elif pos > hi + 1:
        _swap_seq(cur, pos, hi + 1, out)


def refined_coord_path_block(a: int, b: int, c: int, d: int, x: Ranking, z: Ranking) -> Path:
    """Three-part path from x (a,b adjacent) to z: parts I, Delta, Pi.

    I bubbles c, then d, until adjacent to the a,b block without ever moving
    a or b; Delta is one edge reordering the 4-element block to z's internal
    order (single-vertex when the orders already match); Pi is the
    order-preserving path on (c, d).  Length at most q^2 + 2q.
    """
    if len({a, b, c, d}) != 4:
        raise DomainError("refined_coord_path_block needs four distinct alternatives")
    if abs(x.index(a) - x.index(b)) != 1:
        raise DomainError(f"a={a}, b={b} not adjacent in {x}")
    cur = list(x)
    verts = [tuple(cur)]
    _bubble_toward_block(cur, c, {a, b}, verts)
    _bubble_toward_block(cur, d, {a, b, c}, verts)
    pre = len(verts) - 1
    abcd = {a, b, c, d}
    lo, hi = _block_positions(tuple(cur), abcd)
    want = [e for e in z if e in abcd]
    if cur[lo : hi + 1] != want:
        cur[lo : hi + 1] = want
        verts.append(tuple(cur))
    post = len(verts) - 1
    tail = order_preserving_path(tuple(cur), z, c, d)
    verts.extend(tail.vertices[1:])
    return Path(
        tuple(verts),
        (("I", 0, pre), ("Δ", pre, post), ("Π", post, len(verts) - 1)),
    )


# ---------------------------------------------------------------------------
# Profile-level constructions


def profile_path_v1(
    a: int, b: int, c: int, d: int, start: BoundaryEdge, end: BoundaryEdge
) -> Path:
    """The first profile-pair path: all Type I moves, then all Type II moves.

    start = (x, x') differs in coordinate i with winners (a, b); end = (z, z')
    differs in coordinate j with winners (c, d).  Coordinates are internally
    relabeled so (i, j) become (n-1, n); coordinate k of both pair members is
    set to the middle vertex of the three-vertex path at the k-th step of each
    half.  The middle edge joins the two halves; for n = 2 it is the whole path.
    """
    if len({a, b, c, d}) != 4:
        raise DomainError("profile_path_v1 needs four distinct alternatives")
    i, j = start.i, end.i
    if i == j:
        raise DomainError("profile_path_v1 needs two distinct coordinates")
    x, xp = start.x, start.y
    z, zp = end.x, end.y
    n = len(x)
    # Relabel coordinates so i -> n-1 and j -> n (1-based positions).
    order = [k for k in range(1, n + 1) if k not in (i, j)] + [i, j]
    inv = [0] * n
    for newpos, old in enumerate(order):
        inv[old - 1] = newpos

    def fwd(p: Profile) -> Profile:
        return tuple(p[k - 1] for k in order)

    def back(p: Profile) -> Profile:
        return tuple(p[inv[k]] for k in range(n))

    X, Xp, Z, Zp = fwd(x), fwd(xp), fwd(z), fwd(zp)
    mids = [sim_canon_path(a, b, X[k], Z[k]).vertices[1] for k in range(n - 2)]

    first: list[PairVertex] = [(X, Xp)]
    curx, curxp = list(X), list(Xp)
    for k in range(n - 2):
        curx[k] = mids[k]
        curxp[k] = mids[k]
        first.append((tuple(curx), tuple(curxp)))
    second: list[PairVertex] = [(Z, Zp)]
    curz, curzp = list(Z), list(Zp)
    for k in range(n - 2):
        curz[k] = mids[k]
        curzp[k] = mids[k]
        second.append((tuple(curz), tuple(curzp)))
    verts = first + second[::-1]
    verts = [(back(u), back(v)) for u, v in verts]
    m = n - 2  # index of the last first-half vertex
    return Path(
        tuple(verts),
        (("I", 0, m), ("middle", m, m + 1), ("II", m + 1, len(verts) - 1)),
    )


def refined_profile_path(
    a: int, b: int, c: int, d: int, i: int, j: int, start: PairVertex, end: PairVertex
) -> Path:
    """The refined profile-pair path from B_i^{a,b;[a:b]}-type pairs to B_j^{c,d;[c:d]}-type.

    Both pair members move through the same adjacent transpositions.  Part Ī
    keeps the partner equal to the lead with a,b swapped in coordinate i; part
    Π̄ keeps it equal to the lead with c,d swapped in coordinate j; Δ̄ is the
    single joining edge, touching only the a,b,c,d blocks in coordinates i, j.
    """
    if len({a, b, c, d}) != 4:
        raise DomainError("refined_profile_path needs four distinct alternatives")
    if i == j:
        raise DomainError("refined_profile_path needs two distinct coordinates")
    x, xp = start
    z, zp = end
    n = len(x)
    t_ab, t_cd = rk.adj(a, b), rk.adj(c, d)
    if xp != rk.apply_adjacent_profile(t_ab, x, i) or xp == x:
        raise DomainError("start pair must differ by [a:b] in coordinate i")
    if zp != rk.apply_adjacent_profile(t_cd, z, j) or zp == z:
        raise DomainError("end pair must differ by [c:d] in coordinate j")

    # Per-coordinate sub-paths, each split into its Ī portion, its Δ̄ step
    # (identical endpoints when degenerate) and its Π̄ portion.
    ipart: dict[int, tuple] = {}
    ppart: dict[int, tuple] = {}
    delta: dict[int, tuple[Ranking, Ranking]] = {}
    for k in range(1, n + 1):
        if k == i:
            p = refined_coord_path_block(a, b, c, d, x[k - 1], z[k - 1])
            lo, hi = p.part_bounds("Δ")
            ipart[k] = p.vertices[: lo + 1]
            delta[k] = (p.vertices[lo], p.vertices[hi])
            ppart[k] = p.vertices[hi:]
        elif k == j:
            # Reverse of the block path from z_j to x_j with roles swapped.
            p = refined_coord_path_block(c, d, a, b, z[k - 1], x[k - 1])
            lo, hi = p.part_bounds("Δ")
            ipart[k] = p.vertices[hi:][::-1]  # x_j down to the post-Δ vertex
            delta[k] = (p.vertices[hi], p.vertices[lo])
            ppart[k] = p.vertices[: lo + 1][::-1]  # pre-Δ vertex down to z_j
        else:
            p = refined_coord_path_generic(a, b, c, d, x[k - 1], z[k - 1])
            _, junc = p.part_bounds("I")
            ipart[k] = p.vertices[: junc + 1]
            delta[k] = (p.vertices[junc], p.vertices[junc])
            ppart[k] = p.vertices[junc:]

    def lead_walk(state: list, parts: dict[int, tuple], out: list) -> None:
        for k in range(1, n + 1):
            if parts[k][0] != state[k - 1]:
                raise TheoremViolation("coordinate sub-paths do not chain")
            for v in parts[k][1:]:
                state[k - 1] = v
                out.append(tuple(state))

    state = list(x)
    lead_i: list[Profile] = [tuple(state)]
    lead_walk(state, ipart, lead_i)
    state[i - 1] = delta[i][1]
    state[j - 1] = delta[j][1]
    delta_right = tuple(state)
    lead_p: list[Profile] = [delta_right]
    lead_walk(state, ppart, lead_p)
    if tuple(state) != z:
        raise TheoremViolation("refined profile path missed its endpoint")

    verts: list[PairVertex] = [(v, rk.apply_adjacent_profile(t_ab, v, i)) for v in lead_i]
    verts += [(w, rk.apply_adjacent_profile(t_cd, w, j)) for w in lead_p]
    m = len(lead_i) - 1
    return Path(
        tuple(verts),
        (("Ī", 0, m), ("Δ̄", m, m + 1), ("Π̄", m + 1, len(verts) - 1)),
    )


# ---------------------------------------------------------------------------
# Invariance verification and inverse-image censuses


def verify_invariance(
    pm: PathMap,
    H: GroupAction,
    mode: str = "exhaustive",
    samples: int = 1000,
    seed: int = 0,
) -> InvarianceVerdict:
    """Check H-closedness of the domains and Γ(hx, hy) = hΓ(x, y)."""
    L1, L2 = set(pm.L1), set(pm.L2)
    for key, h in H.elements:
        if {h(v) for v in L1} != L1 or {h(v) for v in L2} != L2:
            raise DomainError(f"domain of {pm.name} not closed under {H.name} element {key!r}")

    def check(key, h, x, y) -> bool:
        lhs = pm(h(x), h(y)).vertices
        rhs = tuple(h(v) for v in pm(x, y).vertices)
        return lhs == rhs

    checked = 0
    if mode == "exhaustive":
        for key, h in H.elements:
            for x in pm.L1:
                for y in pm.L2:
                    checked += 1
                    if not check(key, h, x, y):
                        return InvarianceVerdict(False, mode, checked, (key, x, y))
        return InvarianceVerdict(True, mode, checked)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            key, h = H.elements[rng.integers(len(H.elements))]
            x = pm.L1[rng.integers(len(pm.L1))]
            y = pm.L2[rng.integers(len(pm.L2))]
            checked += 1
            if not check(key, h, x, y):
                return InvarianceVerdict(False, mode, checked, (key, x, y))
        return InvarianceVerdict(True, mode, checked)
    raise DomainError(f"unknown invariance mode {mode!r}")


def verify_fixed_point_free(H: GroupAction, universe: Iterable, identity_key) -> bool:
    for key, h in H.elements:
        if key == identity_key:
            continue
        for v in universe:
            if h(v) == v:
                return False
    return True


def inverse_image_census(pm: PathMap, bound, per_index_bound=None) -> InverseImageCensus:
    """Exact per-vertex path-crossing counts, compared against the declared bound.

    totals[z] counts distinct (x, y) pairs whose path visits z at any index;
    per_index[(i, z)] counts pairs whose path has z as its i-th vertex.
    Vertex 0 occupancy is counted (degenerate sub-paths are single vertices).
    """
    per_index: dict = {}
    visiting: dict = {}
    lengths_ok = True
    for x in pm.L1:
        for y in pm.L2:
            p = pm(x, y)
            if p.length > pm.max_length:
                lengths_ok = False
            for idx, v in enumerate(p.vertices):
                per_index[(idx, v)] = per_index.get((idx, v), 0) + 1
                visiting.setdefault(v, set()).add((x, y))
    totals = {v: len(pairs) for v, pairs in visiting.items()}
    max_total = max(totals.values(), default=0)
    max_per_index = max(per_index.values(), default=0)
    passed = lengths_ok and max_total <= bound
    if per_index_bound is not None:
        passed = passed and max_per_index <= per_index_bound
    return InverseImageCensus(
        pm.name, bound, max_total, max_per_index, lengths_ok, passed, per_index, totals
    )


def junction_counts(pm: PathMap, part: str) -> dict:
    """How many (x, y) pairs put each vertex at the end of the named part."""
    counts: dict = {}
    for x in pm.L1:
        for y in pm.L2:
            p = pm(x, y)
            _, hi = p.part_bounds(part)
            v = p.vertices[hi]
            counts[v] = counts.get(v, 0) + 1
    return counts


# Shipped (map, H) pairs for the counting-bound verification.


def shipped_path_maps(q: int) -> list[tuple[PathMap, GroupAction, int]]:
    """(map, group, declared total bound) triples verified exhaustively in tests."""
    rankings = tuple(rk.enumerate_rankings(q))
    out = []
    fac = 1
    for t in range(2, q + 1):
        fac *= t
    sort_pm = PathMap(f"sort(q={q})", rankings, rankings, sort_path, q * (q - 1) // 2)
    out.append((sort_pm, left_composition_group(q), q * q * fac // 2))
    if q >= 4:
        a, b, c, d = 1, 2, 3, 4
        B = tuple(r for r in rankings if rk.prefers(r, a, b))
        opp = PathMap(
            f"order_preserving(q={q})", B, B, lambda x, z: order_preserving_path(x, z, a, b), q * q
        )
        out.append((opp, relabeling_group_fixing(q, (a, b)), q**4 * fac))
        gen = PathMap(
            f"refined_generic(q={q})",
            rankings,
            rankings,
            lambda x, z: refined_coord_path_generic(a, b, c, d, x, z),
            q * q + 2 * q,
        )
        out.append((gen, relabeling_group_fixing(q, (a, b, c, d)), q**4 * fac))
        X = tuple(r for r in rankings if abs(r.index(a) - r.index(b)) == 1)
        blk = PathMap(
            f"refined_block(q={q})",
            X,
            rankings,
            lambda x, z: refined_coord_path_block(a, b, c, d, x, z),
            q * q + 2 * q,
        )
        out.append((blk, relabeling_group_fixing(q, (a, b, c, d)), 2 * q**3 * fac))
    return out


# ---------------------------------------------------------------------------
# Extraction maps


_flag_cache: dict = {}


def _flags(f: SocialChoiceFn, r: Optional[int] = None, cap=None) -> np.ndarray:
    key = (f, r)
    if key not in _flag_cache:
        _flag_cache[key] = manip.manipulation_flags(f, r, cap)
    return _flag_cache[key]


def _is_manip(f: SocialChoiceFn, x: Profile, cap=None) -> bool:
    return bool(_flags(f, None, cap)[rk.encode_profile(x)])


def _check2(f: SocialChoiceFn, x: Profile, cap=None) -> Optional[ManipulationWitness]:
    if _flags(f, 2, cap)[rk.encode_profile(x)]:
        return manip.is_r_manipulation_point(f, x, 2)
    return None


def same_except_shift(r1: Ranking, r2: Ranking, e: int) -> bool:
    """True iff r1 equals r2 after arbitrarily shifting the position of e."""
    return tuple(v for v in r1 if v != e) == tuple(v for v in r2 if v != e)


def extract_2manip_from_refined_boundary(f: SocialChoiceFn, edge: BoundaryEdge) -> ManipulationWitness:
    """A 2-manipulation witness from a refined boundary edge whose swap is not [a:b].

    The swap preserves the relative order of the two winners, so exactly one
    endpoint prefers the other's winner and manipulates by the single swap.
    """
    x, y, i, z = edge.x, edge.y, edge.i, edge.z
    if z is None:
        raise DomainError("edge carries no adjacent transposition")
    a, b = f.fn(x), f.fn(y)
    if a == b:
        raise DomainError("edge endpoints share a winner; not a boundary edge")
    if x[i - 1] != rk.apply_adjacent(z, y[i - 1]) or x[i - 1] == y[i - 1]:
        raise DomainError("edge members do not differ by the declared transposition")
    if z == rk.adj(a, b):
        raise DomainError("swap equals [a:b]; the dichotomy does not apply")
    if rk.prefers(x[i - 1], b, a):
        w = ManipulationWitness(x, y, i, 2)
    else:
        w = ManipulationWitness(y, x, i, 2)
    if not manip.is_manipulation_pair(f, w.x, w.y):
        raise TheoremViolation("refined boundary edge produced no 2-manipulation")
    return w


def _lemma61_witness(
    f: SocialChoiceFn, v: Profile, w: Profile, k: int
) -> Optional[ManipulationWitness]:
    """2-witness from a one-swap pair with distinct winners, unless the swap is the winner pair."""
    fv, fw = f.fn(v), f.fn(w)
    if fv == fw:
        return None
    z = rk.adjacent_swap_between(v[k - 1], w[k - 1])
    if z is None or z == rk.adj(fv, fw):
        return None
    if rk.prefers(v[k - 1], fw, fv):
        return ManipulationWitness(v, w, k, 2)
    return ManipulationWitness(w, v, k, 2)


_gs3_cache: dict = {}
_gs4_cache: dict = {}


def _block_slots(x: Ranking, elems: set) -> list[int]:
    lo, hi = _block_positions(x, elems)
    return list(range(lo, hi + 1))


def _reorder_block(x: Ranking, slots: list[int], order: Sequence[int]) -> Ranking:
    lst = list(x)
    for s, e in zip(slots, order):
        lst[s] = e
    return tuple(lst)


def _restricted_gs_search(
    f: SocialChoiceFn,
    base: Profile,
    coords: tuple[int, int],
    slots: tuple[list[int], list[int]],
    elems: tuple[int, ...],
    cap=None,
) -> Optional[ManipulationWitness]:
    """Brute-force manipulation of f over block reorderings in two coordinates.

    Scans restricted profiles in lexicographic order over the orderings of
    `elems` (sorted-element permutation order), then deviations in the same
    order, and returns the first pair where the deviating voter prefers the
    new winner under their original full ranking.
    """
    orders = list(permutations(sorted(elems)))
    i, j = coords

    def build(o1, o2) -> Profile:
        p = _reorder_block(base[i - 1], slots[0], o1)
        q_ = _reorder_block(base[j - 1], slots[1], o2)
        out = list(base)
        out[i - 1] = p
        out[j - 1] = q_
        return tuple(out)

    for o1 in orders:
        for o2 in orders:
            u = build(o1, o2)
            wu = f.fn(u)
            for t, coord in ((0, i), (1, j)):
                for o in orders:
                    if o == (o1, o2)[t]:
                        continue
                    v = build(o, o2) if t == 0 else build(o1, o)
                    if rk.prefers(u[coord - 1], f.fn(v), wu):
                        r = manip.block_span(u[coord - 1], v[coord - 1])
                        return ManipulationWitness(u, v, coord, r)
    return None


def extract_3manip_from_triple(
    f: SocialChoiceFn,
    x: Profile,
    y: Profile,
    z: Profile,
    i: int,
    j: int,
    a: int,
    b: int,
    c: int,
    cap=None,
) -> ManipulationWitness:
    """A 3-manipulation witness from boundary pairs (x,y) in coordinate i and (z,y) in j.

    Requires f(x)=a, f(y)=b, f(z)=c with a,b,c distinct and i != j, the pairs
    differing by one adjacent transposition.  Follows the constructive proof:
    scan the triple for 2-manipulations, bubble c toward the a,b block in
    coordinate i of all three profiles (rechecking at every step), bubble a
    toward the b,c block in coordinate j, then brute-force the two-voter
    three-alternative block restriction.
    """
    if len({a, b, c}) != 3 or i == j:
        raise DomainError("extract_3manip_from_triple needs distinct a,b,c and i != j")
    if f.fn(x) != a or f.fn(y) != b or f.fn(z) != c:
        raise DomainError("winner pattern (a, b, c) does not match the triple")
    if rk.adjacent_swap_between(x[i - 1], y[i - 1]) is None or any(
        x[k] != y[k] for k in range(f.n) if k != i - 1
    ):
        raise DomainError("(x, y) is not an adjacent-swap pair in coordinate i")
    if rk.adjacent_swap_between(z[j - 1], y[j - 1]) is None or any(
        z[k] != y[k] for k in range(f.n) if k != j - 1
    ):
        raise DomainError("(z, y) is not an adjacent-swap pair in coordinate j")

    for p in (x, y, z):
        w = _check2(f, p, cap)
        if w is not None:
            return w
    # No 2-manipulation at the corners forces the swaps to be [a:b] and [c:b].
    if x[i - 1] != rk.apply_adjacent(rk.adj(a, b), y[i - 1]):
        raise TheoremViolation("swap is not [a:b] yet neither endpoint 2-manipulates")
    if z[j - 1] != rk.apply_adjacent(rk.adj(c, b), y[j - 1]):
        raise TheoremViolation("swap is not [c:b] yet neither endpoint 2-manipulates")

    cx, cy, cz = list(x), list(y), list(z)

    def bubble_all(coord: int, e: int, block: set) -> Optional[ManipulationWitness]:
        # The three coordinate-`coord` rankings agree on everything outside the
        # block, so the same swap sequence applies to all of them.
        while True:
            ri = cy[coord - 1]
            lo, hi = _block_positions(ri, block)
            pos = ri.index(e)
            if pos in (lo - 1, hi + 1):
                return None
            other = ri[pos - 1] if pos > hi else ri[pos + 1]
            t = rk.adj(e, other)
            for cur in (cx, cy, cz):
                cur[coord - 1] = rk.apply_adjacent(t, cur[coord - 1])
            for cur in (cx, cy, cz):
                w = _check2(f, tuple(cur), cap)
                if w is not None:
                    return w

    w = bubble_all(i, c, {a, b})
    if w is not None:
        return w
    w = bubble_all(j, a, {b, c})
    if w is not None:
        return w

    base = tuple(cx)  # x'' in the construction
    elems = (a, b, c)
    slots_i = _block_slots(base[i - 1], set(elems))
    slots_j = _block_slots(base[j - 1], set(elems))
    key = (f, rk.encode_profile(base), i, j, elems)
    if key in _gs3_cache:
        cached = _gs3_cache[key]
        if cached is None:
            raise TheoremViolation("block restriction yielded no witness (cached)")
        return cached

    orders = list(permutations(sorted(elems)))
    escape = False
    for o1 in orders:
        for o2 in orders:
            u = list(base)
            u[i - 1] = _reorder_block(base[i - 1], slots_i, o1)
            u[j - 1] = _reorder_block(base[j - 1], slots_j, o2)
            if f.fn(tuple(u)) not in elems:
                escape = True
                break
        if escape:
            break
    if escape:
        # A value escaped {a,b,c}: some block reordering is a 2-manipulation point.
        for o1 in orders:
            for o2 in orders:
                u = list(base)
                u[i - 1] = _reorder_block(base[i - 1], slots_i, o1)
                u[j - 1] = _reorder_block(base[j - 1], slots_j, o2)
                w = _check2(f, tuple(u), cap)
                if w is not None:
                    _gs3_cache[key] = w
                    return w
        _gs3_cache[key] = None
        raise TheoremViolation("escaping value produced no 2-manipulation point")

    w = _restricted_gs_search(f, base, (i, j), (slots_i, slots_j), elems, cap)
    _gs3_cache[key] = w
    if w is None:
        raise TheoremViolation("three-valued block restriction has no manipulation")
    if not manip.is_manipulation_pair(f, w.x, w.y):
        raise TheoremViolation("extracted witness failed re-verification")
    return w


def triple_locality_ok(
    point: Profile, x: Profile, y: Profile, z: Profile, i: int, j: int, a: int, c: int
) -> bool:
    """The locality relation for triple extraction outputs.

    The point matches y outside {i, j}; coordinate i is x_i or y_i with c
    shifted; coordinate j is z_j or y_j with a shifted.
    """
    n = len(y)
    if any(point[k] != y[k] for k in range(n) if k + 1 not in (i, j)):
        return False
    ok_i = same_except_shift(point[i - 1], x[i - 1], c) or same_except_shift(
        point[i - 1], y[i - 1], c
    )
    ok_j = same_except_shift(point[j - 1], z[j - 1], a) or same_except_shift(
        point[j - 1], y[j - 1], a
    )
    return ok_i and ok_j


def extract_manipulation_v1(
    f: SocialChoiceFn, start: BoundaryEdge, end: BoundaryEdge, cap=None
) -> Profile:
    """The first extraction map h: walk the profile-pair path to a manipulation point.

    Scans the first-half edges forward, then the middle edge, then the
    second-half edges backward from the end.  At the first qualifying edge,
    case I returns a manipulable edge member directly; case II (three or more
    winners among the four members) brute-forces the two-coordinate
    restriction and returns its lexicographically smallest manipulation point
    in profile encode order.
    """
    a, b = f.fn(start.x), f.fn(start.y)
    c, d = f.fn(end.x), f.fn(end.y)
    if len({a, b, c, d}) != 4:
        raise DomainError("extract_manipulation_v1 needs four distinct winners")
    if start.i == end.i:
        raise DomainError("extract_manipulation_v1 needs two distinct coordinates")
    path = profile_path_v1(a, b, c, d, start, end)
    verts = path.vertices
    n = f.n
    mlo, mhi = path.part_bounds("middle")
    order = list(range(mlo)) + [mlo] + list(range(len(verts) - 2, mhi - 1, -1))

    flags = _flags(f, None, cap)
    for t in order:
        (u, up), (v, vp) = verts[t], verts[t + 1]
        members = (u, up, v, vp)
        for p in members:
            if flags[rk.encode_profile(p)]:
                return p
        vals = {f.fn(p) for p in members}
        if len(vals) < 3:
            continue
        diff = sorted(
            {k for p in members for k in range(n) if p[k] != members[0][k]}
        )
        if len(diff) != 2:
            raise TheoremViolation(f"case-II edge members differ in {len(diff)} coordinates")
        fixed = {k + 1: u[k] for k in range(n) if k not in diff}
        point = _case2_point(f, fixed, diff, cap)
        if point is not None:
            return point
    raise TheoremViolation("no qualifying edge on the manipulation path")


def _case2_point(
    f: SocialChoiceFn, fixed: dict, diff: list[int], cap=None
) -> Optional[Profile]:
    """Lexicographically smallest manipulation point of the 2-coordinate restriction."""
    if fixed:
        key = (f, tuple(sorted((k, v) for k, v in fixed.items())))
        if key not in _gs4_cache:
            fr = scf_mod.restrict(f, fixed)
            rflags = manip.manipulation_flags(fr, None, cap)
            idx = np.nonzero(rflags)[0]
            _gs4_cache[key] = int(idx[0]) if idx.size else None
        code = _gs4_cache[key]
        if code is None:
            return None
        sub = rk.decode_profile(code, f.q, f.n - len(fixed))
        out, it = [], iter(sub)
        for k in range(1, f.n + 1):
            out.append(fixed[k] if k in fixed else next(it))
        return tuple(out)
    idx = np.nonzero(_flags(f, None, cap))[0]
    return rk.decode_profile(int(idx[0]), f.q, f.n) if idx.size else None


def extract_manipulation_refined(
    f: SocialChoiceFn, start: BoundaryEdge, end: BoundaryEdge, cap=None
) -> ManipulationWitness:
    """The refined extraction map: walk the three-part pair path to a <=4-witness.

    Case 1 (values leave (a,b) inside Ī) and case 2 (values enter (c,d)
    inside Π̄, scanned from the end) resolve through the boundary dichotomy
    or the triple construction; case 3 (the Δ̄ edge joins (a,b) to (c,d))
    brute-forces the two-voter four-alternative block restriction.
    """
    a, b = f.fn(start.x), f.fn(start.y)
    c, d = f.fn(end.x), f.fn(end.y)
    i, j = start.i, end.i
    if len({a, b, c, d}) != 4 or i == j:
        raise DomainError("refined extraction needs distinct a,b,c,d and i != j")
    if start.z != rk.adj(a, b) or end.z != rk.adj(c, d):
        raise DomainError("boundary edges must carry the winner-pair transpositions")
    path = refined_profile_path(a, b, c, d, i, j, (start.x, start.y), (end.x, end.y))
    verts = path.vertices
    ilo, ihi = path.part_bounds("Ī")
    plo, phi = path.part_bounds("Π̄")

    def pairvals(t: int) -> tuple[int, int]:
        v, vp = verts[t]
        return f.fn(v), f.fn(vp)

    # Case 1: forward through Ī.
    for t in range(ilo, ihi):
        if pairvals(t) == (a, b) and pairvals(t + 1) != (a, b):
            w = _resolve_refined_break(f, verts[t], verts[t + 1], i, a, b, cap)
            if w is not None:
                return _verified(f, w)
    # Case 3: the Δ̄ edge.
    if pairvals(ihi) == (a, b) and pairvals(plo) == (c, d):
        w = _resolve_delta(f, verts[ihi][0], i, j, (a, b, c, d), cap)
        if w is not None:
            return _verified(f, w)
    # Case 2: backward through Π̄.
    for t in range(phi - 1, plo - 1, -1):
        if pairvals(t + 1) == (c, d) and pairvals(t) != (c, d):
            w = _resolve_refined_break_rev(f, verts[t], verts[t + 1], j, c, d, cap)
            if w is not None:
                return _verified(f, w)
    raise TheoremViolation("no case triggered on the refined manipulation path")


def _verified(f: SocialChoiceFn, w: ManipulationWitness) -> ManipulationWitness:
    if not manip.is_manipulation_pair(f, w.x, w.y):
        raise TheoremViolation("refined extraction output failed re-verification")
    if w.r is None or w.r > 4:
        raise TheoremViolation(f"refined extraction output has block size {w.r}")
    return w


def _diff_coord(u: Profile, v: Profile) -> int:
    ks = [k for k in range(len(u)) if u[k] != v[k]]
    if len(ks) != 1:
        raise TheoremViolation("path edge changes more than one coordinate")
    return ks[0] + 1


def _resolve_refined_break(
    f, vv: PairVertex, ww: PairVertex, i: int, a: int, b: int, cap
) -> Optional[ManipulationWitness]:
    """Case 1: an Ī edge where the pair values leave (a, b)."""
    v, vp = vv
    w, wp = ww
    k = _diff_coord(v, w)
    e = f.fn(w)
    if e != a:
        lw = _lemma61_witness(f, v, w, k)
        if lw is not None:
            return lw
        # The swap is [a:e]; the order discipline forces e != b and k != i.
        if e == b or k == i:
            raise TheoremViolation("edge discipline violated in part Ī")
        return extract_3manip_from_triple(f, vp, v, w, i, k, b, a, e, cap)
    e = f.fn(wp)
    if e == b:
        return None  # values did not actually leave (a, b)
    lw = _lemma61_witness(f, vp, wp, k)
    if lw is not None:
        return lw
    if e == a or k == i:
        raise TheoremViolation("edge discipline violated in part Ī")
    return extract_3manip_from_triple(f, v, vp, wp, i, k, a, b, e, cap)


def _resolve_refined_break_rev(
    f, vv: PairVertex, ww: PairVertex, j: int, c: int, d: int, cap
) -> Optional[ManipulationWitness]:
    """Case 2: a Π̄ edge where the pair values become (c, d)."""
    v, vp = vv
    w, wp = ww
    k = _diff_coord(v, w)
    e = f.fn(v)
    if e != c:
        lw = _lemma61_witness(f, v, w, k)
        if lw is not None:
            return lw
        if e == d or k == j:
            raise TheoremViolation("edge discipline violated in part Π̄")
        return extract_3manip_from_triple(f, wp, w, v, j, k, d, c, e, cap)
    e = f.fn(vp)
    if e == d:
        return None
    lw = _lemma61_witness(f, vp, wp, k)
    if lw is not None:
        return lw
    if e == c or k == j:
        raise TheoremViolation("edge discipline violated in part Π̄")
    return extract_3manip_from_triple(f, w, wp, vp, j, k, c, d, e, cap)


def _resolve_delta(
    f, v: Profile, i: int, j: int, abcd: tuple[int, int, int, int], cap
) -> Optional[ManipulationWitness]:
    """Case 3: brute-force the two-voter four-alternative block restriction."""
    elems = abcd
    eset = set(elems)
    slots_i = _block_slots(v[i - 1], eset)
    slots_j = _block_slots(v[j - 1], eset)
    key = (f, rk.encode_profile(v), i, j, elems)
    if key in _gs4_cache:
        cached = _gs4_cache[key]
        if cached is None:
            raise TheoremViolation("four-valued block restriction has no witness (cached)")
        return cached

    orders = list(permutations(sorted(elems)))
    escape = False
    for o1 in orders:
        for o2 in orders:
            u = list(v)
            u[i - 1] = _reorder_block(v[i - 1], slots_i, o1)
            u[j - 1] = _reorder_block(v[j - 1], slots_j, o2)
            if f.fn(tuple(u)) not in eset:
                escape = True
                break
        if escape:
            break
    if escape:
        for o1 in orders:
            for o2 in orders:
                u = list(v)
                u[i - 1] = _reorder_block(v[i - 1], slots_i, o1)
                u[j - 1] = _reorder_block(v[j - 1], slots_j, o2)
                w = _check2(f, tuple(u), cap)
                if w is not None:
                    _gs4_cache[key] = w
                    return w
        _gs4_cache[key] = None
        raise TheoremViolation("escaping value produced no 2-manipulation point")

    w = _restricted_gs_search(f, v, (i, j), (slots_i, slots_j), elems, cap)
    _gs4_cache[key] = w
    if w is None:
        raise TheoremViolation("four-valued block restriction has no manipulation")
    return w


def _coord_close(r1: Ranking, r2: Ranking, abcd: set) -> bool:
    """r2 is r1 up to an a,b,c,d reordering plus one single-element shift."""
    if r1 == r2:
        return True
    for e in range(1, len(r1) + 1):
        s1 = [v for v in r1 if v != e]
        s2 = [v for v in r2 if v != e]
        if all(u == w or (u in abcd and w in abcd) for u, w in zip(s1, s2)):
            return True
    return False


def closeness_ok(point: Profile, path: Path, abcd: Sequence[int]) -> bool:
    """The refined closeness relation: the point differs from some path vertex
    in at most two coordinates, each by an a,b,c,d block reordering plus one
    single-element shift."""
    eset = set(abcd)
    for v, vp in path.vertices:
        for cand in (v, vp):
            diff = [k for k in range(len(cand)) if cand[k] != point[k]]
            if len(diff) <= 2 and all(
                _coord_close(cand[k], point[k], eset) for k in diff
            ):
                return True
    return False


# ---------------------------------------------------------------------------
# Dumps


def _vertex_text(v) -> str:
    if isinstance(v, tuple) and v and isinstance(v[0], tuple) and v and isinstance(v[0][0], tuple):
        return f"{rk.format_profile(v[0])} ; {rk.format_profile(v[1])}"
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return rk.format_profile(v)
    return rk.format_ranking(v)


def dump_path(path: Path, fh) -> None:
    """One vertex per line; part annotations as comment lines."""
    starts: dict[int, list[str]] = {}
    for name, lo, hi in path.parts:
        starts.setdefault(lo, []).append(name)
    for idx, v in enumerate(path.vertices):
        for name in starts.get(idx, ()):
            fh.write(f"# part {name}\n")
        fh.write(_vertex_text(v) + "\n")


def export_census_csv(census: InverseImageCensus, path: str) -> None:
    """Per-(vertex, index) counts as CSV rows (vertex, i, count)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex", "i", "count"])
        for (idx, v), count in sorted(
            census.per_index.items(), key=lambda kv: (kv[0][0], _vertex_text(kv[0][1]))
        ):
            w.writerow([_vertex_text(v), idx, count])
