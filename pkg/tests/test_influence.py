import math
from fractions import Fraction

import numpy as np
import pytest

from gslab import rankings as rk
from gslab import scf
from gslab.errors import DomainError
from gslab.influence import (
    BoundaryPairWitness,
    InfluenceKind,
    TwoManipOutcome,
    boundary_edges,
    find_large_boundary_pair,
    influence,
    influence_pair,
    influence_pair_refined,
    influence_pair_refined_total,
    influence_single,
    influence_single_refined,
    influence_total,
    variance_indicator,
)


def rules32():
    yield scf.borda_voter1_tiebreak(3, 2)
    yield scf.plurality_leftmost(3, 2)
    for s in range(5):
        yield scf.random_tabular(np.random.default_rng([21, s]), 3, 2)


def test_influence_zero_for_dictator_other_coordinate():
    f = scf.dictator_top(1, 3, 2)
    assert influence_total(f, 2) == 0
    assert influence_total(f, 1) > 0
    c = scf.constant(1, 3, 2)
    assert influence_total(c, 1) == 0


def test_decomposition_identities():
    # Inf_i = sum_a Inf_i^a = sum_{a != b} Inf_i^{a,b}, exactly.
    for f in rules32():
        for i in (1, 2):
            total = influence_total(f, i)
            by_a = sum(influence_single(f, i, a) for a in (1, 2, 3))
            by_ab = sum(
                influence_pair(f, i, a, b) for a in (1, 2, 3) for b in (1, 2, 3) if a != b
            )
            assert total == by_a == by_ab


def test_variance_lower_bound():
    for f in rules32():
        for a in (1, 2, 3):
            assert sum(influence_single(f, i, a) for i in (1, 2)) >= variance_indicator(f, a)


def test_refined_sum_lower_bound():
    # sum_z Inf_i^{a;z} >= Inf_i^a / q^2.
    for f in rules32():
        for i in (1, 2):
            for a in (1, 2, 3):
                s = sum(
                    influence_single_refined(f, i, a, z)
                    for z in rk.all_adjacent_transpositions(3)
                )
                assert s >= influence_single(f, i, a) / 9


def test_boundary_counts_match_influences():
    q, n = 3, 2
    fac = math.factorial(q)
    for f in rules32():
        for i in (1, 2):
            for a in (1, 2, 3):
                for b in (1, 2, 3):
                    if a == b:
                        continue
                    plain = boundary_edges(f, i, a, b)
                    assert influence_pair(f, i, a, b) == Fraction(len(plain), fac ** (n + 1))
                    for z in rk.all_adjacent_transpositions(q):
                        ref = boundary_edges(f, i, a, b, refined=z)
                        assert influence_pair_refined(f, i, a, b, z) == Fraction(
                            len(ref), 2 * fac**n
                        )


def test_boundary_edge_structure():
    f = scf.borda_voter1_tiebreak(3, 2)
    for e in boundary_edges(f, 1, 1, 2, refined="all_z"):
        assert f(e.x) == 1 and f(e.y) == 2
        assert e.x[1] == e.y[1]
        assert e.x[0] == rk.apply_adjacent(e.z, e.y[0])


def test_refined_total_consistency():
    f = scf.borda_voter1_tiebreak(3, 2)
    t = influence_pair_refined_total(f, 1, 1, 2)
    s = sum(
        influence_pair_refined(f, 1, 1, 2, z) for z in rk.all_adjacent_transpositions(3)
    )
    assert t == s


def test_influence_dispatcher_and_sampled():
    f = scf.borda_voter1_tiebreak(3, 2)
    exact = influence(f, 1, InfluenceKind("total"))
    assert exact == influence_total(f, 1)
    est = influence(f, 1, InfluenceKind("total"), mode="sampled", samples=20000, seed=9)
    assert abs(est.estimate - float(exact)) <= 4 * est.stderr + 1e-12
    est2 = influence(f, 1, InfluenceKind("total"), mode="sampled", samples=20000, seed=9)
    assert est.estimate == est2.estimate


def test_influence_kind_validation():
    with pytest.raises(DomainError):
        InfluenceKind("pair", a=1, b=1)
    with pytest.raises(DomainError):
        InfluenceKind("nope")


def test_find_large_boundary_pair_plain():
    f = scf.borda_voter1_tiebreak(4, 2)
    w = find_large_boundary_pair(f, neutral=True)
    assert isinstance(w, BoundaryPairWitness)
    assert w.i != w.j
    assert len({w.a, w.b, w.c, w.d}) == 4
    eps = scf.dist_to_dict(f)
    thr = eps / (f.n * f.q**2 * (f.q - 1))
    assert w.value_first >= thr and w.value_second >= thr


def test_find_large_boundary_pair_refined_dichotomy():
    from gslab import manipulation as manip

    f = scf.borda_voter1_tiebreak(4, 2)
    out = find_large_boundary_pair(f, refined=True, neutral=True)
    if isinstance(out, TwoManipOutcome):
        assert out.fraction >= out.threshold
        for x in out.points[:20]:
            assert manip.is_r_manipulation_point(f, x, 2) is not None
    else:
        assert isinstance(out, BoundaryPairWitness)
        assert out.refined


def test_export_influence_csv(tmp_path):
    f = scf.borda_voter1_tiebreak(3, 2)
    p = tmp_path / "inf.csv"
    from gslab.influence import export_influence_csv

    export_influence_csv(f, str(p))
    lines = p.read_text().strip().splitlines()
    assert lines[0].split(",")[:4] == ["i", "a", "b", "z"]
    assert len(lines) > 10
