import json
import math
from fractions import Fraction

import numpy as np

from gslab import manipulation as manip
from gslab import rankings as rk
from gslab import scf


def test_block_span():
    assert manip.block_span((1, 2, 3), (1, 2, 3)) is None
    assert manip.block_span((1, 2, 3), (2, 1, 3)) == 2
    assert manip.block_span((1, 2, 3), (3, 2, 1)) == 3
    assert manip.block_span((1, 2, 3, 4), (1, 4, 3, 2)) == 3
    # Disjoint changes do not form one adjacent block.
    assert manip.block_span((2, 1, 4, 3), (1, 2, 3, 4)) == 4


def test_window_neighbors_dedup():
    x = (1, 2, 3)
    nbrs = list(manip._window_neighbors(x, 2))
    assert len(nbrs) == len(set(nbrs))
    assert set(nbrs) == {(2, 1, 3), (1, 3, 2)}


def test_manipulation_pair_definition():
    f = scf.borda_voter1_tiebreak(3, 2)
    x = ((2, 3, 1), (3, 1, 2))
    found = manip.find_manipulation(f, x)
    if found is not None:
        assert manip.is_manipulation_pair(f, found.x, found.y)
        assert found.x == x


def test_dictator_has_no_manipulation():
    f = scf.dictator_top(1, 3, 2)
    assert not manip.manipulation_flags(f).any()
    assert manip.gs_witness(f) is None


def test_flags_match_bruteforce():
    for s in range(5):
        f = scf.random_tabular(np.random.default_rng([31, s]), 3, 2)
        flags = manip.manipulation_flags(f)
        for code, x in enumerate(rk.enumerate_profiles(3, 2)):
            assert bool(flags[code]) == (manip.find_manipulation(f, x) is not None)


def test_flags_match_bruteforce_n3():
    # Three voters exercises the non-trivial axis bookkeeping.
    f = scf.plurality_leftmost(3, 3)
    flags = manip.manipulation_flags(f)
    for code, x in enumerate(rk.enumerate_profiles(3, 3)):
        assert bool(flags[code]) == (manip.find_manipulation(f, x) is not None)


def test_windowed_scanner_matches_oracle():
    # Acceptance criterion: exact set equality over 20 seeded random rules.
    for s in range(20):
        f = scf.random_tabular(np.random.default_rng([11, s]), 3, 2)
        for r in (2, 3):
            scanner = {
                x
                for x in rk.enumerate_profiles(3, 2)
                if manip.is_r_manipulation_point(f, x, r) is not None
            }
            oracle = {
                x
                for x in rk.enumerate_profiles(3, 2)
                if manip.oracle_r_manipulation_point(f, x, r)
            }
            assert scanner == oracle


def test_r_flags_consistent_with_scanner():
    f = scf.borda_voter1_tiebreak(3, 2)
    for r in (2, 3):
        flags = manip.manipulation_flags(f, r)
        for code, x in enumerate(rk.enumerate_profiles(3, 2)):
            assert bool(flags[code]) == (manip.is_r_manipulation_point(f, x, r) is not None)


def test_r_monotone_chain():
    f = scf.borda_voter1_tiebreak(4, 2)
    f2 = manip.manipulation_flags(f, 2)
    f3 = manip.manipulation_flags(f, 3)
    f4 = manip.manipulation_flags(f, 4)
    full = manip.manipulation_flags(f)
    assert not (f2 & ~f3).any()
    assert not (f3 & ~f4).any()
    assert not (f4 & ~full).any()


def test_census_exact_borda():
    c = manip.census(scf.borda_voter1_tiebreak(4, 2))
    assert c.fractions["manip"] == Fraction(2, 3)
    assert c.epsilon == Fraction(7, 24)
    assert c.passes == {"thm13": True, "thm16": True}
    assert c.fractions["manip"] >= c.fractions["r4"] >= c.fractions["r3"] >= c.fractions["r2"]


def test_census_constant_all_zero():
    c = manip.census(scf.constant(1, 4, 2))
    assert all(v == 0 for v in c.fractions.values())
    assert c.epsilon == 0


def test_census_json_deterministic():
    f = scf.plurality_leftmost(3, 3)
    a = manip.census_to_json(manip.census(f, mode="sampled", samples=500, seed=3))
    b = manip.census_to_json(manip.census(f, mode="sampled", samples=500, seed=3))
    assert a == b
    d = json.loads(a)
    assert d["seed"] == 3 and d["mode"] == "sampled"
    assert "formulas" in d


def test_census_sampled_close_to_exact():
    f = scf.plurality_leftmost(3, 5)
    exact = manip.census(f).fractions["manip"]
    est, se = manip.census(f, mode="sampled", samples=20000, seed=5).fractions["manip"]
    assert abs(est - float(exact)) <= 4 * se + 1e-12


def test_bounds_formulas():
    eps = Fraction(1, 4)
    assert manip.bound_thm13(eps, 2, 4) == eps**2 / (2 * 8 * 4**6 * 24**2)
    assert manip.bound_thm16(eps, 2, 4) == eps**2 / (10**4 * 8 * 4**30)


def test_gs_witness_random_rules():
    hits = skipped = 0
    for s in range(50):
        f = scf.random_tabular(np.random.default_rng([7, s]), 3, 2)
        w = manip.gs_witness(f)
        if w is None:
            skipped += 1
            continue
        assert manip.is_manipulation_pair(f, w.x, w.y)
        hits += 1
    assert hits > 0


def test_pair_probability_sampled_vs_exact():
    f = scf.borda_voter1_tiebreak(3, 2)
    for flavor in ("reset_coordinate", "adjacent_block4"):
        if flavor == "adjacent_block4" and f.q < 4:
            continue
        exact = manip.exact_pair_probability(f, flavor)
        est = manip.estimate_pair_probability(f, flavor, 20000, seed=2)
        assert abs(est.estimate - float(exact)) <= 4 * est.stderr + 1e-12


def test_pair_probability_block4():
    f = scf.borda_voter1_tiebreak(4, 2)
    exact = manip.exact_pair_probability(f, "adjacent_block4")
    est = manip.estimate_pair_probability(f, "adjacent_block4", 20000, seed=2)
    assert abs(est.estimate - float(exact)) <= 4 * est.stderr + 1e-12


def test_plurality_scaling_reproducible():
    a = manip.plurality_scaling_experiment(3, (5,), 2000, 42)
    b = manip.plurality_scaling_experiment(3, (5,), 2000, 42)
    assert a == b


def test_plurality_mc_matches_exact():
    f = scf.plurality_leftmost(3, 5)
    exact = float(manip.census(f).fractions["manip"])
    row = manip.plurality_scaling_experiment(3, (5,), 50000, 1)[0]
    assert abs(row["estimate"] - exact) <= 4 * row["stderr"] + 1e-12


def test_export_flags_csv(tmp_path):
    f = scf.borda_voter1_tiebreak(3, 2)
    p = tmp_path / "flags.csv"
    manip.export_flags_csv(f, str(p), rs=(2, 3))
    lines = p.read_text().strip().splitlines()
    assert len(lines) == 1 + 36
