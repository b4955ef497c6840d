from fractions import Fraction

import numpy as np
import pytest

from gslab import rankings as rk
from gslab import scf
from gslab.errors import DomainError


def test_constant_and_dictator():
    f = scf.constant(2, 3, 2)
    g = scf.dictator_top(2, 3, 2)
    for x in rk.enumerate_profiles(3, 2):
        assert f(x) == 2
        assert g(x) == x[1][0]


def test_plurality_tiebreak():
    f = scf.plurality_leftmost(3, 2)
    # 1 vs 2 tie: voter 1's top wins.
    assert f(((1, 2, 3), (2, 1, 3))) == 1
    assert f(((2, 1, 3), (1, 2, 3))) == 2
    f3 = scf.plurality_leftmost(3, 3)
    assert f3(((3, 1, 2), (1, 2, 3), (3, 2, 1))) == 3


def test_borda_tiebreak():
    f = scf.borda_voter1_tiebreak(3, 2)
    # Opposite rankings tie all three alternatives; voter 1 decides.
    assert f(((1, 2, 3), (3, 2, 1))) == 1
    assert f(((2, 3, 1), (1, 3, 2))) == 2


def test_tabular_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    f = scf.random_tabular(rng, 3, 2)
    for path, save, load in (
        (tmp_path / "f.txt", scf.save_tabular_text, scf.load_tabular_text),
        (tmp_path / "f.json", scf.save_tabular_json, scf.load_tabular_json),
    ):
        save(f, str(path))
        g = load(str(path))
        assert scf.table_of(g) == scf.table_of(f)
        assert (g.q, g.n) == (3, 2)


def test_random_tabular_seeded():
    a = scf.random_tabular(np.random.default_rng(5), 3, 2)
    b = scf.random_tabular(np.random.default_rng(5), 3, 2)
    assert scf.table_of(a) == scf.table_of(b)


def test_neutrality():
    assert scf.is_neutral(scf.dictator_top(1, 3, 2))
    assert scf.is_neutral(scf.borda_voter1_tiebreak(3, 2))
    assert not scf.is_neutral(scf.constant(1, 3, 2))
    v = scf.is_neutral(scf.constant(1, 3, 2))
    assert v.witness is not None


def test_distances():
    q, n = 3, 2
    d = scf.dictator_top(1, q, n)
    assert scf.dist_to_dict(d) == 0
    assert scf.dist(d, d) == 0
    c = scf.constant(1, q, n)
    assert scf.dist_to_const(c) == 0
    # A dictator is at distance 0 from NONMANIP, a constant as well.
    assert scf.dist_to_nonmanip(d) == 0
    assert scf.dist_to_nonmanip(c) == 0
    f = scf.borda_voter1_tiebreak(4, 2)
    assert scf.dist_to_dict(f) == Fraction(7, 24)
    assert 0 < scf.dist_to_nonmanip(f) <= scf.dist_to_dict(f)


def test_distribution_exact():
    f = scf.borda_voter1_tiebreak(3, 2)
    dist = scf.distribution(f)
    assert sum(dist) == 1
    assert all(v > 0 for v in dist)


def test_restrict():
    f = scf.borda_voter1_tiebreak(3, 2)
    fixed = {1: (2, 1, 3)}
    g = scf.restrict(f, fixed)
    assert g.n == 1
    for (y,) in rk.enumerate_profiles(3, 1):
        assert g(((y),)) == f(((2, 1, 3), y))
    with pytest.raises(DomainError):
        scf.restrict(f, {1: (1, 2, 3), 2: (1, 2, 3)})


def test_evaluate_checks_dimensions():
    f = scf.plurality_leftmost(3, 2)
    with pytest.raises(DomainError):
        scf.evaluate(f, ((1, 2, 3),))
    with pytest.raises(DomainError):
        scf.evaluate(f, ((1, 2, 3, 4), (1, 2, 3, 4)))
