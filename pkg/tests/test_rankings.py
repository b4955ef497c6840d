import math

import numpy as np
import pytest

from gslab import rankings as rk
from gslab.errors import DomainError, ProfileCapExceeded


def test_ranking_validation():
    assert rk.is_ranking((2, 1, 3))
    assert not rk.is_ranking((1, 1, 3))
    assert not rk.is_ranking((1, 2), q=3)
    with pytest.raises(DomainError):
        rk.check_ranking((1, 3))


def test_rank_and_prefers():
    x = (3, 1, 2)
    assert rk.rank_of(x, 3) == 1
    assert rk.rank_of(x, 2) == 3
    assert rk.prefers(x, 3, 2)
    assert not rk.prefers(x, 2, 1)


def test_compose_and_inverse():
    assert rk.compose((2, 1, 3), (3, 2, 1)) == (3, 1, 2)
    for q in (3, 4):
        ident = rk.identity_ranking(q)
        for x in rk.enumerate_rankings(q):
            assert rk.compose(x, ident) == x
            assert rk.compose(ident, x) == x
            assert rk.compose(rk.inverse(x), x) == ident


def test_adjacent_transposition_identity_when_not_adjacent():
    # [1:3] does nothing to 1>2>3 since 1 and 3 are not neighbors there.
    assert rk.apply_adjacent(rk.adj(1, 3), (1, 2, 3)) == (1, 2, 3)
    assert rk.apply_adjacent(rk.adj(1, 2), (1, 2, 3)) == (2, 1, 3)
    assert rk.apply_adjacent(rk.adj(1, 2), (2, 1, 3)) == (1, 2, 3)


def test_transposition_count():
    for q in (3, 4, 5):
        assert len(rk.all_adjacent_transpositions(q)) == q * (q - 1) // 2


def test_adjacent_swap_between():
    assert rk.adjacent_swap_between((1, 2, 3), (2, 1, 3)) == (1, 2)
    assert rk.adjacent_swap_between((1, 2, 3), (1, 2, 3)) is None
    assert rk.adjacent_swap_between((1, 2, 3), (3, 2, 1)) is None


def test_bubble_path():
    path = rk.bubble_path((1, 2, 3), 3, 1)
    assert path == [(1, 2, 3), (1, 3, 2), (3, 1, 2)]
    assert rk.bubble_path((1, 2, 3), 1, 1) == [(1, 2, 3)]
    for u, v in zip(path, path[1:]):
        assert rk.adjacent_swap_between(u, v) is not None


def test_encode_roundtrip():
    for q in (3, 4, 5):
        for i, x in enumerate(rk.enumerate_rankings(q)):
            assert rk.encode(x) == i
            assert rk.decode(i, q) == x
    assert rk.encode(rk.identity_ranking(4)) == 0


def test_profile_encoding_order():
    # Coordinate 1 is the most significant digit.
    q, n = 3, 2
    m = math.factorial(q)
    for code, x in enumerate(rk.enumerate_profiles(q, n)):
        assert rk.encode_profile(x) == code
        assert rk.decode_profile(code, q, n) == x
        assert code == rk.encode(x[0]) * m + rk.encode(x[1])


def test_cap():
    assert rk.check_cap(3, 2) == 36
    with pytest.raises(ProfileCapExceeded):
        rk.check_cap(6, 10, cap=1000)


def test_random_profile_reproducible():
    a = rk.random_profile(np.random.default_rng(3), 4, 3)
    b = rk.random_profile(np.random.default_rng(3), 4, 3)
    assert a == b
    assert all(rk.is_ranking(xi, 4) for xi in a)


def test_text_roundtrip():
    x = (3, 1, 2)
    assert rk.format_ranking(x) == "3>1>2"
    assert rk.parse_ranking("3>1>2") == x
    p = ((3, 1, 2), (1, 2, 3))
    assert rk.format_profile(p) == "3>1>2|1>2>3"
    assert rk.parse_profile("3>1>2|1>2>3") == p
    with pytest.raises(DomainError):
        rk.parse_ranking("3>3>1")
