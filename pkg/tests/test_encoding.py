import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coeba.encoding import (format_permutation, inflate, is_permutation, parse_permutation,
                            project, random_permutation)


@st.composite
def permutations(draw, min_dim=1, max_dim=60):
    dim = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).permutation(dim) + 1


def test_project_hand_trace():
    assert project(np.array([5, 2, 7, 1, 4, 3, 6]), 4).tolist() == [2, 1, 4, 3]


def test_project_identity_and_single_survivor():
    p = np.array([3, 1, 2])
    assert project(p, 3).tolist() == [3, 1, 2]
    assert project(p, 1).tolist() == [1]


def test_project_does_not_alias_input():
    p = np.array([2, 1, 3])
    out = project(p, 3)
    out[0] = 99
    assert p.tolist() == [2, 1, 3]


@pytest.mark.parametrize("target", [0, 4, -1])
def test_project_range_errors(target):
    with pytest.raises(ValueError):
        project(np.array([3, 1, 2]), target)


def test_inflate_hand_trace():
    # 6 stays at index 0, 5 at index 3; the rest is filled with 2, 1, 4, 3
    out = inflate(np.array([2, 1, 4, 3]), np.array([6, 3, 1, 5, 2, 4]))
    assert out.tolist() == [6, 2, 1, 5, 4, 3]


def test_inflate_same_dimension_is_identity():
    p = np.array([2, 3, 1])
    assert inflate(p, np.array([1, 2, 3])).tolist() == [2, 3, 1]


def test_inflate_rejects_larger_source():
    with pytest.raises(ValueError):
        inflate(np.array([1, 2, 3, 4]), np.array([1, 2, 3]))


@given(permutations(), st.data())
def test_project_properties(p, data):
    d = data.draw(st.integers(1, p.size))
    out = project(p, d)
    assert is_permutation(out) and out.size == d
    pos = {int(v): i for i, v in enumerate(p)}
    # relative order of surviving values is preserved
    assert all(pos[int(a)] < pos[int(b)] for a, b in zip(out, out[1:]))


@given(permutations(), st.data())
def test_inflate_properties(q, data):
    d = data.draw(st.integers(1, q.size))
    p = np.random.default_rng(d).permutation(d) + 1
    out = inflate(p, q)
    assert is_permutation(out) and out.size == q.size
    big = q > d
    assert (out[big] == q[big]).all()
    assert out[~big].tolist() == p.tolist()


@given(permutations(), st.data())
def test_roundtrip_inflate_of_projection(q, data):
    d = data.draw(st.integers(1, q.size))
    assert inflate(project(q, d), q).tolist() == q.tolist()


def test_random_permutation_dim_one():
    assert random_permutation(1, np.random.default_rng(0)).tolist() == [1]


def test_random_permutation_reproducible():
    a = random_permutation(3, np.random.default_rng(42))
    b = random_permutation(3, np.random.default_rng(42))
    assert a.tolist() == b.tolist()
    assert sorted(a.tolist()) == [1, 2, 3]


def test_random_permutation_rejects_zero():
    with pytest.raises(ValueError):
        random_permutation(0, np.random.default_rng(0))


def test_random_permutation_uniform():
    rng = np.random.default_rng(2024)
    counts = Counter(tuple(random_permutation(3, rng).tolist()) for _ in range(60_000))
    # all 3! orderings, each expected with probability 1/6
    assert set(counts) == set(itertools.permutations([1, 2, 3]))
    for c in counts.values():
        assert abs(c / 60_000 - 1 / 6) < 0.01


def test_is_permutation():
    assert is_permutation(np.array([2, 1, 3]))
    assert not is_permutation(np.array([2, 2, 3]))
    assert not is_permutation(np.array([0, 1, 2]))
    assert not is_permutation(np.array([1, 2, 4]))
    assert not is_permutation(np.array([1.0, 2.0]))
    assert not is_permutation(np.array([], dtype=int))


def test_text_roundtrip():
    p = np.array([3, 1, 4, 2])
    assert format_permutation(p) == "3,1,4,2"
    assert parse_permutation("3,1,4,2").tolist() == [3, 1, 4, 2]
    with pytest.raises(ValueError):
        parse_permutation("1,1,2")
