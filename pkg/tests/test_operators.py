import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coeba.encoding import is_permutation
from coeba.evaluation import BudgetExhausted, EvaluationBudget, Objective
from coeba.operators import (MoveKind, apply_move, best_sampled_neighbor, hamming,
                             insertion_move, insertion_step, order_crossover,
                             reverse_segment, two_opt_neighborhood, two_opt_step)
from coeba.tsplib import tour_length

from conftest import random_instance


@st.composite
def perm(draw, min_dim=2, max_dim=40):
    dim = draw(st.integers(min_dim, max_dim))
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1))).permutation(dim) + 1


seeds = st.integers(0, 2**32 - 1)


# hamming

def test_hamming_examples():
    assert hamming(np.array([1, 2, 3]), np.array([1, 2, 3])) == 0
    assert hamming(np.array([1, 2, 3]), np.array([1, 3, 2])) == 2


def test_hamming_dimension_mismatch():
    with pytest.raises(ValueError):
        hamming(np.array([1, 2]), np.array([1, 2, 3]))


def test_hamming_matches_naive_loop():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b = rng.permutation(10) + 1, rng.permutation(10) + 1
        naive = 0
        for x, y in zip(a.tolist(), b.tolist()):
            if x != y:
                naive += 1
        assert hamming(a, b) == naive


@given(perm(), perm(), perm())
def test_hamming_metric_axioms(a, b, c):
    n = min(a.size, b.size, c.size)
    a, b, c = a[a <= n], b[b <= n], c[c <= n]
    assert hamming(a, b) == hamming(b, a)
    assert (hamming(a, b) == 0) == (a.tolist() == b.tolist())
    assert hamming(a, c) <= hamming(a, b) + hamming(b, c)
    assert hamming(a, b) != 1


# 2-opt

def test_reverse_segment_definition():
    # positions 2..4 (1-based) are indices 1..3
    assert reverse_segment(np.array([1, 2, 3, 4, 5]), 1, 3).tolist() == [1, 4, 3, 2, 5]


def test_two_opt_on_two_elements():
    for seed in range(5):
        assert two_opt_step(np.array([1, 2]), np.random.default_rng(seed)).tolist() == [2, 1]


def test_full_reversal_keeps_tour_length():
    inst = random_instance(15, 3)
    p = np.random.default_rng(0).permutation(15) + 1
    full = reverse_segment(p, 0, 14)
    assert full.tolist() == p[::-1].tolist()
    assert tour_length(inst, full) == tour_length(inst, p)


@given(perm(min_dim=3), seeds)
def test_two_opt_step_is_a_segment_reversal(p, seed):
    out = two_opt_step(p, np.random.default_rng(seed))
    assert is_permutation(out)
    diff = np.flatnonzero(out != p)
    if diff.size:
        i, j = diff[0], diff[-1]
        assert out[i:j + 1].tolist() == p[i:j + 1][::-1].tolist()


def test_two_opt_cut_pairs_are_uniform():
    rng = np.random.default_rng(5)
    p = np.arange(1, 6)
    counts = {}
    for _ in range(20_000):
        out = two_opt_step(p, rng)
        counts[tuple(out)] = counts.get(tuple(out), 0) + 1
    # 10 distinct segments of a 5-array, each reversal gives a distinct array
    assert len(counts) == 10
    for c in counts.values():
        assert abs(c / 20_000 - 0.1) < 0.01


# insertion

def test_insertion_definition():
    # take 1-based position 2, insert at 1-based position 5
    assert insertion_move(np.array([1, 2, 3, 4, 5]), 1, 4).tolist() == [1, 3, 4, 5, 2]
    assert insertion_move(np.array([1, 2, 3, 4, 5]), 4, 0).tolist() == [5, 1, 2, 3, 4]
    assert insertion_move(np.array([1, 2]), 0, 1).tolist() == [2, 1]


def test_insertion_step_two_elements():
    assert insertion_step(np.array([1, 2]), np.random.default_rng(1)).tolist() == [2, 1]


@given(perm(), seeds)
def test_insertion_step_preserves_values(p, seed):
    out = insertion_step(p, np.random.default_rng(seed))
    assert sorted(out.tolist()) == sorted(p.tolist())
    assert out.tolist() != p.tolist()


# apply_move

def test_apply_move_rejects_zero_velocity():
    with pytest.raises(ValueError):
        apply_move(np.array([1, 2, 3]), MoveKind.TWO_OPT, 0, np.random.default_rng(0))


@pytest.mark.parametrize("kind, step", [(MoveKind.TWO_OPT, two_opt_step),
                                        (MoveKind.INSERTION, insertion_step)])
def test_apply_move_replays_chained_steps(kind, step):
    p = np.array([3, 5, 1, 4, 2])
    for seed in range(20):
        got = apply_move(p, kind, 2, np.random.default_rng(seed))
        rng = np.random.default_rng(seed)
        expected = step(step(p, rng), rng)
        assert got.tolist() == expected.tolist()
        single = apply_move(p, kind, 1, np.random.default_rng(seed))
        assert single.tolist() == step(p, np.random.default_rng(seed)).tolist()


@given(perm(), st.integers(1, 30), st.sampled_from(list(MoveKind)), seeds)
def test_apply_move_valid(p, v, kind, seed):
    out = apply_move(p, kind, v, np.random.default_rng(seed))
    assert is_permutation(out) and out.size == p.size


# neighbour sampling and incremental evaluation

def test_best_sampled_neighbor_single_sample():
    inst = random_instance(20, 1)
    p = np.random.default_rng(1).permutation(20) + 1
    rng = np.random.default_rng(3)
    tour, fit = best_sampled_neighbor(p, 1, lambda t: tour_length(inst, t), rng)
    ref = two_opt_step(p, np.random.default_rng(3))
    assert tour.tolist() == ref.tolist()
    assert fit == tour_length(inst, ref)


def test_best_sampled_neighbor_full_neighbourhood_brute_force():
    inst = random_instance(5, 9)
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.permutation(5) + 1
        neighbours = list(two_opt_neighborhood(p))
        assert len(neighbours) == 10
        tour, fit = best_sampled_neighbor(p, len(neighbours),
                                          lambda t: tour_length(inst, t), rng)
        assert fit == tour_length(inst, tour)
        assert all(fit <= tour_length(inst, q) for q in neighbours)


def test_best_sampled_neighbor_can_be_worse_than_source():
    # on a convex polygon the identity tour is optimal, every other neighbour is worse
    angles = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    from coeba.tsplib import TspInstance
    inst = TspInstance("octagon", 8, np.c_[1000 * np.cos(angles), 1000 * np.sin(angles)])
    p = np.arange(1, 9)
    _, fit = best_sampled_neighbor(p, 1, lambda t: tour_length(inst, t),
                                   np.random.default_rng(1))
    assert fit >= tour_length(inst, p)


def test_fast_and_plain_neighbour_paths_agree():
    inst = random_instance(40, 4)
    p = np.random.default_rng(2).permutation(40) + 1
    length = tour_length(inst, p)
    for seed in range(30):
        budget = EvaluationBudget(100)
        obj = Objective(inst, budget)
        fast = best_sampled_neighbor(p, 10, obj, np.random.default_rng(seed), fitness=length)
        plain = best_sampled_neighbor(p, 10, lambda t: tour_length(inst, t),
                                      np.random.default_rng(seed))
        assert fast[0].tolist() == plain[0].tolist()
        assert fast[1] == plain[1]
        assert budget.used == 10


@given(st.integers(3, 40), seeds)
def test_incremental_delta_equals_full_recomputation(dim, seed):
    inst = random_instance(dim, seed % 1000)
    rng = np.random.default_rng(seed)
    p = rng.permutation(dim) + 1
    length = tour_length(inst, p)
    i, j = np.triu_indices(dim, k=1)
    budget = EvaluationBudget(len(i))
    got = Objective(inst, budget).two_opt_lengths(p, length, i, j)
    expected = [tour_length(inst, reverse_segment(p, a, b)) for a, b in zip(i, j)]
    assert got.tolist() == expected
    assert budget.exhausted


def test_neighbour_evaluations_respect_budget():
    inst = random_instance(10, 0)
    p = np.arange(1, 11)
    obj = Objective(inst, EvaluationBudget(5))
    with pytest.raises(BudgetExhausted):
        best_sampled_neighbor(p, 10, obj, np.random.default_rng(0), fitness=tour_length(inst, p))
    assert obj.budget.used == 0


# order crossover

def test_ox_hand_trace():
    a = np.array([1, 2, 3, 4, 5, 6])
    b = np.array([6, 5, 4, 3, 2, 1])
    c1, c2 = order_crossover(a, b, None, cuts=(2, 4))
    # segment 3,4 kept; b read cyclically from index 4: 2,1,6,5,(4),(3)
    assert c1.tolist() == [2, 1, 3, 4, 6, 5]
    # segment 4,3 kept; a read cyclically from index 4: 5,6,1,2,(3),(4)
    assert c2.tolist() == [5, 6, 4, 3, 1, 2]


def test_ox_identical_parents():
    # left-to-right filling rotates the remainder: cuts (1, 3) on 4,2,5,1,3
    # keep 2,5 and fill with 1,3,4 read cyclically from index 3
    a = np.array([4, 2, 5, 1, 3])
    c1, c2 = order_crossover(a, a.copy(), None, cuts=(1, 3))
    assert c1.tolist() == [1, 2, 5, 3, 4]
    assert c2.tolist() == c1.tolist()


def test_ox_whole_chromosome_segment():
    a = np.array([1, 2, 3, 4])
    b = np.array([3, 1, 4, 2])
    c1, c2 = order_crossover(a, b, None, cuts=(0, 4))
    assert c1.tolist() == a.tolist() and c2.tolist() == b.tolist()


def test_ox_errors():
    with pytest.raises(ValueError):
        order_crossover(np.array([1, 2]), np.array([1, 2, 3]), np.random.default_rng(0))
    with pytest.raises(ValueError):
        order_crossover(np.array([1, 2]), np.array([2, 1]), None, cuts=(1, 1))


def _ox_reference(a, b, c1, c2):
    # straightforward list version of the fill rule
    seg = list(a[c1:c2])
    n = len(a)
    filler = [b[(c2 + k) % n] for k in range(n) if b[(c2 + k) % n] not in seg]
    return filler[:c1] + seg + filler[c1:]


@given(perm(), seeds, st.data())
def test_ox_matches_reference_and_is_valid(a, seed, data):
    b = np.random.default_rng(seed).permutation(a.size) + 1
    c1 = data.draw(st.integers(0, a.size - 1))
    c2 = data.draw(st.integers(c1 + 1, a.size))
    x, y = order_crossover(a, b, None, cuts=(c1, c2))
    assert x.tolist() == _ox_reference(a.tolist(), b.tolist(), c1, c2)
    assert y.tolist() == _ox_reference(b.tolist(), a.tolist(), c1, c2)
    assert is_permutation(x) and is_permutation(y)


@given(perm(), seeds)
def test_ox_random_cuts_valid(a, seed):
    rng = np.random.default_rng(seed)
    b = rng.permutation(a.size) + 1
    x, y = order_crossover(a, b, rng)
    assert is_permutation(x) and is_permutation(y)


def test_neighbourhood_enumeration_size():
    p = np.arange(1, 7)
    assert len({tuple(q) for q in two_opt_neighborhood(p)}) == len(list(itertools.combinations(range(6), 2)))
