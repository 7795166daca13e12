import numpy as np
import pytest

from helpers import TWO_STARS, SWAP, all_costs, quadratic_crossings, quadratic_pair, random_instance
from oscm.crossings import (
    FenwickTree,
    count_crossings,
    crossing_matrix,
    merge_counts,
    order_cost,
    pair_crossings,
    pair_lower_bound,
    shared_endpoints,
)
from oscm.model import Instance, InvalidOrdering


@pytest.mark.parametrize(
    "nu, nv, expected",
    [
        ((1, 3, 4), (2, 3, 4), (3, 4)),
        ((2,), (1,), (1, 0)),
        ((1,), (1,), (0, 0)),
    ],
)
def test_pair_crossings_examples(nu, nv, expected):
    inst = Instance.from_lists(max(nu + nv), [nu, nv])
    assert pair_crossings(inst, 0, 1) == expected
    assert quadratic_pair(nu, nv) == expected


def test_pair_crossings_rejects_same_vertex():
    with pytest.raises(ValueError):
        pair_crossings(TWO_STARS, 1, 1)


def test_crossing_matrix_examples():
    assert crossing_matrix(TWO_STARS).tolist() == [[0, 3], [4, 0]]
    assert crossing_matrix(Instance.from_lists(3, [(2,)])).tolist() == [[0]]
    assert crossing_matrix(Instance.from_lists(2, [(1,), (2,)])).tolist() == [[0, 0], [1, 0]]
    assert crossing_matrix(Instance(0, 0, ())).shape == (0, 0)


def test_count_crossings_examples():
    assert count_crossings(TWO_STARS, [0, 1]) == 3
    assert count_crossings(TWO_STARS, [1, 0]) == 4
    assert count_crossings(Instance.from_lists(5, [(1, 2, 5)]), [0]) == 0
    assert count_crossings(SWAP, [1, 0]) == 0


def test_count_crossings_rejects_invalid_permutation():
    with pytest.raises(InvalidOrdering):
        count_crossings(TWO_STARS, [0, 0])


def test_order_cost_examples():
    m = np.array([[0, 3], [4, 0]])
    assert order_cost(m, [0, 1]) == 3
    assert order_cost(m, [1, 0]) == 4
    assert order_cost(np.zeros((3, 3), dtype=np.int64), [2, 0, 1]) == 0
    with pytest.raises(InvalidOrdering):
        order_cost(m, [0, 1, 2])


def test_pair_lower_bound_examples():
    assert pair_lower_bound(np.array([[0, 3], [4, 0]])) == 3
    assert pair_lower_bound(np.zeros((4, 4), dtype=np.int64)) == 0
    assert pair_lower_bound(np.array([[0, 1], [0, 0]])) == 0


def test_fenwick_prefix_and_greater():
    tree = FenwickTree(6)
    for pos in (2, 5, 5, 6):
        tree.add(pos)
    assert [tree.prefix(i) for i in range(7)] == [0, 0, 1, 1, 1, 3, 4]
    assert tree.count_greater(4) == 3


def test_sum_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(60):
        inst = random_instance(rng)
        c = crossing_matrix(inst)
        d = inst.degrees
        shared = shared_endpoints(inst)
        off = ~np.eye(inst.n1, dtype=bool)
        assert np.all(c >= 0)
        assert np.array_equal((c + c.T + shared)[off], np.outer(d, d)[off])
        for u in range(inst.n1):
            for v in range(u + 1, inst.n1):
                cuv, cvu, sh = merge_counts(inst.adjacency[u], inst.adjacency[v])
                assert sh == shared[u, v]


def test_merge_agrees_with_quadratic_scan():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n0 = int(rng.integers(1, 25))
        nu = tuple(sorted(rng.choice(n0, size=rng.integers(0, n0 + 1), replace=False) + 1))
        nv = tuple(sorted(rng.choice(n0, size=rng.integers(0, n0 + 1), replace=False) + 1))
        inst = Instance.from_lists(n0, [nu, nv])
        assert pair_crossings(inst, 0, 1) == quadratic_pair(nu, nv)


def test_matrix_entries_match_pair_crossings():
    rng = np.random.default_rng(3)
    for _ in range(20):
        inst = random_instance(rng, 15, 12)
        c = crossing_matrix(inst)
        for u in range(inst.n1):
            for v in range(inst.n1):
                if u != v:
                    assert c[u, v] == pair_crossings(inst, u, v)[0]


def test_fenwick_count_agrees_with_matrix_and_definition():
    rng = np.random.default_rng(4)
    for k in range(100):
        inst = random_instance(rng, 20, 20)
        perm = rng.permutation(inst.n1).tolist()
        fast = count_crossings(inst, perm)
        assert fast == order_cost(crossing_matrix(inst), perm)
        if k < 30:
            assert fast == quadratic_crossings(inst, perm)


def test_pair_lower_bound_below_every_ordering():
    rng = np.random.default_rng(5)
    for _ in range(40):
        inst = random_instance(rng, 8, 7)
        c = crossing_matrix(inst)
        _, costs = all_costs(c)
        assert pair_lower_bound(c) <= costs.min()


def test_entries_are_int64():
    assert crossing_matrix(TWO_STARS).dtype == np.int64
