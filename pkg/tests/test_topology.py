"""Link-allocation space: indexing, counting, connectivity, serialization."""

import math
import random

import pytest

from noc_pareto.topology import (
    AllocationFormatError,
    InvalidPairError,
    LinkAllocation,
    combination_count,
    flip_link,
    fully_connected_allocation,
    is_connected,
    link_index,
    link_pair,
    mesh_allocation,
    num_links,
    parse_allocation,
    random_allocation,
)

from oracles import all_pairs_lexicographic, union_find_connected


def test_link_index_examples():
    assert link_index(0, 1, 4) == 0
    # derived: position of (2, 3) in the lexicographic enumeration of n=4
    assert all_pairs_lexicographic(4).index((2, 3)) == 5
    assert link_index(2, 3, 4) == 5
    for n in (2, 4, 9, 16):
        assert link_index(n - 2, n - 1, n) == num_links(n) - 1


def test_link_index_is_bijection():
    for n in range(2, 13):
        indices = [link_index(i, j, n) for i, j in all_pairs_lexicographic(n)]
        assert indices == list(range(num_links(n)))


def test_link_pair_inverts_link_index():
    for n in (2, 5, 9):
        for k in range(num_links(n)):
            i, j = link_pair(k, n)
            assert link_index(i, j, n) == k
    with pytest.raises(IndexError):
        link_pair(num_links(5), 5)


def test_link_index_rejects_bad_pairs():
    with pytest.raises(InvalidPairError):
        link_index(2, 2, 4)
    with pytest.raises(InvalidPairError):
        link_index(3, 1, 4)
    with pytest.raises(InvalidPairError):
        link_index(0, 4, 4)
    with pytest.raises(InvalidPairError):
        link_index(-1, 2, 4)


def test_num_links_values():
    assert num_links(9) == 36
    assert num_links(64) == 2016
    assert num_links(2) == 1
    for n in range(2, 33):
        assert num_links(n) == len(all_pairs_lexicographic(n))
    with pytest.raises(ValueError):
        num_links(1)


def test_combination_count_exact():
    assert combination_count(9) == 68_719_476_736
    assert combination_count(2) == 2
    assert combination_count(6) == 2**15 == 32_768
    for n in range(2, 33):
        assert combination_count(n) == 2 ** num_links(n)
    # far beyond 64-bit range; must stay exact
    assert combination_count(64) == 2**2016
    assert combination_count(64).bit_length() == 2017


def test_is_connected_examples():
    assert is_connected(fully_connected_allocation(5))
    chain = LinkAllocation(4, 0)
    for i in range(3):
        chain = flip_link(chain, link_index(i, i + 1, 4))
    assert chain.link_count == 3
    assert is_connected(chain)
    only_one = LinkAllocation(4, 1 << link_index(0, 1, 4))
    assert not is_connected(only_one)


def test_is_connected_matches_union_find_oracle():
    rng = random.Random(2024)
    for _ in range(1000):
        n = rng.randint(2, 8)
        alloc = LinkAllocation(n, rng.getrandbits(num_links(n)))
        assert is_connected(alloc) == union_find_connected(alloc)


def test_fewer_than_tree_links_is_disconnected():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(3, 8)
        p = num_links(n)
        ks = rng.sample(range(p), rng.randint(0, n - 2))
        mask = 0
        for k in ks:
            mask |= 1 << k
        assert not is_connected(LinkAllocation(n, mask))


def test_mesh_allocation_link_counts():
    assert mesh_allocation(4, 4).link_count == 24
    assert mesh_allocation(6, 6).link_count == 60
    assert mesh_allocation(8, 8).link_count == 112
    for rows in range(2, 11):
        for cols in range(2, 11):
            m = mesh_allocation(rows, cols)
            assert m.link_count == rows * (cols - 1) + cols * (rows - 1)
            assert is_connected(m)


def test_mesh_links_are_grid_neighbors():
    m = mesh_allocation(3, 4)
    for i, j in m.links():
        ri, ci = divmod(i, 4)
        rj, cj = divmod(j, 4)
        assert abs(ri - rj) + abs(ci - cj) == 1


def test_fully_connected():
    fc = fully_connected_allocation(4)
    assert fc.link_count == 6
    assert fc.mask == (1 << 6) - 1
    assert fully_connected_allocation(64).link_count == 2016
    assert is_connected(fc)


def test_random_allocation_determinism_and_n2():
    a = random_allocation(9, random.Random(99))
    b = random_allocation(9, random.Random(99))
    assert a == b
    assert random_allocation(2, random.Random(0), require_connected=True).mask == 1


def test_random_allocation_binomial_mean():
    # n=9: link count ~ Binomial(36, 1/2); mean of 10^4 draws within 3 sigma
    rng = random.Random(31337)
    draws = 10_000
    mean = sum(random_allocation(9, rng).link_count for _ in range(draws)) / draws
    sigma_of_mean = math.sqrt(36 * 0.25 / draws)
    assert abs(mean - 18.0) <= 3 * sigma_of_mean


def test_flip_link():
    fc = fully_connected_allocation(4)
    once = flip_link(fc, 0)
    assert once.link_count == 5
    assert flip_link(once, 0) == fc
    assert fc.link_count == 6  # input unchanged
    rng = random.Random(1)
    for _ in range(100):
        a = random_allocation(5, rng)
        k = rng.randrange(a.p)
        b = flip_link(a, k)
        assert (a.mask ^ b.mask).bit_count() == 1
    with pytest.raises(IndexError):
        flip_link(fc, 6)
    with pytest.raises(IndexError):
        flip_link(fc, -1)


def test_bit_string_round_trip():
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(2, 9)
        a = random_allocation(n, rng)
        s = a.to_bit_string()
        assert len(s) == a.p
        assert LinkAllocation.from_bit_string(s) == a
    with pytest.raises(AllocationFormatError):
        LinkAllocation.from_bit_string("0102")
    with pytest.raises(AllocationFormatError):
        LinkAllocation.from_bit_string("0000")  # length 4 is not triangular


def test_hex_string_round_trip():
    a = LinkAllocation.from_bit_string("110100")
    assert a.to_hex_string() == "n=4;bits=b0"
    assert LinkAllocation.from_hex_string("n=4;bits=b0") == a
    rng = random.Random(8)
    for _ in range(50):
        n = rng.randint(2, 10)
        a = random_allocation(n, rng)
        assert LinkAllocation.from_hex_string(a.to_hex_string()) == a
    with pytest.raises(AllocationFormatError):
        LinkAllocation.from_hex_string("n=4;bits=zz")
    with pytest.raises(AllocationFormatError):
        LinkAllocation.from_hex_string("n=4;bits=b00")


def test_parse_allocation_both_forms():
    mesh = mesh_allocation(2, 2)
    assert parse_allocation(mesh.to_bit_string()) == mesh
    assert parse_allocation(mesh.to_hex_string()) == mesh
    with pytest.raises(AllocationFormatError):
        parse_allocation(mesh.to_bit_string(), n=5)


def test_degrees():
    fc = fully_connected_allocation(5)
    assert fc.degrees() == [4] * 5
    m = mesh_allocation(2, 2)
    assert m.degrees() == [2, 2, 2, 2]
