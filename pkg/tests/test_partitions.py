import pytest

from ksep import Partition, count_partitions, enumerate_partitions

from helpers import bell_number


def test_three_parties_two_blocks():
    parts = list(enumerate_partitions(3, 2))
    assert len(parts) == 3
    assert {p.blocks for p in parts} == {
        ((0,), (1, 2)),
        ((0, 1), (2,)),
        ((0, 2), (1,)),
    }


def test_all_singletons_is_the_only_full_partition():
    parts = list(enumerate_partitions(3, 3))
    assert [p.blocks for p in parts] == [((0,), (1,), (2,))]


def test_counts_without_enumeration():
    assert count_partitions(3, 3) == 1
    assert count_partitions(3, 2) == 3
    # recurrence S(n,k) = k S(n-1,k) + S(n-1,k-1) gives 7 and 25 here
    assert count_partitions(4, 2) == 7
    assert count_partitions(5, 3) == 25


def test_counts_match_enumeration():
    for n in range(2, 11):
        for k in range(2, n + 1):
            assert count_partitions(n, k) == sum(1 for _ in enumerate_partitions(n, k))


def test_enumeration_is_canonical_and_duplicate_free():
    for n in range(2, 8):
        for k in range(2, n + 1):
            seen = set()
            for part in enumerate_partitions(n, k):
                assert part.k == k
                assert part.n == n
                flat = [i for block in part.blocks for i in block]
                assert sorted(flat) == list(range(n))
                for block in part.blocks:
                    assert list(block) == sorted(block)
                    assert block
                mins = [block[0] for block in part.blocks]
                assert mins == sorted(mins)
                assert part.blocks not in seen
                seen.add(part.blocks)


def test_enumeration_order_is_stable():
    first = [p.blocks for p in enumerate_partitions(5, 3)]
    second = [p.blocks for p in enumerate_partitions(5, 3)]
    assert first == second


def test_counts_sum_to_bell_numbers():
    for n in range(2, 11):
        total = sum(count_partitions(n, k) for k in range(2, n + 1))
        assert total == bell_number(n) - 1


@pytest.mark.parametrize("n,k", [(3, 1), (3, 0), (3, 4), (1, 1), (2, 5)])
def test_out_of_range_block_counts_rejected(n, k):
    with pytest.raises(ValueError):
        count_partitions(n, k)
    with pytest.raises(ValueError):
        list(enumerate_partitions(n, k))


def test_label_rendering():
    part = Partition(((0,), (1, 2)))
    assert part.label() == "{0|1,2}"
    assert Partition(((0, 1), (2,), (3,))).label() == "{0,1|2|3}"


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(((0,), (0, 1)))  # overlap
    with pytest.raises(ValueError):
        Partition(((0,), (2,)))  # gap
    with pytest.raises(ValueError):
        Partition(((1, 0), (2,)))  # unsorted block
    with pytest.raises(ValueError):
        Partition(((1, 2), (0,)))  # blocks out of canonical order
    with pytest.raises(ValueError):
        Partition(((0,), ()))  # empty block
