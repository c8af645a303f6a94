import itertools

import pytest

from datawords.errors import EmptyWord, NotAPartition, PositionOutOfRange
from datawords.words import (
    alphabet, enumerate_data_words, format_data_word, make_data_word,
    parse_data_word, project_string, same_class, set_partitions,
)

AB = alphabet("a", "b")


def bell_oracle(n):
    """Independent set-partition count: insert elements one at a time."""
    parts = [[]]
    for i in range(n):
        nxt = []
        for p in parts:
            for k in range(len(p)):
                q = [list(b) for b in p]
                q[k].append(i)
                nxt.append(q)
            nxt.append([list(b) for b in p] + [[i]])
        parts = nxt
    return len(parts)


def test_make_data_word_example():
    w = make_data_word("aab", [{0, 2}, {1}])
    assert w.letters == ("a", "a", "b")
    assert same_class(w, 0, 2)
    assert not same_class(w, 1, 0)


def test_single_position_word():
    w = make_data_word("a", [{0}])
    assert w.num_classes() == 1


def test_overlapping_blocks_rejected():
    with pytest.raises(NotAPartition):
        make_data_word("ab", [{0}, {1}, {0}])
    with pytest.raises(NotAPartition):
        make_data_word("ab", [{0}])
    with pytest.raises(EmptyWord):
        make_data_word("", [])


def test_same_class_is_equivalence():
    for w in enumerate_data_words(AB, 3):
        n = len(w)
        for i in range(n):
            assert same_class(w, i, i)
            for j in range(n):
                assert same_class(w, i, j) == same_class(w, j, i)
                for k in range(n):
                    if same_class(w, i, j) and same_class(w, j, k):
                        assert same_class(w, i, k)


def test_same_class_range_check(sigma_word):
    with pytest.raises(PositionOutOfRange):
        same_class(sigma_word, 0, 3)


def test_canonicalization_idempotent():
    for w in enumerate_data_words(AB, 3):
        again = make_data_word(w.letters, w.blocks)
        assert again == w


def test_enumeration_counts():
    words = list(enumerate_data_words(AB, 1))
    assert len(words) == 2
    words = list(enumerate_data_words(AB, 2))
    assert len(words) == 10  # 2 + 2^2 * Bell(2)
    exactly3 = [w for w in enumerate_data_words(AB, 3) if len(w) == 3]
    assert len(exactly3) == 40  # 2^3 * Bell(3), Bell(3) = 5 by listing


def test_enumeration_matches_bell_oracle():
    for n in range(1, 5):
        per_length = [w for w in enumerate_data_words(AB, n) if len(w) == n]
        assert len(per_length) == (2 ** n) * bell_oracle(n)
        assert len(set(per_length)) == len(per_length)


def test_set_partitions_count_matches_oracle():
    for n in range(1, 6):
        assert len(list(set_partitions(n))) == bell_oracle(n)


def test_enumeration_deterministic_order():
    a = list(itertools.islice(enumerate_data_words(AB, 3), 20))
    b = list(itertools.islice(enumerate_data_words(AB, 3), 20))
    assert a == b
    assert a[0].letters == ("a",)


def test_project_string():
    w = make_data_word("aab", [{0, 2}, {1}])
    assert project_string(w, {"a": "a", "b": "b"}) == ("a", "a", "b")
    assert project_string(w, {"a": "", "b": ""}) == ()
    pair = make_data_word(["t1", "t2"], [{0}, {1}])
    assert project_string(pair, {"t1": "a", "t2": ""}) == ("a",)


def test_parse_and_format_round_trip():
    w = parse_data_word("a a b ; 0 2 | 1")
    assert w == make_data_word("aab", [{0, 2}, {1}])
    assert parse_data_word(format_data_word(w)) == w
    with pytest.raises(NotAPartition):
        parse_data_word("a b ; 0 | 0 1")
