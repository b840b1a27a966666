"""Adem relations, admissible bases and the sub-Hopf algebras A(n)."""
import random

import pytest
from hypothesis import given, strategies as hst

import oracle
from unstable_ext import steenrod as st
from unstable_ext.errors import UsageError

MONOS = oracle.sorted_monomials(6)


def partitions_into_milnor_degrees(n):
    # dim A^n is the number of partitions of n into parts 2^i - 1
    parts = [2 ** i - 1 for i in range(1, 8) if 2 ** i - 1 <= n]
    ways = [1] + [0] * n
    for p in parts:
        for k in range(p, n + 1):
            ways[k] += ways[k - p]
    return ways[n]


@pytest.mark.parametrize("n", range(0, 25))
def test_admissible_count_matches_generating_function(n):
    assert len(st.admissibles(n)) == partitions_into_milnor_degrees(n)


def test_small_identities():
    assert st.adem_normalize([1, 1]) == st.SteenrodElement.zero(2)
    assert st.format_element(st.adem_normalize([2, 2])) == "Sq^{3,1}"
    assert st.format_element(st.adem_normalize([2, 3])) == "Sq^{5} + Sq^{4,1}"
    assert st.format_element(st.adem_normalize([3, 2])) == "0"
    assert st.format_element(st.adem_normalize([1, 2])) == "Sq^{3}"


def test_oracle_separates_distinct_elements():
    # the polynomial action can tell Sq^4 from Sq^3 Sq^1
    assert any(oracle.act_element(st.SteenrodElement.sq(4), m)
               != oracle.act_element(st.SteenrodElement.monomial((3, 1)), m) for m in MONOS)


@given(hst.lists(hst.integers(1, 9), min_size=1, max_size=4))
def test_normal_form_acts_like_word(word):
    assert oracle.word_agrees(word, MONOS)


@given(hst.lists(hst.integers(1, 6), min_size=1, max_size=3),
       hst.lists(hst.integers(1, 6), min_size=1, max_size=3),
       hst.lists(hst.integers(1, 6), min_size=1, max_size=3))
def test_multiplication_associative(a, b, c):
    x, y, z = (st.adem_normalize(w) for w in (a, b, c))
    assert (x * y) * z == x * (y * z)
    assert st.adem_normalize(a + b) == x * y


@given(hst.lists(hst.integers(1, 12), min_size=1, max_size=4))
def test_normal_form_is_admissible_and_idempotent(word):
    e = st.adem_normalize(word)
    assert e.degree == sum(word)
    assert all(st.is_admissible(m) for m in e.terms)
    for m in e.terms:
        assert st.adem_normalize(list(m)) == st.SteenrodElement.monomial(m)


def test_free_basis_of_f1_is_powers_of_two():
    for s in range(0, 64):
        assert bool(st.free_basis(1, s)) == ((s + 1) & s == 0)
        assert len(st.free_basis(1, s)) <= 1


def test_free_basis_excess():
    for n in range(1, 6):
        for s in range(0, 20):
            for m in st.free_basis(n, s):
                assert st.excess(m) <= n and sum(m) == s


@pytest.mark.parametrize("i", range(2, 5))
def test_wall_commutator_in_subalgebra(i):
    for j in range(0, i - 1):
        a, b = 1 << i, 1 << j
        comm = st.adem_normalize([a, b]) + st.adem_normalize([b, a])
        assert st.in_subalgebra(comm, i - 1)


def test_subalgebra_membership_is_strict():
    assert st.in_subalgebra(st.SteenrodElement.sq(2), 1)
    assert not st.in_subalgebra(st.SteenrodElement.sq(4), 1)
    assert st.in_subalgebra(st.adem_normalize([2, 2]), 1)


def test_wall_decomposition_reassembles():
    for i, j in [(2, 0), (3, 0), (3, 1), (4, 2), (2, 2), (3, 3)]:
        total = st.SteenrodElement.zero((1 << i) + (1 << j))
        for t, m in st.wall_m_decomposition(i, j):
            total = total + st.SteenrodElement.sq(1 << (i - t)) * m
        assert total == st.adem_normalize([1 << i, 1 << j])


def test_wall_monomials():
    q = st.wall_monomial(2, 0)
    assert q == st.adem_normalize([1, 2, 4])
    with pytest.raises(UsageError):
        st.wall_monomial(1, 2)


@pytest.mark.parametrize("text,expected", [
    ("Sq2 Sq2", "Sq^{3,1}"), ("Sq^2 Sq^3", "Sq^{5} + Sq^{4,1}"), ("Sq^{6,1}", "Sq^{6,1}"),
    ("Sq3", "Sq^{3}"), ("Sq1*Sq1", "0"), ("Sq^{4,2} + Sq^{5,1}", "Sq^{5,1} + Sq^{4,2}"), ("1", "1"),
])
def test_parse_and_format(text, expected):
    assert st.format_element(st.parse_element(text)) == expected


@pytest.mark.parametrize("bad", ["Sq", "Xq2", "Sq^{}", "Sq2 + Sq3"])
def test_parse_errors(bad):
    with pytest.raises(UsageError):
        st.parse_element(bad)


def test_memo_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(st.CACHE_ENV, str(tmp_path))
    st.adem_normalize([7, 7, 3])
    path = st.save_memo()
    assert path is not None and path.exists()
    assert st.load_memo() > 0


def test_random_words_sample():
    for w in oracle.random_words(40, 4, 18, seed=11):
        assert oracle.word_agrees(w, MONOS)
