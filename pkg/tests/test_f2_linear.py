"""Bit-packed GF(2) linear algebra, checked against a list-of-lists reference."""
import random

import pytest
from hypothesis import given, strategies as st

from unstable_ext import f2_linear as fl
from unstable_ext.errors import UsageError


def ref_rank(rows, ncols):
    m = [[(r >> j) & 1 for j in range(ncols)] for r in rows]
    rank, col = 0, 0
    while rank < len(m) and col < ncols:
        pivot = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if pivot is None:
            col += 1
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                m[i] = [a ^ b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


@st.composite
def matrices(draw, max_rows=9, max_cols=9):
    nrows = draw(st.integers(0, max_rows))
    ncols = draw(st.integers(0, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows))
    return fl.BitMatrix(nrows, ncols, tuple(rows))


@given(matrices())
def test_rank_matches_reference(m):
    assert fl.rank(m) == ref_rank(m.rows, m.ncols)


@given(matrices())
def test_rank_nullity(m):
    ker = fl.kernel_basis(m)
    assert len(ker) + fl.rank(m) == m.ncols
    assert all(m.apply(v) == 0 for v in ker)
    assert len(fl.echelon(ker)) == len(ker)


@given(matrices())
def test_transpose_preserves_rank(m):
    assert fl.rank(m.transpose()) == fl.rank(m)
    assert m.transpose().transpose() == m


@given(matrices(), st.data())
def test_solve_consistent_and_inconsistent(m, data):
    x = data.draw(st.integers(0, (1 << m.ncols) - 1))
    b = m.apply(x)
    y = fl.solve(m, b)
    assert y is not None and m.apply(y) == b
    b2 = data.draw(st.integers(0, (1 << m.nrows) - 1))
    y2 = fl.solve(m, b2)
    image = fl.echelon(m.columns)
    assert (y2 is None) == (not fl.in_span(b2, image))


@given(st.data())
def test_product_is_composition(data):
    a = data.draw(matrices())
    k = data.draw(st.integers(0, 9))
    b = fl.BitMatrix(a.ncols, k, tuple(data.draw(st.integers(0, (1 << k) - 1)) for _ in range(a.ncols)))
    ab = a @ b
    for v in range(min(1 << k, 64)):
        assert ab.apply(v) == a.apply(b.apply(v))


@given(st.lists(st.integers(0, 255), max_size=10))
def test_rref_shape(rows):
    red = fl.rref(rows)
    pivots = [c for c, _ in red]
    assert pivots == sorted(pivots)
    for c, r in red:
        assert (r & -r).bit_length() - 1 == c
        assert all(not (r >> c2) & 1 for c2 in pivots if c2 != c)
    assert len(red) == len(fl.echelon(rows))


@given(st.lists(st.integers(1, 1023), max_size=12))
def test_eliminator_dependencies(vectors):
    el = fl.Eliminator()
    for i, v in enumerate(vectors):
        combo = el.add(v)
        if combo is not None:
            acc = 0
            for j in fl.bits(combo):
                acc ^= vectors[j]
            assert acc == 0 and (combo >> i) & 1
    assert el.rank == len(fl.echelon(vectors))
    probe = vectors[0] ^ vectors[-1] if vectors else 0
    residue, combo = el.reduce(probe)
    acc = residue
    for j in fl.bits(combo):
        acc ^= vectors[j]
    assert acc == probe


def test_invert_roundtrip():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 8)
        while True:
            m = fl.BitMatrix(n, n, tuple(rng.getrandbits(n) for _ in range(n)))
            if fl.rank(m) == n:
                break
        assert m @ fl.invert(m) == fl.BitMatrix.identity(n)


def test_singular_and_bad_inputs():
    with pytest.raises(UsageError):
        fl.invert(fl.BitMatrix.from_lists([[1, 1], [1, 1]]))
    with pytest.raises(UsageError):
        fl.solve(fl.BitMatrix.identity(2), [1, 0, 1])
    assert fl.solve(fl.BitMatrix.from_lists([[0, 0]]), [1]) is None


def test_vector_helpers():
    v = fl.vector_from_list([1, 0, 1, 1])
    assert v == 0b1101
    assert fl.vector_to_list(v, 4) == [1, 0, 1, 1]
    assert list(fl.bits(v)) == [0, 2, 3]
    assert fl.parity(v) == 1
