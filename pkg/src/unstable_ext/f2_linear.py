"""Linear algebra over GF(2) with Python integers as packed bit vectors.

A vector of length n is an int whose bit j holds coordinate j.  A
``BitMatrix`` stores its rows this way, so row operations are single XORs
on arbitrary-width words.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import UsageError


def bits(v: int) -> Iterable[int]:
    """Indices of the set bits of v, lowest first."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def vector_from_list(entries: Sequence[int]) -> int:
    v = 0
    for j, e in enumerate(entries):
        if e & 1:
            v |= 1 << j
    return v


def vector_to_list(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise UsageError("matrix dimensions must be non-negative")
        if not self.rows:
            object.__setattr__(self, "rows", (0,) * self.nrows)
        if len(self.rows) != self.nrows:
            raise UsageError("row count does not match nrows")
        mask = ~((1 << self.ncols) - 1)
        for r in self.rows:
            if r < 0 or r & mask:
                raise UsageError("row has bits outside the column range")

    # construction
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: Optional[int] = None) -> "BitMatrix":
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        return cls(len(entries), ncols, tuple(vector_from_list(r) for r in entries))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "BitMatrix":
        rows = [0] * nrows
        for j, c in enumerate(columns):
            for i in bits(c):
                rows[i] |= 1 << j
        return cls(nrows, len(columns), tuple(rows))

    # access
    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [vector_to_list(r, self.ncols) for r in self.rows]

    @cached_property
    def columns(self) -> tuple[int, ...]:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in bits(r):
                cols[j] |= 1 << i
        return tuple(cols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.ncols, self.nrows, self.columns)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def apply(self, v: int) -> int:
        """m·v for a column vector v of length ncols."""
        out = 0
        cols = self.columns
        for j in bits(v):
            out ^= cols[j]
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise UsageError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        return BitMatrix.from_columns([self.apply(c) for c in other.columns], self.nrows)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise UsageError("shape mismatch in matrix sum")
        return BitMatrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def __repr__(self) -> str:
        body = "; ".join("".join(str(x) for x in vector_to_list(r, self.ncols)) for r in self.rows)
        return f"BitMatrix({self.nrows}x{self.ncols}: {body})"


def rref(rows: Iterable[int]) -> list[tuple[int, int]]:
    """Reduced row echelon form with lowest-index pivots.

    Returns (pivot column, row) pairs sorted by pivot column.  Each row has
    its pivot as lowest set bit and no bit in any other pivot column.
    """
    piv: dict[int, int] = {}
    for r in rows:
        while r:
            c = (r & -r).bit_length() - 1
            p = piv.get(c)
            if p is None:
                piv[c] = r
                break
            r ^= p
    order = sorted(piv)
    # clear each pivot column from the rows with smaller pivots, top pivot first
    for idx in range(len(order) - 1, -1, -1):
        c = order[idx]
        bit = 1 << c
        pr = piv[c]
        for c2 in order[:idx]:
            if piv[c2] & bit:
                piv[c2] ^= pr
    return [(c, piv[c]) for c in order]


def rank(m: BitMatrix) -> int:
    return len(echelon(m.rows))


def echelon(vectors: Iterable[int]) -> dict[int, int]:
    """Echelon basis of the span keyed by highest set bit."""
    piv: dict[int, int] = {}
    for v in vectors:
        v = reduce_vector(v, piv)
        if v:
            piv[v.bit_length() - 1] = v
    return piv


def reduce_vector(v: int, piv: dict[int, int]) -> int:
    """Reduce v against an echelon basis keyed by highest bit."""
    while v:
        p = piv.get(v.bit_length() - 1)
        if p is None:
            return v
        v ^= p
    return 0


def in_span(v: int, piv: dict[int, int]) -> bool:
    return reduce_vector(v, piv) == 0


def kernel_basis(m: BitMatrix) -> list[int]:
    """Basis of {v : m·v = 0}, one vector per free column in increasing order."""
    red = rref(m.rows)
    pivots = {c for c, _ in red}
    out = []
    for f in range(m.ncols):
        if f in pivots:
            continue
        v = 1 << f
        for c, r in red:
            if (r >> f) & 1:
                v |= 1 << c
        out.append(v)
    return out


def solve(m: BitMatrix, b: int | Sequence[int]) -> Optional[int]:
    """Pivot-canonical x with m·x = b, or None when the system is inconsistent."""
    if not isinstance(b, int):
        if len(b) != m.nrows:
            raise UsageError(f"right-hand side has length {len(b)}, expected {m.nrows}")
        b = vector_from_list(b)
    elif b >> m.nrows:
        raise UsageError("right-hand side has bits beyond the row count")
    aug = 1 << m.ncols
    rows = [r | (aug if (b >> i) & 1 else 0) for i, r in enumerate(m.rows)]
    x = 0
    for c, r in rref(rows):
        if c == m.ncols:
            return None
        if r & aug:
            x |= 1 << c
    return x


def image_basis(columns: Sequence[int]) -> dict[int, int]:
    return echelon(columns)


def invert(m: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix."""
    n = m.nrows
    if m.ncols != n:
        raise UsageError("only square matrices can be inverted")
    shift = n
    red = rref(r | (1 << (shift + i)) for i, r in enumerate(m.rows))
    if len(red) < n or any(c >= n for c, _ in red):
        raise UsageError("matrix is singular")
    inv_rows = [r >> shift for _, r in red]
    return BitMatrix(n, n, tuple(inv_rows))


class Eliminator:
    """Incremental column elimination that remembers how each pivot was built.

    ``add`` returns None when the vector became a new pivot, otherwise the
    combination of input indices summing to zero.
    """

    __slots__ = ("piv", "count", "track")

    def __init__(self, track: bool = True):
        self.piv: dict[int, tuple[int, int]] = {}
        self.count = 0
        self.track = track

    def add(self, v: int) -> Optional[int]:
        c = (1 << self.count) if self.track else 0
        self.count += 1
        piv = self.piv
        while v:
            p = piv.get(v.bit_length() - 1)
            if p is None:
                piv[v.bit_length() - 1] = (v, c)
                return None
            v ^= p[0]
            c ^= p[1]
        return c

    def reduce(self, v: int) -> tuple[int, int]:
        """Residue of v and the combination of inputs that was subtracted."""
        c = 0
        piv = self.piv
        while v:
            p = piv.get(v.bit_length() - 1)
            if p is None:
                break
            v ^= p[0]
            c ^= p[1]
        return v, c

    @property
    def rank(self) -> int:
        return len(self.piv)
