"""The mod 2 Steenrod algebra in the admissible basis.

Monomials are tuples ``(i1, ..., im)`` read left to right as the composite
Sq^i1 ... Sq^im.  An element is a set of admissible tuples of one degree.
Products are reduced with the Adem relation

    Sq^a Sq^b = sum_c binom(b-c-1, a-2c) Sq^(a+b-c) Sq^c,   a < 2b,

and the polynomial action in ``act_on_polynomials`` gives an independent
check that uses only the Cartan formula.
"""
from __future__ import annotations

import hashlib
import os
import pickle
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import f2_linear as fl
from .errors import InternalError, UsageError

Monomial = tuple[int, ...]

CACHE_ENV = "UNSTABLE_EXT_CACHE_DIR"


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 (Lucas)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


def is_admissible(m: Sequence[int]) -> bool:
    return all(a >= 1 for a in m) and all(m[i] >= 2 * m[i + 1] for i in range(len(m) - 1))


def excess(m: Sequence[int]) -> int:
    if not m:
        return 0
    return m[0] - sum(m[1:])


# memo for sq_mul; writes are idempotent so concurrent fills are harmless
_SQ_MEMO: dict = {}


def sq_mul(a: int, m: Monomial) -> frozenset:
    """Sq^a times an admissible monomial, as a set of admissible monomials."""
    key = (a, m)
    hit = _SQ_MEMO.get(key)
    if hit is not None:
        return hit
    if a == 0:
        out = frozenset([m])
    elif not m or a >= 2 * m[0]:
        out = frozenset([(a,) + m])
    else:
        b, rest = m[0], m[1:]
        acc: set = set()
        for c in range(a // 2 + 1):
            if binom2(b - c - 1, a - 2 * c):
                for k in sq_mul(c, rest):
                    acc ^= sq_mul(a + b - c, k)
        out = frozenset(acc)
    _SQ_MEMO[key] = out
    return out


@lru_cache(maxsize=None)
def admissibles(degree: int, cap: int | None = None) -> tuple[Monomial, ...]:
    """Admissible monomials of a degree whose first entry is at most cap."""
    if cap is None:
        cap = degree
    if degree == 0:
        return ((),)
    out = []
    for i in range(1, min(degree, cap) + 1):
        for rest in admissibles(degree - i, i // 2):
            out.append((i,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def free_basis(n: int, s: int) -> tuple[Monomial, ...]:
    """Admissible monomials of degree s and excess at most n."""
    return tuple(m for m in admissibles(s, (s + n) // 2) if excess(m) <= n)


@lru_cache(maxsize=None)
def free_index(n: int, s: int) -> dict:
    return {m: i for i, m in enumerate(free_basis(n, s))}


@dataclass(frozen=True)
class SteenrodElement:
    terms: frozenset
    degree: int

    def __post_init__(self):
        for t in self.terms:
            if not is_admissible(t):
                raise UsageError(f"{t} is not admissible")
            if sum(t) != self.degree:
                raise UsageError(f"term {t} is not of degree {self.degree}")

    @classmethod
    def zero(cls, degree: int = 0) -> "SteenrodElement":
        return cls(frozenset(), degree)

    @classmethod
    def unit(cls) -> "SteenrodElement":
        return cls(frozenset([()]), 0)

    @classmethod
    def sq(cls, i: int) -> "SteenrodElement":
        return cls.unit() if i == 0 else cls(frozenset([(i,)]), i)

    @classmethod
    def monomial(cls, m: Sequence[int]) -> "SteenrodElement":
        return cls(frozenset([tuple(m)]), sum(m))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.degree != other.degree:
            raise UsageError("cannot add elements of different degrees")
        return SteenrodElement(self.terms ^ other.terms, self.degree)

    def __mul__(self, other: "SteenrodElement") -> "SteenrodElement":
        return multiply(self, other)

    def sorted_terms(self) -> list[Monomial]:
        return sorted(self.terms, reverse=True)

    def __str__(self) -> str:
        return format_element(self)


def normalize_left(a: int, terms: Iterable[Monomial]) -> frozenset:
    out: set = set()
    for t in terms:
        out ^= sq_mul(a, t)
    return frozenset(out)


def adem_normalize(word: Sequence[int]) -> SteenrodElement:
    """The product Sq^word written in the admissible basis."""
    word = [int(a) for a in word if a != 0]
    if any(a < 0 for a in word):
        raise UsageError("negative Steenrod square")
    terms = frozenset([()])
    for a in reversed(word):
        terms = normalize_left(a, terms)
    return SteenrodElement(terms, sum(word))


def multiply(x: SteenrodElement, y: SteenrodElement) -> SteenrodElement:
    if not x.terms or not y.terms:
        return SteenrodElement.zero(x.degree + y.degree)
    out: set = set()
    for s in x.terms:
        for t in y.terms:
            terms = frozenset([t])
            for a in reversed(s):
                terms = normalize_left(a, terms)
            out ^= terms
    return SteenrodElement(frozenset(out), x.degree + y.degree)


# text syntax ---------------------------------------------------------------

_TOKEN = re.compile(r"Sq\s*\^?\s*(\{[\d,\s]*\}|\d+)")


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "Sq^{" + ",".join(str(i) for i in m) + "}"


def format_element(e: SteenrodElement) -> str:
    if not e.terms:
        return "0"
    return " + ".join(format_monomial(m) for m in e.sorted_terms())


def format_word(word: Sequence[int]) -> str:
    return " ".join(f"Sq^{a}" for a in word) if word else "1"


def parse_word(text: str) -> list[int]:
    """Parse one product such as "Sq2 Sq2", "Sq^2 Sq^3" or "Sq^{6,1}"."""
    s = text.strip()
    if s == "1":
        return []
    pos = 0
    out: list[int] = []
    while pos < len(s):
        if s[pos].isspace() or s[pos] == "*":
            pos += 1
            continue
        m = _TOKEN.match(s, pos)
        if not m:
            raise UsageError(f"cannot parse Steenrod word {text!r} at position {pos}")
        body = m.group(1).strip("{}")
        entries = [int(x) for x in body.replace(" ", "").split(",") if x]
        if not entries:
            raise UsageError(f"empty exponent list in {text!r}")
        out.extend(entries)
        pos = m.end()
    if not out:
        raise UsageError(f"no Steenrod squares in {text!r}")
    return out


def parse_element(text: str) -> SteenrodElement:
    """Parse a sum of products, normalizing each summand."""
    s = text.strip()
    if s == "0":
        return SteenrodElement.zero()
    total = None
    for part in s.split("+"):
        e = adem_normalize(parse_word(part))
        total = e if total is None else _add_any_degree(total, e)
    return total


def _add_any_degree(a: SteenrodElement, b: SteenrodElement) -> SteenrodElement:
    if a.degree != b.degree:
        raise UsageError("summands of different degrees")
    return a + b


# polynomial oracle ---------------------------------------------------------

Poly = frozenset  # set of exponent tuples


def _sq_monomial(i: int, exps: tuple[int, ...]) -> set:
    # Sq(u^a) = u^a (1+u)^a for each variable; pick total added degree i
    out: set = set()

    def rec(j: int, left: int, acc: tuple):
        if j == len(exps):
            if left == 0:
                out.symmetric_difference_update([acc])
            return
        a = exps[j]
        for c in range(min(a, left) + 1):
            if binom2(a, c):
                rec(j + 1, left - c, acc + (a + c,))

    rec(0, i, ())
    return out


def act_on_polynomials(e: SteenrodElement | Sequence[int], p: Iterable[tuple[int, ...]], D: int) -> Poly:
    """Action of e (an element, or a raw word read left to right) on p in F2[u_1..u_k]/(deg > D)."""
    p = frozenset(p)
    if isinstance(e, SteenrodElement):
        words = list(e.terms)
        deg = e.degree
    else:
        words = [tuple(e)]
        deg = sum(e)
    top = max((sum(m) for m in p), default=0)
    if top + deg > D:
        raise UsageError(f"degree {top} + {deg} exceeds truncation {D}")
    result: set = set()
    for w in words:
        cur = set(p)
        for a in reversed(w):
            nxt: set = set()
            for mono in cur:
                nxt ^= _sq_monomial(a, mono)
            cur = nxt
        result ^= cur
    return frozenset(result)


def monomials(nvars: int, degree: int) -> Iterator[tuple[int, ...]]:
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for a in range(degree + 1):
        for rest in monomials(nvars - 1, degree - a):
            yield (a,) + rest


# Wall basis and subalgebras -----------------------------------------------

def wall_monomial(n: int, k: int) -> SteenrodElement:
    """Q^n_k = Sq^(2^k) Sq^(2^(k+1)) ... Sq^(2^n)."""
    if n < k or k < 0:
        raise UsageError(f"Q^{n}_{k} needs n >= k >= 0")
    return adem_normalize([1 << j for j in range(k, n + 1)])


@dataclass(frozen=True)
class WallMonomial:
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for n, k in self.factors:
            if n < k or k < 0:
                raise UsageError(f"bad Wall factor {(n, k)}")
        for a, b in zip(self.factors, self.factors[1:]):
            if not b < a:
                raise UsageError("Wall factors must strictly decrease")

    def expand(self) -> SteenrodElement:
        out = SteenrodElement.unit()
        for n, k in self.factors:
            out = out * wall_monomial(n, k)
        return out


@lru_cache(maxsize=None)
def subalgebra_span(n: int, degree: int) -> dict:
    """Echelon basis (over the admissible basis of the degree) of A(n) in that degree."""
    if degree == 0:
        return fl.echelon([1])
    index = {m: i for i, m in enumerate(admissibles(degree))}
    vecs = []
    for i in range(n + 1):
        g = 1 << i
        if g > degree:
            break
        lower = subalgebra_span(n, degree - g)
        lower_basis = admissibles(degree - g)
        for v in lower.values():
            terms: set = set()
            for j in fl.bits(v):
                terms ^= sq_mul(g, lower_basis[j])
            vecs.append(_to_vector(terms, index))
    return fl.echelon(vecs)


def _to_vector(terms: Iterable[Monomial], index: dict) -> int:
    v = 0
    for t in terms:
        v ^= 1 << index[t]
    return v


def in_subalgebra(e: SteenrodElement, n: int, degree_cap: int | None = None) -> bool:
    """Membership in A(n), the subalgebra generated by Sq^1, Sq^2, ..., Sq^(2^n)."""
    if degree_cap is not None and e.degree > degree_cap:
        raise UsageError("element degree exceeds the cap")
    if not e.terms:
        return True
    index = {m: i for i, m in enumerate(admissibles(e.degree))}
    return fl.in_span(_to_vector(e.terms, index), subalgebra_span(n, e.degree))


def wall_m_decomposition(i: int, j: int) -> list[tuple[int, SteenrodElement]]:
    """Elements m^t (t = 1..i) with Sq^(2^i) Sq^(2^j) = sum_t Sq^(2^(i-t)) m^t."""
    if not (0 <= j <= i - 2 or (j == i and i >= 1)):
        raise UsageError("need 0 <= j <= i-2 or j = i >= 1")
    total = (1 << i) + (1 << j)
    index = {m: k for k, m in enumerate(admissibles(total))}
    target = _to_vector(adem_normalize([1 << i, 1 << j]).terms, index)
    columns, owners = [], []
    for t in range(1, i + 1):
        deg = total - (1 << (i - t))
        for m in admissibles(deg):
            columns.append(_to_vector(sq_mul(1 << (i - t), m), index))
            owners.append((t, m))
    x = fl.solve(fl.BitMatrix.from_columns(columns, len(index)), target)
    if x is None:
        raise InternalError(f"no decomposition for (i, j) = ({i}, {j})")
    out = []
    for t in range(1, i + 1):
        terms = frozenset(owners[k][1] for k in fl.bits(x) if owners[k][0] == t)
        out.append((t, SteenrodElement(terms, total - (1 << (i - t)))))
    return out


# persistent memo -----------------------------------------------------------

_MEMO_VERSION = "sq_mul/adem-v1"


def _memo_path() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    digest = hashlib.sha256(_MEMO_VERSION.encode()).hexdigest()[:16]
    return Path(root) / f"sq_mul-{digest}.pickle"


def load_memo() -> int:
    """Seed the multiplication memo from disk; returns the number of entries loaded."""
    path = _memo_path()
    if path is None or not path.exists():
        return 0
    try:
        with path.open("rb") as fh:
            table = pickle.load(fh)
    except (OSError, pickle.UnpicklingError, EOFError):
        return 0
    for key, val in table.items():
        _SQ_MEMO.setdefault(key, val)
    return len(table)


def save_memo() -> Path | None:
    path = _memo_path()
    if path is None:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with tmp.open("wb") as fh:
        pickle.dump(dict(_SQ_MEMO), fh)
    tmp.replace(path)
    return path
