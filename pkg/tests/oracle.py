"""Independent reference computations shared by the test modules."""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from unstable_ext import f2_linear as fl
from unstable_ext import steenrod as st
from unstable_ext import umod

NVARS = 6
POLY_DEGREE = 8


def sorted_monomials(max_degree: int = POLY_DEGREE, nvars: int = NVARS) -> list[tuple[int, ...]]:
    """Monomials of F2[u_1..u_nvars] up to degree max_degree, one per orbit of the symmetric group.

    Steenrod squares commute with permuting the variables, so agreement on
    these representatives is agreement on every monomial.
    """
    out = []

    def rec(left: int, cap: int, acc: tuple):
        if len(acc) == nvars:
            out.append(acc)
            return
        for a in range(min(left, cap), -1, -1):
            rec(left - a, a, acc + (a,))

    for d in range(max_degree + 1):
        rec(d, d, ())
    return [m for m in out if sum(m) <= max_degree]


@lru_cache(maxsize=None)
def sq_on_monomial(a: int, mono: tuple[int, ...]) -> frozenset:
    """Sq^a u^e by the Cartan formula, with Sq^c u^e = binom(e, c) u^(e+c)."""
    out: set = set()

    def rec(j: int, left: int, acc: tuple):
        if j == len(mono):
            if left == 0:
                out.symmetric_difference_update([acc])
            return
        e = mono[j]
        for c in range(min(e, left) + 1):
            if c & e == c:  # Lucas: binom(e, c) is odd
                rec(j + 1, left - c, acc + (e + c,))

    rec(0, a, ())
    return frozenset(out)


def act_word(word, mono: tuple[int, ...]) -> frozenset:
    cur = {mono}
    for a in reversed(word):
        nxt: set = set()
        for m in cur:
            nxt ^= sq_on_monomial(a, m)
        cur = nxt
        if not cur:
            break
    return frozenset(cur)


def act_element(e: st.SteenrodElement, mono: tuple[int, ...]) -> frozenset:
    out: set = set()
    for w in e.terms:
        out ^= act_word(w, mono)
    return frozenset(out)


def word_agrees(word: list[int], monos: list[tuple[int, ...]]) -> bool:
    """The raw word and its Adem normal form act identically on each monomial."""
    e = st.adem_normalize(word)
    return all(act_word(word, m) == act_element(e, m) for m in monos)


def words_up_to(length: int, degree: int):
    for k in range(1, length + 1):
        for w in product(range(1, degree + 1), repeat=k):
            if sum(w) <= degree:
                yield list(w)


def random_words(count: int, length: int, degree: int, seed: int = 0) -> list[list[int]]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(1, length)
        total = rng.randint(k, degree)
        cuts = sorted(rng.sample(range(1, total), k - 1)) if k > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        out.append(parts)
    return out


# brute-force Hom dimension ------------------------------------------------------

def hom_dimension(M: umod.GradedModule, T: umod.GradedModule) -> int:
    """dim of A-linear maps M -> T, by solving the commutation equations directly."""
    W = min(M.window, T.window)
    var = {}
    for d in range(W + 1):
        for i in range(T.dim(d)):
            for j in range(M.dim(d)):
                var[(d, i, j)] = len(var)
    rows = []
    k = 1
    while k <= W:
        for d in range(W + 1 - k):
            for j in range(M.dim(d)):
                src_img = M.act(k, d, 1 << j)
                for i in range(T.dim(d + k)):
                    # (Sq^k f(x_j))_i - (f(Sq^k x_j))_i = 0
                    row = 0
                    for l in range(T.dim(d)):
                        if (T.act(k, d, 1 << l) >> i) & 1:
                            row ^= 1 << var[(d, l, j)]
                    for l in fl.bits(src_img):
                        row ^= 1 << var[(d + k, i, l)]
                    if row:
                        rows.append(row)
        k *= 2
    return len(var) - len(fl.echelon(rows))


def submodule_closure(M: umod.GradedModule, seeds: dict[int, list[int]]) -> dict[int, list[int]]:
    span = {n: fl.echelon(seeds.get(n, ())) for n in range(M.window + 1)}
    for n in range(M.window + 1):
        for v in list(span[n].values()):
            k = 1
            while n + k <= M.window:
                w = M.act(k, n, v)
                if w:
                    piv = span[n + k]
                    w = fl.reduce_vector(w, piv)
                    if w:
                        piv[w.bit_length() - 1] = w
                k += 1
    return {n: list(p.values()) for n, p in span.items() if p}


def random_finite_module(rng: random.Random) -> umod.GradedModule:
    """A sum of Brown-Gitler modules, sometimes divided by a random submodule."""
    indices = sorted((rng.randint(1, 7) for _ in range(rng.randint(1, 3))), reverse=True)
    M = umod.bg_sum(indices)
    if rng.random() < 0.6:
        seeds: dict[int, list[int]] = {}
        for _ in range(rng.randint(1, 3)):
            n = rng.randint(0, M.window)
            if M.dims[n]:
                seeds.setdefault(n, []).append(rng.getrandbits(M.dims[n]) or 1)
        M, _ = umod.quotient_by_subspaces(M, submodule_closure(M, seeds))
    return M
