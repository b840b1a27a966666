"""Unstable modules over the Steenrod algebra on a bounded degree window.

A ``GradedModule`` stores, for every k >= 1 and source degree n, the images
of the basis of M^n under Sq^k as packed bit columns over the basis of
M^(n+k).  Zero blocks are omitted.  Modules marked ``truncated`` are the
part in degrees <= window of an infinite module.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import f2_linear as fl
from . import steenrod as st
from .errors import InternalError, UsageError

Columns = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GradedModule:
    window: int
    dims: tuple[int, ...]
    labels: tuple[tuple[str, ...], ...]
    action: Mapping[tuple[int, int], Columns]
    truncated: bool = False
    name: str = ""
    summands: Optional[tuple[int, ...]] = None  # Brown-Gitler indices for sums of J(n)

    def __post_init__(self):
        if len(self.dims) != self.window + 1 or len(self.labels) != self.window + 1:
            raise UsageError("dims and labels must cover degrees 0..window")
        for n, d in enumerate(self.dims):
            if len(self.labels[n]) != d:
                raise UsageError(f"degree {n}: {len(self.labels[n])} labels for dimension {d}")

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n <= self.window else 0

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @cached_property
    def top_degree(self) -> int:
        nz = [n for n, d in enumerate(self.dims) if d]
        return nz[-1] if nz else -1

    @cached_property
    def bottom_degree(self) -> int:
        nz = [n for n, d in enumerate(self.dims) if d]
        return nz[0] if nz else self.window + 1

    def is_zero(self) -> bool:
        return not any(self.dims)

    def act(self, k: int, n: int, v: int) -> int:
        """Sq^k applied to a vector of M^n."""
        if k == 0:
            return v
        cols = self.action.get((k, n))
        if cols is None or not v:
            return 0
        out = 0
        for j in fl.bits(v):
            out ^= cols[j]
        return out

    def act_word(self, word: Sequence[int], n: int, v: int) -> int:
        """Composite Sq^w1 ... Sq^wm applied to v in degree n (rightmost first)."""
        for a in reversed(word):
            v = self.act(a, n, v)
            n += a
            if not v:
                return 0
        return v

    def act_element(self, e: st.SteenrodElement, n: int, v: int) -> int:
        out = 0
        for m in e.terms:
            out ^= self.act_word(m, n, v)
        return out

    def action_matrix(self, k: int, n: int) -> fl.BitMatrix:
        cols = self.action.get((k, n))
        rows = self.dim(n + k)
        if cols is None:
            return fl.BitMatrix.zeros(rows, self.dim(n))
        return fl.BitMatrix.from_columns(cols, rows)

    def with_window(self, window: int) -> "GradedModule":
        """Pad with zeros (finite modules) or cut down to a smaller window."""
        if window == self.window:
            return self
        if window > self.window:
            if self.truncated:
                raise UsageError("cannot enlarge the window of a truncated module")
            pad = window - self.window
            return replace(self, window=window, dims=self.dims + (0,) * pad,
                           labels=self.labels + ((),) * pad)
        # cutting off classes of a finite module leaves a truncated one
        cut = self.truncated or self.top_degree > window
        action = {(k, n): c for (k, n), c in self.action.items() if n + k <= window}
        return replace(self, window=window, dims=self.dims[:window + 1],
                       labels=self.labels[:window + 1], action=action, truncated=cut)

    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.summands is not None:
            return bg_name(self.summands)
        return f"<module dims={list(self.dims)}>"

    def __repr__(self) -> str:
        return f"GradedModule({self.display_name()}, window={self.window})"


def build_module(window: int, bases: Sequence[Sequence], label: Callable[[object], str],
                 total: Callable[[int, object], Iterable[tuple[int, object]]], truncated: bool,
                 name: str = "", summands=None) -> GradedModule:
    """Assemble a module from per-degree bases of hashable keys.

    ``total(n, key)`` yields pairs (k, key') for the terms of Sq^k(key),
    k >= 1; repeated terms cancel and terms past the window are dropped.
    """
    index = [{b: i for i, b in enumerate(basis)} for basis in bases]
    acc: dict = {}
    for n in range(window + 1):
        d = len(bases[n])
        for j, b in enumerate(bases[n]):
            for k, key in total(n, b):
                if k < 1 or n + k > window:
                    continue
                cols = acc.get((k, n))
                if cols is None:
                    cols = acc[(k, n)] = [0] * d
                cols[j] ^= 1 << index[n + k][key]
    action = {key: tuple(cols) for key, cols in acc.items() if any(cols)}
    return GradedModule(window, tuple(len(b) for b in bases),
                        tuple(tuple(label(b) for b in basis) for basis in bases),
                        action, truncated, name, summands)


def _submasks(a: int) -> list[int]:
    out = []
    c = a
    while True:
        out.append(c)
        if c == 0:
            return out
        c = (c - 1) & a


# printer -------------------------------------------------------------------

def bg_name(indices: Iterable[int]) -> str:
    """Shorthand J(n1,...,nk) for a sum of Brown-Gitler modules, largest first."""
    idx = sorted(indices, reverse=True)
    if not idx:
        return "0"
    return "J(" + ",".join(str(i) for i in idx) + ")"


# constructors ----------------------------------------------------------------

def zero_module(window: int = 0) -> GradedModule:
    return GradedModule(window, (0,) * (window + 1), ((),) * (window + 1), {}, False, "0", ())


def trivial_module() -> GradedModule:
    return GradedModule(0, (1,), (("1",),), {}, False, "F2")


def sigma_simple(n: int) -> GradedModule:
    return replace(suspension(trivial_module(), n), name=f"Sigma^{n} F2" if n != 1 else "Sigma F2")


def _bg_monomials(n: int) -> list[list[tuple[int, ...]]]:
    if n == 0:
        return [[()]]
    L = n.bit_length() - 1
    by_degree: list[list[tuple[int, ...]]] = [[] for _ in range(n + 1)]

    def rec(i: int, left: int, acc: list):
        if i < 0:
            if left == 0:
                e = tuple(reversed(acc))
                by_degree[sum(e)].append(e)
            return
        w = 1 << i
        for c in range(left // w + 1):
            rec(i - 1, left - c * w, acc + [c])

    rec(L, n, [])
    for lst in by_degree:
        lst.sort(reverse=True)
    return by_degree


def _bg_label(e: tuple[int, ...]) -> str:
    parts = []
    for i, a in enumerate(e):
        if a == 1:
            parts.append(f"x{i}")
        elif a > 1:
            parts.append(f"x{i}^{a}")
    return "*".join(parts) if parts else "1"


def _bg_total(e: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    # total square: Sq x_i = x_i + x_{i-1}^2 and Sq x_0 = x_0, so
    # Sq(x^e) = prod_i (x_i + x_{i-1}^2)^(e_i); binom(e_i, c) is odd iff c is a submask
    terms = [(0, list(e))]
    for i in range(1, len(e)):
        nxt = []
        for k, cur in terms:
            for c in _submasks(e[i]):
                new = list(cur)
                new[i] -= c
                new[i - 1] += 2 * c
                nxt.append((k + c, new))
        terms = nxt
    return [(k, tuple(t)) for k, t in terms if k]


def brown_gitler(n: int, window: Optional[int] = None) -> GradedModule:
    """J(n): monomials in x_i (degree 1, weight 2^i) of total weight n."""
    if n < 0:
        raise UsageError("J(n) needs n >= 0")
    bases = _bg_monomials(n)
    M = build_module(n, bases, _bg_label, lambda d, e: _bg_total(e), False, f"J({n})", (n,))
    return M if window is None else M.with_window(window)


def free_module(n: int, D: int) -> GradedModule:
    """F(n) through degree D: basis Sq^I i_n with I admissible of excess <= n."""
    if n < 1 or D < n:
        raise UsageError("free_module needs n >= 1 and D >= n")
    bases = [[] for _ in range(D + 1)]
    for t in range(n, D + 1):
        bases[t] = list(st.free_basis(n, t - n))

    def total(t, I):
        for k in range(1, D - t + 1):
            for K in st.sq_mul(k, I):
                if st.excess(K) <= n:
                    yield k, K

    def label(I):
        return (f"Sq[{','.join(map(str, I))}]i_{n}") if I else f"i_{n}"

    return build_module(D, bases, label, total, True, f"F({n})")


def cohomology_BV(k: int, D: int) -> GradedModule:
    """F2[u_1..u_k] through degree D."""
    if k < 1 or D < 1:
        raise UsageError("cohomology_BV needs k >= 1 and D >= 1")
    bases = [sorted(st.monomials(k, t), reverse=True) for t in range(D + 1)]

    def label(e):
        parts = [f"u{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a]
        return "*".join(parts) if parts else "1"

    def total(t, e):
        terms = [(0, ())]
        for a in e:
            terms = [(s + c, acc + (a + c,)) for s, acc in terms for c in _submasks(a)]
        return [(s, m) for s, m in terms if s and t + s <= D]

    return build_module(D, bases, label, total, True, f"H*(BV_{k})")


def direct_sum(modules: Sequence[GradedModule], window: Optional[int] = None) -> GradedModule:
    if not modules:
        return zero_module(window or 0)
    if window is None:
        window = max(M.window for M in modules)
    mods = [M if M.window == window else M.with_window(window) for M in modules]
    dims, labels, action = [], [], {}
    offsets = []
    for n in range(window + 1):
        off, lab = [], []
        acc = 0
        for i, M in enumerate(mods):
            off.append(acc)
            acc += M.dims[n]
            lab.extend(f"{i}:{s}" for s in M.labels[n])
        offsets.append(off)
        dims.append(acc)
        labels.append(tuple(lab))
    keys = sorted({key for M in mods for key in M.action})
    for k, n in keys:
        cols = []
        for i, M in enumerate(mods):
            c = M.action.get((k, n))
            if c is None:
                cols.extend([0] * M.dims[n])
            else:
                sh = offsets[n + k][i]
                cols.extend(x << sh for x in c)
        if any(cols):
            action[(k, n)] = tuple(cols)
    summands = None
    if all(M.summands is not None for M in mods):
        summands = tuple(i for M in mods for i in M.summands)
    truncated = any(M.truncated for M in mods)
    name = bg_name(summands) if summands is not None else " + ".join(M.display_name() for M in mods)
    return GradedModule(window, tuple(dims), tuple(labels), action, truncated, name, summands)


def bg_sum(indices: Sequence[int], window: Optional[int] = None) -> GradedModule:
    if window is None:
        window = max(indices, default=0)
    if not indices:
        return zero_module(window)
    return direct_sum([brown_gitler(n) for n in indices], window)


def suspension(M: GradedModule, s: int, window: Optional[int] = None) -> GradedModule:
    if s < 0:
        raise UsageError("suspension degree must be non-negative")
    W = M.window + s if window is None else window
    if W < M.window + s and (M.truncated or M.top_degree + s > W):
        raise UsageError("suspension overflows the window")
    dims = [0] * (W + 1)
    labels: list = [()] * (W + 1)
    for n in range(M.window + 1):
        if n + s <= W:
            dims[n + s] = M.dims[n]
            labels[n + s] = tuple(f"s{s}({x})" for x in M.labels[n]) if s else M.labels[n]
    action = {(k, n + s): c for (k, n), c in M.action.items() if n + s + k <= W}
    name = f"Sigma^{s} {M.display_name()}" if s else M.display_name()
    out = GradedModule(W, tuple(dims), tuple(labels), action, M.truncated, name)
    return out


def frobenius(M: GradedModule) -> GradedModule:
    """Phi M: (Phi M)^(2n) = M^n, Sq^(2k) Phi x = Phi Sq^k x, odd squares zero."""
    W = 2 * M.window
    dims = [0] * (W + 1)
    labels: list = [()] * (W + 1)
    for n in range(M.window + 1):
        dims[2 * n] = M.dims[n]
        labels[2 * n] = tuple(f"P({x})" for x in M.labels[n])
    action = {(2 * k, 2 * n): c for (k, n), c in M.action.items()}
    return GradedModule(W, tuple(dims), tuple(labels), action, M.truncated,
                        _phi_name(M.display_name()))


def _phi_name(name: str) -> str:
    m = re.fullmatch(r"Phi\^(\d+) (.*)", name)
    if m:
        return f"Phi^{int(m.group(1)) + 1} {m.group(2)}"
    return f"Phi^1 {name}"


def frobenius_power(M: GradedModule, r: int) -> GradedModule:
    for _ in range(r):
        M = frobenius(M)
    return M


def tensor(M: GradedModule, N: GradedModule, window: Optional[int] = None) -> GradedModule:
    """M (x) N with the Cartan diagonal action."""
    if M.truncated or N.truncated:
        W = min(M.window + max(N.bottom_degree, 0), N.window + max(M.bottom_degree, 0))
    else:
        W = max(M.top_degree, 0) + max(N.top_degree, 0)
    if window is not None:
        W = min(W, window) if (M.truncated or N.truncated) else window
    bases: list = [[] for _ in range(W + 1)]
    for p in range(min(M.window, W) + 1):
        for q in range(min(N.window, W - p) + 1):
            for a in range(M.dim(p)):
                for b in range(N.dim(q)):
                    bases[p + q].append((p, a, q, b))

    def total(t, key):
        p, a, q, b = key
        left = [(i, M.act(i, p, 1 << a)) for i in range(W - t + 1)]
        right = [(i, N.act(i, q, 1 << b)) for i in range(W - t + 1)]
        for i, x in left:
            if not x:
                continue
            for j, y in right:
                if not y or i + j == 0 or i + j > W - t:
                    continue
                for a2 in fl.bits(x):
                    for b2 in fl.bits(y):
                        yield i + j, (p + i, a2, q + j, b2)

    def label(key):
        p, a, q, b = key
        return f"{M.labels[p][a]}|{N.labels[q][b]}"

    name = f"T({M.display_name()},{N.display_name()})"
    return build_module(W, bases, label, total, M.truncated or N.truncated, name)


# maps ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: GradedModule
    target: GradedModule
    blocks: Mapping[int, Columns]  # degree -> images of the source basis
    window: int = -1

    def __post_init__(self):
        w = min(self.source.window, self.target.window)
        if self.window < 0 or self.window > w:
            object.__setattr__(self, "window", w)

    def block(self, n: int) -> Columns:
        b = self.blocks.get(n)
        if b is None:
            return (0,) * self.source.dim(n)
        return b

    def apply(self, n: int, v: int) -> int:
        b = self.blocks.get(n)
        if b is None or not v:
            return 0
        out = 0
        for j in fl.bits(v):
            out ^= b[j]
        return out

    def matrix(self, n: int) -> fl.BitMatrix:
        return fl.BitMatrix.from_columns(self.block(n), self.target.dim(n))

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """self o inner."""
        w = min(self.window, inner.window)
        blocks = {n: tuple(self.apply(n, c) for c in inner.block(n)) for n in range(w + 1)
                  if inner.source.dim(n)}
        return ModuleMap(inner.source, self.target, blocks, w)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        w = min(self.window, other.window)
        blocks = {n: tuple(a ^ b for a, b in zip(self.block(n), other.block(n)))
                  for n in range(w + 1) if self.source.dim(n)}
        return ModuleMap(self.source, self.target, blocks, w)

    def validate(self) -> list[tuple[int, int]]:
        """(k, n) pairs where Sq^k f != f Sq^k on degree n."""
        bad = []
        S, T = self.source, self.target
        for n in range(self.window + 1):
            if not S.dim(n):
                continue
            blk = self.block(n)
            if len(blk) != S.dim(n) or any(c >> T.dim(n) for c in blk):
                bad.append((0, n))
                continue
            for k in range(1, self.window - n + 1):
                for j in range(S.dim(n)):
                    if T.act(k, n, blk[j]) != self.apply(n + k, S.act(k, n, 1 << j)):
                        bad.append((k, n))
                        break
        return bad

    def is_zero(self) -> bool:
        return not any(any(b) for b in self.blocks.values())

    def is_injective(self) -> bool:
        return all(fl.echelon(self.block(n)).__len__() == self.source.dim(n)
                   for n in range(self.window + 1))

    def is_surjective(self) -> bool:
        return all(len(fl.echelon(self.block(n))) == self.target.dim(n)
                   for n in range(self.window + 1))

    def kernel(self, n: int) -> list[int]:
        return fl.kernel_basis(self.matrix(n))

    def image_rank(self, n: int) -> int:
        return len(fl.echelon(self.block(n)))


def identity_map(M: GradedModule) -> ModuleMap:
    return ModuleMap(M, M, {n: tuple(1 << i for i in range(d)) for n, d in enumerate(M.dims) if d})


def zero_map(S: GradedModule, T: GradedModule) -> ModuleMap:
    return ModuleMap(S, T, {})


def frobenius_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(frobenius(f.source), frobenius(f.target),
                     {2 * n: b for n, b in f.blocks.items()}, 2 * f.window)


def lambda_map(M: GradedModule) -> ModuleMap:
    """lambda_M : Phi M -> M, Phi x |-> Sq^|x| x."""
    PM = frobenius(M)
    blocks = {}
    for n in range(M.window // 2 + 1):
        d = M.dim(n)
        if not d:
            continue
        if n == 0:
            blocks[0] = tuple(1 << i for i in range(d))
        else:
            blocks[2 * n] = tuple(M.act(n, n, 1 << i) for i in range(d))
    return ModuleMap(PM, M, blocks, M.window)


def lambda_iterate(M: GradedModule, k: int) -> ModuleMap:
    """lambda^k = lambda o Phi(lambda^(k-1)) : Phi^k M -> M."""
    if k < 1:
        raise UsageError("lambda_iterate needs k >= 1")
    f = lambda_map(M)
    for _ in range(k - 1):
        f = lambda_map(M).compose(frobenius_map(f))
    return f


# subquotients ------------------------------------------------------------------

@dataclass(frozen=True)
class _Complement:
    """A subspace in reduced echelon form and the coordinates of a complement."""
    rows: tuple[tuple[int, int], ...]  # (pivot, row), lowest-bit pivots
    keep: tuple[int, ...]

    @classmethod
    def of(cls, vectors: Iterable[int], dim: int) -> "_Complement":
        red = fl.rref(vectors)
        piv = {c for c, _ in red}
        return cls(tuple(red), tuple(j for j in range(dim) if j not in piv))

    def project(self, v: int) -> int:
        for c, r in self.rows:
            if (v >> c) & 1:
                v ^= r
        out = 0
        for i, j in enumerate(self.keep):
            if (v >> j) & 1:
                out |= 1 << i
        return out


def quotient_by_subspaces(M: GradedModule, sub: Mapping[int, Sequence[int]],
                          name: str = "") -> tuple[GradedModule, ModuleMap]:
    """M / S for a submodule given by spanning vectors per degree."""
    comps = [_Complement.of(sub.get(n, ()), M.dims[n]) for n in range(M.window + 1)]
    dims = tuple(len(c.keep) for c in comps)
    labels = tuple(tuple(f"[{M.labels[n][j]}]" for j in comps[n].keep) for n in range(M.window + 1))
    action = {}
    for (k, n), cols in M.action.items():
        C = comps[n + k]
        new = tuple(C.project(cols[j]) for j in comps[n].keep)
        if any(new):
            action[(k, n)] = new
    Q = GradedModule(M.window, dims, labels, action, M.truncated, name)
    proj = ModuleMap(M, Q, {n: tuple(comps[n].project(1 << j) for j in range(M.dims[n]))
                            for n in range(M.window + 1) if M.dims[n]})
    return Q, proj


def quotient(M: GradedModule, S: ModuleMap, name: str = "") -> tuple[GradedModule, ModuleMap]:
    if S.target is not M:
        raise UsageError("quotient needs a map into M")
    if S.window < M.window and S.source.truncated:
        raise UsageError("sub-module map does not cover the window of M")
    if not S.is_injective():
        raise UsageError("quotient needs an injective map")
    sub = {n: S.block(n) for n in range(S.window + 1)}
    return quotient_by_subspaces(M, sub, name)


def hk_module(k: int) -> GradedModule:
    """H_k = F(1)/Phi^k F(1), spanned by u, u^2, ..., u^(2^(k-1))."""
    if k < 1:
        raise UsageError("H_k needs k >= 1")
    D = 1 << k
    F1 = free_module(1, D)
    lam = lambda_iterate(F1, k)
    sub = {n: lam.block(n) for n in range(D + 1)}
    Q, _ = quotient_by_subspaces(F1, sub)
    top = 1 << (k - 1)
    if any(Q.dims[top + 1:]):
        raise InternalError("H_k has classes above 2^(k-1)")
    Q = replace(Q, truncated=False).with_window(top)
    return replace(Q, name=f"H({k})")


def socle(M: GradedModule) -> list[list[int]]:
    """Per degree, a reduced basis of the joint kernel of all Sq^k, k >= 1.

    Sq^(2^i) generate the algebra, so their joint kernel is the socle.
    """
    if M.truncated:
        raise UsageError("socle needs a finite module")
    out = []
    for n in range(M.window + 1):
        d = M.dims[n]
        if not d:
            out.append([])
            continue
        stacked = [0] * d
        shift = 0
        k = 1
        while n + k <= M.window:
            cols = M.action.get((k, n))
            if cols:
                for j in range(d):
                    stacked[j] |= cols[j] << shift
            shift += M.dims[n + k]
            k <<= 1
        out.append(fl.kernel_basis(fl.BitMatrix.from_columns(stacked, shift)))
    return out


def decomposables(M: GradedModule, n: int) -> list[int]:
    vecs = []
    k = 1
    while k <= n:
        cols = M.action.get((k, n - k))
        if cols:
            vecs.extend(cols)
        k <<= 1
    return vecs


def top(M: GradedModule) -> list[list[int]]:
    """Per degree, coordinate vectors spanning a complement of the decomposables."""
    out = []
    for n in range(M.window + 1):
        comp = _Complement.of(decomposables(M, n), M.dims[n])
        out.append([1 << j for j in comp.keep])
    return out


def is_nilpotent(M: GradedModule) -> bool:
    """Every class dies under iterated Sq_0 (finite modules: exactly; truncated: within the window)."""
    for n in range(M.window + 1):
        if not M.dims[n]:
            continue
        if n == 0:
            return False
        vecs = [1 << i for i in range(M.dims[n])]
        deg = n
        while vecs and any(vecs):
            if 2 * deg > M.window:
                if M.truncated:
                    return False
                break
            vecs = [M.act(deg, deg, v) for v in vecs]
            # a combination can survive even when images look sparse; track span
            vecs = list(fl.echelon(vecs).values())
            deg *= 2
    return True


def is_reduced(M: GradedModule) -> bool:
    """lambda_M injective on the degrees where it is defined."""
    last = M.window // 2 if M.truncated else M.window
    for n in range(1, last + 1):
        d = M.dims[n]
        if d and len(fl.echelon(M.action.get((n, n), ()))) < d:
            return False
    return True


def sq1_homology(M: GradedModule, n: int) -> int:
    """Dimension of ker Sq^1 / im Sq^1 in degree n."""
    out_cols = M.action.get((1, n), (0,) * M.dim(n))
    kernel_dim = M.dim(n) - len(fl.echelon(out_cols))
    image_dim = len(fl.echelon(M.action.get((1, n - 1), ()))) if n >= 1 else 0
    return kernel_dim - image_dim


def reduced_part(M: GradedModule) -> GradedModule:
    """Drop the degree-zero part."""
    sub = {0: [1 << i for i in range(M.dims[0])]}
    Q, _ = quotient_by_subspaces(M, sub, name=f"reduced {M.display_name()}")
    return Q


# validation -------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # "instability" or "adem"
    a: int
    b: int
    n: int

    def __str__(self):
        if self.kind == "instability":
            return f"instability: Sq^{self.a} nonzero on degree {self.n}"
        return f"adem: Sq^{self.a}Sq^{self.b} on degree {self.n}"


@lru_cache(maxsize=None)
def _adem_terms(a: int, b: int) -> tuple[st.Monomial, ...]:
    return tuple(st.adem_normalize([a, b]).terms)


def validate(M: GradedModule) -> list[Violation]:
    out: list[Violation] = []
    for (k, n), cols in sorted(M.action.items()):
        if k > n and any(cols):
            out.append(Violation("instability", k, 0, n))
    D = M.window
    act = M.act
    for n in range(D + 1):
        d = M.dims[n]
        if not d:
            continue
        pairs: dict = {}

        def composite(p: int, q: int):
            key = (p, q)
            hit = pairs.get(key)
            if hit is None:
                inner = M.action.get((q, n)) if q else None
                if q and inner is None:
                    hit = (0,) * d
                elif q:
                    hit = tuple(act(p, n + q, c) for c in inner)
                else:
                    hit = M.action.get((p, n), (0,) * d)
                pairs[key] = hit
            return hit

        for b in range(1, D - n + 1):
            for a in range(1, min(2 * b - 1, D - n - b) + 1):
                lhs = composite(a, b)
                rhs = [0] * d
                for m in _adem_terms(a, b):
                    cols = composite(m[0], m[1] if len(m) > 1 else 0)
                    for j in range(d):
                        rhs[j] ^= cols[j]
                if tuple(rhs) != lhs:
                    out.append(Violation("adem", a, b, n))
    return out


# duality with Brown-Gitler modules ------------------------------------------------

def _functionals(M: GradedModule, n: int, f: int, wanted: Mapping[int, Sequence[st.Monomial]]) -> dict:
    """f o Sq^I as a row vector on M^(n-|I|) for every I in wanted[n-|I|].

    Built along the prefix tree of admissible sequences: the functional of
    P+(i) is the functional of P pulled back along Sq^i.
    """
    need: set = set()
    for d, Is in wanted.items():
        for I in Is:
            for j in range(len(I) + 1):
                need.add(I[:j])
    out = {(): f}
    for I in sorted(need, key=len):
        if not I:
            continue
        parent = out.get(I[:-1], 0)
        i = I[-1]
        m = n - sum(I)
        if not parent or m < 0:
            out[I] = 0
            continue
        cols = M.action.get((i, m))
        if cols is None:
            out[I] = 0
            continue
        h = 0
        for j, c in enumerate(cols):
            if fl.parity(parent & c):
                h |= 1 << j
        out[I] = h
    return out


@dataclass
class _PairingData:
    n: int
    module: GradedModule
    inverses: dict = field(default_factory=dict)  # degree -> inverse pairing matrix


_PAIRING: dict[int, _PairingData] = {}


def _pairing(n: int) -> _PairingData:
    data = _PAIRING.get(n)
    if data is not None:
        return data
    J = brown_gitler(n)
    data = _PairingData(n, J)
    wanted = {d: st.free_basis(d, n - d) for d in range(n + 1) if J.dims[d]}
    top_functional = 1  # J(n)^n is spanned by x_0^n
    h = _functionals(J, n, top_functional, wanted)
    for d, Is in wanted.items():
        if len(Is) != J.dims[d]:
            raise InternalError(f"J({n})^{d} has dimension {J.dims[d]} but {len(Is)} test operations")
        P = fl.BitMatrix(len(Is), J.dims[d], tuple(h[I] for I in Is))
        data.inverses[d] = fl.invert(P)
    _PAIRING[n] = data
    return data


@dataclass
class HomToJ:
    """Hom(M, J(n)), identified with functionals on M^n."""
    source: GradedModule
    n: int

    @property
    def dim(self) -> int:
        return self.source.dim(self.n)

    @property
    def target(self) -> GradedModule:
        return _pairing(self.n).module

    def realize(self, f: int) -> ModuleMap:
        return ModuleMap(self.source, self.target, realize_blocks(self.source, self.n, f))

    def basis(self) -> list[ModuleMap]:
        return [self.realize(1 << i) for i in range(self.dim)]


def hom_to_J(M: GradedModule, n: int) -> HomToJ:
    if M.window < n and M.truncated:
        raise UsageError("window too small for Hom into J(n)")
    return HomToJ(M, n)


def realize_blocks(M: GradedModule, n: int, f: int) -> dict[int, Columns]:
    """Blocks of the unique map phi: M -> J(n) with top coefficient of phi(x) = f(x) on M^n.

    For x in M^d the image y is pinned down by <x_0^n, Sq^I y> = f(Sq^I x)
    over the admissible I of degree n-d and excess <= d; the pairing matrix
    on J(n)^d is square and invertible.
    """
    if f >> M.dim(n):
        raise UsageError("functional longer than M^n")
    data = _pairing(n)
    J = data.module
    blocks: dict[int, Columns] = {}
    if not f:
        return blocks
    wanted = {d: st.free_basis(d, n - d) for d in range(min(n, M.window) + 1)
              if M.dim(d) and J.dims[d]}
    h = _functionals(M, n, f, wanted)
    for d, Is in wanted.items():
        inv = data.inverses[d]
        rows = [h[I] for I in Is]
        cols = []
        for j in range(M.dims[d]):
            w = 0
            for r, row in enumerate(rows):
                if (row >> j) & 1:
                    w |= 1 << r
            cols.append(inv.apply(w))
        if any(cols):
            blocks[d] = tuple(cols)
    return blocks


def dual_functional_block(g: ModuleMap, m: int) -> int:
    """For a map into J(m) (or a summand), the functional x |-> top coefficient on degree m."""
    blk = g.block(m)
    f = 0
    for j, c in enumerate(blk):
        if c & 1:
            f |= 1 << j
    return f


# serialization -------------------------------------------------------------------

def module_to_json(M: GradedModule) -> dict:
    quads = []
    for (k, n), cols in sorted(M.action.items()):
        for col, c in enumerate(cols):
            for row in fl.bits(c):
                quads.append([k, n, row, col])
    out = {"name": M.display_name(), "window": M.window, "truncated": M.truncated,
           "dims": list(M.dims), "labels": [list(x) for x in M.labels], "action": quads}
    if M.summands is not None:
        out["summands"] = sorted(M.summands, reverse=True)
    return out


def module_from_json(data: dict) -> GradedModule:
    W = data["window"]
    dims = tuple(data["dims"])
    action: dict = {}
    for k, n, row, col in data["action"]:
        cols = action.setdefault((k, n), [0] * dims[n])
        cols[col] ^= 1 << row
    summ = data.get("summands")
    return GradedModule(W, dims, tuple(tuple(x) for x in data["labels"]),
                        {key: tuple(v) for key, v in action.items()}, data["truncated"],
                        data.get("name", ""), tuple(summ) if summ is not None else None)


# module specs -------------------------------------------------------------------

_SPEC_PATTERNS = [
    (re.compile(r"J\((\d+)\)"), "J"),
    (re.compile(r"F\((\d+)\)"), "F"),
    (re.compile(r"H\((\d+)\)"), "H"),
]


def parse_module_spec(text: str) -> tuple:
    """Parse the module-spec grammar into a nested tuple.

    spec   := "J(n)" | "F(n)" | "H(k)" | "F2" | "Sigma[^s] spec" | "Phi[^r] spec"
            | "T(spec,spec)"
    """
    s = text.strip()
    node, rest = _parse_spec(s, 0)
    if s[rest:].strip():
        raise UsageError(f"trailing text in module spec {text!r}")
    return node


def _parse_spec(s: str, pos: int) -> tuple[tuple, int]:
    while pos < len(s) and s[pos].isspace():
        pos += 1
    for pat, tag in _SPEC_PATTERNS:
        m = pat.match(s, pos)
        if m:
            return (tag, int(m.group(1))), m.end()
    m = re.compile(r"(Sigma|Phi)(?:\^(\d+))?").match(s, pos)
    if m:
        power = int(m.group(2)) if m.group(2) else 1
        inner, end = _parse_spec(s, m.end())
        return (m.group(1), power, inner), end
    if s.startswith("F2", pos):
        return ("F2",), pos + 2
    if s.startswith("T(", pos):
        a, p = _parse_spec(s, pos + 2)
        while p < len(s) and s[p].isspace():
            p += 1
        if p >= len(s) or s[p] != ",":
            raise UsageError(f"expected ',' in tensor spec {s!r}")
        b, p = _parse_spec(s, p + 1)
        while p < len(s) and s[p].isspace():
            p += 1
        if p >= len(s) or s[p] != ")":
            raise UsageError(f"expected ')' in tensor spec {s!r}")
        return ("T", a, b), p + 1
    raise UsageError(f"cannot parse module spec {s!r} at position {pos}")


def format_module_spec(node: tuple) -> str:
    tag = node[0]
    if tag in ("J", "F", "H"):
        return f"{tag}({node[1]})"
    if tag == "F2":
        return "F2"
    if tag in ("Sigma", "Phi"):
        power = "" if node[1] == 1 else f"^{node[1]}"
        return f"{tag}{power} {format_module_spec(node[2])}"
    if tag == "T":
        return f"T({format_module_spec(node[1])},{format_module_spec(node[2])})"
    raise UsageError(f"unknown spec node {node!r}")


def build_from_spec(node: tuple | str, D: int) -> GradedModule:
    """Construct the module a spec denotes, truncated at degree D when infinite."""
    if isinstance(node, str):
        node = parse_module_spec(node)
    tag = node[0]
    if tag == "J":
        return brown_gitler(node[1])
    if tag == "F":
        return free_module(node[1], D)
    if tag == "H":
        return hk_module(node[1])
    if tag == "F2":
        return trivial_module()
    if tag == "Sigma":
        inner = build_from_spec(node[2], max(D - node[1], 0))
        M = suspension(inner, node[1])
        if M.truncated:
            M = M.with_window(min(M.window, D))
        if node[2] == ("F2",):
            M = replace(M, name=format_module_spec(node))
        return M
    if tag == "Phi":
        r = node[1]
        inner = build_from_spec(node[2], D >> r)
        M = frobenius_power(inner, r)
        if M.truncated:
            M = M.with_window(D) if M.window >= D else M
        return replace(M, name=format_module_spec(node))
    if tag == "T":
        a = build_from_spec(node[1], D)
        b = build_from_spec(node[2], D)
        return replace(tensor(a, b, D), name=format_module_spec(node))
    raise UsageError(f"unknown spec node {node!r}")
