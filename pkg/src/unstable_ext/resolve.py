"""Minimal resolutions, Ext groups and induced maps.

Injective side: finite nilpotent modules are embedded in sums of
Brown-Gitler modules through their socles, and cokernels are iterated.

Projective side: free unstable modules F(n) are never materialized as full
action tables.  A term of a projective resolution is a ``FreeTerm`` holding
generator degrees; the image of Sq^I g under the differential is computed as
Sq^(i1) applied to the stored image of Sq^(I') g, using cached action
columns of each F(n).
"""
from __future__ import annotations

import hashlib
import json
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from . import f2_linear as fl
from . import steenrod as st
from . import umod
from .errors import BudgetExceeded, InternalError, UsageError
from .umod import GradedModule, ModuleMap


# ---------------------------------------------------------------------------
# injective side
# ---------------------------------------------------------------------------

@dataclass
class Hull:
    term: GradedModule
    embedding: ModuleMap
    essential: bool


def injective_hull(M: GradedModule) -> Hull:
    """Embed a finite nilpotent module in the sum of J(n)^(dim socle^n)."""
    if M.truncated:
        raise UsageError("injective_hull needs a finite module")
    if not umod.is_nilpotent(M):
        raise UsageError("injective_hull needs a nilpotent module")
    soc = umod.socle(M)
    pieces: list[tuple[int, int]] = []  # (degree, functional)
    for n in range(M.window, -1, -1):
        for c, _row in fl.rref(soc[n]):
            # the rref basis of the socle has pivot c, so the coordinate
            # functional at c is dual to it
            pieces.append((n, 1 << c))
    indices = [n for n, _ in pieces]
    W = max([M.window] + indices)
    I = umod.bg_sum(indices, W)
    # assemble blocks into the direct sum
    blocks: dict[int, list[int]] = {}
    for t in range(M.window + 1):
        if M.dims[t]:
            blocks[t] = [0] * M.dims[t]
    offsets = _summand_offsets(indices, W)
    for i, (n, f) in enumerate(pieces):
        part = umod.realize_blocks(M, n, f)
        for t, cols in part.items():
            sh = offsets[t][i]
            blk = blocks[t]
            for j, c in enumerate(cols):
                blk[j] |= c << sh
    emb = ModuleMap(M.with_window(W) if W > M.window else M, I,
                    {t: tuple(b) for t, b in blocks.items()})
    essential = _socle_in_image(I, emb, indices)
    if not emb.is_injective():
        raise InternalError("hull embedding is not injective")
    return Hull(I, emb, essential)


def _summand_offsets(indices: Sequence[int], W: int) -> list[list[int]]:
    dims = [umod.brown_gitler(n).with_window(W).dims for n in indices]
    out = []
    for t in range(W + 1):
        acc, row = 0, []
        for d in dims:
            row.append(acc)
            acc += d[t]
        out.append(row)
    return out


def _socle_in_image(I: GradedModule, emb: ModuleMap, indices: Sequence[int]) -> bool:
    """socle(I) lies in the image of the embedding (so the image is essential)."""
    soc = umod.socle(I)
    for t, vecs in enumerate(soc):
        if not vecs:
            continue
        piv = fl.echelon(emb.block(t))
        if any(not fl.in_span(v, piv) for v in vecs):
            return False
    return True


@dataclass
class Resolution:
    flavor: str
    base: GradedModule
    valid_internal_degree: int
    terms: list = field(default_factory=list)
    maps: list = field(default_factory=list)
    multisets: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    complete: bool = True
    stages: list = field(default_factory=list)  # projective: FreeTerm per stage
    resolver: Optional["ProjectiveResolver"] = None

    def describe(self) -> str:
        if self.flavor == "injective":
            return " ; ".join(umod.bg_name(m) for m in self.multisets)
        return " ; ".join("F(" + ",".join(map(str, m)) + ")" if m else "0" for m in self.multisets)


def _cokernel(f: ModuleMap) -> tuple[GradedModule, ModuleMap]:
    T = f.target
    sub = {t: f.block(t) for t in range(min(f.window, T.window) + 1)}
    return umod.quotient_by_subspaces(T, sub)


def minimal_injective_resolution(M: GradedModule, steps: int) -> Resolution:
    """Terms I^0..I^(steps-1); stops early at a zero cokernel."""
    hull = injective_hull(M)
    res = Resolution("injective", M, M.window)
    res.terms.append(hull.term)
    res.maps.append(hull.embedding)
    res.multisets.append(tuple(sorted(hull.term.summands, reverse=True)))
    hulls = [hull]
    prev = hull.embedding
    res.complete = False
    while True:
        C, proj = _cokernel(prev)
        if C.is_zero():
            res.complete = True
            break
        if len(res.terms) >= steps:
            break
        C = C.with_window(max(C.top_degree, 0)) if not C.truncated else C
        h = injective_hull(C)
        # differential I^j -> I^(j+1) is the embedding composed with the projection
        W = h.term.window
        blocks = {t: tuple(h.embedding.apply(t, proj.apply(t, 1 << j)) for j in range(prev.target.dims[t]))
                  for t in range(min(prev.target.window, W) + 1) if prev.target.dims[t]}
        d = ModuleMap(prev.target, h.term, blocks, min(prev.target.window, W))
        res.terms.append(h.term)
        res.maps.append(d)
        res.multisets.append(tuple(sorted(h.term.summands, reverse=True)))
        hulls.append(h)
        prev = d
    res.certificates = {
        "exact": injective_exactness(res),
        "minimal": all(h.essential for h in hulls) and injective_minimality(res),
        "maps_commute": all(not m.validate() for m in res.maps),
    }
    return res


def injective_exactness(res: Resolution) -> bool:
    """Coaugmentation injective, image = kernel at every term, last cokernel zero when complete."""
    maps = res.maps
    if not maps[0].is_injective():
        return False
    for a, b in zip(maps, maps[1:]):
        T = a.target
        for t in range(T.window + 1):
            if not T.dims[t]:
                continue
            img = a.block(t) if t <= a.window else ()
            ker_dim = T.dims[t] - (b.image_rank(t) if t <= b.window else 0)
            if len(fl.echelon(img)) != ker_dim:
                return False
            for c in img:
                if t <= b.window and b.apply(t, c):
                    return False
    if res.complete:
        last = maps[-1]
        T = last.target
        for t in range(T.window + 1):
            if T.dims[t] and last.image_rank(t) != T.dims[t]:
                return False
    return True


def injective_minimality(res: Resolution) -> bool:
    """The socle of each cokernel has exactly the degrees of the next term's summands."""
    for j in range(len(res.maps) - 1):
        C, _ = _cokernel(res.maps[j])
        C = C.with_window(max(C.top_degree, 0))
        soc = umod.socle(C)
        counts = sorted((t for t, v in enumerate(soc) for _ in v), reverse=True)
        if tuple(counts) != res.multisets[j + 1]:
            return False
    return True


def operation_for_block(n: int, m: int, f: int) -> st.SteenrodElement:
    """theta of degree n-m whose map J(n) -> J(m) has top-coefficient functional f on J(n)^m."""
    if m > n:
        if f:
            raise InternalError("nonzero map J(n) -> J(m) with m > n")
        return st.SteenrodElement.zero(0)
    if not f:
        return st.SteenrodElement.zero(n - m)
    data = umod._pairing(n)
    inv = data.inverses[m]
    Is = st.free_basis(m, n - m)
    x = inv.transpose().apply(f)
    return st.SteenrodElement(frozenset(Is[i] for i in fl.bits(x)), n - m)


def operation_matrix(g: ModuleMap) -> list[list[st.SteenrodElement]]:
    """Blocks of a map between Brown-Gitler sums as Steenrod operations (rows: target summands)."""
    S, T = g.source, g.target
    if S.summands is None or T.summands is None:
        raise UsageError("operation_matrix needs Brown-Gitler sums on both sides")
    W = max(S.window, T.window)
    soff = _summand_offsets(S.summands, S.window)
    toff = _summand_offsets(T.summands, T.window)
    out = []
    for j, m in enumerate(T.summands):
        row = []
        for i, n in enumerate(S.summands):
            if m > n or m > S.window:
                row.append(st.SteenrodElement.zero(max(n - m, 0)))
                continue
            dn = umod.brown_gitler(n).dim(m)
            f = 0
            top_bit = toff[m][j]  # J(m)^m is one-dimensional, at this offset
            for a in range(dn):
                img = g.apply(m, 1 << (soff[m][i] + a))
                if (img >> top_bit) & 1:
                    f |= 1 << a
            row.append(operation_for_block(n, m, f))
        out.append(row)
    return out


def operation_functional(theta: st.SteenrodElement, n: int, m: int) -> int:
    """Functional y |-> top coefficient of theta y on J(n)^m."""
    J = umod.brown_gitler(n)
    f = 0
    for a in range(J.dim(m)):
        if J.act_element(theta, m, 1 << a) & 1:
            f |= 1 << a
    return f


# ---------------------------------------------------------------------------
# projective side
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def free_action(n: int, s: int, k: int) -> tuple[int, ...]:
    """Columns of Sq^k: F(n)^(n+s) -> F(n)^(n+s+k) in local coordinates."""
    src = st.free_basis(n, s)
    idx = st.free_index(n, s + k)
    out = []
    for I in src:
        v = 0
        if k <= n + s:
            for K in st.sq_mul(k, I):
                j = idx.get(K)
                if j is not None:
                    v ^= 1 << j
        out.append(v)
    return tuple(out)


class FreeTerm:
    """A sum of free unstable modules F(n_g) truncated at a window."""

    def __init__(self, window: int):
        self.window = window
        self.gens: list[int] = []
        self.dims = [0] * (window + 1)
        self.offsets: list[list[int]] = []  # per generator, offset by degree (-1 below)
        self.layout: list[list[int]] = [[] for _ in range(window + 1)]  # generator ids per degree

    def add_generator(self, n: int) -> int:
        g = len(self.gens)
        self.gens.append(n)
        offs = [-1] * (self.window + 1)
        for t in range(n, self.window + 1):
            offs[t] = self.dims[t]
            self.dims[t] += len(st.free_basis(n, t - n))
            self.layout[t].append(g)
        self.offsets.append(offs)
        return g

    def generator_vector(self, g: int) -> int:
        return 1 << self.offsets[g][self.gens[g]]

    def decode(self, t: int, v: int) -> list[tuple[int, st.Monomial]]:
        """Terms (generator, admissible I) of a vector in degree t."""
        out = []
        for g in self.layout[t]:
            n = self.gens[g]
            basis = st.free_basis(n, t - n)
            local = (v >> self.offsets[g][t]) & ((1 << len(basis)) - 1)
            for j in fl.bits(local):
                out.append((g, basis[j]))
        return out

    def encode(self, t: int, terms) -> int:
        v = 0
        for g, I in terms:
            n = self.gens[g]
            v ^= 1 << (self.offsets[g][t] + st.free_index(n, t - n)[I])
        return v

    def act(self, k: int, t: int, v: int) -> int:
        """Sq^k on a vector in degree t."""
        if k == 0 or not v:
            return v
        u = t + k
        if u > self.window:
            raise UsageError("action leaves the window")
        out = 0
        for g in self.layout[t]:
            n = self.gens[g]
            s = t - n
            size = len(st.free_basis(n, s))
            local = (v >> self.offsets[g][t]) & ((1 << size) - 1)
            if not local:
                continue
            cols = free_action(n, s, k)
            r = 0
            for j in fl.bits(local):
                r ^= cols[j]
            if r:
                out |= r << self.offsets[g][u]
        return out

    def act_word(self, word: Sequence[int], t: int, v: int) -> int:
        for a in reversed(word):
            v = self.act(a, t, v)
            t += a
            if not v:
                return 0
        return v

    def to_module(self) -> GradedModule:
        """Full action table (small windows only)."""
        bases = [[(g, I) for g in self.layout[t] for I in st.free_basis(self.gens[g], t - self.gens[g])]
                 for t in range(self.window + 1)]

        def total(t, key):
            g, I = key
            n = self.gens[g]
            for k in range(1, self.window - t + 1):
                for K in st.sq_mul(k, I):
                    if st.excess(K) <= n:
                        yield k, (g, K)

        def label(key):
            g, I = key
            return f"g{g}:" + (f"Sq[{','.join(map(str, I))}]" if I else "1")

        name = "F(" + ",".join(map(str, self.gens)) + ")" if self.gens else "0"
        return umod.build_module(self.window, bases, label, total, True, name)


@dataclass
class ProjectiveStage:
    term: FreeTerm
    images: list  # per degree: image of each basis vector in the previous term (or the base)
    kernel: list  # per degree: basis of the kernel of this stage's differential
    new_generators: list  # per degree: generators added there
    decomposable_rank: list  # per degree: rank of the images of non-generator basis vectors


class ProjectiveResolver:
    """Degree-by-degree minimal free resolution of a module truncated at a window."""

    def __init__(self, M: GradedModule, D: int, max_dim: Optional[int] = None):
        if D > M.window and M.truncated:
            raise UsageError(f"module window {M.window} is smaller than D = {D}")
        self.M = M.with_window(D)
        self.D = D
        self.max_dim = max_dim
        self.stages: list[ProjectiveStage] = []
        self._solvers: dict = {}

    def _target_act(self, s: int, k: int, t: int, v: int) -> int:
        if s == 0:
            return self.M.act(k, t, v)
        return self.stages[s - 1].term.act(k, t, v)

    def _target_dim(self, s: int, t: int) -> int:
        if s == 0:
            return self.M.dim(t)
        return self.stages[s - 1].term.dims[t]

    def extend(self, steps: int) -> None:
        while len(self.stages) < steps:
            self._next_stage()

    def _next_stage(self) -> None:
        s = len(self.stages)
        D = self.D
        P = FreeTerm(D)
        images: list = [[] for _ in range(D + 1)]
        kernel: list = [[] for _ in range(D + 1)]
        new_gens: list = [[] for _ in range(D + 1)]
        dec_rank = [0] * (D + 1)
        if s == 0:
            prev_kernel = [[1 << i for i in range(self.M.dim(t))] for t in range(D + 1)]
        else:
            prev_kernel = self.stages[s - 1].kernel
        for t in range(D + 1):
            cols = []
            for g in P.layout[t]:
                n = P.gens[g]
                for I in st.free_basis(n, t - n):
                    k, rest = I[0], I[1:]
                    src_deg = t - k
                    src = images[src_deg][P.offsets[g][src_deg] + st.free_index(n, src_deg - n)[rest]]
                    cols.append(self._target_act(s, k, src_deg, src))
            if self.max_dim is not None and len(cols) > self.max_dim:
                raise BudgetExceeded(f"stage {s}, degree {t}: {len(cols)} basis elements")
            E = fl.Eliminator(track=True)
            ker = []
            for c in cols:
                dep = E.add(c)
                if dep is not None:
                    ker.append(dep)
            dec_rank[t] = E.rank
            for kv in prev_kernel[t]:
                r, _ = E.reduce(kv)
                if r:
                    P.add_generator(t)
                    new_gens[t].append(len(P.gens) - 1)
                    E.add(kv)
                    cols.append(kv)
            images[t] = cols
            kernel[t] = ker
        self.stages.append(ProjectiveStage(P, images, kernel, new_gens, dec_rank))

    # linear solves against the differential -------------------------------------

    def solver(self, s: int, t: int) -> fl.Eliminator:
        key = (s, t)
        E = self._solvers.get(key)
        if E is None:
            E = fl.Eliminator(track=True)
            for c in self.stages[s].images[t]:
                E.add(c)
            self._solvers[key] = E
        return E

    def preimage(self, s: int, t: int, z: int) -> int:
        """Some y in stage s, degree t with d(y) = z."""
        if not z:
            return 0
        r, c = self.solver(s, t).reduce(z)
        if r:
            raise InternalError(f"no preimage at stage {s}, degree {t}")
        return c

    def generator_boundary(self, s: int, g: int) -> int:
        P = self.stages[s].term
        t = P.gens[g]
        return self.stages[s].images[t][P.offsets[g][t]]


def minimal_projective_resolution(M: GradedModule, steps: int, D: int,
                                  max_dim: Optional[int] = None) -> Resolution:
    R = ProjectiveResolver(M, D, max_dim)
    R.extend(steps)
    return resolution_from_resolver(R)


def resolution_from_resolver(R: ProjectiveResolver) -> Resolution:
    res = Resolution("projective", R.M, R.D)
    res.stages = [st_.term for st_ in R.stages]
    res.multisets = [tuple(st_.term.gens) for st_ in R.stages]
    res.certificates = projective_certificates(R)
    res.resolver = R
    return res


def projective_cover(M: GradedModule, D: int):
    """Cover of M by a sum of F(n): the first stage of the minimal resolution."""
    R = ProjectiveResolver(M, D)
    R.extend(1)
    P = R.stages[0].term
    blocks = {t: tuple(R.stages[0].images[t]) for t in range(D + 1) if P.dims[t]}
    return P, blocks, R


def projective_certificates(R: ProjectiveResolver) -> dict:
    """Exactness: im d_s = ker d_(s-1) degreewise; minimality: generators = top of the kernel."""
    exact = True
    minimal = True
    for s, stage in enumerate(R.stages):
        prev_kernel = ([[1 << i for i in range(R.M.dim(t))] for t in range(R.D + 1)] if s == 0
                       else R.stages[s - 1].kernel)
        for t in range(R.D + 1):
            ker_span = fl.echelon(prev_kernel[t])
            imgs = stage.images[t]
            img_span = fl.echelon(imgs)
            if len(img_span) != len(ker_span) or any(not fl.in_span(v, ker_span) for v in img_span.values()):
                exact = False
            # kernel of this stage really is annihilated and has the right size
            if len(stage.kernel[t]) != stage.term.dims[t] - len(img_span):
                exact = False
            if s > 0:
                for kv in stage.kernel[t][:4]:
                    acc = 0
                    for j in fl.bits(kv):
                        acc ^= imgs[j]
                    if acc:
                        exact = False
            n_new = len(stage.new_generators[t])
            if n_new != len(ker_span) - stage.decomposable_rank[t]:
                minimal = False
    return {"exact": exact, "minimal": minimal}


# ---------------------------------------------------------------------------
# Ext
# ---------------------------------------------------------------------------

@dataclass
class ExtTable:
    """dims[(d, t)] = dim Ext^d(M, N / N^(>t)), for t up to the window.

    The target is cut at internal degree t, so an entry only needs the
    resolution through degree t and never changes when the window grows.
    ``dim(d)`` reports the entry at the full window.
    """
    source: str
    target: str
    window: int
    d_max: int
    entries: dict
    twist: Optional[int] = None

    def dim(self, d: int, t: Optional[int] = None) -> Optional[int]:
        if t is None:
            t = self.window
        return self.entries.get((d, t))

    def row(self, t: Optional[int] = None) -> list:
        return [self.dim(d, t) for d in range(self.d_max + 1)]

    def to_json(self) -> dict:
        return {"source": self.source, "target": self.target, "window": self.window,
                "d_max": self.d_max, "twist": self.twist,
                "at_window": {str(d): self.dim(d) for d in range(self.d_max + 1)},
                "entries": [[d, t, v] for (d, t), v in sorted(self.entries.items())]}


class CochainComplex:
    """Hom(P_., N) for a projective resolution P_. and a target module N.

    The coordinates of C^s are pairs (generator g of P_s, basis index of
    N^(n_g)), grouped by generator in increasing degree.
    """

    def __init__(self, R: ProjectiveResolver, N: GradedModule, s_max: int):
        self.R = R
        self.N = N
        self.s_max = s_max
        R.extend(s_max + 2)
        self.coords = []  # per s: list of (g, b)
        self.offset = []  # per s: dict g -> offset
        for s in range(s_max + 2):
            P = R.stages[s].term
            co, off = [], {}
            for g, n in sorted(enumerate(P.gens), key=lambda x: (x[1], x[0])):
                if n > N.window:
                    continue
                off[g] = len(co)
                co.extend((g, b) for b in range(N.dim(n)))
            self.coords.append(co)
            self.offset.append(off)
        self._delta: dict = {}

    def gen_degree(self, s: int, g: int) -> int:
        return self.R.stages[s].term.gens[g]

    def evaluate(self, s: int, c: int, t: int, v: int) -> int:
        """Value in N^t of the cochain c on a vector v of P_s in degree t."""
        P = self.R.stages[s].term
        out = 0
        for g, I in P.decode(t, v):
            off = self.offset[s].get(g)
            if off is None:
                continue
            n = P.gens[g]
            val = (c >> off) & ((1 << self.N.dim(n)) - 1)
            if val:
                out ^= self.N.act_word(I, n, val)
        return out

    def cochain_from_values(self, s: int, values: dict) -> int:
        c = 0
        for g, val in values.items():
            off = self.offset[s].get(g)
            if off is not None and val:
                c |= val << off
        return c

    def delta_columns(self, s: int) -> list[int]:
        """Columns of delta: C^s -> C^(s+1), one per coordinate of C^s."""
        hit = self._delta.get(s)
        if hit is not None:
            return hit
        P1 = self.R.stages[s + 1].term
        cols = [0] * len(self.coords[s])
        P = self.R.stages[s].term
        for q, nq in enumerate(P1.gens):
            qoff = self.offset[s + 1].get(q)
            if qoff is None:
                continue
            bd = self.R.generator_boundary(s + 1, q)
            for g, I in P.decode(nq, bd):
                off = self.offset[s].get(g)
                if off is None:
                    continue
                n = P.gens[g]
                for b in range(self.N.dim(n)):
                    img = self.N.act_word(I, n, 1 << b)
                    if img:
                        cols[off + b] ^= img << qoff
        self._delta[s] = cols
        return cols

    def restricted_size(self, s: int, t: int) -> int:
        """Number of coordinates of C^s from generators of degree <= t."""
        n = 0
        for g, b in self.coords[s]:
            if self.gen_degree(s, g) <= t:
                n += 1
            else:
                break
        return n

    def cohomology_dim(self, s: int, t: int) -> int:
        size = self.restricted_size(s, t)
        nxt = self.restricted_size(s + 1, t)
        mask = (1 << nxt) - 1
        out_rank = len(fl.echelon(c & mask for c in self.delta_columns(s)[:size]))
        in_rank = 0
        if s > 0:
            prev = self.restricted_size(s - 1, t)
            in_rank = len(fl.echelon(c & ((1 << size) - 1) for c in self.delta_columns(s - 1)[:prev]))
        return size - out_rank - in_rank

    def cocycles_and_coboundaries(self, s: int) -> tuple[list[int], dict]:
        """Kernel basis of delta^s (full window) and echelon basis of im delta^(s-1)."""
        cols = self.delta_columns(s)
        E = fl.Eliminator(track=True)
        Z = []
        for c in cols:
            dep = E.add(c)
            if dep is not None:
                Z.append(dep)
        B = fl.echelon(self.delta_columns(s - 1)) if s > 0 else {}
        return Z, B

    def cohomology_basis(self, s: int) -> "CohomologyBasis":
        Z, B = self.cocycles_and_coboundaries(s)
        return CohomologyBasis.build(Z, B)


@dataclass
class CohomologyBasis:
    reps: list[int]
    boundaries: dict
    _coords: fl.Eliminator

    @classmethod
    def build(cls, cocycles: Sequence[int], boundaries: dict) -> "CohomologyBasis":
        E = fl.Eliminator(track=True)
        for b in boundaries.values():
            E.add(b)
        nb = E.count
        reps = []
        for z in cocycles:
            r, _ = E.reduce(z)
            if r:
                E.add(z)
                reps.append(z)
        obj = cls(reps, boundaries, E)
        obj._nb = nb  # type: ignore[attr-defined]
        return obj

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, z: int) -> int:
        """Coordinates of the class of a cocycle in the basis of representatives."""
        r, c = self._coords.reduce(z)
        if r:
            raise InternalError("vector is not a cocycle of this complex")
        return c >> self._nb  # type: ignore[attr-defined]


def ext_groups(M: GradedModule, N: GradedModule, d_max: int, D: int,
               resolver: Optional[ProjectiveResolver] = None, twist: Optional[int] = None,
               max_dim: Optional[int] = None) -> ExtTable:
    """Ext^d(M, N / N^(>t)) for d <= d_max and t <= D.

    Degrees t beyond a truncated target's window are left out of the table.
    """
    if resolver is None:
        resolver = ProjectiveResolver(M, D, max_dim)
    if resolver.D != D:
        raise UsageError("resolver window differs from D")
    known = min(D, N.window) if N.truncated else D
    C = CochainComplex(resolver, N.with_window(known), d_max)
    entries = {}
    for d in range(d_max + 1):
        breaks = set({C.gen_degree(s, g) for s in (d - 1, d, d + 1) if s >= 0
                         for g, _ in C.coords[s]})
        last = 0
        for t in range(known + 1):
            # the restricted complex only changes where a generator appears
            if t == 0 or t in breaks:
                last = C.cohomology_dim(d, t)
            entries[(d, t)] = last
    return ExtTable(M.display_name(), N.display_name(), D, d_max, entries, twist)


def ext_complex(M: GradedModule, N: GradedModule, d_max: int, D: int,
                resolver: Optional[ProjectiveResolver] = None) -> CochainComplex:
    if resolver is None:
        resolver = ProjectiveResolver(M, D)
    return CochainComplex(resolver, _target(N, D), d_max)


# ---------------------------------------------------------------------------
# induced maps
# ---------------------------------------------------------------------------

@dataclass
class ExtMap:
    d: int
    matrix: fl.BitMatrix  # columns: images of source basis classes
    source_dim: int
    target_dim: int

    @property
    def rank(self) -> int:
        return fl.rank(self.matrix)

    @property
    def injective(self) -> bool:
        return self.rank == self.source_dim

    @property
    def kernel(self) -> list[int]:
        return fl.kernel_basis(self.matrix)


def _map_on_classes(src: CohomologyBasis, dst: CohomologyBasis, push) -> fl.BitMatrix:
    cols = [dst.coordinates(push(z)) for z in src.reps]
    return fl.BitMatrix.from_columns(cols, dst.dim)


def _target(N: GradedModule, D: int) -> GradedModule:
    if N.window < D and N.truncated:
        raise UsageError(f"{N.display_name()} is only known through degree {N.window}")
    return N.with_window(D)


class ChainLift:
    """Chain map between projective resolutions lifting f: M' -> M (identity when f is None)."""

    def __init__(self, Rsrc: ProjectiveResolver, Rdst: ProjectiveResolver, f: Optional[ModuleMap]):
        if Rsrc.D > Rdst.D:
            raise UsageError("window mismatch between resolutions")
        self.Rs = Rsrc
        self.Rd = Rdst
        self.f = f
        self.gen_images: list[dict] = []

    def images(self, s: int) -> dict:
        while len(self.gen_images) <= s:
            self._lift(len(self.gen_images))
        return self.gen_images[s]

    def apply(self, s: int, t: int, v: int) -> int:
        """The chain map on a vector of the source stage s in degree t."""
        imgs = self.images(s)
        P = self.Rs.stages[s].term
        Q = self.Rd.stages[s].term
        out = 0
        for g, I in P.decode(t, v):
            out ^= Q.act_word(I, P.gens[g], imgs[g])
        return out

    def _lift(self, s: int) -> None:
        self.Rs.extend(s + 1)
        self.Rd.extend(s + 1)
        P = self.Rs.stages[s].term
        out = {}
        for g, n in enumerate(P.gens):
            bd = self.Rs.generator_boundary(s, g)
            if s == 0:
                z = self.f.apply(n, bd) if self.f is not None else bd
            else:
                z = self.apply(s - 1, n, bd)
            out[g] = self.Rd.preimage(s, n, z)
        self.gen_images.append(out)


class FrobeniusLift:
    """Chain map Q_. -> Phi P_. over the identity of Phi M.

    P_. resolves M and Q_. resolves Phi M; Phi P_. is exact but not
    projective, and Sq^(2k) Phi x = Phi Sq^k x on it.
    """

    def __init__(self, R: ProjectiveResolver, RPhi: ProjectiveResolver):
        if 2 * R.D < RPhi.D:
            raise UsageError("resolution of M must reach half the window of Phi M")
        self.R = R
        self.Q = RPhi
        self.gen_images: list[dict] = []

    def images(self, s: int) -> dict:
        while len(self.gen_images) <= s:
            self._lift(len(self.gen_images))
        return self.gen_images[s]

    def apply(self, s: int, t: int, v: int) -> int:
        """On a vector of Q_s in degree t; the result lives in P_s in degree t/2."""
        if t % 2:
            return 0
        imgs = self.images(s)
        Q = self.Q.stages[s].term
        P = self.R.stages[s].term
        out = 0
        for g, I in Q.decode(t, v):
            if any(a % 2 for a in I):
                continue
            out ^= P.act_word(tuple(a // 2 for a in I), Q.gens[g] // 2, imgs[g])
        return out

    def _lift(self, s: int) -> None:
        self.R.extend(s + 1)
        self.Q.extend(s + 1)
        Q = self.Q.stages[s].term
        out = {}
        for g, n in enumerate(Q.gens):
            bd = self.Q.generator_boundary(s, g)
            if n % 2:
                if s == 0 and bd:
                    raise InternalError("odd generator mapping to Phi M")
                out[g] = 0
                continue
            z = bd if s == 0 else self.apply(s - 1, n, bd)
            out[g] = self.R.preimage(s, n // 2, z)
        self.gen_images.append(out)


def pushforward_cochain(g: ModuleMap, Cs: CochainComplex, Ct: CochainComplex, d: int, c: int) -> int:
    """Compose a cochain on P_d with g: N -> N'."""
    P = Cs.R.stages[d].term
    vals = {}
    for q, n in enumerate(P.gens):
        off = Cs.offset[d].get(q)
        if off is None or q not in Ct.offset[d]:
            continue
        val = (c >> off) & ((1 << Cs.N.dim(n)) - 1)
        if val:
            vals[q] = g.apply(n, val)
    return Ct.cochain_from_values(d, vals)


def pullback_cochain(lift: ChainLift, Cm: CochainComplex, Cmp: CochainComplex, d: int, c: int) -> int:
    """Precompose a cochain on the target resolution with the chain map."""
    imgs = lift.images(d)
    P = lift.Rs.stages[d].term
    vals = {q: Cm.evaluate(d, c, n, imgs[q]) for q, n in enumerate(P.gens) if q in Cmp.offset[d]}
    return Cmp.cochain_from_values(d, vals)


def frobenius_cochain(lift: FrobeniusLift, Cs: CochainComplex, Ct: CochainComplex, d: int, c: int) -> int:
    """Phi(c) composed with the lift Q_d -> Phi P_d."""
    imgs = lift.images(d)
    Q = lift.Q.stages[d].term
    vals = {}
    for q, n in enumerate(Q.gens):
        if q not in Ct.offset[d] or n % 2:
            continue
        vals[q] = Cs.evaluate(d, c, n // 2, imgs[q])
    return Ct.cochain_from_values(d, vals)


def induced_ext_map(f: ModuleMap, N: GradedModule, d: int, D: int,
                    R_source: Optional[ProjectiveResolver] = None,
                    R_target: Optional[ProjectiveResolver] = None) -> ExtMap:
    """f: M' -> M induces Ext^d(M, N) -> Ext^d(M', N)."""
    if f.window < D:
        raise UsageError(f"map window {f.window} is below D = {D}")
    Rm = R_target or ProjectiveResolver(f.target, D)
    Rmp = R_source or ProjectiveResolver(f.source, D)
    if Rm.D != D or Rmp.D != D:
        raise UsageError("resolution windows differ from D")
    lift = ChainLift(Rmp, Rm, f)
    Cm = CochainComplex(Rm, _target(N, D), d)
    Cmp = CochainComplex(Rmp, _target(N, D), d)
    src = Cm.cohomology_basis(d)
    dst = Cmp.cohomology_basis(d)
    mat = _map_on_classes(src, dst, lambda c: pullback_cochain(lift, Cm, Cmp, d, c))
    return ExtMap(d, mat, src.dim, dst.dim)


def pushforward_ext_map(g: ModuleMap, M: GradedModule, d: int, D: int,
                        R: Optional[ProjectiveResolver] = None) -> ExtMap:
    """g: N -> N' induces Ext^d(M, N) -> Ext^d(M, N')."""
    R = R or ProjectiveResolver(M, D)
    Cs = CochainComplex(R, _target(g.source, D), d)
    Ct = CochainComplex(R, _target(g.target, D), d)
    src = Cs.cohomology_basis(d)
    dst = Ct.cohomology_basis(d)
    mat = _map_on_classes(src, dst, lambda c: pushforward_cochain(g, Cs, Ct, d, c))
    return ExtMap(d, mat, src.dim, dst.dim)


def ext_frobenius_map(M: GradedModule, N: GradedModule, d: int, D: int,
                      R: Optional[ProjectiveResolver] = None,
                      RPhi: Optional[ProjectiveResolver] = None) -> ExtMap:
    """Ext^d(M, N) -> Ext^d(Phi M, Phi N) through Phi applied to a resolution of M.

    The source is Ext(M, N / N^(>D/2)), the target Ext(Phi M, Phi N / (Phi N)^(>D)).
    """
    half = D // 2
    if N.window < half:
        raise UsageError("target window too small")
    R = R or ProjectiveResolver(M, half)
    if RPhi is None:
        PM = umod.frobenius(M.with_window(half) if M.window > half else M)
        RPhi = ProjectiveResolver(_target(PM, D), D)
    Nh = _target(N, half)
    PN = umod.frobenius(Nh)
    lift = FrobeniusLift(R, RPhi)
    Cs = CochainComplex(R, Nh, d)
    Ct = CochainComplex(RPhi, _target(PN, D), d)
    src = Cs.cohomology_basis(d)
    dst = Ct.cohomology_basis(d)
    mat = _map_on_classes(src, dst, lambda c: frobenius_cochain(lift, Cs, Ct, d, c))
    return ExtMap(d, mat, src.dim, dst.dim)


def frobenius_identity_check(A: GradedModule, r: int, d: int, D: int,
                             RA: Optional[ProjectiveResolver] = None,
                             RPA: Optional[ProjectiveResolver] = None) -> dict:
    """Compare lambda_A^* o (lambda^r)_* with (lambda^(r+1))_* o Ext(Phi, Phi).

    Both routes start from Ext^d(A, Phi^r F(1)) and end in
    Ext^d(Phi A, F(1)), all at window D; the Frobenius route reads its
    source through the half window.
    """
    F1 = umod.free_module(1, D)
    PrF = umod.frobenius_power(umod.free_module(1, max(D >> r, 1)), r) if r else F1
    PrF = _target(PrF, D)
    RA = RA or ProjectiveResolver(_target(A, D), D)
    PA = umod.frobenius(_target(A, D))
    RPA = RPA or ProjectiveResolver(_target(PA, D), D)
    lam_r = umod.lambda_iterate(F1, r) if r else umod.identity_map(F1)
    lam_r1 = umod.lambda_iterate(F1, r + 1)
    lam_A = umod.lambda_map(_target(A, D))
    # the source complex and its half-window restriction share generator order
    C_src = CochainComplex(RA, PrF, d)
    C_half = CochainComplex(RA, _target(PrF, D // 2), d)
    C_AF = CochainComplex(RA, F1, d)
    C_PA_F = CochainComplex(RPA, F1, d)
    C_PA_PPr = CochainComplex(RPA, _target(umod.frobenius(_target(PrF, D // 2)), D), d)
    lift_lam = ChainLift(RPA, RA, lam_A)
    lift_phi = FrobeniusLift(RA, RPA)
    src = C_src.cohomology_basis(d)
    tgt = C_PA_F.cohomology_basis(d)
    lam_r_map = _restrict_map(lam_r, PrF.window)
    lam_r1_map = lam_r1
    half_size = len(C_half.coords[d])
    left_cols, right_cols = [], []
    for z in src.reps:
        left = pullback_cochain(lift_lam, C_AF, C_PA_F, d,
                                pushforward_cochain(lam_r_map, C_src, C_AF, d, z))
        zh = z & ((1 << half_size) - 1)
        right = pushforward_cochain(lam_r1_map, C_PA_PPr, C_PA_F, d,
                                    frobenius_cochain(lift_phi, C_half, C_PA_PPr, d, zh))
        left_cols.append(tgt.coordinates(left))
        right_cols.append(tgt.coordinates(right))
    return {"source_dim": src.dim, "target_dim": tgt.dim,
            "left": left_cols, "right": right_cols, "holds": left_cols == right_cols}


def _restrict_map(f: ModuleMap, W: int) -> ModuleMap:
    return f if f.window <= W else ModuleMap(f.source, f.target,
                                             {t: b for t, b in f.blocks.items() if t <= W}, W)

# ---------------------------------------------------------------------------
# cross-checks
# ---------------------------------------------------------------------------

def dual_route_ext_dims(R: ProjectiveResolver, n: int, d_max: int) -> list[int]:
    """dim Ext^d(M, J(n)) from the degree-n slice of the resolution.

    Hom(P_d, J(n)) is the dual of P_d^n, so the cochain cohomology is the
    dual of the homology of the complex P_.^n -> M^n.
    """
    R.extend(d_max + 2)
    out = []
    for d in range(d_max + 1):
        size = R.stages[d].term.dims[n] if n <= R.D else 0
        out_rank = len(fl.echelon(R.stages[d].images[n])) if d > 0 else 0
        in_rank = len(fl.echelon(R.stages[d + 1].images[n]))
        if d == 0:
            # H_0 of P_.^n with the augmentation dropped is P_0^n / im d_1
            out.append(size - in_rank)
        else:
            out.append(size - out_rank - in_rank)
    return out


def ext_via_injective(M: GradedModule, res: Resolution, d_max: int) -> list[int]:
    """dim Ext^d(M, N) from a minimal injective resolution of N, d <= d_max.

    Hom(M, J(n)) = (M^n)^*; the differential sends a functional f to the
    functionals of the blocks of d o realize(f).
    """
    terms = res.terms
    if not res.complete and len(terms) < d_max + 2:
        raise UsageError("injective resolution is too short")
    layouts = []
    for I in terms:
        co = []
        for i, n in enumerate(I.summands):
            co.extend((i, n, b) for b in range(M.dim(n)))
        layouts.append(co)

    def delta(j: int) -> list[int]:
        if j + 1 >= len(terms):
            return [0] * len(layouts[j])
        d = res.maps[j + 1]
        S, T = terms[j], terms[j + 1]
        soff = _summand_offsets(S.summands, S.window)
        toff = _summand_offsets(T.summands, T.window)
        tgt_index = {(i, b): k for k, (i, _n, b) in enumerate(layouts[j + 1])}
        cols = []
        for i, n, b in layouts[j]:
            phi = umod.realize_blocks(M, n, 1 << b)
            col = 0
            for jj, m in enumerate(T.summands):
                blk = phi.get(m)
                if not blk:
                    continue
                for x, y in enumerate(blk):
                    if not y:
                        continue
                    img = d.apply(m, y << soff[m][i])
                    if (img >> toff[m][jj]) & 1:
                        col ^= 1 << tgt_index[(jj, x)]
            cols.append(col)
        return cols

    out = []
    deltas = [delta(j) for j in range(min(d_max + 1, len(terms)))]
    for dd in range(d_max + 1):
        if dd >= len(terms):
            out.append(0)
            continue
        size = len(layouts[dd])
        r_out = len(fl.echelon(deltas[dd]))
        r_in = len(fl.echelon(deltas[dd - 1])) if dd > 0 else 0
        out.append(size - r_out - r_in)
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def artifact_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def resolution_report(res: Resolution, with_blocks: bool = True) -> dict:
    out = {"flavor": res.flavor, "base": res.base.display_name(),
           "window": res.valid_internal_degree, "complete": res.complete,
           "certificates": dict(res.certificates)}
    if res.flavor == "injective":
        out["terms"] = [umod.bg_name(m) for m in res.multisets]
        if with_blocks:
            blocks = []
            for d in res.maps[1:]:
                mat = operation_matrix(d)
                blocks.append([[st.format_element(e) for e in row] for row in mat])
            out["differentials"] = blocks
    else:
        out["terms"] = [sorted(m) for m in res.multisets]
    out["hash"] = artifact_hash(out)
    return out
