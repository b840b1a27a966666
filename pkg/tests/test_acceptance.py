"""Acceptance criteria, one test each.

Every check is exact over GF(2).  Each test records a one-line verdict;
the lines are printed at the end of the pytest run (see conftest.py), and
running this file directly prints them as well.
"""
from __future__ import annotations

import random
import sys
import time

import pytest

import oracle
from unstable_ext import paper_lab as pl
from unstable_ext import resolve as rs
from unstable_ext import steenrod as st
from unstable_ext import umod

VERDICTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    VERDICTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"


# 1 ---------------------------------------------------------------------------

def criterion_1() -> tuple[bool, str]:
    t0 = time.time()
    monos = oracle.sorted_monomials(oracle.POLY_DEGREE, oracle.NVARS)
    words = list(oracle.words_up_to(3, 20)) + oracle.random_words(500, 5, 30, seed=1)
    bad = [w for w in words if not oracle.word_agrees(w, monos)]
    return not bad, f"{len(words)} words, {len(bad)} disagreements, {time.time() - t0:.0f}s"


# 2 ---------------------------------------------------------------------------

def criterion_2() -> tuple[bool, str]:
    monos = oracle.sorted_monomials(oracle.POLY_DEGREE, oracle.NVARS)
    cases = [([1, 1], "0"), ([2, 2], "Sq^{3,1}"), ([2, 3], "Sq^{5} + Sq^{4,1}")]
    ok = True
    for word, expected in cases:
        e = st.adem_normalize(word)
        ok &= st.format_element(e) == expected
        ok &= all(oracle.act_word(word, m) == oracle.act_element(st.parse_element(expected), m)
                  for m in monos)
    wall = []
    for i in range(2, 5):
        for j in range(0, i - 1):
            comm = st.adem_normalize([1 << i, 1 << j]) + st.adem_normalize([1 << j, 1 << i])
            wall.append(st.in_subalgebra(comm, i - 1))
    return ok and all(wall), f"Adem identities {'hold' if ok else 'broken'}, {sum(wall)}/{len(wall)} Wall commutators"


# 3 ---------------------------------------------------------------------------

def criterion_3() -> tuple[bool, str]:
    bad = [f"J({n})" for n in range(65) if umod.validate(umod.brown_gitler(n))]
    bad += [f"F({n})" for n in range(1, 5) if umod.validate(umod.free_module(n, 64))]
    bad += [f"BV_{k}" for k in range(1, 4) if umod.validate(umod.cohomology_BV(k, 32))]
    P = umod.cohomology_BV(1, 32)
    acyclic = all(umod.sq1_homology(P, n) == 0 for n in range(1, 31))
    return not bad and acyclic, f"invalid: {bad or 'none'}; Sq^1-acyclic in 1..30: {acyclic}"


# 4 ---------------------------------------------------------------------------

def criterion_4() -> tuple[bool, str]:
    spheres = [n for n in range(1, 33)
               if rs.injective_hull(umod.sigma_simple(n)).term.summands != (n,)]
    hks = [k for k in range(2, 7)
           if rs.injective_hull(umod.hk_module(k)).term.summands != (1 << (k - 1),)]
    return not spheres and not hks, f"sphere mismatches {spheres}, H_k mismatches {hks}"


# 5 ---------------------------------------------------------------------------

EXPECTED_TERMS = {2: ["J(2)"], 3: ["J(4)", "J(3)", "J(2)", "J(1)"],
                  4: ["J(8)", "J(7,6)", "J(6,4)"], 5: ["J(16)", "J(15,14,12)"]}


def criterion_5() -> tuple[bool, str]:
    ok = True
    for k, terms in EXPECTED_TERMS.items():
        res = rs.minimal_injective_resolution(umod.hk_module(k), 4)
        got = [umod.bg_name(m) for m in res.multisets[:len(terms)]]
        ok &= got == terms
        if k == 2:
            ok &= res.complete and len(res.multisets) == 1
    firsts = [f for k in (4, 5) for f in pl.verify_hk_vs_table(k) if f.check == "first_differential"]
    ok &= all(f.verdict == "pass" for f in firsts)
    j2k = pl.verify_j2k(5)[0]
    matches = j2k.actual["matches"]
    ok &= bool(matches)
    return ok, f"H_5 third term {j2k.actual['engine']} matches: {', '.join(matches) or 'neither'}"


# 6 ---------------------------------------------------------------------------

def criterion_6() -> tuple[bool, str]:
    D = 64
    F1 = umod.free_module(1, D)
    tensor = rs.ext_groups(umod.build_from_spec("T(F(1),F(1))", D), F1, 5, D).dim(5)
    free = rs.ext_groups(F1, F1, 6, D).row()[1:]
    cells = pl.verify_ext_table(11, 3, 256)
    decided = [f for f in cells if f.verdict in ("pass", "fail")]
    failed = [f for f in cells if f.verdict == "fail"]
    unavailable = sorted({f.inputs["r"] for f in cells if f.verdict == "unavailable"})
    ok = tensor == 1 and not any(free) and not failed and not unavailable
    return ok, (f"Ext^5(T) = {tensor}; Ext^1..6(F(1),F(1)) = {free}; "
                f"{len(decided) - len(failed)}/{len(cells)} cells pass at D=256, "
                f"{len(failed)} fail, rows r in {unavailable} unavailable within budget")


# 7 ---------------------------------------------------------------------------

def criterion_7() -> tuple[bool, str]:
    mono = pl.verify_frobenius_monomorphisms(8, 3, 64)
    open_cells = [(f.inputs["r"], f.inputs["d"]) for f in mono if f.verdict != "pass"]
    eq = pl.verify_frobenius_identity(2, 4, 64)
    eq_ok = all(f.verdict == "pass" for f in eq)
    ce = {f.check: f for f in pl.verify_counterexamples(64)}
    kernel_ok = ce["twist_not_injective"].verdict == "pass"
    ok = not open_cells and eq_ok and kernel_ok
    return ok, (f"lambda cells not shown injective (r, d): {open_cells or 'none'}; "
                f"identity {'holds' if eq_ok else 'fails'} for r <= 2, d <= 4; "
                f"twist kernel {'nonzero' if kernel_ok else 'zero'}")


# 8 ---------------------------------------------------------------------------

def criterion_8() -> tuple[bool, str]:
    certs = []
    for k in range(2, 6):
        certs.append(rs.minimal_injective_resolution(umod.hk_module(k), 4).certificates)
    for spec, D in [("Sigma F2", 64), ("Phi^1 F(1)", 64), ("Phi^2 F(1)", 64), ("T(F(1),F(1))", 32)]:
        certs.append(rs.minimal_projective_resolution(umod.build_from_spec(spec, D), 6, D).certificates)
    certs_ok = all(c["exact"] and c["minimal"] for c in certs)

    stable = True
    for spec in ["Sigma F2", "Phi^1 F(1)", "T(F(1),F(1))"]:
        small = rs.ext_groups(umod.build_from_spec(spec, 64), umod.free_module(1, 64), 5, 64)
        large = rs.ext_groups(umod.build_from_spec(spec, 128), umod.free_module(1, 128), 5, 128)
        stable &= all(small.dim(d, t) == large.dim(d, t) for d in range(6) for t in range(65))

    rng = random.Random(8)
    hom_bad = 0
    for _ in range(50):
        M = oracle.random_finite_module(rng)
        for n in range(1, M.window + 1):
            if oracle.hom_dimension(M, umod.brown_gitler(n)) != umod.hom_to_J(M, n).dim or \
                    umod.hom_to_J(M, n).dim != M.dim(n):
                hom_bad += 1
    ok = certs_ok and stable and not hom_bad
    return ok, (f"{len(certs)} resolutions certified: {certs_ok}; window-stable: {stable}; "
                f"Hom(M, J(n)) mismatches on 50 modules: {hom_bad}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = CRITERIA[number]()
    record(number, ok, detail)
    print(VERDICTS[number])
    assert ok, detail


def test_report_documents_limitation():
    assert "not reproduced" in pl.FULL_RANGE_NOTE.lower()
    assert pl.run_suite("counterexamples").limitation == pl.FULL_RANGE_NOTE


if __name__ == "__main__":
    failures = 0
    for number, fn in CRITERIA.items():
        ok, detail = fn()
        record(number, ok, detail)
        print(VERDICTS[number], flush=True)
        failures += not ok
    print(pl.FULL_RANGE_NOTE)
    sys.exit(1 if failures else 0)
