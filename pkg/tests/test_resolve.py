"""Minimal resolutions, Ext tables and induced maps."""
import pytest

from unstable_ext import f2_linear as fl
from unstable_ext import paper_lab as pl
from unstable_ext import resolve as rs
from unstable_ext import steenrod as st
from unstable_ext import umod
from unstable_ext.errors import BudgetExceeded, UsageError


# injective side ---------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5, 8, 13])
def test_hull_of_sphere(n):
    hull = rs.injective_hull(umod.sigma_simple(n))
    assert hull.term.summands == (n,) and hull.essential


@pytest.mark.parametrize("k,top", [(2, 2), (3, 4), (4, 8), (5, 16)])
def test_hull_of_hk(k, top):
    hull = rs.injective_hull(umod.hk_module(k))
    assert hull.term.summands == (top,) and hull.essential
    assert hull.embedding.validate() == []


def test_hull_rejects_bad_input():
    with pytest.raises(UsageError):
        rs.injective_hull(umod.free_module(1, 8))
    with pytest.raises(UsageError):
        rs.injective_hull(umod.trivial_module())


def test_hull_of_sum_is_sum_of_hulls():
    M = umod.direct_sum([umod.hk_module(3), umod.sigma_simple(2)])
    assert sorted(rs.injective_hull(M).term.summands) == [2, 4]


@pytest.mark.parametrize("k,expected", [
    (2, "J(2)"),
    (3, "J(4) ; J(3) ; J(2) ; J(1)"),
    (4, "J(8) ; J(7,6) ; J(6,4) ; J(5,1)"),
])
def test_injective_resolutions(k, expected):
    res = rs.minimal_injective_resolution(umod.hk_module(k), 4)
    assert res.describe() == expected
    assert all(res.certificates.values())
    for a, b in zip(res.maps[1:], res.maps[2:]):
        assert b.compose(a).is_zero()
    for g in res.maps:
        assert g.validate() == []


def test_resolution_of_a_sphere_in_low_degree():
    res = rs.minimal_injective_resolution(umod.sigma_simple(3), 3)
    assert res.multisets[0] == (3,)
    assert res.certificates["exact"] and res.certificates["minimal"]


def test_operation_matrix_reconstructs_map():
    res = rs.minimal_injective_resolution(umod.hk_module(4), 3)
    for g in res.maps[1:]:
        mat = rs.operation_matrix(g)
        rebuilt = pl.map_from_operations(g.source.summands, g.target.summands, mat)
        for t in range(g.window + 1):
            assert rebuilt.block(t) == g.block(t)


def test_operation_for_single_squares():
    for n, k in [(8, 1), (8, 2), (8, 4), (7, 3)]:
        theta = st.SteenrodElement.sq(k)
        f = rs.operation_functional(theta, n, n - k)
        assert rs.operation_for_block(n, n - k, f) == theta


def test_first_differential_of_h6():
    res = rs.minimal_injective_resolution(umod.hk_module(6), 2)
    mat = rs.operation_matrix(res.maps[1])
    assert [st.format_element(row[0]) for row in mat] == ["Sq^{1}", "Sq^{2}", "Sq^{4}", "Sq^{8}"]


# projective side ----------------------------------------------------------------

def test_projective_cover_of_sigma_f2():
    P, blocks, R = rs.projective_cover(umod.sigma_simple(1), 16)
    assert P.gens == [1]
    res = rs.minimal_projective_resolution(umod.sigma_simple(1), 4, 32)
    assert res.certificates == {"exact": True, "minimal": True}


def test_free_module_is_projective():
    R = rs.ProjectiveResolver(umod.free_module(2, 24), 24)
    R.extend(3)
    assert R.stages[0].term.gens == [2]
    assert R.stages[1].term.gens == []


def test_budget_is_enforced():
    R = rs.ProjectiveResolver(pl.phi_f1(2, 64), 64, max_dim=50)
    with pytest.raises(BudgetExceeded):
        R.extend(6)


def test_truncated_module_needs_window():
    with pytest.raises(UsageError):
        rs.ProjectiveResolver(umod.free_module(1, 16), 32)


# Ext ----------------------------------------------------------------------------

def test_ext_of_free_module():
    F1 = umod.free_module(1, 64)
    assert rs.ext_groups(F1, F1, 6, 64).row() == [1, 0, 0, 0, 0, 0, 0]


def test_ext_sigma_f2_into_f1():
    F1 = umod.free_module(1, 64)
    assert rs.ext_groups(umod.sigma_simple(1), F1, 5, 64).row() == [0, 0, 0, 1, 0, 0]


def test_ext_of_phi_f1():
    table = rs.ext_groups(pl.phi_f1(1, 64), umod.free_module(1, 64), 8, 64)
    assert table.row() == [1, 0, 1, 0, 0, 0, 1, 0, 0]


def test_ext_window_stability():
    # the r = 2 resolution at window 128 takes ten minutes; see scripts/ext_table.py
    sources = [lambda D: pl.phi_f1(0, D), lambda D: pl.phi_f1(1, D), lambda D: umod.sigma_simple(1)]
    for make in sources:
        small = rs.ext_groups(make(64), umod.free_module(1, 64), 6, 64)
        large = rs.ext_groups(make(128), umod.free_module(1, 128), 6, 128)
        for d in range(7):
            for t in range(65):
                assert small.dim(d, t) == large.dim(d, t)


def test_truncated_target_leaves_cells_unavailable():
    table = rs.ext_groups(umod.sigma_simple(1), umod.free_module(1, 16), 2, 32)
    assert table.dim(1, 16) is not None
    assert table.dim(1) is None


def test_dual_route_matches_cochain_ext():
    for M in [umod.hk_module(3), umod.sigma_simple(2), umod.hk_module(4)]:
        R = rs.ProjectiveResolver(M, 16)
        for n in range(1, 17):
            direct = rs.ext_groups(M, umod.brown_gitler(n), 3, 16, resolver=R).row()
            assert rs.dual_route_ext_dims(R, n, 3) == direct


@pytest.mark.parametrize("k", [3, 4])
def test_injective_route_matches_projective_route(k):
    H = umod.hk_module(k)
    res = rs.minimal_injective_resolution(H, 6)
    for M in [umod.sigma_simple(m) for m in range(1, 1 << (k - 1))] + [umod.hk_module(k - 1)]:
        W = H.window
        via_proj = rs.ext_groups(M, H, 4, W).row()
        assert rs.ext_via_injective(M, res, 4) == via_proj


# induced maps -------------------------------------------------------------------

def test_identity_induces_identity():
    M = pl.phi_f1(1, 32)
    F1 = umod.free_module(1, 32)
    for d in (0, 2):
        m = rs.induced_ext_map(umod.identity_map(M), F1, d, 32)
        assert m.rank == m.source_dim == m.target_dim


def test_lambda_on_ext2_is_injective():
    D = 32
    lam = umod.lambda_map(pl.phi_f1(1, D))
    m = rs.induced_ext_map(lam, umod.free_module(1, D), 2, D)
    assert (m.source_dim, m.target_dim, m.rank) == (1, 1, 1)


def test_frobenius_twist_counterexample():
    m = rs.ext_frobenius_map(umod.sigma_simple(1), umod.free_module(1, 64), 3, 64)
    assert m.source_dim == 1 and m.kernel == [1]


def test_frobenius_identity_small_case():
    res = rs.frobenius_identity_check(pl.phi_f1(1, 32), 1, 2, 32)
    assert res["holds"] and res["source_dim"] == 1


def test_artifact_hash_is_stable():
    res = rs.minimal_injective_resolution(umod.hk_module(3), 4)
    a = rs.resolution_report(res)
    b = rs.resolution_report(rs.minimal_injective_resolution(umod.hk_module(3), 4))
    assert a == b and len(a["hash"]) == 16
