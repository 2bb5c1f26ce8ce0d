import pytest
from hypothesis import given

from pervcone import linalg
from pervcone.field import GF, QQ
from pervcone.groups import (FiniteGroup, GroupError, HModuleMap, cyclic_group, group_by_name, hom_basis,
                             invariants_basis, permutation_module, random_module, regular_module,
                             symmetric_group, trivial_module, validate_group)
from pervcone.matrix import Matrix

from _strategies import modules


def test_c2_table_is_valid():
    validate_group(FiniteGroup([[0, 1], [1, 0]], check=False))


def test_bad_identity_column_rejected():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [1, 1]])


def test_s3_is_a_group():
    G = symmetric_group(3)
    validate_group(G)
    assert G.order == 6 and G.cyclic_generator() is None
    # brute-force associativity once more, independent of validate_group
    m = G.mul
    assert all(m[m[a][b]][c] == m[a][m[b][c]] for a in range(6) for b in range(6) for c in range(6))


def test_names():
    assert group_by_name("c4").order == 4
    with pytest.raises(GroupError):
        group_by_name("D4")


def test_trivial_and_regular():
    E = trivial_module(cyclic_group(2), GF(2), 1)
    assert all(a == Matrix.identity(GF(2), 1) for a in E.action)
    R = regular_module(cyclic_group(3), QQ)
    assert R.dim == 3
    for a in R.action:
        rows = a.to_list()
        assert sorted(sum(r) for r in rows) == [1, 1, 1] and all(v in (0, 1) for r in rows for v in r)


def test_permutation_module_on_s3_cosets():
    G = symmetric_group(3)
    sub = next(s for s in __import__("pervcone.groups", fromlist=["subgroups"]).subgroups(G) if len(s) == 2)
    assert permutation_module(G, GF(3), sub).dim == 3


@pytest.mark.parametrize("f,expect", [(GF(3), 2)])
def test_invariants_of_trivial(f, expect):
    assert invariants_basis(trivial_module(cyclic_group(2), f, 2)).cols == expect


@pytest.mark.parametrize("f", [QQ, GF(2)])
def test_invariants_of_regular_c2(f):
    B = invariants_basis(regular_module(cyclic_group(2), f))
    assert B.cols == 1
    v = [B[0, 0], B[1, 0]]
    assert v[0] == v[1] != 0


def test_random_module_is_deterministic():
    G = symmetric_group(3)
    a = random_module(G, GF(5), 3, seed=11)
    b = random_module(G, GF(5), 3, seed=11)
    assert a.dim == b.dim and a.action == b.action


@given(modules())
def test_random_modules_are_valid(E):
    E.check()
    assert all(linalg.is_invertible(a) for a in E.action)


@given(modules())
def test_invariant_vectors_are_fixed(E):
    B = invariants_basis(E)
    assert all(a @ B == B for a in E.action)


@given(modules(max_dim=2), modules(max_dim=2))
def test_hom_basis_is_equivariant_and_closed(A, B):
    if A.group != B.group or A.field != B.field:
        return
    hb = hom_basis(A, B)
    for X in hb:
        assert HModuleMap(A, B, X).is_equivariant()
    for X in hb:
        for Y in hom_basis(B, A):
            assert HModuleMap(A, A, Y @ X).is_equivariant()
