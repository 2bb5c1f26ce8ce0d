import pytest
from hypothesis import given, settings

from pervcone import linalg
from pervcone.adjunction import (F_module, Q_module, Qr_module, ResourceError, adjunction_identities,
                                 adjunction_maps, alpha, bar_cohomology, bar_cohomology_dims, beta,
                                 cyclic_cohomology_oracle, gr_map, h_d_map, hom_sequence_check, q_map,
                                 qr_map, alphar_map, rho_r, truncated_resolution, Q_map)
from pervcone.field import GF, QQ
from pervcone.groups import (ModuleError, cyclic_group, random_module, regular_module, symmetric_group,
                             trivial_module)
from pervcone.matrix import Matrix, hstack, vstack

from _strategies import modules

C1, C2, C3, S3 = cyclic_group(1), cyclic_group(2), cyclic_group(3), symmetric_group(3)


def test_F_of_trivial_is_regular():
    FE = F_module(trivial_module(C2, GF(3), 1))
    R = regular_module(C2, GF(3))
    assert FE.dim == 2 and FE.action == R.action


def test_F_on_c1_is_identity():
    E = random_module(C1, GF(5), 3, seed=1, exact=True)
    assert F_module(E).action == E.action


def test_alpha_of_trivial_is_diagonal():
    a = alpha(trivial_module(C3, QQ, 1)).matrix
    assert a.to_list() == [[1], [1], [1]]


def test_alpha_regular_c2_injective():
    assert linalg.kernel_basis(alpha(regular_module(C2, QQ)).matrix).cols == 0


def test_Q_dims():
    assert Q_module(trivial_module(C1, QQ, 2)).dim == 0
    assert Q_module(trivial_module(C3, QQ, 2)).dim == 4
    assert all(Qr_module(trivial_module(C2, GF(2), 1), r).dim == 1 for r in range(5))


def test_short_exact_on_regular_c2():
    E = regular_module(C2, GF(2))
    a, q = alpha(E).matrix, q_map(E).matrix
    assert linalg.rank(a) + linalg.rank(q) == F_module(E).dim
    assert q @ a == Matrix.zeros(E.field, q.rows, a.cols)


def test_rho0_formula():
    E = random_module(C3, GF(5), 2, seed=3, exact=True)
    r0 = rho_r(E, 0)
    # (rho^0 e)(h) = e - h e, with h running over non-identity elements in table order
    eye = Matrix.identity(E.field, 2)
    expect = vstack(E.field, 2, [eye - E.action[h] for h in (1, 2)])
    assert r0 == expect


def test_g1_g0_zero_on_regular_c3():
    E = regular_module(C3, GF(2))
    g0, g1 = gr_map(E, 0).matrix, gr_map(E, 1).matrix
    assert (g1 @ g0).is_zero()


@pytest.mark.parametrize("r", [0, 1, 2])
def test_g_factors_through_q(r):
    E = random_module(S3, GF(3), 2, seed=r)
    assert gr_map(E, r).matrix == alphar_map(E, r + 1).matrix @ qr_map(E, r).matrix


def test_resolution_dims_c2_d3():
    # E, FE, FQE, FQ^2E, Q^3E with dim Q^r E = 1 and F doubling
    R = truncated_resolution(trivial_module(C2, QQ, 1), 3)
    assert R.dims() == [1, 2, 2, 2, 1]
    assert R.is_exact()


def test_resolution_c1_vanishes_above_zero():
    R = truncated_resolution(trivial_module(C1, GF(2), 2), 3)
    assert R.dims()[2:] == [0, 0, 0]
    assert R.is_exact()


def test_euler_characteristic_s3():
    dims = truncated_resolution(random_module(S3, QQ, 2, seed=0, exact=True), 2).dims()
    assert sum((-1) ** i * x for i, x in enumerate(dims)) == 0


def test_identities_regular_c2_gf2():
    res = adjunction_identities(adjunction_maps(regular_module(C2, GF(2)), check=False))
    assert all(res.values()), [k for k, v in res.items() if not v]


def test_h_invertible_c3_gf5():
    A = adjunction_maps(trivial_module(C3, GF(5), 1))
    assert linalg.is_invertible(A.h.matrix)


def test_beta_is_evaluation_at_identity():
    E = random_module(C3, QQ, 2, seed=2, exact=True)
    b = beta(E)
    assert b == hstack(QQ, 2, [Matrix.identity(QQ, 2), Matrix.zeros(QQ, 2, 4)])


@given(modules(max_dim=2))
@settings(max_examples=25)
def test_adjunction_identities_hold(E):
    res = adjunction_identities(adjunction_maps(E, check=False))
    assert all(res.values()), [k for k, v in res.items() if not v]


@given(modules(max_dim=2), modules(max_dim=2))
@settings(max_examples=15)
def test_hom_sequence_split_exact(A, B):
    if A.group != B.group or A.field != B.field:
        return
    assert hom_sequence_check(A, B)["ok"]


@given(modules(max_dim=2))
@settings(max_examples=25)
def test_resolution_exact(E):
    for d in (1, 2, 3):
        assert truncated_resolution(E, d).is_exact()


def _quasi_iso_case(E, d):
    src, tgt, h, aQ, Qa = h_d_map(E, d)
    assert h.is_chain_map() and h.is_quasi_iso()
    return h, aQ, Qa


def test_h_d_quasi_iso_c2_gf2():
    _quasi_iso_case(trivial_module(C2, GF(2), 1), 2)


def test_h_d_composes_with_alpha_c3():
    E = random_module(C3, QQ, 1, seed=4, exact=True)
    h, aQ, Qa = _quasi_iso_case(E, 1)
    assert h.comp(0).matrix @ aQ.matrix == Qa.matrix


def test_h_d_c1_zero():
    h, _, _ = _quasi_iso_case(trivial_module(C1, QQ, 1), 2)
    assert all(h.comp(n).matrix.rows * h.comp(n).matrix.cols == 0 for n in (1, 2))


def test_cohomology_examples():
    assert bar_cohomology_dims(trivial_module(C2, GF(2), 1), 4) == [1] * 5
    assert bar_cohomology_dims(trivial_module(C2, QQ, 1), 4) == [1, 0, 0, 0, 0]
    E = random_module(S3, GF(3), 2, seed=5, exact=True)
    from pervcone.groups import invariants_basis
    assert bar_cohomology(E, 0) == invariants_basis(E).cols


def test_oracle_examples():
    assert [cyclic_cohomology_oracle(trivial_module(C1, QQ, 2), n) for n in range(3)] == [2, 0, 0]
    assert cyclic_cohomology_oracle(trivial_module(C3, QQ, 1), 2) == 0
    assert cyclic_cohomology_oracle(trivial_module(C2, GF(2), 1), 3) == 1
    with pytest.raises(ModuleError):
        cyclic_cohomology_oracle(trivial_module(S3, QQ, 1), 1)


def test_s3_mod3_has_cohomology():
    # 3 divides |S3|: H^4(S3, F_3) is one-dimensional, H^1 and H^2 vanish
    assert bar_cohomology_dims(trivial_module(S3, GF(3), 1), 4) == [1, 0, 0, 1, 1]


@given(modules(max_dim=2, group_names=["C1", "C2", "C3", "C4"]))
@settings(max_examples=25)
def test_bar_matches_cyclic_oracle(E):
    assert bar_cohomology_dims(E, 3) == [cyclic_cohomology_oracle(E, n) for n in range(4)]


@given(modules(max_dim=1))
@settings(max_examples=15)
def test_shapiro(E):
    assert bar_cohomology_dims(F_module(E), 3)[1:] == [0, 0, 0]


def test_cap_enforced():
    with pytest.raises(ResourceError):
        Qr_module(trivial_module(S3, QQ, 2), 6, cap=1000)
