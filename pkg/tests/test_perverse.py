import random

import pytest
from hypothesis import given, settings, strategies as st

from pervcone import linalg
from pervcone.adjunction import truncated_resolution
from pervcone.complexes import BoundedComplex, ChainMap, cone, homotopy_hom, single
from pervcone.extensions import p_direct_image, p_extension_by_zero
from pervcone.field import GF, QQ
from pervcone.groups import cyclic_group, regular_module, symmetric_group, trivial_module, random_module
from pervcone.matrix import Matrix
from pervcone.perverse import (B_d, B_d_map, D_d, DatumError, DatumMap, GluingDatum, Phi, PerversityError,
                               cokernel_datum, conjugate_datum, datum_hom_basis, datum_hom_dim,
                               datum_isomorphism, is_perverse, kernel_datum, lambda_checks, lambda_d,
                               random_datum, xi1_relation_holds)
from pervcone.sheaves import SheafMap, cokernel, i_lower_star, j_lower_star, j_lower_star_F, j_shriek
from pervcone.adjunction import alpha

from _strategies import data

C1, C2, C3 = cyclic_group(1), cyclic_group(2), cyclic_group(3)


# -- B_d -------------------------------------------------------------------------------

def test_pstar_model_trivial_group():
    K = B_d(p_direct_image(trivial_module(C1, QQ, 1), 1))
    assert K.cohomology_dims(0) == (1, 1) and K.cohomology_dims(1) == (0, 0)


def test_datum_needs_invertible_sigma():
    # over C1, Q L = 0, so F = (k, k, id) cannot be glued in with an invertible sigma
    L = trivial_module(C1, QQ, 1)
    F = j_lower_star(L)
    src = j_lower_star_F(L)
    u = SheafMap(src, F, Matrix.zeros(QQ, 1, 1), Matrix.identity(QQ, 1))
    from pervcone.groups import HModuleMap, zero_module
    from pervcone.adjunction import Q_module
    with pytest.raises(DatumError):
        GluingDatum(1, L, F, u, HModuleMap(Q_module(L), L, Matrix.zeros(QQ, 1, 0)))


@given(data(ds=(1, 2, 3), group_names=("C1", "C2", "C3")))
@settings(max_examples=20)
def test_model_shape(O):
    K = B_d(O)
    n = O.group.order
    assert K.lo == 0 and K.hi == O.d and K.is_complex()
    for i in range(O.d):
        assert K.term(i).V.dim == n * (n - 1) ** i * O.L.dim
    # j^* of the model is T_d L, with the last differential read through sigma
    R = truncated_resolution(O.L, O.d)
    J = K.restrict_open()
    for i in range(O.d - 1):
        assert J.diff(i).matrix == R.diffs[i].matrix
    assert linalg.solve(O.sigma.matrix, J.diff(O.d - 1).matrix) == R.diffs[-1].matrix


@given(data(), st.integers(0, 100))
@settings(max_examples=20)
def test_B_d_is_functorial(O, seed):
    O2 = conjugate_datum(O, seed)
    iso = datum_isomorphism(O, O2, seed=seed)
    assert iso is not None
    m = B_d_map(iso)
    assert m.is_chain_map() and m.is_quasi_iso()
    assert B_d_map(iso @ O.identity()).comps.keys() == m.comps.keys()


# -- Phi and perversity ------------------------------------------------------------------

def test_phi_of_vertex_complex_is_shift():
    K = single(i_lower_star(C2, GF(3), 2), 1)
    P = Phi(K).complex
    assert P.cohomology_dims(0) == (0, 2)
    assert all(P.cohomology_dims(n) == (0, 0) for n in (1, 2))


@given(data(ds=(1, 2, 3), group_names=("C1", "C2", "C3")))
@settings(max_examples=25)
def test_models_are_perverse(O):
    K = B_d(O)
    assert is_perverse(K, O.d)
    P = Phi(K)
    assert is_perverse(P.complex, O.d - 1)
    assert xi1_relation_holds(K, P)


@given(data(ds=(1, 2), group_names=("S3",), max_dim=1))
@settings(max_examples=8)
def test_models_are_perverse_s3(O):
    K = B_d(O)
    assert is_perverse(K, O.d) and is_perverse(Phi(K).complex, O.d - 1)


def test_vertex_sheaf_in_degree_d():
    for d in (1, 2, 3):
        assert is_perverse(single(i_lower_star(C3, QQ, 2), d), d)


def test_j_shriek_perversity():
    K = single(j_shriek(regular_module(C2, QQ)), 0)
    assert is_perverse(K, 0) and is_perverse(K, 1)
    r = is_perverse(K, 2)
    assert not r and r.condition == "c" and r.degree == 1


def test_counterexamples():
    E = regular_module(C2, GF(2))
    r = is_perverse(single(j_lower_star(E), 1), 2)
    assert not r and r.condition == "b"
    r = is_perverse(single(i_lower_star(C2, GF(2), 1), 3), 2)
    assert not r and r.condition == "a"
    r = is_perverse(single(i_lower_star(C2, GF(2), 1), 0), 2)
    assert not r and r.condition == "c" and r.degree == 0
    with pytest.raises(PerversityError):
        D_d(single(i_lower_star(C2, GF(2), 1), 0), 2)


@given(data(ds=(2,), group_names=("C2", "C3")))
@settings(max_examples=10)
def test_phi_of_non_perverse_fails(O):
    # shifting a model by one degree breaks (a) or (b)
    K = B_d(O).shift(-1)
    if K.is_exact():
        return
    assert not is_perverse(K, O.d)


# -- D_d and round trips ---------------------------------------------------------------

@given(data(ds=(1, 2, 3), group_names=("C1", "C2", "C3")), st.integers(0, 100))
@settings(max_examples=25)
def test_D_B_is_identity(O, seed):
    back = D_d(B_d(O), O.d)
    iso = datum_isomorphism(O, back, seed=seed)
    assert iso is not None and iso.is_iso()


def test_D1_of_resolved_j_shriek():
    E = random_module(C3, GF(2), 2, seed=1, exact=True)
    src, tgt = j_shriek(E), j_lower_star_F(E)
    m = SheafMap(src, tgt, alpha(E, tgt.V).matrix, Matrix.zeros(E.field, E.dim, 0))
    Q, pr = cokernel(m)
    from pervcone.category import SheafCategory
    K = BoundedComplex(SheafCategory(C3, E.field), 0, [tgt, Q], [pr])
    O = D_d(K, 1)
    assert datum_isomorphism(O, p_extension_by_zero(E, 1)) is not None
    assert O.F.dims == Q.dims


def test_D_d_trivial_group_is_vertex_part():
    L = trivial_module(C1, GF(5), 2)
    O = random_datum(L, 2, seed=3, extra_vertex=1)
    back = D_d(B_d(O), 2)
    assert back.F.V.dim == 0 and back.F.W_dim == B_d(O).cohomology_dims(2)[1]


# -- the abelian structure ------------------------------------------------------------------

@given(data(ds=(1, 2), group_names=("C1", "C2", "C3")))
@settings(max_examples=15)
def test_kernel_of_identity_and_cokernel_of_zero(O):
    K, _ = kernel_datum(O.identity())
    assert K.L.dim == 0 and K.F.dims == (0, 0)
    Z = random_datum(trivial_module(O.group, O.field, 0), O.d, seed=0, extra_vertex=0)
    from pervcone.groups import HModuleMap
    zero = DatumMap(Z, O, HModuleMap(Z.L, O.L, Matrix.zeros(O.field, O.L.dim, 0)), Z.F.zero_map(O.F))
    C, _ = cokernel_datum(zero)
    assert C.L.dim == O.L.dim and C.F.dims == O.F.dims


@given(data(ds=(1, 2), group_names=("C1", "C2", "C3")), st.integers(0, 1000), st.data())
@settings(max_examples=20)
def test_kernel_cokernel_rank_nullity(O1, seed, draw):
    O2 = draw.draw(data(ds=(O1.d,), group_names=(O1.group.name,), field=O1.field))
    basis = datum_hom_basis(O1, O2)
    if not basis:
        return
    rng = random.Random(seed)
    m = basis[0]
    for b in basis[1:]:
        c = O1.field.from_json(rng.randrange(O1.field.char) if O1.field.char else rng.randint(-2, 2))
        m = DatumMap(O1, O2, m.f + b.f.scale(c), m.g + b.g.scale(c))
    m.validate()
    K, inc = kernel_datum(m)
    C, pr = cokernel_datum(m)
    r = linalg.rank(m.f.matrix)
    assert K.L.dim + r == O1.L.dim and C.L.dim + r == O2.L.dim
    assert inc.f.matrix.cols == K.L.dim and (m.f.matrix @ inc.f.matrix).is_zero()
    assert (pr.f.matrix @ m.f.matrix).is_zero()
    assert K.is_valid() and C.is_valid()


# -- full faithfulness and lambda ------------------------------------------------------------

@given(data(ds=(1, 2), group_names=("C1", "C2", "C3"), max_dim=1), st.data())
@settings(max_examples=20)
def test_full_faithfulness(O1, draw):
    O2 = draw.draw(data(ds=(O1.d,), group_names=(O1.group.name,), field=O1.field, max_dim=1))
    assert datum_hom_dim(O1, O2) == homotopy_hom(B_d(O1), B_d(O2)).dimension


@given(data(ds=(1, 2), group_names=("C1", "C2", "C3"), max_dim=2))
@settings(max_examples=20)
def test_lambda(O):
    res = lambda_checks(lambda_d(O))
    assert res["ok"], res


def test_lambda_trivial_group_has_zero_complement():
    O = random_datum(trivial_module(C1, QQ, 2), 2, seed=0)
    R = lambda_d(O)
    assert lambda_checks(R)["ok"]
    assert R.lam.is_quasi_iso()
