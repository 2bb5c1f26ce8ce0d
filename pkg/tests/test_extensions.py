import pytest
from hypothesis import given, settings, strategies as st

from pervcone.adjunction import bar_cohomology_dims
from pervcone.extensions import (QuiverDatum, QuiverError, extension_cohomology_table, extension_maps,
                                 intersection_complex, p_direct_image, p_extension_by_zero, quiver_decode,
                                 quiver_encode, quiver_roundtrip, splitting_check)
from pervcone.field import GF, QQ
from pervcone.groups import cyclic_group, trivial_module
from pervcone.matrix import Matrix
from pervcone.perverse import B_d, DatumError, is_perverse, random_datum

from _strategies import data, modules

C1, C2 = cyclic_group(1), cyclic_group(2)


def test_pstar_trivial_group():
    K = B_d(p_direct_image(trivial_module(C1, GF(3), 2), 2))
    assert K.cohomology_dims(0) == (2, 2)
    assert K.cohomology_dims(1) == K.cohomology_dims(2) == (0, 0)


def test_pstar_c2_vertex_cohomology():
    L = trivial_module(C2, GF(2), 1)
    K = B_d(p_direct_image(L, 2))
    assert [K.cohomology_dims(n)[1] for n in range(3)] == bar_cohomology_dims(L, 2) == [1, 1, 1]
    assert is_perverse(K, 2)


def test_pshriek_d1_trivial_group():
    L = trivial_module(C1, QQ, 2)
    O = p_extension_by_zero(L, 1)
    assert O.F.dims == (0, 2)
    K = B_d(O)
    assert K.cohomology_dims(0) == (2, 0) and K.cohomology_dims(1) == (0, 0)


def test_pshriek_d2_c2_dims():
    # coker of j_* g^0 for trivial L over C2: V = Q^2 L modulo the image of g^0, W likewise
    O = p_extension_by_zero(trivial_module(C2, QQ, 1), 2)
    assert O.F.V.dim == 1 and O.F.W_dim == 1
    assert O.F.dims == B_d(O).term(2).dims


def test_ic_trivial_group_and_degree_d():
    K = B_d(intersection_complex(trivial_module(C1, GF(2), 1), 1))
    assert K.cohomology_dims(0) == (1, 1) and K.cohomology_dims(1) == (0, 0)
    for d in (1, 2, 3):
        assert B_d(intersection_complex(trivial_module(C2, GF(2), 1), d)).cohomology_dims(d)[1] == 0


def test_bad_perversity():
    with pytest.raises(DatumError):
        p_direct_image(trivial_module(C2, QQ, 1), 0)


@given(modules(max_dim=2, group_names=["C1", "C2", "C3", "C4"]), st.sampled_from([1, 2, 3]))
@settings(max_examples=20)
def test_cohomology_against_R_j_star(L, d):
    table = extension_cohomology_table(L, d)
    for name in ("pstar", "ic", "pshriek"):
        assert table[name]["ok"], (name, table[name])


@given(modules(max_dim=1, group_names=["S3"]), st.sampled_from([1, 2]))
@settings(max_examples=8)
def test_cohomology_against_R_j_star_s3(L, d):
    table = extension_cohomology_table(L, d)
    assert all(table[k]["ok"] for k in ("pstar", "ic", "pshriek"))


@given(modules(max_dim=2, group_names=["C1", "C2", "C3", "S3"]), st.sampled_from([1, 2]))
@settings(max_examples=20)
def test_models_perverse_and_factorization(L, d):
    E = extension_maps(L, d)
    for O in (E.shriek, E.ic, E.star):
        assert is_perverse(B_d(O), d)
    assert E.factorization_ok()


# -- quivers ---------------------------------------------------------------------------

def test_quiver_trivial_group():
    O = random_datum(trivial_module(C1, QQ, 2), 1, seed=0, extra_vertex=1)
    Q = quiver_encode(O)
    assert Q.is_valid() and all(v.is_zero() for v in Q.v)


@given(data(ds=(1,), group_names=("C1", "C2", "C3", "C4", "S3")), st.integers(0, 50))
@settings(max_examples=30)
def test_quiver_encode_conditions_and_roundtrip(O, seed):
    Q = quiver_encode(O)
    Q.validate()
    eye = Matrix.identity(O.field, O.L.dim)
    for s in O.group.elements:
        assert eye + Q.v[s] @ Q.u == O.L.action[s]
    assert quiver_roundtrip(O, seed) is not None


@given(data(ds=(1,), group_names=("C2",)))
@settings(max_examples=10)
def test_quiver_c2_relation(O):
    Q = quiver_encode(O)
    t = 1
    assert (Q.v[t] @ Q.u @ Q.v[t] + Q.v[t].scale(O.field.from_json(2))).is_zero()


def test_quiver_violation_has_witness():
    O = random_datum(trivial_module(C2, GF(3), 1), 1, seed=1, extra_vertex=1)
    Q = quiver_encode(O)
    if Q.M_dim == 0:
        pytest.skip("no vertex part")
    bad = QuiverDatum(Q.E, Q.M_dim, Q.u, [Q.v[0], Q.v[1] + Matrix.identity(GF(3), 1) @ Matrix.from_rows(
        GF(3), [[1] * Q.M_dim])])
    with pytest.raises(QuiverError) as e:
        bad.validate()
    assert e.value.witness is not None
    with pytest.raises(DatumError):
        quiver_encode(random_datum(trivial_module(C2, GF(3), 1), 2, seed=0))


def test_decode_rejects_invalid_quiver():
    E = trivial_module(C2, QQ, 1)
    Q = QuiverDatum(E, 1, Matrix.from_rows(QQ, [[1]]), [Matrix.zeros(QQ, 1, 1), Matrix.from_rows(QQ, [[1]])])
    with pytest.raises(QuiverError):
        quiver_decode(Q)


# -- splitting for trivial H -------------------------------------------------------------------

def test_splitting_pstar_has_no_top_part():
    S = splitting_check(B_d(p_direct_image(trivial_module(C1, QQ, 2), 2)), 2)
    assert S.ok and S.hd.dims == (0, 0) and S.h0.dims == (2, 2)


def test_splitting_vertex_only():
    O = random_datum(trivial_module(C1, GF(5), 1), 2, seed=4, extra_vertex=2)
    S = splitting_check(B_d(O), 2)
    assert S.ok and S.h0.V.dim == 1


@given(data(ds=(1, 2, 3), group_names=("C1",), max_dim=3))
@settings(max_examples=40)
def test_splitting_always_found(O):
    S = splitting_check(B_d(O), O.d)
    assert S.ok
    assert S.chain_map.is_chain_map() and S.chain_map.is_quasi_iso()
