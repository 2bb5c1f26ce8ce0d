from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pervcone import _kernels, linalg
from pervcone.field import GF, QQ, Field, FieldError
from pervcone.matrix import DimensionError, Matrix, block_matrix, compose, direct_sum

from _strategies import matrices


def M(f, rows):
    return Matrix.from_rows(f, rows)


class TestFixedValues:
    def test_identity_rref(self):
        R, piv, r = linalg.rref(Matrix.identity(GF(2), 2))
        assert R == Matrix.identity(GF(2), 2) and piv == [0, 1] and r == 2

    def test_zero_rref(self):
        Z = Matrix.zeros(GF(3), 3, 4)
        R, piv, r = linalg.rref(Z)
        assert R == Z and piv == [] and r == 0

    def test_rational_rank_one(self):
        R, piv, r = linalg.rref(M(QQ, [[1, 2], [2, 4]]))
        assert R == M(QQ, [[1, 2], [0, 0]]) and piv == [0] and r == 1

    def test_kernel_of_identity_is_empty(self):
        assert linalg.kernel_basis(Matrix.identity(QQ, 4)).cols == 0

    def test_kernel_of_ones_row_gf2(self):
        K = linalg.kernel_basis(M(GF(2), [[1, 1]]))
        assert K.shape == (2, 1) and K.to_list() == [[1], [1]]

    def test_scalar_solve(self):
        x = linalg.solve(M(QQ, [[2]]), M(QQ, [[1]]))
        assert x.to_list() == [[Fraction(1, 2)]]

    def test_inconsistent_solve(self):
        with pytest.raises(linalg.InconsistentSystem):
            linalg.solve(M(GF(5), [[1, 1], [1, 1]]), M(GF(5), [[0], [1]]))

    def test_dimension_mismatch_names_operands(self):
        with pytest.raises(DimensionError, match="2x3.*2x2"):
            Matrix.zeros(GF(2), 2, 3) @ Matrix.zeros(GF(2), 2, 2)

    def test_canonical_entries(self):
        m = M(GF(5), [[7, -1]])
        assert m.to_list() == [[2, 4]]
        q = M(QQ, [[Fraction(2, -4)]])
        assert q[0, 0] == Fraction(-1, 2)

    def test_field_must_be_prime(self):
        with pytest.raises(FieldError):
            Field(4)

    def test_block_and_direct_sum(self):
        f = GF(3)
        a, b = M(f, [[1]]), M(f, [[2, 1]])
        assert direct_sum(f, a, b).to_list() == [[1, 0, 0], [0, 2, 1]]
        blk = block_matrix(f, [1, 1], [1, 2], {(0, 0): a, (1, 1): b})
        assert blk.to_list() == [[1, 0, 0], [0, 2, 1]]
        assert compose(a, a, a) == a


class TestProperties:
    @given(matrices())
    def test_rank_nullity(self, m):
        assert linalg.rank(m) + linalg.kernel_basis(m).cols == m.cols

    @given(matrices())
    def test_kernel_is_killed(self, m):
        assert (m @ linalg.kernel_basis(m)).is_zero()

    @given(matrices())
    def test_cokernel_projection(self, m):
        P = linalg.cokernel_projection(m)
        assert (P @ m).is_zero()
        assert linalg.rank(P) == m.rows - linalg.rank(m)

    @given(matrices())
    def test_rref_idempotent(self, m):
        R, piv, r = linalg.rref(m)
        R2, piv2, r2 = linalg.rref(R)
        assert R2 == R and piv2 == piv and r2 == r

    @given(matrices())
    def test_image_basis_spans(self, m):
        I = linalg.image_basis(m)
        assert I.cols == linalg.rank(m)
        if m.cols:
            assert linalg.solve_or_none(I, m) is not None

    @given(matrices(max_rows=5, max_cols=5), st.data())
    def test_solve_returns_a_solution(self, m, data):
        x0 = data.draw(matrices(field=m.field, rows=m.cols, cols=2))
        b = m @ x0
        x = linalg.solve(m, b)
        assert m @ x == b

    @given(matrices(max_rows=5, max_cols=5))
    def test_dense_and_sparse_agree(self, m):
        if not m.field.char:
            return
        assert linalg.rref(m, "dense") == linalg.rref(m, "sparse")

    @given(matrices(max_rows=5, max_cols=5), st.data())
    def test_product_routes_agree(self, a, data):
        b = data.draw(matrices(field=a.field, rows=a.cols, max_cols=5))
        A, B = a.to_list(), b.to_list()
        expect = [[sum((A[i][k] * B[k][j] for k in range(a.cols)), a.field.zero) for j in range(b.cols)]
                  for i in range(a.rows)]
        assert (a @ b).to_list() == [[a.field(v) for v in r] for r in expect]


@pytest.mark.parametrize("p", [2, 3, 5, 101, 65521])
def test_numba_kernel_matches_numpy(p):
    rng = np.random.default_rng(p)
    for shape in [(1, 1), (7, 9), (40, 30), (60, 80)]:
        a = rng.integers(0, p, size=shape, dtype=np.int64)
        a[:, ::3] = (a[:, ::3] * (rng.random(shape[0]) < 0.5)[:, None]) % p
        r1, piv1 = _kernels.rref_mod_p(a.copy(), p)
        r2, piv2 = _kernels.rref_mod_p_numpy(a.copy(), p)
        assert list(piv1) == list(piv2)
        assert np.array_equal(np.asarray(r1) % p, np.asarray(r2) % p)
        assert _kernels.rank_mod_p(a.copy(), p) == _kernels.rank_mod_p_numpy(a.copy(), p) == len(piv2)


def test_large_dense_product_is_exact():
    rng = np.random.default_rng(0)
    f = GF(7)
    a = Matrix._from_int_array(f, rng.integers(0, 7, size=(120, 150)))
    b = Matrix._from_int_array(f, rng.integers(0, 7, size=(150, 90)))
    expect = (a.to_numpy() @ b.to_numpy()) % 7
    assert np.array_equal((a @ b).to_numpy(), expect)
