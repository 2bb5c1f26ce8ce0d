"""Exact matrices over a :class:`~pervcone.field.Field`.

Storage is a list of row dictionaries ``{column: value}`` holding only the
nonzero entries.  Most matrices built by the library are block-structured
and very sparse (permutation blocks, evaluation maps), so this keeps both
memory and products proportional to the number of nonzeros.  Dense input
and output goes through nested lists or numpy arrays.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .field import Field


class DimensionError(ValueError):
    """Raised when operand shapes do not fit together."""


class Matrix:
    __slots__ = ("field", "rows", "cols", "_r", "_hash")

    def __init__(self, field: Field, rows: int, cols: int, row_dicts=None, _trusted=False):
        self.field = field
        self.rows = int(rows)
        self.cols = int(cols)
        self._hash = None
        if row_dicts is None:
            self._r = [dict() for _ in range(self.rows)]
        elif _trusted:
            self._r = row_dicts
        else:
            if len(row_dicts) != self.rows:
                raise DimensionError(f"expected {self.rows} rows, got {len(row_dicts)}")
            f = field
            out = []
            for rd in row_dicts:
                clean = {}
                for j, v in rd.items():
                    if not 0 <= j < self.cols:
                        raise DimensionError(f"column index {j} out of range for {self.cols} columns")
                    v = f(v)
                    if v:
                        clean[j] = v
                out.append(clean)
            self._r = out

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one = field.one
        return cls(field, n, n, [{i: one} for i in range(n)], _trusted=True)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        if cols is None:
            if n == 0:
                raise DimensionError("cannot infer column count of an empty row list")
            cols = len(rows[0])
        dicts = []
        for r in rows:
            if len(r) != cols:
                raise DimensionError(f"ragged row of length {len(r)}, expected {cols}")
            dicts.append({j: v for j, v in enumerate(r)})
        return cls(field, n, cols, dicts)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int) -> "Matrix":
        dicts = [dict() for _ in range(rows)]
        for j, c in enumerate(columns):
            if len(c) != rows:
                raise DimensionError(f"column {j} has length {len(c)}, expected {rows}")
            for i, v in enumerate(c):
                if v:
                    dicts[i][j] = v
        return cls(field, rows, len(columns), dicts)

    @classmethod
    def from_array(cls, field: Field, arr) -> "Matrix":
        arr = np.asarray(arr, dtype=object if field.is_rational else None)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-dimensional array")
        m, n = arr.shape
        dicts = []
        for i in range(m):
            row = arr[i]
            nz = np.nonzero(row)[0] if arr.dtype != object else [j for j in range(n) if row[j] != 0]
            dicts.append({int(j): row[j] for j in nz})
        return cls(field, m, n, dicts)

    @classmethod
    def from_entries(cls, field: Field, rows: int, cols: int, entries: Iterable) -> "Matrix":
        """Build from ``(i, j, value)`` triples; repeated positions are summed."""
        dicts = [dict() for _ in range(rows)]
        for i, j, v in entries:
            d = dicts[i]
            d[j] = d.get(j, 0) + v
        return cls(field, rows, cols, dicts)

    # -- access ---------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, i: int) -> dict:
        return self._r[i]

    def row_dicts(self):
        return self._r

    def __getitem__(self, ij):
        i, j = ij
        return self._r[i].get(j, self.field.zero)

    def nnz(self) -> int:
        return sum(len(r) for r in self._r)

    def to_list(self):
        z = self.field.zero
        out = []
        for r in self._r:
            row = [z] * self.cols
            for j, v in r.items():
                row[j] = v
            out.append(row)
        return out

    def to_numpy(self) -> np.ndarray:
        if self.field.is_rational:
            a = np.empty((self.rows, self.cols), dtype=object)
            a.fill(self.field.zero)
        else:
            a = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i, r in enumerate(self._r):
            for j, v in r.items():
                a[i, j] = v
        return a

    def column(self, j: int) -> list:
        z = self.field.zero
        return [r.get(j, z) for r in self._r]

    def columns(self) -> list:
        cols = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self._r):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return all(not r for r in self._r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape and self._r == other._r)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.shape, tuple(tuple(sorted(r.items())) for r in self._r)))
        return self._hash

    def __repr__(self):
        if self.rows * self.cols <= 64:
            body = "; ".join(" ".join(str(x) for x in row) for row in self.to_list())
            return f"Matrix<{self.field} {self.rows}x{self.cols}>[{body}]"
        return f"Matrix<{self.field} {self.rows}x{self.cols}, nnz={self.nnz()}>"

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other, op):
        if not isinstance(other, Matrix):
            raise TypeError(f"cannot {op} Matrix and {type(other).__name__}")
        if self.field != other.field:
            raise DimensionError(f"{op}: field mismatch {self.field} vs {other.field}")
        if self.shape != other.shape:
            raise DimensionError(f"{op}: shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other, "add")
        p = self.field.char
        out = []
        for a, b in zip(self._r, other._r):
            if not b:
                out.append(a)
                continue
            if not a:
                out.append(b)
                continue
            c = dict(a)
            for j, v in b.items():
                w = c.get(j, 0) + v
                if p:
                    w %= p
                if w:
                    c[j] = w
                else:
                    c.pop(j, None)
            out.append(c)
        return Matrix(self.field, self.rows, self.cols, out, _trusted=True)

    def __neg__(self):
        p = self.field.char
        if p:
            out = [{j: p - v for j, v in r.items()} for r in self._r]
        else:
            out = [{j: -v for j, v in r.items()} for r in self._r]
        return Matrix(self.field, self.rows, self.cols, out, _trusted=True)

    def __sub__(self, other):
        self._check_same(other, "subtract")
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        if not c:
            return Matrix.zeros(self.field, self.rows, self.cols)
        p = self.field.char
        if p:
            out = [{j: v * c % p for j, v in r.items()} for r in self._r]
        else:
            out = [{j: v * c for j, v in r.items()} for r in self._r]
        return Matrix(self.field, self.rows, self.cols, out, _trusted=True)

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field:
            raise DimensionError(f"compose: field mismatch {self.field} vs {other.field}")
        if self.cols != other.rows:
            raise DimensionError(
                f"compose: left operand is {self.rows}x{self.cols}, right operand is {other.rows}x{other.cols}")
        p = self.field.char
        if p and self._numpy_product_pays(other):
            # float64 BLAS is exact while every partial sum stays below 2^53
            c = np.fmod(self.to_numpy().astype(np.float64) @ other.to_numpy().astype(np.float64), p)
            return Matrix._from_int_array(self.field, c.astype(np.int64))
        B = other._r
        out = []
        for a in self._r:
            acc: dict = {}
            get = acc.get
            for k, av in a.items():
                bk = B[k]
                if not bk:
                    continue
                for j, bv in bk.items():
                    acc[j] = get(j, 0) + av * bv
            if p:
                acc = {j: v % p for j, v in acc.items() if v % p}
            else:
                acc = {j: v for j, v in acc.items() if v}
            out.append(acc)
        return Matrix(self.field, self.rows, other.cols, out, _trusted=True)

    def _numpy_product_pays(self, other) -> bool:
        """Dense BLAS product for GF(p) when the sparse loop would cost more."""
        work = self.rows * self.cols * other.cols
        if work < 100_000:
            return False
        if self.rows * self.cols + self.cols * other.cols + self.rows * other.cols > 40_000_000:
            return False
        p = self.field.char
        if (p - 1) ** 2 * self.cols >= 2 ** 53:
            return False
        na = self.nnz()
        if na * 8 < self.rows * self.cols:
            B = other._r
            sparse_work = sum(len(B[k]) for r in self._r for k in r)
        else:
            sparse_work = na * other.nnz() / max(other.rows, 1)
        # one python multiply-add costs roughly as much as a few hundred BLAS flops
        dense_cost = work / 300 + self.rows * other.cols / 4 + na + other.nnz()
        return sparse_work > dense_cost

    @classmethod
    def _from_int_array(cls, field: Field, a: np.ndarray) -> "Matrix":
        rows = []
        for row in a:
            idx = np.flatnonzero(row)
            rows.append(dict(zip(idx.tolist(), row[idx].tolist())))
        return cls(field, a.shape[0], a.shape[1], rows, _trusted=True)

    def apply(self, vec: Sequence) -> list:
        """Matrix-vector product with a dense vector."""
        if len(vec) != self.cols:
            raise DimensionError(f"vector of length {len(vec)} against {self.cols} columns")
        p = self.field.char
        out = []
        for r in self._r:
            s = sum(v * vec[j] for j, v in r.items())
            out.append(s % p if p else self.field(s))
        return out

    @property
    def T(self) -> "Matrix":
        cols = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self._r):
            for j, v in r.items():
                cols[j][i] = v
        return Matrix(self.field, self.cols, self.rows, cols, _trusted=True)

    # -- restructuring ----------------------------------------------------------
    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "Matrix":
        rsel = range(self.rows) if rows is None else rows
        src = [self._r[i] for i in rsel]
        if cols is None:
            return Matrix(self.field, len(src), self.cols, [dict(r) for r in src], _trusted=True)
        pos = {c: k for k, c in enumerate(cols)}
        out = [{pos[j]: v for j, v in r.items() if j in pos} for r in src]
        return Matrix(self.field, len(src), len(cols), out, _trusted=True)

    def permute_rows(self, perm: Sequence[int]) -> "Matrix":
        """Row ``perm[i]`` of the result is row ``i`` of ``self``."""
        out = [None] * self.rows
        for i, r in enumerate(self._r):
            out[perm[i]] = r
        return Matrix(self.field, self.rows, self.cols, out, _trusted=True)

    def permute_cols(self, perm: Sequence[int]) -> "Matrix":
        """Column ``perm[j]`` of the result is column ``j`` of ``self``."""
        out = [{perm[j]: v for j, v in r.items()} for r in self._r]
        return Matrix(self.field, self.rows, self.cols, out, _trusted=True)


# -- free functions ------------------------------------------------------------

def compose(*maps: Matrix) -> Matrix:
    """Composite ``maps[0] @ maps[1] @ ...`` (rightmost applied first)."""
    if not maps:
        raise DimensionError("compose needs at least one operand")
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = m @ out
    return out


def hstack(field: Field, rows: int, blocks: Sequence[Matrix]) -> Matrix:
    out = [dict() for _ in range(rows)]
    off = 0
    for b in blocks:
        if b.rows != rows:
            raise DimensionError(f"hstack: block has {b.rows} rows, expected {rows}")
        for i, r in enumerate(b._r):
            if r:
                d = out[i]
                for j, v in r.items():
                    d[j + off] = v
        off += b.cols
    return Matrix(field, rows, off, out, _trusted=True)


def vstack(field: Field, cols: int, blocks: Sequence[Matrix]) -> Matrix:
    out = []
    for b in blocks:
        if b.cols != cols:
            raise DimensionError(f"vstack: block has {b.cols} columns, expected {cols}")
        out.extend(dict(r) for r in b._r)
    return Matrix(field, len(out), cols, out, _trusted=True)


def block_matrix(field: Field, row_dims: Sequence[int], col_dims: Sequence[int], blocks) -> Matrix:
    """Assemble a block matrix.

    ``blocks`` is a nested sequence (or a dict keyed by ``(i, j)``); missing
    or ``None`` entries are zero blocks.
    """
    if not isinstance(blocks, dict):
        blocks = {(i, j): b for i, row in enumerate(blocks) for j, b in enumerate(row)}
    roff = [0]
    for n in row_dims:
        roff.append(roff[-1] + n)
    coff = [0]
    for n in col_dims:
        coff.append(coff[-1] + n)
    out = [dict() for _ in range(roff[-1])]
    p = field.char
    for (bi, bj), b in blocks.items():
        if b is None:
            continue
        if b.shape != (row_dims[bi], col_dims[bj]):
            raise DimensionError(
                f"block ({bi},{bj}) has shape {b.shape}, expected {(row_dims[bi], col_dims[bj])}")
        if b.field != field:
            raise DimensionError(f"block ({bi},{bj}) over {b.field}, expected {field}")
        r0, c0 = roff[bi], coff[bj]
        for i, r in enumerate(b._r):
            if r:
                d = out[r0 + i]
                for j, v in r.items():
                    k = j + c0
                    if k in d:
                        w = d[k] + v
                        if p:
                            w %= p
                        if w:
                            d[k] = w
                        else:
                            del d[k]
                    else:
                        d[k] = v
    return Matrix(field, roff[-1], coff[-1], out, _trusted=True)


def direct_sum(field: Field, *mats: Matrix) -> Matrix:
    return block_matrix(field, [m.rows for m in mats], [m.cols for m in mats],
                        {(i, i): m for i, m in enumerate(mats)})


def kron_identity(n: int, m: Matrix) -> Matrix:
    """``I_n (x) m``: ``n`` diagonal copies of ``m``."""
    out = []
    for k in range(n):
        off = k * m.cols
        out.extend({j + off: v for j, v in r.items()} for r in m._r)
    return Matrix(m.field, n * m.rows, n * m.cols, out, _trusted=True)


def kron(a: Matrix, b: Matrix) -> Matrix:
    if a.field != b.field:
        raise DimensionError("kron: field mismatch")
    p = a.field.char
    out = []
    for ra in a._r:
        for rb in b._r:
            d = {}
            for ja, va in ra.items():
                base = ja * b.cols
                for jb, vb in rb.items():
                    w = va * vb
                    if p:
                        w %= p
                    if w:
                        d[base + jb] = w
            out.append(d)
    return Matrix(a.field, a.rows * b.rows, a.cols * b.cols, out, _trusted=True)


def permutation_matrix(field: Field, perm: Sequence[int]) -> Matrix:
    """Matrix sending basis vector ``j`` to basis vector ``perm[j]``."""
    one = field.one
    n = len(perm)
    out = [dict() for _ in range(n)]
    for j, i in enumerate(perm):
        out[i][j] = one
    return Matrix(field, n, n, out, _trusted=True)


def column_vector(field: Field, values: Sequence) -> Matrix:
    return Matrix(field, len(values), 1, [{0: v} for v in values])
