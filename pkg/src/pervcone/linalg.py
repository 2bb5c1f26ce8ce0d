"""Row reduction and the derived subspace operations.

Two elimination routes give the same reduced row echelon form:

* a dense route for GF(p) through :mod:`pervcone._kernels` (numba or numpy);
* a sparse route working on row dictionaries, used for the rationals and
  for large sparse matrices over GF(p).

Everything else (kernels, images, cokernels, solving) is built on
:func:`rref`.
"""

from __future__ import annotations

import heapq
from fractions import Fraction

import numpy as np

from . import _kernels
from .field import Field
from .matrix import DimensionError, Matrix

# Dense route is taken for GF(p) matrices up to this many cells, or for
# larger ones whose density is at least DENSE_MIN_FILL.
DENSE_MAX_CELLS = 40_000
DENSE_MIN_FILL = 0.02
DENSE_HARD_LIMIT = 9_000_000


class InconsistentSystem(ValueError):
    """Raised by :func:`solve` when the system has no solution."""


def _sparse_echelon(rows, ncols: int, field: Field, limit: int | None = None):
    """Right-looking elimination on row dictionaries with Markowitz-style pivoting.

    The shortest remaining row is taken first, pivoting on its sparsest
    column among those ``< limit``.  Returns ``(order, rest)``: ``order``
    lists ``(pivot column, row)`` in elimination order, each row scaled to 1
    at its pivot and free of the pivot columns chosen before it; ``rest``
    holds the nonzero rows left with no eligible column.
    """
    p = field.char
    limit = ncols if limit is None else limit
    live = {}
    colrows: dict = {}
    for i, src in enumerate(rows):
        if src:
            live[i] = dict(src)
            for c in src:
                if c < limit:
                    colrows.setdefault(c, set()).add(i)
    version = {i: 0 for i in live}
    heap = [(len(r), i, 0) for i, r in live.items()]
    heapq.heapify(heap)
    order, rest = [], []
    while heap:
        _, i, ver = heapq.heappop(heap)
        r = live.get(i)
        if r is None or version[i] != ver:
            continue
        del live[i]
        eligible = [c for c in r if c < limit]
        for c in eligible:
            colrows[c].discard(i)
        if not eligible:
            rest.append(r)
            continue
        c = min(eligible, key=lambda k: (len(colrows[k]), k))
        a = r[c]
        if p:
            if a != 1:
                inv = pow(a, -1, p)
                r = {j: v * inv % p for j, v in r.items()}
        elif a != 1:
            r = {j: v / a for j, v in r.items()}
        others = colrows.pop(c)
        for k in others:
            rk = live[k]
            f = rk.pop(c)
            for j, v in r.items():
                if j == c:
                    continue
                w = rk.get(j)
                if w is None:
                    w = (-f * v) % p if p else -f * v
                    rk[j] = w
                    if j < limit:
                        colrows.setdefault(j, set()).add(k)
                else:
                    w = (w - f * v) % p if p else w - f * v
                    if w:
                        rk[j] = w
                    else:
                        del rk[j]
                        if j < limit:
                            colrows[j].discard(k)
            if not rk:
                del live[k]
                continue
            version[k] += 1
            heapq.heappush(heap, (len(rk), k, version[k]))
        order.append((c, r))
    return order, rest


def _sparse_rref(rows, ncols: int, field: Field, limit: int | None = None):
    """Fully reduced rows and their pivot columns (sorted), plus leftover rows."""
    order, rest = _sparse_echelon(rows, ncols, field, limit)
    p = field.char
    done = {}
    # back substitution in reverse elimination order
    for c, r in reversed(order):
        for c2 in [k for k in r if k != c and k in done]:
            f = r.pop(c2)
            for j, v in done[c2].items():
                if j == c2:
                    continue
                w = r.get(j, 0) - f * v
                if p:
                    w %= p
                if w:
                    r[j] = w
                else:
                    r.pop(j, None)
        done[c] = r
    piv = sorted(done)
    return [done[c] for c in piv], piv, rest


def _use_dense(m: Matrix) -> bool:
    if m.field.is_rational:
        return False
    cells = m.rows * m.cols
    if cells <= DENSE_MAX_CELLS:
        return True
    if cells > DENSE_HARD_LIMIT:
        return False
    return m.nnz() >= DENSE_MIN_FILL * cells


def rref(m: Matrix, method: str = "auto"):
    """Reduced row echelon form.

    Returns ``(R, pivots, rank)``; ``R`` has the same shape as ``m`` with
    zero rows at the bottom.
    """
    f = m.field
    if method == "auto":
        method = "dense" if _use_dense(m) else "sparse"
    if method == "dense":
        if f.is_rational:
            raise ValueError("the dense kernel handles GF(p) only")
        if m.rows == 0 or m.cols == 0:
            return Matrix.zeros(f, m.rows, m.cols), [], 0
        arr, piv = _kernels.rref_mod_p(m.to_numpy(), f.char)
        rows = []
        for i in range(len(piv)):
            row = arr[i]
            nz = np.nonzero(row)[0]
            rows.append({int(j): int(row[j]) for j in nz})
        rows.extend(dict() for _ in range(m.rows - len(piv)))
        return Matrix(f, m.rows, m.cols, rows, _trusted=True), list(piv), len(piv)
    if method != "sparse":
        raise ValueError(f"unknown elimination method {method!r}")
    rrows, piv, _ = _sparse_rref(m.row_dicts(), m.cols, f)
    rrows = rrows + [dict() for _ in range(m.rows - len(piv))]
    return Matrix(f, m.rows, m.cols, rrows, _trusted=True), piv, len(piv)


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if _use_dense(m):
        return _kernels.rank_mod_p(m.to_numpy(), m.field.char)
    return len(_sparse_echelon(m.row_dicts(), m.cols, m.field)[0])


def kernel_basis(m: Matrix) -> Matrix:
    """Matrix whose columns form a basis of the null space of ``m``."""
    return kernel_with_selector(m)[0]


def kernel_with_selector(m: Matrix):
    """Kernel basis ``K`` plus the row indices ``sel`` with ``K[sel, :] = I``.

    Coordinates of a kernel vector ``v`` in the basis ``K`` are ``v[sel]``.
    """
    f = m.field
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(f, n), list(range(n))
    R, piv, r = rref(m)
    pivset = set(piv)
    free = [j for j in range(n) if j not in pivset]
    one = f.one
    p = f.char
    rows = [dict() for _ in range(n)]
    fpos = {j: k for k, j in enumerate(free)}
    for k, j in enumerate(free):
        rows[j][k] = one
    for i, c in enumerate(piv):
        for j, v in R.row(i).items():
            if j in fpos:
                rows[c][fpos[j]] = (-v) % p if p else -v
    return Matrix(f, n, len(free), rows, _trusted=True), free


def selector(field: Field, sel, n: int) -> Matrix:
    """The ``len(sel) x n`` matrix picking coordinates ``sel``."""
    one = field.one
    return Matrix(field, len(sel), n, [{j: one} for j in sel], _trusted=True)


def cokernel_with_section(m: Matrix):
    """Projection ``P`` onto ``coker m`` and a linear section ``S`` (``P S = I``)."""
    K, sel = kernel_with_selector(m.T)
    P = K.T
    return P, selector(m.field, sel, m.rows).T


def image_basis(m: Matrix) -> Matrix:
    """Columns of ``m`` at the pivot positions: a basis of the column space."""
    if m.cols == 0 or m.rows == 0:
        return Matrix.zeros(m.field, m.rows, 0)
    _, piv, _ = rref(m)
    return m.submatrix(None, piv)


def row_space_basis(m: Matrix) -> Matrix:
    """Nonzero rows of the reduced row echelon form."""
    R, piv, r = rref(m)
    return R.submatrix(list(range(r)), None)


def cokernel_projection(m: Matrix) -> Matrix:
    """Surjection ``P`` with ``ker P = im m``; rows of ``P`` span the left kernel."""
    return kernel_basis(m.T).T


def solve(m: Matrix, b: Matrix) -> Matrix:
    """One solution ``X`` of ``m X = b`` (``b`` may have several columns)."""
    if m.rows != b.rows:
        raise DimensionError(f"solve: system has {m.rows} rows, right-hand side has {b.rows}")
    f = m.field
    aug_rows = []
    n = m.cols
    for ra, rb in zip(m.row_dicts(), b.row_dicts()):
        d = dict(ra)
        for j, v in rb.items():
            d[n + j] = v
        aug_rows.append(d)
    aug = Matrix(f, m.rows, n + b.cols, aug_rows, _trusted=True)
    if _use_dense(aug):
        R, piv, r = rref(aug)
        if piv and piv[-1] >= n:
            raise InconsistentSystem(f"right-hand side column {piv[-1] - n} is not in the image")
        rrows = [R.row(i) for i in range(r)]
    else:
        rrows, piv, rest = _sparse_rref(aug.row_dicts(), n + b.cols, f, limit=n)
        if rest:
            raise InconsistentSystem(f"right-hand side column {min(rest[0]) - n} is not in the image")
    out = [dict() for _ in range(n)]
    for row, c in zip(rrows, piv):
        for j, v in row.items():
            if j >= n:
                out[c][j - n] = v
    return Matrix(f, n, b.cols, out, _trusted=True)


def solve_or_none(m: Matrix, b: Matrix):
    try:
        return solve(m, b)
    except InconsistentSystem:
        return None


def solve_left(m: Matrix, b: Matrix) -> Matrix:
    """One solution ``X`` of ``X m = b``."""
    return solve(m.T, b.T).T


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise DimensionError(f"inverse of a non-square {m.rows}x{m.cols} matrix")
    try:
        return solve(m, Matrix.identity(m.field, m.rows))
    except InconsistentSystem:
        raise InconsistentSystem("matrix is singular") from None


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and rank(m) == m.rows


def right_inverse(m: Matrix) -> Matrix:
    """``X`` with ``m X = I``; ``m`` must be surjective."""
    return solve(m, Matrix.identity(m.field, m.rows))


def left_inverse(m: Matrix) -> Matrix:
    """``X`` with ``X m = I``; ``m`` must be injective."""
    return solve_left(m, Matrix.identity(m.field, m.cols))


def complement_basis(sub: Matrix, ambient_dim: int) -> Matrix:
    """Standard basis vectors completing the column span of ``sub``."""
    f = sub.field
    if sub.cols == 0:
        return Matrix.identity(f, ambient_dim)
    R, piv, r = rref(sub.T)
    pivset = set(piv)
    extra = [j for j in range(ambient_dim) if j not in pivset]
    one = f.one
    rows = [dict() for _ in range(ambient_dim)]
    for k, j in enumerate(extra):
        rows[j][k] = one
    return Matrix(f, ambient_dim, len(extra), rows, _trusted=True)


def intersect_columns(a: Matrix, b: Matrix) -> Matrix:
    """Basis of ``colspan(a) & colspan(b)`` as columns."""
    from .matrix import hstack
    if a.cols == 0 or b.cols == 0:
        return Matrix.zeros(a.field, a.rows, 0)
    k = kernel_basis(hstack(a.field, a.rows, [a, -b]))
    return image_basis(a @ k.submatrix(list(range(a.cols)), None))


def coordinates(basis: Matrix, vecs: Matrix) -> Matrix:
    """Coordinates of the columns of ``vecs`` in the column basis ``basis``."""
    return solve(basis, vecs)


def as_fraction(x) -> Fraction:
    return Fraction(x)
