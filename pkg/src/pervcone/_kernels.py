"""Dense GF(p) row reduction kernels.

The numba-compiled kernel is used by default.  Setting the environment
variable ``PERVCONE_DISABLE_NUMBA=1`` (or running without numba installed)
selects the pure-numpy implementation instead.  Both return identical
results; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PERVCONE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False


def rref_mod_p_numpy(a: np.ndarray, p: int):
    """Reduced row echelon form of ``a`` over GF(p), vectorised with numpy.

    Returns ``(r, pivots)`` where ``r`` is a fresh int64 array.
    """
    r = np.array(a, dtype=np.int64, copy=True) % p
    m, n = r.shape
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), -1, p)
        r[row] = (r[row] * inv) % p
        factors = r[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            r[hit] = (r[hit] - np.outer(factors[hit], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank_mod_p_numpy(a: np.ndarray, p: int) -> int:
    """Rank over GF(p) by forward elimination (numpy)."""
    r = np.array(a, dtype=np.int64, copy=True) % p
    m, n = r.shape
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), -1, p)
        r[row] = (r[row] * inv) % p
        below = r[row + 1:, col]
        hit = np.nonzero(below)[0] + row + 1
        if hit.size:
            r[hit] = (r[hit] - np.outer(r[hit, col], r[row])) % p
        row += 1
    return row


def _tables(p: int):
    """``mul[a, b] = a b`` and ``sub[a, b] = a - b`` mod p, as uint8 tables."""
    x = np.arange(p, dtype=np.int64)
    mul = (np.outer(x, x) % p).astype(np.uint8)
    sub = ((x[:, None] - x[None, :]) % p).astype(np.uint8)
    inv = np.zeros(p, dtype=np.uint8)
    for k in range(1, p):
        inv[k] = pow(k, -1, p)
    return mul, sub, inv


if HAS_NUMBA:

    @njit(cache=True)
    def _elim_small(r, mul, sub, inv, full):
        # uint8 entries, table arithmetic; full=True gives the reduced form
        m, n = r.shape
        pivots = np.empty(min(m, n), dtype=np.int64)
        npiv = 0
        row = 0
        for col in range(n):
            if row >= m:
                break
            piv = -1
            for i in range(row, m):
                if r[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != row:
                for j in range(n):
                    t = r[row, j]
                    r[row, j] = r[piv, j]
                    r[piv, j] = t
            a = inv[r[row, col]]
            for j in range(col, n):
                r[row, j] = mul[a, r[row, j]]
            start = 0 if full else row + 1
            for i in range(start, m):
                if i != row:
                    f = r[i, col]
                    if f != 0:
                        mf = mul[f]
                        for j in range(col, n):
                            x = r[row, j]
                            if x != 0:
                                r[i, j] = sub[r[i, j], mf[x]]
            pivots[npiv] = col
            npiv += 1
            row += 1
        return pivots[:npiv]

    @njit(cache=True)
    def _elim_generic(r, p, full):
        m, n = r.shape
        pivots = np.empty(min(m, n), dtype=np.int64)
        npiv = 0
        row = 0
        for col in range(n):
            if row >= m:
                break
            piv = -1
            for i in range(row, m):
                if r[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != row:
                for j in range(n):
                    t = r[row, j]
                    r[row, j] = r[piv, j]
                    r[piv, j] = t
            # modular inverse by Fermat
            a = r[row, col]
            inv = 1
            e = p - 2
            b = a
            while e > 0:
                if e & 1:
                    inv = (inv * b) % p
                b = (b * b) % p
                e >>= 1
            for j in range(col, n):
                r[row, j] = (r[row, j] * inv) % p
            start = 0 if full else row + 1
            for i in range(start, m):
                if i != row:
                    f = r[i, col]
                    if f != 0:
                        for j in range(col, n):
                            x = r[row, j]
                            if x != 0:
                                r[i, j] = (r[i, j] - f * x) % p
            pivots[npiv] = col
            npiv += 1
            row += 1
        return pivots[:npiv]

    def _run(a: np.ndarray, p: int, full: bool):
        if p < 256:
            r = (np.asarray(a, dtype=np.int64) % p).astype(np.uint8)
            mul, sub, inv = _tables(p)
            piv = _elim_small(r, mul, sub, inv, full)
        else:
            r = np.array(a, dtype=np.int64, copy=True) % p
            piv = _elim_generic(r, np.int64(p), full)
        return r.astype(np.int64), [int(c) for c in piv]

    def rref_mod_p_numba(a: np.ndarray, p: int):
        return _run(a, p, True)

    def rank_mod_p_numba(a: np.ndarray, p: int) -> int:
        return len(_run(a, p, False)[1])

    rref_mod_p = rref_mod_p_numba
    rank_mod_p = rank_mod_p_numba
else:  # pragma: no cover
    rref_mod_p_numba = None
    rank_mod_p_numba = None
    rref_mod_p = rref_mod_p_numpy
    rank_mod_p = rank_mod_p_numpy


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"
