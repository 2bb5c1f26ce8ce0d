"""Bounded cochain complexes over modules or cone sheaves.

Cone convention, used everywhere: for ``f: U -> V``,
``cone(f)^n = U^{n+1} + V^n`` with ``d(u, v) = (-d_U u, d_V v - f u)``.
Shift: ``K[k]^n = K^{n+k}`` with differential ``(-1)^k d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import linalg
from .category import ModuleCategory, SheafCategory, category_of, subquotient_layer
from .matrix import Matrix, hstack


class ComplexError(ValueError):
    pass


class BoundedComplex:
    """Terms ``terms[i]`` sit in degree ``lo + i``; ``diffs[i]: terms[i] -> terms[i+1]``."""

    def __init__(self, cat, lo: int, terms, diffs, check: bool = False):
        terms = list(terms)
        diffs = list(diffs)
        if terms and len(diffs) != len(terms) - 1:
            raise ComplexError(f"{len(terms)} terms need {len(terms) - 1} differentials, got {len(diffs)}")
        self.cat = cat
        self.lo = int(lo)
        self.terms = terms
        self.diffs = diffs
        if check:
            self.check()

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def term(self, n: int):
        if self.lo <= n <= self.hi:
            return self.terms[n - self.lo]
        return self.cat.zero()

    def diff(self, n: int):
        """Differential ``K^n -> K^{n+1}``."""
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return self.cat.zero_map(self.term(n), self.term(n + 1))

    def check(self) -> None:
        for n in range(self.lo, self.hi):
            d = self.diff(n)
            self.cat.check_map(d)
            if d.source is not self.term(n) and self.cat.dims(d.source) != self.cat.dims(self.term(n)):
                raise ComplexError(f"differential in degree {n} has the wrong source")
        for n in range(self.lo, self.hi - 1):
            if not (self.diff(n + 1) @ self.diff(n)).is_zero():
                raise ComplexError(f"d^{n + 1} o d^{n} is not zero")

    def is_complex(self) -> bool:
        try:
            self.check()
        except Exception:
            return False
        return True

    def dims(self) -> dict:
        return {n: self.cat.dims(self.term(n)) for n in self.degrees}

    # -- cohomology ------------------------------------------------------
    def _layer_mats(self, n):
        din = self.cat.mats(self.diff(n - 1))
        dout = self.cat.mats(self.diff(n))
        return din, dout

    def cohomology_layers(self, n: int):
        din, dout = self._layer_mats(n)
        return [subquotient_layer(a, b) for a, b in zip(din, dout)]

    def cohomology(self, n: int):
        """``(h, rep, proj)``: the object ``h^n`` and per-layer witness matrices."""
        comps = self.cohomology_layers(n)
        h = self.cat.subquotient(self.term(n), comps)
        return h, [c[0] for c in comps], [c[1] for c in comps]

    def layer_rank(self, n: int, layer: int) -> int:
        """Rank of layer ``layer`` of ``d^n``, cached (complexes are not mutated after use)."""
        cache = self.__dict__.setdefault("_ranks", {})
        key = (n, layer)
        if key not in cache:
            cache[key] = linalg.rank(self.cat.mats(self.diff(n))[layer])
        return cache[key]

    def cohomology_dims(self, n: int) -> tuple:
        dims = self.cat.dims(self.term(n))
        return tuple(dims[k] - self.layer_rank(n, k) - self.layer_rank(n - 1, k)
                     for k in range(self.cat.layers))

    def all_cohomology_dims(self) -> dict:
        return {n: self.cohomology_dims(n) for n in self.degrees}

    def is_exact(self) -> bool:
        return all(not any(self.cohomology_dims(n)) for n in self.degrees)

    def concentrated_in(self, lo: int, hi: int) -> bool:
        return all(not any(self.cohomology_dims(n)) for n in self.degrees if n < lo or n > hi)

    # -- constructions ------------------------------------------------------
    def shift(self, k: int) -> "BoundedComplex":
        diffs = self.diffs if k % 2 == 0 else [-d for d in self.diffs]
        return BoundedComplex(self.cat, self.lo - k, self.terms, diffs)

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {n: self.cat.identity(self.term(n)) for n in self.degrees})

    def restrict_open(self) -> "BoundedComplex":
        """Apply ``j^*`` termwise (sheaf complexes only)."""
        if not isinstance(self.cat, SheafCategory):
            raise ComplexError("restriction to the open stratum needs a complex of sheaves")
        mc = ModuleCategory(self.cat.group, self.cat.field)
        return BoundedComplex(mc, self.lo, [t.V for t in self.terms], [d.V_map for d in self.diffs])

    def vertex_layer(self):
        """The complex of vertex fibres ``i^*K`` as ``(dims, matrices)``."""
        if not isinstance(self.cat, SheafCategory):
            raise ComplexError("vertex fibres need a complex of sheaves")
        return [t.W_dim for t in self.terms], [d.phi_W for d in self.diffs]

    def __repr__(self):
        return f"BoundedComplex[{self.lo},{self.hi}]({', '.join(str(self.cat.dims(t)) for t in self.terms)})"


def single(obj, degree: int = 0) -> BoundedComplex:
    return BoundedComplex(category_of(obj), degree, [obj], [])


def from_maps(lo: int, maps) -> BoundedComplex:
    """Complex with consecutive differentials ``maps`` starting in degree ``lo``."""
    maps = list(maps)
    if not maps:
        raise ComplexError("need at least one map; use single() for one term")
    cat = category_of(maps[0].source)
    terms = [maps[0].source] + [m.target for m in maps]
    return BoundedComplex(cat, lo, terms, maps)


class ChainMap:
    """Components ``comps[n]: source^n -> target^n``; missing degrees are zero."""

    def __init__(self, source: BoundedComplex, target: BoundedComplex, comps: dict, check: bool = False):
        self.source = source
        self.target = target
        self.comps = dict(comps)
        if check:
            self.check()

    @property
    def cat(self):
        return self.source.cat

    def comp(self, n: int):
        c = self.comps.get(n)
        if c is None:
            return self.cat.zero_map(self.source.term(n), self.target.term(n))
        return c

    def degrees(self):
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)

    def check(self) -> None:
        for n in self.degrees():
            c = self.comp(n)
            self.cat.check_map(c)
            lhs = self.target.diff(n) @ c
            rhs = self.comp(n + 1) @ self.source.diff(n)
            if any(a != b for a, b in zip(self.cat.mats(lhs), self.cat.mats(rhs))):
                raise ComplexError(f"chain map does not commute with differentials in degree {n}")

    def is_chain_map(self) -> bool:
        try:
            self.check()
        except Exception:
            return False
        return True

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.comps) & set(other.comps)
        return ChainMap(other.source, self.target, {n: self.comps[n] @ other.comps[n] for n in degs})

    def __add__(self, other):
        out = {}
        for n in set(self.comps) | set(other.comps):
            out[n] = self.comp(n) + other.comp(n)
        return ChainMap(self.source, self.target, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ChainMap(self.source, self.target, {n: -c for n, c in self.comps.items()})

    def induced(self, n: int) -> list:
        """Per-layer matrices of the map on ``h^n``."""
        src = self.source.cohomology_layers(n)
        tgt = self.target.cohomology_layers(n)
        mats = self.cat.mats(self.comp(n))
        return [pt @ m @ rs for (rs, _), (_, pt), m in zip(src, tgt, mats)]

    def is_quasi_iso(self) -> bool:
        for n in self.degrees():
            for m in self.induced(n):
                if m.rows != m.cols or linalg.rank(m) != m.rows:
                    return False
        return True

    def shift(self, k: int) -> "ChainMap":
        return ChainMap(self.source.shift(k), self.target.shift(k),
                        {n - k: c for n, c in self.comps.items()})


# -- cones -------------------------------------------------------------------------

@dataclass
class Cone:
    complex: BoundedComplex
    inclusion: ChainMap          # target -> cone
    projection: ChainMap         # cone -> source[1]


def cone(f: ChainMap) -> Cone:
    U, V = f.source, f.target
    cat = U.cat
    lo = min(U.lo - 1, V.lo)
    hi = max(U.hi - 1, V.hi)
    terms, diffs = [], []
    for n in range(lo, hi + 1):
        terms.append(cat.direct_sum([U.term(n + 1), V.term(n)]))
    for n in range(lo, hi):
        blocks = {(0, 0): -U.diff(n + 1), (1, 0): -f.comp(n + 1), (1, 1): V.diff(n)}
        diffs.append(cat.block([U.term(n + 2), V.term(n + 1)], [U.term(n + 1), V.term(n)], blocks))
    C = BoundedComplex(cat, lo, terms, diffs)
    # rebase the differentials on the exact term objects
    C.diffs = [cat.make_map(C.terms[i], C.terms[i + 1], cat.mats(d)) for i, d in enumerate(C.diffs)]
    inc, proj = {}, {}
    U1 = U.shift(1)
    for n in range(lo, hi + 1):
        a, b = U.term(n + 1), V.term(n)
        inc[n] = cat.make_map(b, C.term(n), cat.mats(cat.block([a, b], [b], {(1, 0): cat.identity(b)})))
        proj[n] = cat.make_map(C.term(n), a, cat.mats(cat.block([a], [a, b], {(0, 0): cat.identity(a)})))
    return Cone(C, ChainMap(V, C, inc), ChainMap(C, U1, proj))


# -- truncations -------------------------------------------------------------------

def tau_leq(K: BoundedComplex, n: int):
    """Canonical truncation ``tau_{<=n}`` with its inclusion into ``K``.

    Degree ``n`` becomes ``ker d^n``; higher degrees vanish.
    """
    cat = K.cat
    if n >= K.hi:
        return K, K.identity()
    if n < K.lo:
        Z = BoundedComplex(cat, K.lo, [cat.zero()], [])
        return Z, ChainMap(Z, K, {})
    Zn, inc = _kernel_object(cat, K.diff(n))
    terms = [K.term(m) for m in range(K.lo, n)] + [Zn]
    diffs = [K.diff(m) for m in range(K.lo, n - 1)]
    if n > K.lo:
        last = K.diff(n - 1)
        # corestrict d^{n-1} into the kernel of d^n
        sel = [linalg.selector(cat.field, s, dim) for s, dim in zip(inc[1], cat.dims(K.term(n)))]
        mats = [sl @ m for sl, m in zip(sel, cat.mats(last))]
        diffs.append(cat.make_map(K.term(n - 1), Zn, mats))
    T = BoundedComplex(cat, K.lo, terms, diffs)
    comps = {m: cat.identity(K.term(m)) for m in range(K.lo, n)}
    comps[n] = inc[0]
    return T, ChainMap(T, K, comps)


def tau_geq(K: BoundedComplex, n: int):
    """Canonical truncation ``tau_{>=n}`` with the projection from ``K``.

    Degree ``n`` becomes ``coker d^{n-1}``; lower degrees vanish.
    """
    cat = K.cat
    if n <= K.lo:
        return K, K.identity()
    if n > K.hi:
        Z = BoundedComplex(cat, K.hi, [cat.zero()], [])
        return Z, ChainMap(K, Z, {})
    Cn, proj, sections = _cokernel_object(cat, K.diff(n - 1))
    terms = [Cn] + [K.term(m) for m in range(n + 1, K.hi + 1)]
    diffs = []
    if n < K.hi:
        mats = [m @ s for m, s in zip(cat.mats(K.diff(n)), sections)]
        diffs.append(cat.make_map(Cn, K.term(n + 1), mats))
    diffs += [K.diff(m) for m in range(n + 1, K.hi)]
    T = BoundedComplex(cat, n, terms, diffs)
    comps = {m: cat.identity(K.term(m)) for m in range(n + 1, K.hi + 1)}
    comps[n] = proj
    return T, ChainMap(K, T, comps)


def _kernel_object(cat, d):
    """Kernel object of a morphism, its inclusion, and the coordinate selectors."""
    src = d.source
    comps, sels = [], []
    for m, dim in zip(cat.mats(d), cat.dims(src)):
        K, sel = linalg.kernel_with_selector(m)
        comps.append((K, linalg.selector(cat.field, sel, dim)))
        sels.append(sel)
    obj = cat.subquotient(src, comps)
    inc = cat.make_map(obj, src, [K for K, _ in comps])
    return obj, (inc, sels)


def _cokernel_object(cat, d):
    tgt = d.target
    comps, projs, secs = [], [], []
    for m in cat.mats(d):
        P, S = linalg.cokernel_with_section(m)
        comps.append((S, P))
        projs.append(P)
        secs.append(S)
    obj = cat.subquotient(tgt, comps)
    proj = cat.make_map(tgt, obj, projs)
    return obj, proj, secs


# -- Hom spaces and homotopy classes ------------------------------------------------

def hom_basis(A, B) -> list:
    """Basis of ``Hom(A, B)`` in the category of ``A`` (list of morphisms)."""
    from .groups import HModule, HModuleMap, hom_basis as module_hom_basis
    from .sheaves import ConeSheaf, SheafMap
    if isinstance(A, HModule):
        return [HModuleMap(A, B, X) for X in module_hom_basis(A, B)]
    f = A.field
    hv = module_hom_basis(A.V, B.V)
    nv = len(hv)
    wa, wb = A.W_dim, B.W_dim
    n = nv + wa * wb
    if n == 0:
        return []
    # unknowns: coefficients c_k of hv, then X_W (wb x wa) row-major
    # constraint: B.s @ X_W - sum c_k hv[k] @ A.s = 0   (B.V.dim x wa)
    rows = []
    cols_by_k = [(X @ A.s) for X in hv]
    sB = B.s.row_dicts()
    p = f.char
    for i in range(B.V.dim):
        for j in range(wa):
            eq = {}
            for l, v in sB[i].items():
                eq[nv + l * wa + j] = v
            for k, M in enumerate(cols_by_k):
                v = M.row(i).get(j)
                if v:
                    eq[k] = eq.get(k, 0) - v
            if p:
                eq = {c: w % p for c, w in eq.items() if w % p}
            else:
                eq = {c: w for c, w in eq.items() if w}
            if eq:
                rows.append(eq)
    K = linalg.kernel_basis(Matrix(f, len(rows), n, rows, _trusted=True)) if rows else Matrix.identity(f, n)
    out = []
    for col in K.columns():
        XV = Matrix.zeros(f, B.V.dim, A.V.dim)
        for k in range(nv):
            c = col.get(k)
            if c:
                XV = XV + hv[k].scale(c)
        xw = [dict() for _ in range(wb)]
        for idx, v in col.items():
            if idx >= nv:
                t = idx - nv
                xw[t // wa][t % wa] = v
        out.append(SheafMap(A, B, XV, Matrix(f, wb, wa, xw, _trusted=True)))
    return out


def _flatten(cat, maps_by_slot, slots):
    """Flatten a family of morphisms into one sparse vector over the ambient slot layout."""
    vec = {}
    for key, m in maps_by_slot.items():
        off, shapes = slots[key]
        for layer, M in enumerate(cat.mats(m)):
            base, (r, c) = shapes[layer]
            for i, row in enumerate(M.row_dicts()):
                for j, v in row.items():
                    vec[off + base + i * c + j] = v
    return vec


def _slot_layout(cat, K1, K2, shift):
    """Ambient coordinates for ``prod_p Hom(K1^p, K2^{p+shift})``."""
    slots, off = {}, 0
    for p in K1.degrees:
        a, b = K1.term(p), K2.term(p + shift)
        shapes, base = [], 0
        for da, db in zip(cat.dims(a), cat.dims(b)):
            shapes.append((base, (db, da)))
            base += da * db
        slots[p] = (off, shapes)
        off += base
    return slots, off


@dataclass
class HomotopyHom:
    dimension: int
    representatives: list = dc_field(default_factory=list)


def homotopy_hom(K1: BoundedComplex, K2: BoundedComplex, representatives: bool = False) -> HomotopyHom:
    """Chain maps ``K1 -> K2`` modulo null-homotopic ones."""
    cat = K1.cat
    f = cat.field
    # parametrised bases of Hom^0 and Hom^{-1}
    b0 = {p: hom_basis(K1.term(p), K2.term(p)) for p in K1.degrees}
    bm1 = {p: hom_basis(K1.term(p), K2.term(p - 1)) for p in K1.degrees}
    slots1, n1 = _slot_layout(cat, K1, K2, 1)
    slots0, n0 = _slot_layout(cat, K1, K2, 0)
    # D^0 x = d2 x - x d1 lands in prod Hom(K1^p, K2^{p+1})
    cols0, index0 = [], []
    for p in K1.degrees:
        for k, x in enumerate(b0[p]):
            parts = {}
            if p in slots1:
                parts[p] = K2.diff(p) @ x
            if p - 1 in slots1:
                parts[p - 1] = -(x @ K1.diff(p - 1))
            cols0.append(_flatten(cat, {q: m for q, m in parts.items()}, slots1))
            index0.append((p, k))
    # D^{-1} h = d2 h + h d1 lands in prod Hom(K1^p, K2^p)
    colsm1 = []
    for p in K1.degrees:
        for h in bm1[p]:
            parts = {}
            if p in slots0:
                parts[p] = K2.diff(p - 1) @ h
            if p - 1 in slots0:
                prev = parts.get(p - 1)
                term = h @ K1.diff(p - 1)
                parts[p - 1] = term if prev is None else prev + term
            colsm1.append(_flatten(cat, parts, slots0))
    D0 = Matrix(f, len(cols0), n1, cols0, _trusted=True).T if cols0 else Matrix.zeros(f, n1, 0)
    Z = linalg.kernel_basis(D0)
    Dm1 = Matrix(f, len(colsm1), n0, colsm1, _trusted=True).T if colsm1 else Matrix.zeros(f, n0, 0)
    rB = linalg.rank(Dm1)
    dim = Z.cols - rB
    reps = []
    if representatives and dim > 0:
        # ambient images of the cycle basis; pick those independent modulo boundaries
        E0 = []
        for p in K1.degrees:
            for x in b0[p]:
                E0.append(_flatten(cat, {p: x}, slots0))
        E = Matrix(f, len(E0), n0, E0, _trusted=True).T
        cyc = E @ Z
        cur = Dm1
        for j in range(Z.cols):
            cand = hstack(f, n0, [cur, cyc.submatrix(None, [j])])
            if linalg.rank(cand) > linalg.rank(cur):
                cur = cand
                comps = {}
                col = Z.submatrix(None, [j])
                for idx, (p, k) in enumerate(index0):
                    c = col.row(idx).get(0)
                    if c:
                        comps[p] = comps[p] + b0[p][k].scale(c) if p in comps else b0[p][k].scale(c)
                reps.append(ChainMap(K1, K2, comps))
                if len(reps) == dim:
                    break
    return HomotopyHom(dim, reps)


def is_null_homotopic(f: ChainMap) -> bool:
    """Whether ``f = d h + h d`` for some ``h`` of degree ``-1``."""
    K1, K2 = f.source, f.target
    cat = K1.cat
    fld = cat.field
    slots0, n0 = _slot_layout(cat, K1, K2, 0)
    cols = []
    for p in K1.degrees:
        for h in hom_basis(K1.term(p), K2.term(p - 1)):
            parts = {}
            if p in slots0:
                parts[p] = K2.diff(p - 1) @ h
            if p - 1 in slots0:
                term = h @ K1.diff(p - 1)
                parts[p - 1] = parts[p - 1] + term if p - 1 in parts else term
            cols.append(_flatten(cat, parts, slots0))
    target = _flatten(cat, {p: f.comp(p) for p in K1.degrees}, slots0)
    if not target:
        return True
    if not cols:
        return False
    D = Matrix(fld, len(cols), n0, cols, _trusted=True).T
    b = Matrix(fld, 1, n0, [target], _trusted=True).T
    return linalg.solve_or_none(D, b) is not None


# -- arrow complexes, Omega and C ----------------------------------------------------

class ShapeError(ValueError):
    pass


@dataclass
class ArrowComplex:
    """A chain map ``beta: U -> V`` viewed as a complex of arrows."""

    U: BoundedComplex
    V: BoundedComplex
    beta: ChainMap

    @property
    def source(self) -> BoundedComplex:
        return self.U

    @property
    def target(self) -> BoundedComplex:
        return self.V

    def check(self) -> None:
        self.beta.check()


def omega(A: ArrowComplex) -> ArrowComplex:
    """``Omega(U -> V) = (V -> cone(beta))`` through the canonical inclusion."""
    c = cone(A.beta)
    return ArrowComplex(A.V, c.complex, c.inclusion)


def omega_with_cone(A: ArrowComplex):
    c = cone(A.beta)
    return ArrowComplex(A.V, c.complex, c.inclusion), c


def vartheta(A: ArrowComplex) -> ChainMap:
    """``t Omega -> s[1]``: the projection ``cone(beta) -> U[1]``, taken without sign."""
    return cone(A.beta).projection


@dataclass
class ArrowMap:
    """A morphism of arrow complexes: ``a: U -> U'``, ``b: V -> V'`` with ``b beta = beta' a``."""

    source: ArrowComplex
    target: ArrowComplex
    a: ChainMap
    b: ChainMap

    def check(self) -> None:
        self.a.check()
        self.b.check()
        lhs = self.b @ self.source.beta
        rhs = self.target.beta @ self.a
        cat = self.a.cat
        for n in lhs.degrees():
            if any(x != y for x, y in zip(cat.mats(lhs.comp(n)), cat.mats(rhs.comp(n)))):
                raise ComplexError(f"arrow map square fails in degree {n}")

    def is_quasi_iso(self) -> bool:
        return self.a.is_quasi_iso() and self.b.is_quasi_iso()


def cone_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """Induced map ``cone(f) -> cone(g)`` from a commuting square ``b f = g a``."""
    Cf, Cg = cone(f).complex, cone(g).complex
    cat = f.cat
    comps = {}
    for n in Cf.degrees:
        U1, V0 = f.source.term(n + 1), f.target.term(n)
        U1p, V0p = g.source.term(n + 1), g.target.term(n)
        blk = cat.block([U1p, V0p], [U1, V0], {(0, 0): a.comp(n + 1), (1, 1): b.comp(n)})
        comps[n] = cat.make_map(Cf.term(n), Cg.term(n), cat.mats(blk))
    return ChainMap(Cf, Cg, comps)


def omega_map(m: ArrowMap):
    """``Omega`` on morphisms: ``(b, cone(a, b))``."""
    src, tgt = omega(m.source), omega(m.target)
    cm = cone_map(m.source.beta, m.target.beta, m.a, m.b)
    cm = ChainMap(src.V, tgt.V, cm.comps)
    return ArrowMap(src, tgt, m.b, cm)


def chi(A: ArrowComplex) -> ChainMap:
    """``chi: U[1] -> t Omega^2 = cone(V -> cone(beta))``, ``u -> (-beta u, u, 0)``."""
    inner = cone(A.beta)
    outer = cone(inner.inclusion).complex
    U1 = A.U.shift(1)
    cat = A.U.cat
    comps = {}
    for n in U1.degrees:
        u = A.U.term(n + 1)
        V1, V0 = A.V.term(n + 1), A.V.term(n)
        blk = cat.block([V1, u, V0], [u], {(0, 0): -A.beta.comp(n + 1), (1, 0): cat.identity(u)})
        comps[n] = cat.make_map(u, outer.term(n), cat.mats(blk))
    return ChainMap(U1, outer, comps)


def C_functor(A: ArrowComplex) -> BoundedComplex:
    """``A^0 -(-v)-> B^0 -(-d)-> B^1 -> ...`` with ``A^0`` in degree 0.

    Requires ``A`` concentrated in degree 0 and ``B`` in degrees ``>= 0``.
    """
    U, V = A.U, A.V
    if any(n != 0 and not _is_zero_obj(U.cat, U.term(n)) for n in U.degrees):
        raise ShapeError("source of the arrow must be concentrated in degree 0")
    if any(n < 0 and not _is_zero_obj(V.cat, V.term(n)) for n in V.degrees):
        raise ShapeError("target of the arrow must vanish in negative degrees")
    cat = U.cat
    hi = max(V.hi, 0)
    terms = [U.term(0)] + [V.term(k) for k in range(0, hi + 1)]
    diffs = [-A.beta.comp(0)] + [-V.diff(k) for k in range(0, hi)]
    return BoundedComplex(cat, 0, terms, diffs)


def C_from_cone(A: ArrowComplex) -> ChainMap:
    """Isomorphism ``cone(v)[-1] -> C(A)``: identity on ``A^0``, ``-1`` on every ``B`` term."""
    Cn = cone(A.beta).complex.shift(-1)
    C = C_functor(A)
    cat = C.cat
    comps = {}
    for n in C.degrees:
        if n == 0:
            src = Cn.term(0)
            U0, Vm = A.U.term(0), A.V.term(-1)
            blk = cat.block([U0], [U0, Vm], {(0, 0): cat.identity(U0)})
        else:
            src = Cn.term(n)
            U1, Vn = A.U.term(n), A.V.term(n - 1)
            blk = cat.block([Vn], [U1, Vn], {(0, 1): -cat.identity(Vn)})
        comps[n] = cat.make_map(src, C.term(n), cat.mats(blk))
    return ChainMap(Cn, C, comps)


def _is_zero_obj(cat, obj) -> bool:
    return not any(cat.dims(obj))


# -- derived functors at bounded degree ---------------------------------------------------

def R_j_star(K: BoundedComplex, N: int, cap: int | None = None) -> BoundedComplex:
    """Total complex of ``j_* F Q^r K^p`` for ``r <= N + 1``.

    Cohomology is exact in degrees ``<= K.lo + N``; beyond that the
    truncated resolution tail shows up.
    """
    from .adjunction import CochainTower
    from .matrix import kron_identity
    from .sheaves import SheafMap, j_lower_star_F
    if N < 0:
        raise ValueError("degree bound must be non-negative")
    R = N + 1
    H = K.cat.group
    n = H.order
    towers = {p: CochainTower(K.term(p), cap) for p in K.degrees}
    sheaves = {}
    for p in K.degrees:
        T = towers[p]
        for r in range(R + 1):
            sheaves[p, r] = j_lower_star_F(T.Q(r), T.FQ(r))
    scat = SheafCategory(H, K.cat.field)
    lo, hi = K.lo, K.hi + R
    terms = []
    layout = {}
    for t in range(lo, hi + 1):
        parts = [(p, t - p) for p in K.degrees if 0 <= t - p <= R]
        layout[t] = parts
        terms.append(scat.direct_sum([sheaves[k] for k in parts]))
    diffs = []
    for t in range(lo, hi):
        src_parts, tgt_parts = layout[t], layout[t + 1]
        blocks = {}
        for j, (p, r) in enumerate(src_parts):
            S = sheaves[p, r]
            # horizontal: (-1)^p g^r
            if r + 1 <= R:
                i = tgt_parts.index((p, r + 1))
                g = towers[p].g(r).matrix
                gw = towers[p].rho(r)
                m = SheafMap(S, sheaves[p, r + 1], g, gw)
                blocks[(i, j)] = -m if p % 2 else m
            # vertical: F Q^r d_K
            if p + 1 <= K.hi and (p + 1, r) in tgt_parts:
                i = tgt_parts.index((p + 1, r))
                dmat = K.diff(p).matrix
                kq = kron_identity((n - 1) ** r, dmat)
                blocks[(i, j)] = SheafMap(S, sheaves[p + 1, r], kron_identity(n, kq), kq)
        tgt_sheaves = [sheaves[k] for k in tgt_parts]
        src_sheaves = [sheaves[k] for k in src_parts]
        blk = scat.block(tgt_sheaves, src_sheaves, blocks)
        diffs.append(scat.make_map(terms[t - lo], terms[t + 1 - lo], scat.mats(blk)))
    out = BoundedComplex(scat, lo, terms, diffs)
    out.layout = {t: [(k, sheaves[k]) for k in parts] for t, parts in layout.items()}
    return out


def R_j_star_module(E, N: int, cap: int | None = None) -> BoundedComplex:
    return R_j_star(single(E, 0), N, cap)


# -- free resolution of the trivial module -------------------------------------------------

class FreeResolution:
    """Free resolution ``... -> k[H]^{m_1} -> k[H]^{m_0} -> k`` built greedily.

    ``gens[a]`` lists, for each generator of ``P_{a}``, its image in
    ``P_{a-1}`` as a vector of length ``|H| * m_{a-1}`` (coordinates
    ``(summand, group element)``).
    """

    def __init__(self, group, field, length: int):
        from .groups import regular_module
        self.group = group
        self.field = field
        self.ranks = [1]
        self.gens = [None]
        self._reg = regular_module(group, field)
        n = group.order
        # boundary of P_0 -> k is the augmentation
        aug = Matrix(field, 1, n, [{g: field.one for g in range(n)}], _trusted=True)
        boundary = aug
        for a in range(1, length + 1):
            K = linalg.kernel_basis(boundary)
            gens = self._generators(K, self.ranks[-1])
            self.ranks.append(len(gens))
            self.gens.append(gens)
            boundary = self.boundary_matrix(a)

    def _act(self, h, vec, m):
        """Left action of ``h`` on a vector of ``k[H]^m``."""
        G = self.group
        n = G.order
        out = {}
        for idx, v in vec.items():
            s, x = divmod(idx, n)
            out[s * n + G.mul[h][x]] = v
        return out

    def _generators(self, K: Matrix, m: int) -> list:
        f = self.field
        n = self.group.order
        target_dim = K.cols
        gens = []
        span_rows = []
        cur_rank = 0
        for col in K.columns():
            if cur_rank == target_dim:
                break
            trial = span_rows + [self._act(h, col, m) for h in self.group.elements]
            r = linalg.rank(Matrix(f, len(trial), n * m, trial, _trusted=True))
            if r > cur_rank:
                gens.append(col)
                span_rows = trial
                cur_rank = r
        return gens

    def boundary_matrix(self, a: int) -> Matrix:
        """``k``-matrix of ``P_a -> P_{a-1}``, columns indexed by ``(generator, group element)``."""
        n = self.group.order
        m_prev = self.ranks[a - 1]
        cols = []
        for g in self.gens[a]:
            for h in self.group.elements:
                cols.append(self._act(h, g, m_prev))
        return Matrix(self.field, len(cols), n * m_prev, cols, _trusted=True).T

    def hom_boundary(self, a: int, V) -> Matrix:
        """``Hom_H(P_{a-1}, V) -> Hom_H(P_a, V)``, ``f -> f o boundary``, on ``V^{m}`` coordinates."""
        f = self.field
        m_prev, m = self.ranks[a - 1], self.ranks[a]
        n = self.group.order
        blocks = {}
        for j, g in enumerate(self.gens[a]):
            for idx, c in g.items():
                i, x = divmod(idx, n)
                term = V.action[x].scale(c)
                blocks[(j, i)] = blocks[(j, i)] + term if (j, i) in blocks else term
        from .matrix import block_matrix
        return block_matrix(f, [V.dim] * m, [V.dim] * m_prev, blocks)


@dataclass
class VertexComplex:
    """A complex of vector spaces ``lo .. lo + len(dims) - 1`` with block offsets."""

    lo: int
    dims: list
    diffs: list
    offsets: dict

    def dim(self, t: int) -> int:
        return self.dims[t - self.lo] if self.lo <= t < self.lo + len(self.dims) else 0

    def diff(self, t: int, field) -> Matrix:
        if self.lo <= t and t + 1 < self.lo + len(self.dims):
            return self.diffs[t - self.lo]
        return Matrix.zeros(field, self.dim(t + 1), self.dim(t))


def vertex_derived_pushforward(K: BoundedComplex, top: int, resolution: FreeResolution | None = None) -> VertexComplex:
    """``i^* R j_* K`` for a complex of modules, as ``Tot Hom_H(P_., K^.)``.

    Terms are built in degrees ``<= top``; cohomology is correct in degrees
    ``< top``, and the differential into degree ``top`` is complete.
    ``Hom_H(k[H]^m, V)`` is stored as ``V^m``; the total differential is
    ``d_V f - (-1)^t f o boundary``.
    """
    from .matrix import block_matrix, kron_identity
    A = max(top - K.lo, 0)
    P = resolution or FreeResolution(K.cat.group, K.cat.field, A)
    fld = K.cat.field
    lo, hi = K.lo, min(K.hi + A, top)
    layout, dims, offsets = {}, [], {}
    for t in range(lo, hi + 1):
        parts = [(a, t - a) for a in range(0, A + 1) if K.lo <= t - a <= K.hi]
        layout[t] = parts
        off, table = 0, {}
        for a, b in parts:
            table[(a, b)] = off
            off += P.ranks[a] * K.term(b).dim
        offsets[t] = table
        dims.append(off)
    diffs = []
    for t in range(lo, hi):
        sp, tp = layout[t], layout[t + 1]
        blocks = {}
        for j, (a, b) in enumerate(sp):
            V = K.term(b)
            if (a, b + 1) in tp:
                blocks[(tp.index((a, b + 1)), j)] = kron_identity(P.ranks[a], K.diff(b).matrix)
            if (a + 1, b) in tp:
                hb = P.hom_boundary(a + 1, V)
                blocks[(tp.index((a + 1, b)), j)] = -hb if t % 2 == 0 else hb
        diffs.append(block_matrix(fld, [P.ranks[a] * K.term(b).dim for a, b in tp],
                                  [P.ranks[a] * K.term(b).dim for a, b in sp], blocks))
    return VertexComplex(lo, dims, diffs, offsets)


def R_i_shriek(K: BoundedComplex, d: int) -> dict:
    """Cohomology dimensions of ``R i^! K`` in degrees ``<= d``.

    ``R i^! K = cone(i^* K -> i^* R j_* j^* K)[-1]``; the vertex side of
    ``R j_* j^* K`` comes from a free resolution of the trivial module.
    """
    from .matrix import block_matrix
    if not isinstance(K.cat, SheafCategory):
        raise ComplexError("R i^! needs a complex of sheaves")
    fld = K.cat.field
    T = vertex_derived_pushforward(K.restrict_open(), d)

    def wdim(n):
        return K.term(n).W_dim if K.lo <= n <= K.hi else 0

    def edge(b):
        M_rows = [dict() for _ in range(T.dim(b))]
        if wdim(b) and (0, b) in T.offsets.get(b, {}):
            off = T.offsets[b][(0, b)]
            for i, row in enumerate(K.term(b).s.row_dicts()):
                M_rows[off + i] = row
        return Matrix(fld, T.dim(b), wdim(b), M_rows, _trusted=True)

    def cone_diff(n):
        # (w, x) in W^n + Tot^{n-1} -> (d w, e(w) - d x) in W^{n+1} + Tot^n
        phiW = K.diff(n).phi_W if K.lo <= n < K.hi else Matrix.zeros(fld, wdim(n + 1), wdim(n))
        return block_matrix(fld, [wdim(n + 1), T.dim(n)], [wdim(n), T.dim(n - 1)],
                            {(0, 0): phiW, (1, 0): edge(n), (1, 1): -T.diff(n - 1, fld)})

    out = {}
    for n in range(min(K.lo, T.lo + 1), d + 1):
        dout, din = cone_diff(n), cone_diff(n - 1)
        out[n] = dout.cols - linalg.rank(dout) - linalg.rank(din)
    return out


def R_i_shriek_via_j_star(K: BoundedComplex, d: int) -> dict:
    """Second route: ``i^* cone(K -> R j_* j^* K)[-1]`` with the F-resolution of ``j^* K``.

    Much larger than :func:`R_i_shriek`; meant for small instances.
    """
    from .matrix import block_matrix
    fld = K.cat.field
    J = K.restrict_open()
    N = max(d + 1 - K.lo, 0)
    R = R_j_star(J, N)

    def wdim(n):
        return K.term(n).W_dim if K.lo <= n <= K.hi else 0

    def rw(n):
        return R.term(n).W_dim if R.lo <= n <= R.hi else 0

    def rdiff(n):
        if R.lo <= n < R.hi:
            return R.diff(n).phi_W
        return Matrix.zeros(fld, rw(n + 1), rw(n))

    def edge(b):
        # W^b -> (F K^b)^inv = K^b, the r = 0 summand in total degree b
        rows = [dict() for _ in range(rw(b))]
        if wdim(b):
            off = 0
            for (p, r), S in R.layout[b]:
                if (p, r) == (b, 0):
                    break
                off += S.W_dim
            for i, row in enumerate(K.term(b).s.row_dicts()):
                rows[off + i] = row
        return Matrix(fld, rw(b), wdim(b), rows, _trusted=True)

    def cone_diff(n):
        phiW = K.diff(n).phi_W if K.lo <= n < K.hi else Matrix.zeros(fld, wdim(n + 1), wdim(n))
        return block_matrix(fld, [wdim(n + 1), rw(n)], [wdim(n), rw(n - 1)],
                            {(0, 0): phiW, (1, 0): edge(n), (1, 1): -rdiff(n - 1)})

    out = {}
    for n in range(min(K.lo, R.lo + 1), d + 1):
        dout, din = cone_diff(n), cone_diff(n - 1)
        out[n] = dout.cols - linalg.rank(dout) - linalg.rank(din)
    return out
