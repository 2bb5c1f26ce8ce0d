"""Gluing data, the model complexes ``B_d``, the functor ``Phi`` and ``D_d``.

A gluing datum of perversity ``d`` is ``(L, F, u, sigma)``: a module ``L``,
a sheaf ``F``, a sheaf map ``u: j_* F Q^{d-1} L -> F`` killing the image of
``j_* g^{d-2}``, and a module isomorphism ``sigma: Q^d L -> j^* F`` with
``sigma o q^{d-1} = j^* u``.  ``Q^r L`` always means the tuple model.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .adjunction import (CochainTower, Q_module, adjunction_maps, alpha, generic_to_tuple,
                         inclusion_Q, shift_to_tuple)
from .category import SheafCategory
from .complexes import BoundedComplex, ChainMap, ComplexError, R_i_shriek, cone, single, tau_geq
from .groups import HModule, HModuleMap, ModuleError, conjugate_module, hom_basis, random_invertible
from .matrix import Matrix, hstack, kron_identity, vstack
from .sheaves import (ConeSheaf, SheafError, SheafMap, j_lower_star_F, j_lower_star_F_map)


class DatumError(ValueError):
    """A gluing datum or datum map violates its defining identities."""


class PerversityError(ValueError):
    """Input complex is not perverse for the requested perversity."""


# -- gluing data ---------------------------------------------------------------

class GluingDatum:
    def __init__(self, d: int, L: HModule, F: ConeSheaf, u: SheafMap, sigma: HModuleMap,
                 tower: CochainTower | None = None, check: bool = True):
        if d < 1:
            raise DatumError("perversity must be at least 1")
        self.d = d
        self.L = L
        self.F = F
        self.u = u
        self.sigma = sigma
        self.tower = tower or CochainTower(L)
        if check:
            self.validate()

    @property
    def group(self):
        return self.L.group

    @property
    def field(self):
        return self.L.field

    def source_sheaf(self, i: int | None = None) -> ConeSheaf:
        """``j_* F Q^i L`` (default ``i = d - 1``)."""
        i = self.d - 1 if i is None else i
        T = self.tower
        return j_lower_star_F(T.Q(i), T.FQ(i))

    def validate(self) -> None:
        d, T = self.d, self.tower
        S = self.u.source
        if S.dims != (T.FQ(d - 1).dim, T.Q(d - 1).dim):
            raise DatumError(f"u has source of shape {S.dims}, expected j_* F Q^{d - 1} L")
        if self.u.target.dims != self.F.dims:
            raise DatumError("u does not land in F")
        if self.sigma.matrix.shape != (self.F.V.dim, T.Q(d).dim):
            raise DatumError("sigma must map Q^d L to j^* F")
        try:
            self.F.check()
            self.u.check()
            self.sigma.check()
        except (ModuleError, SheafError) as e:
            raise DatumError(str(e)) from None
        if not linalg.is_invertible(self.sigma.matrix):
            raise DatumError("sigma is not invertible")
        if self.sigma.matrix @ T.q(d - 1).matrix != self.u.phi_V:
            raise DatumError("sigma o q^{d-1} differs from j^* u")
        if d >= 2:
            # the V part vanishes automatically; the vertex part is u_W o rho^{d-2}
            if not (self.u.phi_W @ T.rho(d - 2)).is_zero():
                raise DatumError("u does not kill the image of j_* g^{d-2}")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except DatumError:
            return False
        return True

    def identity(self) -> "DatumMap":
        return DatumMap(self, self, self.L.identity_map(), self.F.identity_map())

    def __repr__(self):
        return f"GluingDatum<d={self.d}, L={self.L.dim}, F={self.F.dims}>"


class DatumMap:
    """``(f, g)`` with ``u' o j_* F Q^{d-1} f = g o u``."""

    def __init__(self, source: GluingDatum, target: GluingDatum, f: HModuleMap, g: SheafMap,
                 check: bool = True):
        self.source = source
        self.target = target
        self.f = f
        self.g = g
        if check:
            self.validate()

    def validate(self) -> None:
        O1, O2 = self.source, self.target
        if O1.d != O2.d:
            raise DatumError("data of different perversities")
        d = O1.d
        try:
            self.f.check()
            self.g.check()
        except (ModuleError, SheafError) as e:
            raise DatumError(str(e)) from None
        fV, fW = _FQ_map(self.f.matrix, d - 1, O1.group.order)
        lhs = O2.u.phi_V @ fV, O2.u.phi_W @ fW
        rhs = self.g.phi_V @ O1.u.phi_V, self.g.phi_W @ O1.u.phi_W
        if lhs != rhs:
            raise DatumError("u' o j_* F Q^{d-1} f differs from g o u")
        Qf = _Q_map_matrix(self.f.matrix, d, O1.group.order)
        if self.g.phi_V @ O1.sigma.matrix != O2.sigma.matrix @ Qf:
            raise DatumError("j^* g o sigma differs from sigma' o Q^d f")

    def __matmul__(self, other: "DatumMap") -> "DatumMap":
        return DatumMap(other.source, self.target, self.f @ other.f, self.g @ other.g, check=False)

    def is_iso(self) -> bool:
        return (linalg.is_invertible(self.f.matrix) and linalg.is_invertible(self.g.phi_V)
                and linalg.is_invertible(self.g.phi_W))


def _Q_map_matrix(m: Matrix, r: int, n: int) -> Matrix:
    return kron_identity((n - 1) ** r, m) if r else m


def _FQ_map(m: Matrix, r: int, n: int):
    """``(V, W)`` matrices of ``j_* F Q^r`` applied to a k-linear ``m``."""
    q = _Q_map_matrix(m, r, n)
    return kron_identity(n, q), q


# -- the model B_d ------------------------------------------------------------------

def B_d(O: GluingDatum) -> BoundedComplex:
    """``j_* F L -> j_* F Q L -> ... -> j_* F Q^{d-1} L -u-> F`` in degrees ``[0, d]``."""
    d, T = O.d, O.tower
    cat = SheafCategory(O.group, O.field)
    terms = [O.source_sheaf(i) for i in range(d)] + [O.F]
    diffs = [SheafMap(terms[i], terms[i + 1], T.g(i).matrix, T.rho(i)) for i in range(d - 1)]
    diffs.append(SheafMap(terms[d - 1], O.F, O.u.phi_V, O.u.phi_W))
    return BoundedComplex(cat, 0, terms, diffs)


def B_d_map(m: DatumMap, source: BoundedComplex | None = None,
            target: BoundedComplex | None = None) -> ChainMap:
    O1 = m.source
    d, n = O1.d, O1.group.order
    source = source or B_d(O1)
    target = target or B_d(m.target)
    comps = {}
    for i in range(d):
        V, W = _FQ_map(m.f.matrix, i, n)
        comps[i] = SheafMap(source.term(i), target.term(i), V, W)
    comps[d] = SheafMap(source.term(d), target.term(d), m.g.phi_V, m.g.phi_W)
    return ChainMap(source, target, comps)


# -- Phi -------------------------------------------------------------------------

@dataclass
class PhiResult:
    complex: BoundedComplex        # Phi K
    J: BoundedComplex              # j_* F j^* K
    rho: ChainMap                  # K -> J
    u1: ChainMap                   # J -> Phi K


def j_star_F_complex(K: BoundedComplex) -> BoundedComplex:
    """``j_* F j^* K`` termwise."""
    cat = K.cat
    terms = [j_lower_star_F(t.V) for t in K.terms]
    diffs = [j_lower_star_F_map(dk.phi_V, terms[i], terms[i + 1]) for i, dk in enumerate(K.diffs)]
    return BoundedComplex(cat, K.lo, terms, diffs)


def Phi(K: BoundedComplex) -> PhiResult:
    """``cone(rho_K: K -> j_* F j^* K)``, with ``rho = (alpha, s)`` in each degree."""
    J = j_star_F_complex(K)
    comps = {}
    for n in K.degrees:
        t = K.term(n)
        comps[n] = SheafMap(t, J.term(n), alpha(t.V, J.term(n).V).matrix, t.s)
    rho = ChainMap(K, J, comps)
    C = cone(rho)
    return PhiResult(C.complex, J, rho, C.inclusion)


def xi1_projection(P: PhiResult, K: BoundedComplex) -> ChainMap:
    """``j^* Phi K -> Q j^* K``, ``(t, f) -> q f``; inverse of ``xi^1`` up to homotopy."""
    from .adjunction import _q_matrix
    from .category import ModuleCategory
    C = P.complex.restrict_open()
    mc = ModuleCategory(K.cat.group, K.cat.field)
    QK_terms = {n: Q_module(K.term(n).V) for n in K.degrees}
    Qterms = [QK_terms[n] for n in K.degrees]
    n_ = K.cat.group.order
    Qdiffs = [HModuleMap(Qterms[i], Qterms[i + 1], kron_identity(n_ - 1, K.diff(p).phi_V))
              for i, p in enumerate(range(K.lo, K.hi))]
    QK = BoundedComplex(mc, K.lo, Qterms, Qdiffs)
    comps = {}
    for p in K.degrees:
        a = K.term(p + 1).V.dim if p + 1 <= K.hi else 0
        qm = _q_matrix(K.term(p).V)
        zero = Matrix.zeros(K.cat.field, qm.rows, a)
        comps[p] = HModuleMap(C.term(p), QK.term(p), hstack(K.cat.field, qm.rows, [zero, qm]))
    return ChainMap(C, QK, comps)


def xi1_relation_holds(K: BoundedComplex, P: PhiResult | None = None) -> bool:
    """``xi^1 o (q j^*) = j^* u^1``: the projection is a quasi-isomorphic chain map and
    composing it with ``j^* u^1`` gives ``q`` on the nose."""
    from .adjunction import _q_matrix
    P = P or Phi(K)
    pr = xi1_projection(P, K)
    if not pr.is_chain_map():
        return False
    for n in K.degrees:
        if pr.comp(n).matrix @ P.u1.comp(n).phi_V != _q_matrix(K.term(n).V):
            return False
    return pr.is_quasi_iso()


# -- perversity -----------------------------------------------------------------

@dataclass
class PerversityReport:
    ok: bool
    condition: str = ""
    degree: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "perverse"
        return f"fails ({self.condition}) in degree {self.degree}: {self.detail}"


def is_perverse(K: BoundedComplex, d: int) -> PerversityReport:
    """Check (a) cohomology in ``[0, d]``, (b) ``j^* K`` in degree 0, (c) ``h^n R i^! K = 0`` for ``n < d``."""
    if not isinstance(K.cat, SheafCategory):
        raise ComplexError("perversity is defined for complexes of sheaves")
    for n in K.degrees:
        if n < 0 or n > d:
            dims = K.cohomology_dims(n)
            if any(dims):
                return PerversityReport(False, "a", n, f"cohomology dims (V, W) = {dims}")
    for n in K.degrees:
        if n != 0 and K.cohomology_dims(n)[0]:
            return PerversityReport(False, "b", n, "j^* K has cohomology off degree 0")
    if d > 0:
        shriek = R_i_shriek(K, d - 1)
        for n in sorted(shriek):
            if n < d and shriek[n]:
                return PerversityReport(False, "c", n, f"dim h^{n} R i^! K = {shriek[n]}")
    return PerversityReport(True)


# -- D_d ----------------------------------------------------------------------------

@dataclass
class _Stage:
    L: HModule
    M: BoundedComplex            # tau_{>=0} of the reduced Phi
    u1: SheafMap                 # j_* F L -> M^0, landing in cocycles
    xi1: Matrix                  # Q L -> h^0(j^* M)


def _reduced_phi(K: BoundedComplex) -> _Stage:
    """Replace ``Phi K`` by ``cone(K -> j_* F L)`` with ``L = h^0 j^* K``.

    ``K`` must start in degree 0 with ``j^* K`` resolving ``L``.  The map is
    ``(F c) o alpha`` for a linear retraction ``c`` of ``T^0`` onto ``L``; it
    agrees with ``rho_K`` in the derived category, since both restrict to
    ``alpha_L`` on ``L``.
    """
    cat = K.cat
    f = cat.field
    n = cat.group.order
    K0 = K.term(0)
    (rep, c), _ = K.cohomology_layers(0)
    L = cat.subquotient(K0, [(rep, c), (Matrix.zeros(f, K0.W_dim, 0), Matrix.zeros(f, 0, K0.W_dim))]).V
    JL = j_lower_star_F(L)
    phiV = kron_identity(n, c) @ alpha(K0.V).matrix
    phi = SheafMap(K0, JL, phiV, c @ K0.s)
    target = single(JL, 0)
    C = cone(ChainMap(K, target, {0: phi}))
    M, pr = tau_geq(C.complex, 0)
    u1 = pr.comp(0) @ C.inclusion.comp(0)
    (repV, projV), _ = M.cohomology_layers(0)
    xi1 = projV @ u1.phi_V @ inclusion_Q(L)
    # rel-1 on h^0: xi1 o q = h^0(j^* u1)
    from .adjunction import _q_matrix
    if xi1 @ _q_matrix(L) != projV @ u1.phi_V:
        raise DatumError("xi^1 o q differs from j^* u^1 on h^0")
    return _Stage(L, M, u1, xi1)


def D_d(K: BoundedComplex, d: int, check: bool = True) -> GluingDatum:
    """The gluing datum ``(j^*, Phi^d, u^d, xi^d)`` of a d-perverse complex."""
    if check:
        rep = is_perverse(K, d)
        if not rep:
            raise PerversityError(f"input is not {d}-perverse: {rep}")
    K, _ = tau_geq(K, 0)
    if K.lo > 0:
        K = _pad_to_zero(K)
    return _D(K, d)


def _pad_to_zero(K: BoundedComplex) -> BoundedComplex:
    cat = K.cat
    z = cat.zero()
    terms = [z] * K.lo + list(K.terms)
    diffs = [cat.zero_map(terms[i], terms[i + 1]) for i in range(K.lo)] + list(K.diffs)
    return BoundedComplex(cat, 0, terms, diffs)


def _D(K: BoundedComplex, d: int) -> GluingDatum:
    st = _reduced_phi(K)
    L = st.L
    T = CochainTower(L)
    n = L.group.order
    if d == 1:
        F, reps, projs = st.M.cohomology(0)
        u = SheafMap(j_lower_star_F(L, T.FQ(0)), F, projs[0] @ st.u1.phi_V, projs[1] @ st.u1.phi_W)
        sigma = HModuleMap(T.Q(1), F.V, st.xi1)
        return GluingDatum(1, L, F, u, sigma, tower=T)
    inner = _D(st.M, d - 1)
    # Q^{d-2}(Q L) = Q^{d-1} L and Q^{d-1}(Q L) = Q^d L through shift_to_tuple
    S1 = shift_to_tuple(L, d - 2).T
    S2 = shift_to_tuple(L, d - 1).T
    xiV, xiW = _FQ_map(st.xi1, d - 2, n)
    uV = inner.u.phi_V @ xiV @ kron_identity(n, S1)
    uW = inner.u.phi_W @ xiW @ S1
    u = SheafMap(j_lower_star_F(T.Q(d - 1), T.FQ(d - 1)), inner.F, uV, uW)
    sigma = HModuleMap(T.Q(d), inner.F.V, inner.sigma.matrix @ _Q_map_matrix(st.xi1, d - 1, n) @ S2)
    return GluingDatum(d, L, inner.F, u, sigma, tower=T)


# -- the abelian structure -----------------------------------------------------------

def _sub(E: HModule, K: Matrix) -> HModule:
    Kl = linalg.left_inverse(K) if K.cols else Matrix.zeros(E.field, 0, E.dim)
    return HModule(E.group, E.field, K.cols, [Kl @ a @ K for a in E.action]), Kl


def kernel_datum(m: DatumMap):
    """Kernel datum and the inclusion ``DatumMap``."""
    from .sheaves import kernel
    O = m.source
    d, n = O.d, O.group.order
    Kf = linalg.kernel_basis(m.f.matrix)
    Lk, Kfl = _sub(O.L, Kf)
    Fk, inc = kernel(m.g)
    Tk = CochainTower(Lk)
    iV, iW = _FQ_map(Kf, d - 1, n)
    uV = linalg.solve(inc.phi_V, O.u.phi_V @ iV)
    uW = linalg.solve(inc.phi_W, O.u.phi_W @ iW)
    u = SheafMap(j_lower_star_F(Tk.Q(d - 1), Tk.FQ(d - 1)), Fk, uV, uW)
    sig = linalg.solve(inc.phi_V, O.sigma.matrix @ _Q_map_matrix(Kf, d, n))
    Ok = GluingDatum(d, Lk, Fk, u, HModuleMap(Tk.Q(d), Fk.V, sig), tower=Tk)
    return Ok, DatumMap(Ok, O, HModuleMap(Lk, O.L, Kf), inc)


def cokernel_datum(m: DatumMap):
    """Cokernel datum and the projection ``DatumMap``."""
    from .sheaves import cokernel
    O = m.target
    d, n = O.d, O.group.order
    P, S = linalg.cokernel_with_section(m.f.matrix)
    Lc = HModule(O.group, O.field, P.rows, [P @ a @ S for a in O.L.action])
    Fc, pr = cokernel(m.g)
    Tc = CochainTower(Lc)
    sV, sW = _FQ_map(S, d - 1, n)
    u = SheafMap(j_lower_star_F(Tc.Q(d - 1), Tc.FQ(d - 1)), Fc,
                 pr.phi_V @ O.u.phi_V @ sV, pr.phi_W @ O.u.phi_W @ sW)
    sig = pr.phi_V @ O.sigma.matrix @ _Q_map_matrix(S, d, n)
    Oc = GluingDatum(d, Lc, Fc, u, HModuleMap(Tc.Q(d), Fc.V, sig), tower=Tc)
    return Oc, DatumMap(O, Oc, HModuleMap(O.L, Lc, P), pr)


# -- Hom in the category of data -------------------------------------------------------

def datum_hom_basis(O1: GluingDatum, O2: GluingDatum) -> list:
    """Basis of ``Hom(O1, O2)``.

    ``j^* g = sigma' o Q^d f o sigma^{-1}`` is forced, so the unknowns are the
    coefficients of ``f`` in a basis of ``Hom_H(L1, L2)`` and the entries of
    ``g_W``.  Equations: ``g`` is a sheaf map, and the vertex part of
    ``u' o j_* F Q^{d-1} f = g o u``.
    """
    if O1.d != O2.d:
        raise DatumError("data of different perversities")
    d, n = O1.d, O1.group.order
    fld = O1.field
    fb = hom_basis(O1.L, O2.L)
    nf = len(fb)
    w1, w2 = O1.F.W_dim, O2.F.W_dim
    sig1_inv = linalg.inverse(O1.sigma.matrix)
    gVs = [O2.sigma.matrix @ _Q_map_matrix(X, d, n) @ sig1_inv for X in fb]
    A = [G @ O1.F.s for G in gVs]                                     # V2 x W1
    B = [O2.u.phi_W @ _Q_map_matrix(X, d - 1, n) for X in fb]         # W2 x dim Q^{d-1} L1
    N = nf + w2 * w1
    rows = []
    p = fld.char

    def clean(eq):
        if p:
            return {c: v % p for c, v in eq.items() if v % p}
        return {c: v for c, v in eq.items() if v}

    s2 = O2.F.s.row_dicts()
    for i in range(O2.F.V.dim):
        for j in range(w1):
            eq = {}
            for l, v in s2[i].items():
                eq[nf + l * w1 + j] = v
            for k in range(nf):
                v = A[k].row(i).get(j)
                if v:
                    eq[k] = eq.get(k, 0) - v
            eq = clean(eq)
            if eq:
                rows.append(eq)
    u1W = O1.u.phi_W
    u1cols = u1W.T.row_dicts()
    for i in range(w2):
        for j in range(u1W.cols):
            eq = {}
            for k in range(nf):
                v = B[k].row(i).get(j)
                if v:
                    eq[k] = v
            for l, v in u1cols[j].items():
                key = nf + i * w1 + l
                eq[key] = eq.get(key, 0) - v
            eq = clean(eq)
            if eq:
                rows.append(eq)
    if N == 0:
        return []
    Ker = linalg.kernel_basis(Matrix(fld, len(rows), N, rows, _trusted=True)) if rows else Matrix.identity(fld, N)
    out = []
    for col in Ker.columns():
        fm = Matrix.zeros(fld, O2.L.dim, O1.L.dim)
        gV = Matrix.zeros(fld, O2.F.V.dim, O1.F.V.dim)
        for k in range(nf):
            c = col.get(k)
            if c:
                fm = fm + fb[k].scale(c)
                gV = gV + gVs[k].scale(c)
        gw = [dict() for _ in range(w2)]
        for idx, v in col.items():
            if idx >= nf:
                t = idx - nf
                gw[t // w1][t % w1] = v
        gW = Matrix(fld, w2, w1, gw, _trusted=True)
        out.append(DatumMap(O1, O2, HModuleMap(O1.L, O2.L, fm), SheafMap(O1.F, O2.F, gV, gW), check=False))
    return out


def datum_hom_dim(O1: GluingDatum, O2: GluingDatum) -> int:
    return len(datum_hom_basis(O1, O2))


def datum_isomorphism(O1: GluingDatum, O2: GluingDatum, seed: int = 0, tries: int = 20):
    """An isomorphism ``O1 -> O2`` inside the Hom space, or ``None``.

    Random combinations of the Hom basis are pushed up in rank one basis
    direction at a time; over GF(2) a plain random draw is invertible too
    rarely to be relied on.
    """
    if (O1.L.dim, O1.F.dims) != (O2.L.dim, O2.F.dims):
        return None
    basis = datum_hom_basis(O1, O2)
    fld = O1.field
    if not basis:
        if O1.L.dim or any(O1.F.dims):
            return None
        return DatumMap(O1, O2, HModuleMap(O1.L, O2.L, Matrix.zeros(fld, 0, 0)), O1.F.zero_map(O2.F))
    rng = random.Random(seed)
    parts = [(b.f.matrix, b.g.phi_V, b.g.phi_W) for b in basis]
    full = O1.L.dim + O1.F.V.dim + O1.F.W_dim

    def add(m, k, c):
        return tuple(x + y.scale(c) for x, y in zip(m, parts[k]))

    def score(m):
        return sum(linalg.rank(x) for x in m)

    for _ in range(tries):
        m = tuple(Matrix.zeros(fld, *x.shape) for x in parts[0])
        for k in range(len(parts)):
            c = fld.random_element(rng)
            if c:
                m = add(m, k, c)
        s = score(m)
        improved = True
        while s < full and improved:
            improved = False
            for k in rng.sample(range(len(parts)), len(parts)):
                m2 = add(m, k, fld.random_element(rng, nonzero=True))
                s2 = score(m2)
                if s2 > s:
                    m, s, improved = m2, s2, True
                    if s == full:
                        break
        if s == full:
            f, gV, gW = m
            cand = DatumMap(O1, O2, HModuleMap(O1.L, O2.L, f), SheafMap(O1.F, O2.F, gV, gW), check=False)
            cand.validate()
            return cand
    return None


# -- random data -------------------------------------------------------------------

def random_datum(L: HModule, d: int, seed: int, extra_vertex: int | None = None) -> GluingDatum:
    """A random datum over ``L``, covering every isomorphism class.

    The vertex map ``u_W`` factors through ``coker rho^{d-2}`` (the vertex
    part of ``G_{d-1}``); its kernel is a random subspace of the kernel of
    the induced map to invariants, and ``F`` gets a random number of extra
    vertex directions glued to random invariant vectors.  Everything is
    then conjugated by random basis changes of ``V`` and ``W``.
    """
    rng = random.Random(seed)
    fld = L.field
    T = CochainTower(L)
    Qd = T.Q(d)
    r = T.rho(d - 1)                                   # Q^{d-1} L -> Q^d L
    if d >= 2:
        Pc, Sc = linalg.cokernel_with_section(T.rho(d - 2))
    else:
        Pc = Sc = Matrix.identity(fld, L.dim)
    rbar = r @ Sc                                      # G -> Q^d L
    kr = linalg.kernel_basis(rbar)
    kdim = rng.randint(0, kr.cols)
    if kdim:
        mix = Matrix.from_rows(fld, [[fld.random_element(rng) for _ in range(kdim)] for _ in range(kr.cols)])
        Ksub = kr @ mix
    else:
        Ksub = Matrix.zeros(fld, rbar.cols, 0)
    P2, S2 = linalg.cokernel_with_section(Ksub)
    rbb = rbar @ S2                                    # G/K -> Q^d L
    uW_main = P2 @ Pc
    inv = Qd.invariants_basis()
    wb = rng.randint(0, 2) if extra_vertex is None else extra_vertex
    if inv.cols:
        comb = Matrix.from_rows(fld, [[fld.random_element(rng) for _ in range(wb)] for _ in range(inv.cols)],
                                cols=wb)
        sb = inv @ comb
    else:
        sb = Matrix.zeros(fld, Qd.dim, wb)
    w = rbb.cols + wb
    sQ = hstack(fld, Qd.dim, [rbb, sb])
    uW = vstack(fld, uW_main.cols, [uW_main, Matrix.zeros(fld, wb, uW_main.cols)])
    PW, PWi = random_invertible(fld, w, rng)
    uW, sQ = PW @ uW, sQ @ PWi
    PV, PVi = random_invertible(fld, Qd.dim, rng)
    V = conjugate_module(Qd, PV, PVi)
    F = ConeSheaf(V, w, PVi @ sQ)
    sigma = HModuleMap(Qd, V, PVi)
    u = SheafMap(j_lower_star_F(T.Q(d - 1), T.FQ(d - 1)), F, PVi @ T.q(d - 1).matrix, uW)
    return GluingDatum(d, L, F, u, sigma, tower=T)


def conjugate_datum(O: GluingDatum, seed: int) -> GluingDatum:
    """An isomorphic copy of ``O`` with random bases for ``L``, ``V`` and ``W``."""
    rng = random.Random(seed)
    fld = O.field
    d, n = O.d, O.group.order
    PL, PLi = random_invertible(fld, O.L.dim, rng)
    L2 = conjugate_module(O.L, PL, PLi)
    T2 = CochainTower(L2)
    PV, PVi = random_invertible(fld, O.F.V.dim, rng)
    PW, PWi = random_invertible(fld, O.F.W_dim, rng)
    F2 = ConeSheaf(conjugate_module(O.F.V, PV, PVi), O.F.W_dim, PVi @ O.F.s @ PW)
    # old coordinates = P (new coordinates)
    aV, aW = _FQ_map(PL, d - 1, n)
    u = SheafMap(j_lower_star_F(T2.Q(d - 1), T2.FQ(d - 1)), F2, PVi @ O.u.phi_V @ aV, PWi @ O.u.phi_W @ aW)
    sigma = HModuleMap(T2.Q(d), F2.V, PVi @ O.sigma.matrix @ _Q_map_matrix(PL, d, n))
    return GluingDatum(d, L2, F2, u, sigma, tower=T2)


# -- T, lambda_d, pi_d and Q_d --------------------------------------------------------------

def T_datum(O: GluingDatum):
    """``(Q L, F, u, sigma)`` as a datum of perversity ``d - 1``; for ``d = 1`` just ``F``."""
    d, n = O.d, O.group.order
    if d == 1:
        return O.F
    QL = Q_module(O.L)
    T = CochainTower(QL)
    S1 = shift_to_tuple(O.L, d - 2)
    S2 = shift_to_tuple(O.L, d - 1)
    u = SheafMap(j_lower_star_F(T.Q(d - 2), T.FQ(d - 2)), O.F,
                 O.u.phi_V @ kron_identity(n, S1), O.u.phi_W @ S1)
    sigma = HModuleMap(T.Q(d - 1), O.F.V, O.sigma.matrix @ S2)
    return GluingDatum(d - 1, QL, O.F, u, sigma, tower=T)


@dataclass
class LambdaResult:
    source: BoundedComplex         # B_{d-1} T O
    phi: PhiResult                 # Phi B_d O
    jQ: BoundedComplex             # j_* Q_d
    lam: ChainMap
    pi: ChainMap


def _jstar_map(M: Matrix, source: ConeSheaf, target: ConeSheaf) -> SheafMap:
    """``j_*`` of an equivariant map into a ``j_* F`` sheaf."""
    return SheafMap(source, target, M, target.s_left @ M @ source.s)


def lambda_d(O: GluingDatum) -> LambdaResult:
    """``lambda_d: B_{d-1} T O -> Phi B_d O`` and ``pi_d: Phi B_d O -> j_* Q_d``.

    In cone coordinates ``(y, x)`` with ``y`` in ``B^{i+1}`` and ``x`` in
    ``j_* F j^* B^i``: ``lambda^i = (-1)^{i+1} (1, M_i)`` and
    ``pi^i = x - M_i y``, where ``M_i`` is ``mu`` on ``F Q^{i+1} L`` for
    ``i <= d - 2`` and ``gamma o sigma^{-1}`` on ``F`` for ``i = d - 1``.
    """
    d, n = O.d, O.group.order
    fld = O.field
    T = O.tower
    B = B_d(O)
    P = Phi(B)
    C = P.complex
    TO = T_datum(O)
    src = single(TO, 0) if d == 1 else B_d(TO)
    Ms = {}
    for i in range(d):
        A = adjunction_maps(T.Q(i), check=False)
        G = generic_to_tuple(O.L, i).T                  # Q^{i+1} L -> Q(Q^i L)
        if i < d - 1:
            Ms[i] = _jstar_map(A.mu.matrix @ kron_identity(n, G), B.term(i + 1), P.J.term(i))
        else:
            Ms[i] = _jstar_map(A.gamma.matrix @ G @ linalg.inverse(O.sigma.matrix), O.F, P.J.term(i))
    lam, pi = {}, {}
    cat = C.cat
    for i in range(d):
        Y, X = B.term(i + 1), P.J.term(i)
        if i < d - 1:
            S = kron_identity(n, shift_to_tuple(O.L, i))    # F Q^i(Q L) -> F Q^{i+1} L
            ident = SheafMap(src.term(i), Y, S, shift_to_tuple(O.L, i))
        else:
            ident = SheafMap(src.term(i), Y, Matrix.identity(fld, Y.V.dim), Matrix.identity(fld, Y.W_dim))
        blk = cat.block([Y, X], [src.term(i)], {(0, 0): ident, (1, 0): Ms[i] @ ident})
        if i % 2 == 0:
            blk = -blk
        lam[i] = cat.make_map(src.term(i), C.term(i), cat.mats(blk))
    # j_* Q_d: j_* F L in degree -1, then the J terms
    JL = j_lower_star_F(O.L, T.FQ(0))
    FFL = P.J.term(0)
    jQ_terms = [JL] + [P.J.term(i) for i in range(d + 1)]
    first = _jstar_map(kron_identity(n, alpha(O.L, T.FQ(0)).matrix), JL, FFL)
    jQ = BoundedComplex(cat, -1, jQ_terms, [first] + list(P.J.diffs))
    for i in range(-1, d + 1):
        Y, X = B.term(i + 1), P.J.term(i)
        tgt = jQ.term(i)
        if i == -1:
            blk = cat.block([tgt], [Y], {(0, 0): -cat.identity(Y)})
        elif i == d:
            blk = cat.block([tgt], [X], {(0, 0): cat.identity(X)})
        else:
            blk = cat.block([tgt], [Y, X], {(0, 0): -Ms[i], (0, 1): cat.identity(X)})
        pi[i] = cat.make_map(C.term(i), tgt, cat.mats(blk))
    return LambdaResult(src, P, jQ, ChainMap(src, C, lam), ChainMap(C, jQ, pi))


def lambda_checks(R: LambdaResult) -> dict:
    """Chain map, quasi-iso and split-exactness checks for ``lambda_d`` and ``pi_d``."""
    out = {}
    out["lambda chain map"] = R.lam.is_chain_map()
    out["pi chain map"] = R.pi.is_chain_map()
    out["lambda quasi-iso"] = out["lambda chain map"] and R.lam.is_quasi_iso()
    out["j_* Q_d exact"] = R.jQ.is_exact()
    C = R.phi.complex
    comp_zero, dims_ok, inj, surj, mid = True, True, True, True, True
    for i in C.degrees:
        cat = C.cat
        lam, pi = R.lam.comp(i), R.pi.comp(i)
        for lm, pm, a, b, c in zip(cat.mats(lam), cat.mats(pi), cat.dims(R.source.term(i)),
                                   cat.dims(C.term(i)), cat.dims(R.jQ.term(i))):
            comp_zero &= (pm @ lm).is_zero()
            dims_ok &= a + c == b
            rl, rp = linalg.rank(lm), linalg.rank(pm)
            inj &= rl == a
            surj &= rp == c
            mid &= b - rp == rl
    out["pi o lambda = 0"] = comp_zero
    out["dimension bookkeeping"] = dims_ok
    out["lambda injective"] = inj
    out["pi surjective"] = surj
    out["exact in the middle"] = mid
    out["ok"] = all(out.values())
    return out
