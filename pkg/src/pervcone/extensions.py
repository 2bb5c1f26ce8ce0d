"""Perverse extensions of a local system and the d = 1 quiver dictionary.

For a module ``L`` and perversity ``d`` the three canonical data are

* ``p_direct_image``: ``(L, j_* Q^d L, j_* q^{d-1}, 1)``;
* ``p_extension_by_zero``: ``(L, coker j_* g^{d-2}, can, can)``, with
  ``j_* F L / j_! L`` when ``d = 1``;
* ``intersection_complex``: ``F`` the image of ``j_* q^{d-1}`` inside ``j_* Q^d L``.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .adjunction import CochainTower, alpha, generic_to_tuple, inclusion_Q
from .complexes import BoundedComplex, ChainMap, R_j_star_module, single
from .groups import HModule, HModuleMap
from .matrix import Matrix, vstack
from .perverse import B_d, DatumError, DatumMap, GluingDatum, datum_isomorphism
from .sheaves import (ConeSheaf, SheafMap, cokernel, image, j_lower_star, j_lower_star_F,
                      j_lower_star_map, j_shriek)


def _check_d(d: int) -> None:
    if d < 1:
        raise DatumError("perversity must be at least 1")


def p_direct_image(L: HModule, d: int) -> GluingDatum:
    _check_d(d)
    T = CochainTower(L)
    F = j_lower_star(T.Q(d))
    u = j_lower_star_map(T.q(d - 1), j_lower_star_F(T.Q(d - 1), T.FQ(d - 1)), F)
    return GluingDatum(d, L, F, u, T.Q(d).identity_map(), tower=T)


def _q_section(T: CochainTower, d: int) -> Matrix:
    """A linear section of ``q^{d-1}: F Q^{d-1} L -> Q^d L``."""
    return inclusion_Q(T.Q(d - 1)) @ generic_to_tuple(T.E, d - 1).T


def p_extension_by_zero(L: HModule, d: int) -> GluingDatum:
    _check_d(d)
    T = CochainTower(L)
    tgt = j_lower_star_F(T.Q(d - 1), T.FQ(d - 1))
    if d == 1:
        src = j_shriek(L)
        m = SheafMap(src, tgt, alpha(L, T.FQ(0)).matrix, Matrix.zeros(L.field, L.dim, 0))
    else:
        src = j_lower_star_F(T.Q(d - 2), T.FQ(d - 2))
        m = SheafMap(src, tgt, T.g(d - 2).matrix, T.rho(d - 2))
    F, pr = cokernel(m)
    sigma = HModuleMap(T.Q(d), F.V, pr.phi_V @ _q_section(T, d))
    return GluingDatum(d, L, F, pr, sigma, tower=T)


def intersection_complex(L: HModule, d: int) -> GluingDatum:
    _check_d(d)
    T = CochainTower(L)
    full = p_direct_image(L, d)
    F, inc = image(full.u)
    IVl = linalg.left_inverse(inc.phi_V) if inc.phi_V.cols else Matrix.zeros(L.field, 0, inc.phi_V.rows)
    u = SheafMap(full.u.source, F, linalg.solve(inc.phi_V, full.u.phi_V),
                 linalg.solve(inc.phi_W, full.u.phi_W))
    return GluingDatum(d, L, F, u, HModuleMap(T.Q(d), F.V, IVl), tower=T)


@dataclass
class ExtensionMaps:
    shriek: GluingDatum
    ic: GluingDatum
    star: GluingDatum
    shriek_to_ic: DatumMap
    ic_to_star: DatumMap

    def factorization_ok(self) -> bool:
        """First map epi on ``F``, second mono, composite the canonical ``j_!^p -> j_*^p``."""
        g1, g2 = self.shriek_to_ic.g, self.ic_to_star.g
        epi = all(linalg.rank(m) == m.rows for m in (g1.phi_V, g1.phi_W))
        mono = all(linalg.rank(m) == m.cols for m in (g2.phi_V, g2.phi_W))
        comp = self.ic_to_star @ self.shriek_to_ic
        try:
            DatumMap(self.shriek, self.star, comp.f, comp.g)
        except DatumError:
            return False
        return epi and mono


def extension_maps(L: HModule, d: int) -> ExtensionMaps:
    """``j_!^p L -> j_{!*} L -> j_*^p L`` as data maps with identity on ``L``."""
    sh, ic, st = p_extension_by_zero(L, d), intersection_complex(L, d), p_direct_image(L, d)
    # the middle object is the image of u_star; u_shriek is the cokernel projection of
    # the same source, so g is induced from u_ic through a section of u_shriek
    secV = linalg.right_inverse(sh.u.phi_V) if sh.u.phi_V.rows else Matrix.zeros(L.field, sh.u.phi_V.cols, 0)
    secW = linalg.right_inverse(sh.u.phi_W) if sh.u.phi_W.rows else Matrix.zeros(L.field, sh.u.phi_W.cols, 0)
    g1 = SheafMap(sh.F, ic.F, ic.u.phi_V @ secV, ic.u.phi_W @ secW)
    m1 = DatumMap(sh, ic, L.identity_map(), g1)
    inc = image(st.u)[1]
    m2 = DatumMap(ic, st, L.identity_map(), SheafMap(ic.F, st.F, inc.phi_V, inc.phi_W))
    return ExtensionMaps(sh, ic, st, m1, m2)


# -- comparison with truncations of R j_* L ------------------------------------------

def extension_cohomology_table(L: HModule, d: int) -> dict:
    """Cohomology dims of the three models beside the truncations of ``R j_* L``."""
    R = R_j_star_module(L, d)
    rj = {n: R.cohomology_dims(n) for n in range(0, d + 1)}
    out = {"R j_* L": rj}
    for name, O, cut in (("pstar", p_direct_image(L, d), d), ("ic", intersection_complex(L, d), d - 1),
                         ("pshriek", p_extension_by_zero(L, d), d - 2)):
        K = B_d(O)
        model = {n: K.cohomology_dims(n) for n in range(0, d + 1)}
        if cut >= 0:
            expect = {n: (rj[n] if n <= cut else (0, 0)) for n in range(0, d + 1)}
        else:
            # d = 1: j_!^p L is j_! L itself
            jl = single(j_shriek(L), 0)
            expect = {n: jl.cohomology_dims(n) if n == 0 else (0, 0) for n in range(0, d + 1)}
        out[name] = {"model": model, "expected": expect, "ok": model == expect}
    return out


# -- the d = 1 quiver dictionary ------------------------------------------------------

class QuiverError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class QuiverDatum:
    """``E -u-> M`` and ``v_sigma: M -> E`` for every group element."""

    E: HModule
    M_dim: int
    u: Matrix
    v: list

    def validate(self) -> None:
        G, f = self.E.group, self.E.field
        m = self.E.dim
        if self.u.shape != (self.M_dim, m):
            raise QuiverError("u must map E to M")
        if len(self.v) != G.order or any(x.shape != (m, self.M_dim) for x in self.v):
            raise QuiverError("need one map v_sigma: M -> E per group element")
        eye = Matrix.identity(f, m)
        for s in G.elements:
            a = eye + self.v[s] @ self.u
            if not linalg.is_invertible(a):
                raise QuiverError(f"1 + v_{s} u is not invertible", witness=(s,))
            if a != self.E.action[s]:
                raise QuiverError(f"1 + v_{s} u differs from the action of {s}", witness=(s,))
        for t in G.elements:
            for s in G.elements:
                lhs = self.v[G.mul[t][s]]
                rhs = self.v[t] @ self.u @ self.v[s] + self.v[t] + self.v[s]
                if lhs != rhs:
                    raise QuiverError(f"v_(tau sigma) relation fails for sigma={s}, tau={t}", witness=(s, t))

    def is_valid(self) -> bool:
        try:
            self.validate()
        except QuiverError:
            return False
        return True


def quiver_encode(O: GluingDatum) -> QuiverDatum:
    """``M = i^* F``, ``u = i^* u``, ``v_sigma(y) = -(sigma^{-1} s y)(sigma)``."""
    if O.d != 1:
        raise DatumError("the quiver dictionary is for d = 1")
    G, f = O.group, O.field
    m = O.L.dim
    v = linalg.solve(O.sigma.matrix, O.F.s)          # M -> Q L, generic coordinates
    vs = [Matrix.zeros(f, m, O.F.W_dim)]
    for s in range(1, G.order):
        vs.append(-v.submatrix(list(range((s - 1) * m, s * m)), None))
    out = QuiverDatum(O.L, O.F.W_dim, O.u.phi_W, vs)
    out.validate()
    return out


def quiver_decode(Qd: QuiverDatum) -> GluingDatum:
    Qd.validate()
    E = Qd.E
    T = CochainTower(E)
    QE = T.Q(1)
    s = vstack(E.field, Qd.M_dim, [-x for x in Qd.v[1:]]) if E.group.order > 1 \
        else Matrix.zeros(E.field, 0, Qd.M_dim)
    F = ConeSheaf(QE, Qd.M_dim, s)
    u = SheafMap(j_lower_star_F(E, T.FQ(0)), F, T.q(0).matrix, Qd.u)
    return GluingDatum(1, E, F, u, QE.identity_map(), tower=T)


def quiver_roundtrip(O: GluingDatum, seed: int = 0):
    """An isomorphism ``O -> decode(encode(O))`` or ``None``."""
    return datum_isomorphism(O, quiver_decode(quiver_encode(O)), seed=seed)


# -- splitting for trivial H ------------------------------------------------------------

@dataclass
class Splitting:
    h0: ConeSheaf
    hd: ConeSheaf
    summands: BoundedComplex
    chain_map: ChainMap          # h^0 + h^d[-d] -> K
    ok: bool


def _solve_lift(src: ConeSheaf, tgt: ConeSheaf, constraints) -> SheafMap | None:
    """A sheaf map ``src -> tgt`` meeting affine constraints ``A_k X = B_k`` (per layer)."""
    from .complexes import hom_basis
    basis = hom_basis(src, tgt)
    f = src.field
    rows, rhs = [], []
    for layer, (A, Bm) in constraints:
        imgs = [A @ (b.phi_V if layer == 0 else b.phi_W) for b in basis]
        for i in range(Bm.rows):
            for j in range(Bm.cols):
                rows.append({k: im.row(i)[j] for k, im in enumerate(imgs) if j in im.row(i)})
                rhs.append(Bm.row(i).get(j, f.zero))
    if not basis:
        return None if any(v for v in rhs) else src.zero_map(tgt)
    M = Matrix(f, len(rows), len(basis), rows)
    b = Matrix(f, len(rhs), 1, [{0: v} if v else {} for v in rhs])
    x = linalg.solve_or_none(M, b)
    if x is None:
        return None
    out = src.zero_map(tgt)
    for k, bk in enumerate(basis):
        c = x.row(k).get(0)
        if c:
            out = out + bk.scale(c)
    return out


def splitting_check(K: BoundedComplex, d: int) -> Splitting:
    """Exhibit ``K ~ h^0 K + (h^d K)[-d]`` by solving for lifts of both cohomology objects."""
    if K.cat.group.order != 1:
        raise DatumError("the splitting holds for the trivial group")
    cat = K.cat
    h0, reps0, projs0 = K.cohomology(0)
    hd, repsd, projsd = K.cohomology(d)
    # iota_0: h^0 -> K^0 with d iota_0 = 0 and [iota_0] = 1
    dmats = cat.mats(K.diff(0))
    cons0 = [(k, dmats[k]) for k in range(2)]
    cons0 = [(k, (A, Matrix.zeros(cat.field, A.rows, h0.dims[k]))) for k, A in cons0]
    cons0 += [(k, (projs0[k], Matrix.identity(cat.field, h0.dims[k]))) for k in range(2)]
    i0 = _solve_lift(h0, K.term(0), cons0)
    dm = cat.mats(K.diff(d))
    consd = [(k, (dm[k], Matrix.zeros(cat.field, dm[k].rows, hd.dims[k]))) for k in range(2)]
    consd += [(k, (projsd[k], Matrix.identity(cat.field, hd.dims[k]))) for k in range(2)]
    idd = _solve_lift(hd, K.term(d), consd)
    z = cat.zero()
    if d == 0:
        raise DatumError("perversity must be at least 1")
    terms = [h0] + [z] * (d - 1) + [hd]
    diffs = [cat.zero_map(terms[i], terms[i + 1]) for i in range(d)]
    S = BoundedComplex(cat, 0, terms, diffs)
    if i0 is None or idd is None:
        return Splitting(h0, hd, S, ChainMap(S, K, {}), False)
    f = ChainMap(S, K, {0: i0, d: idd})
    middle_zero = all(not any(K.cohomology_dims(n)) for n in range(1, d))
    ok = f.is_chain_map() and f.is_quasi_iso() and middle_zero
    return Splitting(h0, hd, S, f, ok)
