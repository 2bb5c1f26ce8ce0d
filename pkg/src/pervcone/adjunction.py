"""The functors F, Q and their structural morphisms on k[H]-modules.

Basis conventions (``n = |H|``, ``m = dim E``):

* ``F E`` = functions ``H -> E``; coordinate ``sigma * m + b`` holds ``f(sigma)_b``.
  The action is ``(h f)(sigma) = f(sigma h)``.
* ``Q E`` = functions vanishing at the identity; coordinate
  ``(sigma - 1) * m + b`` for ``sigma != 1``.  Action
  ``(h psi)(sigma) = psi(sigma h) - sigma psi(h)``.
* ``Q^r E`` (tuple model) = normalized cochains ``H^r -> E``; tuples of
  non-identity elements in lexicographic order, first entry most
  significant, then the basis of ``E``.

``Q(Q^r E)`` in the generic model has coordinates ``(sigma, t, b)``; it is
identified with ``Q^{r+1} E`` at ``(t, sigma, b)``, so the outermost ``Q``
becomes the last argument of a cochain.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import linalg
from .groups import HModule, HModuleMap, ModuleError, hom_basis
from .matrix import Matrix, hstack, kron_identity, permutation_matrix, vstack

DEFAULT_CAP = 20_000


class ResourceError(RuntimeError):
    """A construction would exceed the configured dimension cap."""


def _guard(dim: int, cap: int | None, what: str) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if dim > cap:
        raise ResourceError(f"{what} has dimension {dim}, above the cap {cap}")


def _perm_blocks(field, n, m, block_of):
    """Matrix whose row block ``i`` is the identity on column block ``block_of(i)``."""
    one = field.one
    rows = []
    for i in range(n):
        j = block_of(i)
        for b in range(m):
            rows.append({} if j is None else {j * m + b: one})
    return rows


# -- F ----------------------------------------------------------------------------

def F_module(E: HModule, cap: int | None = None) -> HModule:
    G, f = E.group, E.field
    n, m = G.order, E.dim
    _guard(n * m, cap, "F E")
    acts = []
    for h in G.elements:
        rows = _perm_blocks(f, n, m, lambda s: G.mul[s][h])
        acts.append(Matrix(f, n * m, n * m, rows, _trusted=True))
    return HModule(G, f, n * m, acts, label="F")


def F_map(phi: HModuleMap, source: HModule | None = None, target: HModule | None = None) -> HModuleMap:
    n = phi.source.group.order
    source = source or F_module(phi.source)
    target = target or F_module(phi.target)
    return HModuleMap(source, target, kron_identity(n, phi.matrix))


def alpha(E: HModule, FE: HModule | None = None) -> HModuleMap:
    """``(alpha e)(sigma) = sigma e``."""
    FE = FE or F_module(E)
    return HModuleMap(E, FE, vstack(E.field, E.dim, list(E.action)))


def beta(E: HModule) -> Matrix:
    """Evaluation at the identity, ``F E -> E`` (linear, not equivariant)."""
    f = E.field
    m = E.dim
    one = f.one
    return Matrix(f, m, E.group.order * m, [{b: one} for b in range(m)], _trusted=True)


def const(E: HModule) -> Matrix:
    """Constant functions ``c: E -> (F E)^inv``."""
    eye = Matrix.identity(E.field, E.dim)
    return vstack(E.field, E.dim, [eye] * E.group.order)


# -- Q ----------------------------------------------------------------------------

def Q_module(E: HModule, cap: int | None = None) -> HModule:
    G, f = E.group, E.field
    n, m = G.order, E.dim
    dim = (n - 1) * m
    _guard(dim, cap, "Q E")
    p = f.char
    acts = []
    for h in G.elements:
        rows = []
        for s in range(1, n):
            sh = G.mul[s][h]
            neg = E.action[s].row_dicts() if h != 0 else None
            for b in range(m):
                d = {}
                if sh != 0:
                    d[(sh - 1) * m + b] = f.one
                if neg is not None:
                    base = (h - 1) * m
                    for c, v in neg[b].items():
                        w = d.get(base + c, 0) - v
                        if p:
                            w %= p
                        if w:
                            d[base + c] = w
                        else:
                            d.pop(base + c, None)
                rows.append(d)
        acts.append(Matrix(f, dim, dim, rows, _trusted=True))
    return HModule(G, f, dim, acts, label="Q")


def _q_matrix(E: HModule) -> Matrix:
    G, f = E.group, E.field
    n, m = G.order, E.dim
    p = f.char
    rows = []
    for s in range(1, n):
        act = E.action[s].row_dicts()
        for b in range(m):
            d = {s * m + b: f.one}
            for c, v in act[b].items():
                d[c] = (-v) % p if p else -v
            rows.append({k: v for k, v in d.items() if v})
    return Matrix(f, (n - 1) * m, n * m, rows, _trusted=True)


def q_map(E: HModule, FE: HModule | None = None, QE: HModule | None = None) -> HModuleMap:
    """``(q f)(sigma) = f(sigma) - sigma f(1)``."""
    return HModuleMap(FE or F_module(E), QE or Q_module(E), _q_matrix(E))


def Q_map(phi: HModuleMap, source: HModule | None = None, target: HModule | None = None) -> HModuleMap:
    n = phi.source.group.order
    source = source or Q_module(phi.source)
    target = target or Q_module(phi.target)
    return HModuleMap(source, target, kron_identity(n - 1, phi.matrix))


def inclusion_Q(E: HModule) -> Matrix:
    """``s: Q E -> F E``, a function vanishing at 1 viewed as a function; ``q s = 1``."""
    f = E.field
    n, m = E.group.order, E.dim
    rows = [dict() for _ in range(m)]
    one = f.one
    for i in range((n - 1) * m):
        rows.append({i: one})
    return Matrix(f, n * m, (n - 1) * m, rows, _trusted=True)


# -- maps between F F, F Q and Q F ------------------------------------------------------

def alpha_F(E: HModule, FE: HModule | None = None, FFE: HModule | None = None) -> HModuleMap:
    """``alpha_{F E}``: ``(Psi(sigma))(tau) = f(tau sigma)``."""
    FE = FE or F_module(E)
    return alpha(FE, FFE)


def F_alpha(E: HModule, FE: HModule | None = None, FFE: HModule | None = None) -> HModuleMap:
    FE = FE or F_module(E)
    FFE = FFE or F_module(FE)
    return F_map(alpha(E, FE), FE, FFE)


def nu(E: HModule, FE: HModule | None = None, FFE: HModule | None = None) -> HModuleMap:
    """``nu = F beta: F F E -> F E``."""
    FE = FE or F_module(E)
    FFE = FFE or F_module(FE)
    return HModuleMap(FFE, FE, kron_identity(E.group.order, beta(E)))


@dataclass
class AdjunctionMaps:
    """All structural maps around ``F F E``, ``F Q E`` and ``Q F E`` for one module."""

    E: HModule
    FE: HModule
    QE: HModule
    FFE: HModule
    FQE: HModule
    QFE: HModule
    alpha: HModuleMap
    q: HModuleMap
    alpha_F: HModuleMap
    F_alpha: HModuleMap
    F_q: HModuleMap
    q_F: HModuleMap
    alpha_Q: HModuleMap
    Q_alpha: HModuleMap
    nu: HModuleMap
    mu: HModuleMap
    mu_prime: HModuleMap
    gamma: HModuleMap
    h: HModuleMap
    h_inv: HModuleMap


def adjunction_maps(E: HModule, check: bool = True) -> AdjunctionMaps:
    f = E.field
    n = E.group.order
    FE, QE = F_module(E), Q_module(E)
    FFE, FQE, QFE = F_module(FE), F_module(QE), Q_module(FE)
    a = alpha(E, FE)
    q = q_map(E, FE, QE)
    aF = alpha(FE, FFE)
    Fa = F_map(a, FE, FFE)
    Fq = F_map(q, FFE, FQE)
    qF = q_map(FE, FFE, QFE)
    aQ = alpha(QE, FQE)
    Qa = Q_map(a, QE, QFE)
    nu_ = HModuleMap(FFE, FE, kron_identity(n, beta(E)))
    one = Matrix.identity(f, FFE.dim)
    s = inclusion_Q(E)
    mu = HModuleMap(FQE, FFE, (one - Fa.matrix @ nu_.matrix) @ kron_identity(n, s))
    mu_p = HModuleMap(QFE, FFE, (one - aF.matrix @ nu_.matrix) @ inclusion_Q(FE))
    gamma = HModuleMap(QE, FFE, (aF.matrix - Fa.matrix) @ s)
    h = HModuleMap(FQE, QFE, qF.matrix @ mu.matrix)
    h_inv = HModuleMap(QFE, FQE, Fq.matrix @ mu_p.matrix)
    out = AdjunctionMaps(E, FE, QE, FFE, FQE, QFE, a, q, aF, Fa, Fq, qF, aQ, Qa, nu_, mu, mu_p, gamma, h, h_inv)
    if check:
        check_adjunction_identities(out)
    return out


def adjunction_identities(A: AdjunctionMaps) -> dict:
    """Every defining identity as ``name -> bool``."""
    f = A.E.field
    I = lambda M: Matrix.identity(f, M.dim)
    res = {}
    res["nu o alpha_F = 1"] = A.nu.matrix @ A.alpha_F.matrix == I(A.FE)
    res["nu o F alpha = 1"] = A.nu.matrix @ A.F_alpha.matrix == I(A.FE)
    res["mu o F q = 1 - F alpha o nu"] = (A.mu.matrix @ A.F_q.matrix
                                          == I(A.FFE) - A.F_alpha.matrix @ A.nu.matrix)
    res["F q o mu = 1"] = A.F_q.matrix @ A.mu.matrix == I(A.FQE)
    res["mu' o q F = 1 - alpha_F o nu"] = (A.mu_prime.matrix @ A.q_F.matrix
                                           == I(A.FFE) - A.alpha_F.matrix @ A.nu.matrix)
    res["q F o mu' = 1"] = A.q_F.matrix @ A.mu_prime.matrix == I(A.QFE)
    res["gamma o q = alpha_F - F alpha"] = (A.gamma.matrix @ A.q.matrix
                                            == A.alpha_F.matrix - A.F_alpha.matrix)
    res["F q o gamma = alpha_Q"] = A.F_q.matrix @ A.gamma.matrix == A.alpha_Q.matrix
    res["q F o gamma = -Q alpha"] = A.q_F.matrix @ A.gamma.matrix == -A.Q_alpha.matrix
    res["gamma = mu o alpha_Q"] = A.gamma.matrix == A.mu.matrix @ A.alpha_Q.matrix
    res["h o h_inv = 1"] = A.h.matrix @ A.h_inv.matrix == I(A.QFE)
    res["h_inv o h = 1"] = A.h_inv.matrix @ A.h.matrix == I(A.FQE)
    for name in ("mu", "mu_prime", "gamma", "h", "h_inv", "nu", "alpha_F", "F_alpha", "F_q", "q_F"):
        res[f"{name} equivariant"] = getattr(A, name).is_equivariant()
    return res


def check_adjunction_identities(A: AdjunctionMaps) -> None:
    bad = [k for k, v in adjunction_identities(A).items() if not v]
    if bad:
        raise ModuleError("adjunction identities fail: " + ", ".join(bad))


def mu(E):
    return adjunction_maps(E).mu


def mu_prime(E):
    return adjunction_maps(E).mu_prime


def gamma(E):
    return adjunction_maps(E).gamma


def h_iso(E):
    return adjunction_maps(E).h


def hom_sequence_check(A: HModule, B: HModule) -> dict:
    """``Hom(QA, FB) -> Hom(FA, FB) -> Hom(A, FB)`` exact and split by ``f -> nu_B o F f``."""
    FA, FB, QA = F_module(A), F_module(B), Q_module(A)
    FFB = F_module(FB)
    qA = q_map(A, FA, QA).matrix
    aA = alpha(A, FA).matrix
    nuB = nu(B, FB, FFB).matrix
    n = A.group.order
    h1 = hom_basis(QA, FB)
    h2 = hom_basis(FA, FB)
    h3 = hom_basis(A, FB)
    out = {"dims": (len(h1), len(h2), len(h3))}
    f = A.field

    def flat(mats, r, c):
        cols = []
        for X in mats:
            d = {}
            for i, row in enumerate(X.row_dicts()):
                for j, v in row.items():
                    d[i * c + j] = v
            cols.append(d)
        return Matrix(f, len(cols), r * c, cols, _trusted=True).T

    B2 = flat(h2, FB.dim, FA.dim)
    imgs_q = flat([X @ qA for X in h1], FB.dim, FA.dim)
    imgs_a = [X @ aA for X in h2]
    out["composite zero"] = all((X @ qA @ aA).is_zero() for X in h1)
    out["first injective"] = linalg.rank(imgs_q) == len(h1)
    # kernel of restriction along alpha, inside Hom(FA, FB)
    restr = flat(imgs_a, FB.dim, A.dim)
    ker_dim = len(h2) - linalg.rank(restr)
    out["exact in the middle"] = ker_dim == len(h1) and linalg.rank(hstack(f, B2.rows, [B2, imgs_q])) == len(h2)
    sections = [nuB @ kron_identity(n, X) for X in h3]
    out["section equivariant"] = all(HModuleMap(FA, FB, S).is_equivariant() for S in sections)
    out["section splits"] = all(S @ aA == X for S, X in zip(sections, h3))
    out["ok"] = all(v for k, v in out.items() if k != "dims")
    return out


# -- normalized cochains Q^r E ---------------------------------------------------------

def _tuples(n: int, r: int) -> list:
    return list(product(range(1, n), repeat=r))


def _tuple_index(n: int, t) -> int:
    i = 0
    for x in t:
        i = i * (n - 1) + (x - 1)
    return i


def Qr_module(E: HModule, r: int, cap: int | None = None) -> HModule:
    """Normalized ``r``-cochains with the action

    ``(h psi)(h_1..h_r) = sum_i (-1)^{r-i} psi(.., h_i h_{i+1}, ..)
    + (-1)^r h_1 psi(h_2..h_r, h)`` where the tuple is extended by ``h_{r+1} = h``.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return E
    G, f = E.group, E.field
    n, m = G.order, E.dim
    N = (n - 1) ** r
    _guard(N * m, cap, f"Q^{r} E")
    p = f.char
    tuples = _tuples(n, r)
    acts = []
    for h in G.elements:
        rows = []
        for t in tuples:
            ext = t + (h,)
            blocks: dict = {}
            for i in range(r):
                merged = ext[:i] + (G.mul[ext[i]][ext[i + 1]],) + ext[i + 2:]
                if 0 in merged:
                    continue
                sign = 1 if (r - 1 - i) % 2 == 0 else -1
                k = _tuple_index(n, merged)
                blocks[k] = blocks.get(k, 0) + sign
            tail = ext[1:]
            act = None
            if 0 not in tail:
                act = E.action[t[0]].row_dicts()
                ktail = _tuple_index(n, tail)
                sign_t = 1 if r % 2 == 0 else -1
            for b in range(m):
                d = {}
                for k, c in blocks.items():
                    if c:
                        d[k * m + b] = c
                if act is not None:
                    for col, v in act[b].items():
                        key = ktail * m + col
                        d[key] = d.get(key, 0) + sign_t * v
                if p:
                    d = {k: v % p for k, v in d.items() if v % p}
                else:
                    d = {k: f(v) for k, v in d.items() if v}
                rows.append(d)
        acts.append(Matrix(f, N * m, N * m, rows, _trusted=True))
    return HModule(G, f, N * m, acts, label=f"Q^{r}")


def Qr_map(phi: HModuleMap, r: int, source=None, target=None) -> HModuleMap:
    n = phi.source.group.order
    if r == 0:
        return phi
    source = source or Qr_module(phi.source, r)
    target = target or Qr_module(phi.target, r)
    return HModuleMap(source, target, kron_identity((n - 1) ** r, phi.matrix))


def generic_to_tuple(E: HModule, r: int) -> Matrix:
    """Permutation ``Q(Q^r E) -> Q^{r+1} E``: ``(sigma, t, b) -> (t, sigma, b)``."""
    n, m = E.group.order, E.dim
    N = (n - 1) ** r
    perm = []
    for s in range(n - 1):
        for t in range(N):
            for b in range(m):
                perm.append((t * (n - 1) + s) * m + b)
    return permutation_matrix(E.field, perm)


def shift_to_tuple(E: HModule, i: int) -> Matrix:
    """Permutation ``Q^i(Q E) -> Q^{i+1} E``: ``((k_1..k_i), (h_0, b)) -> ((h_0, k_1..k_i), b)``."""
    n, m = E.group.order, E.dim
    N = (n - 1) ** i
    perm = []
    for t in range(N):
        for h0 in range(n - 1):
            for b in range(m):
                perm.append((h0 * N + t) * m + b)
    return permutation_matrix(E.field, perm)


class CochainTower:
    """Lazily built ``Q^r E`` and ``F Q^r E`` with the maps between them."""

    def __init__(self, E: HModule, cap: int | None = None):
        self.E = E
        self.cap = cap
        self._Q = {0: E}
        self._FQ = {}

    def Q(self, r: int) -> HModule:
        if r not in self._Q:
            self._Q[r] = Qr_module(self.E, r, self.cap)
        return self._Q[r]

    def FQ(self, r: int) -> HModule:
        if r not in self._FQ:
            self._FQ[r] = F_module(self.Q(r), self.cap)
        return self._FQ[r]

    def q(self, r: int) -> HModuleMap:
        """``q^r: F Q^r E -> Q^{r+1} E``."""
        return HModuleMap(self.FQ(r), self.Q(r + 1), generic_to_tuple(self.E, r) @ _q_matrix(self.Q(r)))

    def g(self, r: int) -> HModuleMap:
        """``g^r = alpha_{Q^{r+1}} o q^r: F Q^r E -> F Q^{r+1} E``."""
        return HModuleMap(self.FQ(r), self.FQ(r + 1), alpha(self.Q(r + 1), self.FQ(r + 1)).matrix @ self.q(r).matrix)

    def g_via_F(self, r: int) -> HModuleMap:
        """``g^r = (F q^r) o (alpha F Q^r)``, the second route."""
        FQr = self.FQ(r)
        aF = vstack(FQr.field, FQr.dim, list(FQr.action))
        n = self.E.group.order
        return HModuleMap(FQr, self.FQ(r + 1), kron_identity(n, self.q(r).matrix) @ aF)

    def rho(self, r: int) -> Matrix:
        """``rho^r: Q^r E -> Q^{r+1} E``, a linear map of the underlying spaces."""
        return rho_r_matrix(self, r)

    def alpha(self, r: int) -> HModuleMap:
        return alpha(self.Q(r), self.FQ(r))


def rho_r_matrix(T: CochainTower, r: int) -> Matrix:
    """``(rho^r psi)(h_1..h_{r+1}) = psi(h_1..h_r) - (h_{r+1} psi)(h_1..h_r)``."""
    E = T.E
    f = E.field
    n, m = E.group.order, E.dim
    Qr = T.Q(r)
    d = Qr.dim
    blocks = []
    eye = Matrix.identity(f, d)
    for h in range(1, n):
        blocks.append(eye - Qr.action[h])
    # stacked by h_{r+1}, i.e. generic coordinates (h, t, b); reorder to tuples
    return generic_to_tuple(E, r) @ vstack(f, d, blocks)


def qr_map(E: HModule, r: int) -> HModuleMap:
    return CochainTower(E).q(r)


def gr_map(E: HModule, r: int) -> HModuleMap:
    return CochainTower(E).g(r)


def alphar_map(E: HModule, r: int) -> HModuleMap:
    return CochainTower(E).alpha(r)


def rho_r(E: HModule, r: int) -> Matrix:
    return CochainTower(E).rho(r)


# -- the resolution T_d ----------------------------------------------------------------

class ResolutionComplex:
    """``T_d E = F E -> F Q E -> ... -> F Q^{d-1} E -> Q^d E`` in degrees ``[0, d]``."""

    def __init__(self, E: HModule, d: int, cap: int | None = None, tower: CochainTower | None = None):
        if d < 1:
            raise ValueError("the resolution needs d >= 1")
        self.E = E
        self.d = d
        self.tower = tower or CochainTower(E, cap)
        T = self.tower
        self.terms = [T.FQ(i) for i in range(d)] + [T.Q(d)]
        self.diffs = [T.g(i) for i in range(d - 1)] + [T.q(d - 1)]
        self.augmentation = T.alpha(0)

    def complex(self):
        from .complexes import BoundedComplex
        from .category import ModuleCategory
        return BoundedComplex(ModuleCategory(self.E.group, self.E.field), 0, self.terms, self.diffs)

    def augmented_complex(self):
        from .complexes import BoundedComplex
        from .category import ModuleCategory
        return BoundedComplex(ModuleCategory(self.E.group, self.E.field), -1,
                              [self.E] + self.terms, [self.augmentation] + self.diffs)

    def is_exact(self) -> bool:
        """Rank test: ``0 -> E -> T^0 -> ... -> T^d -> 0`` exact everywhere."""
        maps = [self.augmentation.matrix] + [m.matrix for m in self.diffs]
        dims = [self.E.dim] + [t.dim for t in self.terms]
        ranks = [linalg.rank(M) for M in maps]
        if ranks[0] != dims[0]:
            return False
        for k in range(1, len(dims)):
            out_rank = ranks[k] if k < len(ranks) else 0
            if dims[k] - out_rank != ranks[k - 1]:
                return False
        return True

    def dims(self) -> list:
        return [self.E.dim] + [t.dim for t in self.terms]


def truncated_resolution(E: HModule, d: int, cap: int | None = None) -> ResolutionComplex:
    return ResolutionComplex(E, d, cap)


def h_d_map(E: HModule, d: int):
    """Chain map ``h_d: T_d(Q E) -> Q T_{d+1}(E)``.

    Components ``(-1)^{i+1} h_{Q^i E}`` for ``i < d`` and ``(-1)^d Q alpha_{Q^d E}``
    in degree ``d``.  Returns ``(source, target, components)`` with the
    source and target as :class:`~pervcone.complexes.BoundedComplex`.
    """
    from .category import ModuleCategory
    from .complexes import BoundedComplex, ChainMap
    QE = Q_module(E)
    src = ResolutionComplex(QE, d)
    tgt_res = ResolutionComplex(E, d + 1)
    T = tgt_res.tower
    cat = ModuleCategory(E.group, E.field)
    n = E.group.order
    # Q applied to T_{d+1} E, degrees 0..d+1
    qterms = [Q_module(t) for t in tgt_res.terms]
    qdiffs = [Q_map(m, qterms[i], qterms[i + 1]) for i, m in enumerate(tgt_res.diffs)]
    tgt = BoundedComplex(cat, 0, qterms, qdiffs)
    comps = {}
    for i in range(d + 1):
        # identify Q^i(Q E) with Q(Q^i E) through the tuple model of Q^{i+1} E
        to_generic = linalg.inverse(generic_to_tuple(E, i)) @ shift_to_tuple(E, i)
        if i < d:
            A = adjunction_maps(T.Q(i), check=False)
            M = A.h.matrix @ kron_identity(n, to_generic)
            if i % 2 == 0:
                M = -M
        else:
            M = Q_map(alpha(T.Q(d), T.FQ(d)), None, qterms[d]).matrix @ to_generic
            if d % 2:
                M = -M
        comps[i] = HModuleMap(src.terms[i], qterms[i], M)
    return src.complex(), tgt, ChainMap(src.complex(), tgt, comps), src.augmentation, Q_map(alpha(E, tgt_res.terms[0]), QE, qterms[0])


# -- group cohomology ----------------------------------------------------------------------

@dataclass
class CohomologyResult:
    dims: list
    complex_dims: list


def bar_cohomology(E: HModule, n: int, cap: int | None = None) -> int:
    return bar_cohomology_dims(E, n, cap)[n]


def bar_cohomology_dims(E: HModule, top: int, cap: int | None = None) -> list:
    """``dim H^k(H, E)`` for ``k = 0..top`` from the normalized cochain complex ``(Q^r E, rho^r)``."""
    T = CochainTower(E, cap)
    ranks = [linalg.rank(T.rho(r)) for r in range(top + 1)]
    out = []
    for k in range(top + 1):
        prev = ranks[k - 1] if k else 0
        out.append(T.Q(k).dim - ranks[k] - prev)
    return out


def cyclic_cohomology_oracle(E: HModule, n: int) -> int:
    """Cohomology of ``E -(t-1)-> E -N-> E -(t-1)-> ...`` for a cyclic group."""
    G = E.group
    t = G.cyclic_generator()
    if t is None:
        raise ModuleError(f"group {G.name or G.order} is not cyclic")
    f = E.field
    m = E.dim
    eye = Matrix.identity(f, m)
    tm = E.action[t] - eye
    N = Matrix.zeros(f, m, m)
    for g in G.elements:
        N = N + E.action[g]
    if n == 0:
        return m - linalg.rank(tm)
    # odd degrees: ker N / im(t-1); even degrees: ker(t-1) / im N
    return m - linalg.rank(N) - linalg.rank(tm)
