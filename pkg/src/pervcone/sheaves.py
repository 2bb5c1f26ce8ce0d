"""Constructible sheaves on the cone as triples ``(V, W, s)``.

``V`` is the k[H]-module on the open stratum, ``W`` the fibre at the vertex
(a bare vector space of dimension ``W_dim``) and ``s: W -> V`` the gluing
map, whose image must consist of H-invariant vectors.  The gluing map is
stored already composed with the inclusion ``V^H -> V``; :attr:`sigma`
gives it in coordinates of :func:`~pervcone.groups.invariants_basis`.
"""

from __future__ import annotations

from . import linalg
from .groups import FiniteGroup, HModule, HModuleMap, ModuleError, zero_module
from .field import Field
from .matrix import DimensionError, Matrix, direct_sum, vstack


class SheafError(ValueError):
    pass


class ConeSheaf:
    __slots__ = ("V", "W_dim", "s", "s_left", "label")

    def __init__(self, V: HModule, W_dim: int, s: Matrix, s_left: Matrix | None = None,
                 check: bool = False, label: str = ""):
        if s.shape != (V.dim, W_dim):
            raise DimensionError(f"gluing map has shape {s.shape}, expected {(V.dim, W_dim)}")
        self.V = V
        self.W_dim = int(W_dim)
        self.s = s
        self.s_left = s_left
        self.label = label
        if check:
            self.check()

    @property
    def group(self) -> FiniteGroup:
        return self.V.group

    @property
    def field(self) -> Field:
        return self.V.field

    @property
    def dims(self):
        return (self.V.dim, self.W_dim)

    def check(self) -> None:
        eye = Matrix.identity(self.field, self.V.dim)
        for g in self.group.generators:
            if not ((self.V.action[g] - eye) @ self.s).is_zero():
                raise SheafError(f"gluing map leaves the invariants under group element {g}")
        if self.s_left is not None and self.s_left @ self.s != Matrix.identity(self.field, self.W_dim):
            raise SheafError("stored left inverse of the gluing map is wrong")

    @property
    def sigma(self) -> Matrix:
        """Gluing map in coordinates of the invariant basis of ``V``."""
        B = self.V.invariants_basis()
        return linalg.solve(B, self.s)

    def identity_map(self) -> "SheafMap":
        f = self.field
        return SheafMap(self, self, Matrix.identity(f, self.V.dim), Matrix.identity(f, self.W_dim))

    def zero_map(self, target: "ConeSheaf") -> "SheafMap":
        f = self.field
        return SheafMap(self, target, Matrix.zeros(f, target.V.dim, self.V.dim),
                        Matrix.zeros(f, target.W_dim, self.W_dim))

    def is_zero(self) -> bool:
        return self.V.dim == 0 and self.W_dim == 0

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"ConeSheaf<V={self.V.dim}, W={self.W_dim}{tag}>"


class SheafMap:
    """A morphism of triples: ``phi_V`` equivariant, ``phi_W`` linear, compatible with gluing."""

    __slots__ = ("source", "target", "phi_V", "phi_W")

    def __init__(self, source: ConeSheaf, target: ConeSheaf, phi_V: Matrix, phi_W: Matrix,
                 check: bool = False):
        if phi_V.shape != (target.V.dim, source.V.dim):
            raise DimensionError(f"phi_V has shape {phi_V.shape}, expected {(target.V.dim, source.V.dim)}")
        if phi_W.shape != (target.W_dim, source.W_dim):
            raise DimensionError(f"phi_W has shape {phi_W.shape}, expected {(target.W_dim, source.W_dim)}")
        self.source = source
        self.target = target
        self.phi_V = phi_V
        self.phi_W = phi_W
        if check:
            self.check()

    def check(self) -> None:
        HModuleMap(self.source.V, self.target.V, self.phi_V).check()
        if self.target.s @ self.phi_W != self.phi_V @ self.source.s:
            raise SheafError("sheaf map does not commute with the gluing maps")

    def is_valid(self) -> bool:
        try:
            self.check()
        except (ModuleError, SheafError):
            return False
        return True

    @property
    def V_map(self) -> HModuleMap:
        return HModuleMap(self.source.V, self.target.V, self.phi_V)

    def is_zero(self) -> bool:
        return self.phi_V.is_zero() and self.phi_W.is_zero()

    def __matmul__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(other.source, self.target, self.phi_V @ other.phi_V, self.phi_W @ other.phi_W)

    def __add__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(self.source, self.target, self.phi_V + other.phi_V, self.phi_W + other.phi_W)

    def __sub__(self, other: "SheafMap") -> "SheafMap":
        return SheafMap(self.source, self.target, self.phi_V - other.phi_V, self.phi_W - other.phi_W)

    def __neg__(self) -> "SheafMap":
        return SheafMap(self.source, self.target, -self.phi_V, -self.phi_W)

    def scale(self, c) -> "SheafMap":
        return SheafMap(self.source, self.target, self.phi_V.scale(c), self.phi_W.scale(c))

    def __eq__(self, other):
        return isinstance(other, SheafMap) and self.phi_V == other.phi_V and self.phi_W == other.phi_W

    def __repr__(self):
        return f"SheafMap<{self.source.dims}->{self.target.dims}>"


# -- restriction functors -------------------------------------------------------

def j_upper_star(F: ConeSheaf) -> HModule:
    return F.V


def i_upper_star(F: ConeSheaf) -> int:
    return F.W_dim


def j_upper_star_map(phi: SheafMap) -> HModuleMap:
    return phi.V_map


# -- extension functors -----------------------------------------------------------

def j_lower_star(E: HModule, inv_basis: Matrix | None = None, inv_left: Matrix | None = None) -> ConeSheaf:
    """``(E, E^H, inclusion)``; an explicit invariant basis may be supplied."""
    if inv_basis is None:
        B, sel = linalg.kernel_with_selector(_stack_fixed(E))
        inv_left = linalg.selector(E.field, sel, E.dim)
    else:
        B = inv_basis
    return ConeSheaf(E, B.cols, B, inv_left)


def _stack_fixed(E: HModule) -> Matrix:
    f = E.field
    eye = Matrix.identity(f, E.dim)
    gens = E.group.generators
    if not gens:
        return Matrix.zeros(f, 0, E.dim)
    return vstack(f, E.dim, [E.action[g] - eye for g in gens])


def j_lower_star_map(f: HModuleMap, source: ConeSheaf | None = None,
                     target: ConeSheaf | None = None) -> SheafMap:
    """``j_*`` of an equivariant map, between given ``j_*`` sheaves."""
    if source is None:
        source = j_lower_star(f.source)
    if target is None:
        target = j_lower_star(f.target)
    img = f.matrix @ source.s
    if target.s_left is not None:
        phi_W = target.s_left @ img
        if target.s @ phi_W != img:
            raise SheafError("map does not preserve invariants")
    else:
        phi_W = linalg.solve(target.s, img)
    return SheafMap(source, target, f.matrix, phi_W)


def j_shriek(E: HModule) -> ConeSheaf:
    return ConeSheaf(E, 0, Matrix.zeros(E.field, E.dim, 0))


def j_shriek_map(f: HModuleMap) -> SheafMap:
    return SheafMap(j_shriek(f.source), j_shriek(f.target), f.matrix, Matrix.zeros(f.matrix.field, 0, 0))


def i_lower_star(G: FiniteGroup, field: Field, W_dim: int) -> ConeSheaf:
    return ConeSheaf(zero_module(G, field), W_dim, Matrix.zeros(field, 0, W_dim))


def i_lower_star_map(source: ConeSheaf, target: ConeSheaf, phi_W: Matrix) -> SheafMap:
    return SheafMap(source, target, Matrix.zeros(phi_W.field, 0, 0), phi_W)


def zero_sheaf(G: FiniteGroup, field: Field) -> ConeSheaf:
    return i_lower_star(G, field, 0)


def direct_sum_sheaves(*Fs: ConeSheaf) -> ConeSheaf:
    from .groups import direct_sum_modules
    if not Fs:
        raise SheafError("direct sum of nothing")
    f = Fs[0].field
    V = direct_sum_modules(*[F.V for F in Fs])
    s = direct_sum(f, *[F.s for F in Fs])
    s_left = None
    if all(F.s_left is not None for F in Fs):
        s_left = direct_sum(f, *[F.s_left for F in Fs])
    return ConeSheaf(V, sum(F.W_dim for F in Fs), s, s_left)


# -- kernels and cokernels ------------------------------------------------------------

def _sub_module(V: HModule, K: Matrix, Kleft: Matrix) -> HModule:
    acts = [Kleft @ a @ K for a in V.action]
    return HModule(V.group, V.field, K.cols, acts)


def kernel(phi: SheafMap):
    """Kernel sheaf and its inclusion ``SheafMap``."""
    F = phi.source
    f = F.field
    KV, selV = linalg.kernel_with_selector(phi.phi_V)
    KW, selW = linalg.kernel_with_selector(phi.phi_W)
    KVl = linalg.selector(f, selV, F.V.dim)
    V = _sub_module(F.V, KV, KVl)
    s = KVl @ F.s @ KW
    if KV @ s != F.s @ KW:
        raise SheafError("gluing map does not restrict to the kernel")
    S = ConeSheaf(V, KW.cols, s, check=True)
    return S, SheafMap(S, F, KV, KW)


def cokernel(phi: SheafMap):
    """Cokernel sheaf and its projection ``SheafMap``."""
    G = phi.target
    f = G.field
    PV, SV = linalg.cokernel_with_section(phi.phi_V)
    PW, SW = linalg.cokernel_with_section(phi.phi_W)
    acts = [PV @ a @ SV for a in G.V.action]
    V = HModule(G.group, f, PV.rows, acts)
    s = PV @ G.s @ SW
    if s @ PW != PV @ G.s:
        raise SheafError("induced gluing map on the cokernel is not well defined")
    C = ConeSheaf(V, PW.rows, s, check=True)
    return C, SheafMap(G, C, PV, PW)


def image(phi: SheafMap):
    """Image sheaf with its inclusion into the target."""
    T = phi.target
    f = T.field
    IV = linalg.image_basis(phi.phi_V)
    IW = linalg.image_basis(phi.phi_W)
    IVl = linalg.left_inverse(IV) if IV.cols else Matrix.zeros(f, 0, T.V.dim)
    IWl = linalg.left_inverse(IW) if IW.cols else Matrix.zeros(f, 0, T.W_dim)
    V = _sub_module(T.V, IV, IVl)
    s = IVl @ T.s @ IW
    S = ConeSheaf(V, IW.cols, s, check=True)
    return S, SheafMap(S, T, IV, IW)


def j_lower_star_F(M: HModule, FM: HModule | None = None) -> ConeSheaf:
    """``j_* F M``: constant functions as invariant basis, evaluation at 1 as its left inverse."""
    from .adjunction import F_module, beta, const
    FM = FM or F_module(M)
    return ConeSheaf(FM, M.dim, const(M), beta(M), label="j_*F")


def j_lower_star_F_map(b: Matrix, source: ConeSheaf, target: ConeSheaf) -> SheafMap:
    """``j_* F b`` for a k-linear ``b: M -> M'`` between ``j_* F`` sheaves."""
    from .matrix import kron_identity
    n = source.group.order
    return SheafMap(source, target, kron_identity(n, b), b)
