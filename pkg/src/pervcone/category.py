"""Uniform access to the two abelian categories used by complexes.

A complex only needs a handful of operations from its category: direct
sums, block morphisms, zero objects and a way to read a morphism as a
tuple of component matrices (one per "layer": the module for HModules,
``(V, W)`` for cone sheaves).  :class:`ModuleCategory` and
:class:`SheafCategory` implement them.
"""

from __future__ import annotations

from . import linalg
from .field import Field
from .groups import FiniteGroup, HModule, HModuleMap, direct_sum_modules, zero_module
from .matrix import Matrix, block_matrix
from .sheaves import ConeSheaf, SheafMap, direct_sum_sheaves, zero_sheaf


class ModuleCategory:
    layers = 1

    def __init__(self, group: FiniteGroup, field: Field):
        self.group = group
        self.field = field

    def zero(self) -> HModule:
        return zero_module(self.group, self.field)

    def dims(self, obj: HModule) -> tuple:
        return (obj.dim,)

    def size(self, obj: HModule) -> int:
        return obj.dim

    def mats(self, m: HModuleMap) -> tuple:
        return (m.matrix,)

    def make_map(self, src: HModule, tgt: HModule, mats) -> HModuleMap:
        return HModuleMap(src, tgt, mats[0])

    def zero_map(self, src, tgt) -> HModuleMap:
        return HModuleMap(src, tgt, Matrix.zeros(self.field, tgt.dim, src.dim))

    def identity(self, obj) -> HModuleMap:
        return obj.identity_map()

    def direct_sum(self, objs) -> HModule:
        objs = list(objs)
        if not objs:
            return self.zero()
        if len(objs) == 1:
            return objs[0]
        return direct_sum_modules(*objs)

    def block(self, targets, sources, blocks) -> HModuleMap:
        """Block morphism ``sum(sources) -> sum(targets)``; ``blocks[(i, j)]`` maps source j to target i."""
        tgt = self.direct_sum(targets)
        src = self.direct_sum(sources)
        mat = block_matrix(self.field, [t.dim for t in targets], [s.dim for s in sources],
                           {k: b.matrix for k, b in blocks.items() if b is not None})
        return HModuleMap(src, tgt, mat)

    def check_map(self, m: HModuleMap) -> None:
        m.check()

    def subquotient(self, obj: HModule, comps):
        """Object structure on a subquotient given per-layer ``(rep, proj)`` matrices."""
        rep, proj = comps[0]
        acts = [proj @ a @ rep for a in obj.action]
        return HModule(obj.group, obj.field, rep.cols, acts)


class SheafCategory:
    layers = 2

    def __init__(self, group: FiniteGroup, field: Field):
        self.group = group
        self.field = field

    def zero(self) -> ConeSheaf:
        return zero_sheaf(self.group, self.field)

    def dims(self, obj: ConeSheaf) -> tuple:
        return (obj.V.dim, obj.W_dim)

    def size(self, obj: ConeSheaf) -> int:
        return obj.V.dim + obj.W_dim

    def mats(self, m: SheafMap) -> tuple:
        return (m.phi_V, m.phi_W)

    def make_map(self, src, tgt, mats) -> SheafMap:
        return SheafMap(src, tgt, mats[0], mats[1])

    def zero_map(self, src, tgt) -> SheafMap:
        return src.zero_map(tgt)

    def identity(self, obj) -> SheafMap:
        return obj.identity_map()

    def direct_sum(self, objs) -> ConeSheaf:
        objs = list(objs)
        if not objs:
            return self.zero()
        if len(objs) == 1:
            return objs[0]
        return direct_sum_sheaves(*objs)

    def block(self, targets, sources, blocks) -> SheafMap:
        tgt = self.direct_sum(targets)
        src = self.direct_sum(sources)
        f = self.field
        mv = block_matrix(f, [t.V.dim for t in targets], [s.V.dim for s in sources],
                          {k: b.phi_V for k, b in blocks.items() if b is not None})
        mw = block_matrix(f, [t.W_dim for t in targets], [s.W_dim for s in sources],
                          {k: b.phi_W for k, b in blocks.items() if b is not None})
        return SheafMap(src, tgt, mv, mw)

    def check_map(self, m: SheafMap) -> None:
        m.check()

    def subquotient(self, obj: ConeSheaf, comps):
        (repV, projV), (repW, projW) = comps
        acts = [projV @ a @ repV for a in obj.V.action]
        V = HModule(obj.group, obj.field, repV.cols, acts)
        s = projV @ obj.s @ repW
        return ConeSheaf(V, repW.cols, s)


def category_of(obj):
    if isinstance(obj, ConeSheaf):
        return SheafCategory(obj.group, obj.field)
    if isinstance(obj, HModule):
        return ModuleCategory(obj.group, obj.field)
    raise TypeError(f"no category for {type(obj).__name__}")


def subquotient_layer(d_in: Matrix, d_out: Matrix):
    """``ker d_out / im d_in`` as ``(rep, proj)``.

    ``rep`` (n x h) sends cohomology coordinates to representative cocycles;
    ``proj`` (h x n) sends a cocycle to its class (undefined off cocycles).
    """
    f = d_out.field
    n = d_out.cols
    K, sel = linalg.kernel_with_selector(d_out)
    Kl = linalg.selector(f, sel, n)
    B = Kl @ d_in
    P, S = linalg.cokernel_with_section(B)
    return K @ S, P @ Kl
