"""Finite groups given by multiplication tables, and finite-dimensional k[H]-modules.

Element ``0`` is always the identity.  A module stores one action matrix per
group element, acting on the left: ``action[g] @ action[h] == action[g*h]``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .field import Field
from .matrix import DimensionError, Matrix, block_matrix, direct_sum, kron_identity


class GroupError(ValueError):
    pass


class ModuleError(ValueError):
    pass


class FiniteGroup:
    """A finite group presented by its full multiplication table."""

    def __init__(self, mul: Sequence[Sequence[int]], name: str = "", check: bool = True):
        self.mul = tuple(tuple(int(x) for x in row) for row in mul)
        self.order = len(self.mul)
        self.name = name or f"G{self.order}"
        if check:
            validate_group(self)
        self.inv = tuple(next(h for h in range(self.order) if self.mul[g][h] == 0)
                         for g in range(self.order))
        self.generators = _greedy_generators(self)

    @property
    def identity(self) -> int:
        return 0

    @property
    def elements(self) -> range:
        return range(self.order)

    @property
    def nonidentity(self) -> range:
        return range(1, self.order)

    def m(self, g: int, h: int) -> int:
        return self.mul[g][h]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul[x][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in self.elements for b in self.elements)

    def cyclic_generator(self):
        """An element of full order, or ``None`` if the group is not cyclic."""
        for g in self.elements:
            if self.element_order(g) == self.order:
                return g
        return None

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.mul == other.mul

    def __hash__(self):
        return hash(self.mul)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def to_json(self) -> dict:
        return {"order": self.order, "mul": [list(r) for r in self.mul], "name": self.name}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        mul = data["mul"]
        if "order" in data and int(data["order"]) != len(mul):
            raise GroupError(f"declared order {data['order']} but table has {len(mul)} rows")
        return cls(mul, data.get("name", ""))


def validate_group(G: FiniteGroup) -> None:
    """Exhaustively check the group axioms; raise :class:`GroupError` on the first failure."""
    n = len(G.mul)
    if n == 0:
        raise GroupError("empty multiplication table")
    for i, row in enumerate(G.mul):
        if len(row) != n:
            raise GroupError(f"row {i} has length {len(row)}, expected {n}")
        for x in row:
            if not 0 <= x < n:
                raise GroupError(f"entry {x} in row {i} is not an element index")
    for g in range(n):
        if G.mul[0][g] != g:
            raise GroupError(f"identity axiom fails: mul[0][{g}] = {G.mul[0][g]}")
        if G.mul[g][0] != g:
            raise GroupError(f"identity axiom fails: mul[{g}][0] = {G.mul[g][0]}")
    for g in range(n):
        if not any(G.mul[g][h] == 0 for h in range(n)):
            raise GroupError(f"element {g} has no inverse")
    for a, b, c in itertools.product(range(n), repeat=3):
        if G.mul[G.mul[a][b]][c] != G.mul[a][G.mul[b][c]]:
            raise GroupError(f"associativity fails for ({a}, {b}, {c})")
    for g in range(n):
        h = next(h for h in range(n) if G.mul[g][h] == 0)
        if G.mul[h][g] != 0:
            raise GroupError(f"inverse of {g} is not two-sided")


def _greedy_generators(G: FiniteGroup) -> tuple:
    gens: list = []
    span = {0}
    for g in range(1, G.order):
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        span = set(span)
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = G.mul[x][s]
                if y not in span:
                    span.add(y)
                    frontier.append(y)
    return tuple(gens)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], f"C{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """S_n on permutations in lexicographic order; ``(ab)(i) = a(b(i))``."""
    perms = sorted(itertools.permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    mul = [[idx[tuple(a[b[i]] for i in range(n))] for b in perms] for a in perms]
    return FiniteGroup(mul, f"S{n}")


def group_by_name(name: str) -> FiniteGroup:
    name = name.strip().upper()
    if name.startswith("C") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    raise GroupError(f"unknown group name {name!r}; use Cn or Sn")


# -- modules ------------------------------------------------------------------

class HModule:
    """A left k[H]-module: one ``dim x dim`` matrix per group element."""

    __slots__ = ("group", "field", "dim", "action", "_inv_basis", "label")

    def __init__(self, group: FiniteGroup, field: Field, dim: int, action: Sequence[Matrix],
                 check: bool = False, label: str = ""):
        self.group = group
        self.field = field
        self.dim = int(dim)
        self.action = tuple(action)
        self._inv_basis = None
        self.label = label
        if len(self.action) != group.order:
            raise ModuleError(f"expected {group.order} action matrices, got {len(self.action)}")
        for g, a in enumerate(self.action):
            if a.shape != (self.dim, self.dim):
                raise ModuleError(f"action[{g}] has shape {a.shape}, expected {(self.dim, self.dim)}")
            if a.field != field:
                raise ModuleError(f"action[{g}] is over {a.field}, expected {field}")
        if check:
            self.check()

    def check(self) -> None:
        """Verify the module axioms exhaustively."""
        G = self.group
        if self.action[0] != Matrix.identity(self.field, self.dim):
            raise ModuleError("action of the identity element is not the identity matrix")
        for g in G.elements:
            for h in G.elements:
                if self.action[g] @ self.action[h] != self.action[G.mul[g][h]]:
                    raise ModuleError(f"action[{g}] @ action[{h}] != action[{G.mul[g][h]}]")

    def rho(self, g: int) -> Matrix:
        return self.action[g]

    def identity_map(self) -> "HModuleMap":
        return HModuleMap(self, self, Matrix.identity(self.field, self.dim))

    def zero_map(self, target: "HModule") -> "HModuleMap":
        return HModuleMap(self, target, Matrix.zeros(self.field, target.dim, self.dim))

    def invariants_basis(self) -> Matrix:
        if self._inv_basis is None:
            self._inv_basis = invariants_basis(self)
        return self._inv_basis

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"HModule<{self.group.name} {self.field} dim={self.dim}{tag}>"

    def to_json(self) -> dict:
        from .io import matrix_to_json
        return {"field": self.field.spec(), "dim": self.dim,
                "action": [matrix_to_json(a) for a in self.action]}


def zero_module(G: FiniteGroup, field: Field) -> HModule:
    z = Matrix.zeros(field, 0, 0)
    return HModule(G, field, 0, [z] * G.order)


def trivial_module(G: FiniteGroup, field: Field, dim: int) -> HModule:
    eye = Matrix.identity(field, dim)
    return HModule(G, field, dim, [eye] * G.order, label="trivial")


def _perm_action(field: Field, images: Sequence[int]) -> Matrix:
    one = field.one
    n = len(images)
    rows = [dict() for _ in range(n)]
    for j, i in enumerate(images):
        rows[i][j] = one
    return Matrix(field, n, n, rows, _trusted=True)


def regular_module(G: FiniteGroup, field: Field) -> HModule:
    """k[H] with basis the group elements and ``g . e_h = e_{gh}``."""
    acts = [_perm_action(field, [G.mul[g][h] for h in G.elements]) for g in G.elements]
    return HModule(G, field, G.order, acts, label="regular")


def coset_decomposition(G: FiniteGroup, subgroup: Sequence[int]) -> list:
    """Left cosets ``xS`` in order of their smallest representative."""
    S = sorted(set(int(s) for s in subgroup))
    if 0 not in S or any(G.mul[a][b] not in S for a in S for b in S):
        raise GroupError(f"{S} is not a subgroup")
    cosets, seen = [], set()
    for x in G.elements:
        if x in seen:
            continue
        c = tuple(sorted(G.mul[x][s] for s in S))
        seen.update(c)
        cosets.append(c)
    return cosets


def permutation_module(G: FiniteGroup, field: Field, subgroup: Sequence[int]) -> HModule:
    """The permutation module on the left cosets of ``subgroup``."""
    cosets = coset_decomposition(G, subgroup)
    where = {x: i for i, c in enumerate(cosets) for x in c}
    acts = [_perm_action(field, [where[G.mul[g][c[0]]] for c in cosets]) for g in G.elements]
    return HModule(G, field, len(cosets), acts, label="permutation")


def subgroups(G: FiniteGroup) -> list:
    """All subgroups (brute force, suitable for tiny groups)."""
    out = set()
    for g in G.elements:
        # cyclic subgroups and pairwise joins are enough for order <= 8 tables
        out.add(_closure(G, [g]))
    base = list(out)
    for a in base:
        for b in base:
            out.add(_closure(G, list(a) + list(b)))
    return sorted(out, key=lambda s: (len(s), s))


def _closure(G: FiniteGroup, gens) -> tuple:
    span = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for s in gens:
            y = G.mul[x][s]
            if y not in span:
                span.add(y)
                frontier.append(y)
    return tuple(sorted(span))


def direct_sum_modules(*mods: HModule) -> HModule:
    if not mods:
        raise ModuleError("direct sum of nothing")
    G, f = mods[0].group, mods[0].field
    acts = [direct_sum(f, *[m.action[g] for m in mods]) for g in G.elements]
    return HModule(G, f, sum(m.dim for m in mods), acts)


def conjugate_module(E: HModule, P: Matrix, P_inv: Matrix | None = None) -> HModule:
    """The module with action ``P^{-1} action[g] P`` (basis change by ``P``)."""
    if P_inv is None:
        P_inv = linalg.inverse(P)
    acts = [P_inv @ a @ P for a in E.action]
    return HModule(E.group, E.field, E.dim, acts, label=E.label)


def random_invertible(field: Field, n: int, rng: random.Random) -> tuple:
    """A random invertible matrix and its inverse.

    Over Q the matrix is a product of integer elementary matrices, so it
    is unimodular and both it and its inverse have integer entries.
    """
    eye = Matrix.identity(field, n)
    if n == 0:
        return eye, eye
    if field.is_rational:
        P, Pi = eye, eye
        for _ in range(2 * n):
            i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
            if i == j:
                s = field(rng.choice([-1, 1]))
                D = Matrix(field, n, n, [{k: (s if k == i else 1)} for k in range(n)])
                P, Pi = P @ D, D @ Pi
                continue
            c = rng.choice([-2, -1, 1, 2])
            E = eye + Matrix.from_entries(field, n, n, [(i, j, c)])
            Ei = eye + Matrix.from_entries(field, n, n, [(i, j, -c)])
            P, Pi = P @ E, Ei @ Pi
        return P, Pi
    while True:
        P = Matrix.from_rows(field, [[field.random_element(rng) for _ in range(n)] for _ in range(n)])
        if linalg.is_invertible(P):
            return P, linalg.inverse(P)


def random_module(G: FiniteGroup, field: Field, dim_budget: int, seed: int, exact: bool = False) -> HModule:
    """A random valid module of dimension at most ``dim_budget``.

    Built as a direct sum of trivial, regular and coset-permutation modules
    and conjugated by a random invertible matrix.  With ``exact=True`` the
    dimension is exactly ``dim_budget`` (padding with trivial summands).
    """
    rng = random.Random(seed)
    subs = [s for s in subgroups(G) if len(s) < G.order]
    target = dim_budget if exact else rng.randint(0, dim_budget)
    parts = []
    left = target
    while left > 0:
        kinds = ["trivial"]
        if G.order <= left:
            kinds.append("regular")
        fitting = [s for s in subs if G.order // len(s) <= left]
        if fitting:
            kinds.append("permutation")
        kind = rng.choice(kinds)
        if kind == "trivial":
            m = trivial_module(G, field, 1)
        elif kind == "regular":
            m = regular_module(G, field)
        else:
            m = permutation_module(G, field, rng.choice(fitting))
        parts.append(m)
        left -= m.dim
    if not parts:
        return zero_module(G, field)
    E = direct_sum_modules(*parts)
    P, Pi = random_invertible(field, E.dim, rng)
    return conjugate_module(E, P, Pi)


def invariants_basis(E: HModule) -> Matrix:
    """Columns spanning ``E^H``, the common fixed vectors of all generators."""
    f = E.field
    if E.dim == 0:
        return Matrix.zeros(f, 0, 0)
    eye = Matrix.identity(f, E.dim)
    gens = E.group.generators
    if not gens:
        return eye
    from .matrix import vstack
    stacked = vstack(f, E.dim, [E.action[g] - eye for g in gens])
    return linalg.kernel_basis(stacked)


# -- maps -------------------------------------------------------------------------

class HModuleMap:
    """An equivariant linear map ``source -> target``."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: HModule, target: HModule, matrix: Matrix, check: bool = False):
        if matrix.shape != (target.dim, source.dim):
            raise DimensionError(
                f"map matrix has shape {matrix.shape}, expected {(target.dim, source.dim)} "
                f"for {source} -> {target}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            self.check()

    def is_equivariant(self) -> bool:
        A = self.matrix
        return all(A @ self.source.action[g] == self.target.action[g] @ A
                   for g in self.source.group.generators)

    def check(self) -> None:
        for g in self.source.group.generators:
            if self.matrix @ self.source.action[g] != self.target.action[g] @ self.matrix:
                raise ModuleError(f"map is not equivariant for group element {g}")

    def __matmul__(self, other: "HModuleMap") -> "HModuleMap":
        if other.target.dim != self.source.dim:
            raise DimensionError("composition of incompatible module maps")
        return HModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other):
        return HModuleMap(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other):
        return HModuleMap(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self):
        return HModuleMap(self.source, self.target, -self.matrix)

    def scale(self, c):
        return HModuleMap(self.source, self.target, self.matrix.scale(c))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __eq__(self, other):
        return isinstance(other, HModuleMap) and self.matrix == other.matrix

    def __repr__(self):
        return f"HModuleMap<{self.source.dim}->{self.target.dim}>"


def hom_basis(A: HModule, B: HModule) -> list:
    """Basis of ``Hom_H(A, B)`` as a list of matrices (``B.dim x A.dim``).

    Solves ``X rho_A(g) = rho_B(g) X`` for the generators ``g``.
    """
    f = A.field
    a, b = A.dim, B.dim
    n = a * b
    if n == 0:
        return []
    rows = []
    for g in A.group.generators:
        RA = A.action[g].row_dicts()
        RAc = A.action[g].columns()
        RB = B.action[g].row_dicts()
        p = f.char
        for i in range(b):
            for k in range(a):
                eq = {}
                # (X rho_A)[i,k] = sum_j X[i,j] rho_A[j,k]
                for j, v in RAc[k].items():
                    eq[i * a + j] = eq.get(i * a + j, 0) + v
                # -(rho_B X)[i,k] = -sum_l rho_B[i,l] X[l,k]
                for l, v in RB[i].items():
                    eq[l * a + k] = eq.get(l * a + k, 0) - v
                if p:
                    eq = {c: w % p for c, w in eq.items() if w % p}
                else:
                    eq = {c: w for c, w in eq.items() if w}
                if eq:
                    rows.append(eq)
        del RA
    if not rows:
        K = Matrix.identity(f, n)
    else:
        K = linalg.kernel_basis(Matrix(f, len(rows), n, rows, _trusted=True))
    out = []
    for c in K.columns():
        out.append(Matrix(f, b, a, _unflatten(c, b, a), _trusted=True))
    return out


def _unflatten(col: dict, b: int, a: int):
    rows = [dict() for _ in range(b)]
    for idx, v in col.items():
        rows[idx // a][idx % a] = v
    return rows
