"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from pervcone.field import GF, QQ
from pervcone.groups import group_by_name, random_module
from pervcone.matrix import Matrix

FIELDS = [GF(2), GF(3), GF(5), QQ]
SMALL_GROUPS = ["C1", "C2", "C3", "C4", "S3"]

fields = st.sampled_from(FIELDS)
groups = st.sampled_from(SMALL_GROUPS).map(group_by_name)


@st.composite
def matrices(draw, field=None, max_rows=6, max_cols=6, rows=None, cols=None):
    f = field or draw(fields)
    r = rows if rows is not None else draw(st.integers(0, max_rows))
    c = cols if cols is not None else draw(st.integers(0, max_cols))
    if f.char:
        elt = st.integers(0, f.char - 1)
    else:
        elt = st.fractions(min_value=-4, max_value=4, max_denominator=3)
    vals = draw(st.lists(st.lists(elt, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix.from_rows(f, vals, cols=c)


@st.composite
def modules(draw, max_dim=3, group_names=None, field=None):
    G = group_by_name(draw(st.sampled_from(group_names or SMALL_GROUPS)))
    f = field or draw(fields)
    dim = draw(st.integers(0, max_dim))
    seed = draw(st.integers(0, 10_000))
    return random_module(G, f, dim, seed=seed, exact=True)


def random_combination(basis, field, rng):
    """Random linear combination of a list of morphisms (None if the list is empty)."""
    if not basis:
        return None
    out = None
    for m in basis:
        c = field.from_json(rng.randrange(field.char) if field.char else rng.randint(-3, 3))
        t = m.scale(c) if hasattr(m, "scale") else m
        out = t if out is None else out + t
    return out


@st.composite
def sheaves(draw, max_dim=2, group_names=None, field=None):
    """Direct sums of j_*, j_! and i_* pieces, so that W and the gluing map vary."""
    from pervcone.sheaves import direct_sum_sheaves, i_lower_star, j_lower_star, j_shriek
    G = group_by_name(draw(st.sampled_from(group_names or SMALL_GROUPS)))
    f = field or draw(fields)
    seed = draw(st.integers(0, 10_000))
    a, b, w = (draw(st.integers(0, max_dim)) for _ in range(3))
    return direct_sum_sheaves(j_lower_star(random_module(G, f, a, seed=seed, exact=True)),
                              j_shriek(random_module(G, f, b, seed=seed + 1, exact=True)),
                              i_lower_star(G, f, w))


def _random_map(A, B, rng):
    from pervcone.category import category_of
    from pervcone.complexes import hom_basis
    m = random_combination(hom_basis(A, B), A.field, rng)
    return m if m is not None else category_of(A).zero_map(A, B)


@st.composite
def complexes(draw, kind="sheaf", max_dim=2, group_names=None, field=None):
    """Three-term complexes ``A -> B -> C`` built as ``B -> coker -> C``, in degrees 0..2."""
    import random
    from pervcone.category import category_of
    from pervcone.complexes import BoundedComplex, _cokernel_object
    if kind == "sheaf":
        objs = sheaves(max_dim=max_dim, group_names=group_names, field=field)
    else:
        objs = modules(max_dim=max_dim, group_names=group_names, field=field)
    A = draw(objs)
    G, f = A.group.name, A.field
    B = draw(objs if False else (sheaves if kind == "sheaf" else modules)(max_dim=max_dim, group_names=[G], field=f))
    C = draw((sheaves if kind == "sheaf" else modules)(max_dim=max_dim, group_names=[G], field=f))
    rng = random.Random(draw(st.integers(0, 10_000)))
    cat = category_of(A)
    d0 = _random_map(A, B, rng)
    Q, proj, _ = _cokernel_object(cat, d0)
    d1 = _random_map(Q, C, rng) @ proj
    return BoundedComplex(cat, 0, [A, B, C], [d0, d1], check=True)


@st.composite
def data(draw, group_names=("C1", "C2", "C3", "S3"), ds=(1, 2), max_dim=2, field=None):
    """Random gluing data ``(d, L, F, u, sigma)``."""
    from pervcone.perverse import random_datum
    L = draw(modules(max_dim=max_dim, group_names=list(group_names), field=field))
    d = draw(st.sampled_from(list(ds)))
    return random_datum(L, d, seed=draw(st.integers(0, 10_000)))
