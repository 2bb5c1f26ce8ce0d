"""JSON encoding of matrices, groups, modules, sheaves, complexes, data and quivers.

Decoders take the JSON path of the value they read so that malformed input is
reported as ``InputError(path, message)``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .field import Field, FieldError
from .groups import FiniteGroup, GroupError, HModule, HModuleMap, ModuleError, group_by_name
from .matrix import DimensionError, Matrix


class InputError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _need(data: Any, key: str, path: str):
    if not isinstance(data, dict):
        raise InputError(path, f"expected an object, got {type(data).__name__}")
    if key not in data:
        raise InputError(f"{path}.{key}", "missing field")
    return data[key]


def _int(v: Any, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError(path, f"expected a non-negative integer, got {v!r}")
    return v


# -- matrices and fields -------------------------------------------------------------

def matrix_to_json(m: Matrix) -> dict:
    f = m.field
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[f.to_json(x) for x in row] for row in m.to_list()]}


def matrix_from_json(data: Any, field: Field, path: str = "$") -> Matrix:
    rows = _int(_need(data, "rows", path), f"{path}.rows")
    cols = _int(_need(data, "cols", path), f"{path}.cols")
    entries = _need(data, "entries", path)
    if not isinstance(entries, list) or len(entries) != rows:
        raise InputError(f"{path}.entries", f"expected {rows} rows")
    out = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"{path}.entries[{i}]", f"expected {cols} entries")
        try:
            out.append([field.from_json(x) for x in row])
        except (ValueError, TypeError, ZeroDivisionError, FieldError) as e:
            raise InputError(f"{path}.entries[{i}]", f"bad field element: {e}") from None
    return Matrix.from_rows(field, out, cols=cols)


def field_from_json(data: Any, path: str = "$") -> Field:
    char = _need(data, "char", path)
    try:
        return Field(_int(char, f"{path}.char"))
    except FieldError as e:
        raise InputError(f"{path}.char", str(e)) from None


def field_from_name(name: str) -> Field:
    s = name.strip().upper()
    if s in ("Q", "QQ", "0"):
        return Field(0)
    if s.startswith("GF"):
        s = s[2:].strip("()")
    try:
        return Field(int(s))
    except (ValueError, FieldError) as e:
        raise InputError("--field", f"cannot parse field {name!r}: {e}") from None


# -- groups and modules ------------------------------------------------------------------

def group_to_json(G: FiniteGroup) -> dict:
    return G.to_json()


def group_from_json(data: Any, path: str = "$") -> FiniteGroup:
    if isinstance(data, str):
        try:
            return group_by_name(data)
        except GroupError as e:
            raise InputError(path, str(e)) from None
    mul = _need(data, "mul", path)
    try:
        return FiniteGroup.from_json(data)
    except (GroupError, TypeError, ValueError) as e:
        raise InputError(f"{path}.mul" if mul is not None else path, str(e)) from None


def module_to_json(E: HModule, with_group: bool = False) -> dict:
    out = E.to_json()
    if with_group:
        out = {"group": group_to_json(E.group), **out}
    return out


def module_from_json(data: Any, group: FiniteGroup | None = None, path: str = "$") -> HModule:
    if isinstance(data, dict) and "group" in data:
        group = group_from_json(data["group"], f"{path}.group")
    if group is None:
        raise InputError(f"{path}.group", "no group given (embed one or pass --group)")
    f = field_from_json(_need(data, "field", path), f"{path}.field")
    dim = _int(_need(data, "dim", path), f"{path}.dim")
    acts = _need(data, "action", path)
    if not isinstance(acts, list):
        raise InputError(f"{path}.action", "expected a list of matrices")
    mats = [matrix_from_json(a, f, f"{path}.action[{i}]") for i, a in enumerate(acts)]
    try:
        return HModule(group, f, dim, mats, check=True)
    except (ModuleError, DimensionError) as e:
        raise InputError(f"{path}.action", str(e)) from None


# -- sheaves and maps ------------------------------------------------------------------------

def sheaf_to_json(F) -> dict:
    return {"V": F.V.to_json(), "W_dim": F.W_dim, "sigma": matrix_to_json(F.s)}


def sheaf_from_json(data: Any, group: FiniteGroup, path: str = "$"):
    from .sheaves import ConeSheaf, SheafError
    V = module_from_json(_need(data, "V", path), group, f"{path}.V")
    w = _int(_need(data, "W_dim", path), f"{path}.W_dim")
    s = matrix_from_json(_need(data, "sigma", path), V.field, f"{path}.sigma")
    try:
        return ConeSheaf(V, w, s, check=True)
    except (SheafError, DimensionError) as e:
        raise InputError(f"{path}.sigma", str(e)) from None


def sheaf_map_to_json(m) -> dict:
    return {"phi_V": matrix_to_json(m.phi_V), "phi_W": matrix_to_json(m.phi_W)}


def sheaf_map_from_json(data: Any, source, target, path: str = "$"):
    from .sheaves import SheafError, SheafMap
    f = source.field
    pv = matrix_from_json(_need(data, "phi_V", path), f, f"{path}.phi_V")
    pw = matrix_from_json(_need(data, "phi_W", path), f, f"{path}.phi_W")
    try:
        return SheafMap(source, target, pv, pw, check=True)
    except (SheafError, DimensionError) as e:
        raise InputError(path, str(e)) from None


# -- complexes -------------------------------------------------------------------------------

def complex_to_json(K) -> dict:
    from .sheaves import ConeSheaf
    is_sheaf = isinstance(K.term(K.lo), ConeSheaf) if K.terms else True
    out = {"category": "sheaf" if is_sheaf else "module", "group": group_to_json(K.cat.group),
           "field": K.cat.field.spec(), "lo": K.lo, "hi": K.hi}
    if is_sheaf:
        out["terms"] = [sheaf_to_json(K.term(n)) for n in K.degrees]
        out["diffs"] = [sheaf_map_to_json(K.diff(n)) for n in K.degrees if n < K.hi]
    else:
        out["terms"] = [K.term(n).to_json() for n in K.degrees]
        out["diffs"] = [matrix_to_json(K.diff(n).matrix) for n in K.degrees if n < K.hi]
    return out


def complex_from_json(data: Any, group: FiniteGroup | None = None, path: str = "$"):
    from .category import ModuleCategory, SheafCategory
    from .complexes import BoundedComplex, ComplexError
    if isinstance(data, dict) and "group" in data:
        group = group_from_json(data["group"], f"{path}.group")
    if group is None:
        raise InputError(f"{path}.group", "no group given (embed one or pass --group)")
    kind = data.get("category", "sheaf") if isinstance(data, dict) else None
    if kind not in ("sheaf", "module"):
        raise InputError(f"{path}.category", f"expected 'sheaf' or 'module', got {kind!r}")
    f = field_from_json(_need(data, "field", path), f"{path}.field")
    lo = _need(data, "lo", path)
    if not isinstance(lo, int):
        raise InputError(f"{path}.lo", "expected an integer")
    terms_j = _need(data, "terms", path)
    diffs_j = _need(data, "diffs", path)
    if not isinstance(terms_j, list) or not isinstance(diffs_j, list) or len(diffs_j) != max(len(terms_j) - 1, 0):
        raise InputError(f"{path}.diffs", "need one differential between consecutive terms")
    if kind == "sheaf":
        cat = SheafCategory(group, f)
        terms = [sheaf_from_json(t, group, f"{path}.terms[{i}]") for i, t in enumerate(terms_j)]
        diffs = [sheaf_map_from_json(dj, terms[i], terms[i + 1], f"{path}.diffs[{i}]")
                 for i, dj in enumerate(diffs_j)]
    else:
        cat = ModuleCategory(group, f)
        terms = [module_from_json(t, group, f"{path}.terms[{i}]") for i, t in enumerate(terms_j)]
        diffs = []
        for i, dj in enumerate(diffs_j):
            m = matrix_from_json(dj, f, f"{path}.diffs[{i}]")
            try:
                hm = HModuleMap(terms[i], terms[i + 1], m, check=True)
            except (ModuleError, DimensionError) as e:
                raise InputError(f"{path}.diffs[{i}]", str(e)) from None
            diffs.append(hm)
    if "hi" in data and data["hi"] != lo + len(terms) - 1:
        raise InputError(f"{path}.hi", "inconsistent with lo and the number of terms")
    try:
        return BoundedComplex(cat, lo, terms, diffs, check=True)
    except (ComplexError, DimensionError) as e:
        raise InputError(f"{path}.diffs", str(e)) from None


# -- gluing data and quivers -----------------------------------------------------------------

def datum_to_json(O) -> dict:
    return {"group": group_to_json(O.group), "d": O.d, "L": O.L.to_json(), "F": sheaf_to_json(O.F),
            "u": sheaf_map_to_json(O.u), "sigma": matrix_to_json(O.sigma.matrix)}


def datum_from_json(data: Any, group: FiniteGroup | None = None, path: str = "$"):
    from .adjunction import CochainTower
    from .perverse import DatumError, GluingDatum
    from .sheaves import SheafError, j_lower_star_F
    if isinstance(data, dict) and "group" in data:
        group = group_from_json(data["group"], f"{path}.group")
    if group is None:
        raise InputError(f"{path}.group", "no group given (embed one or pass --group)")
    d = _need(data, "d", path)
    if not isinstance(d, int) or d < 1:
        raise InputError(f"{path}.d", "perversity must be an integer >= 1")
    L = module_from_json(_need(data, "L", path), group, f"{path}.L")
    F = sheaf_from_json(_need(data, "F", path), group, f"{path}.F")
    T = CochainTower(L)
    src = j_lower_star_F(T.Q(d - 1), T.FQ(d - 1))
    u = sheaf_map_from_json(_need(data, "u", path), src, F, f"{path}.u")
    sig = matrix_from_json(_need(data, "sigma", path), L.field, f"{path}.sigma")
    try:
        return GluingDatum(d, L, F, u, HModuleMap(T.Q(d), F.V, sig), tower=T)
    except (DatumError, SheafError, ModuleError, DimensionError) as e:
        raise InputError(path, f"invalid datum: {e}") from None


def quiver_to_json(Qd) -> dict:
    return {"group": group_to_json(Qd.E.group), "E": Qd.E.to_json(), "M_dim": Qd.M_dim,
            "u": matrix_to_json(Qd.u), "v": [matrix_to_json(x) for x in Qd.v]}


def quiver_from_json(data: Any, group: FiniteGroup | None = None, path: str = "$"):
    from .extensions import QuiverDatum
    if isinstance(data, dict) and "group" in data:
        group = group_from_json(data["group"], f"{path}.group")
    E = module_from_json(_need(data, "E", path), group, f"{path}.E")
    M = _int(_need(data, "M_dim", path), f"{path}.M_dim")
    u = matrix_from_json(_need(data, "u", path), E.field, f"{path}.u")
    vs = _need(data, "v", path)
    if not isinstance(vs, list):
        raise InputError(f"{path}.v", "expected a list of matrices")
    v = [matrix_from_json(x, E.field, f"{path}.v[{i}]") for i, x in enumerate(vs)]
    return QuiverDatum(E, M, u, v)


# -- files -------------------------------------------------------------------------------------

def dumps(obj: Any) -> str:
    """Canonical text form: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def load_file(path: str | Path) -> Any:
    p = Path(path)
    if not p.exists():
        raise InputError(str(p), "file does not exist")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{p}:{e.lineno}:{e.colno}", f"malformed JSON: {e.msg}") from None


def write_file(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))
