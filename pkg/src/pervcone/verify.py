"""Verification suites over a grid of groups, fields, module dimensions and perversities.

Each suite yields one :class:`Record` per instance.  A failing record carries
the offending input as JSON so that it can be fed back to the CLI.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterator

from . import adjunction
from .adjunction import (F_module, adjunction_identities, adjunction_maps, bar_cohomology_dims,
                         cyclic_cohomology_oracle, hom_sequence_check, truncated_resolution)
from .complexes import homotopy_hom
from .extensions import (extension_cohomology_table, extension_maps, quiver_encode, quiver_roundtrip,
                         splitting_check)
from .field import Field
from .groups import FiniteGroup, group_by_name, random_module, trivial_module
from .io import datum_to_json, module_to_json
from .perverse import (B_d, B_d_map, D_d, Phi, datum_hom_dim, datum_isomorphism, is_perverse,
                       lambda_checks, lambda_d, random_datum, xi1_relation_holds)

GRIDS = {
    "smoke": {"groups": ["C1", "C2", "C3"], "fields": [2, 3, 0], "dims": [1, 2], "ds": [1, 2], "samples": 2},
    "default": {"groups": ["C1", "C2", "C3", "C4", "S3"], "fields": [2, 3, 5, 0], "dims": [1, 2],
                "ds": [1, 2], "samples": 2},
    "full": {"groups": ["C1", "C2", "C3", "C4", "S3"], "fields": [2, 3, 5, 0], "dims": [1, 2, 3],
             "ds": [1, 2, 3], "samples": 50},
}

SUITES: dict[str, Callable] = {}


@dataclass
class Record:
    suite: str
    instance: dict
    ok: bool
    detail: str = ""
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {"suite": self.suite, "instance": self.instance, "ok": self.ok, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    suite: str
    grid: dict
    seed: int
    records: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.ok]

    def to_json(self) -> dict:
        return {"suite": self.suite, "grid": self.grid, "seed": self.seed, "ok": self.ok,
                "checked": len(self.records), "failed": len(self.failures),
                "records": [r.to_json() for r in self.records]}


@contextlib.contextmanager
def dimension_cap(cap: int | None):
    old = adjunction.DEFAULT_CAP
    if cap is not None:
        adjunction.DEFAULT_CAP = cap
    try:
        yield
    finally:
        adjunction.DEFAULT_CAP = old


def suite(name: str):
    def deco(fn):
        SUITES[name] = fn
        return fn
    return deco


def _points(grid: dict, seed: int, need_d: bool = True) -> Iterator:
    for gname in grid["groups"]:
        G = group_by_name(gname)
        for p in grid["fields"]:
            fld = Field(p)
            for dim in grid["dims"]:
                for d in (grid["ds"] if need_d else [None]):
                    yield G, fld, dim, d


def _inst(G: FiniteGroup, fld: Field, dim: int, d, sample: int | None = None, **extra) -> dict:
    out = {"group": G.name, "field": fld.char, "dim": dim}
    if d is not None:
        out["d"] = d
    if sample is not None:
        out["sample"] = sample
    out.update(extra)
    return out


def _module_seed(seed: int, dim: int, k: int = 0) -> int:
    return seed * 1009 + dim * 31 + k


def _datum_seed(seed: int, sample: int) -> int:
    return seed * 7919 + sample


@suite("resolution-exactness")
def suite_resolution(grid: dict, seed: int) -> Iterator[Record]:
    for G, fld, dim, d in _points(grid, seed):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        ok = truncated_resolution(L, d).is_exact()
        yield Record("resolution-exactness", _inst(G, fld, dim, d), ok,
                     "" if ok else "augmented resolution not exact",
                     None if ok else {"module": module_to_json(L, with_group=True), "d": d})


@suite("adjunction")
def suite_adjunction(grid: dict, seed: int) -> Iterator[Record]:
    for G, fld, dim, _ in _points(grid, seed, need_d=False):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        ids = adjunction_identities(adjunction_maps(L, check=False))
        seq = hom_sequence_check(L, random_module(G, fld, dim, seed=_module_seed(seed, dim, 1), exact=True))
        bad = [k for k, v in ids.items() if not v] + ([] if seq["ok"] else ["Hom sequence"])
        yield Record("adjunction", _inst(G, fld, dim, None), not bad, ", ".join(bad),
                     {"module": module_to_json(L, with_group=True)} if bad else None)


@suite("cohomology")
def suite_cohomology(grid: dict, seed: int) -> Iterator[Record]:
    top = 4
    for G, fld, dim, _ in _points(grid, seed, need_d=False):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        bar = bar_cohomology_dims(L, top)
        bad = []
        if G.cyclic_generator() is not None:
            oracle = [cyclic_cohomology_oracle(L, n) for n in range(top + 1)]
            if bar != oracle:
                bad.append(f"bar {bar} != oracle {oracle}")
        shap = bar_cohomology_dims(F_module(L), top)[1:]
        if any(shap):
            bad.append(f"H^n(H, F E) = {shap} for n = 1..{top}")
        yield Record("cohomology", _inst(G, fld, dim, None, bar=bar), not bad, "; ".join(bad),
                     {"module": module_to_json(L, with_group=True)} if bad else None)


def _datum_records(name: str, grid: dict, seed: int, check, max_d: int | None = None,
                   max_order: int | None = None) -> Iterator[Record]:
    for G, fld, dim, d in _points(grid, seed):
        if (max_d and d > max_d) or (max_order and G.order > max_order):
            continue
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        for k in range(grid.get("samples", 1)):
            O = random_datum(L, d, seed=_datum_seed(seed, k))
            bad = check(O)
            yield Record(name, _inst(G, fld, dim, d, k), not bad, "; ".join(bad),
                         {"datum": datum_to_json(O)} if bad else None)


@suite("perversity")
def suite_perversity(grid: dict, seed: int) -> Iterator[Record]:
    def check(O):
        bad = []
        B = B_d(O)
        r = is_perverse(B, O.d)
        if not r:
            bad.append(f"B_d: {r}")
        P = Phi(B)
        r = is_perverse(P.complex, O.d - 1)
        if not r:
            bad.append(f"Phi: {r}")
        if not xi1_relation_holds(B, P):
            bad.append("xi1 relation")
        return bad
    yield from _datum_records("perversity", grid, seed, check)


@suite("roundtrip")
def suite_roundtrip(grid: dict, seed: int) -> Iterator[Record]:
    def check(O):
        iso = datum_isomorphism(O, D_d(B_d(O), O.d), seed=seed)
        return [] if iso is not None else ["D_d B_d O not isomorphic to O"]
    yield from _datum_records("roundtrip", grid, seed, check)
    for G, fld, dim, d in _points(grid, seed):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        em = extension_maps(L, d)
        for kind, O in (("pstar", em.star), ("pshriek", em.shriek), ("ic", em.ic)):
            ok, detail = model_roundtrip(O, seed)
            yield Record("roundtrip", _inst(G, fld, dim, d, model=kind), ok, detail,
                         None if ok else {"datum": datum_to_json(O)})


def model_roundtrip(O, seed: int = 0):
    """For ``K = B_d O``: a chain map ``B_d D_d K -> K`` inducing isomorphisms on cohomology.

    Returns ``(ok, detail)``.  The chain map is ``B_d`` of a datum isomorphism
    ``D_d K -> O``, so it is a degreewise isomorphism when found."""
    K = B_d(O)
    O2 = D_d(K, O.d)
    iso = datum_isomorphism(O2, O, seed=seed)
    if iso is None:
        return False, "no datum isomorphism D_d K -> O"
    f = B_d_map(iso, target=K)
    if not f.is_chain_map():
        return False, "induced map is not a chain map"
    if not f.is_quasi_iso():
        return False, "induced map is not a quasi-isomorphism"
    return True, ""


@suite("full-faithfulness")
def suite_full_faithfulness(grid: dict, seed: int) -> Iterator[Record]:
    pairs = max(grid.get("samples", 1), 1)
    for G, fld, dim, d in _points(grid, seed):
        if d > 2:
            continue
        L1 = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        L2 = random_module(G, fld, dim, seed=_module_seed(seed, dim, 1), exact=True)
        for k in range(pairs):
            O1 = random_datum(L1, d, seed=_datum_seed(seed, 2 * k))
            O2 = random_datum(L2 if k % 2 else L1, d, seed=_datum_seed(seed, 2 * k + 1))
            a = datum_hom_dim(O1, O2)
            b = homotopy_hom(B_d(O1), B_d(O2)).dimension
            ok = a == b
            yield Record("full-faithfulness", _inst(G, fld, dim, d, k, datum_hom=a, homotopy_hom=b), ok,
                         "" if ok else f"{a} != {b}",
                         None if ok else {"source": datum_to_json(O1), "target": datum_to_json(O2)})


@suite("extensions")
def suite_extensions(grid: dict, seed: int) -> Iterator[Record]:
    for G, fld, dim, d in _points(grid, seed):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        tab = extension_cohomology_table(L, d)
        bad = [k for k in ("pstar", "ic", "pshriek") if not tab[k]["ok"]]
        em = extension_maps(L, d)
        for kind, O in (("pstar", em.star), ("pshriek", em.shriek), ("ic", em.ic)):
            r = is_perverse(B_d(O), d)
            if not r:
                bad.append(f"{kind} not perverse: {r}")
        if not em.factorization_ok():
            bad.append("image factorization")
        yield Record("extensions", _inst(G, fld, dim, d), not bad, "; ".join(bad),
                     {"module": module_to_json(L, with_group=True), "d": d} if bad else None)


@suite("splitting")
def suite_splitting(grid: dict, seed: int) -> Iterator[Record]:
    G = group_by_name("C1")
    for p in grid["fields"]:
        fld = Field(p)
        for dim in grid["dims"]:
            for d in grid["ds"]:
                L = trivial_module(G, fld, dim)
                for k in range(grid.get("samples", 1)):
                    O = random_datum(L, d, seed=_datum_seed(seed, k))
                    ok = splitting_check(B_d(O), d).ok
                    yield Record("splitting", _inst(G, fld, dim, d, k), ok, "" if ok else "no splitting found",
                                 None if ok else {"datum": datum_to_json(O)})


@suite("quiver")
def suite_quiver(grid: dict, seed: int) -> Iterator[Record]:
    for G, fld, dim, _ in _points(grid, seed, need_d=False):
        L = random_module(G, fld, dim, seed=_module_seed(seed, dim), exact=True)
        for k in range(grid.get("samples", 1)):
            O = random_datum(L, 1, seed=_datum_seed(seed, k))
            bad = []
            if not quiver_encode(O).is_valid():
                bad.append("encoded quiver violates its conditions")
            if quiver_roundtrip(O, seed=seed) is None:
                bad.append("decode(encode(O)) not isomorphic to O")
            yield Record("quiver", _inst(G, fld, dim, 1, k), not bad, "; ".join(bad),
                         {"datum": datum_to_json(O)} if bad else None)


@suite("lambda")
def suite_lambda(grid: dict, seed: int) -> Iterator[Record]:
    def check(O):
        res = lambda_checks(lambda_d(O))
        return [k for k, v in res.items() if not v]
    yield from _datum_records("lambda", grid, seed, check, max_d=2, max_order=3)


def run_suite(name: str, grid: dict, seed: int = 0, cap: int | None = None,
              progress: Callable[[Record], None] | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    rep = SuiteReport(name, grid, seed)
    with dimension_cap(cap):
        for rec in SUITES[name](grid, seed):
            rep.records.append(rec)
            if progress:
                progress(rec)
    return rep
