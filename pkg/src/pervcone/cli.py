"""``pervcone`` command line.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .adjunction import ResourceError, bar_cohomology_dims, cyclic_cohomology_oracle
from .groups import (FiniteGroup, GroupError, ModuleError, group_by_name, random_module, regular_module,
                     trivial_module)
from .io import InputError
from .verify import GRIDS, SUITES, dimension_cap, model_roundtrip, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class _Out:
    """Collects the human table and the JSON payload of one command."""

    def __init__(self, args):
        self.as_json = args.json
        self.path = args.out
        self.lines: list[str] = []
        self.payload: dict = {}

    def line(self, s: str = "") -> None:
        self.lines.append(s)

    def emit(self) -> None:
        text = io.dumps(self.payload) if self.as_json else "\n".join(self.lines) + "\n"
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _group(args) -> FiniteGroup | None:
    if not args.group:
        return None
    if Path(args.group).exists():
        return io.group_from_json(io.load_file(args.group), args.group)
    try:
        return group_by_name(args.group)
    except GroupError as e:
        raise InputError("--group", str(e)) from None


def _module(args, G: FiniteGroup | None):
    """``--module`` is a JSON file or ``trivial:<field>:<dim>``, ``regular:<field>``, ``random:<field>:<dim>:<seed>``."""
    spec = args.module
    if spec is None:
        raise InputError("--module", "required")
    if Path(spec).exists():
        return io.module_from_json(io.load_file(spec), G, spec)
    parts = spec.split(":")
    if G is None:
        raise InputError("--group", "needed with a named module")
    kind = parts[0].lower()
    try:
        fld = io.field_from_name(parts[1])
        if kind == "trivial":
            return trivial_module(G, fld, int(parts[2]) if len(parts) > 2 else 1)
        if kind == "regular":
            return regular_module(G, fld)
        if kind == "random":
            return random_module(G, fld, int(parts[2]), seed=int(parts[3]) if len(parts) > 3 else 0, exact=True)
    except (IndexError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError("--module", f"cannot parse {spec!r}") from None
    raise InputError("--module", f"no such file and unknown module kind {kind!r}")


def _datum(args, G):
    if not args.datum:
        raise InputError("--datum", "required")
    return io.datum_from_json(io.load_file(args.datum), G, args.datum)


# -- commands -----------------------------------------------------------------------------

def cmd_cohomology(args, out: _Out) -> int:
    G = _group(args)
    E = _module(args, G)
    top = args.max_degree
    dims = bar_cohomology_dims(E, top)
    out.payload = {"group": E.group.name, "field": E.field.char, "dim": E.dim, "cohomology": dims}
    out.line(f"H^n({E.group.name}, E), dim E = {E.dim}, {E.field}")
    for n, v in enumerate(dims):
        out.line(f"  n={n}: {v}")
    if E.group.cyclic_generator() is not None:
        oracle = [cyclic_cohomology_oracle(E, n) for n in range(top + 1)]
        out.payload["cyclic_oracle"] = oracle
        out.line(f"  cyclic oracle agrees: {oracle == dims}")
        if oracle != dims:
            return EXIT_FAIL
    return EXIT_OK


def _report_json(r) -> dict:
    return {"ok": r.ok, "condition": r.condition, "degree": r.degree, "detail": r.detail}


def cmd_model(args, out: _Out) -> int:
    from .perverse import B_d, is_perverse
    O = _datum(args, _group(args))
    K = B_d(O)
    r = is_perverse(K, O.d)
    out.payload = {"complex": io.complex_to_json(K), "perversity": _report_json(r)}
    out.line(f"B_d model of {O}: degrees {K.lo}..{K.hi}")
    for n in K.degrees:
        out.line(f"  {n}: dims {K.cat.dims(K.term(n))}  h^{n} {K.cohomology_dims(n)}")
    out.line(f"perverse (d={O.d}): {r}")
    return EXIT_OK if r else EXIT_FAIL


def cmd_check(args, out: _Out) -> int:
    from .perverse import B_d, is_perverse
    G = _group(args)
    if args.datum:
        O = _datum(args, G)
        K, d = B_d(O), O.d if args.d is None else args.d
    elif args.complex:
        K = io.complex_from_json(io.load_file(args.complex), G, args.complex)
        d = args.d
        if d is None:
            raise InputError("--d", "required with --complex")
    else:
        raise InputError("--datum", "give --datum or --complex")
    if not hasattr(K.term(K.lo), "W_dim") and K.terms:
        raise InputError("--complex", "perversity is defined for complexes of cone sheaves")
    r = is_perverse(K, d)
    out.payload = {"d": d, "perversity": _report_json(r)}
    out.line(f"perverse (d={d}): {r}")
    return EXIT_OK if r else EXIT_FAIL


def cmd_roundtrip(args, out: _Out) -> int:
    from .perverse import B_d, D_d, datum_isomorphism
    O = _datum(args, _group(args))
    back = D_d(B_d(O), O.d)
    iso = datum_isomorphism(O, back, seed=args.seed)
    ok2, detail = model_roundtrip(O, args.seed)
    out.payload = {"D_d B_d": iso is not None, "B_d D_d": ok2, "detail": detail}
    out.line(f"D_d B_d O isomorphic to O: {iso is not None}")
    out.line(f"B_d D_d K quasi-isomorphic to K: {ok2}{'  ' + detail if detail else ''}")
    return EXIT_OK if iso is not None and ok2 else EXIT_FAIL


def cmd_extension(args, out: _Out) -> int:
    from .extensions import intersection_complex, p_direct_image, p_extension_by_zero
    if args.d is None or args.d < 1:
        raise InputError("--d", "perversity must be at least 1")
    make = {"pstar": p_direct_image, "pshriek": p_extension_by_zero, "ic": intersection_complex}[args.kind]
    E = _module(args, _group(args))
    O = make(E, args.d)
    out.payload = io.datum_to_json(O)
    out.lines = [io.dumps(out.payload).rstrip()]
    return EXIT_OK


def cmd_quiver(args, out: _Out) -> int:
    from .extensions import QuiverError, quiver_decode, quiver_encode
    G = _group(args)
    data = io.load_file(args.file)
    try:
        if args.direction == "encode":
            O = io.datum_from_json(data, G, args.file)
            res = io.quiver_to_json(quiver_encode(O))
        else:
            res = io.datum_to_json(quiver_decode(io.quiver_from_json(data, G, args.file)))
    except QuiverError as e:
        raise InputError(args.file, f"{e} (witness {e.witness})") from None
    out.payload = res
    out.lines = [io.dumps(res).rstrip()]
    return EXIT_OK


def cmd_verify(args, out: _Out) -> int:
    if args.grid in GRIDS:
        grid = dict(GRIDS[args.grid])
    elif Path(args.grid).exists():
        grid = dict(GRIDS["default"], **io.load_file(args.grid))
    else:
        raise InputError("--grid", f"unknown grid {args.grid!r}; use {', '.join(GRIDS)} or a JSON file")
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    for n in names:
        if n not in SUITES:
            raise InputError("suite", f"unknown suite {n!r}; choose from all, {', '.join(sorted(SUITES))}")
    reports = [run_suite(n, grid, args.seed, args.cap) for n in names]
    out.payload = {"ok": all(r.ok for r in reports), "suites": [r.to_json() for r in reports]}
    for r in reports:
        out.line(f"{r.suite}: {'PASS' if r.ok else 'FAIL'} ({len(r.records) - len(r.failures)}/{len(r.records)})")
        for rec in r.failures:
            out.line(f"  counterexample {rec.instance}: {rec.detail}")
    if args.dump and not out.payload["ok"]:
        d = Path(args.dump)
        d.mkdir(parents=True, exist_ok=True)
        k = 0
        for r in reports:
            for rec in r.failures:
                if rec.counterexample:
                    io.write_file(d / f"{r.suite}-{k}.json", rec.counterexample.get("datum", rec.counterexample))
                    k += 1
        out.line(f"wrote {k} replay files to {d}")
    return EXIT_OK if out.payload["ok"] else EXIT_FAIL


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group name (Cn, Sn) or group JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=None, help="dimension cap for constructed modules")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="pervcone", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", parents=[common], help="dim H^n(H, E) from the bar complex")
    c.add_argument("--module", required=True)
    c.add_argument("--max-degree", type=int, default=4)
    c.set_defaults(fn=cmd_cohomology)

    c = sub.add_parser("model", parents=[common], help="B_d complex of a datum and its perversity")
    c.add_argument("--datum", required=True)
    c.set_defaults(fn=cmd_model)

    c = sub.add_parser("check", parents=[common], help="perversity diagnostic")
    c.add_argument("--datum")
    c.add_argument("--complex")
    c.add_argument("--d", type=int)
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("roundtrip", parents=[common], help="D_d B_d and B_d D_d comparisons")
    c.add_argument("--datum", required=True)
    c.set_defaults(fn=cmd_roundtrip)

    c = sub.add_parser("extension", parents=[common], help="datum of a perverse extension of a local system")
    c.add_argument("kind", choices=["pstar", "pshriek", "ic"])
    c.add_argument("--module", required=True)
    c.add_argument("--d", type=int, required=True)
    c.set_defaults(fn=cmd_extension)

    c = sub.add_parser("quiver", parents=[common], help="d = 1 quiver dictionary")
    c.add_argument("direction", choices=["encode", "decode"])
    c.add_argument("file")
    c.set_defaults(fn=cmd_quiver)

    c = sub.add_parser("verify", parents=[common], help="run verification suites over a grid")
    c.add_argument("suite", help="suite name or 'all'")
    c.add_argument("--grid", default="default", help="smoke, default, full or a JSON grid file")
    c.add_argument("--dump", help="directory for replayable counterexample files")
    c.set_defaults(fn=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if args.cap is not None and args.cap <= 0:
        print("error: --cap must be positive", file=sys.stderr)
        return EXIT_INPUT
    out = _Out(args)
    try:
        with dimension_cap(args.cap):
            code = args.fn(args, out)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (GroupError, ModuleError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
