"""mcdsqs command line: build, verify, derive, chroma, code, data, field.

Exit status: 0 success or pass, 1 verification failure, 2 usage or ingredient error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .model import CLAIMED_KINDS, CertificationError, Design, ModelError, PreconditionError, derive_at

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _kind(name: str) -> str:
    for k in CLAIMED_KINDS:
        if k.lower() == name.lower():
            return k
    raise UsageError(f"unknown kind {name!r}; known: {', '.join(CLAIMED_KINDS)}")


def _load(path):
    from .io import load_design

    try:
        return load_design(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (ValueError, KeyError) as e:
        raise UsageError(f"cannot read {path}: {e}") from None


def cmd_build(a) -> int:
    from .constructions import build
    from .io import save_design

    try:
        cert = build(a.recipe)
    except FileNotFoundError:
        raise UsageError(f"no recipe named or stored at {a.recipe!r}") from None
    save_design(cert, a.output)
    d = cert.design
    print(f"{cert.claimed_kind}: v={d.v} blocks={len(d.blocks)} -> {a.output}")
    print(cert.report.summary())
    return EXIT_OK


def cmd_verify(a) -> int:
    from .verify import verify_certificate

    cert = _load(a.file)
    if a.kind:
        cert = cert.with_(claimed_kind=_kind(a.kind))
    rep = verify_certificate(cert, coverage=not a.no_coverage)
    print(f"{cert.claimed_kind} v={cert.v} blocks={len(cert.design.blocks)}")
    print(rep.summary())
    if a.json:
        print(json.dumps(rep.to_json(), indent=1))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _triples(cert, point) -> Design:
    d = cert.design
    if point is None:
        return d
    if point not in d.point_list:
        raise UsageError(f"point {point} is not an active point")
    return derive_at(d, point)


def cmd_derive(a) -> int:
    cert = _load(a.file)
    sub = _triples(cert, a.point)
    print(f"derived at {a.point}: {len(sub.blocks)} blocks on {sub.n_points} points")
    col = cert.derived_colorings.get(a.point)
    if col is None:
        from .group import complete_colorings

        cols, _ = complete_colorings(cert)
        col = cols.get(a.point)
    if col is None:
        for b in sub.blocks:
            print(" ".join(map(str, b)))
        return EXIT_OK
    for i, c in enumerate(col):
        print(f"class {i + 1} [{c.scope.describe()}]: " + " ".join("{" + ",".join(map(str, r)) + "}" for r in c.blocks.tolist()))
    return EXIT_OK


def cmd_chroma(a) -> int:
    from .resolver import SearchTimeout, chromatic_index, min_coloring

    cert = _load(a.file)
    sts = _triples(cert, a.point)
    if sts.K != frozenset({3}):
        raise UsageError("chroma needs a triple system (give --point for a quadruple system)")
    timeout = a.timeout if a.timeout is not None else float(os.environ.get("MCDSQS_RESOLVER_TIMEOUT", "60"))
    try:
        if a.max is not None:
            col = min_coloring(sts, a.max, timeout=timeout)
            if col is None:
                print(f"UNSAT: no partition into {a.max} or fewer partial parallel classes (exhaustive)")
                return EXIT_FAIL
            r = col.r
        else:
            r, col = chromatic_index(sts, timeout=timeout)
    except SearchTimeout as e:
        print(f"UNDECIDED: {e}")
        return EXIT_FAIL
    print(f"SAT: {r} classes")
    for i, c in enumerate(col):
        print(f"class {i + 1}: " + " ".join("{" + ",".join(map(str, b)) + "}" for b in c.blocks.tolist()))
    return EXIT_OK


def cmd_code(a) -> int:
    from .codes import anticode_bound_check, emit_code, save_code, verify_code

    cert = _load(a.file)
    try:
        code = emit_code(cert)
    except ModelError as e:
        print(f"FAIL: {e}")
        return EXIT_FAIL
    rep = verify_code(code)
    anti = anticode_bound_check(code.n, code.w, 3, code.q, len(code))
    print(code.header)
    print(f"distance: {rep.summary()} (method {rep.stats.get('method')})")
    print(f"anticode bound: {'equality' if anti.stats['perfect'] else anti.summary()}")
    if a.output:
        save_code(code, a.output, a.format)
    return EXIT_OK if rep.passed and anti.passed else EXIT_FAIL


def cmd_data(a) -> int:
    from .data import DATASETS, load_dataset
    from .io import save_design

    if a.action == "list":
        for k, e in DATASETS.items():
            print(f"{k}\t{e.claimed_kind}\tv={e.v}\t{e.provenance}")
        return EXIT_OK
    if a.id not in DATASETS:
        raise UsageError(f"unknown dataset {a.id!r}")
    cert = load_dataset(a.id)
    out = a.output or f"{a.id}.design"
    save_design(cert, out)
    print(f"{a.id}: {len(cert.design.blocks)} blocks -> {out}")
    return EXIT_OK


def cmd_field(a) -> int:
    from .algebra import build_field

    F = build_field(a.p, a.n)
    print(f"GF({F.q}) = GF({a.p})[x]/({F.modulus_string()}); primitive element {F.primitive}")
    print("exp: " + " ".join(map(str, np.asarray(F.exp)[: F.q - 1].tolist())))
    if F.q <= a.max_table:
        add, mul = F.tables()
        for name, T in (("+", add), ("*", mul)):
            print(f"[{name}]")
            for row in T.tolist():
                print(" ".join(f"{c:>{len(str(F.q - 1))}}" for c in row))
    return EXIT_OK


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcdsqs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("build", help="run a named recipe or a recipe file")
    b.add_argument("--recipe", required=True)
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(fn=cmd_build)
    v = sub.add_parser("verify", help="verify a design file")
    v.add_argument("file")
    v.add_argument("--kind")
    v.add_argument("--no-coverage", action="store_true")
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_verify)
    d = sub.add_parser("derive", help="print the derived design and coloring at a point")
    d.add_argument("file")
    d.add_argument("--point", type=int, required=True)
    d.set_defaults(fn=cmd_derive)
    c = sub.add_parser("chroma", help="minimum coloring of a triple system")
    c.add_argument("file")
    c.add_argument("--max", type=int)
    c.add_argument("--point", type=int, help="derive a quadruple system at this point first")
    c.add_argument("--timeout", type=float)
    c.set_defaults(fn=cmd_chroma)
    k = sub.add_parser("code", help="emit and verify the constant-weight code")
    k.add_argument("file")
    k.add_argument("-o", "--output")
    k.add_argument("--format", choices=("text", "dense"), default="text")
    k.set_defaults(fn=cmd_code)
    g = sub.add_parser("data", help="list or export embedded datasets")
    g.add_argument("action", choices=("list", "export"))
    g.add_argument("id", nargs="?")
    g.add_argument("-o", "--output")
    g.set_defaults(fn=cmd_data)
    f = sub.add_parser("field", help="print finite field tables")
    f.add_argument("p", type=int)
    f.add_argument("n", type=int, nargs="?", default=1)
    f.add_argument("--max-table", type=int, default=32)
    f.set_defaults(fn=cmd_field)
    return p


def main(argv=None) -> int:
    try:
        a = parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if a.cmd == "data" and a.action == "export" and not a.id:
        print("error: data export needs a dataset id", file=sys.stderr)
        return EXIT_USAGE
    try:
        return a.fn(a)
    except (UsageError, PreconditionError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as e:
        print(f"FAIL: {e}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
