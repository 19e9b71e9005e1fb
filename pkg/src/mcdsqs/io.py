"""Canonical JSON form of certified designs.

Blocks are stored sorted; colorings name their classes by indices into that
block list (a derived triple T at x refers to the block T + {x}).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .model import CertifiedDesign, ClassScope, ColorClass, Coloring, Design, ModelError

SCHEMA_VERSION = 1


def _block_lookup(blocks: list[tuple]) -> dict:
    return {b: i for i, b in enumerate(blocks)}


def _encode_coloring(col: Coloring, index: dict, x: int | None) -> list:
    out = []
    for c in col:
        ids = []
        for row in c.blocks.tolist():
            b = tuple(sorted(row + ([x] if x is not None else [])))
            if b not in index:
                raise ModelError(f"class row {row} at {x} is not a block residue")
            ids.append(index[b])
        out.append({"scope": c.scope.to_json(), "blocks": sorted(ids)})
    return out


def _decode_coloring(data: list, blocks: list[tuple], x: int | None) -> Coloring:
    classes = []
    for c in data:
        rows = [[p for p in blocks[i] if p != x] for i in c["blocks"]]
        width = len(rows[0]) if rows else 0
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), width)
        classes.append(ColorClass(arr, ClassScope.from_json(c["scope"])))
    return Coloring(tuple(classes))


def _components_to_json(comp: dict) -> dict:
    out = {}
    for name, val in comp.items():
        if isinstance(val, dict):
            out[name] = {",".join(map(str, k)) if isinstance(k, tuple) else str(k): [list(map(int, b)) for b in v]
                         for k, v in sorted(val.items())}
        else:
            out[name] = [list(map(int, b)) for b in val]
    return out


def _components_from_json(data: dict) -> dict:
    out = {}
    for name, val in data.items():
        if isinstance(val, dict):
            d = {}
            for k, v in val.items():
                key = tuple(int(p) for p in k.split(",")) if "," in k else int(k)
                d[key] = [tuple(b) for b in v]
            out[name] = d
        else:
            out[name] = [tuple(b) for b in val]
    return out


def to_json(cert: CertifiedDesign) -> dict[str, Any]:
    d = cert.design
    blocks = sorted(tuple(sorted(b)) for b in d.blocks)
    index = _block_lookup(blocks)
    cols = {str(x): _encode_coloring(col, index, x) for x, col in sorted(cert.derived_colorings.items())}
    out = {
        "schema_version": SCHEMA_VERSION,
        "v": d.v,
        "t": d.t,
        "K": sorted(d.K),
        "design_kind": d.kind,
        "kind": cert.claimed_kind,
        "points": list(d.points) if d.points is not None else None,
        "stem": list(d.stem),
        "groups": [list(g) for g in d.groups] if d.groups is not None else None,
        "hole": list(d.hole),
        "blocks": [list(b) for b in blocks],
        "colorings": cols,
        "coloring": _encode_coloring(cert.coloring, index, None) if cert.coloring is not None else None,
        "special_group": cert.special_group,
        "params": {k: v for k, v in sorted(cert.params.items())},
        "components": _components_to_json(dict(cert.components)),
        "provenance": cert.provenance,
    }
    return out


def from_json(data: dict[str, Any]) -> CertifiedDesign:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ModelError(f"unsupported schema_version {data.get('schema_version')!r}")
    blocks = [tuple(b) for b in data["blocks"]]
    d = Design(v=data["v"], blocks=tuple(blocks), t=data.get("t", 3), K=frozenset(data.get("K") or ()),
               kind=data.get("design_kind", "Steiner"), stem=tuple(data.get("stem") or ()),
               groups=tuple(tuple(g) for g in data["groups"]) if data.get("groups") is not None else None,
               hole=tuple(data.get("hole") or ()),
               points=tuple(data["points"]) if data.get("points") is not None else None)
    cols = {int(x): _decode_coloring(c, blocks, int(x)) for x, c in (data.get("colorings") or {}).items()}
    coloring = _decode_coloring(data["coloring"], blocks, None) if data.get("coloring") is not None else None
    return CertifiedDesign(design=d, claimed_kind=data["kind"], derived_colorings=cols, coloring=coloring,
                           special_group=data.get("special_group"), params=dict(data.get("params") or {}),
                           components=_components_from_json(data.get("components") or {}),
                           provenance=data.get("provenance", ""))


def dumps(cert: CertifiedDesign) -> str:
    return json.dumps(to_json(cert), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> CertifiedDesign:
    return from_json(json.loads(text))


def save_design(cert: CertifiedDesign, path) -> None:
    Path(path).write_text(dumps(cert))


def load_design(path) -> CertifiedDesign:
    return loads(Path(path).read_text())
